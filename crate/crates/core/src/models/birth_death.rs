use std::sync::Arc;

use super::{enabled, Model, ModelError};
use crate::clock::{ClockId, ClockSpec, Enabling, JumpMark, SystemState};
use crate::hazard::HazardSpec;

/// Linear birth-death process on `X` with per-capita rates, births stopped
/// at `cap`. Both hazards change at every event. Clock 0 is birth, clock 1
/// death.
pub fn birth_death(birth: f64, death: f64, initial: i64, cap: i64) -> Result<Model, ModelError> {
    HazardSpec::exponential(birth)?;
    HazardSpec::exponential(death)?;
    let per_capita = move |rate: f64| {
        move |state: &SystemState, _| {
            let x = state.get("X");
            if x > 0 && rate > 0.0 {
                let spec = HazardSpec::exponential(rate * x as f64).expect("validated rate");
                enabled(&Arc::new(spec), None)
            } else {
                Enabling::Disabled
            }
        }
    };
    let birth_rule = per_capita(birth);
    let clocks = vec![
        ClockSpec::new(
            ClockId(0),
            "birth",
            vec!["X".into()],
            JumpMark::new([("X", 1)]),
            move |state: &SystemState, now| {
                if state.get("X") >= cap {
                    Enabling::Disabled
                } else {
                    birth_rule(state, now)
                }
            },
        ),
        ClockSpec::new(
            ClockId(1),
            "death",
            vec!["X".into()],
            JumpMark::new([("X", -1)]),
            per_capita(death),
        ),
    ];
    Model::new("birth-death", clocks, SystemState::from_counts([("X", initial)]))
}
