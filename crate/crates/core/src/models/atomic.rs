//! Small single-purpose models: the atomic race, a Poisson process and a
//! race of exponential clocks.

use super::{guarded_clock, Model, ModelError};
use crate::clock::{JumpMark, SystemState};
use crate::hazard::{Atom, HazardSpec};

/// Two clocks race once: `A` is exponential with rate `ln 2`, `B` jumps at
/// time 1 with probability 1/2. Whichever fires first disables both.
///
/// `A` is clock 0 and `B` clock 1.
pub fn atomic_showcase() -> Result<Model, ModelError> {
    let open = |s: &SystemState| s.get("done") == 0;
    let clocks = vec![
        guarded_clock(
            0,
            "A",
            vec!["done".into()],
            JumpMark::new([("done", 1), ("A", 1)]),
            HazardSpec::exponential(std::f64::consts::LN_2)?,
            open,
        ),
        guarded_clock(
            1,
            "B",
            vec!["done".into()],
            JumpMark::new([("done", 1), ("B", 1)]),
            HazardSpec::atoms_only(vec![Atom::new(1.0, 0.5)])?,
            open,
        ),
    ];
    Model::new("atomic", clocks, SystemState::new())
}

/// A single always-enabled exponential clock counting its own events.
pub fn poisson(rate: f64) -> Result<Model, ModelError> {
    let clock = guarded_clock(
        0,
        "arrival",
        vec![],
        JumpMark::new([("count", 1)]),
        HazardSpec::exponential(rate)?,
        |_| true,
    );
    Model::new("poisson", vec![clock], SystemState::new())
}

/// Always-enabled exponential clocks; clock `j` counts into `hits:j`.
pub fn race(rates: &[f64]) -> Result<Model, ModelError> {
    let clocks = rates
        .iter()
        .enumerate()
        .map(|(j, &rate)| {
            Ok(guarded_clock(
                j,
                format!("clock:{j}"),
                vec![],
                JumpMark::new([(format!("hits:{j}").as_str(), 1)]),
                HazardSpec::exponential(rate)?,
                |_| true,
            ))
        })
        .collect::<Result<_, ModelError>>()?;
    Model::new("race", clocks, SystemState::new())
}
