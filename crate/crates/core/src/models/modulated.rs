use std::sync::Arc;

use super::{enabled, key, Model, ModelError};
use crate::clock::{ClockId, ClockSpec, JumpMark, SystemState};
use crate::hazard::{Atom, HazardSpec};

/// Hazards that every modulated clock cycles through.
fn phases() -> Result<Vec<Arc<HazardSpec>>, ModelError> {
    Ok(vec![
        Arc::new(HazardSpec::weibull(2.0, 1.0)?),
        Arc::new(HazardSpec::gamma(2.0, 3.0)?),
        Arc::new(HazardSpec::exponential(1.5)?),
        Arc::new(HazardSpec::piecewise(vec![0.0, 0.5], vec![0.4, 2.0])?),
    ])
}

/// Clocks that are always enabled but whose hazard changes every time any
/// clock fires.
///
/// Clock `j` reads a shared `phase` counter and picks its hazard from a
/// fixed cycle by `phase + j`. It is measured from its own last firing, so
/// at every jump every other clock keeps its enabling time and only its
/// hazard is modified. Clock `j` also carries an atom of mass 0.3 at offset
/// `1 + j / (2 * clocks)`, distinct for every clock.
pub fn modulated(clocks: usize) -> Result<Model, ModelError> {
    let phase = key("phase");
    let cycle = phases()?;
    let mut specs: Vec<Vec<Arc<HazardSpec>>> = Vec::with_capacity(clocks);
    for j in 0..clocks {
        let atom = Atom::new(1.0 + j as f64 / (2.0 * clocks as f64), 0.3);
        specs.push(
            cycle
                .iter()
                .map(|s| (**s).clone().with_atoms(vec![atom]).map(Arc::new))
                .collect::<Result<_, _>>()?,
        );
    }
    let clocks = specs
        .into_iter()
        .enumerate()
        .map(|(j, own)| {
            let fired = key(format!("fired:{j}"));
            let (phase_key, fired_key) = (phase.clone(), fired.clone());
            ClockSpec::new(
                ClockId::from_index(j),
                format!("modulated:{j}"),
                vec![phase.clone(), fired.clone()],
                JumpMark::new([(phase.clone(), 1), (fired, 1)]),
                move |state: &SystemState, _| {
                    let which = (state.get(phase_key.as_str()) as usize + j) % own.len();
                    enabled(&own[which], Some(state.changed_at(fired_key.as_str()).unwrap_or(0.0)))
                },
            )
        })
        .collect();
    Model::new("modulated", clocks, SystemState::new())
}
