//! Susceptible-infectious-recovered epidemic with one clock per action.
//!
//! Every ordered pair `(k, i)` of distinct individuals has an infection
//! clock, enabled while `k` is infectious and `i` susceptible. Every
//! individual has a recovery clock measured from the time it was infected.

use std::sync::Arc;

use super::{enabled, key, Model, ModelError, Params};
use crate::clock::{ClockId, ClockSpec, Enabling, JumpMark, SystemState};
use crate::hazard::HazardSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SirConfig {
    pub individuals: usize,
    pub initial_infected: usize,
    pub infect: HazardSpec,
    pub recover: HazardSpec,
}

impl Default for SirConfig {
    fn default() -> Self {
        Self {
            individuals: 10,
            initial_infected: 1,
            infect: HazardSpec::exponential(1.0).expect("valid rate"),
            recover: HazardSpec::exponential(1.0).expect("valid rate"),
        }
    }
}

impl SirConfig {
    pub(crate) fn from_params(p: &mut Params<'_>) -> Result<Self, ModelError> {
        let individuals = p.get("N", 10usize, |n: &usize| {
            (*n >= 1).then_some(()).ok_or("must be at least 1")
        })?;
        let initial_infected = p.get("infected", 1usize, |i: &usize| {
            (*i <= individuals).then_some(()).ok_or("must not exceed N")
        })?;
        Ok(Self {
            individuals,
            initial_infected,
            infect: p.hazard("infect", "exponential(1)")?,
            recover: p.hazard("recover", "exponential(1)")?,
        })
    }
}

fn s(i: usize) -> String {
    format!("S:{i}")
}

fn inf(i: usize) -> String {
    format!("I:{i}")
}

fn r(i: usize) -> String {
    format!("R:{i}")
}

/// Infection clock ids come first, pair `(k, i)` in row-major order without
/// the diagonal, followed by one recovery clock per individual.
pub fn sir(config: &SirConfig) -> Result<Model, ModelError> {
    let n = config.individuals;
    let infect = Arc::new(config.infect.clone());
    let recover = Arc::new(config.recover.clone());
    let mut clocks = Vec::with_capacity(n * n);
    for k in 0..n {
        for i in (0..n).filter(|&i| i != k) {
            let (ik, si) = (key(inf(k)), key(s(i)));
            let spec = infect.clone();
            clocks.push(ClockSpec::new(
                ClockId::from_index(clocks.len()),
                format!("infect:{k}:{i}"),
                vec![ik.clone(), si.clone()],
                JumpMark::new([(si.clone(), -1), (key(inf(i)), 1)]),
                move |state: &SystemState, _| {
                    if state.get(ik.as_str()) > 0 && state.get(si.as_str()) > 0 {
                        enabled(&spec, None)
                    } else {
                        Enabling::Disabled
                    }
                },
            ));
        }
    }
    for i in 0..n {
        let ii = key(inf(i));
        let spec = recover.clone();
        clocks.push(ClockSpec::new(
            ClockId::from_index(clocks.len()),
            format!("recover:{i}"),
            vec![ii.clone()],
            JumpMark::new([(ii.clone(), -1), (key(r(i)), 1)]),
            move |state: &SystemState, _| {
                if state.get(ii.as_str()) > 0 {
                    enabled(&spec, state.changed_at(ii.as_str()))
                } else {
                    Enabling::Disabled
                }
            },
        ));
    }
    let initial = SystemState::from_counts((0..n).map(|i| {
        if i < config.initial_infected {
            (inf(i), 1)
        } else {
            (s(i), 1)
        }
    }).map(|(k, v)| (key(k), v)));
    Model::new("sir", clocks, initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{evaluate_enabling, ClockStatus, EnablingOutcome};

    #[test]
    fn clock_layout() {
        let model = sir(&SirConfig {
            individuals: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(model.clock_count(), 9);
        assert_eq!(model.clock(ClockId(0)).label, "infect:0:1");
        assert_eq!(model.clock(ClockId(6)).label, "recover:0");
        // infection of 1 by 0 affects the clocks reading S:1 or I:1
        let affected = model.graph().affected(ClockId(0));
        assert!(affected.contains(&ClockId(7)), "recovery of 1");
        assert!(affected.contains(&ClockId(2)), "1 infecting 0");
    }

    #[test]
    fn recovery_measured_from_infection() {
        let model = sir(&SirConfig {
            individuals: 2,
            recover: HazardSpec::weibull(2.0, 1.0).unwrap(),
            ..Default::default()
        })
        .unwrap();
        let state = model
            .initial()
            .with_mark(&model.clock(ClockId(0)).mark, 0.7)
            .unwrap();
        assert_eq!(state.get("I:1"), 1);
        let outcome = evaluate_enabling(model.clock(ClockId(3)), &state, 0.7, &ClockStatus::Disabled);
        assert!(matches!(outcome, EnablingOutcome::Enabled { enabling_time, .. } if enabling_time == 0.7));
        // nobody left to infect
        let outcome = evaluate_enabling(model.clock(ClockId(0)), &state, 0.7, &ClockStatus::Disabled);
        assert_eq!(outcome, EnablingOutcome::UnchangedSinceLastQuery);
    }
}
