//! Transient distribution of a model whose clocks are all exponential, by
//! breadth-first enumeration of the reachable states and uniformization.

use std::collections::{BTreeMap, VecDeque};

use statrs::function::gamma::ln_gamma;

use super::VerifyError;
use crate::clock::{evaluate_enabling, ClockStatus, EnablingOutcome, SubstateKey, SystemState};
use crate::hazard::ContinuousHazard;
use crate::models::Model;

/// Counts of a state, without the times at which they last changed.
pub type Occupancy = BTreeMap<SubstateKey, i64>;

const TRUNCATION: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CtmcOracle {
    states: Vec<Occupancy>,
    index: BTreeMap<Occupancy, usize>,
    // outgoing (target, rate) per state
    transitions: Vec<Vec<(usize, f64)>>,
    exit: Vec<f64>,
}

impl CtmcOracle {
    /// Enumerates the states reachable from the model's initial state.
    pub fn build(model: &Model, limit: usize) -> Result<Self, VerifyError> {
        let mut oracle = Self {
            states: Vec::new(),
            index: BTreeMap::new(),
            transitions: Vec::new(),
            exit: Vec::new(),
        };
        let mut queue = VecDeque::new();
        oracle.intern(model.initial().counts().clone(), &mut queue, limit)?;
        while let Some(i) = queue.pop_front() {
            let state = SystemState::from_counts(oracle.states[i].clone());
            let mut out = Vec::new();
            for clock in model.clocks() {
                let EnablingOutcome::Enabled { spec, .. } =
                    evaluate_enabling(clock, &state, 0.0, &ClockStatus::Disabled)
                else {
                    continue;
                };
                let rate = match spec.continuous() {
                    ContinuousHazard::Exponential { rate } if spec.atoms().is_empty() => *rate,
                    _ => return Err(VerifyError::NonExponentialClock { clock: clock.id }),
                };
                if rate == 0.0 {
                    continue;
                }
                let next = state.with_mark(&clock.mark, 0.0)?.counts().clone();
                let j = oracle.intern(next, &mut queue, limit)?;
                if j != i {
                    out.push((j, rate));
                }
            }
            oracle.exit[i] = out.iter().map(|(_, r)| r).sum();
            oracle.transitions[i] = out;
        }
        Ok(oracle)
    }

    fn intern(&mut self, occupancy: Occupancy, queue: &mut VecDeque<usize>, limit: usize) -> Result<usize, VerifyError> {
        if let Some(&i) = self.index.get(&occupancy) {
            return Ok(i);
        }
        if self.states.len() >= limit {
            return Err(VerifyError::StateSpaceTooLarge { limit });
        }
        let i = self.states.len();
        self.index.insert(occupancy.clone(), i);
        self.states.push(occupancy);
        self.transitions.push(Vec::new());
        self.exit.push(0.0);
        queue.push_back(i);
        Ok(i)
    }

    pub fn states(&self) -> &[Occupancy] {
        &self.states
    }

    pub fn state_index(&self, occupancy: &Occupancy) -> Option<usize> {
        self.index.get(occupancy).copied()
    }

    /// Point mass on the initial state.
    pub fn initial_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.states.len()];
        p[0] = 1.0;
        p
    }

    /// Distribution after `horizon` starting from `start`. The Poisson
    /// series is cut once the neglected weight is below 1e-10.
    pub fn transient(&self, start: &[f64], horizon: f64) -> Vec<f64> {
        let lambda = self.exit.iter().copied().fold(0.0, f64::max);
        if horizon == 0.0 || lambda == 0.0 {
            return start.to_vec();
        }
        let mean = lambda * horizon;
        let mut v = start.to_vec();
        let mut result = vec![0.0; v.len()];
        let mut accumulated = 0.0;
        let mut k = 0u64;
        loop {
            let weight = (-mean + k as f64 * mean.ln() - ln_gamma(k as f64 + 1.0)).exp();
            for (r, x) in result.iter_mut().zip(&v) {
                *r += weight * x;
            }
            accumulated += weight;
            if 1.0 - accumulated < TRUNCATION && k as f64 > mean {
                break;
            }
            v = self.uniformized_step(&v, lambda);
            k += 1;
        }
        result
    }

    fn uniformized_step(&self, v: &[f64], lambda: f64) -> Vec<f64> {
        let mut next: Vec<f64> = v
            .iter()
            .zip(&self.exit)
            .map(|(x, exit)| x * (1.0 - exit / lambda))
            .collect();
        for (i, out) in self.transitions.iter().enumerate() {
            for &(j, rate) in out {
                next[j] += v[i] * rate / lambda;
            }
        }
        next
    }
}

/// Distribution over reachable states at `horizon`, started from the
/// model's initial state.
pub fn ctmc_oracle(model: &Model, horizon: f64) -> Result<BTreeMap<Occupancy, f64>, VerifyError> {
    let oracle = CtmcOracle::build(model, 10_000)?;
    let p = oracle.transient(&oracle.initial_distribution(), horizon);
    Ok(oracle.states().iter().cloned().zip(p).collect())
}
