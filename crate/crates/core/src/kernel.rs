//! The trajectory loop: sample the next jump, apply its mark, re-evaluate
//! the clocks that depend on the substates it wrote, and hand the enabling
//! changes to the sampler.

use rayon::prelude::*;
use thiserror::Error;

use crate::clock::{evaluate_enabling, ClockError, ClockId, ClockStatus, EnablingOutcome, SystemState};
use crate::models::Model;
use crate::rng::{derive_seed, ClockRng};
use crate::sampler::{EnabledClock, EnablingDelta, Sampler, SamplerError, SamplerKind};
use crate::trajectory::{EventRecord, StopReason, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error("invalid stop condition: {0}")]
    InvalidStop(&'static str),
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    /// Run up to and including time `t`; jumps after `t` are censored.
    EndTime(f64),
    /// Stop after `n` events.
    EventCount(u64),
    /// Run until no clock can fire.
    Stalled,
}

impl StopCondition {
    fn validate(self) -> Result<Self, KernelError> {
        match self {
            StopCondition::EndTime(t) if !(t >= 0.0) => {
                Err(KernelError::InvalidStop("end time must be non-negative"))
            }
            StopCondition::EventCount(0) => Err(KernelError::InvalidStop("event count must be positive")),
            other => Ok(other),
        }
    }
}

/// One trajectory in progress.
pub struct Kernel<'m, S: Sampler + ?Sized = dyn Sampler> {
    model: &'m Model,
    state: SystemState,
    status: Vec<ClockStatus>,
    sampler: Box<S>,
    rng: ClockRng,
    seed: u64,
    now: f64,
    seq: u64,
}

impl<'m> Kernel<'m> {
    /// Kernel driving a sampler chosen by name.
    pub fn new(model: &'m Model, kind: &SamplerKind, seed: u64) -> Result<Self, KernelError> {
        Kernel::with_sampler(model, kind.build(model.clock_count()), seed)
    }
}

impl<'m, S: Sampler + ?Sized> Kernel<'m, S> {
    /// Evaluates every clock in the initial state at time 0 and hands the
    /// enabled ones to `sampler`.
    pub fn with_sampler(model: &'m Model, sampler: Box<S>, seed: u64) -> Result<Self, KernelError> {
        let mut kernel = Self {
            model,
            state: model.initial().clone(),
            status: vec![ClockStatus::Disabled; model.clock_count()],
            sampler,
            rng: ClockRng::from_seed(seed),
            seed,
            now: 0.0,
            seq: 0,
        };
        let mut delta = EnablingDelta::default();
        for clock in model.clocks() {
            let outcome = evaluate_enabling(clock, &kernel.state, 0.0, &ClockStatus::Disabled);
            if let EnablingOutcome::Enabled { spec, enabling_time } = outcome {
                delta.newly_enabled.push(EnabledClock {
                    clock: clock.id,
                    spec: spec.clone(),
                    enabling_time,
                });
                kernel.status[clock.id.index()] = ClockStatus::Enabled { spec, enabling_time };
            }
        }
        kernel.sampler.absorb(&delta, 0.0, &mut kernel.rng)?;
        Ok(kernel)
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn status(&self, clock: ClockId) -> &ClockStatus {
        &self.status[clock.index()]
    }

    pub fn sampler(&self) -> &S {
        &self.sampler
    }

    pub fn variates_consumed(&self) -> u64 {
        self.rng.consumed()
    }

    /// Fires the next clock unless its time is after `until`. Returns `None`
    /// when the jump is censored, leaving the state as it was.
    pub fn step(&mut self, until: f64) -> Result<Option<EventRecord>, KernelError> {
        let event = self.sampler.next(self.now, &mut self.rng)?;
        if event.time > until {
            return Ok(None);
        }
        let fired = event.clock;
        let time = event.time;
        self.state.apply_mark(&self.model.clock(fired).mark, time)?;
        self.now = time;

        let mut delta = EnablingDelta {
            fired: Some(fired),
            ..Default::default()
        };
        for clock in self.model.graph().affected(fired) {
            let before = &self.status[clock.index()];
            // the fired clock's draw is spent, so it is re-enabled from scratch
            let previously = if clock == fired {
                &ClockStatus::Disabled
            } else {
                before
            };
            let outcome = evaluate_enabling(self.model.clock(clock), &self.state, time, previously);
            let after = match outcome {
                EnablingOutcome::UnchangedSinceLastQuery if clock == fired => ClockStatus::Disabled,
                EnablingOutcome::UnchangedSinceLastQuery => continue,
                EnablingOutcome::Disabled => ClockStatus::Disabled,
                EnablingOutcome::Enabled { spec, enabling_time } => ClockStatus::Enabled { spec, enabling_time },
            };
            match (&after, before.is_enabled() && clock != fired) {
                (ClockStatus::Enabled { spec, enabling_time }, was_enabled) => {
                    let entry = EnabledClock {
                        clock,
                        spec: spec.clone(),
                        enabling_time: *enabling_time,
                    };
                    if was_enabled {
                        delta.modified.push(entry);
                    } else {
                        delta.newly_enabled.push(entry);
                    }
                }
                (ClockStatus::Disabled, _) => {
                    if before.is_enabled() {
                        delta.newly_disabled.push(clock);
                    }
                }
            }
            self.status[clock.index()] = after;
        }
        self.sampler.absorb(&delta, time, &mut self.rng)?;

        let record = EventRecord {
            seq: self.seq,
            time,
            clock: fired,
        };
        self.seq += 1;
        Ok(Some(record))
    }

    /// Re-evaluates every clock against the current state and checks that
    /// the cached statuses and the sampler's enabled set are up to date.
    pub fn audit(&self) -> Result<(), String> {
        for clock in self.model.clocks() {
            let cached = &self.status[clock.id.index()];
            let outcome = evaluate_enabling(clock, &self.state, self.now, cached);
            if outcome != EnablingOutcome::UnchangedSinceLastQuery {
                return Err(format!(
                    "clock {} ({}) is stale at t={}: cached {cached:?}, fresh {outcome:?}",
                    clock.id, clock.label, self.now
                ));
            }
        }
        let expected: Vec<ClockId> = self
            .model
            .clocks()
            .iter()
            .map(|c| c.id)
            .filter(|id| self.status[id.index()].is_enabled())
            .collect();
        let held = self.sampler.enabled_clocks();
        if held != expected {
            return Err(format!(
                "sampler holds {held:?} but enabled clocks are {expected:?} at t={}",
                self.now
            ));
        }
        Ok(())
    }

    /// Steps until `stop` holds or no clock can fire.
    pub fn run(mut self, stop: StopCondition) -> Result<Trajectory, KernelError> {
        let stop = stop.validate()?;
        let initial_state = self.state.clone();
        let mut events = Vec::new();
        let until = match stop {
            StopCondition::EndTime(t) => t,
            _ => f64::INFINITY,
        };
        let reason = loop {
            if let StopCondition::EventCount(n) = stop {
                if events.len() as u64 >= n {
                    break StopReason::EventCount;
                }
            }
            match self.step(until) {
                Ok(Some(event)) => events.push(event),
                Ok(None) => break StopReason::EndTime,
                Err(KernelError::Sampler(SamplerError::Stalled)) => break StopReason::Stalled,
                Err(e) => return Err(e),
            }
        };
        let final_time = match (stop, reason) {
            (StopCondition::EndTime(t), _) => t,
            _ => self.now,
        };
        Ok(Trajectory {
            model: self.model.config(),
            model_hash: self.model.hash().to_string(),
            sampler: self.sampler.name(),
            rng_seed: self.seed,
            initial_state,
            events,
            final_time,
            variates_consumed: self.rng.consumed(),
            stop: reason,
        })
    }
}

/// One trajectory; a pure function of `(model, kind, seed, stop)`.
pub fn run_trajectory(
    model: &Model,
    kind: &SamplerKind,
    seed: u64,
    stop: StopCondition,
) -> Result<Trajectory, KernelError> {
    Kernel::new(model, kind, seed)?.run(stop)
}

/// `count` trajectories, trajectory `i` seeded with `derive_seed(base_seed, i)`,
/// returned in index order whatever the number of workers.
pub fn run_ensemble(
    model: &Model,
    kind: &SamplerKind,
    base_seed: u64,
    count: usize,
    stop: StopCondition,
    workers: usize,
) -> Result<Vec<Trajectory>, KernelError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| KernelError::Pool(e.to_string()))?;
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| run_trajectory(model, kind, derive_seed(base_seed, i as u64), stop))
            .collect()
    })
}
