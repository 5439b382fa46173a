use std::sync::Arc;

use super::{conditional_draw, EnablingDelta, PutativeQueue, Sampler, SamplerError, SamplerEvent};
use crate::clock::ClockId;
use crate::hazard::HazardSpec;
use crate::rng::ClockRng;

/// Keeps putative times across jumps and redraws, with a fresh variate, only
/// the clocks whose enabling changed. Redraws condition on survival from the
/// enabling time to the current time.
#[derive(Debug, Default)]
pub struct NextToFire {
    specs: Vec<Option<(Arc<HazardSpec>, f64)>>,
    queue: PutativeQueue,
}

impl NextToFire {
    pub fn with_capacity(clocks: usize) -> Self {
        Self {
            specs: vec![None; clocks],
            queue: PutativeQueue::with_capacity(clocks),
        }
    }

    fn slot(&mut self, clock: ClockId) -> &mut Option<(Arc<HazardSpec>, f64)> {
        if clock.index() >= self.specs.len() {
            self.specs.resize(clock.index() + 1, None);
        }
        &mut self.specs[clock.index()]
    }
}

impl Sampler for NextToFire {
    fn name(&self) -> String {
        "next-to-fire".into()
    }

    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        now: f64,
        rng: &mut ClockRng,
    ) -> Result<(), SamplerError> {
        for &clock in &delta.newly_disabled {
            if self.slot(clock).take().is_none() {
                return Err(SamplerError::UnknownClock(clock));
            }
            self.queue.remove(clock);
        }
        for entry in &delta.modified {
            if self.slot(entry.clock).is_none() {
                return Err(SamplerError::UnknownClock(entry.clock));
            }
        }
        let mut redraw: Vec<_> = delta.newly_enabled.iter().chain(&delta.modified).collect();
        redraw.sort_by_key(|e| e.clock);
        for entry in redraw {
            *self.slot(entry.clock) = Some((entry.spec.clone(), entry.enabling_time));
            let time = conditional_draw(&entry.spec, entry.enabling_time, now, rng.uniform());
            self.queue.set(entry.clock, time);
        }
        Ok(())
    }

    fn next(&mut self, _now: f64, _rng: &mut ClockRng) -> Result<SamplerEvent, SamplerError> {
        match self.queue.peek() {
            Some((clock, time)) if time.is_finite() => Ok(SamplerEvent { clock, time }),
            _ => Err(SamplerError::Stalled),
        }
    }

    fn enabled_clocks(&self) -> Vec<ClockId> {
        self.queue.members()
    }
}
