use std::collections::BTreeMap;
use std::sync::Arc;

use super::{conditional_draw, EnablingDelta, Sampler, SamplerError, SamplerEvent};
use crate::clock::ClockId;
use crate::hazard::HazardSpec;
use crate::rng::ClockRng;

/// Draws a fresh putative time for every enabled clock at every step and
/// takes the soonest.
#[derive(Debug, Default)]
pub struct FirstReaction {
    clocks: BTreeMap<ClockId, (Arc<HazardSpec>, f64)>,
}

impl FirstReaction {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Sampler for FirstReaction {
    fn name(&self) -> String {
        "first-reaction".into()
    }

    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        _now: f64,
        _rng: &mut ClockRng,
    ) -> Result<(), SamplerError> {
        for clock in &delta.newly_disabled {
            if self.clocks.remove(clock).is_none() {
                return Err(SamplerError::UnknownClock(*clock));
            }
        }
        for entry in &delta.modified {
            match self.clocks.get_mut(&entry.clock) {
                Some(slot) => *slot = (entry.spec.clone(), entry.enabling_time),
                None => return Err(SamplerError::UnknownClock(entry.clock)),
            }
        }
        for entry in &delta.newly_enabled {
            self.clocks
                .insert(entry.clock, (entry.spec.clone(), entry.enabling_time));
        }
        Ok(())
    }

    fn next(&mut self, now: f64, rng: &mut ClockRng) -> Result<SamplerEvent, SamplerError> {
        let mut best: Option<SamplerEvent> = None;
        for (&clock, (spec, enabling_time)) in &self.clocks {
            let time = conditional_draw(spec, *enabling_time, now, rng.uniform());
            if best.is_none_or(|b| time < b.time) {
                best = Some(SamplerEvent { clock, time });
            }
        }
        match best {
            Some(event) if event.time.is_finite() => Ok(event),
            _ => Err(SamplerError::Stalled),
        }
    }

    fn enabled_clocks(&self) -> Vec<ClockId> {
        self.clocks.keys().copied().collect()
    }
}
