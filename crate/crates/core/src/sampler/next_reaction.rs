//! Next Reaction sampling with additive log-survival bookkeeping.
//!
//! Each clock holds one drawn log-survival for its whole life between
//! firings. While enabled it consumes hazard along its time process; when
//! its hazard is modified or it is disabled, the consumption so far is
//! banked and the remaining budget is re-inverted under the new hazard
//! (or frozen until the clock is enabled again). Only the clock that fires
//! gets a new draw.

use std::sync::Arc;

use super::{EnabledClock, EnablingDelta, PutativeQueue, Sampler, SamplerError, SamplerEvent};
use crate::clock::ClockId;
use crate::hazard::{HazardSpec, LogSurvival};
use crate::rng::ClockRng;

#[derive(Debug, Clone)]
struct Segment {
    spec: Arc<HazardSpec>,
    enabling_time: f64,
    start: f64,
}

#[derive(Debug, Clone)]
struct LedgerEntry {
    drawn: LogSurvival,
    consumed: f64,
    // `None` while the clock is disabled and its budget is frozen
    segment: Option<Segment>,
}

impl LedgerEntry {
    fn remaining(&self) -> f64 {
        (self.drawn.budget() - self.consumed).max(0.0)
    }
}

/// Budget accounting of a clock at the moment it fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireAudit {
    pub clock: ClockId,
    pub time: f64,
    /// `-ln S'` of the draw that this firing used up.
    pub drawn_budget: f64,
    /// Hazard consumed along the time process up to the firing time.
    pub consumed: f64,
    /// The firing time coincides with one of the clock's atoms.
    pub at_atom: bool,
}

#[derive(Debug, Default)]
pub struct NextReaction {
    ledger: Vec<Option<LedgerEntry>>,
    queue: PutativeQueue,
    last_fire: Option<FireAudit>,
}

impl NextReaction {
    pub fn with_capacity(clocks: usize) -> Self {
        Self {
            ledger: vec![None; clocks],
            queue: PutativeQueue::with_capacity(clocks),
            last_fire: None,
        }
    }

    /// Budget accounting of the most recently fired clock.
    pub fn last_fire(&self) -> Option<FireAudit> {
        self.last_fire
    }

    /// Drawn budget and hazard consumed so far by `clock`, banked up to `now`.
    pub fn budget(&self, clock: ClockId, now: f64) -> Option<(f64, f64)> {
        let entry = self.ledger.get(clock.index())?.as_ref()?;
        let pending = entry.segment.as_ref().map_or(0.0, |s| consumed_over(s, now));
        Some((entry.drawn.budget(), entry.consumed + pending))
    }

    /// Current putative time of an enabled clock.
    pub fn putative(&self, clock: ClockId) -> Option<f64> {
        self.queue.time(clock)
    }

    fn entry(&mut self, clock: ClockId) -> &mut Option<LedgerEntry> {
        if clock.index() >= self.ledger.len() {
            self.ledger.resize(clock.index() + 1, None);
        }
        &mut self.ledger[clock.index()]
    }

    fn active(&mut self, clock: ClockId) -> Result<&mut LedgerEntry, SamplerError> {
        match self.entry(clock) {
            Some(entry) if entry.segment.is_some() => Ok(entry),
            _ => Err(SamplerError::UnknownClock(clock)),
        }
    }

    fn schedule(&mut self, clock: ClockId, now: f64) {
        let entry = self.ledger[clock.index()].as_ref().expect("scheduled clock has a ledger");
        let segment = entry.segment.as_ref().expect("scheduled clock is enabled");
        let elapsed = (now - segment.enabling_time).max(0.0);
        let offset = segment
            .spec
            .invert_conditional(elapsed, LogSurvival::from_budget(entry.remaining()));
        let time = (segment.enabling_time + offset).max(now);
        self.queue.set(clock, time);
    }

    fn enable(&mut self, enabled: &EnabledClock, now: f64, rng: &mut ClockRng) {
        let slot = self.entry(enabled.clock);
        let segment = Segment {
            spec: enabled.spec.clone(),
            enabling_time: enabled.enabling_time,
            start: now,
        };
        match slot {
            Some(entry) => entry.segment = Some(segment),
            None => {
                *slot = Some(LedgerEntry {
                    drawn: LogSurvival::from_uniform(rng.uniform()),
                    consumed: 0.0,
                    segment: Some(segment),
                })
            }
        }
        self.schedule(enabled.clock, now);
    }
}

/// Time since enabling. `(enabling_time + offset) - enabling_time` can round
/// below `offset`, so a time that lands on an atom maps to its exact offset.
fn elapsed(segment: &Segment, now: f64) -> f64 {
    let raw = (now - segment.enabling_time).max(0.0);
    segment
        .spec
        .atoms()
        .iter()
        .find(|a| segment.enabling_time + a.offset == now)
        .map_or(raw, |a| raw.max(a.offset))
}

/// Hazard consumed by a segment from its start up to `now`.
fn consumed_over(segment: &Segment, now: f64) -> f64 {
    segment.spec.time_process(elapsed(segment, segment.start), elapsed(segment, now))
}

impl Sampler for NextReaction {
    fn name(&self) -> String {
        "next-reaction".into()
    }

    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        now: f64,
        rng: &mut ClockRng,
    ) -> Result<(), SamplerError> {
        if let Some(fired) = delta.fired {
            let entry = self.active(fired)?;
            let segment = entry.segment.as_ref().expect("active");
            let at_atom = segment
                .spec
                .atoms()
                .iter()
                .any(|a| segment.enabling_time + a.offset == now);
            self.last_fire = Some(FireAudit {
                clock: fired,
                time: now,
                drawn_budget: entry.drawn.budget(),
                consumed: entry.consumed + consumed_over(segment, now),
                at_atom,
            });
            *self.entry(fired) = None;
            self.queue.remove(fired);
        }
        for &clock in &delta.newly_disabled {
            if Some(clock) == delta.fired {
                continue;
            }
            let entry = self.active(clock)?;
            let segment = entry.segment.take().expect("active");
            entry.consumed += consumed_over(&segment, now);
            self.queue.remove(clock);
        }
        for enabled in &delta.modified {
            let entry = self.active(enabled.clock)?;
            let segment = entry.segment.as_ref().expect("active");
            entry.consumed += consumed_over(segment, now);
            entry.segment = Some(Segment {
                spec: enabled.spec.clone(),
                enabling_time: enabled.enabling_time,
                start: now,
            });
            self.schedule(enabled.clock, now);
        }
        for enabled in &delta.newly_enabled {
            self.enable(enabled, now, rng);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::Atom;

    fn enabled(clock: u32, spec: HazardSpec, enabling_time: f64) -> EnabledClock {
        EnabledClock {
            clock: ClockId(clock),
            spec: Arc::new(spec),
            enabling_time,
        }
    }

    /// Puts a clock in the ledger with a chosen drawn log-survival.
    fn seeded(nr: &mut NextReaction, e: &EnabledClock, drawn: f64, now: f64) {
        *nr.entry(e.clock) = Some(LedgerEntry {
            drawn: LogSurvival::new(drawn),
            consumed: 0.0,
            segment: Some(Segment {
                spec: e.spec.clone(),
                enabling_time: e.enabling_time,
                start: now,
            }),
        });
        nr.schedule(e.clock, now);
    }

    #[test]
    fn modification_reinverts_remaining_budget() {
        let mut nr = NextReaction::with_capacity(1);
        let mut rng = ClockRng::from_seed(1);
        seeded(&mut nr, &enabled(0, HazardSpec::exponential(1.0).unwrap(), 0.0), -2.0, 0.0);
        assert_eq!(nr.putative(ClockId(0)), Some(2.0));
        let delta = EnablingDelta {
            modified: vec![enabled(0, HazardSpec::exponential(2.0).unwrap(), 0.0)],
            ..Default::default()
        };
        nr.absorb(&delta, 1.0, &mut rng).unwrap();
        let (budget, consumed) = nr.budget(ClockId(0), 1.0).unwrap();
        assert_eq!((budget, consumed), (2.0, 1.0));
        assert_eq!(nr.putative(ClockId(0)), Some(1.5));
        assert_eq!(rng.consumed(), 0);
    }

    #[test]
    fn disabled_clock_freezes_budget() {
        let mut nr = NextReaction::with_capacity(1);
        let mut rng = ClockRng::from_seed(1);
        let spec = HazardSpec::exponential(1.0).unwrap();
        seeded(&mut nr, &enabled(0, spec.clone(), 0.0), -2.0, 0.0);
        let off = EnablingDelta {
            newly_disabled: vec![ClockId(0)],
            ..Default::default()
        };
        nr.absorb(&off, 1.0, &mut rng).unwrap();
        assert!(nr.enabled_clocks().is_empty());
        let on = EnablingDelta {
            newly_enabled: vec![enabled(0, spec, 4.0)],
            ..Default::default()
        };
        nr.absorb(&on, 4.0, &mut rng).unwrap();
        assert_eq!(nr.putative(ClockId(0)), Some(5.0));
        assert_eq!(rng.consumed(), 0, "re-enabling reuses the frozen draw");
    }

    #[test]
    fn atom_consumes_past_budget() {
        let mut nr = NextReaction::with_capacity(1);
        let spec = HazardSpec::atoms_only(vec![Atom::new(1.0, 0.5)]).unwrap();
        seeded(&mut nr, &enabled(0, spec, 0.0), -0.6, 0.0);
        assert_eq!(nr.putative(ClockId(0)), Some(1.0));
        let mut rng = ClockRng::from_seed(1);
        let delta = EnablingDelta {
            fired: Some(ClockId(0)),
            newly_disabled: vec![ClockId(0)],
            ..Default::default()
        };
        nr.absorb(&delta, 1.0, &mut rng).unwrap();
        let audit = nr.last_fire().unwrap();
        assert!(audit.at_atom);
        assert!(audit.consumed >= audit.drawn_budget);
    }

    #[test]
    fn firing_at_an_atom_counts_its_mass_despite_rounding() {
        let enabling_time = 254.66520835661723;
        assert_ne!((enabling_time + 1.375) - enabling_time, 1.375);
        let mut nr = NextReaction::with_capacity(1);
        let spec = HazardSpec::atoms_only(vec![Atom::new(1.375, 0.3)]).unwrap();
        seeded(&mut nr, &enabled(0, spec, enabling_time), -0.2, enabling_time);
        let at = nr.putative(ClockId(0)).unwrap();
        let delta = EnablingDelta {
            fired: Some(ClockId(0)),
            newly_disabled: vec![ClockId(0)],
            ..Default::default()
        };
        nr.absorb(&delta, at, &mut ClockRng::from_seed(1)).unwrap();
        let audit = nr.last_fire().unwrap();
        assert!(audit.at_atom);
        assert!((audit.consumed - -(0.7f64).ln()).abs() < 1e-15, "{audit:?}");
    }

    #[test]
    fn unknown_clock_is_rejected() {
        let mut nr = NextReaction::with_capacity(2);
        let mut rng = ClockRng::from_seed(1);
        let delta = EnablingDelta {
            modified: vec![enabled(1, HazardSpec::exponential(1.0).unwrap(), 0.0)],
            ..Default::default()
        };
        assert_eq!(
            nr.absorb(&delta, 0.0, &mut rng),
            Err(SamplerError::UnknownClock(ClockId(1)))
        );
    }
}
