//! Direct method: sample the waiting time of the whole system, then which
//! clock jumped.
//!
//! Clocks with a constant hazard keep their rate in a [`PrefixSumTree`];
//! every other clock is "varying" and contributes its own cumulative hazard
//! to the waiting-time inversion. Atoms of enabled clocks are kept in an
//! ordered registry of absolute times, which serves both as the breakpoint
//! list for the inversion and as the owner lookup when the waiting time
//! lands on an atom.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;
use std::sync::Arc;

use super::{EnabledClock, EnablingDelta, PrefixSumTree, Sampler, SamplerError, SamplerEvent};
use crate::clock::ClockId;
use crate::hazard::HazardSpec;
use crate::rng::ClockRng;

const TIME_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
struct AbsTime(f64);

impl Eq for AbsTime {}

impl PartialOrd for AbsTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbsTime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone)]
struct Entry {
    spec: Arc<HazardSpec>,
    enabling_time: f64,
}

#[derive(Debug, Default)]
pub struct Direct {
    clocks: Vec<Option<Entry>>,
    enabled: usize,
    rates: PrefixSumTree,
    varying: BTreeSet<ClockId>,
    atoms: BTreeMap<AbsTime, (ClockId, f64)>,
}

impl Direct {
    pub fn with_capacity(clocks: usize) -> Self {
        Self {
            clocks: vec![None; clocks],
            rates: PrefixSumTree::with_capacity(clocks),
            ..Self::default()
        }
    }

    /// Sum of the constant hazards currently enabled.
    pub fn constant_total(&self) -> f64 {
        self.rates.total()
    }

    fn insert(&mut self, enabled: &EnabledClock, now: f64) -> Result<(), SamplerError> {
        let clock = enabled.clock;
        for atom in enabled.spec.atoms() {
            let time = enabled.enabling_time + atom.offset;
            if time > now {
                if let Some(&(other, _)) = self.atoms.get(&AbsTime(time)) {
                    if other != clock {
                        return Err(SamplerError::DuplicateAtoms {
                            time,
                            first: other.min(clock),
                            second: other.max(clock),
                        });
                    }
                }
            }
        }
        if clock.index() >= self.clocks.len() {
            self.clocks.resize(clock.index() + 1, None);
        }
        for atom in enabled.spec.atoms() {
            let time = enabled.enabling_time + atom.offset;
            if time > now {
                self.atoms.insert(AbsTime(time), (clock, atom.mass));
            }
        }
        match enabled.spec.constant_rate() {
            Some(rate) => self.rates.set(clock.index(), rate),
            None => {
                self.rates.set(clock.index(), 0.0);
                self.varying.insert(clock);
            }
        }
        self.clocks[clock.index()] = Some(Entry {
            spec: enabled.spec.clone(),
            enabling_time: enabled.enabling_time,
        });
        self.enabled += 1;
        Ok(())
    }

    fn remove(&mut self, clock: ClockId) -> Result<(), SamplerError> {
        let entry = self
            .clocks
            .get_mut(clock.index())
            .and_then(Option::take)
            .ok_or(SamplerError::UnknownClock(clock))?;
        for atom in entry.spec.atoms() {
            let key = AbsTime(entry.enabling_time + atom.offset);
            if self.atoms.get(&key).is_some_and(|(owner, _)| *owner == clock) {
                self.atoms.remove(&key);
            }
        }
        self.rates.set(clock.index(), 0.0);
        self.varying.remove(&clock);
        self.enabled -= 1;
        Ok(())
    }

    /// Continuous hazard accumulated by all enabled clocks over `(from, to]`.
    fn continuous_consumed(&self, from: f64, to: f64) -> f64 {
        let mut total = self.rates.total() * (to - from);
        for clock in &self.varying {
            let entry = self.clocks[clock.index()].as_ref().expect("varying clock enabled");
            let c = entry.spec.continuous();
            let upper = c.cumulative(to - entry.enabling_time);
            if upper.is_infinite() {
                return f64::INFINITY;
            }
            total += upper - c.cumulative(from - entry.enabling_time);
        }
        total
    }

    fn total_hazard(&self, t: f64) -> f64 {
        self.rates.total()
            + self
                .varying
                .iter()
                .map(|c| {
                    let e = self.clocks[c.index()].as_ref().expect("varying clock enabled");
                    e.spec.hazard_at(t - e.enabling_time)
                })
                .sum::<f64>()
    }

    /// Smallest `t` in `(from, until]` where the continuous hazard consumed
    /// since `from` reaches `need`; `None` if it does not within the interval.
    fn solve_continuous(&self, from: f64, until: f64, need: f64) -> Option<f64> {
        if self.varying.is_empty() {
            let rate = self.rates.total();
            if rate <= 0.0 {
                return None;
            }
            let t = from + need / rate;
            return (t <= until).then_some(t);
        }
        let mut lo = from;
        let mut hi = if until.is_finite() {
            if self.continuous_consumed(from, until) < need {
                return None;
            }
            until
        } else {
            let mut step = need / self.total_hazard(from).clamp(1e-3, 1e300);
            loop {
                let candidate = from + step;
                if !candidate.is_finite() || step > 1e300 {
                    return None;
                }
                if self.continuous_consumed(from, candidate) >= need {
                    break candidate;
                }
                lo = candidate;
                step *= 2.0;
            }
        };
        let mut t = 0.5 * (lo + hi);
        for _ in 0..MAX_ITERATIONS {
            let residual = self.continuous_consumed(from, t) - need;
            if residual < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= TIME_TOLERANCE * hi.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let slope = self.total_hazard(t);
            let newton = t - residual / slope;
            t = if residual.is_finite() && slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Some(hi)
    }

    /// Picks the clock whose continuous hazard fires at `t`, by prefix sum
    /// over hazards evaluated at `t`.
    fn choose(&mut self, t: f64, u: f64) -> Result<ClockId, SamplerError> {
        let varying: Vec<ClockId> = self.varying.iter().copied().collect();
        let mut infinite = None;
        for &clock in &varying {
            let e = self.clocks[clock.index()].as_ref().expect("varying clock enabled");
            let h = e.spec.hazard_at(t - e.enabling_time);
            if h.is_infinite() {
                infinite = infinite.or(Some(clock));
            }
            self.rates.set(clock.index(), if h.is_finite() { h } else { 0.0 });
        }
        let chosen = match infinite {
            Some(clock) => Some(clock),
            None => self
                .rates
                .find(u * self.rates.total())
                .map(ClockId::from_index),
        };
        for &clock in &varying {
            self.rates.set(clock.index(), 0.0);
        }
        chosen.ok_or(SamplerError::Stalled)
    }
}

impl Sampler for Direct {
    fn name(&self) -> String {
        "direct".into()
    }

    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        now: f64,
        _rng: &mut ClockRng,
    ) -> Result<(), SamplerError> {
        if let Some(fired) = delta.fired {
            self.remove(fired)?;
        }
        for &clock in &delta.newly_disabled {
            if Some(clock) != delta.fired {
                self.remove(clock)?;
            }
        }
        for enabled in &delta.modified {
            self.remove(enabled.clock)?;
            self.insert(enabled, now)?;
        }
        for enabled in &delta.newly_enabled {
            self.insert(enabled, now)?;
        }
        Ok(())
    }

    fn next(&mut self, now: f64, rng: &mut ClockRng) -> Result<SamplerEvent, SamplerError> {
        if self.enabled == 0 {
            return Err(SamplerError::Stalled);
        }
        let u1 = rng.uniform();
        let u2 = rng.uniform();
        self.event_for(now, u1, u2)
    }

    fn enabled_clocks(&self) -> Vec<ClockId> {
        self.clocks
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some())
            .map(|(i, _)| ClockId::from_index(i))
            .collect()
    }
}

impl Direct {
    /// The next event given the waiting-time variate `u1` and the
    /// clock-choice variate `u2`.
    pub fn event_for(&mut self, now: f64, u1: f64, u2: f64) -> Result<SamplerEvent, SamplerError> {
        if self.enabled == 0 {
            return Err(SamplerError::Stalled);
        }
        let target = -(-u1).ln_1p();

        let mut consumed = 0.0;
        let mut from = now;
        let upcoming: Vec<(f64, ClockId, f64)> = self
            .atoms
            .range((Bound::Excluded(AbsTime(now)), Bound::Unbounded))
            .map(|(t, (c, m))| (t.0, *c, *m))
            .collect();
        for (atom_time, owner, mass) in upcoming {
            if let Some(t) = self.solve_continuous(from, atom_time, target - consumed) {
                let clock = self.choose(t, u2)?;
                return Ok(SamplerEvent { clock, time: t });
            }
            consumed += self.continuous_consumed(from, atom_time);
            consumed += -(-mass).ln_1p();
            if consumed >= target {
                return Ok(SamplerEvent {
                    clock: owner,
                    time: atom_time,
                });
            }
            from = atom_time;
        }
        match self.solve_continuous(from, f64::INFINITY, target - consumed) {
            Some(t) => {
                let clock = self.choose(t, u2)?;
                Ok(SamplerEvent { clock, time: t })
            }
            None => Err(SamplerError::Stalled),
        }
    }
}
