//! Exact samplers for the next (clock, time) of a competing-clocks process.
//!
//! All samplers implement [`Sampler`]: the kernel feeds them an
//! [`EnablingDelta`] after every jump (and once at start-up with every
//! initially enabled clock) and asks for the next event.
//!
//! Variate-stream discipline, per sampler:
//!
//! | sampler        | `absorb`                                             | `next`                                  |
//! |----------------|------------------------------------------------------|-----------------------------------------|
//! | first-reaction | none                                                 | one per enabled clock, ascending id     |
//! | next-reaction  | one per fresh budget (newly enabled clocks without a frozen budget, and a re-enabled fired clock), ascending id | none |
//! | next-to-fire   | one per newly enabled or modified clock, ascending id | none                                   |
//! | direct         | none                                                 | two (waiting time, then clock) unless no clock is enabled |
//! | hierarchical   | children in order                                    | children in order                       |

mod direct;
mod first_reaction;
mod hierarchical;
mod next_reaction;
mod next_to_fire;
mod prefix;
mod queue;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::clock::ClockId;
use crate::hazard::HazardSpec;
use crate::rng::ClockRng;

pub use direct::Direct;
pub use first_reaction::FirstReaction;
pub use hierarchical::{Hierarchical, PartitionRule};
pub use next_reaction::{FireAudit, NextReaction};
pub use next_to_fire::NextToFire;
pub use prefix::PrefixSumTree;
pub use queue::PutativeQueue;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("no enabled clock can fire")]
    Stalled,
    #[error("clock {0} is not held by the sampler")]
    UnknownClock(ClockId),
    #[error("clocks {first} and {second} both have an atom at time {time}")]
    DuplicateAtoms {
        time: f64,
        first: ClockId,
        second: ClockId,
    },
    #[error("unknown sampler `{name}`; expected one of: first-reaction, next-reaction, next-to-fire, direct, hierarchical[:family=sampler,...]")]
    UnknownSampler { name: String },
}

/// The next jump: which clock and when.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerEvent {
    pub clock: ClockId,
    pub time: f64,
}

/// An enabled clock with its hazard and enabling time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnabledClock {
    pub clock: ClockId,
    pub spec: Arc<HazardSpec>,
    pub enabling_time: f64,
}

/// Changes to the set of enabled clocks at one stopping time.
///
/// `fired` is the clock that just jumped (none at start-up). After a jump the
/// fired clock always appears in `newly_enabled` or `newly_disabled`: its
/// previous putative time and budget are spent either way. Lists are sorted
/// by clock id and disjoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnablingDelta {
    pub fired: Option<ClockId>,
    pub newly_enabled: Vec<EnabledClock>,
    pub newly_disabled: Vec<ClockId>,
    pub modified: Vec<EnabledClock>,
}

impl EnablingDelta {
    pub fn is_empty(&self) -> bool {
        self.fired.is_none()
            && self.newly_enabled.is_empty()
            && self.newly_disabled.is_empty()
            && self.modified.is_empty()
    }
}

pub trait Sampler: Send {
    fn name(&self) -> String;

    /// Brings the sampler up to date with the enabling changes at `now`.
    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        now: f64,
        rng: &mut ClockRng,
    ) -> Result<(), SamplerError>;

    /// The next event after `now`, or [`SamplerError::Stalled`].
    fn next(&mut self, now: f64, rng: &mut ClockRng) -> Result<SamplerEvent, SamplerError>;

    /// Clocks the sampler currently treats as enabled, ascending.
    fn enabled_clocks(&self) -> Vec<ClockId>;
}

/// Absolute putative time of a clock drawn fresh at `now` from variate `u`,
/// conditional on surviving from its enabling time to `now`.
pub(crate) fn conditional_draw(spec: &HazardSpec, enabling_time: f64, now: f64, u: f64) -> f64 {
    let elapsed = (now - enabling_time).max(0.0);
    let offset = spec.invert_conditional(elapsed, crate::hazard::LogSurvival::from_uniform(u));
    (enabling_time + offset).max(now)
}

/// Named sampler constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerKind {
    FirstReaction,
    NextReaction,
    NextToFire,
    Direct,
    Hierarchical(PartitionRule),
}

impl SamplerKind {
    pub const NAMES: [&'static str; 5] = [
        "first-reaction",
        "next-reaction",
        "next-to-fire",
        "direct",
        "hierarchical",
    ];

    pub fn build(&self, clock_count: usize) -> Box<dyn Sampler> {
        match self {
            SamplerKind::FirstReaction => Box::new(FirstReaction::new()),
            SamplerKind::NextReaction => Box::new(NextReaction::with_capacity(clock_count)),
            SamplerKind::NextToFire => Box::new(NextToFire::with_capacity(clock_count)),
            SamplerKind::Direct => Box::new(Direct::with_capacity(clock_count)),
            SamplerKind::Hierarchical(rule) => Box::new(Hierarchical::new(rule.clone(), clock_count)),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerKind::FirstReaction => f.write_str("first-reaction"),
            SamplerKind::NextReaction => f.write_str("next-reaction"),
            SamplerKind::NextToFire => f.write_str("next-to-fire"),
            SamplerKind::Direct => f.write_str("direct"),
            SamplerKind::Hierarchical(rule) => write!(f, "hierarchical:{rule}"),
        }
    }
}

impl FromStr for SamplerKind {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || SamplerError::UnknownSampler {
            name: s.to_string(),
        };
        match s.trim() {
            "first-reaction" => Ok(SamplerKind::FirstReaction),
            "next-reaction" => Ok(SamplerKind::NextReaction),
            "next-to-fire" => Ok(SamplerKind::NextToFire),
            "direct" => Ok(SamplerKind::Direct),
            "hierarchical" => Ok(SamplerKind::Hierarchical(PartitionRule::default())),
            other => match other.strip_prefix("hierarchical:") {
                Some(rules) => rules
                    .parse::<PartitionRule>()
                    .map(SamplerKind::Hierarchical)
                    .map_err(|_| unknown()),
                None => Err(unknown()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_roundtrip() {
        for name in ["first-reaction", "next-reaction", "next-to-fire", "direct"] {
            assert_eq!(name.parse::<SamplerKind>().unwrap().to_string(), name);
        }
        let h: SamplerKind = "hierarchical:exponential=direct,*=next-reaction"
            .parse()
            .unwrap();
        assert_eq!(h.to_string(), "hierarchical:exponential=direct,*=next-reaction");
        assert_eq!(h.to_string().parse::<SamplerKind>().unwrap(), h);
        assert!(matches!(
            "gillespie".parse::<SamplerKind>(),
            Err(SamplerError::UnknownSampler { .. })
        ));
        assert!("hierarchical:exponential=hierarchical".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn unknown_sampler_message_lists_names() {
        let err = "bogus".parse::<SamplerKind>().unwrap_err().to_string();
        for name in SamplerKind::NAMES {
            assert!(err.contains(name), "{err}");
        }
    }
}
