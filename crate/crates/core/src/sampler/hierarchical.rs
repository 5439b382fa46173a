//! Composition of samplers over a partition of the clocks.
//!
//! Clocks are routed to a child sampler by their hazard family key. Every
//! child proposes its own next event and the soonest proposal wins.

use std::fmt;
use std::str::FromStr;

use super::{EnablingDelta, Sampler, SamplerError, SamplerEvent, SamplerKind};
use crate::clock::ClockId;
use crate::hazard::HazardSpec;
use crate::rng::ClockRng;

/// Maps a hazard family key to the sampler that handles it.
///
/// Written as `family=sampler,...` with `*` naming the fallback, for example
/// `exponential=direct,*=next-reaction`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRule {
    routes: Vec<(String, SamplerKind)>,
    fallback: Box<SamplerKind>,
}

impl Default for PartitionRule {
    fn default() -> Self {
        Self {
            routes: vec![("exponential".into(), SamplerKind::Direct)],
            fallback: Box::new(SamplerKind::NextReaction),
        }
    }
}

impl PartitionRule {
    pub fn new(routes: Vec<(String, SamplerKind)>, fallback: SamplerKind) -> Result<Self, SamplerError> {
        let nested = routes
            .iter()
            .map(|(_, k)| k)
            .chain(std::iter::once(&fallback))
            .any(|k| matches!(k, SamplerKind::Hierarchical(_)));
        if nested {
            return Err(SamplerError::UnknownSampler {
                name: "nested hierarchical".into(),
            });
        }
        Ok(Self {
            routes,
            fallback: Box::new(fallback),
        })
    }

    /// A rule that sends every clock to one sampler.
    pub fn single(kind: SamplerKind) -> Result<Self, SamplerError> {
        Self::new(Vec::new(), kind)
    }

    pub fn route(&self, spec: &HazardSpec) -> &SamplerKind {
        let key = spec.family_key();
        self.routes
            .iter()
            .find(|(family, _)| family == key)
            .map_or(self.fallback.as_ref(), |(_, kind)| kind)
    }

    /// Distinct sampler kinds, in order of first appearance, fallback last.
    fn kinds(&self) -> Vec<SamplerKind> {
        let mut kinds: Vec<SamplerKind> = Vec::new();
        for kind in self.routes.iter().map(|(_, k)| k).chain(std::iter::once(self.fallback.as_ref())) {
            if !kinds.contains(kind) {
                kinds.push(kind.clone());
            }
        }
        kinds
    }
}

impl fmt::Display for PartitionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (family, kind) in &self.routes {
            write!(f, "{family}={kind},")?;
        }
        write!(f, "*={}", self.fallback)
    }
}

impl FromStr for PartitionRule {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SamplerError::UnknownSampler { name: s.to_string() };
        let mut routes = Vec::new();
        let mut fallback = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (family, kind) = part.split_once('=').ok_or_else(bad)?;
            let kind: SamplerKind = kind.trim().parse()?;
            match family.trim() {
                "*" => fallback = Some(kind),
                "" => return Err(bad()),
                family => routes.push((family.to_string(), kind)),
            }
        }
        Self::new(routes, fallback.unwrap_or(SamplerKind::NextReaction))
    }
}

pub struct Hierarchical {
    rule: PartitionRule,
    kinds: Vec<SamplerKind>,
    children: Vec<Box<dyn Sampler>>,
    // child index per clock while the clock is enabled
    owner: Vec<Option<usize>>,
}

impl Hierarchical {
    pub fn new(rule: PartitionRule, clock_count: usize) -> Self {
        let kinds = rule.kinds();
        let children = kinds.iter().map(|k| k.build(clock_count)).collect();
        Self {
            rule,
            kinds,
            children,
            owner: vec![None; clock_count],
        }
    }

    fn child_for(&self, spec: &HazardSpec) -> usize {
        let kind = self.rule.route(spec);
        self.kinds.iter().position(|k| k == kind).expect("rule kinds cover every route")
    }

    fn owner_mut(&mut self, clock: ClockId) -> &mut Option<usize> {
        if clock.index() >= self.owner.len() {
            self.owner.resize(clock.index() + 1, None);
        }
        &mut self.owner[clock.index()]
    }
}

impl Sampler for Hierarchical {
    fn name(&self) -> String {
        format!("hierarchical:{}", self.rule)
    }

    fn absorb(
        &mut self,
        delta: &EnablingDelta,
        now: f64,
        rng: &mut ClockRng,
    ) -> Result<(), SamplerError> {
        let mut split = vec![EnablingDelta::default(); self.children.len()];
        let owned = |owner: &[Option<usize>], clock: ClockId| {
            owner
                .get(clock.index())
                .copied()
                .flatten()
                .ok_or(SamplerError::UnknownClock(clock))
        };
        if let Some(fired) = delta.fired {
            split[owned(&self.owner, fired)?].fired = Some(fired);
        }
        for &clock in &delta.newly_disabled {
            let child = owned(&self.owner, clock)?;
            split[child].newly_disabled.push(clock);
            *self.owner_mut(clock) = None;
        }
        for enabled in &delta.modified {
            let old = owned(&self.owner, enabled.clock)?;
            let new = self.child_for(&enabled.spec);
            if old == new {
                split[old].modified.push(enabled.clone());
            } else {
                split[old].newly_disabled.push(enabled.clock);
                split[new].newly_enabled.push(enabled.clone());
                *self.owner_mut(enabled.clock) = Some(new);
            }
        }
        for enabled in &delta.newly_enabled {
            if let Some(fired) = delta.fired.filter(|f| *f == enabled.clock) {
                // the fired clock's old child must still see it disabled
                let old = owned(&self.owner, fired)?;
                let new = self.child_for(&enabled.spec);
                if old != new {
                    split[old].newly_disabled.push(fired);
                    split[new].newly_enabled.push(enabled.clone());
                    *self.owner_mut(fired) = Some(new);
                    continue;
                }
            }
            let child = self.child_for(&enabled.spec);
            split[child].newly_enabled.push(enabled.clone());
            *self.owner_mut(enabled.clock) = Some(child);
        }
        for (child, mut part) in self.children.iter_mut().zip(split) {
            part.newly_disabled.sort();
            part.newly_enabled.sort_by_key(|e| e.clock);
            part.modified.sort_by_key(|e| e.clock);
            if !part.is_empty() {
                child.absorb(&part, now, rng)?;
            }
        }
        Ok(())
    }

    fn next(&mut self, now: f64, rng: &mut ClockRng) -> Result<SamplerEvent, SamplerError> {
        let mut best: Option<SamplerEvent> = None;
        for child in &mut self.children {
            match child.next(now, rng) {
                Ok(event) => {
                    let sooner = best.is_none_or(|b| {
                        event.time < b.time || (event.time == b.time && event.clock < b.clock)
                    });
                    if sooner {
                        best = Some(event);
                    }
                }
                Err(SamplerError::Stalled) => {}
                Err(e) => return Err(e),
            }
        }
        best.ok_or(SamplerError::Stalled)
    }

    fn enabled_clocks(&self) -> Vec<ClockId> {
        let mut all: Vec<ClockId> = self.children.iter().flat_map(|c| c.enabled_clocks()).collect();
        all.sort();
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::EnabledClock;

    #[test]
    fn routes_by_family() {
        let rule: PartitionRule = "exponential=direct,*=next-reaction".parse().unwrap();
        assert_eq!(rule.route(&HazardSpec::exponential(1.0).unwrap()), &SamplerKind::Direct);
        assert_eq!(
            rule.route(&HazardSpec::weibull(2.0, 1.0).unwrap()),
            &SamplerKind::NextReaction
        );
        assert_eq!(rule, PartitionRule::default());
    }

    #[test]
    fn nested_rule_is_rejected() {
        assert!("*=hierarchical".parse::<PartitionRule>().is_err());
    }

    #[test]
    fn soonest_child_wins() {
        let mut h = Hierarchical::new(PartitionRule::default(), 2);
        let mut rng = ClockRng::from_seed(3);
        let delta = EnablingDelta {
            newly_enabled: vec![
                EnabledClock {
                    clock: ClockId(0),
                    spec: HazardSpec::exponential(1.0).unwrap().into(),
                    enabling_time: 0.0,
                },
                EnabledClock {
                    clock: ClockId(1),
                    spec: HazardSpec::atoms_only(vec![crate::hazard::Atom::new(1e-9, 1.0)])
                        .unwrap()
                        .into(),
                    enabling_time: 0.0,
                },
            ],
            ..Default::default()
        };
        h.absorb(&delta, 0.0, &mut rng).unwrap();
        assert_eq!(h.enabled_clocks(), vec![ClockId(0), ClockId(1)]);
        let event = h.next(0.0, &mut rng).unwrap();
        assert_eq!(event.clock, ClockId(1));
    }
}
