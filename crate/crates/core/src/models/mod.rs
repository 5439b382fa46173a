//! Built-in models and the [`Model`] container the kernel runs.

mod atomic;
mod birth_death;
mod modulated;
mod rabbits;
mod ring;
mod sir;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clock::{ClockId, ClockSpec, Enabling, JumpMark, SubstateKey, SystemState};
use crate::graph::DependencyGraph;
use crate::hazard::{HazardError, HazardSpec};

pub use atomic::{atomic_showcase, poisson, race};
pub use birth_death::birth_death;
pub use modulated::modulated;
pub use rabbits::{rabbits, RabbitsConfig};
pub use ring::ring;
pub use sir::{sir, SirConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model `{name}`; expected one of: {}", ModelConfig::NAMES.join(", "))]
    UnknownModel { name: String },
    #[error("model `{model}` has no parameter `{name}`")]
    UnknownParameter { model: String, name: String },
    #[error("model `{model}`: parameter `{name}` = `{value}` {reason}")]
    InvalidParameter {
        model: String,
        name: String,
        value: String,
        reason: String,
    },
    #[error("clock at position {position} has id {found}; ids must be dense and in order")]
    NonDenseIds { position: usize, found: ClockId },
    #[error(transparent)]
    Hazard(#[from] HazardError),
}

/// An immutable, validated model: clocks with dense ids, an initial state
/// and the dependency graph between them.
#[derive(Debug, Clone)]
pub struct Model {
    name: String,
    params: BTreeMap<String, String>,
    clocks: Vec<ClockSpec>,
    initial: SystemState,
    graph: DependencyGraph,
    hash: String,
}

impl Model {
    pub fn new(
        name: impl Into<String>,
        clocks: Vec<ClockSpec>,
        initial: SystemState,
    ) -> Result<Self, ModelError> {
        for (position, clock) in clocks.iter().enumerate() {
            if clock.id.index() != position {
                return Err(ModelError::NonDenseIds {
                    position,
                    found: clock.id,
                });
            }
        }
        let graph = DependencyGraph::build(&clocks);
        let mut model = Self {
            name: name.into(),
            params: BTreeMap::new(),
            clocks,
            initial,
            graph,
            hash: String::new(),
        };
        model.hash = model.compute_hash();
        Ok(model)
    }

    /// Records the parameters the model was built from.
    pub fn with_params(mut self, params: BTreeMap<String, String>) -> Self {
        self.params = params;
        self.hash = self.compute_hash();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn clocks(&self) -> &[ClockSpec] {
        &self.clocks
    }

    pub fn clock(&self, id: ClockId) -> &ClockSpec {
        &self.clocks[id.index()]
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn initial(&self) -> &SystemState {
        &self.initial
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    /// Config that rebuilds this model.
    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            name: self.name.clone(),
            params: self.params.clone(),
        }
    }

    /// SHA-256 over the name, parameters, clock structure and initial state,
    /// as lowercase hex.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn compute_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.name.as_bytes());
        for (k, v) in &self.params {
            h.update(format!("\n{k}={v}").as_bytes());
        }
        for clock in &self.clocks {
            h.update(format!("\n{}|{}|", clock.id, clock.label).as_bytes());
            for key in &clock.reads {
                h.update(format!("{key},").as_bytes());
            }
            h.update(b"|");
            for (key, delta) in clock.mark.deltas() {
                h.update(format!("{key}:{delta},").as_bytes());
            }
        }
        h.update(format!("\n{}", self.initial).as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A model name with `key=value` parameters, as given on the command line
/// or in a config file.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelConfig {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl ModelConfig {
    pub const NAMES: [&'static str; 8] = [
        "sir",
        "rabbits",
        "birth-death",
        "atomic",
        "poisson",
        "race",
        "ring",
        "modulated",
    ];

    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        let mut p = Params::new(&self.name, &self.params);
        let model = match self.name.as_str() {
            "sir" => sir(&SirConfig::from_params(&mut p)?)?,
            "rabbits" => rabbits(&RabbitsConfig::from_params(&mut p)?)?,
            "birth-death" => {
                let birth = p.get("birth", 1.0, positive_or_zero)?;
                let death = p.get("death", 1.0, positive_or_zero)?;
                let initial = p.get("initial", 1i64, non_negative)?;
                let cap = p.get("cap", 100i64, |v: &i64| (*v >= 1).then_some(()).ok_or("must be at least 1"))?;
                birth_death(birth, death, initial, cap)?
            }
            "atomic" => atomic_showcase()?,
            "poisson" => poisson(p.get("rate", 1.0, positive)?)?,
            "race" => {
                let rates: RateList = p.get("rates", RateList(vec![1.0, 2.0, 3.0]), |r: &RateList| {
                    (!r.0.is_empty() && r.0.iter().all(|x| x.is_finite() && *x > 0.0))
                        .then_some(())
                        .ok_or("must be a non-empty list of positive rates")
                })?;
                race(&rates.0)?
            }
            "ring" => {
                let sites = p.get("sites", 1024usize, |v: &usize| {
                    (*v >= 2).then_some(()).ok_or("must be at least 2")
                })?;
                let tokens = p.get("tokens", 1i64, non_negative)?;
                let rate = p.get("rate", 1.0, positive)?;
                ring(sites, tokens, rate)?
            }
            "modulated" => {
                let clocks = p.get("clocks", 3usize, |v: &usize| {
                    (*v >= 1).then_some(()).ok_or("must be at least 1")
                })?;
                modulated(clocks)?
            }
            other => {
                return Err(ModelError::UnknownModel {
                    name: other.to_string(),
                })
            }
        };
        p.finish()?;
        Ok(model.with_params(self.params.clone()))
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Comma-separated list of rates, such as `1,2,3`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateList(pub Vec<f64>);

impl FromStr for RateList {
    type Err = std::num::ParseFloatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|x| x.trim().parse())
            .collect::<Result<_, _>>()
            .map(RateList)
    }
}

/// Typed access to a parameter map that remembers which keys were read.
pub(crate) struct Params<'a> {
    model: &'a str,
    raw: &'a BTreeMap<String, String>,
    used: BTreeSet<&'a str>,
}

impl<'a> Params<'a> {
    pub(crate) fn new(model: &'a str, raw: &'a BTreeMap<String, String>) -> Self {
        Self {
            model,
            raw,
            used: BTreeSet::new(),
        }
    }

    pub(crate) fn get<T, F>(&mut self, key: &'static str, default: T, check: F) -> Result<T, ModelError>
    where
        T: FromStr,
        T::Err: fmt::Display,
        F: Fn(&T) -> Result<(), &'static str>,
    {
        let Some((k, raw)) = self.raw.get_key_value(key) else {
            return Ok(default);
        };
        self.used.insert(k.as_str());
        let invalid = |reason: &str| ModelError::InvalidParameter {
            model: self.model.to_string(),
            name: key.to_string(),
            value: raw.clone(),
            reason: reason.to_string(),
        };
        let value: T = raw
            .trim()
            .parse()
            .map_err(|e: T::Err| invalid(&format!("does not parse: {e}")))?;
        check(&value).map_err(invalid)?;
        Ok(value)
    }

    pub(crate) fn hazard(&mut self, key: &'static str, default: &str) -> Result<HazardSpec, ModelError> {
        let fallback: HazardSpec = default.parse()?;
        self.get(key, fallback, |_| Ok(()))
    }

    pub(crate) fn finish(self) -> Result<(), ModelError> {
        match self.raw.keys().find(|k| !self.used.contains(k.as_str())) {
            Some(extra) => Err(ModelError::UnknownParameter {
                model: self.model.to_string(),
                name: extra.clone(),
            }),
            None => Ok(()),
        }
    }
}

pub(crate) fn positive(v: &f64) -> Result<(), &'static str> {
    (v.is_finite() && *v > 0.0).then_some(()).ok_or("must be positive and finite")
}

pub(crate) fn positive_or_zero(v: &f64) -> Result<(), &'static str> {
    (v.is_finite() && *v >= 0.0).then_some(()).ok_or("must be non-negative and finite")
}

pub(crate) fn non_negative(v: &i64) -> Result<(), &'static str> {
    (*v >= 0).then_some(()).ok_or("must be non-negative")
}

pub(crate) fn key(name: impl AsRef<str>) -> SubstateKey {
    SubstateKey::new(name)
}

pub(crate) fn enabled(spec: &Arc<HazardSpec>, since: Option<f64>) -> Enabling {
    Enabling::Enabled {
        spec: spec.clone(),
        since,
    }
}

/// A clock that is enabled with a fixed hazard while `guard` holds.
pub(crate) fn guarded_clock(
    id: usize,
    label: impl Into<String>,
    reads: Vec<SubstateKey>,
    mark: JumpMark,
    spec: HazardSpec,
    guard: impl Fn(&SystemState) -> bool + Send + Sync + 'static,
) -> ClockSpec {
    let spec = Arc::new(spec);
    ClockSpec::new(ClockId::from_index(id), label, reads, mark, move |state, _| {
        if guard(state) {
            enabled(&spec, None)
        } else {
            Enabling::Disabled
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_model_builds_with_defaults() {
        for name in ModelConfig::NAMES {
            let model = ModelConfig::new(name).build().unwrap();
            assert_eq!(model.name(), name);
            assert!(model.clock_count() > 0);
            assert_eq!(model.hash().len(), 64);
        }
    }

    #[test]
    fn rejects_unknown_and_invalid_parameters() {
        assert!(matches!(
            ModelConfig::new("poisson").param("speed", 2).build(),
            Err(ModelError::UnknownParameter { .. })
        ));
        assert!(matches!(
            ModelConfig::new("poisson").param("rate", -1).build(),
            Err(ModelError::InvalidParameter { .. })
        ));
        assert!(matches!(
            ModelConfig::new("sir").param("recover", "weibull(0,1)").build(),
            Err(ModelError::InvalidParameter { .. })
        ));
        let err = ModelConfig::new("lotka").build().unwrap_err().to_string();
        for name in ModelConfig::NAMES {
            assert!(err.contains(name));
        }
    }

    #[test]
    fn hash_tracks_parameters() {
        let a = ModelConfig::new("sir").param("N", 4).build().unwrap();
        let b = ModelConfig::new("sir").param("N", 4).build().unwrap();
        let c = ModelConfig::new("sir").param("N", 5).build().unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn non_dense_ids_are_rejected() {
        let clock = guarded_clock(1, "x", vec![], JumpMark::new([("x", 1)]), HazardSpec::exponential(1.0).unwrap(), |_| true);
        assert!(matches!(
            Model::new("bad", vec![clock], SystemState::new()),
            Err(ModelError::NonDenseIds { position: 0, .. })
        ));
    }
}
