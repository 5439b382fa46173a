//! Run configuration: a TOML file, overridden by flags.
//!
//! ```toml
//! model = "sir"
//! sampler = "direct"
//! seed = 7
//! trajectories = 100
//! t_end = 5.0          # or max_events = 1000
//! output = "out"
//! workers = 4
//!
//! [params]
//! N = 10
//! recover = "weibull(2,1)"
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use clockrace_core::{Model, ModelConfig, SamplerKind, StopCondition};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every field optional, as read from a file or assembled from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_events: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, toml::Value>,
}

impl RunFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    /// Fields set in `flags` replace those in `self`; parameters merge by key.
    pub fn overridden_by(mut self, flags: RunFile) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {$(
                if flags.$field.is_some() {
                    self.$field = flags.$field;
                }
            )*};
        }
        take!(model, sampler, seed, trajectories, output, workers);
        if flags.t_end.is_some() || flags.max_events.is_some() {
            self.t_end = flags.t_end;
            self.max_events = flags.max_events;
        }
        self.params.extend(flags.params);
        self
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub model: ModelConfig,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub trajectories: usize,
    pub stop: StopCondition,
    pub output: PathBuf,
    pub workers: usize,
}

fn param_text(key: &str, value: &toml::Value) -> Result<String, CliError> {
    match value {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(x) => Ok(x.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(CliError::Config(format!(
            "field `params.{key}`: expected a string or number, found {}",
            other.type_str()
        ))),
    }
}

impl RunSpec {
    /// Checks every field and builds the model once, so that a bad
    /// parameter is reported before anything runs.
    pub fn from_file(file: RunFile) -> Result<(Self, Model), CliError> {
        let config_error = |field: &str, message: String| CliError::Config(format!("field `{field}`: {message}"));
        let name = file
            .model
            .ok_or_else(|| config_error("model", format!("required; one of {}", ModelConfig::NAMES.join(", "))))?;
        let mut model = ModelConfig::new(name);
        for (k, v) in &file.params {
            model.params.insert(k.clone(), param_text(k, v)?);
        }
        let built = model.build().map_err(|e| config_error("model", e.to_string()))?;
        let sampler = file
            .sampler
            .as_deref()
            .unwrap_or("direct")
            .parse::<SamplerKind>()
            .map_err(|e| config_error("sampler", e.to_string()))?;
        let stop = match (file.t_end, file.max_events) {
            (Some(_), Some(_)) => return Err(config_error("t_end", "give either t_end or max_events, not both".into())),
            (Some(t), None) if t.is_finite() && t >= 0.0 => StopCondition::EndTime(t),
            (Some(t), None) => return Err(config_error("t_end", format!("must be finite and non-negative, got {t}"))),
            (None, Some(0)) => return Err(config_error("max_events", "must be positive".into())),
            (None, Some(n)) => StopCondition::EventCount(n),
            (None, None) => return Err(config_error("t_end", "one of t_end or max_events is required".into())),
        };
        let trajectories = file.trajectories.unwrap_or(1);
        if trajectories == 0 {
            return Err(config_error("trajectories", "must be positive".into()));
        }
        let workers = file.workers.unwrap_or(1);
        if workers == 0 {
            return Err(config_error("workers", "must be positive".into()));
        }
        let spec = RunSpec {
            model,
            sampler,
            seed: file.seed.unwrap_or(0),
            trajectories,
            stop,
            output: file.output.unwrap_or_else(|| PathBuf::from("out")),
            workers,
        };
        Ok((spec, built))
    }

    pub fn to_file(&self) -> RunFile {
        let (t_end, max_events) = match self.stop {
            StopCondition::EndTime(t) => (Some(t), None),
            StopCondition::EventCount(n) => (None, Some(n)),
            StopCondition::Stalled => (None, None),
        };
        RunFile {
            model: Some(self.model.name.clone()),
            sampler: Some(self.sampler.to_string()),
            seed: Some(self.seed),
            trajectories: Some(self.trajectories),
            t_end,
            max_events,
            output: Some(self.output.clone()),
            workers: Some(self.workers),
            params: self
                .model
                .params
                .iter()
                .map(|(k, v)| (k.clone(), toml::Value::String(v.clone())))
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("run files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
model = "sir"
sampler = "hierarchical:exponential=direct,*=next-reaction"
seed = 7
trajectories = 3
t_end = 5.0
workers = 2

[params]
N = 10
recover = "weibull(2,1)"
"#;

    #[test]
    fn round_trip_is_identity() {
        let (spec, _) = RunSpec::from_file(RunFile::parse(EXAMPLE).unwrap()).unwrap();
        let text = spec.to_toml();
        let (again, _) = RunSpec::from_file(RunFile::parse(&text).unwrap()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(again.to_toml(), text);
        assert_eq!(spec.model.params["N"], "10");
    }

    #[test]
    fn flags_override_the_file() {
        let file = RunFile::parse(EXAMPLE).unwrap();
        let flags = RunFile {
            max_events: Some(4),
            params: BTreeMap::from([("N".to_string(), toml::Value::String("4".into()))]),
            ..Default::default()
        };
        let (spec, _) = RunSpec::from_file(file.overridden_by(flags)).unwrap();
        assert_eq!(spec.stop, StopCondition::EventCount(4));
        assert_eq!(spec.model.params["N"], "4");
        assert_eq!(spec.seed, 7);
    }

    #[test]
    fn errors_name_the_field_or_line() {
        let err = RunFile::parse("model = \"sir\"\nseed = \"x\"\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = RunFile::parse("colour = 1\n").unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let file = RunFile::parse("model = \"sir\"\nsampler = \"fastest\"\nt_end = 1.0\n").unwrap();
        let err = RunSpec::from_file(file).unwrap_err().to_string();
        assert!(err.contains("`sampler`") && err.contains("next-to-fire"), "{err}");
        let file = RunFile::parse("model = \"sir\"\n").unwrap();
        assert!(RunSpec::from_file(file).unwrap_err().to_string().contains("t_end"));
    }
}
