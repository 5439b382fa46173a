//! Recorded trajectories and their tab-separated file format.
//!
//! ```text
//! # clockrace trajectory 1
//! # model	sir
//! # param	N	10
//! # model_hash	<sha-256 hex>
//! # sampler	direct
//! # seed	7
//! # stop	end-time
//! # final_time	5.0000000000000000e0
//! # variates	412
//! seq	time	clock_id
//! 0	1.3862943611198906e-1	12
//! ```
//!
//! Times are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clock::{ClockError, ClockId, SystemState};
use crate::models::{Model, ModelConfig};

pub const FORMAT_VERSION: u32 = 1;
const COLUMNS: &str = "seq\ttime\tclock_id";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub seq: u64,
    pub time: f64,
    pub clock: ClockId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndTime,
    EventCount,
    Stalled,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::EndTime => "end-time",
            StopReason::EventCount => "event-count",
            StopReason::Stalled => "stalled",
        }
    }
}

impl FromStr for StopReason {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "end-time" => Ok(StopReason::EndTime),
            "event-count" => Ok(StopReason::EventCount),
            "stalled" => Ok(StopReason::Stalled),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: ModelConfig,
    pub model_hash: String,
    pub sampler: String,
    pub rng_seed: u64,
    pub initial_state: SystemState,
    pub events: Vec<EventRecord>,
    pub final_time: f64,
    pub variates_consumed: u64,
    pub stop: StopReason,
}

impl Trajectory {
    /// State after every event, replayed from the initial state.
    pub fn states<'a>(&'a self, model: &'a Model) -> impl Iterator<Item = Result<SystemState, ClockError>> + 'a {
        let mut state = self.initial_state.clone();
        self.events.iter().map(move |e| {
            state.apply_mark(&model.clock(e.clock).mark, e.time)?;
            Ok(state.clone())
        })
    }

    /// State at the end of the trajectory.
    pub fn replay(&self, model: &Model) -> Result<SystemState, ClockError> {
        let mut state = self.initial_state.clone();
        for e in &self.events {
            state.apply_mark(&model.clock(e.clock).mark, e.time)?;
        }
        Ok(state)
    }

    /// Durations between consecutive events, starting from time 0.
    pub fn interarrivals(&self) -> impl Iterator<Item = f64> + '_ {
        let mut last = 0.0;
        self.events.iter().map(move |e| {
            let gap = e.time - last;
            last = e.time;
            gap
        })
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# clockrace trajectory {FORMAT_VERSION}")?;
        writeln!(f, "# model\t{}", self.model.name)?;
        for (k, v) in &self.model.params {
            writeln!(f, "# param\t{k}\t{v}")?;
        }
        writeln!(f, "# model_hash\t{}", self.model_hash)?;
        writeln!(f, "# sampler\t{}", self.sampler)?;
        writeln!(f, "# seed\t{}", self.rng_seed)?;
        writeln!(f, "# stop\t{}", self.stop.as_str())?;
        writeln!(f, "# final_time\t{:.16e}", self.final_time)?;
        writeln!(f, "# variates\t{}", self.variates_consumed)?;
        writeln!(f, "{COLUMNS}")?;
        for e in &self.events {
            writeln!(f, "{}\t{:.16e}\t{}", e.seq, e.time, e.clock)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn bad(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// A trajectory file as read back. The initial state is not stored in the
/// file; [`ParsedTrajectory::into_trajectory`] rebuilds it from the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrajectory {
    pub model: ModelConfig,
    pub model_hash: String,
    pub sampler: String,
    pub rng_seed: u64,
    pub stop: StopReason,
    pub final_time: f64,
    pub variates_consumed: u64,
    pub events: Vec<EventRecord>,
}

impl ParsedTrajectory {
    pub fn into_trajectory(self, model: &Model) -> Trajectory {
        Trajectory {
            model: self.model,
            model_hash: self.model_hash,
            sampler: self.sampler,
            rng_seed: self.rng_seed,
            initial_state: model.initial().clone(),
            events: self.events,
            final_time: self.final_time,
            variates_consumed: self.variates_consumed,
            stop: self.stop,
        }
    }
}

impl FromStr for ParsedTrajectory {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, first) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
        if first != format!("# clockrace trajectory {FORMAT_VERSION}") {
            return Err(bad(n, "not a trajectory file of a supported version"));
        }
        let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        let mut params = BTreeMap::new();
        let mut columns_seen = false;
        for (n, line) in lines.by_ref() {
            if line == COLUMNS {
                columns_seen = true;
                break;
            }
            let body = line
                .strip_prefix("# ")
                .ok_or_else(|| bad(n, "expected a header line"))?;
            let mut parts = body.split('\t');
            let name = parts.next().unwrap_or_default();
            if name == "param" {
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(k), Some(v), None) => {
                        params.insert(k.to_string(), v.to_string());
                    }
                    _ => return Err(bad(n, "param line needs a key and a value")),
                }
            } else {
                let value = match (parts.next(), parts.next()) {
                    (Some(v), None) => v,
                    _ => return Err(bad(n, format!("header `{name}` needs exactly one value"))),
                };
                if fields.insert(name, (n, value)).is_some() {
                    return Err(bad(n, format!("duplicate header `{name}`")));
                }
            }
        }
        if !columns_seen {
            return Err(bad(text.lines().count(), "missing column header"));
        }
        let field = |name: &str| {
            fields
                .get(name)
                .copied()
                .ok_or_else(|| bad(1, format!("missing header `{name}`")))
        };
        fn typed<T: FromStr>((n, raw): (usize, &str), what: &str) -> Result<T, ParseError> {
            raw.parse().map_err(|_| bad(n, format!("invalid {what} `{raw}`")))
        }
        let model = ModelConfig {
            name: field("model")?.1.to_string(),
            params,
        };
        let mut events = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [seq, time, clock] = cols[..] else {
                return Err(bad(n, "expected three tab-separated columns"));
            };
            let event = EventRecord {
                seq: typed((n, seq), "seq")?,
                time: typed((n, time), "time")?,
                clock: ClockId(typed((n, clock), "clock id")?),
            };
            if event.seq != events.len() as u64 {
                return Err(bad(n, "event sequence numbers must count up from 0"));
            }
            events.push(event);
        }
        Ok(Self {
            model,
            model_hash: field("model_hash")?.1.to_string(),
            sampler: field("sampler")?.1.to_string(),
            rng_seed: typed(field("seed")?, "seed")?,
            stop: typed(field("stop")?, "stop reason")?,
            final_time: typed(field("final_time")?, "final time")?,
            variates_consumed: typed(field("variates")?, "variate count")?,
            events,
        })
    }
}
