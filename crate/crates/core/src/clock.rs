//! Clock processes and the discrete state they increment.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::hazard::HazardSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("substate `{key}` would become negative ({value})")]
    NegativeSubstate { key: SubstateKey, value: i64 },
}

/// Index of a clock within its model. Ids are dense: `0..clock_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub u32);

impl ClockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        Self(u32::try_from(index).expect("clock index exceeds u32"))
    }
}

impl fmt::Display for ClockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Name of one substate of the system state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubstateKey(Arc<str>);

impl SubstateKey {
    pub fn new(name: impl AsRef<str>) -> Self {
        Self(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part of the name before the first `:`, used to aggregate
    /// per-individual substates into classes (`I:3` belongs to `I`).
    pub fn class(&self) -> &str {
        self.0.split(':').next().unwrap_or(&self.0)
    }
}

impl Borrow<str> for SubstateKey {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for SubstateKey {
    fn from(name: &str) -> Self {
        Self::new(name)
    }
}

impl fmt::Debug for SubstateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for SubstateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sparse integer state. Absent keys are zero and zero counts are never stored.
///
/// Alongside the counts the state remembers the stopping time at which each
/// substate last changed, so enabling rules can depend on the state and the
/// time it entered its current value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemState {
    counts: BTreeMap<SubstateKey, i64>,
    changed_at: BTreeMap<SubstateKey, f64>,
}

impl SystemState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Initial state at time 0.
    pub fn from_counts<K: Into<SubstateKey>>(counts: impl IntoIterator<Item = (K, i64)>) -> Self {
        let mut state = Self::new();
        for (key, value) in counts {
            state.set(key.into(), value, 0.0);
        }
        state
    }

    pub fn get(&self, key: &str) -> i64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Time at which `key` last changed, if it ever held a value.
    pub fn changed_at(&self, key: &str) -> Option<f64> {
        self.changed_at.get(key).copied()
    }

    pub fn set(&mut self, key: SubstateKey, value: i64, at: f64) {
        if value == 0 {
            self.counts.remove(&key);
        } else {
            self.counts.insert(key.clone(), value);
        }
        self.changed_at.insert(key, at);
    }

    pub fn counts(&self) -> &BTreeMap<SubstateKey, i64> {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SubstateKey, i64)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Adds `mark` to the state at stopping time `at`. The state is left
    /// untouched when any resulting count would be negative.
    pub fn apply_mark(&mut self, mark: &JumpMark, at: f64) -> Result<(), ClockError> {
        for (key, delta) in mark.deltas() {
            let value = self.get(key.as_str()) + delta;
            if value < 0 {
                return Err(ClockError::NegativeSubstate {
                    key: key.clone(),
                    value,
                });
            }
        }
        for (key, delta) in mark.deltas() {
            let value = self.get(key.as_str()) + delta;
            self.set(key.clone(), value, at);
        }
        Ok(())
    }

    /// Functional form of [`apply_mark`](Self::apply_mark).
    pub fn with_mark(&self, mark: &JumpMark, at: f64) -> Result<SystemState, ClockError> {
        let mut next = self.clone();
        next.apply_mark(mark, at)?;
        Ok(next)
    }

    /// Counts summed by [`SubstateKey::class`].
    pub fn aggregate_by_class(&self) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        for (key, value) in &self.counts {
            *out.entry(key.class().to_string()).or_insert(0) += value;
        }
        out
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (key, value)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{key}={value}")?;
        }
        Ok(())
    }
}

/// The state increment applied when a clock fires.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JumpMark {
    deltas: Vec<(SubstateKey, i64)>,
}

impl JumpMark {
    /// Duplicate keys are summed and zero deltas dropped.
    pub fn new<K: Into<SubstateKey>>(deltas: impl IntoIterator<Item = (K, i64)>) -> Self {
        let mut merged: BTreeMap<SubstateKey, i64> = BTreeMap::new();
        for (key, delta) in deltas {
            *merged.entry(key.into()).or_insert(0) += delta;
        }
        Self {
            deltas: merged.into_iter().filter(|(_, d)| *d != 0).collect(),
        }
    }

    pub fn deltas(&self) -> &[(SubstateKey, i64)] {
        &self.deltas
    }

    /// Keys this mark writes.
    pub fn support(&self) -> impl Iterator<Item = &SubstateKey> {
        self.deltas.iter().map(|(k, _)| k)
    }

    pub fn combined(&self, other: &JumpMark) -> JumpMark {
        JumpMark::new(self.deltas.iter().chain(&other.deltas).cloned())
    }
}

/// What an enabling rule reports for the current state.
#[derive(Debug, Clone, PartialEq)]
pub enum Enabling {
    Disabled,
    /// `since` is an explicit enabling time derived from the state; `None`
    /// keeps the running enabling time, or uses the current time when the
    /// clock was not enabled before.
    Enabled {
        spec: Arc<HazardSpec>,
        since: Option<f64>,
    },
}

/// Cached status of a clock between stopping times.
#[derive(Debug, Clone, PartialEq)]
pub enum ClockStatus {
    Disabled,
    Enabled {
        spec: Arc<HazardSpec>,
        enabling_time: f64,
    },
}

impl ClockStatus {
    pub fn is_enabled(&self) -> bool {
        matches!(self, ClockStatus::Enabled { .. })
    }

    fn same_as(&self, spec: &Arc<HazardSpec>, enabling_time: f64) -> bool {
        match self {
            ClockStatus::Enabled {
                spec: old,
                enabling_time: old_time,
            } => (Arc::ptr_eq(old, spec) || **old == **spec) && *old_time == enabling_time,
            ClockStatus::Disabled => false,
        }
    }
}

/// Result of re-evaluating a clock after a jump.
#[derive(Debug, Clone, PartialEq)]
pub enum EnablingOutcome {
    Disabled,
    Enabled {
        spec: Arc<HazardSpec>,
        enabling_time: f64,
    },
    UnchangedSinceLastQuery,
}

impl EnablingOutcome {
    /// The status after this outcome, given the status before it.
    pub fn resolve(self, previously: &ClockStatus) -> ClockStatus {
        match self {
            EnablingOutcome::Disabled => ClockStatus::Disabled,
            EnablingOutcome::Enabled {
                spec,
                enabling_time,
            } => ClockStatus::Enabled {
                spec,
                enabling_time,
            },
            EnablingOutcome::UnchangedSinceLastQuery => previously.clone(),
        }
    }
}

pub type EnablingFn = Arc<dyn Fn(&SystemState, f64) -> Enabling + Send + Sync>;

/// One clock process: which substates it reads, how it decides whether it
/// is enabled and with what hazard, and the mark it applies when it fires.
#[derive(Clone)]
pub struct ClockSpec {
    pub id: ClockId,
    pub label: String,
    pub reads: Vec<SubstateKey>,
    pub mark: JumpMark,
    pub enabling: EnablingFn,
}

impl ClockSpec {
    pub fn new(
        id: ClockId,
        label: impl Into<String>,
        reads: Vec<SubstateKey>,
        mark: JumpMark,
        enabling: impl Fn(&SystemState, f64) -> Enabling + Send + Sync + 'static,
    ) -> Self {
        let mut reads = reads;
        reads.sort();
        reads.dedup();
        Self {
            id,
            label: label.into(),
            reads,
            mark,
            enabling: Arc::new(enabling),
        }
    }
}

impl fmt::Debug for ClockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClockSpec")
            .field("id", &self.id)
            .field("label", &self.label)
            .field("reads", &self.reads)
            .field("mark", &self.mark)
            .finish_non_exhaustive()
    }
}

/// Runs the clock's enabling rule against the post-jump state.
pub fn evaluate_enabling(
    clock: &ClockSpec,
    state: &SystemState,
    now: f64,
    previously: &ClockStatus,
) -> EnablingOutcome {
    match (clock.enabling)(state, now) {
        Enabling::Disabled => match previously {
            ClockStatus::Disabled => EnablingOutcome::UnchangedSinceLastQuery,
            ClockStatus::Enabled { .. } => EnablingOutcome::Disabled,
        },
        Enabling::Enabled { spec, since } => {
            let enabling_time = match (since, previously) {
                (Some(t), _) => t.min(now),
                (None, ClockStatus::Enabled { enabling_time, .. }) => *enabling_time,
                (None, ClockStatus::Disabled) => now,
            };
            if previously.same_as(&spec, enabling_time) {
                EnablingOutcome::UnchangedSinceLastQuery
            } else {
                EnablingOutcome::Enabled {
                    spec,
                    enabling_time,
                }
            }
        }
    }
}
