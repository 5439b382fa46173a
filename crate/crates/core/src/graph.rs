//! Bipartite dependency graph between clocks and the substates they read and write.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::clock::{ClockId, ClockSpec, SubstateKey};

#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    reads: Vec<Vec<SubstateKey>>,
    writes: Vec<Vec<SubstateKey>>,
    readers: BTreeMap<SubstateKey, Vec<ClockId>>,
}

impl DependencyGraph {
    /// Clocks must be given with dense ids in order.
    pub fn build(clocks: &[ClockSpec]) -> Self {
        let mut graph = Self::default();
        for clock in clocks {
            debug_assert_eq!(clock.id.index(), graph.reads.len());
            for key in &clock.reads {
                graph.readers.entry(key.clone()).or_default().push(clock.id);
            }
            graph.reads.push(clock.reads.clone());
            graph.writes.push(clock.mark.support().cloned().collect());
        }
        graph
    }

    pub fn clock_count(&self) -> usize {
        self.reads.len()
    }

    pub fn reads(&self, clock: ClockId) -> &[SubstateKey] {
        &self.reads[clock.index()]
    }

    pub fn writes(&self, clock: ClockId) -> &[SubstateKey] {
        &self.writes[clock.index()]
    }

    /// Clocks reading `key`, in ascending id order.
    pub fn readers(&self, key: &SubstateKey) -> &[ClockId] {
        self.readers.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Clocks whose enabling must be re-evaluated after `fired` jumps: every
    /// reader of a substate it writes, plus `fired` itself. Sorted, no duplicates.
    pub fn affected(&self, fired: ClockId) -> Vec<ClockId> {
        let mut out = vec![fired];
        for key in self.writes(fired) {
            out.extend_from_slice(self.readers(key));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edge list, one edge per line: `clock-id TAB substate-key TAB read|write`.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (index, (reads, writes)) in self.reads.iter().zip(&self.writes).enumerate() {
            for key in reads {
                let _ = writeln!(out, "{index}\t{key}\tread");
            }
            for key in writes {
                let _ = writeln!(out, "{index}\t{key}\twrite");
            }
        }
        out
    }
}
