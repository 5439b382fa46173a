//! Indexed pairing heap over putative firing times.
//!
//! Nodes live in a vector indexed by clock id, so every clock can be located
//! in O(1) for decrease-key, increase-key and deletion. Keys are ordered by
//! time first (total order, `+inf` last) and clock id second, which makes the
//! minimum unique and pop order deterministic.

use std::cmp::Ordering;

use crate::clock::ClockId;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    time: f64,
    child: u32,
    sibling: u32,
    // parent when this is a first child, otherwise left sibling
    prev: u32,
    queued: bool,
}

impl Default for Node {
    fn default() -> Self {
        Self {
            time: f64::INFINITY,
            child: NIL,
            sibling: NIL,
            prev: NIL,
            queued: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PutativeQueue {
    nodes: Vec<Node>,
    root: u32,
    len: usize,
    scratch: Vec<u32>,
}

impl PutativeQueue {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            root: NIL,
            len: 0,
            scratch: Vec::new(),
        }
    }

    pub fn with_capacity(clocks: usize) -> Self {
        let mut q = Self::new();
        q.nodes.resize(clocks, Node::default());
        q
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, clock: ClockId) -> bool {
        self.nodes.get(clock.index()).is_some_and(|n| n.queued)
    }

    pub fn time(&self, clock: ClockId) -> Option<f64> {
        self.nodes
            .get(clock.index())
            .filter(|n| n.queued)
            .map(|n| n.time)
    }

    /// Soonest clock and its putative time.
    pub fn peek(&self) -> Option<(ClockId, f64)> {
        (self.root != NIL).then(|| (ClockId(self.root), self.nodes[self.root as usize].time))
    }

    pub fn pop(&mut self) -> Option<(ClockId, f64)> {
        let top = self.peek()?;
        self.remove(top.0);
        Some(top)
    }

    /// Inserts `clock` or moves it to `time`.
    pub fn set(&mut self, clock: ClockId, time: f64) {
        let id = clock.0;
        if clock.index() >= self.nodes.len() {
            self.nodes.resize(clock.index() + 1, Node::default());
        }
        let node = self.nodes[id as usize];
        if !node.queued {
            self.nodes[id as usize] = Node {
                time,
                queued: true,
                ..Node::default()
            };
            self.root = self.meld(self.root, id);
            self.len += 1;
            return;
        }
        match time.total_cmp(&node.time) {
            Ordering::Equal => {}
            Ordering::Less => {
                self.nodes[id as usize].time = time;
                if id != self.root {
                    self.cut(id);
                    self.root = self.meld(self.root, id);
                }
            }
            Ordering::Greater => {
                self.remove(clock);
                self.set(clock, time);
            }
        }
    }

    /// Removes `clock`; returns whether it was queued.
    pub fn remove(&mut self, clock: ClockId) -> bool {
        if !self.contains(clock) {
            return false;
        }
        let id = clock.0;
        let children = self.nodes[id as usize].child;
        self.nodes[id as usize].child = NIL;
        if id == self.root {
            self.root = self.merge_pairs(children);
        } else {
            self.cut(id);
            let merged = self.merge_pairs(children);
            self.root = self.meld(self.root, merged);
        }
        self.nodes[id as usize] = Node::default();
        self.len -= 1;
        true
    }

    /// Queued clocks in ascending id order.
    pub fn members(&self) -> Vec<ClockId> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.queued)
            .map(|(i, _)| ClockId::from_index(i))
            .collect()
    }

    fn less(&self, a: u32, b: u32) -> bool {
        let (na, nb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
        match na.time.total_cmp(&nb.time) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a < b,
        }
    }

    /// Melds two detached trees and returns the new root.
    fn meld(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let (parent, child) = if self.less(b, a) { (b, a) } else { (a, b) };
        let first = self.nodes[parent as usize].child;
        self.nodes[child as usize].sibling = first;
        self.nodes[child as usize].prev = parent;
        if first != NIL {
            self.nodes[first as usize].prev = child;
        }
        self.nodes[parent as usize].child = child;
        self.nodes[parent as usize].sibling = NIL;
        self.nodes[parent as usize].prev = NIL;
        parent
    }

    fn cut(&mut self, id: u32) {
        let Node { prev, sibling, .. } = self.nodes[id as usize];
        if self.nodes[prev as usize].child == id {
            self.nodes[prev as usize].child = sibling;
        } else {
            self.nodes[prev as usize].sibling = sibling;
        }
        if sibling != NIL {
            self.nodes[sibling as usize].prev = prev;
        }
        self.nodes[id as usize].sibling = NIL;
        self.nodes[id as usize].prev = NIL;
    }

    /// Two-pass pairing of a sibling list.
    fn merge_pairs(&mut self, first: u32) -> u32 {
        let mut trees = std::mem::take(&mut self.scratch);
        trees.clear();
        let mut cursor = first;
        while cursor != NIL {
            let next = self.nodes[cursor as usize].sibling;
            self.nodes[cursor as usize].sibling = NIL;
            self.nodes[cursor as usize].prev = NIL;
            trees.push(cursor);
            cursor = next;
        }
        let mut paired = 0;
        let mut i = 0;
        while i < trees.len() {
            let merged = if i + 1 < trees.len() {
                self.meld(trees[i], trees[i + 1])
            } else {
                trees[i]
            };
            trees[paired] = merged;
            paired += 1;
            i += 2;
        }
        let mut root = NIL;
        for &tree in trees[..paired].iter().rev() {
            root = self.meld(tree, root);
        }
        self.scratch = trees;
        root
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_order() {
        let mut q = PutativeQueue::new();
        for (i, t) in [5.0, 1.0, 3.0, f64::INFINITY, 2.0].into_iter().enumerate() {
            q.set(ClockId::from_index(i), t);
        }
        let order: Vec<u32> = std::iter::from_fn(|| q.pop()).map(|(c, _)| c.0).collect();
        assert_eq!(order, vec![1, 4, 2, 0, 3]);
        assert!(q.is_empty());
    }

    #[test]
    fn ties_break_by_id() {
        let mut q = PutativeQueue::new();
        q.set(ClockId(3), 1.0);
        q.set(ClockId(1), 1.0);
        q.set(ClockId(2), 1.0);
        assert_eq!(q.peek(), Some((ClockId(1), 1.0)));
    }

    #[test]
    fn decrease_increase_remove() {
        let mut q = PutativeQueue::new();
        for i in 0..10 {
            q.set(ClockId(i), 10.0 + f64::from(i));
        }
        q.set(ClockId(7), 0.5);
        assert_eq!(q.peek(), Some((ClockId(7), 0.5)));
        q.set(ClockId(7), 100.0);
        assert_eq!(q.peek(), Some((ClockId(0), 10.0)));
        assert!(q.remove(ClockId(0)));
        assert!(!q.remove(ClockId(0)));
        assert_eq!(q.peek(), Some((ClockId(1), 11.0)));
        assert_eq!(q.len(), 9);
        assert_eq!(q.time(ClockId(7)), Some(100.0));
    }
}
