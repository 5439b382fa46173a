//! Sum tree over per-clock hazard values.
//!
//! A complete binary tree stored in an array: leaves hold the values, every
//! internal node the sum of its two children. A point update recomputes the
//! path to the root from the children, so internal sums never accumulate
//! drift from repeated incremental updates.

#[derive(Debug, Clone)]
pub struct PrefixSumTree {
    capacity: usize,
    nodes: Vec<f64>,
}

impl Default for PrefixSumTree {
    fn default() -> Self {
        Self::with_capacity(1)
    }
}

impl PrefixSumTree {
    pub fn with_capacity(leaves: usize) -> Self {
        let capacity = leaves.max(1).next_power_of_two();
        Self {
            capacity,
            nodes: vec![0.0; 2 * capacity],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, index: usize) -> f64 {
        if index < self.capacity {
            self.nodes[self.capacity + index]
        } else {
            0.0
        }
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn set(&mut self, index: usize, value: f64) {
        debug_assert!(value >= 0.0, "negative hazard {value}");
        if index >= self.capacity {
            self.grow(index + 1);
        }
        let mut node = self.capacity + index;
        self.nodes[node] = value;
        while node > 1 {
            node /= 2;
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    fn grow(&mut self, leaves: usize) {
        let mut bigger = Self::with_capacity(leaves);
        bigger.nodes[bigger.capacity..bigger.capacity + self.capacity]
            .copy_from_slice(&self.nodes[self.capacity..]);
        for node in (1..bigger.capacity).rev() {
            bigger.nodes[node] = bigger.nodes[2 * node] + bigger.nodes[2 * node + 1];
        }
        *self = bigger;
    }

    /// Smallest index whose inclusive prefix sum reaches `target`, for
    /// `target` in `(0, total]`. `None` when every value is zero.
    pub fn find(&self, target: f64) -> Option<usize> {
        if !(self.total() > 0.0) {
            return None;
        }
        let mut remaining = target;
        let mut node = 1;
        while node < self.capacity {
            let left = 2 * node;
            if remaining <= self.nodes[left] || !(self.nodes[left + 1] > 0.0) {
                node = left;
            } else {
                remaining -= self.nodes[left];
                node = left + 1;
            }
        }
        Some(node - self.capacity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_and_finds() {
        let mut tree = PrefixSumTree::with_capacity(3);
        tree.set(0, 1.0);
        tree.set(1, 0.0);
        tree.set(2, 2.0);
        assert_eq!(tree.total(), 3.0);
        assert_eq!(tree.find(0.5), Some(0));
        assert_eq!(tree.find(1.0), Some(0));
        assert_eq!(tree.find(1.0001), Some(2));
        assert_eq!(tree.find(3.0), Some(2));
        // rounding past the total still lands on a positive leaf
        assert_eq!(tree.find(3.000_000_1), Some(2));
    }

    #[test]
    fn empty_tree_finds_nothing() {
        let mut tree = PrefixSumTree::with_capacity(4);
        assert_eq!(tree.find(0.5), None);
        tree.set(1, 1.0);
        tree.set(1, 0.0);
        assert_eq!(tree.find(0.5), None);
    }

    #[test]
    fn grows_on_demand() {
        let mut tree = PrefixSumTree::with_capacity(1);
        tree.set(0, 1.0);
        tree.set(9, 2.0);
        assert!(tree.capacity() >= 10);
        assert_eq!(tree.total(), 3.0);
        assert_eq!(tree.get(9), 2.0);
        assert_eq!(tree.find(2.5), Some(9));
    }
}
