//! Hypothesis spaces of complete binary decision trees on binary features:
//! exact counting, exact Rashomon-set enumeration, a greedy learner and
//! depth selection by cross-validation.
//!
//! Canonical orientation everywhere: feature value 0 routes left, 1 routes
//! right, and feature indices are distinct along every root-leaf path.

mod count;
mod cv;
mod enumerate;
mod greedy;

pub use count::{
    brute_force_trees_up_to_depth, count_full_trees, count_structures, count_trees_up_to_depth,
};
pub use cv::{cross_validate_depth, DepthRow, DepthSelection};
pub use enumerate::{
    enumerate_rashomon_trees, exhaustive_rashomon_trees, for_each_structure, ThetaMode,
    TreeEnumConfig, TreeRashomonResult,
};
pub use greedy::{greedy_tree_fit, DecisionTree};

/// Internal-feature layout of a complete tree of depth `d`, heap-ordered:
/// node `v` has children `2v+1` (feature value 0) and `2v+2` (value 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStructure {
    depth: usize,
    internal_features: Vec<u32>,
}

impl TreeStructure {
    pub fn new(depth: usize, internal_features: Vec<u32>) -> Self {
        assert!(depth >= 1);
        assert_eq!(internal_features.len(), (1 << depth) - 1);
        debug_assert!(paths_distinct(depth, &internal_features));
        TreeStructure {
            depth,
            internal_features,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn internal_features(&self) -> &[u32] {
        &self.internal_features
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    /// Leaf index (0-based, left to right) that `row` routes to.
    pub fn route(&self, row: &[f64]) -> usize {
        let mut v = 0usize;
        for _ in 0..self.depth {
            let bit = row[self.internal_features[v] as usize] as usize;
            v = 2 * v + 1 + bit;
        }
        v - (self.leaf_count() - 1)
    }

    /// Per-leaf (count of class 0, count of class 1) for a bound dataset.
    pub fn leaf_tallies(&self, d: &crate::data::Dataset) -> Vec<(u32, u32)> {
        let mut tallies = vec![(0u32, 0u32); self.leaf_count()];
        for i in 0..d.n() {
            let leaf = self.route(d.row(i));
            if d.labels()[i] == 0 {
                tallies[leaf].0 += 1;
            } else {
                tallies[leaf].1 += 1;
            }
        }
        tallies
    }
}

fn paths_distinct(depth: usize, features: &[u32]) -> bool {
    for leaf in 0..(1usize << depth) {
        let mut v = (1 << depth) - 1 + leaf;
        let mut seen = Vec::with_capacity(depth);
        while v > 0 {
            v = (v - 1) / 2;
            if seen.contains(&features[v]) {
                return false;
            }
            seen.push(features[v]);
        }
    }
    true
}
