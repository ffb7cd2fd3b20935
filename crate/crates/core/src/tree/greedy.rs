//! Greedy top-down tree learner (Gini impurity) for binary features.
//!
//! Stand-in for a practitioner's CART fit in the depth-selection
//! simulation. Deterministic: split ties break to the lowest feature
//! index, leaf-label ties predict class 1.

use crate::data::Dataset;
use crate::{Error, Result};

/// Learned (possibly non-complete) binary decision tree.
#[derive(Clone, Debug, PartialEq)]
pub enum DecisionTree {
    Leaf {
        label: u8,
    },
    Split {
        feature: usize,
        left: Box<DecisionTree>,
        right: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn predict(&self, row: &[f64]) -> u8 {
        match self {
            DecisionTree::Leaf { label } => *label,
            DecisionTree::Split {
                feature,
                left,
                right,
            } => {
                if row[*feature] == 0.0 {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }

    pub fn predict_all(&self, d: &Dataset) -> Vec<u8> {
        (0..d.n()).map(|i| self.predict(d.row(i))).collect()
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn gini(c0: usize, c1: usize) -> f64 {
    let n = (c0 + c1) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = c1 as f64 / n;
    2.0 * p * (1.0 - p)
}

fn majority(c0: usize, c1: usize) -> u8 {
    (c1 >= c0) as u8
}

/// Fit a greedy tree of depth at most `max_depth` on binary features.
pub fn greedy_tree_fit(d: &Dataset, max_depth: usize) -> Result<DecisionTree> {
    if !d.is_binary() {
        return Err(Error::NonBinaryData);
    }
    if max_depth < 1 {
        return Err(Error::DepthCapTooSmall);
    }
    let rows: Vec<usize> = (0..d.n()).collect();
    Ok(grow(d, &rows, max_depth))
}

fn grow(d: &Dataset, rows: &[usize], depth_left: usize) -> DecisionTree {
    let c1 = rows.iter().filter(|&&i| d.labels()[i] == 1).count();
    let c0 = rows.len() - c1;
    if c0 == 0 || c1 == 0 || depth_left == 0 {
        return DecisionTree::Leaf {
            label: majority(c0, c1),
        };
    }

    let parent_impurity = gini(c0, c1);
    let mut best: Option<(f64, usize)> = None; // (decrease, feature)
    for f in 0..d.m() {
        let mut l0 = 0usize;
        let mut l1 = 0usize;
        let mut r0 = 0usize;
        let mut r1 = 0usize;
        for &i in rows {
            match (d.value(i, f) as u8, d.labels()[i]) {
                (0, 0) => l0 += 1,
                (0, 1) => l1 += 1,
                (1, 0) => r0 += 1,
                (1, 1) => r1 += 1,
                _ => unreachable!(),
            }
        }
        if l0 + l1 == 0 || r0 + r1 == 0 {
            continue; // degenerate split
        }
        let nl = (l0 + l1) as f64;
        let nr = (r0 + r1) as f64;
        let n = rows.len() as f64;
        let child = (nl / n) * gini(l0, l1) + (nr / n) * gini(r0, r1);
        let decrease = parent_impurity - child;
        // strictly-greater keeps the lowest feature index on ties
        if best.is_none_or(|(bd, _)| decrease > bd + 1e-12) {
            best = Some((decrease, f));
        }
    }

    match best {
        None => DecisionTree::Leaf {
            label: majority(c0, c1),
        },
        Some((_, f)) => {
            let left_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| d.value(i, f) == 0.0)
                .collect();
            let right_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| d.value(i, f) == 1.0)
                .collect();
            DecisionTree::Split {
                feature: f,
                left: Box::new(grow(d, &left_rows, depth_left - 1)),
                right: Box::new(grow(d, &right_rows, depth_left - 1)),
            }
        }
    }
}
