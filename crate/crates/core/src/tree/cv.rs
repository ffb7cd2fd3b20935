//! Depth selection by k-fold cross-validation over greedy trees.

use super::greedy::greedy_tree_fit;
use crate::data::{k_folds, Dataset, SplitSpec};
use crate::loss::zero_one_risk;
use crate::{Error, Result};
use serde::Serialize;

/// Mean train/validation risks for one candidate depth.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DepthRow {
    pub depth: usize,
    pub train_risk: f64,
    pub validation_risk: f64,
}

/// Cross-validation outcome: chosen depth plus the per-depth risk table.
#[derive(Clone, Debug, Serialize)]
pub struct DepthSelection {
    pub best_depth: usize,
    pub table: Vec<DepthRow>,
}

/// Pick the depth with the lowest mean validation risk (ties go to the
/// smaller depth).
pub fn cross_validate_depth(
    d: &Dataset,
    depths: &[usize],
    folds: usize,
    seed: u64,
) -> Result<DepthSelection> {
    if depths.is_empty() {
        return Err(Error::OutOfRange {
            name: "depths",
            value: 0.0,
            range: "non-empty",
        });
    }
    if folds < 2 || folds > d.n() {
        return Err(Error::FoldCount { folds, n: d.n() });
    }
    let spec = SplitSpec {
        validation_fraction: 1.0 / folds as f64,
        fold_count: folds,
        seed,
    };
    let fold_sets = k_folds(d, &spec)?;

    let mut table = Vec::with_capacity(depths.len());
    for &depth in depths {
        let mut train_acc = 0.0;
        let mut val_acc = 0.0;
        for (train, val) in &fold_sets {
            let tree = greedy_tree_fit(train, depth)?;
            train_acc += zero_one_risk(&tree.predict_all(train), train.labels())?;
            val_acc += zero_one_risk(&tree.predict_all(val), val.labels())?;
        }
        table.push(DepthRow {
            depth,
            train_risk: train_acc / fold_sets.len() as f64,
            validation_risk: val_acc / fold_sets.len() as f64,
        });
    }

    let mut best = table[0];
    for row in &table[1..] {
        let better = row.validation_risk < best.validation_risk - 1e-12;
        let tie_smaller =
            (row.validation_risk - best.validation_risk).abs() <= 1e-12 && row.depth < best.depth;
        if better || tie_smaller {
            best = *row;
        }
    }
    Ok(DepthSelection {
        best_depth: best.depth,
        table,
    })
}
