//! Exact Rashomon-set enumeration over complete trees of a fixed depth.
//!
//! Structures (internal-feature assignments) are enumerated explicitly; leaf
//! labelings are counted by a dynamic program over the integer mistake
//! budget instead of being enumerated, which keeps depth 3 tractable. Per
//! leaf, the majority label costs 0 extra mistakes and the minority label
//! costs `|count0 - count1|`; an empty or tied leaf admits both labels at
//! zero cost and both count as distinct models, matching the closed-form
//! space count.

use super::count::count_full_trees;
use crate::data::Dataset;
use crate::pattern::Pattern;
use crate::special::biguint_ratio;
use crate::{Error, Result};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// How the Rashomon parameter widens the loss threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// Loss threshold `min_loss + theta`.
    Additive,
    /// Loss threshold `(1 + theta) * min_loss`.
    Multiplicative,
}

/// Enumeration options.
#[derive(Clone, Debug)]
pub struct TreeEnumConfig {
    pub theta: f64,
    pub theta_mode: ThetaMode,
    /// Collect the distinct prediction patterns of the Rashomon set.
    pub collect_patterns: bool,
    /// Refuse pattern collection when the model count exceeds this cap.
    pub pattern_cap: u128,
}

impl TreeEnumConfig {
    pub fn new(theta: f64, theta_mode: ThetaMode) -> Self {
        TreeEnumConfig {
            theta,
            theta_mode,
            collect_patterns: false,
            pattern_cap: 1_000_000,
        }
    }

    pub fn with_patterns(mut self) -> Self {
        self.collect_patterns = true;
        self
    }
}

/// Exact counts and (optionally) patterns for one (dataset, depth, theta).
#[derive(Clone, Debug)]
pub struct TreeRashomonResult {
    pub total_models: BigUint,
    pub rashomon_count: BigUint,
    pub min_loss: f64,
    /// Mistake budget actually used: models with at most this many training
    /// mistakes are in the set.
    pub mistake_budget: usize,
    pub patterns: Option<BTreeSet<Pattern>>,
}

impl TreeRashomonResult {
    /// Rashomon ratio `rashomon_count / total_models` as f64.
    pub fn ratio(&self) -> f64 {
        biguint_ratio(&self.rashomon_count, &self.total_models)
    }

    pub fn log10_ratio(&self) -> f64 {
        self.ratio().log10()
    }

    /// Loss slack actually granted relative to `min_loss` by the integer
    /// mistake budget (the effective additive theta).
    pub fn effective_theta(&self, n: usize) -> f64 {
        self.mistake_budget as f64 / n as f64 - self.min_loss
    }
}

/// Visit every internal-feature structure of a depth-`d` complete tree over
/// `m` features (distinct features along each root-leaf path), heap order.
pub fn for_each_structure(d: usize, m: usize, mut visit: impl FnMut(&[u32])) {
    let nodes = (1usize << d) - 1;
    let mut feats = vec![0u32; nodes];
    assign(0, nodes, m, &mut feats, &mut visit);
}

fn assign(v: usize, nodes: usize, m: usize, feats: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if v == nodes {
        visit(feats);
        return;
    }
    // features used on the path from the root to v
    let mut used = 0u64;
    let mut a = v;
    while a > 0 {
        a = (a - 1) / 2;
        used |= 1 << feats[a];
    }
    for f in 0..m as u32 {
        if used & (1 << f) == 0 {
            feats[v] = f;
            assign(v + 1, nodes, m, feats, visit);
        }
    }
}

/// Structures with the given root feature (partition used for parallelism).
fn for_each_structure_with_root(d: usize, m: usize, root: u32, visit: &mut impl FnMut(&[u32])) {
    let nodes = (1usize << d) - 1;
    let mut feats = vec![0u32; nodes];
    feats[0] = root;
    assign(1, nodes, m, &mut feats, visit);
}

fn route_all(d: usize, feats: &[u32], data: &Dataset) -> Vec<(u32, u32)> {
    let leaves = 1usize << d;
    let base = leaves - 1;
    let mut tallies = vec![(0u32, 0u32); leaves];
    for i in 0..data.n() {
        let row = data.row(i);
        let mut v = 0usize;
        for _ in 0..d {
            let bit = row[feats[v] as usize] as usize;
            v = 2 * v + 1 + bit;
        }
        if data.labels()[i] == 0 {
            tallies[v - base].0 += 1;
        } else {
            tallies[v - base].1 += 1;
        }
    }
    tallies
}

fn structure_min_mistakes(tallies: &[(u32, u32)]) -> usize {
    tallies.iter().map(|&(c0, c1)| c0.min(c1) as usize).sum()
}

/// Count leaf labelings with at most `budget` total mistakes via a DP over
/// the per-leaf extra cost of choosing the minority label.
fn count_within_budget(tallies: &[(u32, u32)], budget: usize) -> u128 {
    let min_mistakes = structure_min_mistakes(tallies);
    if min_mistakes > budget {
        return 0;
    }
    let slack = budget - min_mistakes;
    let mut ways = vec![0u128; slack + 1];
    ways[0] = 1;
    for &(c0, c1) in tallies {
        let regret = c0.abs_diff(c1) as usize;
        if regret == 0 {
            // both labels cost the same; two distinct models
            for w in ways.iter_mut() {
                *w *= 2;
            }
        } else if regret <= slack {
            for b in (regret..=slack).rev() {
                ways[b] += ways[b - regret];
            }
        }
    }
    ways.iter().sum()
}

/// Enumerate the Rashomon set of complete depth-`depth` trees exactly.
pub fn enumerate_rashomon_trees(
    data: &Dataset,
    depth: usize,
    config: &TreeEnumConfig,
) -> Result<TreeRashomonResult> {
    if !data.is_binary() {
        return Err(Error::NonBinaryData);
    }
    if depth < 1 {
        return Err(Error::DepthCapTooSmall);
    }
    if depth > data.m() {
        return Err(Error::DepthExceedsFeatures { depth, m: data.m() });
    }
    if config.theta < 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: config.theta,
            range: "[0,inf)",
        });
    }
    let n = data.n();
    let m = data.m();
    let total_models = count_full_trees(depth, m)?;

    // pass 1: in-space minimum loss
    let global_min: usize = (0..m as u32)
        .into_par_iter()
        .map(|root| {
            let mut best = usize::MAX;
            for_each_structure_with_root(depth, m, root, &mut |feats| {
                let tallies = route_all(depth, feats, data);
                best = best.min(structure_min_mistakes(&tallies));
            });
            best
        })
        .reduce(|| usize::MAX, usize::min);
    let min_loss = global_min as f64 / n as f64;

    let threshold_loss = match config.theta_mode {
        ThetaMode::Additive => min_loss + config.theta,
        ThetaMode::Multiplicative => (1.0 + config.theta) * min_loss,
    };
    let budget = ((n as f64 * threshold_loss + 1e-9).floor() as usize).min(n);

    // pass 2: count models within the mistake budget
    let rashomon_count: u128 = (0..m as u32)
        .into_par_iter()
        .map(|root| {
            let mut acc = 0u128;
            for_each_structure_with_root(depth, m, root, &mut |feats| {
                let tallies = route_all(depth, feats, data);
                acc += count_within_budget(&tallies, budget);
            });
            acc
        })
        .sum();

    let patterns = if config.collect_patterns {
        if rashomon_count > config.pattern_cap {
            return Err(Error::PatternCapExceeded {
                count: rashomon_count,
                cap: config.pattern_cap,
            });
        }
        let sets: Vec<BTreeSet<Pattern>> = (0..m as u32)
            .into_par_iter()
            .map(|root| {
                let mut set = BTreeSet::new();
                for_each_structure_with_root(depth, m, root, &mut |feats| {
                    collect_structure_patterns(depth, feats, data, budget, &mut set);
                });
                set
            })
            .collect();
        let mut merged = BTreeSet::new();
        for s in sets {
            merged.extend(s);
        }
        Some(merged)
    } else {
        None
    };

    Ok(TreeRashomonResult {
        total_models,
        rashomon_count: BigUint::from(rashomon_count),
        min_loss,
        mistake_budget: budget,
        patterns,
    })
}

/// Enumerate in-budget leaf labelings of one structure and insert their
/// prediction patterns.
fn collect_structure_patterns(
    d: usize,
    feats: &[u32],
    data: &Dataset,
    budget: usize,
    out: &mut BTreeSet<Pattern>,
) {
    let leaves = 1usize << d;
    let base = leaves - 1;
    // leaf membership and tallies in one pass
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); leaves];
    let mut tallies = vec![(0u32, 0u32); leaves];
    for i in 0..data.n() {
        let row = data.row(i);
        let mut v = 0usize;
        for _ in 0..d {
            let bit = row[feats[v] as usize] as usize;
            v = 2 * v + 1 + bit;
        }
        let leaf = v - base;
        members[leaf].push(i);
        if data.labels()[i] == 0 {
            tallies[leaf].0 += 1;
        } else {
            tallies[leaf].1 += 1;
        }
    }
    let min_mistakes = structure_min_mistakes(&tallies);
    if min_mistakes > budget {
        return;
    }
    let slack = budget - min_mistakes;
    // per leaf: (label, extra) options; majority first
    let options: Vec<[(u8, usize); 2]> = tallies
        .iter()
        .map(|&(c0, c1)| {
            let majority = (c1 >= c0) as u8;
            let regret = c0.abs_diff(c1) as usize;
            [(majority, 0usize), (1 - majority, regret)]
        })
        .collect();

    let mut bits = vec![0u8; data.n()];
    dfs_labelings(0, slack, &options, &members, &mut bits, out);
}

fn dfs_labelings(
    leaf: usize,
    slack_left: usize,
    options: &[[(u8, usize); 2]],
    members: &[Vec<usize>],
    bits: &mut Vec<u8>,
    out: &mut BTreeSet<Pattern>,
) {
    if leaf == options.len() {
        out.insert(Pattern::from_bits(bits));
        return;
    }
    for &(label, extra) in &options[leaf] {
        if extra > slack_left {
            continue;
        }
        for &i in &members[leaf] {
            bits[i] = label;
        }
        dfs_labelings(leaf + 1, slack_left - extra, options, members, bits, out);
    }
}

/// Exhaustive oracle: enumerate structures x labelings outright, count
/// models within the budget and collect their patterns. Only viable at
/// small depth; used to validate the DP.
pub fn exhaustive_rashomon_trees(
    data: &Dataset,
    depth: usize,
    config: &TreeEnumConfig,
) -> Result<TreeRashomonResult> {
    if !data.is_binary() {
        return Err(Error::NonBinaryData);
    }
    if depth > data.m() {
        return Err(Error::DepthExceedsFeatures { depth, m: data.m() });
    }
    let n = data.n();
    let m = data.m();
    let leaves = 1usize << depth;

    // leaf assignment per structure, then brute force every labeling
    let mut structures: Vec<Vec<usize>> = Vec::new(); // per-sample leaf index
    for_each_structure(depth, m, |feats| {
        let base = leaves - 1;
        let leaf_of: Vec<usize> = (0..n)
            .map(|i| {
                let row = data.row(i);
                let mut v = 0usize;
                for _ in 0..depth {
                    let bit = row[feats[v] as usize] as usize;
                    v = 2 * v + 1 + bit;
                }
                v - base
            })
            .collect();
        structures.push(leaf_of);
    });

    let mut global_min = usize::MAX;
    let mut losses: Vec<Vec<usize>> = Vec::with_capacity(structures.len());
    for leaf_of in &structures {
        let mut per_labeling = Vec::with_capacity(1 << leaves);
        for labeling in 0u32..(1u32 << leaves) {
            let mistakes = (0..n)
                .filter(|&i| {
                    let pred = (labeling >> leaf_of[i]) & 1;
                    pred as u8 != data.labels()[i]
                })
                .count();
            global_min = global_min.min(mistakes);
            per_labeling.push(mistakes);
        }
        losses.push(per_labeling);
    }
    let min_loss = global_min as f64 / n as f64;
    let threshold_loss = match config.theta_mode {
        ThetaMode::Additive => min_loss + config.theta,
        ThetaMode::Multiplicative => (1.0 + config.theta) * min_loss,
    };
    let budget = ((n as f64 * threshold_loss + 1e-9).floor() as usize).min(n);

    let mut count = 0u128;
    let mut patterns = BTreeSet::new();
    for (leaf_of, per_labeling) in structures.iter().zip(&losses) {
        for (labeling, &mistakes) in per_labeling.iter().enumerate() {
            if mistakes <= budget {
                count += 1;
                if config.collect_patterns {
                    let bits: Vec<u8> = (0..n)
                        .map(|i| ((labeling >> leaf_of[i]) & 1) as u8)
                        .collect();
                    patterns.insert(Pattern::from_bits(&bits));
                }
            }
        }
    }

    Ok(TreeRashomonResult {
        total_models: count_full_trees(depth, m)?,
        rashomon_count: BigUint::from(count),
        min_loss,
        mistake_budget: budget,
        patterns: config.collect_patterns.then_some(patterns),
    })
}
