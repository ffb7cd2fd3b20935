//! Pattern Rashomon sets for linear classifiers with intercept.
//!
//! The pipeline follows a two-step search: a discard pre-pass fixes samples
//! that no in-set model can misclassify, then a breadth-first branch and
//! bound over label prefixes enumerates every achievable pattern within the
//! mistake budget. Achievability of a prefix is decided by a logistic-loss
//! separator fit with a hard margin check; hitting the iteration cap counts
//! as unachievable, which can only shrink the result, never corrupt it.

use crate::data::Dataset;
use crate::loss::zero_one_risk;
use crate::pattern::Pattern;
use crate::special::{biguint_ratio, binomial_sum};
use crate::{Error, Result};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Linear model `w.x + b`; predicts class 1 on a non-negative margin.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn zeros(m: usize) -> Self {
        LinearModel {
            weights: vec![0.0; m],
            bias: 0.0,
        }
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(row)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        (self.margin(row) >= 0.0) as u8
    }

    pub fn predict_all(&self, d: &Dataset) -> Vec<u8> {
        (0..d.n()).map(|i| self.predict(d.row(i))).collect()
    }
}

/// Tuning for the gradient-descent oracles and the search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternSearchConfig {
    /// Iteration cap for each separator fit.
    pub max_iters: usize,
    /// Iteration budget for the exponential-loss discard solves.
    pub discard_iters: usize,
    /// Escalating-penalty rounds when the discard constraint is violated.
    pub penalty_rounds: usize,
    /// Hard cap on n for the branch-and-bound search.
    pub sample_cap: usize,
    /// Run the discard pre-pass before the search.
    pub use_discard: bool,
    /// When the discard witness overshoots the budget, try up to this many
    /// low-mistake candidate patterns that misclassify the sample before
    /// declaring it fixed; hitting the cap leaves the sample free.
    pub refute_cap: usize,
    /// Count the intercept inside the pattern-denominator dimension
    /// (the affine form of the dichotomy count); when false the
    /// homogeneous count with one dimension less is used.
    pub denominator_includes_intercept: bool,
}

impl Default for PatternSearchConfig {
    fn default() -> Self {
        PatternSearchConfig {
            max_iters: 20_000,
            discard_iters: 800,
            penalty_rounds: 4,
            sample_cap: 24,
            use_discard: true,
            refute_cap: 5000,
            denominator_includes_intercept: true,
        }
    }
}

fn signed_labels(y: &[u8]) -> Vec<f64> {
    y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect()
}

/// Outcome of a separator fit.
#[derive(Clone, Debug)]
pub enum Separability {
    /// A model classifying every point with strictly positive margin.
    Separated(LinearModel),
    /// The logistic objective converged to an interior minimum with a
    /// vanishing gradient relative to the loss, which a separable instance
    /// cannot produce: any separating direction keeps a gradient component
    /// proportional to the loss times the margin.
    ProvenInfeasible,
    /// Iteration cap reached without a verdict.
    Undecided,
}

/// Logistic-loss separator fit with a backtracking step (grown on success,
/// so separable instances separate quickly), optional warm start, an early
/// margin check and a gradient-ratio infeasibility certificate.
pub fn fit_separator(
    xs: &[&[f64]],
    y: &[u8],
    start: Option<&LinearModel>,
    config: &PatternSearchConfig,
) -> Separability {
    let k = xs.len();
    let m = xs.first().map_or(0, |r| r.len());
    if k == 0 {
        return Separability::Separated(LinearModel::zeros(m));
    }
    // a constant labeling is always achievable through the intercept
    if y.iter().all(|&v| v == y[0]) {
        let bias = if y[0] == 1 { 1.0 } else { -1.0 };
        return Separability::Separated(LinearModel {
            weights: vec![0.0; m],
            bias,
        });
    }
    let ys = signed_labels(y);
    let inv_k = 1.0 / k as f64;

    let loss_and_sep = |model: &LinearModel| -> (f64, bool) {
        let mut acc = 0.0;
        let mut separated = true;
        for (row, &yi) in xs.iter().zip(&ys) {
            let z = yi
                * (row
                    .iter()
                    .zip(&model.weights)
                    .map(|(x, w)| x * w)
                    .sum::<f64>()
                    + model.bias);
            if z <= 0.0 {
                separated = false;
            }
            // ln(1 + e^-z) without overflow for very negative z
            acc += if z > -30.0 { (-z).exp().ln_1p() } else { -z };
        }
        (acc * inv_k, separated)
    };

    // smoothness-safe base step: logistic curvature is at most |x~|^2 / 4
    let max_sq = xs
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .fold(0.0f64, f64::max);
    let mut lr = 4.0 / max_sq;

    let mut model = start.cloned().unwrap_or_else(|| LinearModel::zeros(m));
    let (mut current, mut separated) = loss_and_sep(&model);
    let mut stalled = 0u32;
    for _ in 0..config.max_iters {
        if separated {
            return Separability::Separated(model);
        }
        let mut gw = vec![0.0f64; m];
        let mut gb = 0.0f64;
        for (row, &yi) in xs.iter().zip(&ys) {
            let z = yi
                * (row
                    .iter()
                    .zip(&model.weights)
                    .map(|(x, w)| x * w)
                    .sum::<f64>()
                    + model.bias);
            let s = 1.0 / (1.0 + z.exp());
            for (g, x) in gw.iter_mut().zip(*row) {
                *g -= yi * s * x * inv_k;
            }
            gb -= yi * s * inv_k;
        }
        // a run of vanishing improvements means the iterate hovers at the
        // objective's floor: an interior minimum (gradient negligible
        // against the loss) proves the instance unseparable, while a large
        // residual gradient leaves the verdict open
        if stalled >= 30 {
            let grad_norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
            return if grad_norm <= 1e-7 * current.max(1e-300) {
                Separability::ProvenInfeasible
            } else {
                Separability::Undecided
            };
        }
        // backtracking keeps the descent monotone while the growing step
        // lets separable instances race to infinity
        let mut stepped = false;
        for _ in 0..60 {
            let trial = LinearModel {
                weights: model
                    .weights
                    .iter()
                    .zip(&gw)
                    .map(|(wi, gi)| wi - lr * gi)
                    .collect(),
                bias: model.bias - lr * gb,
            };
            let (lt, st) = loss_and_sep(&trial);
            if lt.is_finite() && lt <= current {
                if current - lt <= 1e-13 * current.max(1e-300) {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                model = trial;
                current = lt;
                separated = st;
                lr *= 2.0;
                stepped = true;
                break;
            }
            lr *= 0.5;
        }
        if !stepped {
            stalled = stalled.max(30);
        }
    }
    if separated {
        Separability::Separated(model)
    } else {
        Separability::Undecided
    }
}

/// True iff some linear model with intercept classifies every row of
/// (`xs`, `y`) correctly with strictly positive margin; an undecided fit
/// counts as unachievable.
pub fn achievable(xs: &[&[f64]], y: &[u8], config: &PatternSearchConfig) -> bool {
    matches!(
        fit_separator(xs, y, None, config),
        Separability::Separated(_)
    )
}

/// Fit a logistic-loss linear model (no separation requirement); used for
/// the empirical risk minimizer that anchors the search.
pub fn fit_logistic(d: &Dataset, config: &PatternSearchConfig) -> LinearModel {
    let ys = signed_labels(d.labels());
    let m = d.m();
    let n = d.n();
    let max_sq = (0..n)
        .map(|i| d.row(i).iter().map(|v| v * v).sum::<f64>() + 1.0)
        .fold(0.0f64, f64::max);
    let lr = 4.0 / max_sq;
    let mut model = LinearModel::zeros(m);
    for _ in 0..config.max_iters {
        let mut gw = vec![0.0f64; m];
        let mut gb = 0.0f64;
        for (i, &yi) in ys.iter().enumerate() {
            let row = d.row(i);
            let z = yi * model.margin(row);
            let s = 1.0 / (1.0 + z.exp());
            for (g, x) in gw.iter_mut().zip(row) {
                *g -= yi * s * x;
            }
            gb -= yi * s;
        }
        let inv_n = 1.0 / n as f64;
        for (wi, gi) in model.weights.iter_mut().zip(&gw) {
            *wi -= lr * gi * inv_n;
        }
        model.bias -= lr * gb * inv_n;
    }
    model
}

/// Exponential-loss descent with backtracking; optionally adds a quadratic
/// penalty `weight * max(0, y_k margin_k)^2` pushing sample `k` to the
/// wrong side of the boundary.
fn fit_exponential(
    d: &Dataset,
    ys: &[f64],
    penalty: Option<(usize, f64)>,
    iters: usize,
) -> Option<LinearModel> {
    let m = d.m();
    let n = d.n();
    let loss = |model: &LinearModel| -> f64 {
        let mut acc = 0.0;
        for (i, &yi) in ys.iter().enumerate() {
            acc += (-yi * model.margin(d.row(i))).exp();
        }
        acc /= n as f64;
        if let Some((k, weight)) = penalty {
            let viol = (ys[k] * model.margin(d.row(k))).max(0.0);
            acc += weight * viol * viol;
        }
        acc
    };

    let mut model = LinearModel::zeros(m);
    let mut current = loss(&model);
    let mut lr = 0.5;
    for _ in 0..iters {
        let mut gw = vec![0.0f64; m];
        let mut gb = 0.0f64;
        for (i, &yi) in ys.iter().enumerate() {
            let row = d.row(i);
            let e = (-yi * model.margin(row)).exp() / n as f64;
            for (g, x) in gw.iter_mut().zip(row) {
                *g -= yi * e * x;
            }
            gb -= yi * e;
        }
        if let Some((k, weight)) = penalty {
            let row = d.row(k);
            let viol = (ys[k] * model.margin(row)).max(0.0);
            if viol > 0.0 {
                for (g, x) in gw.iter_mut().zip(row) {
                    *g += 2.0 * weight * viol * ys[k] * x;
                }
                gb += 2.0 * weight * viol * ys[k];
            }
        }
        // backtracking keeps the convex descent monotone
        let mut stepped = false;
        for _ in 0..40 {
            let trial = LinearModel {
                weights: model
                    .weights
                    .iter()
                    .zip(&gw)
                    .map(|(w, g)| w - lr * g)
                    .collect(),
                bias: model.bias - lr * gb,
            };
            let l = loss(&trial);
            if !l.is_finite() {
                lr *= 0.5;
                continue;
            }
            if l <= current {
                model = trial;
                current = l;
                lr *= 1.2;
                stepped = true;
                break;
            }
            lr *= 0.5;
        }
        if !stepped {
            break;
        }
    }
    current.is_finite().then_some(model)
}

/// Discard pre-pass outcome: samples whose prediction is constant across
/// the whole Rashomon set, and the labels they are pinned to.
#[derive(Clone, Debug)]
pub struct DiscardResult {
    pub fixed_samples: Vec<usize>,
    pub free_samples: Vec<usize>,
    pub fixed_labels: Vec<u8>,
}

/// Mistake budget for `(erm_loss, theta)`: `ceil(n (erm_loss + theta))`,
/// guarded against float drift when the product is an exact integer.
pub fn mistake_budget(n: usize, erm_loss: f64, theta: f64) -> usize {
    (n as f64 * (erm_loss + theta) - 1e-9).ceil().max(0.0) as usize
}

/// For every sample, search for an in-space model that misclassifies it; if
/// the best such model found still violates the Rashomon mistake budget,
/// the sample is fixed to the reference model's prediction. Returns the
/// discard split plus the lowest 0-1 risk seen among all candidate models
/// (the pre-pass that anchors the threshold before enumeration).
pub fn discard_points(
    d: &Dataset,
    theta: f64,
    erm: &LinearModel,
    erm_loss: f64,
    config: &PatternSearchConfig,
) -> Result<(DiscardResult, f64)> {
    if theta < 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0,inf)",
        });
    }
    let n = d.n();
    let ys = signed_labels(d.labels());
    let erm_preds = erm.predict_all(d);

    // candidate per-sample models, in parallel
    let candidates: Vec<Option<(usize, bool)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            // flip sample k's label, then escalate a penalty until the model
            // actually misclassifies k on the original labels
            let mut flipped = ys.to_vec();
            flipped[k] = -flipped[k];
            let mut model = fit_exponential(d, &flipped, None, config.discard_iters)?;
            let mut weight = 10.0;
            for _ in 0..config.penalty_rounds {
                if ys[k] * model.margin(d.row(k)) <= 0.0 {
                    break;
                }
                model = fit_exponential(d, &flipped, Some((k, weight)), config.discard_iters)?;
                weight *= 10.0;
            }
            let preds = model.predict_all(d);
            let mistakes = preds.iter().zip(d.labels()).filter(|(p, y)| p != y).count();
            let misclassifies_k = preds[k] != d.labels()[k];
            Some((mistakes, misclassifies_k))
        })
        .collect();

    // the best mistake count discovered anywhere anchors the final threshold
    let mut best_mistakes = (erm_loss * n as f64).round() as usize;
    for c in candidates.iter().flatten() {
        best_mistakes = best_mistakes.min(c.0);
    }
    let best_risk = best_mistakes as f64 / n as f64;
    let budget = mistake_budget(n, best_risk, theta);

    // the sample is free as soon as any in-budget witness misclassifies it;
    // a witness overshooting the budget is not conclusive (the exponential
    // surrogate need not minimize mistakes), so back it up with an
    // exhaustive sweep of low-mistake refuter patterns through the same
    // achievability oracle. Hitting the sweep cap leaves the sample free,
    // the side that can only slow the search down, never lose patterns.
    let decisions: Vec<bool> = candidates
        .par_iter()
        .enumerate()
        .map(|(k, cand)| match cand {
            Some((mistakes, true)) if *mistakes <= budget => false,
            _ => !refuted_by_pattern_sweep(d, k, budget, config),
        })
        .collect();

    let mut fixed_samples = Vec::new();
    let mut free_samples = Vec::new();
    let mut fixed_labels = Vec::new();
    for (k, fixed) in decisions.iter().enumerate() {
        if *fixed {
            fixed_samples.push(k);
            fixed_labels.push(erm_preds[k]);
        } else {
            free_samples.push(k);
        }
    }
    Ok((
        DiscardResult {
            fixed_samples,
            free_samples,
            fixed_labels,
        },
        best_risk,
    ))
}

/// Advance `idx` to the next k-combination of `0..n` in lexicographic
/// order; false once exhausted.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Search for an achievable pattern that misclassifies sample `k` within
/// the mistake budget: the candidates flip `k` plus up to `budget - 1`
/// other labels, visited in increasing mistake order. Returns true when a
/// refuter is found or the candidate cap is reached (inconclusive counts
/// as refuted so the sample stays free).
fn refuted_by_pattern_sweep(
    d: &Dataset,
    k: usize,
    budget: usize,
    config: &PatternSearchConfig,
) -> bool {
    if budget == 0 {
        return false;
    }
    let n = d.n();
    let rows: Vec<&[f64]> = (0..n).map(|i| d.row(i)).collect();
    let mut bits = d.labels().to_vec();
    bits[k] ^= 1;
    let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let mut tried = 0usize;

    for size in 0..budget {
        if size > others.len() {
            break;
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            for &i in &idx {
                bits[others[i]] ^= 1;
            }
            tried += 1;
            let hit = achievable(&rows, &bits, config);
            for &i in &idx {
                bits[others[i]] ^= 1;
            }
            if hit || tried >= config.refute_cap {
                return true;
            }
            if size == 0 || !next_combination(&mut idx, others.len()) {
                break;
            }
        }
    }
    false
}

/// Order the free samples for the search: split into TP/FP/TN/FN by the
/// reference model, sort each class by distance to the boundary, then cycle
/// TP, FP, TN, FN taking one from each non-empty class until exhausted.
pub fn order_samples(free: &[usize], erm: &LinearModel, d: &Dataset) -> Vec<usize> {
    let mut buckets: [Vec<(f64, usize)>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    let norm = erm
        .weights
        .iter()
        .map(|w| w * w)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for &i in free {
        let margin = erm.margin(d.row(i));
        let pred = (margin >= 0.0) as u8;
        let label = d.labels()[i];
        let bucket = match (pred, label) {
            (1, 1) => 0, // TP
            (1, 0) => 1, // FP
            (0, 0) => 2, // TN
            (0, 1) => 3, // FN
            _ => unreachable!(),
        };
        buckets[bucket].push((margin.abs() / norm, i));
    }
    for b in buckets.iter_mut() {
        b.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    }
    let mut order = Vec::with_capacity(free.len());
    let mut cursors = [0usize; 4];
    while order.len() < free.len() {
        for (c, bucket) in cursors.iter_mut().zip(&buckets) {
            if *c < bucket.len() {
                order.push(bucket[*c].1);
                *c += 1;
            }
        }
    }
    order
}

/// Pattern Rashomon set result.
#[derive(Clone, Debug)]
pub struct PatternSetResult {
    pub patterns: BTreeSet<Pattern>,
    pub erm_loss: f64,
    pub theta: f64,
    /// Mistake budget used by the search: `ceil(n (erm_loss + theta))`.
    pub mistake_budget: usize,
    /// Count of all patterns achievable by the hypothesis space.
    pub denominator: BigUint,
}

impl PatternSetResult {
    pub fn pattern_ratio(&self) -> f64 {
        biguint_ratio(
            &BigUint::from(self.patterns.len() as u64),
            &self.denominator,
        )
    }

    /// Loss slack actually granted by the integer budget.
    pub fn effective_theta(&self, n: usize) -> f64 {
        self.mistake_budget as f64 / n as f64 - self.erm_loss
    }
}

/// Number of distinct prediction patterns linear models can realize on `n`
/// points in general position in `m` dimensions:
/// `2 * sum_{i=0..m} C(n-1, i)`.
pub fn cover_pattern_count(n: usize, m: usize) -> BigUint {
    assert!(n >= 1, "cover count needs at least one sample");
    BigUint::from(2u32) * binomial_sum(n as u64 - 1, 0, m as u64)
}

/// Breadth-first branch and bound over label prefixes: fixed samples first
/// with their pinned labels, then the ordered free samples. A prefix
/// survives iff it is achievable and its mistakes against the true labels
/// stay within the budget; the survivors of the last level are the pattern
/// Rashomon set.
pub fn branch_and_bound_patterns(
    d: &Dataset,
    theta: f64,
    config: &PatternSearchConfig,
) -> Result<PatternSetResult> {
    if theta < 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0,inf)",
        });
    }
    let n = d.n();
    if n > config.sample_cap {
        return Err(Error::SampleCapExceeded {
            n,
            cap: config.sample_cap,
        });
    }

    let erm = fit_logistic(d, config);
    let erm_risk = zero_one_risk(&erm.predict_all(d), d.labels())?;

    let (discard, erm_loss) = if config.use_discard {
        discard_points(d, theta, &erm, erm_risk, config)?
    } else {
        (
            DiscardResult {
                fixed_samples: Vec::new(),
                free_samples: (0..n).collect(),
                fixed_labels: Vec::new(),
            },
            erm_risk,
        )
    };

    let budget = mistake_budget(n, erm_loss, theta);
    let ordered_free = order_samples(&discard.free_samples, &erm, d);
    let mut order: Vec<usize> = discard.fixed_samples.clone();
    order.extend(&ordered_free);

    // prefix layout: labels assigned in `order`; mistakes tracked vs truth.
    // Each surviving prefix carries the separator that witnessed it (when
    // one is known): children first try the parent witness, then refit
    // warm-started from it. Only a proven-infeasible fit prunes a branch;
    // an undecided fit keeps it alive for the decisive final check.
    struct Node {
        labels: Vec<u8>,
        mistakes: usize,
        witness: Option<LinearModel>,
    }
    let root_mistakes = discard
        .fixed_samples
        .iter()
        .zip(&discard.fixed_labels)
        .filter(|(&i, &l)| d.labels()[i] != l)
        .count();
    let mut queue = vec![Node {
        labels: discard.fixed_labels.clone(),
        mistakes: root_mistakes,
        witness: None,
    }];

    for level in discard.fixed_samples.len()..n {
        let sample = order[level];
        let truth = d.labels()[sample];
        let rows: Vec<&[f64]> = order[..=level].iter().map(|&i| d.row(i)).collect();
        let next: Vec<Node> = queue
            .par_iter()
            .flat_map_iter(|node| {
                let mut out = Vec::with_capacity(2);
                for bit in [0u8, 1u8] {
                    let mistakes = node.mistakes + (bit != truth) as usize;
                    if mistakes > budget {
                        continue;
                    }
                    let mut labels = node.labels.clone();
                    labels.push(bit);
                    // the parent witness already separates the prefix; it
                    // settles the child when it classifies the new point
                    if let Some(wit) = &node.witness {
                        let margin = wit.margin(d.row(sample));
                        let signed = if bit == 1 { margin } else { -margin };
                        if signed > 0.0 {
                            out.push(Node {
                                labels,
                                mistakes,
                                witness: node.witness.clone(),
                            });
                            continue;
                        }
                    }
                    match fit_separator(&rows, &labels, node.witness.as_ref(), config) {
                        Separability::Separated(model) => out.push(Node {
                            labels,
                            mistakes,
                            witness: Some(model),
                        }),
                        Separability::Undecided => out.push(Node {
                            labels,
                            mistakes,
                            witness: None,
                        }),
                        Separability::ProvenInfeasible => {}
                    }
                }
                out
            })
            .collect();
        queue = next;
        if queue.is_empty() {
            break;
        }
    }

    // decisive re-verification of full patterns (cold start, cap counts as
    // unachievable), mapped back to the original sample order
    let rows: Vec<&[f64]> = order.iter().map(|&i| d.row(i)).collect();
    let mut patterns = BTreeSet::new();
    for node in &queue {
        if node.labels.len() != n || node.mistakes > budget {
            continue;
        }
        if !achievable(&rows, &node.labels, config) {
            continue;
        }
        let mut bits = vec![0u8; n];
        for (pos, &sample) in order.iter().enumerate() {
            bits[sample] = node.labels[pos];
        }
        patterns.insert(Pattern::from_bits(&bits));
    }

    let denom_dim = if config.denominator_includes_intercept {
        d.m()
    } else {
        d.m().saturating_sub(1)
    };
    Ok(PatternSetResult {
        patterns,
        erm_loss,
        theta,
        mistake_budget: budget,
        denominator: cover_pattern_count(n, denom_dim),
    })
}

/// Exhaustive oracle: filter all 2^n labelings by achievability and the
/// same mistake budget the search uses. Exponential; test scale only.
pub fn exhaustive_pattern_set(
    d: &Dataset,
    erm_loss: f64,
    theta: f64,
    config: &PatternSearchConfig,
) -> BTreeSet<Pattern> {
    let n = d.n();
    let budget = mistake_budget(n, erm_loss, theta);
    let rows: Vec<&[f64]> = (0..n).map(|i| d.row(i)).collect();
    let truth = d.labels();
    let candidates: Vec<u64> = (0u64..(1u64 << n))
        .filter(|&code| {
            let mistakes = (0..n)
                .filter(|&i| ((code >> i) & 1) as u8 != truth[i])
                .count();
            mistakes <= budget
        })
        .collect();
    candidates
        .into_par_iter()
        .filter_map(|code| {
            let bits: Vec<u8> = (0..n).map(|i| ((code >> i) & 1) as u8).collect();
            achievable(&rows, &bits, config).then(|| Pattern::from_bits(&bits))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn line_dataset() -> Dataset {
        Dataset::new(
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![0, 0, 1, 1],
            vec!["x".into()],
        )
        .unwrap()
    }

    fn cfg() -> PatternSearchConfig {
        PatternSearchConfig::default()
    }

    /// All patterns a 1-D threshold model (either orientation) can realize.
    fn one_d_threshold_patterns(xs: &[f64]) -> BTreeSet<Vec<u8>> {
        let mut out = BTreeSet::new();
        let mut cuts: Vec<f64> = vec![xs.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0];
        let mut sorted = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            cuts.push((w[0] + w[1]) / 2.0);
        }
        cuts.push(sorted.last().unwrap() + 1.0);
        for cut in cuts {
            out.insert(xs.iter().map(|&x| (x > cut) as u8).collect());
            out.insert(xs.iter().map(|&x| (x < cut) as u8).collect());
        }
        out
    }

    #[test]
    fn achievable_one_dimensional_cases() {
        let d = line_dataset();
        let rows: Vec<&[f64]> = (0..4).map(|i| d.row(i)).collect();
        assert!(achievable(&rows, &[0, 0, 1, 1], &cfg()));
        assert!(achievable(&rows, &[1, 1, 0, 0], &cfg()));
        assert!(achievable(&rows, &[0, 0, 0, 0], &cfg()));
        assert!(achievable(&rows, &[1, 1, 1, 1], &cfg()));
        // alternating labels are not linearly separable in 1-D; the
        // exhaustive threshold oracle agrees
        assert!(!achievable(&rows, &[0, 1, 0, 1], &cfg()));
        let oracle = one_d_threshold_patterns(&[1.0, 2.0, 3.0, 4.0]);
        assert!(!oracle.contains(&vec![0u8, 1, 0, 1]));
        for pattern in 0u8..16 {
            let bits: Vec<u8> = (0..4).map(|i| (pattern >> i) & 1).collect();
            assert_eq!(
                achievable(&rows, &bits, &cfg()),
                oracle.contains(&bits),
                "pattern {bits:?}"
            );
        }
    }

    #[test]
    fn discard_line_example() {
        let d = line_dataset();
        let erm = fit_logistic(&d, &cfg());
        let erm_risk = zero_one_risk(&erm.predict_all(&d), d.labels()).unwrap();
        assert_eq!(erm_risk, 0.0);
        let (res, best) = discard_points(&d, 0.25, &erm, erm_risk, &cfg()).unwrap();
        assert_eq!(best, 0.0);
        assert_eq!(res.fixed_samples, vec![0, 3]);
        assert_eq!(res.free_samples, vec![1, 2]);
        assert_eq!(res.fixed_labels, vec![0, 1]);
    }

    #[test]
    fn discard_theta_zero_fixes_everything_separable() {
        let d = line_dataset();
        let erm = fit_logistic(&d, &cfg());
        let (res, _) = discard_points(&d, 0.0, &erm, 0.0, &cfg()).unwrap();
        // the budget is zero mistakes: no model may misclassify sample 1
        // (or any other) and stay in the set
        assert_eq!(res.fixed_samples, vec![0, 1, 2, 3]);
        assert!(res.free_samples.is_empty());
        assert_eq!(res.fixed_labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn discard_huge_theta_fixes_nothing() {
        let d = line_dataset();
        let erm = fit_logistic(&d, &cfg());
        let (res, _) = discard_points(&d, 1.0, &erm, 0.0, &cfg()).unwrap();
        assert!(res.fixed_samples.is_empty());
        assert_eq!(res.free_samples, vec![0, 1, 2, 3]);
    }

    #[test]
    fn order_cycles_categories() {
        // model: predicts 1 iff x >= 0; distances |x|
        let d = Dataset::new(
            vec![vec![0.5], vec![0.1], vec![-0.3]],
            vec![1, 1, 1],
            vec!["x".into()],
        )
        .unwrap();
        let model = LinearModel {
            weights: vec![1.0],
            bias: 0.0,
        };
        // TP at 0.5, TP at 0.1, FN at 0.3
        let order = order_samples(&[0, 1, 2], &model, &d);
        assert_eq!(order, vec![1, 2, 0]);

        // all TP: plain ascending distance
        let d2 = Dataset::new(
            vec![vec![3.0], vec![1.0], vec![2.0]],
            vec![1, 1, 1],
            vec!["x".into()],
        )
        .unwrap();
        assert_eq!(order_samples(&[0, 1, 2], &model, &d2), vec![1, 2, 0]);

        // one sample per category cycles TP, FP, TN, FN
        let d3 = Dataset::new(
            vec![vec![1.0], vec![2.0], vec![-1.0], vec![-2.0]],
            vec![1, 0, 0, 1],
            vec!["x".into()],
        )
        .unwrap();
        assert_eq!(order_samples(&[0, 1, 2, 3], &model, &d3), vec![0, 1, 2, 3]);
    }

    #[test]
    fn line_example_three_patterns() {
        let d = line_dataset();
        let res = branch_and_bound_patterns(&d, 0.25, &cfg()).unwrap();
        let got: Vec<Vec<u8>> = res.patterns.iter().map(|p| p.bits()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0, 0, 1], vec![0, 0, 1, 1], vec![0, 1, 1, 1]]
        );
        assert_eq!(res.erm_loss, 0.0);
        assert_eq!(res.mistake_budget, 1);
        // denominator: n=4, m=1 with intercept -> 2 * (C(3,0)+C(3,1)) = 8
        assert_eq!(res.denominator, BigUint::from(8u32));
    }

    #[test]
    fn theta_zero_separable_unique_pattern() {
        let d = line_dataset();
        let res = branch_and_bound_patterns(&d, 0.0, &cfg()).unwrap();
        assert_eq!(res.patterns.len(), 1);
        assert_eq!(res.patterns.iter().next().unwrap().bits(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn matches_exhaustive_filter_on_random_data() {
        let mut rng = crate::rng::master(4242);
        for case in 0..12 {
            let n = rng.gen_range(5..=10);
            let m = rng.gen_range(1..=3);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect();
            let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let d = Dataset::new(rows, labels, (0..m).map(|j| format!("x{j}")).collect()).unwrap();
            let theta = [0.1, 0.2][case % 2];
            let res = branch_and_bound_patterns(&d, theta, &cfg()).unwrap();
            let oracle = exhaustive_pattern_set(&d, res.erm_loss, theta, &cfg());
            assert_eq!(res.patterns, oracle, "case {case}");
        }
    }

    #[test]
    fn monotone_in_theta_and_discard_sound() {
        let mut rng = crate::rng::master(99);
        let n = 8;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let d = Dataset::new(rows, labels, vec!["a".into(), "b".into()]).unwrap();
        let small = branch_and_bound_patterns(&d, 0.05, &cfg()).unwrap();
        let large = branch_and_bound_patterns(&d, 0.3, &cfg()).unwrap();
        assert!(small.patterns.is_subset(&large.patterns));

        // no returned pattern may disagree with the fixed labels
        let erm = fit_logistic(&d, &cfg());
        let erm_risk = zero_one_risk(&erm.predict_all(&d), d.labels()).unwrap();
        let (disc, _) = discard_points(&d, 0.05, &erm, erm_risk, &cfg()).unwrap();
        for p in &small.patterns {
            for (&s, &l) in disc.fixed_samples.iter().zip(&disc.fixed_labels) {
                assert_eq!(p.get(s), l);
            }
        }
    }

    #[test]
    fn budget_and_count_bound_hold() {
        let d = line_dataset();
        let res = branch_and_bound_patterns(&d, 0.25, &cfg()).unwrap();
        let label_pattern = Pattern::from_bits(d.labels());
        let bound = binomial_sum(4, 1, res.mistake_budget as u64) + BigUint::from(1u32);
        assert!(BigUint::from(res.patterns.len() as u64) <= bound);
        for p in &res.patterns {
            assert!(p.mistakes(&label_pattern).unwrap() <= res.mistake_budget);
        }
    }

    #[test]
    fn cover_count_values() {
        assert_eq!(cover_pattern_count(4, 2), BigUint::from(14u32));
        assert_eq!(cover_pattern_count(3, 1), BigUint::from(6u32));
        // m >= n-1 saturates at 2^n
        assert_eq!(cover_pattern_count(5, 4), BigUint::from(32u32));
        assert_eq!(cover_pattern_count(5, 9), BigUint::from(32u32));
    }

    #[test]
    fn sample_cap_enforced() {
        let bits: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let labels: Vec<u8> = (0..30).map(|i| (i >= 15) as u8).collect();
        let d = Dataset::new(bits, labels, vec!["x".into()]).unwrap();
        assert!(matches!(
            branch_and_bound_patterns(&d, 0.1, &cfg()),
            Err(Error::SampleCapExceeded { .. })
        ));
    }
}
