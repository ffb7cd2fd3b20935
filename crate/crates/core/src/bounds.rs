//! Closed-form evaluators for the noise/variance/generalization results,
//! plus Monte Carlo validators.

use crate::data::Dataset;
use crate::loss::zero_one_risk;
use crate::noise::{flip_labels_uniform, gen_gaussian_pair, margin_shift, GaussianPairSpec};
use crate::special::normal_cdf;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Risk of a fixed model after uniform label noise: `(1 - 2 rho) L + rho`.
pub fn noisy_risk(l: f64, rho: f64) -> f64 {
    (1.0 - 2.0 * rho) * l + rho
}

/// Variance of the per-sample 0-1 loss under uniform label noise:
/// `(1 - 2 rho)^2 L (1 - L) + rho (1 - rho)`; strictly increasing in rho
/// for L != 1/2.
pub fn loss_variance_under_noise(l: f64, rho: f64) -> f64 {
    (1.0 - 2.0 * rho).powi(2) * l * (1.0 - l) + rho * (1.0 - rho)
}

/// Risk of a linear model on a balanced pair of identity-covariance
/// Gaussians whose positive mean is contracted by `k`:
/// `1/2 [Phi(r1) + 1 - Phi(r2)]` with `r1 = b/|w|`,
/// `r2 = (w.(k mu) + b)/|w|`.
pub fn margin_noise_risk(w: &[f64], b: f64, mu: &[f64], k: f64) -> Result<f64> {
    if w.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            got: w.len(),
        });
    }
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::OutOfRange {
            name: "w",
            value: 0.0,
            range: "non-zero vector",
        });
    }
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            range: "(0,1]",
        });
    }
    let r1 = b / norm;
    let dot: f64 = w.iter().zip(mu).map(|(wi, mi)| wi * k * mi).sum();
    let r2 = (dot + b) / norm;
    Ok(0.5 * (normal_cdf(r1) + 1.0 - normal_cdf(r2)))
}

/// Inputs to the variance-based generalization bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Sample count.
    pub n: u64,
    /// Size of the (true) Rashomon set, or a covering number for
    /// continuous spaces.
    pub rset_size: f64,
    /// Confidence parameter in (0,1).
    pub delta: f64,
    /// Maximum loss variance over the set.
    pub sigma_sq: f64,
    /// Loss ceiling: 1 for 0-1 loss, C^2 for squared loss bounded by C^2.
    pub c_loss: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::OutOfRange {
                name: "n",
                value: self.n as f64,
                range: ">= 1",
            });
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: self.delta,
                range: "(0,1)",
            });
        }
        if self.rset_size < 1.0 {
            return Err(Error::OutOfRange {
                name: "rset_size",
                value: self.rset_size,
                range: ">= 1",
            });
        }
        if self.sigma_sq < 0.0 {
            return Err(Error::OutOfRange {
                name: "sigma_sq",
                value: self.sigma_sq,
                range: "[0,inf)",
            });
        }
        Ok(())
    }
}

/// Bernstein-union generalization gap holding with probability `1 - delta`
/// simultaneously over the set:
/// `(2 c / 3n) ln(|R|/delta) + sqrt(2 sigma^2 ln(|R|/delta) / n)`.
pub fn bernstein_generalization_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let log_term = (b.rset_size / b.delta).ln();
    Ok(2.0 * b.c_loss / (3.0 * b.n as f64) * log_term
        + (2.0 * b.sigma_sq * log_term / b.n as f64).sqrt())
}

/// True iff the Bernstein tail dominates the Hoeffding tail for every
/// epsilon in (0, b - a): `sigma^2 <= (b - a)^2 / 12`.
pub fn bernstein_beats_hoeffding(sigma_sq: f64, a: f64, b_hi: f64) -> Result<bool> {
    if a >= b_hi {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            range: "a < b",
        });
    }
    Ok(sigma_sq <= (b_hi - a).powi(2) / 12.0)
}

/// Tail exponents (without the common factor n) of the two inequalities
/// for a loss recentered to `[-(b-a)/2, (b-a)/2]`, usable to check
/// dominance numerically on an epsilon grid.
pub fn tail_exponents(sigma_sq: f64, a: f64, b_hi: f64, eps: f64) -> (f64, f64) {
    let range = b_hi - a;
    let bernstein = 2.0 * eps * eps / (4.0 * sigma_sq + 2.0 * range * eps / 3.0);
    let hoeffding = 2.0 * eps * eps / (range * range);
    (bernstein, hoeffding)
}

/// ERM-in-true-set condition: holds iff `xi + eps <= gamma`; the probability
/// floor is `max(0, 1 - exp(-2 n eps^2) - eps_xi)`.
pub fn erm_in_true_set_condition(
    xi: f64,
    eps: f64,
    gamma: f64,
    n: u64,
    eps_xi: f64,
) -> Result<(bool, f64)> {
    for (name, v) in [("xi", xi), ("eps", eps), ("gamma", gamma)] {
        if v < 0.0 {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "[0,inf)",
            });
        }
    }
    if !(0.0..=1.0).contains(&eps_xi) {
        return Err(Error::OutOfRange {
            name: "eps_xi",
            value: eps_xi,
            range: "[0,1]",
        });
    }
    let holds = xi + eps <= gamma;
    let floor = (1.0 - (-2.0 * n as f64 * eps * eps).exp() - eps_xi).max(0.0);
    Ok((holds, floor))
}

/// What the Monte Carlo variance check validates.
#[derive(Clone, Debug)]
pub enum VarianceCheckSetup {
    /// Uniform label flips at the given rho levels applied to a fixed
    /// dataset, evaluating a fixed prediction vector.
    LabelFlip {
        data: Dataset,
        predictions: Vec<u8>,
        levels: Vec<f64>,
    },
    /// Margin noise: data redrawn per draw from the Gaussian pair with the
    /// positive mean contracted by each k level (levels sorted by
    /// increasing noise means decreasing k), evaluating a fixed linear
    /// model.
    Margin {
        pair: GaussianPairSpec,
        weights: Vec<f64>,
        bias: f64,
        levels: Vec<f64>,
    },
}

/// Per-level outcome of the Monte Carlo variance check.
#[derive(Clone, Debug, Serialize)]
pub struct VarianceLevelReport {
    pub level: f64,
    pub closed_form: f64,
    pub empirical: f64,
    pub standard_error: f64,
    pub within_3_se: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceReport {
    pub levels: Vec<VarianceLevelReport>,
    /// Empirical variances strictly increase across the level list.
    pub strictly_increasing: bool,
}

/// Estimate the per-sample loss variance at every noise level and compare
/// against the applicable closed form; also check the increase across
/// levels.
pub fn monte_carlo_variance_check(
    setup: &VarianceCheckSetup,
    draws: usize,
    seed: u64,
) -> Result<VarianceReport> {
    if draws < 100 {
        return Err(Error::OutOfRange {
            name: "draws",
            value: draws as f64,
            range: ">= 100",
        });
    }
    let levels = match setup {
        VarianceCheckSetup::LabelFlip { levels, .. } => levels,
        VarianceCheckSetup::Margin { levels, .. } => levels,
    };
    if levels.len() < 2 {
        return Err(Error::OutOfRange {
            name: "levels",
            value: levels.len() as f64,
            range: ">= 2 levels",
        });
    }

    let mut reports = Vec::with_capacity(levels.len());
    for (li, &level) in levels.iter().enumerate() {
        let (closed, per_draw) = match setup {
            VarianceCheckSetup::LabelFlip {
                data,
                predictions,
                levels: _,
            } => {
                if predictions.len() != data.n() {
                    return Err(Error::LengthMismatch {
                        expected: data.n(),
                        got: predictions.len(),
                    });
                }
                let clean = zero_one_risk(predictions, data.labels())?;
                let closed = loss_variance_under_noise(clean, level);
                let per_draw: Vec<(f64, f64)> = (0..draws)
                    .map(|t| {
                        let s = crate::rng::derive_seed(seed, &[li as u64, t as u64]);
                        let noisy = flip_labels_uniform(data, level, s).unwrap();
                        moments_01(predictions, noisy.labels())
                    })
                    .collect();
                (closed, per_draw)
            }
            VarianceCheckSetup::Margin {
                pair,
                weights,
                bias,
                levels: _,
            } => {
                if weights.len() != pair.dims {
                    return Err(Error::ModelMismatch(
                        "margin noise needs a linear model matching the pair dimension".into(),
                    ));
                }
                let shifted = margin_shift(pair, level)?;
                let closed_risk = margin_noise_risk(weights, *bias, &pair.mu_pos, level)?;
                let closed = closed_risk * (1.0 - closed_risk);
                let per_draw: Vec<(f64, f64)> = (0..draws)
                    .map(|t| {
                        let mut spec = shifted.clone();
                        spec.seed = crate::rng::derive_seed(seed, &[li as u64, t as u64]);
                        let data = gen_gaussian_pair(&spec).unwrap();
                        let preds: Vec<u8> = (0..data.n())
                            .map(|i| {
                                let margin: f64 = data
                                    .row(i)
                                    .iter()
                                    .zip(weights)
                                    .map(|(x, w)| x * w)
                                    .sum::<f64>()
                                    + bias;
                                (margin >= 0.0) as u8
                            })
                            .collect();
                        moments_01(&preds, data.labels())
                    })
                    .collect();
                (closed, per_draw)
            }
        };

        // pooled variance across all draws and samples; SE from the spread
        // of the per-draw estimates
        let mean: f64 = per_draw.iter().map(|(m, _)| m).sum::<f64>() / draws as f64;
        let pooled_second: f64 = per_draw.iter().map(|(_, s)| s).sum::<f64>() / draws as f64;
        let empirical = pooled_second - mean * mean;
        let per_draw_vars: Vec<f64> = per_draw.iter().map(|(m, s)| s - m * m).collect();
        let spread = {
            let mu = per_draw_vars.iter().sum::<f64>() / draws as f64;
            (per_draw_vars.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (draws as f64 - 1.0))
                .sqrt()
        };
        let standard_error = (spread / (draws as f64).sqrt()).max(1e-12);
        reports.push(VarianceLevelReport {
            level,
            closed_form: closed,
            empirical,
            standard_error,
            within_3_se: (empirical - closed).abs() <= 3.0 * standard_error,
        });
    }

    let strictly_increasing = reports.windows(2).all(|w| w[1].empirical > w[0].empirical);
    Ok(VarianceReport {
        levels: reports,
        strictly_increasing,
    })
}

/// First and second moment of the 0-1 loss of `pred` against `labels`.
fn moments_01(pred: &[u8], labels: &[u8]) -> (f64, f64) {
    let n = labels.len() as f64;
    let mistakes = pred.iter().zip(labels).filter(|(p, y)| p != y).count() as f64;
    // losses are 0/1 so the second moment equals the first
    (mistakes / n, mistakes / n)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::noise::gen_single_feature_truth;
    use rand::Rng;

    #[test]
    fn noisy_risk_values() {
        assert_eq!(noisy_risk(0.3, 0.0), 0.3);
        assert_eq!(noisy_risk(0.5, 0.17), 0.5);
        assert!((noisy_risk(0.2, 0.25) - 0.35).abs() < 1e-15);
        // affine and order preserving in L, unique fixed point 1/2
        for rho in [0.1, 0.3, 0.45] {
            let mut prev = f64::NEG_INFINITY;
            for l10 in 0..=10 {
                let v = noisy_risk(l10 as f64 / 10.0, rho);
                assert!(v > prev);
                prev = v;
            }
            assert!((noisy_risk(0.5, rho) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn variance_values_and_monotonicity() {
        assert!((loss_variance_under_noise(0.2, 0.0) - 0.16).abs() < 1e-15);
        assert!((loss_variance_under_noise(0.2, 0.1) - 0.1924).abs() < 1e-15);
        assert!((loss_variance_under_noise(0.2, 0.2) - 0.2176).abs() < 1e-15);
        for l in [0.0, 0.1, 0.3, 0.49, 0.7] {
            let mut prev = f64::NEG_INFINITY;
            let mut rho = 0.0;
            let increasing = l != 0.5;
            while rho < 0.5 {
                let v = loss_variance_under_noise(l, rho);
                if increasing && rho > 0.0 {
                    assert!(v > prev, "L={l} rho={rho}");
                }
                prev = v;
                rho += 0.01;
            }
        }
        // at L = 1/2 the variance is flat in rho
        assert!(
            (loss_variance_under_noise(0.5, 0.1) - loss_variance_under_noise(0.5, 0.3)).abs()
                < 1e-15
        );
    }

    #[test]
    fn margin_risk_values() {
        let r = margin_noise_risk(&[1.0], 0.0, &[2.0], 1.0).unwrap();
        assert!((r - 0.2613750659740896).abs() < 1e-10);
        // k -> 0+ makes the classes coincide: risk -> 1/2
        let r = margin_noise_risk(&[1.0], 0.0, &[2.0], 1e-9).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
        // strictly decreasing in k when w.mu > 0
        let mut prev = 1.0;
        for k10 in 1..=10 {
            let k = k10 as f64 / 10.0;
            let r = margin_noise_risk(&[1.0, 0.5], 0.1, &[2.0, 1.0], k).unwrap();
            assert!(r < prev, "k={k}");
            prev = r;
        }
        assert!(margin_noise_risk(&[0.0], 0.0, &[1.0], 1.0).is_err());
        assert!(margin_noise_risk(&[1.0], 0.0, &[1.0], 0.0).is_err());
    }

    #[test]
    fn margin_risk_matches_monte_carlo() {
        let mut rng = crate::rng::master(808);
        for case in 0..20 {
            let m = 2;
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            if w.iter().all(|&v| v.abs() < 1e-3) {
                continue;
            }
            let b: f64 = rng.gen_range(-0.5..0.5);
            let mu: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.5)).collect();
            let k: f64 = rng.gen_range(0.2..1.0);
            let closed = margin_noise_risk(&w, b, &mu, k).unwrap();

            let spec = GaussianPairSpec {
                dims: m,
                mu_neg: vec![0.0; m],
                mu_pos: mu.iter().map(|&v| k * v).collect(),
                n_per_class: 50_000,
                seed: 9000 + case,
            };
            let data = gen_gaussian_pair(&spec).unwrap();
            let mut mistakes = 0usize;
            for i in 0..data.n() {
                let margin: f64 = data
                    .row(i)
                    .iter()
                    .zip(&w)
                    .map(|(x, wi)| x * wi)
                    .sum::<f64>()
                    + b;
                let pred = (margin >= 0.0) as u8;
                mistakes += (pred != data.labels()[i]) as usize;
            }
            let est = mistakes as f64 / data.n() as f64;
            let se = (closed * (1.0 - closed) / data.n() as f64).sqrt().max(1e-9);
            assert!(
                (est - closed).abs() <= 3.5 * se,
                "case {case}: est {est} closed {closed} se {se}"
            );
        }
    }

    #[test]
    fn bernstein_bound_values() {
        let b = BoundInputs {
            n: 100,
            rset_size: 10.0,
            delta: 0.05,
            sigma_sq: 0.25,
            c_loss: 1.0,
        };
        let v = bernstein_generalization_bound(&b).unwrap();
        assert!((v - 0.19808447884885984).abs() < 1e-12);
        // sigma = 0 leaves only the fast term
        let b0 = BoundInputs { sigma_sq: 0.0, ..b };
        let ln200 = 200f64.ln();
        assert!((bernstein_generalization_bound(&b0).unwrap() - 2.0 / 300.0 * ln200).abs() < 1e-12);
    }

    #[test]
    fn bernstein_bound_monotonicities() {
        let base = BoundInputs {
            n: 200,
            rset_size: 50.0,
            delta: 0.05,
            sigma_sq: 0.1,
            c_loss: 1.0,
        };
        let v = bernstein_generalization_bound(&base).unwrap();
        for sigma in [0.15, 0.2, 0.3] {
            let b = BoundInputs {
                sigma_sq: sigma,
                ..base
            };
            assert!(bernstein_generalization_bound(&b).unwrap() > v);
        }
        for rset in [100.0, 1000.0] {
            let b = BoundInputs {
                rset_size: rset,
                ..base
            };
            assert!(bernstein_generalization_bound(&b).unwrap() > v);
        }
        for n in [400, 1000] {
            let b = BoundInputs { n, ..base };
            assert!(bernstein_generalization_bound(&b).unwrap() < v);
        }
        for delta in [0.1, 0.5] {
            let b = BoundInputs { delta, ..base };
            assert!(bernstein_generalization_bound(&b).unwrap() < v);
        }
        assert!(bernstein_generalization_bound(&BoundInputs { delta: 1.5, ..base }).is_err());
    }

    #[test]
    fn regime_predicate_and_exponents() {
        assert!(bernstein_beats_hoeffding(1.0 / 12.0, 0.0, 1.0).unwrap());
        assert!(!bernstein_beats_hoeffding(0.25, 0.0, 1.0).unwrap());
        assert!(!bernstein_beats_hoeffding(1.0 / 12.0 + 1e-12, 0.0, 1.0).unwrap());
        assert!(bernstein_beats_hoeffding(1.0, 0.0, 4.0).unwrap());
        assert!(bernstein_beats_hoeffding(0.02, 0.0, 1.0).unwrap());
        for eps10 in 1..=9 {
            let eps = eps10 as f64 / 10.0;
            let (bern, hoeff) = tail_exponents(0.02, 0.0, 1.0, eps);
            assert!(bern >= hoeff, "eps {eps}");
        }
        assert!(bernstein_beats_hoeffding(0.1, 1.0, 0.5).is_err());
    }

    #[test]
    fn erm_condition_values() {
        let (holds, floor) = erm_in_true_set_condition(0.02, 0.03, 0.05, 1000, 0.01).unwrap();
        assert!(holds);
        assert!((floor - 0.824_701_111_778_413_4).abs() < 1e-12);
        let (holds, _) = erm_in_true_set_condition(0.04, 0.03, 0.05, 1000, 0.01).unwrap();
        assert!(!holds);
        // eps = 0 gives no floor regardless of n
        let (_, floor) = erm_in_true_set_condition(0.0, 0.0, 0.05, 10_000_000, 0.0).unwrap();
        assert_eq!(floor, 0.0);
    }

    #[test]
    fn variance_check_label_flip() {
        let d = gen_single_feature_truth(500, 1, 71).unwrap();
        // plant clean risk 0.2
        let mut labels = d.labels().to_vec();
        for i in 0..100 {
            labels[i * 5] = 1 - labels[i * 5];
        }
        let d = d.with_labels(labels);
        let preds: Vec<u8> = (0..d.n()).map(|i| d.value(i, 0) as u8).collect();
        let setup = VarianceCheckSetup::LabelFlip {
            data: d,
            predictions: preds,
            levels: vec![0.0, 0.1, 0.2],
        };
        let report = monte_carlo_variance_check(&setup, 800, 5).unwrap();
        assert!(report.strictly_increasing);
        let expected = [0.16, 0.1924, 0.2176];
        for (lvl, want) in report.levels.iter().zip(expected) {
            assert!(lvl.within_3_se, "level {} off: {lvl:?}", lvl.level);
            assert!((lvl.empirical - want).abs() < 0.01);
        }
    }

    #[test]
    fn variance_check_margin() {
        let pair = GaussianPairSpec {
            dims: 2,
            mu_neg: vec![0.0, 0.0],
            mu_pos: vec![1.5, 1.0],
            n_per_class: 400,
            seed: 0,
        };
        // decreasing k = more noise, so order levels from k=1 down
        let setup = VarianceCheckSetup::Margin {
            pair,
            weights: vec![1.0, 0.7],
            bias: -0.9,
            levels: vec![1.0, 0.5],
        };
        let report = monte_carlo_variance_check(&setup, 300, 6).unwrap();
        assert!(report.strictly_increasing, "{:?}", report.levels);
        for lvl in &report.levels {
            assert!(lvl.within_3_se, "{lvl:?}");
        }
    }

    #[test]
    fn variance_check_validation() {
        let d = gen_single_feature_truth(10, 1, 0).unwrap();
        let preds = vec![0u8; 10];
        let one_level = VarianceCheckSetup::LabelFlip {
            data: d.clone(),
            predictions: preds.clone(),
            levels: vec![0.1],
        };
        assert!(monte_carlo_variance_check(&one_level, 200, 0).is_err());
        let mismatch = VarianceCheckSetup::Margin {
            pair: GaussianPairSpec {
                dims: 3,
                mu_neg: vec![0.0; 3],
                mu_pos: vec![1.0; 3],
                n_per_class: 10,
                seed: 0,
            },
            weights: vec![1.0],
            bias: 0.0,
            levels: vec![1.0, 0.5],
        };
        assert!(matches!(
            monte_carlo_variance_check(&mismatch, 200, 0),
            Err(Error::ModelMismatch(_))
        ));
    }
}
