//! Closed-form Rashomon volumes and ratios for ridge regression, and the
//! attribute-noise / l2-regularization equivalence check.
//!
//! Everything runs in log space internally, so high dimensions neither
//! underflow the Gamma function nor the singular-value products.

use crate::data::Dataset;
use crate::loss::squared_risk_with_targets;
use crate::rng::substream;
use crate::special::ln_gamma_half;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Ridge hypothesis space summarized by the squared singular values of the
/// design matrix (under the 1/n loss normalization), the regularization
/// strength and the loss ceiling that bounds the parameter ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgeSpace {
    pub singular_values_sq: Vec<f64>,
    pub c: f64,
    pub l_max: f64,
}

impl RidgeSpace {
    pub fn new(singular_values_sq: Vec<f64>, c: f64, l_max: f64) -> Result<Self> {
        if singular_values_sq.is_empty() || singular_values_sq.iter().all(|&s| s == 0.0) {
            return Err(Error::OutOfRange {
                name: "singular_values_sq",
                value: 0.0,
                range: "at least one positive entry",
            });
        }
        if singular_values_sq.iter().any(|&s| s < 0.0) {
            return Err(Error::OutOfRange {
                name: "singular_values_sq",
                value: -1.0,
                range: "[0,inf)",
            });
        }
        if c <= 0.0 {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                range: "(0,inf)",
            });
        }
        if l_max <= 0.0 {
            return Err(Error::OutOfRange {
                name: "l_max",
                value: l_max,
                range: "(0,inf)",
            });
        }
        Ok(RidgeSpace {
            singular_values_sq,
            c,
            l_max,
        })
    }

    pub fn dims(&self) -> usize {
        self.singular_values_sq.len()
    }

    /// Build from a dataset: squared singular values of the design matrix
    /// divided by n (matching the 1/n in the squared loss), with the loss
    /// ceiling defaulting to the loss of the all-zero model, `(1/n) sum y^2`.
    pub fn from_dataset(d: &Dataset, c: f64) -> Result<Self> {
        let x = nalgebra::DMatrix::from_fn(d.n(), d.m(), |i, j| d.value(i, j));
        let svd = x.svd(false, false);
        let n = d.n() as f64;
        let sv_sq: Vec<f64> = svd.singular_values.iter().map(|s| s * s / n).collect();
        let l_max = d.labels().iter().map(|&y| (y as f64).powi(2)).sum::<f64>() / n;
        RidgeSpace::new(sv_sq, c, l_max.max(f64::MIN_POSITIVE))
    }
}

/// ln of the Rashomon-set ellipsoid volume at loss slack `theta` and
/// attribute-noise level `lambda`:
/// `(m/2) ln(pi theta) - ln Gamma(m/2 + 1) - (1/2) sum ln(s_i^2 + C + lambda)`.
pub fn ln_rashomon_volume(space: &RidgeSpace, theta: f64, lambda: f64) -> Result<f64> {
    if theta <= 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "(0,inf)",
        });
    }
    if lambda < 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0,inf)",
        });
    }
    let m = space.dims() as f64;
    let sum_ln: f64 = space
        .singular_values_sq
        .iter()
        .map(|&s| (s + space.c + lambda).ln())
        .sum();
    Ok(m / 2.0 * (std::f64::consts::PI * theta).ln()
        - ln_gamma_half(space.dims() as u64 + 2)
        - 0.5 * sum_ln)
}

/// Rashomon-set ellipsoid volume (may underflow to 0 for large m; use
/// [`ln_rashomon_volume`] there).
pub fn rashomon_volume(space: &RidgeSpace, theta: f64, lambda: f64) -> Result<f64> {
    Ok(ln_rashomon_volume(space, theta, lambda)?.exp())
}

/// ln volume of the l2 ball of radius `r` in `m` dimensions.
pub fn ln_ball_volume(m: usize, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "(0,inf)",
        });
    }
    Ok(
        m as f64 / 2.0 * std::f64::consts::PI.ln() - ln_gamma_half(m as u64 + 2)
            + m as f64 * r.ln(),
    )
}

/// Volume of the l2 ball of radius `r` in `m` dimensions.
pub fn ball_volume(m: usize, r: f64) -> Result<f64> {
    Ok(ln_ball_volume(m, r)?.exp())
}

/// Closed-form Rashomon ratio
/// `(theta/L_max)^(m/2) prod_i sqrt((C+lambda)/(s_i^2+C+lambda))`,
/// identical to the volume quotient with ball radius
/// `sqrt(L_max/(C+lambda))`.
pub fn ridge_rashomon_ratio(space: &RidgeSpace, theta: f64, lambda: f64) -> Result<f64> {
    Ok(ln_ridge_rashomon_ratio(space, theta, lambda)?.exp())
}

pub fn ln_ridge_rashomon_ratio(space: &RidgeSpace, theta: f64, lambda: f64) -> Result<f64> {
    if theta <= 0.0 {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "(0,inf)",
        });
    }
    if lambda < 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0,inf)",
        });
    }
    let m = space.dims() as f64;
    let reg = space.c + lambda;
    let sum_ln: f64 = space
        .singular_values_sq
        .iter()
        .map(|&s| (reg / (s + reg)).ln())
        .sum();
    Ok(m / 2.0 * (theta / space.l_max).ln() + 0.5 * sum_ln)
}

/// Hypothesis-ball radius at noise level `lambda`.
pub fn ball_radius(space: &RidgeSpace, lambda: f64) -> f64 {
    (space.l_max / (space.c + lambda)).sqrt()
}

/// Closed-form least-squares loss variance under attribute noise at level
/// `sigma_n_sq` for a fixed weight vector:
/// `2 (s w.w + E[r^2])^2 + E[r^4] - 3 (E[r^2])^2`, with the residual
/// moments estimated from the clean data.
pub fn least_squares_loss_variance(d: &Dataset, weights: &[f64], sigma_n_sq: f64) -> Result<f64> {
    if weights.len() != d.m() {
        return Err(Error::LengthMismatch {
            expected: d.m(),
            got: weights.len(),
        });
    }
    let n = d.n() as f64;
    let mut r2 = 0.0;
    let mut r4 = 0.0;
    for i in 0..d.n() {
        let r = d
            .row(i)
            .iter()
            .zip(weights)
            .map(|(x, w)| x * w)
            .sum::<f64>()
            - d.labels()[i] as f64;
        r2 += r * r / n;
        r4 += r * r * r * r / n;
    }
    let ww: f64 = weights.iter().map(|w| w * w).sum();
    Ok(2.0 * (sigma_n_sq * ww + r2).powi(2) + r4 - 3.0 * r2 * r2)
}

/// Monte Carlo report for the noise / regularization equivalence.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub lambda: f64,
    pub draws: usize,
    /// Max over the weight grid of |MC mean noisy loss - closed form|.
    pub max_deviation: f64,
}

/// Compare the Monte Carlo mean of the noisy regularized least-squares loss
/// against the closed form `L_LS(w) + (C + lambda) w.w` over a grid of
/// weight vectors.
pub fn noise_regularization_equivalence(
    d: &Dataset,
    c: f64,
    lambda: f64,
    draws: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if draws < 1 {
        return Err(Error::OutOfRange {
            name: "draws",
            value: draws as f64,
            range: ">= 1",
        });
    }
    let m = d.m();
    let targets: Vec<f64> = d.labels().iter().map(|&y| y as f64).collect();

    // deterministic weight grid: zero, unit axes, and two mixed vectors
    let mut grid: Vec<Vec<f64>> = vec![vec![0.0; m]];
    for j in 0..m.min(3) {
        let mut w = vec![0.0; m];
        w[j] = 1.0;
        grid.push(w);
    }
    grid.push((0..m).map(|j| 0.5 - 0.1 * (j % 5) as f64).collect());
    grid.push(
        (0..m)
            .map(|j| if j % 2 == 0 { 0.8 } else { -0.4 })
            .collect(),
    );

    let mut max_dev = 0.0f64;
    for w in &grid {
        let ww: f64 = w.iter().map(|v| v * v).sum();
        let mut aug = w.clone();
        aug.push(0.0); // zero intercept: the ridge family has none
        let clean = squared_risk_with_targets(&aug, d, &targets)?;
        let closed = clean + (c + lambda) * ww;

        let mut mc = 0.0;
        for t in 0..draws {
            let noisy = noisy_loss(d, w, &targets, lambda, substream_seed(seed, t));
            mc += (noisy + c * ww) / draws as f64;
        }
        max_dev = max_dev.max((mc - closed).abs());
    }
    Ok(EquivalenceReport {
        lambda,
        draws,
        max_deviation: max_dev,
    })
}

fn substream_seed(seed: u64, t: usize) -> u64 {
    crate::rng::derive_seed(seed, &[t as u64])
}

fn noisy_loss(d: &Dataset, w: &[f64], targets: &[f64], lambda: f64, seed: u64) -> f64 {
    let sd = lambda.sqrt();
    let n = d.n();
    let mut acc = 0.0;
    for (i, &target) in targets.iter().enumerate() {
        let mut rng = substream(seed, i as u64);
        let pred: f64 = d
            .row(i)
            .iter()
            .zip(w)
            .map(|(x, wj)| (x + sd * rng.sample::<f64, _>(StandardNormal)) * wj)
            .sum();
        let r = pred - target;
        acc += r * r;
    }
    acc / n as f64
}
