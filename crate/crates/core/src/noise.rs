//! Noise injectors and synthetic data generators.
//!
//! Every injector is a pure function of (dataset, parameters, seed). Label
//! injectors never touch features and attribute injectors never touch
//! labels. Per-sample randomness comes from one ChaCha substream per sample
//! index, so results do not depend on iteration order.

use crate::data::Dataset;
use crate::rng::substream;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Tagged description of a noise process, serializable to JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_vector: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_a: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum NoiseKind {
    UniformFlip,
    PerSampleFlip,
    MarginShift,
    AdditiveAttribute,
    AttributeNegation,
}

impl NoiseSpec {
    pub fn uniform_flip(rho: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::UniformFlip,
            rho: Some(rho),
            rho_vector: None,
            k: None,
            lambda: None,
            rho_a: None,
            seed,
        }
    }

    pub fn per_sample_flip(rho_vector: Vec<f64>, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::PerSampleFlip,
            rho: None,
            rho_vector: Some(rho_vector),
            k: None,
            lambda: None,
            rho_a: None,
            seed,
        }
    }

    pub fn margin_shift(k: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::MarginShift,
            rho: None,
            rho_vector: None,
            k: Some(k),
            lambda: None,
            rho_a: None,
            seed,
        }
    }

    pub fn additive_attribute(lambda: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::AdditiveAttribute,
            rho: None,
            rho_vector: None,
            k: None,
            lambda: Some(lambda),
            rho_a: None,
            seed,
        }
    }

    pub fn attribute_negation(rho_a: f64, seed: u64) -> Self {
        NoiseSpec {
            kind: NoiseKind::AttributeNegation,
            rho: None,
            rho_vector: None,
            k: None,
            lambda: None,
            rho_a: Some(rho_a),
            seed,
        }
    }

    /// Check that exactly the fields for the active kind are set and lie in
    /// their valid ranges.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.rho.is_some(),
            self.rho_vector.is_some(),
            self.k.is_some(),
            self.lambda.is_some(),
            self.rho_a.is_some(),
        ];
        let expected = match self.kind {
            NoiseKind::UniformFlip => 0,
            NoiseKind::PerSampleFlip => 1,
            NoiseKind::MarginShift => 2,
            NoiseKind::AdditiveAttribute => 3,
            NoiseKind::AttributeNegation => 4,
        };
        for (i, &set) in fields.iter().enumerate() {
            if set != (i == expected) {
                return Err(Error::NoiseSpec(format!(
                    "{:?} expects exactly its own parameter field",
                    self.kind
                )));
            }
        }
        match self.kind {
            NoiseKind::UniformFlip => check_rho("rho", self.rho.unwrap())?,
            NoiseKind::PerSampleFlip => {
                for &r in self.rho_vector.as_ref().unwrap() {
                    check_rho("rho_vector entry", r)?;
                }
            }
            NoiseKind::MarginShift => {
                let k = self.k.unwrap();
                if !(k > 0.0 && k <= 1.0) {
                    return Err(Error::OutOfRange {
                        name: "k",
                        value: k,
                        range: "(0,1]",
                    });
                }
            }
            NoiseKind::AdditiveAttribute => {
                let l = self.lambda.unwrap();
                if l < 0.0 {
                    return Err(Error::OutOfRange {
                        name: "lambda",
                        value: l,
                        range: "[0,inf)",
                    });
                }
            }
            NoiseKind::AttributeNegation => {
                let r = self.rho_a.unwrap();
                if !(0.0..1.0).contains(&r) {
                    return Err(Error::OutOfRange {
                        name: "rho_a",
                        value: r,
                        range: "[0,1)",
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_rho(name: &'static str, rho: f64) -> Result<()> {
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::OutOfRange {
            name,
            value: rho,
            range: "[0,0.5)",
        });
    }
    Ok(())
}

/// Flip each label independently with probability `rho`.
pub fn flip_labels_uniform(d: &Dataset, rho: f64, seed: u64) -> Result<Dataset> {
    check_rho("rho", rho)?;
    let labels = d
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let u: f64 = substream(seed, i as u64).gen();
            if u < rho {
                1 - y
            } else {
                y
            }
        })
        .collect();
    Ok(d.with_labels(labels))
}

/// Flip label `i` independently with probability `rho_vector[i]`.
pub fn flip_labels_per_sample(d: &Dataset, rho_vector: &[f64], seed: u64) -> Result<Dataset> {
    if rho_vector.len() != d.n() {
        return Err(Error::LengthMismatch {
            expected: d.n(),
            got: rho_vector.len(),
        });
    }
    for &r in rho_vector {
        check_rho("rho_vector entry", r)?;
    }
    let labels = d
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let u: f64 = substream(seed, i as u64).gen();
            if u < rho_vector[i] {
                1 - y
            } else {
                y
            }
        })
        .collect();
    Ok(d.with_labels(labels))
}

/// Add an independent N(0, lambda I) vector to every row; labels unchanged.
pub fn add_attribute_noise(d: &Dataset, lambda: f64, seed: u64) -> Result<Dataset> {
    if lambda < 0.0 {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0,inf)",
        });
    }
    let sd = lambda.sqrt();
    let m = d.m();
    let mut features = Vec::with_capacity(d.n() * m);
    for i in 0..d.n() {
        let mut rng = substream(seed, i as u64);
        for j in 0..m {
            let eps: f64 = rng.sample(StandardNormal);
            features.push(d.value(i, j) + sd * eps);
        }
    }
    Ok(d.with_features(features))
}

/// Flip each cell of the selected binary feature columns independently with
/// probability `rho_a`.
pub fn negate_attributes(
    d: &Dataset,
    feature_indices: &[usize],
    rho_a: f64,
    seed: u64,
) -> Result<Dataset> {
    if !d.is_binary() {
        return Err(Error::NonBinaryData);
    }
    if !(0.0..=1.0).contains(&rho_a) {
        return Err(Error::OutOfRange {
            name: "rho_a",
            value: rho_a,
            range: "[0,1]",
        });
    }
    for &j in feature_indices {
        if j >= d.m() {
            return Err(Error::LengthMismatch {
                expected: d.m(),
                got: j,
            });
        }
    }
    let mut sorted: Vec<usize> = feature_indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let m = d.m();
    let mut features: Vec<f64> = (0..d.n()).flat_map(|i| d.row(i).to_vec()).collect();
    for i in 0..d.n() {
        let mut rng = substream(seed, i as u64);
        for &j in &sorted {
            let u: f64 = rng.gen();
            if u < rho_a {
                features[i * m + j] = 1.0 - features[i * m + j];
            }
        }
    }
    Ok(d.with_features(features))
}

/// Two identity-covariance Gaussian classes with chosen means.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GaussianPairSpec {
    pub dims: usize,
    pub mu_neg: Vec<f64>,
    pub mu_pos: Vec<f64>,
    pub n_per_class: usize,
    pub seed: u64,
}

impl GaussianPairSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims < 1 {
            return Err(Error::OutOfRange {
                name: "dims",
                value: self.dims as f64,
                range: ">= 1",
            });
        }
        if self.n_per_class < 1 {
            return Err(Error::OutOfRange {
                name: "n_per_class",
                value: self.n_per_class as f64,
                range: ">= 1",
            });
        }
        if self.mu_neg.len() != self.dims || self.mu_pos.len() != self.dims {
            return Err(Error::LengthMismatch {
                expected: self.dims,
                got: self.mu_neg.len().max(self.mu_pos.len()),
            });
        }
        Ok(())
    }
}

/// Margin noise: contract the positive-class mean towards the origin by
/// factor `k`; the negative class must already sit at the origin.
pub fn margin_shift(spec: &GaussianPairSpec, k: f64) -> Result<GaussianPairSpec> {
    spec.validate()?;
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            range: "(0,1]",
        });
    }
    if spec.mu_neg.iter().any(|&v| v != 0.0) {
        return Err(Error::MarginShiftOffOrigin);
    }
    let mut out = spec.clone();
    out.mu_pos = spec.mu_pos.iter().map(|&v| k * v).collect();
    Ok(out)
}

/// Draw `n_per_class` samples per class (class 0 rows first), labels 0/1.
pub fn gen_gaussian_pair(spec: &GaussianPairSpec) -> Result<Dataset> {
    spec.validate()?;
    let names = (0..spec.dims).map(|j| format!("x{j}")).collect();
    let mut rows = Vec::with_capacity(2 * spec.n_per_class);
    let mut labels = Vec::with_capacity(2 * spec.n_per_class);
    for idx in 0..2 * spec.n_per_class {
        let (mu, y) = if idx < spec.n_per_class {
            (&spec.mu_neg, 0u8)
        } else {
            (&spec.mu_pos, 1u8)
        };
        let mut rng = substream(spec.seed, idx as u64);
        let row: Vec<f64> = mu
            .iter()
            .map(|&c| c + rng.sample::<f64, _>(StandardNormal))
            .collect();
        rows.push(row);
        labels.push(y);
    }
    Dataset::new(rows, labels, names)
}

/// Uniform random binary feature matrix, labeled by the majority vote of the
/// first three features. The labeling is realized exactly by a complete
/// depth-3 tree and by no depth-2 tree, which makes it the planted truth for
/// depth-selection experiments.
pub fn gen_majority_truth(n: usize, m: usize, seed: u64) -> Result<Dataset> {
    assert!(m >= 3, "majority truth needs at least 3 features");
    let names = (0..m).map(|j| format!("x{j}")).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = substream(seed, i as u64);
        let row: Vec<f64> = (0..m).map(|_| rng.gen_range(0..2) as f64).collect();
        let votes = row[0] + row[1] + row[2];
        labels.push((votes >= 2.0) as u8);
        rows.push(row);
    }
    Dataset::new(rows, labels, names)
}

/// Binary dataset whose labels come from a depth-3 tree with graded signal
/// strength: features 0 and 1 are Bernoulli(0.12), the rest Bernoulli(0.5),
/// and the label is 0 on (x0=0, x1=0), 1 on the mixed cells, and x2 on the
/// rare (x0=1, x1=1) cell (mass ~0.0144). The third level carries a weak
/// signal that label noise masks from the greedy learner — the regime where
/// cross-validated depth selection backs off to shallower trees.
pub fn gen_graded_depth3_truth(n: usize, m: usize, seed: u64) -> Result<Dataset> {
    assert!(m >= 3, "graded truth needs at least 3 features");
    let names = (0..m).map(|j| format!("x{j}")).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = substream(seed, i as u64);
        let row: Vec<f64> = (0..m)
            .map(|j| {
                let p = if j < 2 { 0.12 } else { 0.5 };
                (rng.gen::<f64>() < p) as u8 as f64
            })
            .collect();
        let y = match (row[0] as u8, row[1] as u8) {
            (0, 0) => 0,
            (0, 1) | (1, 0) => 1,
            (1, 1) => row[2] as u8,
            _ => unreachable!(),
        };
        labels.push(y);
        rows.push(row);
    }
    Dataset::new(rows, labels, names)
}

/// Uniform random binary features with label equal to feature 0: a clean,
/// separable dataset with `m - 1` uninformative distractors.
pub fn gen_single_feature_truth(n: usize, m: usize, seed: u64) -> Result<Dataset> {
    assert!(m >= 1);
    let names = (0..m).map(|j| format!("x{j}")).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = substream(seed, i as u64);
        let row: Vec<f64> = (0..m).map(|_| rng.gen_range(0..2) as f64).collect();
        labels.push(row[0] as u8);
        rows.push(row);
    }
    Dataset::new(rows, labels, names)
}
