//! Versioned JSON configuration for experiment runs.

use rashomon_core::data::{binarize, load_csv, min_max_scale, Dataset, Thresholds};
use rashomon_core::linear::PatternSearchConfig;
use rashomon_core::noise::{
    gen_gaussian_pair, gen_graded_depth3_truth, gen_majority_truth, gen_single_feature_truth,
    GaussianPairSpec,
};
use rashomon_core::rng::derive_seed;
use rashomon_core::tree::ThetaMode;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub dataset: DatasetSource,
    #[serde(default)]
    pub preprocess: Preprocess,
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_theta_mode")]
    pub theta_mode: ThetaMode,
    #[serde(default)]
    pub noise: Option<NoiseGrid>,
    #[serde(default = "default_draws")]
    pub draws_per_level: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cv: Option<CvSpec>,
    #[serde(default)]
    pub search: SearchOptions,
    #[serde(default)]
    pub ridge: Option<RidgeConfig>,
    #[serde(default)]
    pub bounds: Option<BoundsConfig>,
    #[serde(default)]
    pub metrics: Option<MetricsConfig>,
}

fn default_theta() -> f64 {
    0.05
}

fn default_theta_mode() -> ThetaMode {
    ThetaMode::Additive
}

fn default_draws() -> usize {
    25
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Csv {
        path: String,
        label_column: String,
    },
    /// Two identity-covariance Gaussians: negative class at the origin,
    /// positive at `separation` along every axis.
    GaussianPair {
        dims: usize,
        separation: f64,
        n_per_class: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Binary features, label = feature 0 (separable with distractors).
    SingleFeature {
        n: usize,
        m: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Binary features, label = majority of features 0..2.
    MajorityDepth3 {
        n: usize,
        m: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Depth-3 tree truth with a weak third level.
    GradedDepth3 {
        n: usize,
        m: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Preprocess {
    /// "none" or "median"
    #[serde(default)]
    pub binarize: Option<String>,
    #[serde(default)]
    pub min_max_scale: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    Trees {
        depths: Vec<usize>,
    },
    Linear {
        /// Feature subsets to sweep for the complexity run; `None` means
        /// the full feature set.
        #[serde(default)]
        feature_subsets: Option<Vec<Vec<usize>>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoiseGrid {
    /// Only label-noise kinds are valid for sweeps: "UniformFlip".
    pub kind: String,
    pub levels: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvSpec {
    #[serde(default = "default_val_fraction")]
    pub validation_fraction: f64,
    #[serde(default = "default_folds")]
    pub fold_count: usize,
    #[serde(default = "default_splits")]
    pub splits: usize,
    pub depths: Vec<usize>,
}

fn default_val_fraction() -> f64 {
    0.2
}

fn default_folds() -> usize {
    5
}

fn default_splits() -> usize {
    5
}

/// Pattern-search and pattern-collection knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_sample_cap")]
    pub sample_cap: usize,
    #[serde(default = "default_true")]
    pub use_discard: bool,
    #[serde(default = "default_true")]
    pub denominator_includes_intercept: bool,
    #[serde(default)]
    pub collect_patterns: bool,
    #[serde(default = "default_pattern_cap")]
    pub pattern_cap: u128,
}

fn default_max_iters() -> usize {
    20_000
}

fn default_sample_cap() -> usize {
    24
}

fn default_true() -> bool {
    true
}

fn default_pattern_cap() -> u128 {
    1_000_000
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iters: default_max_iters(),
            sample_cap: default_sample_cap(),
            use_discard: true,
            denominator_includes_intercept: true,
            collect_patterns: false,
            pattern_cap: default_pattern_cap(),
        }
    }
}

impl SearchOptions {
    pub fn to_pattern_config(&self) -> PatternSearchConfig {
        PatternSearchConfig {
            max_iters: self.max_iters,
            sample_cap: self.sample_cap,
            use_discard: self.use_discard,
            denominator_includes_intercept: self.denominator_includes_intercept,
            ..PatternSearchConfig::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgeConfig {
    #[serde(default = "default_ridge_c")]
    pub c: f64,
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_mc_draws")]
    pub mc_draws: usize,
}

fn default_ridge_c() -> f64 {
    1.0
}

fn default_mc_draws() -> usize {
    1000
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BoundsConfig {
    #[serde(default)]
    pub noisy_risk_grid: Option<GridSpec>,
    #[serde(default)]
    pub bernstein: Option<BernsteinSpec>,
    #[serde(default)]
    pub erm_condition: Option<ErmConditionSpec>,
    #[serde(default)]
    pub regime: Option<RegimeSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub losses: Vec<f64>,
    pub rhos: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BernsteinSpec {
    pub n: u64,
    pub rset_size: f64,
    pub delta: f64,
    pub sigma_sq: f64,
    #[serde(default = "default_c_loss")]
    pub c_loss: f64,
}

fn default_c_loss() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErmConditionSpec {
    pub xi: f64,
    pub eps: f64,
    pub gamma: f64,
    pub n: u64,
    pub eps_xi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub sigma_sq: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Report JSON produced by `bnb-patterns` or `tree-rset` (with
    /// patterns collected); the patterns file path is read from it.
    pub report: String,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            ));
        }
        Ok(cfg)
    }

    /// Materialize the dataset (generator seeds default to the run seed).
    pub fn load_dataset(&self, base_dir: &Path) -> Result<Dataset, String> {
        let seed_or =
            |s: &Option<u64>, tag: u64| s.unwrap_or_else(|| derive_seed(self.seed, &[tag]));
        let d = match &self.dataset {
            DatasetSource::Csv { path, label_column } => {
                let p = Path::new(path);
                let full = if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base_dir.join(p)
                };
                load_csv(&full, label_column).map_err(|e| e.to_string())?
            }
            DatasetSource::GaussianPair {
                dims,
                separation,
                n_per_class,
                seed,
            } => {
                let spec = GaussianPairSpec {
                    dims: *dims,
                    mu_neg: vec![0.0; *dims],
                    mu_pos: vec![*separation; *dims],
                    n_per_class: *n_per_class,
                    seed: seed_or(seed, 1),
                };
                gen_gaussian_pair(&spec).map_err(|e| e.to_string())?
            }
            DatasetSource::SingleFeature { n, m, seed } => {
                gen_single_feature_truth(*n, *m, seed_or(seed, 2)).map_err(|e| e.to_string())?
            }
            DatasetSource::MajorityDepth3 { n, m, seed } => {
                gen_majority_truth(*n, *m, seed_or(seed, 3)).map_err(|e| e.to_string())?
            }
            DatasetSource::GradedDepth3 { n, m, seed } => {
                gen_graded_depth3_truth(*n, *m, seed_or(seed, 4)).map_err(|e| e.to_string())?
            }
        };
        let d = if self.preprocess.min_max_scale {
            min_max_scale(&d)
        } else {
            d
        };
        match self.preprocess.binarize.as_deref() {
            None | Some("none") => Ok(d),
            Some("median") => binarize(&d, &Thresholds::Median).map_err(|e| e.to_string()),
            Some(other) => Err(format!("unknown binarize mode {other:?}")),
        }
    }
}
