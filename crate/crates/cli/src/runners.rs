//! Subcommand implementations.

use crate::config::{ExperimentConfig, SpaceSpec};
use crate::{fmt_f64, RunError, RunOptions};
use rashomon_core::bounds::{
    bernstein_beats_hoeffding, bernstein_generalization_bound, erm_in_true_set_condition,
    loss_variance_under_noise, noisy_risk, tail_exponents, BoundInputs,
};
use rashomon_core::data::{split, SplitSpec};
use rashomon_core::linear::{branch_and_bound_patterns, fit_logistic};
use rashomon_core::loss::zero_one_risk;
use rashomon_core::metrics::{diversity_upper_bound, pattern_diversity, sample_agreement};
use rashomon_core::noise::flip_labels_uniform;
use rashomon_core::pattern::{read_patterns, write_patterns, Pattern};
use rashomon_core::ridge::{
    ln_rashomon_volume, noise_regularization_equivalence, rashomon_volume, ridge_rashomon_ratio,
    RidgeSpace,
};
use rashomon_core::rng::derive_seed;
use rashomon_core::tree::{
    cross_validate_depth, enumerate_rashomon_trees, greedy_tree_fit, ThetaMode, TreeEnumConfig,
};
use serde::{Deserialize, Serialize};

/// Exact tree enumeration is refused beyond this depth.
pub const TREE_DEPTH_CAP: usize = 3;

fn theta_mode_str(mode: ThetaMode) -> &'static str {
    match mode {
        ThetaMode::Additive => "additive",
        ThetaMode::Multiplicative => "multiplicative",
    }
}

/// Report written by `tree-rset` and `bnb-patterns`; `metrics` reads it
/// back.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternReport {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub theta: f64,
    pub theta_mode: String,
    /// Anchor loss of the set: the in-space minimum.
    pub erm_loss: f64,
    pub mistake_budget: usize,
    /// Loss slack actually granted by the integer budget.
    pub effective_theta: f64,
    pub pattern_count: Option<usize>,
    /// Model count for tree spaces (exact, decimal string).
    pub rashomon_count: Option<String>,
    /// Pattern-space size (linear) or model-space size (trees), decimal.
    pub denominator: String,
    pub ratio: f64,
    pub log10_ratio: f64,
    /// Bit-packed pattern file (relative to the report), when collected.
    pub patterns_file: Option<String>,
}

/// `tree-rset`: exact Rashomon enumeration at one depth.
pub fn run_tree_rset(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<PatternReport, RunError> {
    let depth = single_tree_depth(cfg)?;
    refuse_deep(depth)?;
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    let mut enum_cfg = TreeEnumConfig::new(cfg.theta, cfg.theta_mode);
    enum_cfg.collect_patterns = cfg.search.collect_patterns;
    enum_cfg.pattern_cap = cfg.search.pattern_cap;
    let result = enumerate_rashomon_trees(&data, depth, &enum_cfg)?;

    opts.ensure_out_dir()?;
    let patterns_file = if let Some(patterns) = &result.patterns {
        let name = "tree_patterns.bin".to_string();
        write_patterns(&opts.out_dir.join(&name), patterns.iter(), data.n())?;
        Some(name)
    } else {
        None
    };
    let report = PatternReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "tree-rset".into(),
        n: data.n(),
        m: data.m(),
        theta: cfg.theta,
        theta_mode: theta_mode_str(cfg.theta_mode).into(),
        erm_loss: result.min_loss,
        mistake_budget: result.mistake_budget,
        effective_theta: result.effective_theta(data.n()),
        pattern_count: result.patterns.as_ref().map(|p| p.len()),
        rashomon_count: Some(result.rashomon_count.to_string()),
        denominator: result.total_models.to_string(),
        ratio: result.ratio(),
        log10_ratio: result.log10_ratio(),
        patterns_file,
    };
    opts.write_json("tree_rset.json", &report)?;
    Ok(report)
}

/// `bnb-patterns`: pattern Rashomon set for the linear space.
pub fn run_bnb_patterns(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<PatternReport, RunError> {
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    let search = cfg.search.to_pattern_config();
    let result = branch_and_bound_patterns(&data, cfg.theta, &search)?;

    opts.ensure_out_dir()?;
    let name = "patterns.bin".to_string();
    write_patterns(&opts.out_dir.join(&name), result.patterns.iter(), data.n())?;
    let ratio = result.pattern_ratio();
    let report = PatternReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "bnb-patterns".into(),
        n: data.n(),
        m: data.m(),
        theta: cfg.theta,
        theta_mode: "additive".into(),
        erm_loss: result.erm_loss,
        mistake_budget: result.mistake_budget,
        effective_theta: result.effective_theta(data.n()),
        pattern_count: Some(result.patterns.len()),
        rashomon_count: None,
        denominator: result.denominator.to_string(),
        ratio,
        log10_ratio: ratio.log10(),
        patterns_file: Some(name),
    };
    opts.write_json("patterns.json", &report)?;
    Ok(report)
}

/// `metrics`: one CSV row per pattern set.
pub fn run_metrics(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(), RunError> {
    let metrics_cfg = cfg
        .metrics
        .as_ref()
        .ok_or_else(|| RunError::Config("metrics section missing".into()))?;
    let report_path = opts.base_dir.join(&metrics_cfg.report);
    let text = std::fs::read_to_string(&report_path)
        .map_err(|e| RunError::Config(format!("cannot read report: {e}")))?;
    let report: PatternReport =
        serde_json::from_str(&text).map_err(|e| RunError::Config(format!("report parse: {e}")))?;
    let patterns_name = report
        .patterns_file
        .as_ref()
        .ok_or_else(|| RunError::Config("report has no patterns file".into()))?;
    let patterns_path = report_path
        .parent()
        .unwrap_or(std::path::Path::new("."))
        .join(patterns_name);
    let patterns = read_patterns(&patterns_path, report.n)?;

    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    if data.n() != report.n {
        return Err(RunError::Config(format!(
            "dataset has {} samples but the report covers {}",
            data.n(),
            report.n
        )));
    }
    let labels = Pattern::from_bits(data.labels());
    let diversity = pattern_diversity(&patterns)?;
    let agreement = sample_agreement(&patterns, &labels)?;
    let u_div = diversity_upper_bound(report.erm_loss, report.effective_theta);

    let header = "n,pi,diversity,u_div,erm_loss,agreement_mean";
    let row = format!(
        "{},{},{},{},{},{}",
        report.n,
        patterns.len(),
        fmt_f64(diversity),
        fmt_f64(u_div),
        fmt_f64(report.erm_loss),
        fmt_f64(agreement.mean())
    );
    opts.write_csv("metrics.csv", header, &[row])
}

/// Ridge report: closed forms over the lambda grid plus the Monte Carlo
/// equivalence deviation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RidgeReport {
    pub schema_version: u32,
    pub c: f64,
    pub theta: f64,
    pub lambda_grid: Vec<f64>,
    pub ratios: Vec<f64>,
    pub volumes: Vec<f64>,
    pub ln_volumes: Vec<f64>,
    pub mc_deviation: Vec<f64>,
    pub singular_values_sq: Vec<f64>,
    pub l_max: f64,
}

pub fn run_ridge(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RidgeReport, RunError> {
    let ridge_cfg = cfg
        .ridge
        .as_ref()
        .ok_or_else(|| RunError::Config("ridge section missing".into()))?;
    if ridge_cfg.lambda_grid.is_empty() {
        return Err(RunError::Config("lambda_grid must be non-empty".into()));
    }
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    let space = RidgeSpace::from_dataset(&data, ridge_cfg.c)?;

    let mut ratios = Vec::new();
    let mut volumes = Vec::new();
    let mut ln_volumes = Vec::new();
    let mut mc_deviation = Vec::new();
    for (i, &lambda) in ridge_cfg.lambda_grid.iter().enumerate() {
        ratios.push(ridge_rashomon_ratio(&space, ridge_cfg.theta, lambda)?);
        volumes.push(rashomon_volume(&space, ridge_cfg.theta, lambda)?);
        ln_volumes.push(ln_rashomon_volume(&space, ridge_cfg.theta, lambda)?);
        let rep = noise_regularization_equivalence(
            &data,
            ridge_cfg.c,
            lambda,
            ridge_cfg.mc_draws,
            derive_seed(cfg.seed, &[90, i as u64]),
        )?;
        mc_deviation.push(rep.max_deviation);
    }
    let report = RidgeReport {
        schema_version: crate::config::SCHEMA_VERSION,
        c: ridge_cfg.c,
        theta: ridge_cfg.theta,
        lambda_grid: ridge_cfg.lambda_grid.clone(),
        ratios,
        volumes,
        ln_volumes,
        mc_deviation,
        singular_values_sq: space.singular_values_sq.clone(),
        l_max: space.l_max,
    };
    opts.write_json("ridge.json", &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy_risk_table: Option<Vec<NoisyRiskRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bernstein_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erm_condition: Option<ErmConditionRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoisyRiskRow {
    pub l: f64,
    pub rho: f64,
    pub noisy_risk: f64,
    pub loss_variance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErmConditionRow {
    pub holds: bool,
    pub probability_floor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeRow {
    pub bernstein_stronger: bool,
    /// Bernstein exponent minus Hoeffding exponent on a 9-point grid of
    /// epsilon inside (0, b-a); positive means Bernstein dominates.
    pub exponent_margin: Vec<f64>,
}

pub fn run_bounds(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<BoundsReport, RunError> {
    let bounds_cfg = cfg
        .bounds
        .as_ref()
        .ok_or_else(|| RunError::Config("bounds section missing".into()))?;
    let noisy_risk_table = bounds_cfg.noisy_risk_grid.as_ref().map(|grid| {
        let mut rows = Vec::new();
        for &l in &grid.losses {
            for &rho in &grid.rhos {
                rows.push(NoisyRiskRow {
                    l,
                    rho,
                    noisy_risk: noisy_risk(l, rho),
                    loss_variance: loss_variance_under_noise(l, rho),
                });
            }
        }
        rows
    });
    let bernstein_bound = match &bounds_cfg.bernstein {
        Some(b) => Some(bernstein_generalization_bound(&BoundInputs {
            n: b.n,
            rset_size: b.rset_size,
            delta: b.delta,
            sigma_sq: b.sigma_sq,
            c_loss: b.c_loss,
        })?),
        None => None,
    };
    let erm_condition = match &bounds_cfg.erm_condition {
        Some(e) => {
            let (holds, floor) = erm_in_true_set_condition(e.xi, e.eps, e.gamma, e.n, e.eps_xi)?;
            Some(ErmConditionRow {
                holds,
                probability_floor: floor,
            })
        }
        None => None,
    };
    let regime = match &bounds_cfg.regime {
        Some(r) => {
            let stronger = bernstein_beats_hoeffding(r.sigma_sq, r.a, r.b)?;
            let margin = (1..=9)
                .map(|i| {
                    let eps = (r.b - r.a) * i as f64 / 10.0;
                    let (bern, hoeff) = tail_exponents(r.sigma_sq, r.a, r.b, eps);
                    bern - hoeff
                })
                .collect();
            Some(RegimeRow {
                bernstein_stronger: stronger,
                exponent_margin: margin,
            })
        }
        None => None,
    };
    let report = BoundsReport {
        schema_version: crate::config::SCHEMA_VERSION,
        noisy_risk_table,
        bernstein_bound,
        erm_condition,
        regime,
    };
    opts.write_json("bounds.json", &report)?;
    Ok(report)
}

fn single_tree_depth(cfg: &ExperimentConfig) -> Result<usize, RunError> {
    match &cfg.space {
        Some(SpaceSpec::Trees { depths }) if depths.len() == 1 => Ok(depths[0]),
        Some(SpaceSpec::Trees { .. }) => Err(RunError::Config(
            "tree-rset and sweep-noise need exactly one depth".into(),
        )),
        _ => Err(RunError::Config("space.trees section missing".into())),
    }
}

fn refuse_deep(depth: usize) -> Result<(), RunError> {
    if depth > TREE_DEPTH_CAP {
        return Err(RunError::Refusal(format!(
            "exact tree enumeration is capped at depth {TREE_DEPTH_CAP} (requested {depth})"
        )));
    }
    Ok(())
}

/// `sweep-complexity`: one row per complexity level.
pub fn run_complexity_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(), RunError> {
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    let header = "complexity,log10_ratio,rashomon_count,denominator";
    let mut rows = Vec::new();
    match &cfg.space {
        Some(SpaceSpec::Trees { depths }) => {
            for &depth in depths {
                refuse_deep(depth)?;
                let enum_cfg = TreeEnumConfig::new(cfg.theta, cfg.theta_mode);
                let result = enumerate_rashomon_trees(&data, depth, &enum_cfg)?;
                rows.push(format!(
                    "{depth},{},{},{}",
                    fmt_f64(result.log10_ratio()),
                    result.rashomon_count,
                    result.total_models
                ));
            }
        }
        Some(SpaceSpec::Linear { feature_subsets }) => {
            let subsets: Vec<Vec<usize>> = match feature_subsets {
                Some(s) => s.clone(),
                None => vec![(0..data.m()).collect()],
            };
            let search = cfg.search.to_pattern_config();
            for subset in &subsets {
                if subset.iter().any(|&j| j >= data.m()) {
                    return Err(RunError::Config(format!(
                        "feature subset {subset:?} out of range for m={}",
                        data.m()
                    )));
                }
                let restricted = data.select_features(subset);
                let result = branch_and_bound_patterns(&restricted, cfg.theta, &search)?;
                rows.push(format!(
                    "{},{},{},{}",
                    subset.len(),
                    fmt_f64(result.pattern_ratio().log10()),
                    result.patterns.len(),
                    result.denominator
                ));
            }
        }
        None => return Err(RunError::Config("space section missing".into())),
    }
    opts.write_csv("complexity_sweep.csv", header, &rows)
}

fn validate_noise_grid(cfg: &ExperimentConfig, clean_erm_loss: f64) -> Result<Vec<f64>, RunError> {
    let grid = cfg
        .noise
        .as_ref()
        .ok_or_else(|| RunError::Config("noise section missing".into()))?;
    if grid.kind != "UniformFlip" {
        return Err(RunError::Config(format!(
            "noise sweeps support UniformFlip only (got {:?})",
            grid.kind
        )));
    }
    let mut prev = -1.0;
    // noise stops where accuracy would cross 50%: cap at min(0.25, acc - 0.5)
    let cap = (0.5 - clean_erm_loss).min(0.25);
    for &rho in &grid.levels {
        if !(0.0..0.5).contains(&rho) {
            return Err(RunError::Config(format!(
                "noise level {rho} outside [0,0.5)"
            )));
        }
        if rho <= prev {
            return Err(RunError::Config("noise levels must be ascending".into()));
        }
        if rho > cap + 1e-12 {
            return Err(RunError::Config(format!(
                "noise level {rho} exceeds the accuracy cap {cap:.4} (clean risk {clean_erm_loss:.4})"
            )));
        }
        prev = rho;
    }
    Ok(grid.levels.clone())
}

/// `sweep-noise`: per-(level, draw) Rashomon metrics with per-level mean
/// and median aggregate rows.
pub fn run_noise_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(), RunError> {
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    if cfg.draws_per_level < 1 {
        return Err(RunError::Config("draws_per_level must be >= 1".into()));
    }

    enum Space {
        Tree(usize),
        Linear,
    }
    let (space, clean_erm) = match &cfg.space {
        Some(SpaceSpec::Trees { .. }) => {
            let depth = single_tree_depth(cfg)?;
            refuse_deep(depth)?;
            let enum_cfg = TreeEnumConfig::new(cfg.theta, cfg.theta_mode);
            let clean = enumerate_rashomon_trees(&data, depth, &enum_cfg)?;
            (Space::Tree(depth), clean.min_loss)
        }
        Some(SpaceSpec::Linear { .. }) => {
            let search = cfg.search.to_pattern_config();
            let erm = fit_logistic(&data, &search);
            let risk = zero_one_risk(&erm.predict_all(&data), data.labels())?;
            (Space::Linear, risk)
        }
        None => return Err(RunError::Config("space section missing".into())),
    };
    let levels = validate_noise_grid(cfg, clean_erm)?;

    struct DrawRow {
        rho: f64,
        draw: usize,
        draw_seed: u64,
        rashomon_count: Option<u128>,
        pattern_count: usize,
        diversity: f64,
        u_div: f64,
        erm_loss: f64,
    }
    let mut draw_rows: Vec<DrawRow> = Vec::new();
    for (li, &rho) in levels.iter().enumerate() {
        for draw in 0..cfg.draws_per_level {
            let draw_seed = derive_seed(cfg.seed, &[li as u64, draw as u64]);
            let noisy = flip_labels_uniform(&data, rho, draw_seed)?;
            let (rashomon_count, patterns, erm_loss, eff_theta) = match &space {
                Space::Tree(depth) => {
                    let mut enum_cfg = TreeEnumConfig::new(cfg.theta, cfg.theta_mode);
                    enum_cfg.collect_patterns = true;
                    enum_cfg.pattern_cap = cfg.search.pattern_cap;
                    let r = enumerate_rashomon_trees(&noisy, *depth, &enum_cfg)?;
                    let count: u128 = r.rashomon_count.to_string().parse().unwrap_or(u128::MAX);
                    let patterns: Vec<Pattern> =
                        r.patterns.as_ref().unwrap().iter().cloned().collect();
                    (
                        Some(count),
                        patterns,
                        r.min_loss,
                        r.effective_theta(noisy.n()),
                    )
                }
                Space::Linear => {
                    let search = cfg.search.to_pattern_config();
                    let r = branch_and_bound_patterns(&noisy, cfg.theta, &search)?;
                    let patterns: Vec<Pattern> = r.patterns.iter().cloned().collect();
                    (None, patterns, r.erm_loss, r.effective_theta(noisy.n()))
                }
            };
            let diversity = pattern_diversity(&patterns)?;
            draw_rows.push(DrawRow {
                rho,
                draw,
                draw_seed,
                rashomon_count,
                pattern_count: patterns.len(),
                diversity,
                u_div: diversity_upper_bound(erm_loss, eff_theta),
                erm_loss,
            });
        }
    }

    let header = "row,rho,draw,draw_seed,rashomon_count,pattern_count,diversity,u_div,erm_loss";
    let mut rows: Vec<String> = Vec::new();
    for r in &draw_rows {
        rows.push(format!(
            "draw,{},{},{},{},{},{},{},{}",
            fmt_f64(r.rho),
            r.draw,
            r.draw_seed,
            r.rashomon_count.map_or(String::new(), |c| c.to_string()),
            r.pattern_count,
            fmt_f64(r.diversity),
            fmt_f64(r.u_div),
            fmt_f64(r.erm_loss)
        ));
    }
    for &rho in &levels {
        let level: Vec<&DrawRow> = draw_rows.iter().filter(|r| r.rho == rho).collect();
        for agg in ["mean", "median"] {
            let pick = |f: &dyn Fn(&DrawRow) -> f64| -> f64 {
                let mut vals: Vec<f64> = level.iter().map(|r| f(r)).collect();
                if agg == "mean" {
                    vals.iter().sum::<f64>() / vals.len() as f64
                } else {
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let mid = vals.len() / 2;
                    if vals.len() % 2 == 1 {
                        vals[mid]
                    } else {
                        0.5 * (vals[mid - 1] + vals[mid])
                    }
                }
            };
            let count = if level[0].rashomon_count.is_some() {
                fmt_f64(pick(&|r| r.rashomon_count.unwrap() as f64))
            } else {
                String::new()
            };
            rows.push(format!(
                "{agg},{},,,{},{},{},{},{}",
                fmt_f64(rho),
                count,
                fmt_f64(pick(&|r| r.pattern_count as f64)),
                fmt_f64(pick(&|r| r.diversity)),
                fmt_f64(pick(&|r| r.u_div)),
                fmt_f64(pick(&|r| r.erm_loss))
            ));
        }
    }
    opts.write_csv("noise_sweep.csv", header, &rows)
}

/// `path-sim`: the practitioner's depth-selection protocol under noise.
pub fn run_path_sim(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(), RunError> {
    let data = cfg.load_dataset(&opts.base_dir).map_err(RunError::Config)?;
    let cv = cfg
        .cv
        .as_ref()
        .ok_or_else(|| RunError::Config("cv section missing".into()))?;
    if cv.depths.is_empty() {
        return Err(RunError::Config("cv.depths must be non-empty".into()));
    }
    let max_depth = *cv.depths.iter().max().unwrap();
    if max_depth > data.m() {
        return Err(RunError::Config(format!(
            "cv depth {max_depth} exceeds feature count {}",
            data.m()
        )));
    }

    // clean ERM for the accuracy cap: greedy fit at the deepest depth
    let clean_tree = greedy_tree_fit(&data, max_depth)?;
    let clean_risk = zero_one_risk(&clean_tree.predict_all(&data), data.labels())?;
    let levels = validate_noise_grid(cfg, clean_risk)?;

    struct Row {
        rho: f64,
        draw: usize,
        draw_seed: u64,
        split_id: usize,
        depth: usize,
        train_risk: f64,
        val_risk: f64,
        cv_best_depth: usize,
    }
    let mut detail: Vec<Row> = Vec::new();
    for (li, &rho) in levels.iter().enumerate() {
        for draw in 0..cfg.draws_per_level {
            let draw_seed = derive_seed(cfg.seed, &[li as u64, draw as u64]);
            let noisy = flip_labels_uniform(&data, rho, draw_seed)?;
            for split_id in 0..cv.splits {
                let spec = SplitSpec {
                    validation_fraction: cv.validation_fraction,
                    fold_count: cv.fold_count,
                    seed: derive_seed(draw_seed, &[split_id as u64]),
                };
                let (train, val) = split(&noisy, &spec)?;
                let sel = cross_validate_depth(
                    &train,
                    &cv.depths,
                    cv.fold_count,
                    derive_seed(draw_seed, &[split_id as u64, 1]),
                )?;
                for &depth in &cv.depths {
                    let tree = greedy_tree_fit(&train, depth)?;
                    detail.push(Row {
                        rho,
                        draw,
                        draw_seed,
                        split_id,
                        depth,
                        train_risk: zero_one_risk(&tree.predict_all(&train), train.labels())?,
                        val_risk: zero_one_risk(&tree.predict_all(&val), val.labels())?,
                        cv_best_depth: sel.best_depth,
                    });
                }
            }
        }
    }

    let header =
        "row,rho,draw,draw_seed,split,depth,train_risk,val_risk,cv_best_depth,mean_cv_best_depth";
    let mut rows: Vec<String> = Vec::new();
    for r in &detail {
        rows.push(format!(
            "draw,{},{},{},{},{},{},{},{},",
            fmt_f64(r.rho),
            r.draw,
            r.draw_seed,
            r.split_id,
            r.depth,
            fmt_f64(r.train_risk),
            fmt_f64(r.val_risk),
            r.cv_best_depth
        ));
    }
    for &rho in &levels {
        for &depth in &cv.depths {
            let cell: Vec<&Row> = detail
                .iter()
                .filter(|r| r.rho == rho && r.depth == depth)
                .collect();
            let mean = |f: &dyn Fn(&Row) -> f64| -> f64 {
                cell.iter().map(|r| f(r)).sum::<f64>() / cell.len() as f64
            };
            rows.push(format!(
                "mean,{},,,,{},{},{},,{}",
                fmt_f64(rho),
                depth,
                fmt_f64(mean(&|r| r.train_risk)),
                fmt_f64(mean(&|r| r.val_risk)),
                fmt_f64(mean(&|r| r.cv_best_depth as f64))
            ));
        }
    }
    opts.write_csv("path_sim.csv", header, &rows)
}
