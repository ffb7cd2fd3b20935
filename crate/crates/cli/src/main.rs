use clap::{Parser, Subcommand};
use rashomon_cli::config::ExperimentConfig;
use rashomon_cli::{RunError, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Rashomon-set experiments: exact tree enumeration, linear prediction
/// patterns, noise sweeps and closed-form bound evaluation.
#[derive(Parser)]
#[command(name = "rashomon", version, about)]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true, default_value = "config.json")]
    config: PathBuf,

    /// Override the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Suppress the timestamp header for byte-identical reruns.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rashomon ratio/count sweep over hypothesis-space complexity.
    SweepComplexity,
    /// Rashomon metrics across uniform label-noise levels.
    SweepNoise,
    /// Depth selection by cross-validation across noise levels.
    PathSim,
    /// Pattern metrics (diversity, agreement) for a stored pattern set.
    Metrics,
    /// Ridge Rashomon volumes, ratios and the noise equivalence check.
    Ridge,
    /// Closed-form bound evaluations.
    Bounds,
    /// Pattern Rashomon set of the linear space by branch and bound.
    BnbPatterns,
    /// Exact Rashomon set of complete trees at one depth.
    TreeRset,
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let mut cfg = ExperimentConfig::from_path(&cli.config).map_err(RunError::Config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        deterministic: cli.deterministic,
        base_dir: cli
            .config
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    match cli.command {
        Command::SweepComplexity => rashomon_cli::run_complexity_sweep(&cfg, &opts),
        Command::SweepNoise => rashomon_cli::run_noise_sweep(&cfg, &opts),
        Command::PathSim => rashomon_cli::run_path_sim(&cfg, &opts),
        Command::Metrics => rashomon_cli::run_metrics(&cfg, &opts),
        Command::Ridge => rashomon_cli::run_ridge(&cfg, &opts).map(|_| ()),
        Command::Bounds => rashomon_cli::run_bounds(&cfg, &opts).map(|_| ()),
        Command::BnbPatterns => rashomon_cli::run_bnb_patterns(&cfg, &opts).map(|_| ()),
        Command::TreeRset => rashomon_cli::run_tree_rset(&cfg, &opts).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
