//! Experiment harness: orchestrates noise sweeps, complexity sweeps, the
//! practitioner path simulation and one-shot evaluations, emitting tidy CSV
//! and JSON under an output directory.
//!
//! Reruns with the same config and seed are byte-identical except for the
//! timestamp header line, which `--deterministic` suppresses.

pub mod config;
mod runners;

pub use runners::*;

use std::fmt;

/// Harness-level error, mapped onto process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration (exit code 2).
    Config(String),
    /// Valid but intractable request the harness refuses (exit code 3).
    Refusal(String),
    /// Everything else (exit code 1).
    Other(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Refusal(m) => write!(f, "refused: {m}"),
            RunError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Refusal(_) => 3,
            RunError::Other(_) => 1,
        }
    }
}

impl From<rashomon_core::Error> for RunError {
    fn from(e: rashomon_core::Error) -> Self {
        use rashomon_core::Error as E;
        match e {
            E::PatternCapExceeded { .. } | E::SampleCapExceeded { .. } => {
                RunError::Refusal(e.to_string())
            }
            E::Io(_) | E::Csv(_) | E::Json(_) => RunError::Other(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

/// Shared run options coming from the CLI flags.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: std::path::PathBuf,
    /// Suppress the timestamp header for byte-identical reruns.
    pub deterministic: bool,
    /// Directory the config file lives in; relative dataset paths resolve
    /// against it.
    pub base_dir: std::path::PathBuf,
}

impl RunOptions {
    pub fn ensure_out_dir(&self) -> Result<(), RunError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| RunError::Other(format!("cannot create out dir: {e}")))
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> Result<(), RunError> {
        self.ensure_out_dir()?;
        let mut text = String::new();
        if !self.deterministic {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            text.push_str(&format!("# generated_at_unix={now}\n"));
        }
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(self.out_dir.join(name), text)
            .map_err(|e| RunError::Other(format!("cannot write {name}: {e}")))
    }

    pub fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<(), RunError> {
        self.ensure_out_dir()?;
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| RunError::Other(format!("serialize {name}: {e}")))?;
        std::fs::write(self.out_dir.join(name), text + "\n")
            .map_err(|e| RunError::Other(format!("cannot write {name}: {e}")))
    }
}

/// Shortest round-trip f64 formatting (stable across runs).
pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}
