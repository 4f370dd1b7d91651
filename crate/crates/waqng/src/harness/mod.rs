//! Experiment orchestration: configuration, multi-seed runs, gap/AUC
//! analysis, the invariant verification suite, and CSV/JSON persistence.

mod config;
mod experiment;
mod gap;
mod verify;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, ExperimentOutput, Manifest};
pub use gap::{
    gap_analysis, mean_curve, read_energy_csv, read_run_dir, write_gap_csv, GapAnalysis,
    Normalization,
};
pub use verify::{verify_suite, CheckResult, VerifyReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    ConfigParse(String),
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
    #[error(transparent)]
    Circuit(#[from] crate::circuit::CircuitError),
    #[error(transparent)]
    Optimizer(#[from] crate::optimizer::OptimizerError),
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("curve sets must share step and seed counts")]
    CurveShapeMismatch,
    #[error("flat baseline curve: normalization constant is zero")]
    ZeroNormalization,
    #[error("malformed csv at {path}: {detail}")]
    MalformedCsv {
        path: std::path::PathBuf,
        detail: String,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
