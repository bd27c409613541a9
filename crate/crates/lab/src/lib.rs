//! Experiment harness for `dwalk`: flat-text sweep specs, a seeded parallel
//! runner, and CSV output with a JSON provenance sidecar.

pub mod fmt;
pub mod run;
pub mod spec;

pub use run::{rerun_row, run_experiment, ExperimentResult, PointSummary, RerunReport, Row};
pub use spec::{parse_spec, Density, ExperimentSpec, GridPoint, Kind, SpecError};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] dwalk_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("invariant breach: {0}")]
    Breach(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// 1 for invalid input, 2 for runtime failures, 3 for a broken invariant.
    pub fn exit_code(&self) -> i32 {
        use dwalk_core::Error as E;
        match self {
            LabError::Spec(_) | LabError::Input(_) | LabError::Json(_) => 1,
            LabError::Core(e) => match e {
                E::NoConvergence { .. } | E::MixingCap { .. } | E::StepCap { .. } => 2,
                _ => 1,
            },
            LabError::Breach(_) => 3,
            LabError::Io(_) => 2,
            LabError::Csv(e) => {
                if e.is_io_error() {
                    2
                } else {
                    1
                }
            }
        }
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book {}
