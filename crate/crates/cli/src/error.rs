use std::path::Path;

use frustsim::analysis::AnalysisError;
use frustsim::clockmc::ClockError;
use frustsim::lattice::LatticeError;
use frustsim::quench::{QuenchError, SampleSetError};
use frustsim::schedule::ScheduleError;
use frustsim::shim::ShimError;
use thiserror::Error;

/// Failures, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, inconsistent inputs or missing files.
    #[error("{0}")]
    Config(String),
    /// A computation failed on valid input.
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ScheduleError> for CliError {
    fn from(e: ScheduleError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ClockError> for CliError {
    fn from(e: ClockError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SampleSetError> for CliError {
    fn from(e: SampleSetError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<QuenchError> for CliError {
    fn from(e: QuenchError) -> Self {
        match e {
            QuenchError::NormDrift { .. } | QuenchError::NoConvergence(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Fit(_) | AnalysisError::Winding { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ShimError> for CliError {
    fn from(e: ShimError) -> Self {
        match e {
            ShimError::Sampler(_) | ShimError::Iteration { .. } => CliError::Numerical(e.to_string()),
            ShimError::Io { path, reason } => CliError::Io { path, reason },
            _ => CliError::Config(e.to_string()),
        }
    }
}
