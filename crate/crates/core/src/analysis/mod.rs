//! Observables and statistics on sampled spin configurations.

mod defects;
mod fit;
mod kzm;
mod order;
mod stats;
mod structure;

use thiserror::Error;

use crate::lattice::LatticeError;

pub use defects::{
    count_defects, count_defects_with, pseudospin_field, DefectCount, DefectField, DefectOptions,
};
pub use fit::{
    exponential_decay, fit_exponential, fit_pseudo_voigt, least_squares, profile_interval,
    pseudo_voigt, LmOptions, LmResult, PeakFit,
};
pub use kzm::{kzm_exponents, KzmConstants, KzmPrediction, XY3D};
pub use order::{combine, order_parameter, OrderParamResult};
pub use stats::{
    bootstrap_mean_ci, f_critical, f_statistic, f_test_interval, fit_power_law, percentile,
    spearman, Interval, PowerLawFit, BOOTSTRAP_RESAMPLES,
};
pub use structure::{structure_factor, structure_factor_of, Cut, StructureFactor};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("no samples to analyze")]
    Empty,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("point {index} has non-positive value {value}; power laws need positive data")]
    NonPositive { index: usize, value: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("dual face {face} winds {winding} times; windings beyond ±1 break the phase convention")]
    Winding { face: usize, winding: i32 },
    #[error("{0}")]
    Mismatch(String),
}
