//! Error type shared by all modules.
//!
//! Every variant names the subsystem it originated from so that CLI users
//! can tell a bad input file from a metric that is undefined for their
//! binning choice.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Dataset construction rejected the input (length mismatch, non-finite
    /// values, non-positive uncertainties).
    #[error("core-stats: invalid dataset: {0}")]
    Dataset(String),

    /// A specific raw record is invalid. `row` is 1-based over data rows.
    #[error("core-stats: row {row}: {reason}")]
    Record { row: usize, reason: String },

    /// A caller-supplied parameter is out of range for the data.
    #[error("{module}: invalid parameter: {reason}")]
    Param {
        module: &'static str,
        reason: String,
    },

    /// A metric has no defined value for the given binned statistics.
    #[error("metrics: {metric} undefined in bin {bin}: {reason}")]
    MetricUndefined {
        metric: &'static str,
        bin: usize,
        reason: String,
    },

    /// The least-squares fit could not be performed.
    #[error("scan-fit: {0}")]
    Fit(String),

    /// A simulation routine failed.
    #[error("sim: {0}")]
    Sim(String),

    /// The adaptive integrator did not reach the requested accuracy.
    #[error("sim: quadrature failed: {0}")]
    Quadrature(String),

    /// A file-level input problem (unreadable, missing columns, ...).
    #[error("cli-io: {path}: {reason}")]
    Input { path: PathBuf, reason: String },

    /// A row-level input problem. `row` is 1-based over data rows.
    #[error("cli-io: {path}: row {row}: {reason}")]
    InputRow {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    /// The input file contains no data rows.
    #[error("cli-io: {0}: file contains no data rows")]
    EmptyInput(PathBuf),

    #[error("cli-io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for usage errors, 3 for data errors, 4 for
    /// computation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param { .. } | Error::EmptyInput(_) => 2,
            Error::Dataset(_)
            | Error::Record { .. }
            | Error::Input { .. }
            | Error::InputRow { .. }
            | Error::Io(_) => 3,
            Error::MetricUndefined { .. }
            | Error::Fit(_)
            | Error::Sim(_)
            | Error::Quadrature(_) => 4,
        }
    }
}
