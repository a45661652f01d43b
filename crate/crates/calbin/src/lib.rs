//! Binning-based calibration metrics for regression uncertainty datasets,
//! with a bin-count sweep that removes the binning dependence.
//!
//! Given paired prediction errors and uncertainties, this crate computes
//! the ENCE (mean relative gap between per-bin root mean variance and root
//! mean squared error) and the ZVE (exponential of the mean absolute log of
//! per-bin z-score variances) over equal-size, uncertainty-ordered bins.
//! Both metrics grow like the square root of the number of bins on
//! calibrated data, so their value at any single bin count is an artifact
//! of the binning choice. The [`scan`](scan()) / [`fit_sqrt_n`] pair sweeps
//! the bin count, regresses the metric on `sqrt(N)`, and reports the
//! intercept as a binning-independent calibration error estimate together
//! with a 95% confidence-interval calibration test.
//!
//! ```
//! use calbin::{calibration_report, Dataset, ReportConfig};
//!
//! // A small calibrated dataset: |E| matches u on average.
//! let errors = vec![0.11, -0.25, 0.08, -0.42, 0.30, -0.01, 0.17, -0.22,
//!                   0.05, 0.31, -0.14, 0.25];
//! let uncertainties = vec![0.2; 12];
//! let d = Dataset::new(errors, uncertainties)?;
//! let config = ReportConfig {
//!     grid: Some(vec![1, 2, 3, 4, 6]),
//!     ..Default::default()
//! };
//! let report = calibration_report(&d, &config)?;
//! let fit = report.ence.unwrap().fit;
//! assert_eq!(fit.calibrated, fit.intercept_ci.0 <= 0.0 && 0.0 <= fit.intercept_ci.1);
//! # Ok::<(), calbin::Error>(())
//! ```

mod binning;
mod chi;
mod dataset;
mod error;
mod io;
mod ksum;
mod metrics;
mod quad;
mod report;
mod rng;
mod scan;
mod sim;

pub use binning::{bin_stats, make_binning, max_bins, BinStats, Binning, ZVarMode};
pub use dataset::{from_raw, Dataset, RawRecord};
pub use error::{Error, Result};
pub use io::{
    load_csv, write_diagram_csv, write_expected_csv, write_realizations_csv, write_scan_csv,
    InputSpec, Schema,
};
pub use metrics::{ence, reliability_diagram, zve, ReliabilityPoint};
pub use report::{
    calibration_report, DatasetSummary, MetricReport, MetricSelection, Report, ReportConfig,
};
pub use rng::{streams, RngStream};
pub use scan::{
    default_grid, fit_sqrt_n, scan, FitResult, Metric, ScanOptions, ScanPoint, ScanSeries,
    SkippedPoint,
};
pub use sim::{
    expected_ence_chi, expected_ence_chi_estimate, expected_ence_quadrature, mad_binned_means,
    mc_ence_realizations, sample_chi, sample_normal, MadComparison, McEstimate, RealizationPoint,
    SimSpec,
};
