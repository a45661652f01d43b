//! Aggregated calibration report: scans, fits, global statistics and the
//! reliability diagram in one serializable document.

use serde::{Deserialize, Serialize};

use crate::binning::{bin_stats, make_binning, ZVarMode};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::io::Schema;
use crate::metrics::{reliability_diagram, ReliabilityPoint};
use crate::scan::{fit_sqrt_n, scan, FitResult, Metric, ScanOptions, ScanSeries};

/// Which metrics a report should cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSelection {
    Ence,
    Zve,
    #[default]
    Both,
}

impl MetricSelection {
    pub fn includes(self, metric: Metric) -> bool {
        matches!(
            (self, metric),
            (MetricSelection::Both, _)
                | (MetricSelection::Ence, Metric::Ence)
                | (MetricSelection::Zve, Metric::Zve)
        )
    }
}

/// Echo of the configuration a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub input: Option<String>,
    pub schema: Option<Schema>,
    pub metric: MetricSelection,
    pub min_bin_size: usize,
    /// Explicit scan grid; `None` means the default grid.
    pub grid: Option<Vec<usize>>,
    /// Fit threshold in sqrt(N) units; only points strictly above it enter
    /// the fit.
    pub fit_threshold: f64,
    pub zvar_mode: ZVarMode,
    /// Bin count for the reliability diagram; `None` picks
    /// `min(15, dataset size)`.
    pub diagram_bins: Option<usize>,
    /// Presentation flag echoed for reproducibility; stored metric values
    /// are always fractions.
    pub percent: bool,
    pub seed: Option<u64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            input: None,
            schema: None,
            metric: MetricSelection::Both,
            min_bin_size: 30,
            grid: None,
            fit_threshold: 0.0,
            zvar_mode: ZVarMode::default(),
            diagram_bins: None,
            percent: false,
            seed: None,
        }
    }
}

/// Global statistics of the input dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub size: usize,
    pub mean_variance: f64,
    pub mean_squared_error: f64,
    /// Diagnostic only; never subtracted from the squared errors.
    pub mean_error: f64,
    pub z_variance: Option<f64>,
}

impl DatasetSummary {
    pub fn of(d: &Dataset) -> Self {
        Self {
            size: d.len(),
            mean_variance: d.mean_variance(),
            mean_squared_error: d.mean_squared_error(),
            mean_error: d.mean_error(),
            z_variance: d.z_variance(),
        }
    }
}

/// Scan series plus its fit for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub series: ScanSeries,
    pub fit: FitResult,
}

/// The full calibration report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ReportConfig,
    pub dataset: DatasetSummary,
    pub ence: Option<MetricReport>,
    pub zve: Option<MetricReport>,
    /// Reliability diagram evaluated at `diagram_bins`.
    pub diagram: Vec<ReliabilityPoint>,
    pub diagram_bins: usize,
    pub notes: Vec<String>,
}

const OLS_NOTE: &str = "fit is unweighted least squares; scan points share the same sample, \
     so their serial correlation is ignored by the standard errors";

/// Run the full analysis: scan and fit each selected metric, compute global
/// statistics, and evaluate the reliability diagram at the requested bin
/// count.
pub fn calibration_report(d: &Dataset, config: &ReportConfig) -> Result<Report> {
    let opts = ScanOptions {
        min_bin_size: config.min_bin_size,
        grid: config.grid.clone(),
        zvar_mode: config.zvar_mode,
    };

    let run = |metric: Metric| -> Result<Option<MetricReport>> {
        if !config.metric.includes(metric) {
            return Ok(None);
        }
        let series = scan(d, metric, &opts)?;
        let fit = fit_sqrt_n(&series, config.fit_threshold)?;
        Ok(Some(MetricReport { series, fit }))
    };
    let ence = run(Metric::Ence)?;
    let zve = run(Metric::Zve)?;

    let diagram_bins = config.diagram_bins.unwrap_or_else(|| 15.min(d.len()));
    let binning = make_binning(d, diagram_bins)?;
    let stats = bin_stats(d, &binning, config.zvar_mode)?;
    let diagram = reliability_diagram(&stats);

    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        dataset: DatasetSummary::of(d),
        ence,
        zve,
        diagram,
        diagram_bins,
        notes: vec![OLS_NOTE.to_string()],
    })
}
