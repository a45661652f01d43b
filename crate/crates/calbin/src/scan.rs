//! Bin-count sweep and the straight-line fit of metric values against the
//! square root of the bin count.
//!
//! Binned MAD-style calibration metrics grow like `sqrt(N)` on calibrated
//! data, so their value at any single `N` mixes calibration error with
//! binning noise. Sweeping `N` and extrapolating the linear trend back to
//! the intercept separates the two: the intercept estimates the residual
//! calibration error independently of the binning choice, and its 95%
//! confidence interval gives a calibration test (the interval should cover
//! 0 for ENCE and 1 for ZVE on calibrated data).

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::binning::{bin_stats, make_binning, max_bins, ZVarMode};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ksum;
use crate::metrics;

/// Which calibration metric a series holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ence,
    Zve,
}

impl Metric {
    /// Ideal intercept for a perfectly calibrated dataset.
    pub fn target(self) -> f64 {
        match self {
            Metric::Ence => 0.0,
            Metric::Zve => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Ence => "ence",
            Metric::Zve => "zve",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n: usize,
    pub sqrt_n: f64,
    pub value: f64,
}

/// A grid point that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub n: usize,
    pub reason: String,
}

/// Metric values over a strictly increasing grid of bin counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub metric: Metric,
    pub points: Vec<ScanPoint>,
    pub skipped: Vec<SkippedPoint>,
}

/// Options for [`scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Smallest admissible bin size when deriving the default grid.
    pub min_bin_size: usize,
    /// Explicit bin counts; `None` uses the default grid.
    pub grid: Option<Vec<usize>>,
    pub zvar_mode: ZVarMode,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            min_bin_size: 30,
            grid: None,
            zvar_mode: ZVarMode::default(),
        }
    }
}

/// Default sweep grid: about 25 bin counts whose square roots are uniformly
/// spaced between 1 and `sqrt(max_bins)`, deduplicated after rounding.
/// Uniform coverage of the fit abscissa gives the regression equal leverage
/// everywhere.
pub fn default_grid(max_bins: usize) -> Vec<usize> {
    const POINTS: usize = 25;
    if max_bins <= 1 {
        return vec![1];
    }
    let s_max = (max_bins as f64).sqrt();
    let mut grid: Vec<usize> = (0..POINTS)
        .map(|j| {
            let s = 1.0 + (s_max - 1.0) * j as f64 / (POINTS - 1) as f64;
            ((s * s).round() as usize).clamp(1, max_bins)
        })
        .collect();
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Evaluate `metric` at every bin count in the grid.
///
/// Grid points where the metric is undefined (for example a singleton bin
/// for the z-variance) are recorded as skipped, never imputed.
pub fn scan(d: &Dataset, metric: Metric, opts: &ScanOptions) -> Result<ScanSeries> {
    if opts.min_bin_size < 1 {
        return Err(Error::Param {
            module: "scan-fit",
            reason: "min_bin_size must be >= 1".into(),
        });
    }
    let grid = match &opts.grid {
        Some(g) => {
            let mut g = g.clone();
            g.sort_unstable();
            g.dedup();
            if g.is_empty() {
                return Err(Error::Param {
                    module: "scan-fit",
                    reason: "explicit grid is empty".into(),
                });
            }
            if let Some(&bad) = g.iter().find(|&&n| n < 1 || n > d.len()) {
                return Err(Error::Param {
                    module: "scan-fit",
                    reason: format!("grid value {bad} outside [1, {}]", d.len()),
                });
            }
            g
        }
        None => {
            let mb = max_bins(d, opts.min_bin_size);
            if mb < 1 {
                return Err(Error::Param {
                    module: "scan-fit",
                    reason: format!(
                        "dataset of {} rows cannot form any bin of at least {} points",
                        d.len(),
                        opts.min_bin_size
                    ),
                });
            }
            default_grid(mb)
        }
    };

    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for &n in &grid {
        let binning = make_binning(d, n)?;
        let stats = bin_stats(d, &binning, opts.zvar_mode)?;
        let value = match metric {
            Metric::Ence => metrics::ence(&stats),
            Metric::Zve => metrics::zve(&stats),
        };
        match value {
            Ok(value) => points.push(ScanPoint {
                n,
                sqrt_n: (n as f64).sqrt(),
                value,
            }),
            Err(e) => skipped.push(SkippedPoint {
                n,
                reason: e.to_string(),
            }),
        }
    }
    Ok(ScanSeries {
        metric,
        points,
        skipped,
    })
}

/// Ordinary least-squares fit of a scan series against `sqrt(N)`, with the
/// intercept-based calibration verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub intercept_se: f64,
    pub slope_se: f64,
    /// 95% confidence interval for the intercept,
    /// `intercept -/+ t(0.975, n-2) * se`.
    pub intercept_ci: (f64, f64),
    /// Only points with `sqrt_n` strictly greater than this entered the fit.
    pub threshold_sqrt_n: f64,
    pub n_points: usize,
    /// Ideal intercept: 0 for ENCE, 1 for ZVE.
    pub target: f64,
    /// Whether the confidence interval covers the target.
    pub calibrated: bool,
    /// Intercept minus target: the binning-independent estimate of the
    /// residual calibration error. Reported signed, never clamped.
    pub residual_error: f64,
}

/// Unweighted OLS of metric values on `sqrt(N)` over the points with
/// `sqrt(N)` strictly above `threshold_sqrt_n`.
pub fn fit_sqrt_n(series: &ScanSeries, threshold_sqrt_n: f64) -> Result<FitResult> {
    let pts: Vec<&ScanPoint> = series
        .points
        .iter()
        .filter(|p| p.sqrt_n > threshold_sqrt_n)
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points above threshold sqrt(N) = {threshold_sqrt_n}, have {n}"
        )));
    }
    let x_mean = ksum::mean(pts.iter().map(|p| p.sqrt_n), n);
    let y_mean = ksum::mean(pts.iter().map(|p| p.value), n);
    let sxx = ksum::sum(pts.iter().map(|p| (p.sqrt_n - x_mean) * (p.sqrt_n - x_mean)));
    if sxx <= 0.0 {
        return Err(Error::Fit("degenerate abscissa: all sqrt(N) equal".into()));
    }
    let sxy = ksum::sum(
        pts.iter()
            .map(|p| (p.sqrt_n - x_mean) * (p.value - y_mean)),
    );
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse = ksum::sum(pts.iter().map(|p| {
        let r = p.value - (intercept + slope * p.sqrt_n);
        r * r
    }));
    let df = (n - 2) as f64;
    let s2 = sse / df;
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / n as f64 + x_mean * x_mean / sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    let half = t * intercept_se;
    let ci = (intercept - half, intercept + half);
    let target = series.metric.target();
    Ok(FitResult {
        intercept,
        slope,
        intercept_se,
        slope_se,
        intercept_ci: ci,
        threshold_sqrt_n,
        n_points: n,
        target,
        calibrated: ci.0 <= target && target <= ci.1,
        residual_error: intercept - target,
    })
}
