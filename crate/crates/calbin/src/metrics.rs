//! Calibration error metrics over binned statistics, and the
//! reliability-diagram series.

use serde::{Deserialize, Serialize};

use crate::binning::BinStats;
use crate::error::{Error, Result};
use crate::ksum;

/// Mean over bins of the relative gap between the root mean variance and
/// the root mean squared error, `|RMV_i - RMSE_i| / RMV_i`.
///
/// Reported as a fraction; multiply by 100 for the conventional percentage
/// presentation.
pub fn ence(stats: &BinStats) -> Result<f64> {
    let n = stats.bin_count();
    for (i, &mv) in stats.mv.iter().enumerate() {
        if mv <= 0.0 {
            return Err(Error::MetricUndefined {
                metric: "ence",
                bin: i,
                reason: "mean variance is zero".into(),
            });
        }
    }
    Ok(ksum::mean(
        stats.mv.iter().zip(&stats.mse).map(|(&mv, &mse)| {
            let rmv = mv.sqrt();
            (rmv - mse.sqrt()).abs() / rmv
        }),
        n,
    ))
}

/// Exponential of the mean absolute log of the per-bin z-score variances.
///
/// Equals 1 exactly when every bin has unit z-variance; always >= 1. The
/// derived relative error on variance calibration is `zve - 1`.
pub fn zve(stats: &BinStats) -> Result<f64> {
    let n = stats.bin_count();
    let mut logs = Vec::with_capacity(n);
    for (i, v) in stats.zvar.iter().enumerate() {
        match v {
            None => {
                return Err(Error::MetricUndefined {
                    metric: "zve",
                    bin: i,
                    reason: "bin has a single element, z-variance is undefined; \
                             use a smaller bin count"
                        .into(),
                })
            }
            Some(v) if *v <= 0.0 => {
                return Err(Error::MetricUndefined {
                    metric: "zve",
                    bin: i,
                    reason: format!("z-variance is {v}, log undefined"),
                })
            }
            Some(v) => logs.push(v.ln().abs()),
        }
    }
    Ok(ksum::mean(logs.iter().copied(), n).exp())
}

/// One reliability-diagram point: per-bin root mean variance against root
/// mean squared error, to be compared with the identity line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityPoint {
    pub bin: usize,
    pub size: usize,
    /// Root mean variance of the bin (abscissa).
    pub rmv: f64,
    /// Root mean squared error of the bin (ordinate).
    pub rmse: f64,
}

/// Per-bin (RMV, RMSE) points in bin order.
pub fn reliability_diagram(stats: &BinStats) -> Vec<ReliabilityPoint> {
    stats
        .mv
        .iter()
        .zip(&stats.mse)
        .zip(&stats.sizes)
        .enumerate()
        .map(|(i, ((&mv, &mse), &size))| ReliabilityPoint {
            bin: i,
            size,
            rmv: mv.sqrt(),
            rmse: mse.sqrt(),
        })
        .collect()
}
