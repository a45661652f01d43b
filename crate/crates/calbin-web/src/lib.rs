//! Browser bindings for the calibration-metrics library.
//!
//! Three operations back the demo page, all JSON-in/JSON-out so the
//! JavaScript side stays a thin plotting layer:
//!
//! * [`scan_report`] — synthetic dataset, bin-count sweep and intercept
//!   fit for ENCE and ZVE;
//! * [`reliability`] — per-bin reliability diagram plus both metrics at a
//!   single bin count;
//! * [`expected_curves`] — deterministic expected-ENCE curves over a grid
//!   of bin counts for several miscalibration factors.
//!
//! The synthetic data model matches the library's simulation routines:
//! standard normal errors with a constant claimed uncertainty `factor`, so
//! `factor = 1` is calibrated and anything else uniformly miscalibrated.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use calbin::{
    bin_stats, calibration_report, default_grid, ence, expected_ence_quadrature, make_binning,
    reliability_diagram, sample_normal, streams, zve, Dataset, ReliabilityPoint, ReportConfig,
    RngStream, ZVarMode,
};

fn synthetic(m: usize, factor: f64, seed: u64) -> Result<Dataset, String> {
    if !(2..=2_000_000).contains(&m) {
        return Err(format!("dataset size {m} outside [2, 2000000]"));
    }
    let mut rng = RngStream::new(seed, streams::SCRATCH).rng();
    let mut errors = Vec::with_capacity(m);
    for _ in 0..m {
        errors.push(sample_normal(&mut rng, 0.0, 1.0).map_err(|e| e.to_string())?);
    }
    Dataset::new(errors, vec![factor; m]).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct ScanParams {
    m: usize,
    factor: f64,
    seed: u64,
    #[serde(default)]
    min_bin_size: Option<usize>,
    #[serde(default)]
    fit_threshold: Option<f64>,
}

fn scan_report_impl(params: &str) -> Result<String, String> {
    let p: ScanParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
    let d = synthetic(p.m, p.factor, p.seed)?;
    let config = ReportConfig {
        input: Some(format!("synthetic(m={}, factor={}, seed={})", p.m, p.factor, p.seed)),
        min_bin_size: p.min_bin_size.unwrap_or(30),
        fit_threshold: p.fit_threshold.unwrap_or(0.0),
        seed: Some(p.seed),
        ..Default::default()
    };
    let report = calibration_report(&d, &config).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct ReliabilityParams {
    m: usize,
    factor: f64,
    seed: u64,
    bins: usize,
}

#[derive(Serialize)]
struct ReliabilityOutput {
    bins: usize,
    points: Vec<ReliabilityPoint>,
    ence: Option<f64>,
    zve: Option<f64>,
}

fn reliability_impl(params: &str) -> Result<String, String> {
    let p: ReliabilityParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
    let d = synthetic(p.m, p.factor, p.seed)?;
    let binning = make_binning(&d, p.bins).map_err(|e| e.to_string())?;
    let stats = bin_stats(&d, &binning, ZVarMode::Sample).map_err(|e| e.to_string())?;
    let output = ReliabilityOutput {
        bins: p.bins,
        points: reliability_diagram(&stats),
        ence: ence(&stats).ok(),
        zve: zve(&stats).ok(),
    };
    serde_json::to_string(&output).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct CurveParams {
    m: usize,
    factors: Vec<f64>,
    #[serde(default)]
    min_bin_size: Option<usize>,
}

#[derive(Serialize)]
struct CurvePoint {
    factor: f64,
    n: usize,
    sqrt_n: f64,
    value: f64,
}

fn expected_curves_impl(params: &str) -> Result<String, String> {
    let p: CurveParams = serde_json::from_str(params).map_err(|e| e.to_string())?;
    if p.m < 2 {
        return Err("m must be at least 2".into());
    }
    if p.factors.is_empty() || p.factors.len() > 12 {
        return Err("need between 1 and 12 factors".into());
    }
    let min_bin_size = p.min_bin_size.unwrap_or(30).max(1);
    let max_bins = (p.m / min_bin_size).min(p.m);
    if max_bins < 1 {
        return Err(format!(
            "m = {} cannot form bins of at least {min_bin_size} points",
            p.m
        ));
    }
    let grid = default_grid(max_bins);
    let mut rows = Vec::with_capacity(grid.len() * p.factors.len());
    for &factor in &p.factors {
        for &n in &grid {
            let value = expected_ence_quadrature((p.m / n) as u64, factor)
                .map_err(|e| e.to_string())?;
            rows.push(CurvePoint {
                factor,
                n,
                sqrt_n: (n as f64).sqrt(),
                value,
            });
        }
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Sweep the bin count on a synthetic dataset and fit both metrics
/// against sqrt(N). Parameters: `{"m", "factor", "seed",
/// "min_bin_size"?, "fit_threshold"?}`; returns the full report document.
#[wasm_bindgen]
pub fn scan_report(params: &str) -> Result<String, JsValue> {
    scan_report_impl(params).map_err(|e| JsValue::from_str(&e))
}

/// Reliability diagram of a synthetic dataset at one bin count.
/// Parameters: `{"m", "factor", "seed", "bins"}`.
#[wasm_bindgen]
pub fn reliability(params: &str) -> Result<String, JsValue> {
    reliability_impl(params).map_err(|e| JsValue::from_str(&e))
}

/// Expected ENCE curves by quadrature for several miscalibration factors.
/// Parameters: `{"m", "factors", "min_bin_size"?}`.
#[wasm_bindgen]
pub fn expected_curves(params: &str) -> Result<String, JsValue> {
    expected_curves_impl(params).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
