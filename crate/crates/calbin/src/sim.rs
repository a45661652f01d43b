//! Synthetic studies: expected calibration-metric curves for homoscedastic
//! normal errors, full Monte Carlo realizations of the estimation pipeline,
//! and the closed-form oracle for the mean absolute deviation of binned
//! means.
//!
//! For errors drawn from a standard normal, the root mean squared error of
//! a bin of size `k` follows a chi distribution with `k` degrees of freedom
//! scaled by `1/sqrt(k)`. The expected metric value can therefore be
//! computed either by sampling that distribution or by deterministic
//! quadrature against its density; the two routes are kept independent so
//! each can validate the other.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binning::{bin_stats, make_binning, ZVarMode};
use crate::chi;
pub use crate::chi::{sample_chi, sample_normal};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics;
use crate::quad;
use crate::rng::{streams, RngStream};

/// Parameters of a synthetic homoscedastic study.
///
/// Errors are standard normal; `factor` is the claimed uncertainty, so
/// `factor = 1` is a calibrated dataset and any other value a uniform
/// miscalibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub m: usize,
    pub factor: f64,
    pub grid: Vec<usize>,
    pub draws: usize,
    pub realizations: usize,
    pub seed: u64,
}

impl SimSpec {
    fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Param {
                module: "sim",
                reason: "dataset size must be >= 1".into(),
            });
        }
        if !(self.factor > 0.0 && self.factor.is_finite()) {
            return Err(Error::Param {
                module: "sim",
                reason: format!("miscalibration factor must be positive, got {}", self.factor),
            });
        }
        if self.realizations < 1 || self.draws < 1 {
            return Err(Error::Param {
                module: "sim",
                reason: "draws and realizations must be >= 1".into(),
            });
        }
        if self.grid.is_empty() {
            return Err(Error::Param {
                module: "sim",
                reason: "bin-count grid is empty".into(),
            });
        }
        if let Some(&bad) = self.grid.iter().find(|&&n| n < 1 || n > self.m) {
            return Err(Error::Param {
                module: "sim",
                reason: format!("grid value {bad} outside [1, {}]", self.m),
            });
        }
        Ok(())
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of the expected ENCE of a calibrated-error,
/// homoscedastic dataset of size `m` split into `n` bins, with claimed
/// uncertainty `factor`.
///
/// Protocol: for each of the `n` bins, `draws` values of a chi variable
/// with `k = floor(m/n)` degrees of freedom are drawn and scaled by
/// `1/sqrt(k)`; the bin contributes the sample mean of `|x - factor| /
/// factor`; bins are then averaged.
pub fn expected_ence_chi<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    factor: f64,
    draws: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(expected_ence_chi_estimate(m, n, factor, draws, rng)?.value)
}

/// Like [`expected_ence_chi`] but also returns the Monte Carlo standard
/// error of the estimate.
pub fn expected_ence_chi_estimate<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    factor: f64,
    draws: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    if n < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: "bin count must be >= 1".into(),
        });
    }
    let k = m / n;
    if k < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: format!("bin size floor({m}/{n}) is zero"),
        });
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Param {
            module: "sim",
            reason: format!("miscalibration factor must be positive, got {factor}"),
        });
    }
    if draws < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: "draws must be >= 1".into(),
        });
    }
    let sampler = chi::ChiSampler::new(k as u64)?;
    let scale = 1.0 / (k as f64).sqrt();
    let mut acc = Welford::new();
    for _ in 0..n {
        for _ in 0..draws {
            let x = sampler.sample(rng) * scale;
            acc.push((x - factor).abs() / factor);
        }
    }
    Ok(McEstimate {
        value: acc.mean(),
        std_error: acc.std_error(),
    })
}

/// Deterministic counterpart of [`expected_ence_chi`]: the expectation of
/// `|x/sqrt(k) - factor| / factor` under the chi density with `k` degrees
/// of freedom, by adaptive quadrature to about 1e-9 absolute accuracy.
///
/// The integration domain is `[0, mode + 12 sigma]` of the density, split
/// at the absolute-value kink `x = factor * sqrt(k)` and into panels of
/// width `sigma` across the peak so the adaptive pass starts from well
/// behaved pieces.
pub fn expected_ence_quadrature(k: u64, factor: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: "degrees of freedom must be >= 1".into(),
        });
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Param {
            module: "sim",
            reason: format!("miscalibration factor must be positive, got {factor}"),
        });
    }
    let kf = k as f64;
    let sqrt_k = kf.sqrt();
    let mode = (kf - 1.0).max(0.0).sqrt();
    let sigma = chi::sd(kf).max(1e-6);
    let hi = mode + 12.0 * sigma;
    let kink = factor * sqrt_k;

    let mut edges = vec![0.0];
    for j in -12..=12 {
        let x = mode + j as f64 * sigma;
        if x > 0.0 && x < hi {
            edges.push(x);
        }
    }
    if kink > 0.0 && kink < hi {
        edges.push(kink);
    }
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * hi.max(1.0));

    let integrand = |x: f64| (x / sqrt_k - factor).abs() / factor * chi::pdf(x, kf);
    let tol = 1e-9 / edges.len() as f64;
    let value = quad::integrate_panels(&integrand, &edges, tol)?;
    if !value.is_finite() {
        return Err(Error::Quadrature("integral is not finite".into()));
    }
    Ok(value.max(0.0))
}

/// One Monte Carlo realization point: ENCE of a freshly drawn dataset at
/// one bin count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationPoint {
    pub realization: usize,
    pub n: usize,
    pub ence: f64,
}

/// Full-pipeline Monte Carlo: for each realization, draw `m` standard
/// normal errors, claim uncertainty `factor`, and run the binning + ENCE
/// pipeline at every bin count in the grid.
///
/// Realization `r` consumes the stream `streams::REALIZATION_BASE + r` of
/// the configured seed, so output is reproducible point by point
/// regardless of evaluation order.
pub fn mc_ence_realizations(spec: &SimSpec) -> Result<Vec<RealizationPoint>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.realizations * spec.grid.len());
    let mut errors = vec![0.0; spec.m];
    for r in 0..spec.realizations {
        let mut rng = RngStream::new(spec.seed, streams::REALIZATION_BASE + r as u64).rng();
        chi::fill_standard_normal(&mut rng, &mut errors);
        let d = Dataset::new(errors.clone(), vec![spec.factor; spec.m])?;
        for &n in &spec.grid {
            let b = make_binning(&d, n)?;
            let stats = bin_stats(&d, &b, ZVarMode::Sample)?;
            out.push(RealizationPoint {
                realization: r,
                n,
                ence: metrics::ence(&stats)?,
            });
        }
    }
    Ok(out)
}

/// Monte Carlo and closed-form values for the mean absolute deviation of
/// binned means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MadComparison {
    pub mc: f64,
    pub closed_form: f64,
}

/// Draw `m` values from `N(0, u_x)`, split them into `n` equal bins, and
/// average the absolute bin means; repeat and average over realizations.
/// Returns the Monte Carlo value next to the closed form
/// `u_x * sqrt(2 / (pi k)) = u_x * sqrt(2 n / (pi m))`.
///
/// When `n` does not divide `m` each bin holds exactly `floor(m/n)` values
/// and the trailing remainder is not drawn; the closed form uses the same
/// truncated size.
pub fn mad_binned_means<R: Rng + ?Sized>(
    u_x: f64,
    m: usize,
    n: usize,
    realizations: usize,
    rng: &mut R,
) -> Result<MadComparison> {
    if !(u_x > 0.0 && u_x.is_finite()) {
        return Err(Error::Param {
            module: "sim",
            reason: format!("u_x must be positive, got {u_x}"),
        });
    }
    if n < 1 || m < n {
        return Err(Error::Param {
            module: "sim",
            reason: format!("need 1 <= n <= m, got n={n}, m={m}"),
        });
    }
    if realizations < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: "realizations must be >= 1".into(),
        });
    }
    let k = m / n;
    let mut acc = 0.0;
    let mut draws = vec![0.0; k];
    for _ in 0..realizations {
        let mut mad = 0.0;
        for _ in 0..n {
            chi::fill_standard_normal(rng, &mut draws);
            let mean = draws.iter().sum::<f64>() * u_x / k as f64;
            mad += mean.abs();
        }
        acc += mad / n as f64;
    }
    let closed_form = u_x * (2.0 / (std::f64::consts::PI * k as f64)).sqrt();
    Ok(MadComparison {
        mc: acc / realizations as f64,
        closed_form,
    })
}

/// Running mean and standard error.
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn std_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand_distr::{Distribution, Normal};

    /// Reference values computed independently with adaptive quadrature of
    /// the chi density (scipy.integrate.quad, 1e-12 tolerances).
    const QUAD_REFERENCE: &[(u64, f64, f64)] = &[
        (1, 1.0, 0.535377321545),
        (2, 1.0, 0.392578659828),
        (10, 1.0, 0.178289650016),
        (100, 1.0, 0.056418576005),
        (1000, 1.0, 0.017841239955),
        (10, 1.1, 0.188104365850),
        (100, 1.1, 0.097681004328),
        (1000, 1.1, 0.091136378825),
        (10, 1.25, 0.240830752549),
        (100, 1.25, 0.202006002979),
        (1000, 1.25, 0.200199974969),
        (138, 1.0, 0.048026835970),
        (5000, 1.0, 0.007978845586),
        (5000, 1.25, 0.200039999000),
    ];

    #[test]
    fn quadrature_matches_reference_table() {
        for &(k, u, expected) in QUAD_REFERENCE {
            let got = expected_ence_quadrature(k, u).unwrap();
            assert!(
                (got - expected).abs() < 5e-8,
                "k={k} u={u}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn quadrature_cross_checked_by_sampling_at_k1() {
        // Independent oracle: |N(0,1)| sampled directly, no chi sampler.
        let quad = expected_ence_quadrature(1, 1.0).unwrap();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = RngStream::new(41, streams::SCRATCH).rng();
        let n = 10_000_000;
        let mut acc = Welford::new();
        for _ in 0..n {
            let x: f64 = normal.sample(&mut rng);
            acc.push((x.abs() - 1.0).abs());
        }
        assert!(
            (quad - acc.mean()).abs() < 4.0 * acc.std_error(),
            "quad {quad} vs mc {} (se {})",
            acc.mean(),
            acc.std_error()
        );
    }

    #[test]
    fn quadrature_large_k_normal_limit() {
        let k = 5000u64;
        let approx = (1.0 / (std::f64::consts::PI * k as f64)).sqrt();
        let got = expected_ence_quadrature(k, 1.0).unwrap();
        assert!((got - approx).abs() / approx < 0.01);
    }

    #[test]
    fn quadrature_bias_dominated_limit() {
        // Large bins and strong miscalibration: the value approaches
        // (u-1)/u, the plain relative error.
        for &(k, u) in &[(500u64, 1.25f64), (500, 2.0), (5000, 2.0)] {
            let target = (u - 1.0) / u;
            let got = expected_ence_quadrature(k, u).unwrap();
            assert!(
                (got - target).abs() / target < 0.05,
                "k={k} u={u}: {got} vs {target}"
            );
        }
    }

    #[test]
    fn quadrature_increasing_in_bin_count() {
        let m = 5000usize;
        let mut last = 0.0;
        for n in [1usize, 4, 16, 64, 166] {
            let v = expected_ence_quadrature((m / n) as u64, 1.0).unwrap();
            assert!(v > last, "not increasing at n={n}");
            last = v;
        }
    }

    #[test]
    fn expected_chi_five_percent_anchor() {
        let mut rng = RngStream::new(7, streams::EXPECTED_BASE).rng();
        let v = expected_ence_chi(5000, 36, 1.0, 100_000, &mut rng).unwrap();
        assert!((0.04..0.06).contains(&v), "got {v}");
    }

    #[test]
    fn expected_chi_plateau_at_strong_miscalibration() {
        let mut rng = RngStream::new(8, streams::EXPECTED_BASE).rng();
        let v = expected_ence_chi(5000, 1, 1.25, 100_000, &mut rng).unwrap();
        assert!((v - 0.2).abs() < 0.005, "got {v}");
    }

    #[test]
    fn expected_chi_slope_matches_quadrature_oracle() {
        // Line through the origin fitted to the curve over sqrt(N).
        let m = 5000usize;
        let mut num = 0.0;
        let mut den = 0.0;
        let mut rng = RngStream::new(9, streams::EXPECTED_BASE).rng();
        for n in [4usize, 16, 36, 64, 100] {
            let s = (n as f64).sqrt();
            let v = expected_ence_chi(m, n, 1.0, 100_000, &mut rng).unwrap();
            num += s * v;
            den += s * s;
        }
        let slope = num / den;
        let target = 1.0 / (std::f64::consts::PI * m as f64).sqrt();
        assert!(
            (slope - target).abs() / target < 0.05,
            "slope {slope} vs {target}"
        );
    }

    #[test]
    fn chi_mc_agrees_with_quadrature() {
        let mut rng = RngStream::new(10, streams::EXPECTED_BASE).rng();
        let est = expected_ence_chi_estimate(40, 4, 1.0, 100_000, &mut rng).unwrap();
        let quad = expected_ence_quadrature(10, 1.0).unwrap();
        assert!(
            (est.value - quad).abs() < 4.0 * est.std_error,
            "mc {} vs quad {quad} (se {})",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn realizations_are_deterministic() {
        let spec = SimSpec {
            m: 500,
            factor: 1.0,
            grid: vec![1, 4, 16],
            draws: 1,
            realizations: 5,
            seed: 42,
        };
        let a = mc_ence_realizations(&spec).unwrap();
        let b = mc_ence_realizations(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_bin_realization_reduces_to_rmse_gap() {
        let spec = SimSpec {
            m: 100,
            factor: 1.0,
            grid: vec![1],
            draws: 1,
            realizations: 1,
            seed: 11,
        };
        let points = mc_ence_realizations(&spec).unwrap();
        assert_eq!(points.len(), 1);
        // Redraw the same stream to compute |RMSE - 1| directly.
        let mut rng = RngStream::new(11, streams::REALIZATION_BASE).rng();
        let mut errors = vec![0.0; 100];
        chi::fill_standard_normal(&mut rng, &mut errors);
        let mse = errors.iter().map(|e| e * e).sum::<f64>() / 100.0;
        let direct = (mse.sqrt() - 1.0).abs();
        assert!((points[0].ence - direct).abs() < 1e-12);
    }

    #[test]
    fn realization_means_match_expected_curve() {
        let spec = SimSpec {
            m: 1000,
            factor: 1.0,
            grid: vec![1, 4, 16],
            draws: 1,
            realizations: 30,
            seed: 12,
        };
        let points = mc_ence_realizations(&spec).unwrap();
        for &n in &spec.grid {
            let vals: Vec<f64> = points.iter().filter(|p| p.n == n).map(|p| p.ence).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (vals.len() - 1) as f64;
            let se = (var / vals.len() as f64).sqrt();
            let mut rng = RngStream::new(99, streams::EXPECTED_BASE).rng();
            let expected = expected_ence_chi(1000, n, 1.0, 200_000, &mut rng).unwrap();
            assert!(
                (mean - expected).abs() < 3.0 * se,
                "n={n}: mean {mean} vs expected {expected} (se {se})"
            );
        }
    }

    #[test]
    fn mad_closed_forms() {
        let mut rng = RngStream::new(13, streams::MAD_BASE).rng();
        let r = mad_binned_means(1.0, 10_000, 100, 200, &mut rng).unwrap();
        assert!((r.closed_form - 0.079_788_456_080_286_54).abs() < 1e-12);
        assert!((r.mc / r.closed_form - 1.0).abs() < 0.02, "{r:?}");

        let r1 = mad_binned_means(1.0, 10_000, 1, 50, &mut rng).unwrap();
        assert!((r1.closed_form - 0.007_978_845_608_028_654).abs() < 1e-12);
    }

    #[test]
    fn mad_linear_in_scale() {
        let mut rng = RngStream::new(14, streams::MAD_BASE).rng();
        let a = mad_binned_means(1.0, 4000, 40, 100, &mut rng).unwrap();
        let mut rng = RngStream::new(14, streams::MAD_BASE).rng();
        let b = mad_binned_means(2.0, 4000, 40, 100, &mut rng).unwrap();
        assert_eq!(b.closed_form, 2.0 * a.closed_form);
        // Same stream, same draws: the MC value scales exactly too.
        assert!((b.mc - 2.0 * a.mc).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        let mut rng = RngStream::new(0, 0).rng();
        assert!(expected_ence_chi(10, 20, 1.0, 10, &mut rng).is_err());
        assert!(expected_ence_chi(10, 0, 1.0, 10, &mut rng).is_err());
        assert!(expected_ence_chi(10, 2, -1.0, 10, &mut rng).is_err());
        assert!(expected_ence_quadrature(0, 1.0).is_err());
        assert!(expected_ence_quadrature(10, 0.0).is_err());
        assert!(mad_binned_means(1.0, 10, 20, 5, &mut rng).is_err());
        let bad = SimSpec {
            m: 10,
            factor: 1.0,
            grid: vec![20],
            draws: 1,
            realizations: 1,
            seed: 0,
        };
        assert!(mc_ence_realizations(&bad).is_err());
    }
}
