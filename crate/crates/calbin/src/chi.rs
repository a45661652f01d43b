//! Chi distribution with `k` degrees of freedom: the sampling law of the
//! root mean square of `k` standard normal draws, scaled by `sqrt(k)`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

/// Density of the chi distribution with `k` degrees of freedom.
///
/// Evaluated through logs so that large `k` does not overflow the gamma
/// function.
pub(crate) fn pdf(x: f64, k: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        // x^(k-1) term: finite only for k = 1.
        return if k == 1.0 {
            (2.0 / std::f64::consts::PI).sqrt()
        } else {
            0.0
        };
    }
    let ln = (k - 1.0) * x.ln() - 0.5 * x * x - (0.5 * k - 1.0) * std::f64::consts::LN_2
        - ln_gamma(0.5 * k);
    ln.exp()
}

/// Mean of the chi distribution: `sqrt(2) * Gamma((k+1)/2) / Gamma(k/2)`.
pub(crate) fn mean(k: f64) -> f64 {
    std::f64::consts::SQRT_2 * (ln_gamma(0.5 * (k + 1.0)) - ln_gamma(0.5 * k)).exp()
}

/// Standard deviation of the chi distribution.
pub(crate) fn sd(k: f64) -> f64 {
    let m = mean(k);
    (k - m * m).max(0.0).sqrt()
}

/// Draw from the chi distribution as the square root of a
/// gamma(k/2, scale 2) variate. O(1) in `k`, unlike summing `k` squared
/// normals.
pub fn sample_chi<R: Rng + ?Sized>(rng: &mut R, k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Param {
            module: "sim",
            reason: "degrees of freedom must be >= 1".into(),
        });
    }
    let gamma = Gamma::new(0.5 * k as f64, 2.0).map_err(|e| Error::Sim(e.to_string()))?;
    Ok(gamma.sample(rng).sqrt())
}

/// Draw from a normal distribution with the given mean and standard
/// deviation.
pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
        return Err(Error::Param {
            module: "sim",
            reason: format!("normal(mean={mean}, sd={sd}) is not a valid distribution"),
        });
    }
    let normal = Normal::new(mean, sd).map_err(|e| Error::Sim(e.to_string()))?;
    Ok(normal.sample(rng))
}

/// Fill `out` with standard normal draws.
pub(crate) fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");
    for slot in out.iter_mut() {
        *slot = normal.sample(rng);
    }
}

/// Reusable chi sampler for tight Monte Carlo loops.
pub(crate) struct ChiSampler {
    gamma: Gamma<f64>,
}

impl ChiSampler {
    pub(crate) fn new(k: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Param {
                module: "sim",
                reason: "degrees of freedom must be >= 1".into(),
            });
        }
        let gamma = Gamma::new(0.5 * k as f64, 2.0).map_err(|e| Error::Sim(e.to_string()))?;
        Ok(Self { gamma })
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{streams, RngStream};

    #[test]
    fn chi_mean_small_k_identities() {
        // k=1: half-normal mean sqrt(2/pi); k=2: Rayleigh mean sqrt(pi/2).
        assert!((mean(1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((mean(2.0) - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn chi_sample_mean_matches_gamma_identity() {
        // Mean of chi_10 is sqrt(2) Gamma(5.5)/Gamma(5) ~= 3.0843277598.
        let expected = mean(10.0);
        assert!((expected - 3.084_327_759_799_864).abs() < 1e-9);
        let mut rng = RngStream::new(21, streams::SCRATCH).rng();
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += sample_chi(&mut rng, 10).unwrap();
        }
        let sample_mean = acc / n as f64;
        let se = sd(10.0) / (n as f64).sqrt();
        assert!(
            (sample_mean - expected).abs() < 3.0 * se,
            "sample mean {sample_mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn normal_variance_moment_test() {
        let mut rng = RngStream::new(22, streams::SCRATCH).rng();
        let (mean_p, sd_p) = (0.3, 1.7);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_normal(&mut rng, mean_p, sd_p).unwrap())
            .collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        // Var of the sample variance of a normal is 2 sigma^4 / (n-1).
        let se = (2.0 / (n - 1) as f64).sqrt() * sd_p * sd_p;
        assert!((var - sd_p * sd_p).abs() < 3.0 * se);
    }

    #[test]
    fn sampler_determinism() {
        let a: Vec<f64> = {
            let mut rng = RngStream::new(5, 17).rng();
            (0..10).map(|_| sample_chi(&mut rng, 42).unwrap()).collect()
        };
        let b: Vec<f64> = {
            let mut rng = RngStream::new(5, 17).rng();
            (0..10).map(|_| sample_chi(&mut rng, 42).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngStream::new(0, 0).rng();
        assert!(sample_chi(&mut rng, 0).is_err());
        assert!(sample_normal(&mut rng, 0.0, 0.0).is_err());
        assert!(sample_normal(&mut rng, f64::NAN, 1.0).is_err());
    }
}
