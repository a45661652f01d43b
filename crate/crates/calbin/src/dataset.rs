//! Paired error/uncertainty samples and the global calibration statistics.

use crate::error::{Error, Result};
use crate::ksum;

/// A set of prediction errors paired with claimed uncertainties.
///
/// Both sequences have the same length `M >= 1`, every value is finite and
/// every uncertainty is strictly positive. Invalid rows are rejected at
/// construction rather than dropped: silent filtering would change `M` and
/// with it every binned statistic computed downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    errors: Vec<f64>,
    uncertainties: Vec<f64>,
}

impl Dataset {
    pub fn new(errors: Vec<f64>, uncertainties: Vec<f64>) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::Dataset("dataset must contain at least one row".into()));
        }
        if errors.len() != uncertainties.len() {
            return Err(Error::Dataset(format!(
                "length mismatch: {} errors vs {} uncertainties",
                errors.len(),
                uncertainties.len()
            )));
        }
        for (i, &e) in errors.iter().enumerate() {
            if !e.is_finite() {
                return Err(Error::Dataset(format!("error at row {} is not finite", i + 1)));
            }
        }
        for (i, &u) in uncertainties.iter().enumerate() {
            if !u.is_finite() {
                return Err(Error::Dataset(format!(
                    "uncertainty at row {} is not finite",
                    i + 1
                )));
            }
            if u <= 0.0 {
                return Err(Error::Dataset(format!(
                    "uncertainty at row {} is not positive ({})",
                    i + 1,
                    u
                )));
            }
        }
        Ok(Self {
            errors,
            uncertainties,
        })
    }

    /// Number of rows `M`.
    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn uncertainties(&self) -> &[f64] {
        &self.uncertainties
    }

    /// Mean of the squared uncertainties.
    pub fn mean_variance(&self) -> f64 {
        ksum::mean(self.uncertainties.iter().map(|u| u * u), self.len())
    }

    /// Mean of the squared errors.
    ///
    /// No bias correction is applied; [`Dataset::mean_error`] is available as
    /// a diagnostic but is never subtracted.
    pub fn mean_squared_error(&self) -> f64 {
        ksum::mean(self.errors.iter().map(|e| e * e), self.len())
    }

    /// Mean error, reported as a diagnostic only.
    pub fn mean_error(&self) -> f64 {
        ksum::mean(self.errors.iter().copied(), self.len())
    }

    /// Element-wise error/uncertainty ratios.
    pub fn z_scores(&self) -> Vec<f64> {
        self.errors
            .iter()
            .zip(&self.uncertainties)
            .map(|(e, u)| e / u)
            .collect()
    }

    /// Unbiased sample variance of all z-scores; `None` when `M < 2`.
    pub fn z_variance(&self) -> Option<f64> {
        let m = self.len();
        if m < 2 {
            return None;
        }
        let z = self.z_scores();
        let mean = ksum::mean(z.iter().copied(), m);
        let ss = ksum::sum(z.iter().map(|zi| (zi - mean) * (zi - mean)));
        Some(ss / (m - 1) as f64)
    }
}

/// One raw row: a reference value, a prediction and its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub reference: f64,
    pub prediction: f64,
    pub uncertainty: f64,
}

/// Builds a dataset from raw records: the error is `reference - prediction`
/// and the uncertainty is taken as-is.
///
/// Rejects non-positive or non-finite uncertainties (and non-finite values)
/// with the 1-based index of the offending record.
pub fn from_raw(records: &[RawRecord]) -> Result<Dataset> {
    if records.is_empty() {
        return Err(Error::Dataset("no records".into()));
    }
    let mut errors = Vec::with_capacity(records.len());
    let mut uncertainties = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let row = i + 1;
        if !r.reference.is_finite() || !r.prediction.is_finite() {
            return Err(Error::Record {
                row,
                reason: "reference or prediction is not finite".into(),
            });
        }
        if !r.uncertainty.is_finite() {
            return Err(Error::Record {
                row,
                reason: "uncertainty is not finite".into(),
            });
        }
        if r.uncertainty <= 0.0 {
            return Err(Error::Record {
                row,
                reason: format!("uncertainty is not positive ({})", r.uncertainty),
            });
        }
        errors.push(r.reference - r.prediction);
        uncertainties.push(r.uncertainty);
    }
    Dataset::new(errors, uncertainties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn mean_variance_constant() {
        let d = Dataset::new(vec![0.0; 4], vec![1.0; 4]).unwrap();
        assert_eq!(d.mean_variance(), 1.0);
    }

    #[test]
    fn mean_variance_hand() {
        let d = Dataset::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(d.mean_variance(), 2.5);
    }

    #[test]
    fn mean_variance_half_normal_draws() {
        // |N(0,1)| draws: E[u^2] = 1, Var(u^2) = 2.
        let mut rng = RngStream::new(7, 0).rng();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let m = 10_000;
        let u: Vec<f64> = (0..m)
            .map(|_| {
                let x: f64 = normal.sample(&mut rng);
                x.abs()
            })
            .collect();
        let d = Dataset::new(vec![0.0; m], u).unwrap();
        let se = (2.0 / m as f64).sqrt();
        assert!((d.mean_variance() - 1.0).abs() < 3.0 * se);
    }

    #[test]
    fn mse_zero_errors() {
        let d = Dataset::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert_eq!(d.mean_squared_error(), 0.0);
    }

    #[test]
    fn mse_hand() {
        let d = Dataset::new(vec![3.0, -4.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(d.mean_squared_error(), 12.5);
    }

    #[test]
    fn mse_standard_normal_draws() {
        let mut rng = RngStream::new(8, 0).rng();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let m = 100_000;
        let e: Vec<f64> = (0..m).map(|_| normal.sample(&mut rng)).collect();
        let d = Dataset::new(e, vec![1.0; m]).unwrap();
        let se = (2.0 / m as f64).sqrt();
        assert!((d.mean_squared_error() - 1.0).abs() < 3.0 * se);
    }

    #[test]
    fn z_scores_hand() {
        let d = Dataset::new(vec![2.0, -3.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(d.z_scores(), vec![1.0, -1.0]);
        let d = Dataset::new(vec![0.0], vec![5.0]).unwrap();
        assert_eq!(d.z_scores(), vec![0.0]);
    }

    #[test]
    fn z_scores_scale_invariant() {
        let mut rng = RngStream::new(9, 0).rng();
        let e: Vec<f64> = (0..100).map(|_| rng.random_range(-2.0..2.0)).collect();
        let u: Vec<f64> = (0..100).map(|_| rng.random_range(0.1..3.0)).collect();
        let c = 7.3;
        let d = Dataset::new(e.clone(), u.clone()).unwrap();
        let scaled = Dataset::new(
            e.iter().map(|x| c * x).collect(),
            u.iter().map(|x| c * x).collect(),
        )
        .unwrap();
        for (a, b) in d.z_scores().iter().zip(scaled.z_scores()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn from_raw_transform() {
        let d = from_raw(&[RawRecord {
            reference: 1.5,
            prediction: 1.0,
            uncertainty: 0.2,
        }])
        .unwrap();
        assert_eq!(d.errors(), &[0.5]);
        assert_eq!(d.uncertainties(), &[0.2]);

        let d = from_raw(&[RawRecord {
            reference: 1.0,
            prediction: 1.0,
            uncertainty: 0.1,
        }])
        .unwrap();
        assert_eq!(d.errors(), &[0.0]);
    }

    #[test]
    fn from_raw_rejects_bad_uncertainty_with_row() {
        let records = vec![
            RawRecord {
                reference: 1.0,
                prediction: 0.5,
                uncertainty: 0.1,
            },
            RawRecord {
                reference: 1.0,
                prediction: 0.5,
                uncertainty: 0.0,
            },
        ];
        let err = from_raw(&records).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Dataset::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(Dataset::new(vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(Dataset::new(vec![0.0], vec![0.0]).is_err());
        assert!(Dataset::new(vec![], vec![]).is_err());
        assert!(Dataset::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn summation_stable_under_permutation() {
        let mut rng = RngStream::new(10, 0).rng();
        let u: Vec<f64> = (0..5000).map(|_| rng.random_range(0.01..100.0)).collect();
        let d1 = Dataset::new(vec![0.0; 5000], u.clone()).unwrap();
        let mut shuffled = u;
        // Deterministic Fisher-Yates.
        for i in (1..shuffled.len()).rev() {
            let j = rng.random_range(0..=i);
            shuffled.swap(i, j);
        }
        let d2 = Dataset::new(vec![0.0; 5000], shuffled).unwrap();
        let a = d1.mean_variance();
        let b = d2.mean_variance();
        assert!(((a - b) / a).abs() < 1e-13);
    }

    #[test]
    fn from_raw_mean_variance_matches_direct() {
        let records: Vec<RawRecord> = (0..50)
            .map(|i| RawRecord {
                reference: i as f64,
                prediction: 0.5 * i as f64,
                uncertainty: 0.1 + i as f64 * 0.01,
            })
            .collect();
        let d = from_raw(&records).unwrap();
        let direct =
            records.iter().map(|r| r.uncertainty * r.uncertainty).sum::<f64>() / 50.0;
        assert!((d.mean_variance() - direct).abs() < 1e-12 * direct);
    }
}
