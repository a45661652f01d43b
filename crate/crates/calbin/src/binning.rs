//! Equal-size, uncertainty-ordered partition of a dataset and the per-bin
//! statistics derived from it.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ksum;

/// How the per-bin z-score variance is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZVarMode {
    /// Mean-subtracted unbiased sample variance (denominator `size - 1`).
    #[default]
    Sample,
    /// Second moment about zero (denominator `size`), for callers that
    /// assume unbiased z-scores.
    ZeroMean,
}

/// An ordered partition of dataset indices into `N` equal-size bins.
///
/// Indices are sorted by increasing uncertainty (stable, so ties keep their
/// original row order) and dealt into consecutive bins. When `N` does not
/// divide `M`, the first `M mod N` bins receive one extra element, keeping
/// every bin within one element of every other.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    dataset_len: usize,
    order: Vec<usize>,
    offsets: Vec<usize>,
}

impl Binning {
    pub fn bin_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn dataset_len(&self) -> usize {
        self.dataset_len
    }

    /// Dataset indices of bin `i`, in increasing-uncertainty order.
    pub fn bin_indices(&self, i: usize) -> &[usize] {
        &self.order[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn bins(&self) -> impl Iterator<Item = &[usize]> {
        (0..self.bin_count()).map(move |i| self.bin_indices(i))
    }
}

/// Split `d` into `n` equal-size bins ordered by increasing uncertainty.
pub fn make_binning(d: &Dataset, n: usize) -> Result<Binning> {
    let m = d.len();
    if n < 1 || n > m {
        return Err(Error::Param {
            module: "binning",
            reason: format!("bin count {n} outside [1, {m}]"),
        });
    }
    let mut order: Vec<usize> = (0..m).collect();
    let u = d.uncertainties();
    // Stable: equal uncertainties keep original row order.
    order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).expect("finite by invariant"));

    let base = m / n;
    let extra = m % n;
    let mut offsets = Vec::with_capacity(n + 1);
    let mut pos = 0;
    offsets.push(0);
    for i in 0..n {
        pos += if i < extra { base + 1 } else { base };
        offsets.push(pos);
    }
    Ok(Binning {
        dataset_len: m,
        order,
        offsets,
    })
}

/// Largest bin count that keeps every bin at or above `min_size` elements,
/// capped at the dataset size. Returns 0 when no bin count qualifies.
pub fn max_bins(d: &Dataset, min_size: usize) -> usize {
    assert!(min_size >= 1, "min_size must be >= 1");
    (d.len() / min_size).min(d.len())
}

/// Per-bin mean variance, mean squared error and z-score variance.
///
/// The z-variance of a single-element bin is undefined and stored as
/// `None`; metrics that need it report an error instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStats {
    pub mv: Vec<f64>,
    pub mse: Vec<f64>,
    pub zvar: Vec<Option<f64>>,
    pub sizes: Vec<usize>,
}

impl BinStats {
    pub fn bin_count(&self) -> usize {
        self.mv.len()
    }
}

/// Compute the per-bin statistics of `d` under the partition `b`.
pub fn bin_stats(d: &Dataset, b: &Binning, zvar_mode: ZVarMode) -> Result<BinStats> {
    if b.dataset_len() != d.len() {
        return Err(Error::Param {
            module: "binning",
            reason: format!(
                "binning was built for {} rows, dataset has {}",
                b.dataset_len(),
                d.len()
            ),
        });
    }
    let errors = d.errors();
    let uncertainties = d.uncertainties();
    let n = b.bin_count();
    let mut mv = Vec::with_capacity(n);
    let mut mse = Vec::with_capacity(n);
    let mut zvar = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    for idx in b.bins() {
        let k = idx.len();
        sizes.push(k);
        mv.push(ksum::mean(
            idx.iter().map(|&j| uncertainties[j] * uncertainties[j]),
            k,
        ));
        mse.push(ksum::mean(idx.iter().map(|&j| errors[j] * errors[j]), k));
        if k < 2 {
            zvar.push(None);
            continue;
        }
        let z: Vec<f64> = idx.iter().map(|&j| errors[j] / uncertainties[j]).collect();
        let v = match zvar_mode {
            ZVarMode::Sample => {
                let zm = ksum::mean(z.iter().copied(), k);
                ksum::sum(z.iter().map(|zi| (zi - zm) * (zi - zm))) / (k - 1) as f64
            }
            ZVarMode::ZeroMean => ksum::mean(z.iter().map(|zi| zi * zi), k),
        };
        zvar.push(Some(v));
    }
    Ok(BinStats {
        mv,
        mse,
        zvar,
        sizes,
    })
}
