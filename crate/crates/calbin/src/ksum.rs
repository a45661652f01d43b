//! Compensated (Neumaier) summation.
//!
//! Binned statistics feed a linear regression, so accumulated sums must be
//! stable to input ordering at ~1e-12 relative tolerance.

/// Sum with a Neumaier compensation term.
pub(crate) fn sum<I>(xs: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut s = 0.0_f64;
    let mut c = 0.0_f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Compensated mean of exactly `n` items.
pub(crate) fn mean<I>(xs: I, n: usize) -> f64
where
    I: IntoIterator<Item = f64>,
{
    debug_assert!(n > 0);
    sum(xs) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_exactly_on_small_ints() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(sum(xs), 10.0);
    }

    #[test]
    fn recovers_cancellation() {
        // Naive summation loses the 1.0 entirely.
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(sum(xs), 1.0);
    }

    #[test]
    fn order_stability() {
        let forward: Vec<f64> = (1..=10_000).map(|i| 1.0 / i as f64).collect();
        let mut backward = forward.clone();
        backward.reverse();
        let a = sum(forward);
        let b = sum(backward);
        assert!(((a - b) / a).abs() < 1e-15);
    }
}
