//! Adaptive Simpson integration over a pre-split panel list.
//!
//! The integrands here are smooth except for a single absolute-value kink
//! and a sharp peak; callers place panel boundaries at the kink and across
//! the peak so that each panel is well behaved.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

/// Integrate `f` over consecutive panels `[edges[0], edges[1]], ...`,
/// each to absolute tolerance `tol_per_panel`.
pub(crate) fn integrate_panels<F>(f: &F, edges: &[f64], tol_per_panel: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if edges.len() < 2 {
        return Err(Error::Quadrature("need at least one panel".into()));
    }
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            return Err(Error::Quadrature(format!(
                "panel edges not increasing: {a} >= {b}"
            )));
        }
        total += panel(f, a, b, tol_per_panel)?;
    }
    Ok(total)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        // Richardson extrapolation term.
        return Ok(left + right + err / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}] after depth {MAX_DEPTH}"
        )));
    }
    let l = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}
