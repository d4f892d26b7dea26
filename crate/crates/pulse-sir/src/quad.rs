//! Adaptive quadrature.
//!
//! Adaptive Simpson with absolute-error control, used for the period
//! integrals of the disease-free orbit (reproduction numbers, seasonal
//! threshold). The integrands are smooth but near-jump-shaped for large
//! `A T`, hence the generous bisection limit.

use crate::error::{Error, Result};

/// Default absolute tolerance for period integrals.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Default interval bisection limit.
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite bounds [{a}, {b}]")));
    }
    if abs_tol <= 0.0 {
        return Err(Error::Quadrature(format!(
            "tolerance must be positive, got {abs_tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    for (x, v) in [(a, fa), (m, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("integrand non-finite at {x}")));
        }
    }
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, abs_tol, max_depth)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
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
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(Error::Quadrature(format!(
            "integrand non-finite inside [{a}, {b}]"
        )));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Richardson: Simpson error contracts by 1/15 on bisection.
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "bisection limit reached on [{a}, {b}] (residual {:.3e} > {:.3e})",
            delta.abs() / 15.0,
            tol
        )));
    }
    let lv = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let rv = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}
