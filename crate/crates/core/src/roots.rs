//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Iterates until the bracket is no wider than `tol` or stops shrinking in
/// floating point, and returns the midpoint of the final bracket. An exact
/// zero at either end is returned as is.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::RootNotBracketed { lo, hi, f_lo, f_hi });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection to the resolution of the floating-point grid.
pub fn bisect_full<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    bisect(f, lo, hi, 0.0)
}
