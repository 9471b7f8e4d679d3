//! Scalar root finding: bisection as the convergence guarantee, Newton as an
//! accelerator when a derivative is supplied.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, Real};

const MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]`; `f` must change sign across the bracket.
/// Converges to an abscissa interval of width `tol * max(1, |x|)`.
pub fn find_root<S: Real, F: Fn(S) -> S>(f: F, lo: S, hi: S, tol: S) -> Result<S> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketInvalid {
            lo: as_f64(lo),
            hi: as_f64(hi),
        });
    }
    for _ in 0..MAX_ITER {
        let mid = lo + (hi - lo) * lit(0.5);
        if (hi - lo).abs() <= tol * mid.abs().max(S::one()) || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == S::zero() {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * lit(0.5))
}

/// Newton iteration safeguarded by a bisection bracket. Falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
pub fn find_root_newton<S: Real, F, G>(f: F, df: G, lo: S, hi: S, tol: S) -> Result<S>
where
    F: Fn(S) -> S,
    G: Fn(S) -> S,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketInvalid {
            lo: as_f64(lo),
            hi: as_f64(hi),
        });
    }
    let mut x = lo + (hi - lo) * lit(0.5);
    let mut fx = f(x);
    for _ in 0..MAX_ITER {
        if fx == S::zero() || (hi - lo).abs() <= tol * x.abs().max(S::one()) {
            return Ok(x);
        }
        // shrink the bracket
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = if d != S::zero() { x - fx / d } else { x };
        x = if newton > lo && newton < hi {
            newton
        } else {
            lo + (hi - lo) * lit(0.5)
        };
        fx = f(x);
    }
    Ok(x)
}
