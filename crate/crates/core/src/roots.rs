//! Bracketed root refinement used by the exponent inverse and the
//! partial-fraction factorisation.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

const MAX_ITER: usize = 300;

/// Newton iteration kept inside a sign-change bracket `[lo, hi]`.
///
/// `f` returns the function value and its derivative. Steps that leave the
/// bracket or fail to halve the residual fall back to bisection.
pub(crate) fn safeguarded_newton<T, F>(f: F, lo: T, hi: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> (T, T),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::ConvergenceFailure(format!(
            "no sign change on [{}, {}]",
            to_f64(lo),
            to_f64(hi)
        )));
    }
    let lo_negative = f_lo < T::zero();
    let half = lit::<T>(0.5);
    let eps = T::epsilon();

    let mut x = half * (lo + hi);
    let mut last_residual = T::infinity();
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if (fx < T::zero()) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if width <= lit::<T>(4.0) * eps * x.abs().max(T::min_positive_value()) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let usable =
            newton.is_finite() && newton > lo && newton < hi && fx.abs() <= half * last_residual;
        last_residual = fx.abs();
        let next = if usable { newton } else { half * (lo + hi) };
        if (next - x).abs() <= eps * x.abs().max(eps) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::ConvergenceFailure(format!(
        "iteration limit on [{}, {}]",
        to_f64(lo),
        to_f64(hi)
    )))
}

/// Finds the unique sign change on the open interval `(a, b)` when `g(a+) > 0`
/// and `g(b-) < 0` (either end may be a pole), then refines it.
///
/// The probe walks geometrically toward whichever end is missing a sign.
pub(crate) fn root_between_poles<T, F>(f: F, a: T, b: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> (T, T),
{
    let half = lit::<T>(0.5);
    let mid = half * (a + b);
    let (f_mid, _) = f(mid);
    let (lo, hi) = if f_mid > T::zero() {
        let mut gap = b - mid;
        let mut hi = mid;
        for _ in 0..2000 {
            gap = gap * half;
            hi = b - gap;
            if f(hi).0 < T::zero() || hi >= b {
                break;
            }
        }
        (mid, hi)
    } else {
        let mut gap = mid - a;
        let mut lo = mid;
        for _ in 0..2000 {
            gap = gap * half;
            lo = a + gap;
            if f(lo).0 > T::zero() || lo <= a {
                break;
            }
        }
        (lo, mid)
    };
    safeguarded_newton(f, lo, hi)
}
