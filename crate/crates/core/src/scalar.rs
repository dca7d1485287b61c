//! Floating-point abstraction shared by the analytic modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the analytic code is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Lossy conversion used for error messages and cache keys.
#[inline]
pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(e^z - 1) / z`, continuous through `z = 0`.
pub(crate) fn exprel<T: Scalar>(z: T) -> T {
    if z.abs() < lit(1e-5) {
        T::one() + z / lit(2.0) + z * z / lit(6.0)
    } else {
        z.exp_m1() / z
    }
}

/// `∫_0^1 u e^{z u} du = (e^z (z - 1) + 1) / z^2`, continuous through `z = 0`.
pub(crate) fn exprel_weighted<T: Scalar>(z: T) -> T {
    if z.abs() < lit(0.05) {
        // 1/2 + z/3 + z^2/8 + z^3/30 + z^4/144 + z^5/840
        let mut acc = T::zero();
        for &c in [
            1.0 / 840.0,
            1.0 / 144.0,
            1.0 / 30.0,
            1.0 / 8.0,
            1.0 / 3.0,
            0.5,
        ]
        .iter()
        {
            acc = acc * z + lit(c);
        }
        acc
    } else {
        (z.exp() * (z - T::one()) + T::one()) / (z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exprel_matches_definition() {
        for &z in &[-3.0f64, -0.5, -1e-3, 1e-7, 0.2, 4.0] {
            let direct = if z.abs() > 1e-8 { z.exp_m1() / z } else { 1.0 };
            assert!((exprel(z) - direct).abs() < 1e-12, "z={z}");
        }
        assert_eq!(exprel(0.0f64), 1.0);
    }

    #[test]
    fn weighted_exprel_branches_agree() {
        for &z in &[-0.049f64, 0.049, -0.051, 0.051] {
            let closed = (z.exp() * (z - 1.0) + 1.0) / (z * z);
            assert!((exprel_weighted(z) - closed).abs() < 1e-11, "z={z}");
        }
        assert!((exprel_weighted(0.0f64) - 0.5).abs() < 1e-15);
    }
}
