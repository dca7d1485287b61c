//! Euler-summed Fourier-series inversion of Laplace transforms.

use num_complex::Complex;

use crate::scalar::{lit, Scalar};

/// Tuning of the inversion: total number of transform evaluations and the
/// target discretisation error, which fixes the damping `A = -ln(precision)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionParams {
    pub term_count: usize,
    pub precision: f64,
}

impl Default for InversionParams {
    fn default() -> Self {
        Self {
            term_count: 41,
            precision: 1e-10,
        }
    }
}

impl InversionParams {
    /// Splits the evaluation budget into plain partial sums and the binomial
    /// (Euler) averaging window.
    fn split(&self) -> (usize, usize) {
        let total = self.term_count.max(3);
        let euler = ((total - 1) / 2).min(15);
        (total - 1 - euler, euler)
    }
}

/// Inverts `transform` at `t > 0`.
pub(crate) fn invert<T, F>(transform: F, t: T, params: &InversionParams) -> T
where
    T: Scalar,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let (n, m) = params.split();
    let a: T = lit(-params.precision.ln());
    let two_t = t + t;
    let pi = T::PI();
    let scale = (a / lit(2.0)).exp() / t;

    let mut sum = transform(Complex::new(a / two_t, T::zero())).re / lit(2.0);
    let mut partial = Vec::with_capacity(m + 1);
    for k in 1..=(n + m) {
        let s = Complex::new(a / two_t, lit::<T>(2.0) * lit::<T>(k as f64) * pi / two_t);
        let term = transform(s).re;
        sum = if k % 2 == 1 { sum - term } else { sum + term };
        if k >= n {
            partial.push(sum);
        }
    }
    // binomial average of the last m + 1 partial sums
    let mut binom = T::one();
    let mut acc = T::zero();
    let denom = lit::<T>(2.0).powi(m as i32);
    for (j, s) in partial.iter().enumerate() {
        acc = acc + binom * *s;
        binom = binom * lit::<T>((m - j) as f64) / lit::<T>((j + 1) as f64);
    }
    scale * acc / denom
}
