//! Adaptive Gauss–Legendre panels with recursive bisection.

use crate::scalar::{lit, Scalar};

// 10-point rule on [-1, 1]
const NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

const MAX_DEPTH: u32 = 48;

fn panel<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> T {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let mut acc = T::zero();
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        let dx = half * lit(*x);
        acc = acc + lit::<T>(*w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

fn refine<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, whole: T, tol: T, depth: u32) -> T {
    let mid = (a + b) / lit(2.0);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let both = left + right;
    if depth >= MAX_DEPTH || (both - whole).abs() <= tol {
        return both;
    }
    let half_tol = tol / lit(2.0);
    refine(f, a, mid, left, half_tol, depth + 1) + refine(f, mid, b, right, half_tol, depth + 1)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub(crate) fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let whole = panel(&f, a, b);
    refine(&f, a, b, whole, tol, 0)
}
