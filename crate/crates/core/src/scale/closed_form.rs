//! Partial-fraction representation of `1/(phi(a) - q)`.
//!
//! For hyperexponential jumps every root of `phi(a) = q` is real: one in each
//! gap between consecutive poles `-m_i`, two on the convex branch right of the
//! smallest pole, and one more left of the largest pole when a Gaussian part
//! is present. Each simple root `r` contributes `e^{r x} / phi'(r)`.

use crate::error::{Error, Result};
use crate::levy::{JumpComponent, ProcessSpec};
use crate::roots::{root_between_poles, safeguarded_newton};
use crate::scalar::{exprel, exprel_weighted, lit, to_f64, Scalar};

/// One term `coefficient * exp(root * x)` of the scale function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm<T> {
    pub coefficient: T,
    pub root: T,
}

/// `W^(q)(x) = sum_k C_k e^{r_k x} + A x + B`, where the affine part is only
/// present for `q = 0` and a zero-mean process (double root at the origin).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ClosedForm<T> {
    pub(crate) spec: ProcessSpec<T>,
    pub(crate) q: T,
    pub(crate) terms: Vec<ExpTerm<T>>,
    pub(crate) affine: Option<(T, T)>,
}

fn merged_rates<T: Scalar>(spec: &ProcessSpec<T>) -> Vec<T> {
    let mut rates: Vec<T> = spec.jump_mixture().iter().map(|c| c.rate).collect();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("validated rates are finite"));
    rates.dedup();
    rates
}

/// Merges components that share a rate so that every pole is simple.
fn canonical<T: Scalar>(spec: &ProcessSpec<T>) -> ProcessSpec<T> {
    let rates = merged_rates(spec);
    if rates.len() == spec.jump_mixture().len() {
        return spec.clone();
    }
    let mixture = rates
        .iter()
        .map(|&r| {
            let w = spec
                .jump_mixture()
                .iter()
                .filter(|c| c.rate == r)
                .fold(T::zero(), |a, c| a + c.weight);
            JumpComponent::new(w, r)
        })
        .collect();
    ProcessSpec::new(
        spec.drift(),
        spec.gaussian_sq(),
        spec.jump_intensity(),
        mixture,
    )
    .expect("merging equal rates preserves validity")
}

/// Tolerance under which `|mean|` is treated as an exact zero.
pub(crate) fn zero_mean_tolerance<T: Scalar>(spec: &ProcessSpec<T>) -> T {
    let scale = spec.drift().abs() + spec.jump_intensity() * spec.mean_jump() + T::one();
    lit::<T>(1e-12).max(T::epsilon() * lit(8.0)) * scale
}

impl<T: Scalar> ClosedForm<T> {
    pub(crate) fn factor(spec: &ProcessSpec<T>, q: T, phi_q: T) -> Result<Self> {
        let spec = canonical(spec);
        let f = |a: T| (spec.phi_raw(a) - q, spec.phi_prime_raw(a));
        let rates = merged_rates(&spec);
        let mut roots: Vec<T> = Vec::with_capacity(rates.len() + 2);

        // gaps between consecutive poles
        for pair in rates.windows(2) {
            roots.push(root_between_poles(f, -pair[1], -pair[0])?);
        }
        // far left, only when s2 > 0 makes phi -> +inf at -inf
        if spec.gaussian_sq() > T::zero() {
            if let Some(&m_max) = rates.last() {
                let mut a = -m_max - T::one();
                while f(a).0 <= T::zero() {
                    a = -m_max - (-m_max - a) * lit(2.0);
                    if !a.is_finite() {
                        return Err(Error::FactorizationFailure("no far-left bracket".into()));
                    }
                }
                roots.push(root_between_poles(f, a, -m_max)?);
            }
        }

        let zero_mean = q == T::zero() && spec.mean().abs() <= zero_mean_tolerance(&spec);
        let mut affine = None;
        if zero_mean {
            let d2 = spec.phi_second_raw(T::zero());
            let d3 = spec.phi_third_raw(T::zero());
            let two = lit::<T>(2.0);
            affine = Some((two / d2, -two * d3 / (lit::<T>(3.0) * d2 * d2)));
        } else {
            // convex branch: minimiser, then one root either side
            let left_end = rates.first().map(|&m| -m);
            let minimiser = convex_minimiser(&spec, left_end)?;
            let left_root = if q == T::zero() && spec.mean() < T::zero() {
                T::zero()
            } else {
                match left_end {
                    Some(pole) => root_between_poles(f, pole, minimiser)?,
                    None => {
                        let mut a = minimiser - T::one();
                        while f(a).0 <= T::zero() {
                            a = minimiser - (minimiser - a) * lit(2.0);
                            if !a.is_finite() {
                                return Err(Error::FactorizationFailure("no left bracket".into()));
                            }
                        }
                        safeguarded_newton(f, a, minimiser)?
                    }
                }
            };
            roots.push(left_root);
            roots.push(phi_q);
        }

        roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        let expected = rates.len() + usize::from(spec.gaussian_sq() > T::zero()) + 1
            - 2 * usize::from(zero_mean);
        if roots.len() != expected {
            return Err(Error::FactorizationFailure(format!(
                "found {} roots, expected {expected}",
                roots.len()
            )));
        }
        let sep = lit::<T>(1e-9).max(T::epsilon() * lit(100.0));
        for w in roots.windows(2) {
            if (w[1] - w[0]).abs() <= sep * w[1].abs().max(T::one()) {
                return Err(Error::FactorizationFailure(format!(
                    "repeated root near {}",
                    to_f64(w[0])
                )));
            }
        }
        if zero_mean {
            if let Some(r) = roots.iter().find(|r| r.abs() <= sep) {
                return Err(Error::FactorizationFailure(format!(
                    "triple root at the origin ({})",
                    to_f64(*r)
                )));
            }
        }
        let terms = roots
            .into_iter()
            .map(|r| ExpTerm {
                coefficient: T::one() / spec.phi_prime_raw(r),
                root: r,
            })
            .collect();
        Ok(Self {
            spec,
            q,
            terms,
            affine,
        })
    }

    pub(crate) fn w(&self, x: T) -> T {
        let mut acc = self
            .terms
            .iter()
            .fold(T::zero(), |acc, t| acc + t.coefficient * (t.root * x).exp());
        if let Some((a, b)) = self.affine {
            acc = acc + a * x + b;
        }
        acc
    }

    pub(crate) fn w_prime(&self, x: T) -> T {
        let mut acc = self.terms.iter().fold(T::zero(), |acc, t| {
            acc + t.coefficient * t.root * (t.root * x).exp()
        });
        if let Some((a, _)) = self.affine {
            acc = acc + a;
        }
        acc
    }

    /// `∫_0^x e^{-alpha y} W^(q)(y) dy` for any real `alpha`.
    pub(crate) fn integral_exp_w(&self, alpha: T, x: T) -> T {
        let mut acc = self.terms.iter().fold(T::zero(), |acc, t| {
            acc + t.coefficient * x * exprel((t.root - alpha) * x)
        });
        if let Some((a, b)) = self.affine {
            acc = acc + a * x * x * exprel_weighted(-alpha * x) + b * x * exprel(-alpha * x);
        }
        acc
    }

    /// `Z^(q)(alpha, x)` written as `sum_k C_k D(alpha, r_k) e^{r_k x}`, with `D`
    /// the divided difference of `phi`; no `e^{alpha x}` cancellation.
    pub(crate) fn z(&self, alpha: T, x: T) -> T {
        let spec = &self.spec;
        let mut acc = self.terms.iter().fold(T::zero(), |acc, t| {
            acc + t.coefficient * spec.divided_difference(alpha, t.root) * (t.root * x).exp()
        });
        if let Some((a, b)) = self.affine {
            let d1 = spec.divided_difference(alpha, T::zero());
            let d2 = spec.second_divided_at_zero(alpha);
            acc = acc + a * (x * d1 + d2) + b * d1;
        }
        acc
    }
}

/// Minimiser of the convex restriction of `phi` to `(left_end, inf)`.
fn convex_minimiser<T: Scalar>(spec: &ProcessSpec<T>, left_end: Option<T>) -> Result<T> {
    let g = |a: T| (spec.phi_prime_raw(a), spec.phi_second_raw(a));
    let at_zero = spec.phi_prime_raw(T::zero());
    if at_zero == T::zero() {
        return Ok(T::zero());
    }
    match left_end {
        None => Ok(-spec.drift() / spec.gaussian_sq()),
        Some(pole) if at_zero > T::zero() => {
            // phi' runs from -inf at the pole to phi'(0) > 0
            root_between_poles(
                |a| (-spec.phi_prime_raw(a), -spec.phi_second_raw(a)),
                pole,
                T::zero(),
            )
        }
        Some(_) => {
            let mut hi = T::one();
            while spec.phi_prime_raw(hi) <= T::zero() {
                hi = hi * lit(2.0);
                if !hi.is_finite() {
                    return Err(Error::FactorizationFailure("no minimiser".into()));
                }
            }
            safeguarded_newton(g, T::zero(), hi)
        }
    }
}
