//! Fluctuation identities for the process reflected at `0` and `B`.
//!
//! Every function takes a [`ScaleEvaluator`] bound to `(process, q)`. Results
//! under the exponentially tilted measure are obtained by passing an evaluator
//! built on [`TiltedSpec::spec`](crate::TiltedSpec::spec) with `q = 0`.

use crate::error::{Error, Result};
use crate::levy::ProcessSpec;
use crate::scalar::{to_f64, Scalar};
use crate::scale::ScaleEvaluator;

/// Parameters `(q, alpha, theta, x0, B)` of a passage transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformQuery<T> {
    pub q: T,
    pub alpha: T,
    pub theta: T,
    pub x0: T,
    pub b: T,
}

impl<T: Scalar> TransformQuery<T> {
    pub fn new(q: T, alpha: T, theta: T, x0: T, b: T) -> Self {
        Self {
            q,
            alpha,
            theta,
            x0,
            b,
        }
    }

    /// Checks `0 <= x0 <= B`, `alpha >= Phi(q)`, `theta >= 0` and that the
    /// evaluator is bound to the same `q`.
    pub fn check(&self, ev: &ScaleEvaluator<T>) -> Result<()> {
        if self.q != ev.q() {
            return Err(Error::Admissibility(format!(
                "query q = {} but evaluator is bound to q = {}",
                to_f64(self.q),
                to_f64(ev.q())
            )));
        }
        if !(self.b > T::zero()) || !self.b.is_finite() {
            return Err(Error::Domain(format!(
                "barrier B must be positive, got {}",
                to_f64(self.b)
            )));
        }
        if !(self.x0 >= T::zero() && self.x0 <= self.b) {
            return Err(Error::Domain(format!(
                "x0 = {} outside [0, {}]",
                to_f64(self.x0),
                to_f64(self.b)
            )));
        }
        if !(self.theta >= T::zero()) || !self.theta.is_finite() {
            return Err(Error::Admissibility(format!(
                "theta = {} < 0",
                to_f64(self.theta)
            )));
        }
        if !(self.alpha >= ev.phi_q()) || !self.alpha.is_finite() {
            return Err(Error::Admissibility(format!(
                "alpha = {} below Phi(q) = {}",
                to_f64(self.alpha),
                to_f64(ev.phi_q())
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    UpperPassage,
    LowerPassage,
}

/// Intermediate quantities of a passage transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components<T> {
    pub phi_q: T,
    /// `phi(alpha) - q`
    pub phi_alpha_minus_q: T,
    pub z_x0: T,
    pub z_b: T,
    pub w_x0: T,
    pub w_b: T,
    pub w_prime_b: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityValue<T> {
    pub kind: IdentityKind,
    pub query: TransformQuery<T>,
    pub value: T,
    pub components: Components<T>,
}

impl<T: Scalar> IdentityValue<T> {
    /// Recomputes the value from the stored components.
    pub fn reassemble(&self) -> T {
        let c = &self.components;
        let q = &self.query;
        match self.kind {
            IdentityKind::UpperPassage => {
                if q.x0 == q.b {
                    T::one()
                } else {
                    c.z_x0 / c.z_b
                }
            }
            IdentityKind::LowerPassage => lower_formula(c, q.alpha, q.theta),
        }
    }
}

fn lower_formula<T: Scalar>(c: &Components<T>, alpha: T, theta: T) -> T {
    if c.w_x0 == T::zero() {
        return c.z_x0;
    }
    c.z_x0
        + c.w_x0 * (c.w_b * c.phi_alpha_minus_q - (alpha + theta) * c.z_b)
            / (c.w_prime_b + theta * c.w_b)
}

fn components<T: Scalar>(
    ev: &ScaleEvaluator<T>,
    query: &TransformQuery<T>,
) -> Result<Components<T>> {
    Ok(Components {
        phi_q: ev.phi_q(),
        phi_alpha_minus_q: ev.phi_minus_q(query.alpha)?,
        z_x0: ev.z_q(query.alpha, query.x0)?,
        z_b: ev.z_q(query.alpha, query.b)?,
        w_x0: ev.w_q(query.x0)?,
        w_b: ev.w_q(query.b)?,
        w_prime_b: ev.w_q_right_derivative(query.b)?,
    })
}

/// `E[e^{-q tau_b^+}; tau_b^+ < tau_a^-] = W^(q)(a) / W^(q)(a + b)` for the
/// unreflected process started at 0.
pub fn two_sided_exit<T: Scalar>(ev: &ScaleEvaluator<T>, a: T, b: T) -> Result<T> {
    if !(a >= T::zero() && b >= T::zero()) || !(a + b > T::zero()) || !(a + b).is_finite() {
        return Err(Error::Domain(format!(
            "two-sided exit needs a, b >= 0 with a + b > 0, got a={}, b={}",
            to_f64(a),
            to_f64(b)
        )));
    }
    if b == T::zero() {
        return Ok(T::one());
    }
    Ok(ev.w_q(a)? / ev.w_q(a + b)?)
}

/// `E_{x0}[e^{-alpha L(tau_0^U) - q tau_0^U}] = Z^(q)(alpha, x0) / Z^(q)(alpha, B)`:
/// passage to the upper barrier and the lower local time collected on the way.
/// `theta` is ignored.
pub fn upper_passage_transform<T: Scalar>(
    ev: &ScaleEvaluator<T>,
    query: &TransformQuery<T>,
) -> Result<IdentityValue<T>> {
    query.check(ev)?;
    let components = components(ev, query)?;
    let value = if query.x0 == query.b {
        T::one()
    } else {
        components.z_x0 / components.z_b
    };
    Ok(IdentityValue {
        kind: IdentityKind::UpperPassage,
        query: *query,
        value,
        components,
    })
}

/// `E_{x0}[e^{-alpha L(tau_0^L) - theta U(tau_0^L) - q tau_0^L}]`: first time the
/// lower local time becomes positive, with the overshoot `L` and the upper
/// local time `U` accrued before it.
pub fn lower_passage_transform<T: Scalar>(
    ev: &ScaleEvaluator<T>,
    query: &TransformQuery<T>,
) -> Result<IdentityValue<T>> {
    query.check(ev)?;
    let components = components(ev, query)?;
    let value = lower_formula(&components, query.alpha, query.theta);
    Ok(IdentityValue {
        kind: IdentityKind::LowerPassage,
        query: *query,
        value,
        components,
    })
}

/// Exponent of the bivariate Lévy process `x -> (L(tau_x^U), tau_x^U)`:
/// `log E[e^{-alpha (L(tau_1^U) - L(tau_0^U)) - q (tau_1^U - tau_0^U)}]
///  = W^(q)(B) (phi(alpha) - q) / Z^(q)(alpha, B) - alpha`.
pub fn inverse_local_time_exponent<T: Scalar>(ev: &ScaleEvaluator<T>, alpha: T, b: T) -> Result<T> {
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "barrier B must be positive, got {}",
            to_f64(b)
        )));
    }
    if !(alpha >= ev.phi_q()) || !alpha.is_finite() {
        return Err(Error::Admissibility(format!(
            "alpha = {} below Phi(q) = {}",
            to_f64(alpha),
            to_f64(ev.phi_q())
        )));
    }
    let gap = ev.phi_minus_q(alpha)?;
    if gap == T::zero() {
        return Ok(-alpha);
    }
    Ok(ev.w_q(b)? * gap / ev.z_q(alpha, b)? - alpha)
}

/// `W'_+(B) / W(B)`: arrival rate, per unit of upper local time, of the jumps
/// of `x -> L(tau_x^U)`. With `q > 0` this is the same ratio for `W^(q)`.
pub fn local_time_jump_rate<T: Scalar>(ev: &ScaleEvaluator<T>, b: T) -> Result<T> {
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "barrier B must be positive, got {}",
            to_f64(b)
        )));
    }
    Ok(ev.w_q_right_derivative(b)? / ev.w_q(b)?)
}

/// Pollaczek–Khinchine transform of the all-time infimum of a process with
/// positive mean: `E[e^{alpha inf_t X(t)}] = phi'(0) alpha / phi(alpha)`.
pub fn minimum_transform<T: Scalar>(spec: &ProcessSpec<T>, alpha: T) -> Result<T> {
    let mean = spec.mean();
    if !(mean > T::zero()) {
        return Err(Error::Domain(format!(
            "all-time infimum is finite only for positive mean, got {}",
            to_f64(mean)
        )));
    }
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {}",
            to_f64(alpha)
        )));
    }
    // phi(alpha) / alpha as a divided difference keeps small alpha accurate
    Ok(mean / spec.divided_difference(alpha, T::zero()))
}

/// `∫_0^∞ E_{x0}[e^{alpha X(tau_x^U)}] dx` for `alpha < 0`, with `ev` bound to
/// a positive-mean process at `q = 0` (typically the tilted process):
/// `e^{alpha (B + x0)} (∫_0^{x0} e^{-alpha y} W(y) dy - 1/psi(alpha)) / W(B)`.
///
/// Finite only while `psi(alpha) < 0`; anything else is reported as
/// [`Error::DivergedTransform`].
pub fn occupation_transform<T: Scalar>(ev: &ScaleEvaluator<T>, alpha: T, x0: T, b: T) -> Result<T> {
    if ev.q() != T::zero() || !(ev.spec().mean() > T::zero()) {
        return Err(Error::Domain(
            "occupation transform needs a positive-mean evaluator at q = 0".into(),
        ));
    }
    if !(b > T::zero()) || !(x0 >= T::zero() && x0 <= b) {
        return Err(Error::Domain(format!(
            "need 0 <= x0 <= B, got x0={}, B={}",
            to_f64(x0),
            to_f64(b)
        )));
    }
    if !(alpha < T::zero()) {
        return Err(Error::Domain(format!(
            "alpha must be negative, got {}",
            to_f64(alpha)
        )));
    }
    let psi = ev.spec().phi_extended(alpha)?;
    if !(psi < T::zero()) {
        return Err(Error::DivergedTransform(format!(
            "psi({}) = {} is not negative",
            to_f64(alpha),
            to_f64(psi)
        )));
    }
    let integral = ev.integral_exp_w(alpha, x0)?;
    Ok((alpha * (b + x0)).exp() * (integral - T::one() / psi) / ev.w_q(b)?)
}

/// Exponent `log E[e^{-alpha X(1)}] = rate (E[e^{-alpha xi}] - 1)` of a compound
/// Poisson process with nonnegative jumps `xi`.
///
/// Note the sign convention: this is the transform of `-X`, opposite to the
/// `E[e^{alpha X(t)}] = e^{t phi(alpha)}` convention of [`ProcessSpec::phi`].
pub fn compound_poisson_exponent<T: Scalar>(rate: T, jump_laplace: T) -> T {
    rate * (jump_laplace - T::one())
}

/// `E[e^{-alpha X(J) - theta J}] = (rate + exponent(alpha)) / (rate + theta)`
/// where `J` is the first jump epoch of a compound Poisson process with the
/// given rate and exponent (see [`compound_poisson_exponent`]).
pub fn first_jump_transform<T, F>(rate: T, exponent: F, alpha: T, theta: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(rate > T::zero()) || !rate.is_finite() {
        return Err(Error::Domain(format!(
            "rate must be positive, got {}",
            to_f64(rate)
        )));
    }
    if !(alpha >= T::zero() && theta >= T::zero()) {
        return Err(Error::Domain(format!(
            "need alpha, theta >= 0, got {}, {}",
            to_f64(alpha),
            to_f64(theta)
        )));
    }
    Ok((rate + exponent(alpha)) / (rate + theta))
}
