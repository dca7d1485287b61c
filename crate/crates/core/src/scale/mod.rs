//! q-scale functions `W^(q)` and the second scale function `Z^(q)`.
//!
//! `W^(q)` is the increasing function on `[0, inf)` whose Laplace transform is
//! `1/(phi(a) - q)` for `a > Phi(q)`. Two backends compute it: an exact
//! partial-fraction expansion, and numerical inversion of the tilted transform
//! `1/psi(a)` (a bounded target) rescaled by `e^{Phi(q) x}`.

mod closed_form;
mod inversion;
mod quadrature;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::levy::ProcessSpec;
use crate::scalar::{lit, to_f64, Scalar};

use closed_form::ClosedForm;
pub use closed_form::ExpTerm;
pub use inversion::InversionParams;

/// Absolute tolerance for the `Z^(q)` quadrature under numerical inversion.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    ClosedForm,
    NumericInversion,
}

impl Backend {
    /// Canonical name, accepted back by `FromStr`.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed-form",
            Self::NumericInversion => "numeric-inversion",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" | "closed_form" | "closed" => Ok(Self::ClosedForm),
            "numeric-inversion" | "numeric_inversion" | "numeric" | "inversion" => {
                Ok(Self::NumericInversion)
            }
            other => Err(Error::UnsupportedBackend(other.to_string())),
        }
    }
}

#[derive(Debug)]
enum Engine<T> {
    Closed(ClosedForm<T>),
    Numeric {
        tilted: ProcessSpec<T>,
        params: InversionParams,
    },
}

/// Scale functions of one process at one discount rate `q`.
#[derive(Debug)]
pub struct ScaleEvaluator<T> {
    spec: ProcessSpec<T>,
    q: T,
    phi_q: T,
    engine: Engine<T>,
    value_cache: RwLock<HashMap<u64, T>>,
}

impl<T: Scalar> ScaleEvaluator<T> {
    pub fn new(spec: &ProcessSpec<T>, q: T, backend: Backend) -> Result<Self> {
        Self::with_params(spec, q, backend, InversionParams::default())
    }

    pub fn with_params(
        spec: &ProcessSpec<T>,
        q: T,
        backend: Backend,
        params: InversionParams,
    ) -> Result<Self> {
        let phi_q = spec.right_inverse(q)?;
        let engine = match backend {
            Backend::ClosedForm => Engine::Closed(ClosedForm::factor(spec, q, phi_q)?),
            Backend::NumericInversion => {
                if params.term_count < 3 || !(params.precision > 0.0 && params.precision < 1.0) {
                    return Err(Error::UnsupportedBackend(format!(
                        "inversion parameters {params:?}"
                    )));
                }
                Engine::Numeric {
                    tilted: spec.shifted(phi_q),
                    params,
                }
            }
        };
        Ok(Self {
            spec: spec.clone(),
            q,
            phi_q,
            engine,
            value_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &ProcessSpec<T> {
        &self.spec
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// `Phi(q)`.
    pub fn phi_q(&self) -> T {
        self.phi_q
    }

    pub fn backend(&self) -> Backend {
        match self.engine {
            Engine::Closed(_) => Backend::ClosedForm,
            Engine::Numeric { .. } => Backend::NumericInversion,
        }
    }

    /// Exponential terms `(A_i, r_i)` of the closed form, if that backend is used.
    pub fn closed_form_terms(&self) -> Option<&[ExpTerm<T>]> {
        match &self.engine {
            Engine::Closed(cf) => Some(&cf.terms),
            Engine::Numeric { .. } => None,
        }
    }

    /// Coefficients `(A, B)` of an extra `A x + B` term, present only for a
    /// zero-mean process at `q = 0`.
    pub fn closed_form_affine(&self) -> Option<(T, T)> {
        match &self.engine {
            Engine::Closed(cf) => cf.affine,
            Engine::Numeric { .. } => None,
        }
    }

    /// `phi(alpha) - q` for `alpha >= 0`.
    pub fn phi_minus_q(&self, alpha: T) -> Result<T> {
        Ok(self.spec.phi(alpha)? - self.q)
    }

    /// `W^(q)(0)`: zero with a Gaussian part, `1/drift` otherwise.
    pub fn w_q_at_zero(&self) -> T {
        if self.spec.is_bounded_variation() {
            T::one() / self.spec.drift()
        } else {
            T::zero()
        }
    }

    pub fn w_q(&self, x: T) -> Result<T> {
        if !(x >= T::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "scale function needs x >= 0, got {}",
                to_f64(x)
            )));
        }
        if x == T::zero() {
            return Ok(self.w_q_at_zero());
        }
        Ok(match &self.engine {
            Engine::Closed(cf) => cf.w(x),
            Engine::Numeric { tilted, params } => {
                let key = to_f64(x).to_bits();
                if let Some(v) = self.value_cache.read().expect("cache lock").get(&key) {
                    return Ok(*v);
                }
                let bounded = inversion::invert(|s| tilted.phi_complex(s).inv(), x, params);
                let v = (self.phi_q * x).exp() * bounded;
                self.value_cache
                    .write()
                    .expect("cache lock")
                    .entry(key)
                    .or_insert(v);
                v
            }
        })
    }

    /// Right derivative `W^(q)'_+(x)`.
    pub fn w_q_right_derivative(&self, x: T) -> Result<T> {
        self.w_q_right_derivative_with_error(x).map(|(v, _)| v)
    }

    /// Right derivative together with an error estimate (zero for the exact
    /// backend; Richardson-tableau spread for numerical inversion).
    pub fn w_q_right_derivative_with_error(&self, x: T) -> Result<(T, T)> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "right derivative needs x > 0, got {}",
                to_f64(x)
            )));
        }
        match &self.engine {
            Engine::Closed(cf) => Ok((cf.w_prime(x), T::zero())),
            Engine::Numeric { .. } => self.richardson_derivative(x),
        }
    }

    fn richardson_derivative(&self, x: T) -> Result<(T, T)> {
        const LEVELS: usize = 5;
        let h0 = lit::<T>(0.1) * x.min(T::one());
        let w0 = self.w_q(x)?;
        let mut table = [[T::zero(); LEVELS]; LEVELS];
        let mut h = h0;
        for j in 0..LEVELS {
            table[j][0] = (self.w_q(x + h)? - w0) / h;
            let mut factor = T::one();
            for k in 1..=j {
                factor = factor * lit(2.0);
                table[j][k] =
                    (factor * table[j][k - 1] - table[j - 1][k - 1]) / (factor - T::one());
            }
            h = h / lit(2.0);
        }
        let best = table[LEVELS - 1][LEVELS - 1];
        let err = (best - table[LEVELS - 2][LEVELS - 2]).abs();
        Ok((best, err))
    }

    /// `∫_0^x e^{-alpha y} W^(q)(y) dy`; `alpha` may be negative.
    pub fn integral_exp_w(&self, alpha: T, x: T) -> Result<T> {
        if !(x >= T::zero()) || !x.is_finite() || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "integral needs finite alpha and x >= 0, got alpha={}, x={}",
                to_f64(alpha),
                to_f64(x)
            )));
        }
        Ok(match &self.engine {
            Engine::Closed(cf) => cf.integral_exp_w(alpha, x),
            Engine::Numeric { .. } => {
                let integrand =
                    |y: T| (-alpha * y).exp() * self.w_q(y).unwrap_or_else(|_| T::nan());
                quadrature::integrate(integrand, T::zero(), x, lit(QUADRATURE_TOLERANCE))
            }
        })
    }

    /// `Z^(q)(alpha, x) = e^{alpha x} (1 + (q - phi(alpha)) ∫_0^x e^{-alpha y} W^(q)(y) dy)`.
    pub fn z_q(&self, alpha: T, x: T) -> Result<T> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "Z needs alpha >= 0, got {}",
                to_f64(alpha)
            )));
        }
        if !(x >= T::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!("Z needs x >= 0, got {}", to_f64(x))));
        }
        if x == T::zero() {
            return Ok(T::one());
        }
        match &self.engine {
            Engine::Closed(cf) => Ok(cf.z(alpha, x)),
            Engine::Numeric { .. } => {
                let gap = self.q - self.spec.phi(alpha)?;
                if gap == T::zero() {
                    return Ok((alpha * x).exp());
                }
                let integral = self.integral_exp_w(alpha, x)?;
                Ok((alpha * x).exp() * (T::one() + gap * integral))
            }
        }
    }
}
