//! Parametric spectrally negative Lévy processes: drift, Gaussian part and
//! downward hyperexponential jumps.
//!
//! The Laplace exponent is
//! `phi(a) = c a + (s2/2) a^2 + lambda (sum_i w_i m_i / (m_i + a) - 1)`,
//! finite for `a > -min_i m_i`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::roots::safeguarded_newton;
use crate::scalar::{lit, to_f64, Scalar};

/// One exponential component of the downward jump law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpComponent<T> {
    pub weight: T,
    pub rate: T,
}

impl<T: Scalar> JumpComponent<T> {
    pub fn new(weight: T, rate: T) -> Self {
        Self { weight, rate }
    }
}

/// Validated spectrally negative Lévy process with non-monotone paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec<T> {
    drift: T,
    gaussian_sq: T,
    jump_intensity: T,
    jump_mixture: Vec<JumpComponent<T>>,
}

fn weight_tolerance<T: Scalar>() -> T {
    lit::<T>(1e-12).max(T::epsilon() * lit(16.0))
}

impl<T: Scalar> ProcessSpec<T> {
    /// Validates a raw parameter tuple.
    pub fn new(
        drift: T,
        gaussian_sq: T,
        jump_intensity: T,
        jump_mixture: Vec<JumpComponent<T>>,
    ) -> Result<Self> {
        if !drift.is_finite() {
            return Err(Error::Domain(format!(
                "drift must be finite, got {}",
                to_f64(drift)
            )));
        }
        if !(gaussian_sq >= T::zero()) || !gaussian_sq.is_finite() {
            return Err(Error::NegativeParameter {
                name: "sigma2",
                value: to_f64(gaussian_sq),
            });
        }
        if !(jump_intensity >= T::zero()) || !jump_intensity.is_finite() {
            return Err(Error::NegativeParameter {
                name: "jump intensity",
                value: to_f64(jump_intensity),
            });
        }
        if jump_intensity > T::zero() && jump_mixture.is_empty() {
            return Err(Error::BadMixture(
                "positive intensity with an empty mixture".into(),
            ));
        }
        if jump_intensity == T::zero() && !jump_mixture.is_empty() {
            return Err(Error::BadMixture(
                "mixture given but intensity is zero".into(),
            ));
        }
        let mut total = T::zero();
        for (i, c) in jump_mixture.iter().enumerate() {
            if !(c.weight > T::zero() && c.weight <= T::one()) {
                return Err(Error::BadMixture(format!(
                    "component {i}: weight {} outside (0, 1]",
                    to_f64(c.weight)
                )));
            }
            if !(c.rate > T::zero()) || !c.rate.is_finite() {
                return Err(Error::BadMixture(format!(
                    "component {i}: rate {} must be positive",
                    to_f64(c.rate)
                )));
            }
            total = total + c.weight;
        }
        if !jump_mixture.is_empty() && (total - T::one()).abs() > weight_tolerance() {
            return Err(Error::BadMixture(format!(
                "weights sum to {}, not 1",
                to_f64(total)
            )));
        }
        if gaussian_sq == T::zero() && jump_intensity == T::zero() {
            return Err(Error::MonotonePath("no Gaussian part and no jumps".into()));
        }
        if gaussian_sq == T::zero() && drift <= T::zero() {
            return Err(Error::MonotonePath(format!(
                "bounded variation with non-positive drift {}",
                to_f64(drift)
            )));
        }
        Ok(Self {
            drift,
            gaussian_sq,
            jump_intensity,
            jump_mixture,
        })
    }

    /// Brownian motion with drift.
    pub fn brownian(drift: T, gaussian_sq: T) -> Result<Self> {
        Self::new(drift, gaussian_sq, T::zero(), Vec::new())
    }

    /// Cramér–Lundberg risk process: premium rate `drift`, exponential claims.
    pub fn cramer_lundberg(drift: T, intensity: T, claim_rate: T) -> Result<Self> {
        Self::new(
            drift,
            T::zero(),
            intensity,
            vec![JumpComponent::new(T::one(), claim_rate)],
        )
    }

    pub fn drift(&self) -> T {
        self.drift
    }

    pub fn gaussian_sq(&self) -> T {
        self.gaussian_sq
    }

    pub fn jump_intensity(&self) -> T {
        self.jump_intensity
    }

    pub fn jump_mixture(&self) -> &[JumpComponent<T>] {
        &self.jump_mixture
    }

    /// True when paths have bounded variation (no Gaussian part).
    pub fn is_bounded_variation(&self) -> bool {
        self.gaussian_sq == T::zero()
    }

    /// Smallest jump rate; the exponent is finite on `(-min_rate, inf)`.
    pub fn min_rate(&self) -> Option<T> {
        self.jump_mixture
            .iter()
            .map(|c| c.rate)
            .fold(None, |acc, r| match acc {
                None => Some(r),
                Some(a) => Some(a.min(r)),
            })
    }

    /// `E[xi]` for the jump magnitude.
    pub fn mean_jump(&self) -> T {
        self.jump_mixture
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weight / c.rate)
    }

    /// `E X(1) = phi'(0)`.
    pub fn mean(&self) -> T {
        self.drift - self.jump_intensity * self.mean_jump()
    }

    fn check_nonnegative(alpha: T) -> Result<()> {
        if alpha >= T::zero() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "alpha must be >= 0, got {}",
                to_f64(alpha)
            )))
        }
    }

    /// Laplace exponent on the nonnegative half line.
    pub fn phi(&self, alpha: T) -> Result<T> {
        Self::check_nonnegative(alpha)?;
        Ok(self.phi_raw(alpha))
    }

    /// Right derivative of the Laplace exponent.
    pub fn phi_prime(&self, alpha: T) -> Result<T> {
        Self::check_nonnegative(alpha)?;
        Ok(self.phi_prime_raw(alpha))
    }

    /// Laplace exponent wherever it is finite, i.e. `alpha > -min_rate`.
    pub fn phi_extended(&self, alpha: T) -> Result<T> {
        if let Some(m) = self.min_rate() {
            if !(alpha > -m) {
                return Err(Error::DivergedTransform(format!(
                    "exponent infinite at alpha = {} (jump rate {})",
                    to_f64(alpha),
                    to_f64(m)
                )));
            }
        }
        Ok(self.phi_raw(alpha))
    }

    pub(crate) fn phi_raw(&self, alpha: T) -> T {
        // alpha * (c + s2 alpha / 2 - lambda sum_i w_i / (m_i + alpha)); exact zero at the origin
        let half = lit::<T>(0.5);
        let jumps = self
            .jump_mixture
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weight / (c.rate + alpha));
        alpha * (self.drift + half * self.gaussian_sq * alpha - self.jump_intensity * jumps)
    }

    pub(crate) fn phi_prime_raw(&self, alpha: T) -> T {
        let jumps = self.jump_mixture.iter().fold(T::zero(), |acc, c| {
            let d = c.rate + alpha;
            acc + c.weight * c.rate / (d * d)
        });
        self.drift + self.gaussian_sq * alpha - self.jump_intensity * jumps
    }

    pub(crate) fn phi_second_raw(&self, alpha: T) -> T {
        let jumps = self.jump_mixture.iter().fold(T::zero(), |acc, c| {
            let d = c.rate + alpha;
            acc + c.weight * c.rate / (d * d * d)
        });
        self.gaussian_sq + lit::<T>(2.0) * self.jump_intensity * jumps
    }

    pub(crate) fn phi_third_raw(&self, alpha: T) -> T {
        let jumps = self.jump_mixture.iter().fold(T::zero(), |acc, c| {
            let d = c.rate + alpha;
            acc + c.weight * c.rate / (d * d * d * d)
        });
        -lit::<T>(6.0) * self.jump_intensity * jumps
    }

    /// `(phi(a) - phi(b)) / (a - b)`, evaluated without cancellation; equals
    /// `phi'(a)` when `a == b`.
    pub(crate) fn divided_difference(&self, a: T, b: T) -> T {
        let half = lit::<T>(0.5);
        let jumps = self.jump_mixture.iter().fold(T::zero(), |acc, c| {
            acc + c.weight * c.rate / ((c.rate + a) * (c.rate + b))
        });
        self.drift + half * self.gaussian_sq * (a + b) - self.jump_intensity * jumps
    }

    /// `(phi(a) - phi'(0) a) / a^2`, smooth through `a = 0`.
    pub(crate) fn second_divided_at_zero(&self, a: T) -> T {
        let half = lit::<T>(0.5);
        let jumps = self
            .jump_mixture
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weight / (c.rate * (c.rate + a)));
        half * self.gaussian_sq + self.jump_intensity * jumps
    }

    pub(crate) fn phi_complex(&self, s: Complex<T>) -> Complex<T> {
        let half = lit::<T>(0.5);
        let mut jumps = Complex::new(T::zero(), T::zero());
        for c in &self.jump_mixture {
            jumps = jumps + (s + c.rate).inv() * c.weight;
        }
        s * (s * (half * self.gaussian_sq) + self.drift - jumps * self.jump_intensity)
    }

    /// Minimiser of `phi` on `[0, inf)`.
    fn nonnegative_minimiser(&self) -> Result<T> {
        if self.phi_prime_raw(T::zero()) >= T::zero() {
            return Ok(T::zero());
        }
        let mut hi = T::one();
        while self.phi_prime_raw(hi) <= T::zero() {
            hi = hi * lit(2.0);
            if !hi.is_finite() {
                return Err(Error::ConvergenceFailure(
                    "exponent has no minimiser".into(),
                ));
            }
        }
        safeguarded_newton(
            |a| (self.phi_prime_raw(a), self.phi_second_raw(a)),
            T::zero(),
            hi,
        )
    }

    /// Right inverse `Phi(q)`: the largest root of `phi(a) = q` on `[0, inf)`.
    pub fn right_inverse(&self, q: T) -> Result<T> {
        if !(q >= T::zero()) || !q.is_finite() {
            return Err(Error::Domain(format!("q must be >= 0, got {}", to_f64(q))));
        }
        if q == T::zero() && self.mean() >= T::zero() {
            return Ok(T::zero());
        }
        let lo = self.nonnegative_minimiser()?;
        let mut hi = lo.max(T::one());
        while self.phi_raw(hi) <= q {
            hi = hi * lit(2.0);
            if !hi.is_finite() {
                return Err(Error::ConvergenceFailure(format!(
                    "no upper bracket for q = {}",
                    to_f64(q)
                )));
            }
        }
        safeguarded_newton(|a| (self.phi_raw(a) - q, self.phi_prime_raw(a)), lo, hi)
    }

    /// The process under the exponential change of measure with density
    /// `exp(Phi(q) X(t) - q t)`.
    pub fn tilt(&self, q: T) -> Result<TiltedSpec<T>> {
        if !(q > T::zero()) {
            return Err(Error::Domain(format!(
                "tilt requires q > 0, got {}",
                to_f64(q)
            )));
        }
        let phi_q = self.right_inverse(q)?;
        Ok(TiltedSpec {
            base: self.clone(),
            q,
            phi_q,
            tilted: self.shifted(phi_q),
        })
    }

    /// Re-parameterisation of `a -> phi(a + shift) - phi(shift)` within the
    /// family: drift `c + s2 shift`, rates `m + shift`, intensity and weights
    /// reweighted by `m / (m + shift)`.
    pub(crate) fn shifted(&self, shift: T) -> Self {
        if shift == T::zero() {
            return self.clone();
        }
        let scaled: Vec<T> = self
            .jump_mixture
            .iter()
            .map(|c| c.weight * c.rate / (c.rate + shift))
            .collect();
        let mass = scaled.iter().fold(T::zero(), |a, &b| a + b);
        let jump_mixture = self
            .jump_mixture
            .iter()
            .zip(&scaled)
            .map(|(c, &s)| JumpComponent::new(s / mass, c.rate + shift))
            .collect::<Vec<_>>();
        let jump_intensity = if jump_mixture.is_empty() {
            T::zero()
        } else {
            self.jump_intensity * mass
        };
        Self {
            drift: self.drift + self.gaussian_sq * shift,
            gaussian_sq: self.gaussian_sq,
            jump_intensity,
            jump_mixture,
        }
    }
}

/// A process together with the exponential tilt at level `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedSpec<T> {
    base: ProcessSpec<T>,
    q: T,
    phi_q: T,
    tilted: ProcessSpec<T>,
}

impl<T: Scalar> TiltedSpec<T> {
    pub fn base(&self) -> &ProcessSpec<T> {
        &self.base
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// The shift `Phi(q)`.
    pub fn phi_q(&self) -> T {
        self.phi_q
    }

    /// The tilted process, again a member of the parametric family.
    pub fn spec(&self) -> &ProcessSpec<T> {
        &self.tilted
    }

    /// Tilted exponent `psi(a)`, via the re-parameterised family.
    pub fn psi(&self, alpha: T) -> Result<T> {
        self.tilted.phi_extended(alpha)
    }

    /// `phi(a + Phi(q)) - q` evaluated on the base process.
    pub fn psi_from_base(&self, alpha: T) -> Result<T> {
        Ok(self.base.phi_extended(alpha + self.phi_q)? - self.q)
    }

    /// `psi'(0) = phi'(Phi(q))`, the mean under the tilted measure.
    pub fn psi_prime_zero(&self) -> T {
        self.tilted.mean()
    }
}
