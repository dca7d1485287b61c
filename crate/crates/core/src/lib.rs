//! Scale functions and fluctuation identities for spectrally negative Lévy
//! processes with hyperexponential jumps, reflected at one or two barriers.
//!
//! The analytic side ([`levy`], [`scale`], [`identities`]) is generic over
//! [`Scalar`] (`f32` or `f64`). The Monte Carlo side ([`sim`]) works in `f64`.
//!
//! ```
//! use levyfluct::{Backend, ProcessSpec64, ScaleEvaluator64};
//!
//! let bm = ProcessSpec64::brownian(0.0, 2.0).unwrap();
//! assert_eq!(bm.right_inverse(1.0).unwrap(), 1.0);
//! let w = ScaleEvaluator64::new(&bm, 1.0, Backend::ClosedForm).unwrap();
//! assert!((w.w_q(1.0).unwrap() - 1.0f64.sinh()).abs() < 1e-12);
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod identities;
pub mod levy;
mod roots;
pub mod scalar;
pub mod scale;
pub mod sim;

pub use error::{Error, Result};
pub use identities::{IdentityKind, IdentityValue, TransformQuery};
pub use levy::{JumpComponent, ProcessSpec, TiltedSpec};
pub use scalar::Scalar;
pub use scale::{Backend, InversionParams, ScaleEvaluator};

pub type ProcessSpec64 = ProcessSpec<f64>;
pub type ProcessSpec32 = ProcessSpec<f32>;
pub type JumpComponent64 = JumpComponent<f64>;
pub type JumpComponent32 = JumpComponent<f32>;
pub type TiltedSpec64 = TiltedSpec<f64>;
pub type TiltedSpec32 = TiltedSpec<f32>;
pub type ScaleEvaluator64 = ScaleEvaluator<f64>;
pub type ScaleEvaluator32 = ScaleEvaluator<f32>;
pub type TransformQuery64 = TransformQuery<f64>;
pub type IdentityValue64 = IdentityValue<f64>;
