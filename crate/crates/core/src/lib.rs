//! Steady subsonic Euler-Poisson flow in a two-dimensional nozzle.
//!
//! The crate solves the potential and stream-function formulations by
//! linearizing about a one-dimensional background and iterating on the
//! Taylor remainders, and provides diagnostics for the structural facts
//! behind uniqueness of subsonic solutions: convexity of the subsonic sets,
//! the `dA/dz + dB/dq = 0` identity, coercivity and energy identities.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod background;
pub mod basis;
pub mod coefficients;
pub mod elliptic;
pub mod error;
pub mod gas_model;
pub mod potential;
pub mod quadrature;
pub mod roots;
pub mod stream;

pub use background::{integrate_background, BackgroundOptions, BackgroundProfile, DopingProfile, FieldCase};
pub use basis::Basis1D;
pub use coefficients::Jacobians;
pub use error::{ErrorFamily, LabError, Result};
pub use gas_model::PressureLaw;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
