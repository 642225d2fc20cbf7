//! Numerical and symbolic tools for a scalar field with a non-local
//! interaction on quantum (Doplicher–Fredenhagen–Roberts) spacetime.
//!
//! * [`algebra`]: the symplectic form `σ`, Weyl products and localization states.
//! * [`kernel`]: the kernel `Λₙ` in closed form, by quadrature, and split.
//! * [`microlocal`]: the varieties `K±`, ray decay and wave-front candidates.
//! * [`gamma`]: slice-wise position-space transforms and the commutative limit.
//! * [`perturbation`]: symbolic interacting-field expansion.

pub mod algebra;
pub mod error;
pub mod gamma;
pub mod kernel;
pub mod microlocal;
pub mod perturbation;

pub use error::{Error, Result};
