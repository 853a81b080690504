//! Time-domain finite-element simulation of 1-D wave propagation in media
//! with power-law frequency-dependent absorption.
//!
//! The medium is discretized with linear elements and a lumped (diagonal)
//! mass matrix; after symmetric mass normalization the semi-discrete
//! equation of motion is
//!
//! ```text
//! p̈ + D ṗ + c² K p = g(t)
//! ```
//!
//! where `K` is the mass-normalized stiffness matrix and the damping
//! operator `D` encodes the absorption law. The crate's centerpiece is the
//! fractional-power damping family `D = 2 α₀ c K^(y/2)`, which reproduces a
//! spatial attenuation coefficient `α(ω) = α₀ ωᵞ` (nepers per unit length)
//! for any exponent `y ∈ [0, 2]`; classical Rayleigh and viscous-fluid
//! damping fall out as special cases.
//!
//! Two independent solution routes are provided and cross-checked:
//!
//! * [`modal`] — eigendecomposition of `K` plus per-mode Duhamel
//!   convolution, exact in time up to quadrature of the forcing term;
//! * [`integrate`] — direct time stepping (Newmark average acceleration or
//!   central difference) on the assembled system.
//!
//! [`analysis`] closes the loop: it measures attenuation from simulated
//! waveforms with a two-probe log-ratio estimator and fits the power law
//! back out of a frequency sweep, recovering `(α₀, y)` from synthetic data.

pub mod analysis;
pub mod error;
pub mod fem;
pub mod integrate;
pub mod matfun;
pub mod modal;
pub mod report;
pub mod scenario;
pub mod signal;
pub mod spd;
pub mod sweep;

pub use error::{Error, Result};
pub use spd::SpdMatrix;

// Re-exported so downstream crates construct the vector/matrix types the
// public API expects without pinning their own copy of the dependency.
pub use nalgebra;
