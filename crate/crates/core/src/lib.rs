//! Nonlinear opinion dynamics over a continuum of options on the circle.
//!
//! The opinion field `z(θ, t)` on `S¹ = ℝ/ℤ` evolves as
//!
//! ```text
//! τ ∂z/∂t = −z + α ∫ W(θ − φ) S(z(φ, t)) dφ + u(θ, t)
//! ```
//!
//! where `W` is a symmetric interaction kernel, `S` a saturating function with
//! `S(0) = 0`, `S'(0) = 1`, and `u` an external input. Because the interaction
//! is a convolution, the linearization at `z ≡ 0` is diagonal in the Fourier
//! basis and its eigenvalues are `λ_k = (−1 + α Ŵ(k)) / τ`.
//!
//! This crate is `no_std` (it needs `alloc`) and carries the numerical core:
//!
//! * [`grid`]: uniform discretization of the circle and the transform pair.
//! * [`kernel`]: kernel design from prescribed Fourier coefficients.
//! * [`saturation`]: the shifted hyperbolic tangent and the pluggable trait.
//! * [`dynamics`]: right-hand side, fixed-step RK4 integration, peak counting.
//! * [`analysis`]: spectra, transfer functions, equilibria and bifurcation sweeps.
//! * [`scenario`]: quasi-static inputs, response experiments and gap selection.
//!
//! File formats, configuration and the command-line driver live in the `nod`
//! crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
#![forbid(unsafe_code)]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
mod error;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod random;
pub mod saturation;
pub mod scenario;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use num_complex::Complex64;

pub use analysis::{BifurcationDiagram, SpectrumReport};
pub use dynamics::{ModelParams, SimConfig, SimResult};
pub use grid::{CircleGrid, RealField, SpectralField};
pub use kernel::{Kernel, ValidationReport};
pub use saturation::{Saturation, ShiftedTanh};
pub use scenario::{Decision, InputSignal, ScenarioSpec};
