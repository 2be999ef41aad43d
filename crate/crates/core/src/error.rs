use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("grid must have an even number of points >= 8, got {n_points}")]
    InvalidGrid { n_points: usize },

    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("spectrum is not conjugate symmetric: imaginary residue {max_imag:e}")]
    NonSymmetricSpectrum { max_imag: f64 },

    #[error("fields live on different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    #[error("frequency {k} outside the admissible range 1..{limit}")]
    FrequencyOutOfRange { k: i64, limit: i64 },

    #[error("TiedMaximum: largest coefficient attained at frequencies {frequencies:?}")]
    TiedMaximum { frequencies: Vec<i64> },

    #[error("NonFiniteProfile: coefficient for k = {k} is not finite")]
    NonFiniteProfile { k: i64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("trajectory diverged at t = {t} (sup norm {sup_norm:e})")]
    Diverged { t: f64, sup_norm: f64 },

    #[error("largest kernel coefficient W_hat({k_max}) = {value} is not positive")]
    NonPositivePeak { k_max: i64, value: f64 },

    #[error("dense eigenvalue {eigenvalue} is {distance:e} away from every closed-form value")]
    MatchFailure { eigenvalue: f64, distance: f64 },

    #[error("transfer function evaluated at its pole (k = {k})")]
    PoleEvaluation { k: i64 },

    #[error("linearization is unstable: alpha = {alpha} >= alpha* = {alpha_star}")]
    UnstableLinearization { alpha: f64, alpha_star: f64 },

    #[error("Newton refinement failed after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("dense linear algebra failed: {reason}")]
    LinearAlgebra { reason: &'static str },

    #[error("saturation slope is negative ({slope}) at an equilibrium sample")]
    NegativeSlope { slope: f64 },

    #[error("gaps {first} and {second} overlap on the circle")]
    OverlappingGaps { first: usize, second: usize },

    #[error("input is not quasi-static: Lipschitz bound {bound:e} >= {limit:e}")]
    QuasiStaticViolation { bound: f64, limit: f64 },

    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: &'static str },
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to invalid
    /// inputs or violated model assumptions).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverged { .. }
                | Error::MatchFailure { .. }
                | Error::PoleEvaluation { .. }
                | Error::NewtonDivergence { .. }
                | Error::LinearAlgebra { .. }
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
