//! Interaction kernels designed from their Fourier coefficients.
//!
//! A designed kernel has real, even coefficients `Ŵ(k) = Ŵ(−k)`, no mean
//! (`Ŵ(0) = 0`), a zero Nyquist coefficient and a unique largest positive
//! coefficient at `±k_max`; the number of maxima of emerging opinion patterns
//! is `k_max`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::{CircleGrid, RealField, SpectralField};
use crate::{Error, Result};

/// Tolerance used for symmetry, realness and zero-mean checks.
pub const COEFF_TOL: f64 = 1e-12;
/// Largest admissible share of spectral energy above `|k| > N/4`.
pub const TAIL_ENERGY_LIMIT: f64 = 1e-10;

/// Paired spectral and real-space description of an interaction kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    spectral: SpectralField,
    real_space: RealField,
    /// Real parts of `Ŵ` in transform order, used by the convolution.
    hat: Vec<f64>,
    k_max: i64,
    k_c: Option<i64>,
    p: Option<f64>,
}

/// Gaussian profile `Ŵ(k) = exp(−(|k| − k_c)² / p²)` for `0 < |k| < N/2`.
pub fn design_gaussian_kernel(grid: CircleGrid, k_c: i64, p: f64) -> Result<Kernel> {
    let limit = (grid.n_points() / 2) as i64;
    if k_c < 1 || k_c >= limit {
        return Err(Error::FrequencyOutOfRange { k: k_c, limit });
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "spectral width must be positive and finite",
        });
    }
    let spectral = SpectralField::from_fn(grid, |k| {
        let value = if k == 0 || k == grid.nyquist() {
            0.0
        } else {
            let d = (k.abs() - k_c) as f64;
            libm::exp(-d * d / (p * p))
        };
        Complex64::new(value, 0.0)
    })?;
    let mut kernel = Kernel::assemble(spectral)?;
    kernel.k_max = k_c;
    kernel.k_c = Some(k_c);
    kernel.p = Some(p);
    Ok(kernel)
}

/// Kernel with `Ŵ(±k) = profile[k]`, `Ŵ(0) = 0` and every other coefficient zero.
pub fn design_kernel_from_profile(grid: CircleGrid, profile: &BTreeMap<i64, f64>) -> Result<Kernel> {
    let limit = (grid.n_points() / 2) as i64;
    for (&k, &v) in profile {
        if k < 1 || k >= limit {
            return Err(Error::FrequencyOutOfRange { k, limit });
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteProfile { k });
        }
    }
    let (k_max, peak) = unique_maximizer(profile.iter().map(|(&k, &v)| (k, v)))?;
    if peak <= 0.0 {
        return Err(Error::NonPositivePeak { k_max, value: peak });
    }
    let spectral = SpectralField::from_fn(grid, |k| {
        let v = if k == grid.nyquist() {
            0.0
        } else {
            profile.get(&k.abs()).copied().unwrap_or(0.0)
        };
        Complex64::new(v, 0.0)
    })?;
    let mut kernel = Kernel::assemble(spectral)?;
    kernel.k_max = k_max;
    Ok(kernel)
}

/// The unique maximizer of `(k, value)` pairs, or `TiedMaximum`.
fn unique_maximizer(pairs: impl Iterator<Item = (i64, f64)>) -> Result<(i64, f64)> {
    let pairs: Vec<(i64, f64)> = pairs.collect();
    let peak = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if pairs.is_empty() {
        return Err(Error::NonPositivePeak { k_max: 0, value: 0.0 });
    }
    let tol = COEFF_TOL * peak.abs().max(1.0);
    let winners: Vec<i64> = pairs.iter().filter(|p| peak - p.1 <= tol).map(|p| p.0).collect();
    if winners.len() > 1 {
        return Err(Error::TiedMaximum { frequencies: winners });
    }
    Ok((winners[0], peak))
}

impl Kernel {
    /// Wrap an arbitrary spectrum without enforcing the design invariants.
    ///
    /// The real-space samples are the real part of the inverse transform, and
    /// `k_max` is the first maximizer of `Re Ŵ(k)` over `0 < k < N/2`. Use
    /// [`validate_kernel`] to see which invariants hold.
    pub fn from_spectrum_unchecked(spectral: SpectralField) -> Kernel {
        let grid = spectral.grid();
        let fft = crate::grid::Fft::new(grid.n_points());
        let (values, _) = spectral.inverse_parts(&fft);
        let real_space = RealField::new(grid, values).expect("finite coefficients give finite samples");
        let hat = spectral.coeffs().iter().map(|c| c.re).collect();
        let k_max = (1..=grid.max_frequency())
            .fold((1, f64::NEG_INFINITY), |best, k| {
                let v = spectral.coeff(k).re;
                if v > best.1 {
                    (k, v)
                } else {
                    best
                }
            })
            .0;
        Kernel {
            spectral,
            real_space,
            hat,
            k_max,
            k_c: None,
            p: None,
        }
    }

    /// Kernel from non-negative-frequency coefficients `Ŵ(0), Ŵ(1), …`, mirrored
    /// to negative frequencies. Missing frequencies are zero.
    pub fn from_half_spectrum(grid: CircleGrid, half: &[(i64, f64)]) -> Result<Kernel> {
        let limit = (grid.n_points() / 2) as i64;
        let mut values = vec![0.0; grid.n_points() / 2 + 1];
        for &(k, v) in half {
            if !(0..=limit).contains(&k) {
                return Err(Error::FrequencyOutOfRange { k, limit });
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteProfile { k });
            }
            values[k as usize] = v;
        }
        let spectral = SpectralField::from_fn(grid, |k| Complex64::new(values[k.unsigned_abs() as usize], 0.0))?;
        Ok(Kernel::from_spectrum_unchecked(spectral))
    }

    fn assemble(spectral: SpectralField) -> Result<Kernel> {
        let real_space = spectral.to_real()?;
        let hat = spectral.coeffs().iter().map(|c| c.re).collect();
        Ok(Kernel {
            spectral,
            real_space,
            hat,
            k_max: 1,
            k_c: None,
            p: None,
        })
    }

    pub fn grid(&self) -> CircleGrid {
        self.spectral.grid()
    }

    pub fn spectral(&self) -> &SpectralField {
        &self.spectral
    }

    pub fn real_space(&self) -> &RealField {
        &self.real_space
    }

    /// `Re Ŵ(k)`.
    pub fn coefficient(&self, k: i64) -> f64 {
        self.hat[self.grid().slot(k)]
    }

    /// `Re Ŵ` in transform order.
    pub fn coefficients(&self) -> &[f64] {
        &self.hat
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn center_frequency(&self) -> Option<i64> {
        self.k_c
    }

    pub fn width(&self) -> Option<f64> {
        self.p
    }

    /// `(k, Ŵ(k))` for `k = 0..=N/2`, the on-disk representation.
    pub fn half_spectrum(&self) -> Vec<(i64, f64)> {
        let n2 = (self.grid().n_points() / 2) as i64;
        (0..=n2).map(|k| (k, self.coefficient(k))).collect()
    }
}

/// Outcome of a single kernel check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail list for the kernel invariants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Check symmetry, realness, zero mean, a unique positive `k_max`, a zero
/// Nyquist coefficient and the spectral-tail proxy for square summability.
pub fn validate_kernel(kernel: &Kernel) -> ValidationReport {
    let spec = kernel.spectral();
    let grid = kernel.grid();
    let mut checks = Vec::new();

    let asym = grid
        .frequencies()
        .map(|k| (spec.coeff(k) - spec.coeff(-k)).norm())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "symmetry",
        passed: asym <= COEFF_TOL,
        detail: format!("max |W(k) - W(-k)| = {asym:e}"),
    });

    let imag = spec.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    checks.push(Check {
        name: "realness",
        passed: imag <= COEFF_TOL,
        detail: format!("max |Im W(k)| = {imag:e}"),
    });

    let mean = spec.coeff(0).norm();
    checks.push(Check {
        name: "zero_mean",
        passed: mean <= COEFF_TOL,
        detail: format!("|W(0)| = {mean:e}"),
    });

    let positive = (1..=grid.max_frequency()).map(|k| (k, spec.coeff(k).re));
    let (passed, detail) = match unique_maximizer(positive) {
        Ok((k, v)) if v > 0.0 => (true, format!("k_max = {k}, W(k_max) = {v}")),
        Ok((k, v)) => (false, format!("largest coefficient W({k}) = {v} is not positive")),
        Err(Error::TiedMaximum { frequencies }) => (false, format!("tied maximum at {frequencies:?}")),
        Err(e) => (false, format!("{e}")),
    };
    checks.push(Check {
        name: "unique_k_max",
        passed,
        detail,
    });

    let nyquist = spec.coeff(grid.nyquist()).norm();
    checks.push(Check {
        name: "nyquist_zero",
        passed: nyquist <= COEFF_TOL,
        detail: format!("|W(-N/2)| = {nyquist:e}"),
    });

    let quarter = (grid.n_points() / 4) as i64;
    let total = spec.energy();
    let tail: f64 = spec
        .iter_frequencies()
        .filter(|(k, _)| k.abs() > quarter)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    let share = if total > 0.0 { tail / total } else { 0.0 };
    checks.push(Check {
        name: "square_summable",
        passed: share < TAIL_ENERGY_LIMIT,
        detail: format!("energy share above |k| > N/4 = {share:e}"),
    });

    ValidationReport { checks }
}
