//! Uniform discretization of the unit-circumference circle and the spatial
//! Fourier transform pair.
//!
//! Normalization: the forward transform carries the `1/N` factor,
//!
//! ```text
//! f̂(k) = (1/N) Σ_j f(θ_j) e^{−i2πk j/N},      f(θ_j) = Σ_k f̂(k) e^{i2πk j/N},
//! ```
//!
//! so `f̂(k)` approximates `∫ f(θ) e^{−i2πkθ} dθ` directly and kernel
//! coefficients need no rescaling before they are compared with eigenvalues.
//! Frequencies are signed, `k ∈ {−N/2, …, N/2 − 1}`; coefficients are stored
//! in transform order (slot `j` holds `k = j` for `j < N/2`, else `k = j − N`).

mod fft;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub use fft::Fft;

use crate::{Error, Result};

/// Imaginary residue above which an inverse transform is rejected.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-10;

/// `N` uniform samples `θ_j = j/N` of the circle `ℝ/ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircleGrid {
    n_points: usize,
}

impl CircleGrid {
    pub const DEFAULT_POINTS: usize = 256;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || n_points % 2 != 0 {
            return Err(Error::InvalidGrid { n_points });
        }
        Ok(CircleGrid { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing `Δθ = 1/N`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n_points as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 / self.n_points as f64
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.theta(j))
    }

    /// Largest representable positive frequency, `N/2 − 1`.
    pub fn max_frequency(&self) -> i64 {
        (self.n_points / 2) as i64 - 1
    }

    /// The Nyquist frequency `−N/2`.
    pub fn nyquist(&self) -> i64 {
        -((self.n_points / 2) as i64)
    }

    /// All representable frequencies in ascending order.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        self.nyquist()..=self.max_frequency()
    }

    /// Storage slot of frequency `k` (taken modulo `N`).
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.n_points as i64) as usize
    }

    /// Signed frequency stored in `slot`.
    pub fn frequency(&self, slot: usize) -> i64 {
        let n = self.n_points;
        if slot < n / 2 {
            slot as i64
        } else {
            slot as i64 - n as i64
        }
    }

    /// Index of the sample nearest to angle `theta` (wrapped onto the circle).
    pub fn nearest_index(&self, theta: f64) -> usize {
        let n = self.n_points as f64;
        (libm::round(wrap_angle(theta) * n) as usize) % self.n_points
    }

    fn check_same(&self, other: &CircleGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.n_points,
                right: other.n_points,
            });
        }
        Ok(())
    }
}

/// Wrap an angle into `[0, 1)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta - libm::floor(theta);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Geodesic distance between two angles on the unit-circumference circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(1.0 - d)
}

/// Samples of a real scalar function on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: CircleGrid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: CircleGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "field samples" });
        }
        Ok(RealField { grid, values })
    }

    pub fn zeros(grid: CircleGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: CircleGrid, value: f64) -> Self {
        RealField {
            grid,
            values: vec![value; grid.n_points()],
        }
    }

    /// Sample `f(θ_j)` for every grid point.
    ///
    /// # Panics
    ///
    /// If `f` returns a non-finite value.
    pub fn from_fn(grid: CircleGrid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.thetas().map(f).collect();
        assert!(values.iter().all(|v| v.is_finite()), "non-finite sample");
        RealField { grid, values }
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the largest sample (first one on ties).
    pub fn argmax(&self) -> usize {
        argmax(&self.values)
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    /// `L²(S¹)` norm under the grid quadrature.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `‖self − other‖_∞`.
    pub fn distance(&self, other: &RealField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max))
    }

    /// Spatial Fourier coefficients `f̂(k)`.
    pub fn to_spectral(&self) -> SpectralField {
        let fft = Fft::new(self.len());
        self.to_spectral_with(&fft)
    }

    pub fn to_spectral_with(&self, fft: &Fft) -> SpectralField {
        let scale = 1.0 / self.len() as f64;
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        for c in &mut buf {
            *c *= scale;
        }
        SpectralField {
            grid: self.grid,
            coeffs: buf,
        }
    }

    /// Circular shift by `m` samples: `out(j) = f((j − m) mod N)`.
    pub fn shift(&self, m: i64) -> RealField {
        let n = self.len();
        let m = m.rem_euclid(n as i64) as usize;
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(&self.values[n - m..]);
        values.extend_from_slice(&self.values[..n - m]);
        RealField {
            grid: self.grid,
            values,
        }
    }

    /// `⟨f, g⟩ = (1/N) Σ_j f(θ_j) g(θ_j)`.
    pub fn inner_product(&self, other: &RealField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(sum / self.len() as f64)
    }
}

/// Fourier coefficients of a field, stored in transform order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: CircleGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Wrap coefficients given in transform order.
    pub fn new(grid: CircleGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { what: "spectral coefficients" });
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Build coefficients from a function of the signed frequency.
    pub fn from_fn(grid: CircleGrid, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        let coeffs = (0..grid.n_points()).map(|s| f(grid.frequency(s))).collect();
        Self::new(grid, coeffs)
    }

    pub fn grid(&self) -> CircleGrid {
        self.grid
    }

    /// Coefficient of frequency `k`, taken modulo `N`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[self.grid.slot(k)]
    }

    /// Coefficients in transform order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(k, f̂(k))` pairs in ascending frequency order.
    pub fn iter_frequencies(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.grid.frequencies().map(move |k| (k, self.coeff(k)))
    }

    /// Largest `|f̂(k) − conj(f̂(−k))|` over all representable `k`.
    pub fn symmetry_defect(&self) -> f64 {
        self.grid
            .frequencies()
            .map(|k| (self.coeff(k) - self.coeff(-k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ_k |f̂(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Inverse transform; fails if the reconstruction is not real.
    pub fn to_real(&self) -> Result<RealField> {
        let fft = Fft::new(self.coeffs.len());
        self.to_real_with(&fft)
    }

    pub fn to_real_with(&self, fft: &Fft) -> Result<RealField> {
        let (values, max_imag) = self.inverse_parts(fft);
        if max_imag >= IMAG_RESIDUE_LIMIT {
            return Err(Error::NonSymmetricSpectrum { max_imag });
        }
        RealField::new(self.grid, values)
    }

    /// Real part of the inverse transform together with the largest
    /// discarded imaginary residue.
    pub fn inverse_parts(&self, fft: &Fft) -> (Vec<f64>, f64) {
        let mut buf = self.coeffs.clone();
        fft.inverse(&mut buf);
        let max_imag = buf.iter().map(|c| libm::fabs(c.im)).fold(0.0, f64::max);
        (buf.into_iter().map(|c| c.re).collect(), max_imag)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn sup_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max)
}

/// `cos(2πkθ)` sampled on `grid`, scaled by `amplitude`.
pub fn cosine_mode(grid: CircleGrid, k: i64, amplitude: f64) -> RealField {
    RealField::from_fn(grid, |t| amplitude * libm::cos(2.0 * PI * k as f64 * t))
}
