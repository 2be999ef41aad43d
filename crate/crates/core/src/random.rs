//! Seeded pseudo-random fields used for initial conditions and for breaking
//! exact symmetries in inputs.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{CircleGrid, RealField};

/// Independent samples uniform in `[−scale, scale]`.
pub fn uniform_noise(grid: CircleGrid, seed: u64, scale: f64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..grid.n_points())
        .map(|_| scale * rng.gen_range(-1.0..=1.0))
        .collect();
    RealField::new(grid, values).expect("finite noise")
}

/// A zero-mean smooth field built from Fourier modes `1..=max_mode` with random
/// amplitudes and phases, rescaled so that `‖f‖_∞ = amplitude`.
pub fn smooth_random_field(grid: CircleGrid, seed: u64, amplitude: f64, max_mode: usize) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_mode = max_mode.clamp(1, grid.n_points() / 2 - 1);
    let modes: Vec<(f64, f64, f64)> = (1..=max_mode)
        .map(|k| (k as f64, rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let raw = RealField::from_fn(grid, |t| {
        modes
            .iter()
            .map(|&(k, a, phase)| a * libm::cos(2.0 * PI * k * t + phase))
            .sum()
    });
    let norm = raw.sup_norm();
    if norm == 0.0 {
        return raw;
    }
    raw.map(|v| amplitude * v / norm)
}
