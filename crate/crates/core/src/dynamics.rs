//! Right-hand side and fixed-step RK4 integration of the opinion dynamics.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::{self, CircleGrid, Fft, RealField};
use crate::kernel::Kernel;
use crate::saturation::{Saturation, ShiftedTanh};
use crate::{Error, Result};

/// Sup norm beyond which a trajectory is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
/// Consecutive steps with `‖∂z/∂t‖∞ < steady_tol` required for a steady state.
pub const STEADY_STEPS: usize = 10;

/// Timescale, attention, saturation and kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<S = ShiftedTanh> {
    pub tau: f64,
    pub alpha: f64,
    pub saturation: S,
    pub kernel: Kernel,
}

impl ModelParams<ShiftedTanh> {
    pub fn new(tau: f64, alpha: f64, xi: f64, kernel: Kernel) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: xi,
                reason: "shift must be non-negative and finite",
            });
        }
        ModelParams::with_saturation(tau, alpha, ShiftedTanh::new(xi), kernel)
    }

    pub fn xi(&self) -> f64 {
        self.saturation.xi
    }
}

impl<S> ModelParams<S> {
    pub fn grid(&self) -> CircleGrid {
        self.kernel.grid()
    }
}

impl<S: Saturation> ModelParams<S> {
    pub fn with_saturation(tau: f64, alpha: f64, saturation: S, kernel: Kernel) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "timescale must be positive and finite",
            });
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "attention must be non-negative and finite",
            });
        }
        Ok(ModelParams {
            tau,
            alpha,
            saturation,
            kernel,
        })
    }

    /// Same model at a different attention value.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ModelParams::with_saturation(self.tau, alpha, self.saturation.clone(), self.kernel.clone())
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub steady_tol: f64,
    pub record_stride: usize,
}

impl SimConfig {
    /// `dt = τ/100`, `t_final = 200τ`, `steady_tol = 1e-8`.
    pub fn for_tau(tau: f64) -> Self {
        SimConfig {
            dt: 0.01 * tau,
            t_final: 200.0 * tau,
            steady_tol: 1e-8,
            record_stride: 100,
        }
    }

    pub fn validate(&self, tau: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= tau / 10.0 * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "step must satisfy 0 < dt <= tau/10",
            });
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                value: self.t_final,
                reason: "horizon must be positive and finite",
            });
        }
        if !(self.steady_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "steady_tol",
                value: self.steady_tol,
                reason: "tolerance must be positive",
            });
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "record_stride",
                value: 0.0,
                reason: "stride must be at least 1",
            });
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        libm::ceil(self.t_final / self.dt - 1e-9) as usize
    }
}

/// Recorded trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub snapshots: Vec<RealField>,
    pub reached_steady: bool,
    pub final_state: RealField,
    pub t_end: f64,
}

/// Time-dependent input `u(θ, t)`.
pub trait InputSource {
    fn grid(&self) -> CircleGrid;

    fn sample(&self, t: f64, out: &mut [f64]);

    /// Time after which the input no longer changes. Steady states are only
    /// declared past this time.
    fn static_after(&self) -> f64 {
        0.0
    }
}

impl InputSource for RealField {
    fn grid(&self) -> CircleGrid {
        RealField::grid(self)
    }

    fn sample(&self, _t: f64, out: &mut [f64]) {
        out.copy_from_slice(self.values());
    }
}

/// Circular convolution with a kernel, `conv(f) = to_real(Ŵ · f̂)`.
#[derive(Debug, Clone)]
pub struct SpectralConvolver {
    fft: Fft,
    weights: Vec<f64>,
    buf: Vec<Complex64>,
}

impl SpectralConvolver {
    pub fn new(kernel: &Kernel) -> Self {
        let n = kernel.grid().n_points();
        let scale = 1.0 / n as f64;
        SpectralConvolver {
            fft: Fft::new(n),
            weights: kernel.coefficients().iter().map(|w| w * scale).collect(),
            buf: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn apply(&mut self, f: &[f64], out: &mut [f64]) {
        for (b, &v) in self.buf.iter_mut().zip(f) {
            *b = Complex64::new(v, 0.0);
        }
        self.fft.forward(&mut self.buf);
        for (b, &w) in self.buf.iter_mut().zip(&self.weights) {
            *b *= w;
        }
        self.fft.inverse(&mut self.buf);
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re;
        }
    }
}

/// Reusable evaluator of `τ⁻¹(−z + α W∗S(z) + u)`.
#[derive(Debug, Clone)]
pub struct RhsEvaluator<'a, S> {
    params: &'a ModelParams<S>,
    conv: SpectralConvolver,
    sat: Vec<f64>,
}

impl<'a, S: Saturation> RhsEvaluator<'a, S> {
    pub fn new(params: &'a ModelParams<S>) -> Self {
        RhsEvaluator {
            params,
            conv: SpectralConvolver::new(&params.kernel),
            sat: vec![0.0; params.grid().n_points()],
        }
    }

    pub fn eval(&mut self, z: &[f64], u: &[f64], out: &mut [f64]) {
        let s = &self.params.saturation;
        for (o, &v) in self.sat.iter_mut().zip(z) {
            *o = s.value(v);
        }
        self.conv.apply(&self.sat, out);
        let (alpha, inv_tau) = (self.params.alpha, 1.0 / self.params.tau);
        for ((o, &zj), &uj) in out.iter_mut().zip(z).zip(u) {
            *o = (-zj + alpha * *o + uj) * inv_tau;
        }
    }
}

/// `∂z/∂t` for state `z` under input `u`.
pub fn rhs<S: Saturation>(z: &RealField, u: &RealField, params: &ModelParams<S>) -> Result<RealField> {
    let grid = params.grid();
    for f in [z.grid(), u.grid()] {
        if f != grid {
            return Err(Error::GridMismatch {
                left: grid.n_points(),
                right: f.n_points(),
            });
        }
    }
    let mut out = vec![0.0; grid.n_points()];
    RhsEvaluator::new(params).eval(z.values(), u.values(), &mut out);
    RealField::new(grid, out)
}

/// Fixed-step RK4 from `z0` under `input`.
pub fn integrate<S: Saturation, I: InputSource + ?Sized>(
    z0: &RealField,
    input: &I,
    params: &ModelParams<S>,
    cfg: &SimConfig,
) -> Result<SimResult> {
    integrate_observed(z0, input, params, cfg, |_, _| {})
}

/// As [`integrate`], calling `observer(t, z)` at `t = 0` and after every step.
pub fn integrate_observed<S, I, F>(
    z0: &RealField,
    input: &I,
    params: &ModelParams<S>,
    cfg: &SimConfig,
    mut observer: F,
) -> Result<SimResult>
where
    S: Saturation,
    I: InputSource + ?Sized,
    F: FnMut(f64, &[f64]),
{
    cfg.validate(params.tau)?;
    let grid = params.grid();
    for g in [z0.grid(), input.grid()] {
        if g != grid {
            return Err(Error::GridMismatch {
                left: grid.n_points(),
                right: g.n_points(),
            });
        }
    }
    let n = grid.n_points();
    let dt = cfg.dt;
    let n_steps = cfg.n_steps();
    let settle = input.static_after();

    let mut eval = RhsEvaluator::new(params);
    let mut z = z0.values().to_vec();
    let mut u0 = vec![0.0; n];
    let mut u_half = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];

    let mut times = vec![0.0];
    let mut snapshots = vec![z0.clone()];
    observer(0.0, &z);

    let mut calm = 0;
    let mut reached_steady = false;
    let mut t = 0.0;
    let mut cached_static = false;
    let mut step = 0;
    while step < n_steps {
        t = step as f64 * dt;
        if !(cached_static && t >= settle) {
            input.sample(t, &mut u0);
            input.sample(t + 0.5 * dt, &mut u_half);
            input.sample(t + dt, &mut u1);
            cached_static = t >= settle;
        }
        eval.eval(&z, &u0, &mut k1);
        if t >= settle && grid::sup_norm(&k1) < cfg.steady_tol {
            calm += 1;
            if calm >= STEADY_STEPS {
                reached_steady = true;
                break;
            }
        } else {
            calm = 0;
        }
        for j in 0..n {
            tmp[j] = z[j] + 0.5 * dt * k1[j];
        }
        eval.eval(&tmp, &u_half, &mut k2);
        for j in 0..n {
            tmp[j] = z[j] + 0.5 * dt * k2[j];
        }
        eval.eval(&tmp, &u_half, &mut k3);
        for j in 0..n {
            tmp[j] = z[j] + dt * k3[j];
        }
        eval.eval(&tmp, &u1, &mut k4);
        for j in 0..n {
            z[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        step += 1;
        t = step as f64 * dt;
        let norm = z.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
        if !(norm <= DIVERGENCE_LIMIT) {
            return Err(Error::Diverged { t, sup_norm: norm });
        }
        observer(t, &z);
        if step % cfg.record_stride == 0 {
            times.push(t);
            snapshots.push(RealField::new(grid, z.clone())?);
        }
    }
    let final_state = RealField::new(grid, z)?;
    if *times.last().unwrap_or(&-1.0) != t {
        times.push(t);
        snapshots.push(final_state.clone());
    }
    Ok(SimResult {
        times,
        snapshots,
        reached_steady,
        final_state,
        t_end: t,
    })
}

/// Number of strict cyclic local maxima above `rel_threshold · max f`.
///
/// Runs of equal samples (to `1e-12 · max f`) count as one maximum when both
/// neighbouring samples are lower.
pub fn count_peaks(f: &RealField, rel_threshold: f64) -> usize {
    let v = f.values();
    let n = v.len();
    let top = f.max();
    if !(top > 0.0) {
        return 0;
    }
    let eps = 1e-12 * top;
    let same = |a: f64, b: f64| (a - b).abs() <= eps;
    // Start at a sample that differs from its predecessor so that runs do not
    // wrap around the origin.
    let Some(start) = (0..n).find(|&j| !same(v[j], v[(j + n - 1) % n])) else {
        return 0;
    };
    let mut peaks = 0;
    let mut i = 0;
    while i < n {
        let j0 = (start + i) % n;
        let mut len = 1;
        while len < n && same(v[(j0 + len) % n], v[j0]) {
            len += 1;
        }
        let before = v[(j0 + n - 1) % n];
        let after = v[(j0 + len) % n];
        if v[j0] > before && v[j0] > after && v[j0] > rel_threshold * top {
            peaks += 1;
        }
        i += len;
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::cosine_mode;
    use crate::kernel::design_gaussian_kernel;

    fn params(alpha: f64, xi: f64, k_c: i64) -> ModelParams {
        let grid = CircleGrid::new(256).unwrap();
        ModelParams::new(1.0, alpha, xi, design_gaussian_kernel(grid, k_c, 3.0).unwrap()).unwrap()
    }

    #[test]
    fn origin_is_equilibrium() {
        let p = params(0.98, 0.7, 1);
        let z = RealField::zeros(p.grid());
        assert_eq!(rhs(&z, &z, &p).unwrap(), z);
    }

    #[test]
    fn input_read_through_at_origin() {
        let grid = CircleGrid::new(256).unwrap();
        let k = design_gaussian_kernel(grid, 1, 3.0).unwrap();
        let p = ModelParams::new(2.0, 0.98, 0.7, k).unwrap();
        let u = RealField::from_fn(grid, |t| libm::sin(6.0 * t) + 0.3);
        let r = rhs(&RealField::zeros(grid), &u, &p).unwrap();
        for (a, b) in r.values().iter().zip(u.values()) {
            assert!((a - b / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn linearization_on_leading_mode() {
        let p = params(0.98, 0.7, 1);
        let z = cosine_mode(p.grid(), 1, 1e-6);
        let r = rhs(&z, &RealField::zeros(p.grid()), &p).unwrap();
        let expected = z.map(|v| -0.02 * v);
        let err = r.distance(&expected).unwrap() / expected.sup_norm();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let grid = CircleGrid::new(32).unwrap();
        let k = design_gaussian_kernel(grid, 2, 1.5).unwrap();
        let w = k.real_space().values();
        let f: Vec<f64> = (0..32).map(|j| libm::cos(j as f64 * 0.7) + 0.1 * j as f64).collect();
        let mut out = vec![0.0; 32];
        SpectralConvolver::new(&k).apply(&f, &mut out);
        for j in 0..32 {
            let direct: f64 = (0..32).map(|m| w[(j + 32 - m) % 32] * f[m]).sum::<f64>() / 32.0;
            assert!((out[j] - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_stays_zero() {
        let p = params(0.98, 0.7, 1);
        let z0 = RealField::zeros(p.grid());
        let res = integrate(&z0, &z0, &p, &SimConfig::for_tau(1.0)).unwrap();
        assert!(res.reached_steady);
        assert_eq!(res.final_state, z0);
        assert!(res.t_end < 1.0);
    }

    #[test]
    fn large_cosine_settles_on_one_bump() {
        let p = params(0.98, 0.7, 1);
        let z0 = cosine_mode(p.grid(), 1, 2.0);
        let res = integrate(&z0, &RealField::zeros(p.grid()), &p, &SimConfig::for_tau(1.0)).unwrap();
        assert!(res.reached_steady);
        assert_eq!(count_peaks(&res.final_state, 0.5), 1);
        assert!(res.final_state.max() > 1.0);
        assert_eq!(res.times.len(), res.snapshots.len());
    }

    #[test]
    fn rejects_coarse_step() {
        let p = params(0.5, 0.0, 1);
        let z0 = RealField::zeros(p.grid());
        let cfg = SimConfig { dt: 0.2, ..SimConfig::for_tau(1.0) };
        assert!(matches!(
            integrate(&z0, &z0, &p, &cfg),
            Err(Error::InvalidParameter { name: "dt", .. })
        ));
    }

    #[test]
    fn divergence_is_an_error() {
        let grid = CircleGrid::new(16).unwrap();
        let k = design_gaussian_kernel(grid, 1, 3.0).unwrap();
        let p = ModelParams::new(1.0, 0.5, 0.0, k).unwrap();
        let z0 = RealField::zeros(grid);
        let u = RealField::constant(grid, 1e9);
        let err = integrate(&z0, &u, &p, &SimConfig::for_tau(1.0)).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn peaks_of_simple_fields() {
        let grid = CircleGrid::new(256).unwrap();
        assert_eq!(count_peaks(&cosine_mode(grid, 1, 1.0), 0.5), 1);
        assert_eq!(count_peaks(&cosine_mode(grid, 3, 1.0), 0.5), 3);
        assert_eq!(count_peaks(&RealField::zeros(grid), 0.5), 0);
        assert_eq!(count_peaks(&cosine_mode(grid, 1, -1.0).map(|v| v - 2.0), 0.5), 0);
    }

    #[test]
    fn plateaus_and_thresholds() {
        let grid = CircleGrid::new(8).unwrap();
        let f = RealField::new(grid, vec![1.0, 1.0, 0.0, 0.0, 0.3, 0.0, 0.9, 0.0]).unwrap();
        assert_eq!(count_peaks(&f, 0.5), 2);
        assert_eq!(count_peaks(&f, 0.2), 3);
        // A plateau wrapping around the origin.
        let g = RealField::new(grid, vec![2.0, 0.0, 0.0, 1.5, 0.0, 0.0, 2.0, 2.0]).unwrap();
        assert_eq!(count_peaks(&g, 0.5), 2);
    }
}
