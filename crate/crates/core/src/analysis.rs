//! Linearization spectra, transfer functions, equilibria and bifurcation sweeps.
//!
//! At `z ≡ 0` the Jacobian of the discretized dynamics is circulant, so its
//! eigenvalues are `λ_k = (−1 + α Ŵ(k)) / τ` with the Fourier modes as
//! eigenvectors. The neutral state loses stability at `α* = 1 / Ŵ(k_max)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{count_peaks, integrate, ModelParams, RhsEvaluator, SimConfig};
use crate::grid::{CircleGrid, RealField};
use crate::linalg::{self, Lu};
use crate::saturation::Saturation;
use crate::{Error, Result};

/// Largest admissible gap between dense and closed-form eigenvalues.
pub const MATCH_TOL: f64 = 1e-8;
/// Distance to a pole below which the transfer function is not evaluated.
pub const POLE_TOL: f64 = 1e-14;
/// Equilibria are stable below `−STABILITY_TOL` and unstable above `+STABILITY_TOL`.
pub const STABILITY_TOL: f64 = 1e-6;
/// Newton stops once `‖∂z/∂t‖∞` falls below this value.
pub const NEWTON_TOL: f64 = 1e-11;
/// Equilibria with a smaller sup norm belong to the neutral branch.
pub const ZERO_BRANCH_TOL: f64 = 1e-4;

const NEWTON_MAX_ITER: usize = 60;

/// Closed-form spectrum of the linearization at the neutral state.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectrumReport {
    pub eigenvalues: BTreeMap<i64, f64>,
    pub k_max: i64,
    pub alpha_star: f64,
    pub leading_eigenvalue: f64,
}

impl SpectrumReport {
    pub fn eigenvalue(&self, k: i64) -> Option<f64> {
        self.eigenvalues.get(&k).copied()
    }

    pub fn is_stable(&self) -> bool {
        self.eigenvalues.values().all(|&l| l < 0.0)
    }
}

fn lambda<S>(params: &ModelParams<S>, k: i64) -> f64 {
    (-1.0 + params.alpha * params.kernel.coefficient(k)) / params.tau
}

/// `λ_k = (−1 + α Ŵ(k)) / τ` for every representable `k`, and `α* = 1/Ŵ(k_max)`.
pub fn eigenvalues<S>(params: &ModelParams<S>) -> Result<SpectrumReport> {
    let k_max = params.kernel.k_max();
    let peak = params.kernel.coefficient(k_max);
    if !(peak > 0.0) {
        return Err(Error::NonPositivePeak { k_max, value: peak });
    }
    let grid = params.grid();
    let eigenvalues = grid.frequencies().map(|k| (k, lambda(params, k))).collect();
    Ok(SpectrumReport {
        eigenvalues,
        k_max,
        alpha_star: 1.0 / peak,
        leading_eigenvalue: lambda(params, k_max),
    })
}

/// Dense Jacobian of the discretized right-hand side at `z`, row-major.
pub fn jacobian<S: Saturation>(params: &ModelParams<S>, z: &RealField) -> Vec<f64> {
    let n = z.len();
    let w = params.kernel.real_space().values();
    let slopes: Vec<f64> = z.values().iter().map(|&v| params.saturation.slope(v)).collect();
    let (a, inv_tau, inv_n) = (params.alpha, 1.0 / params.tau, 1.0 / n as f64);
    let mut jac = vec![0.0; n * n];
    for j in 0..n {
        for m in 0..n {
            let c = w[(j + n - m) % n] * inv_n;
            jac[j * n + m] = (a * c * slopes[m] - if j == m { 1.0 } else { 0.0 }) * inv_tau;
        }
    }
    jac
}

/// Eigenvalues of the Jacobian at `z`, ascending.
///
/// The Jacobian `(−I + α C diag(S'(z))) / τ` is similar to the symmetric
/// matrix obtained by conjugating with `diag(S'(z))^{1/2}`, so its spectrum is
/// real whenever every slope is non-negative.
pub fn jacobian_eigenvalues<S: Saturation>(params: &ModelParams<S>, z: &RealField) -> Result<Vec<f64>> {
    let n = z.len();
    let w = params.kernel.real_space().values();
    let mut root = Vec::with_capacity(n);
    for &v in z.values() {
        let s = params.saturation.slope(v);
        if s < 0.0 {
            return Err(Error::NegativeSlope { slope: s });
        }
        root.push(libm::sqrt(s));
    }
    let (a, inv_tau, inv_n) = (params.alpha, 1.0 / params.tau, 1.0 / n as f64);
    let mut sym = vec![0.0; n * n];
    for j in 0..n {
        for m in 0..n {
            let c = 0.5 * (w[(j + n - m) % n] + w[(m + n - j) % n]) * inv_n;
            sym[j * n + m] = (a * root[j] * c * root[m] - if j == m { 1.0 } else { 0.0 }) * inv_tau;
        }
    }
    linalg::symmetric_eigenvalues(&sym, n)
}

/// Dense eigendecomposition of the circulant Jacobian at the neutral state,
/// with each eigenvalue assigned to a frequency.
///
/// Both spectra are sorted and paired in order, which assigns degenerate
/// `±k` pairs consistently. Fails with `MatchFailure` when a dense eigenvalue
/// is farther than [`MATCH_TOL`] from its closed-form partner.
pub fn numerical_jacobian_spectrum<S: Saturation>(params: &ModelParams<S>) -> Result<BTreeMap<i64, f64>> {
    let grid = params.grid();
    let dense = jacobian_eigenvalues(params, &RealField::zeros(grid))?;
    let mut closed: Vec<(i64, f64)> = grid.frequencies().map(|k| (k, lambda(params, k))).collect();
    closed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut out = BTreeMap::new();
    for (&(k, exact), &num) in closed.iter().zip(&dense) {
        let distance = (exact - num).abs();
        if !(distance <= MATCH_TOL) {
            return Err(Error::MatchFailure {
                eigenvalue: num,
                distance,
            });
        }
        out.insert(k, num);
    }
    Ok(out)
}

/// `H(k, s) = 1 / (s − λ_k)`.
pub fn transfer_function<S>(params: &ModelParams<S>, k: i64, s: Complex64) -> Result<Complex64> {
    let d = s - Complex64::new(lambda(params, k), 0.0);
    if d.norm() < POLE_TOL {
        return Err(Error::PoleEvaluation { k });
    }
    Ok(d.inv())
}

/// `H̃(k) = H(k, 0) = τ / (1 − α Ŵ(k))` for every representable `k`.
pub fn spatial_transfer_profile<S>(params: &ModelParams<S>) -> Result<BTreeMap<i64, f64>> {
    let report = eigenvalues(params)?;
    if params.alpha >= report.alpha_star {
        return Err(Error::UnstableLinearization {
            alpha: params.alpha,
            alpha_star: report.alpha_star,
        });
    }
    let grid = params.grid();
    Ok(grid
        .frequencies()
        .map(|k| (k, params.tau / (1.0 - params.alpha * params.kernel.coefficient(k))))
        .collect())
}

/// The input's component `û(k_max)` on the leading mode.
pub fn alignment(u: &RealField, k_max: i64) -> Complex64 {
    u.to_spectral().coeff(k_max)
}

/// `dz/dθ` by spectral differentiation (Nyquist component dropped).
pub fn spectral_derivative(z: &RealField) -> RealField {
    let grid = z.grid();
    let spec = z.to_spectral();
    let nyq = grid.nyquist();
    let coeffs = grid
        .frequencies()
        .map(|k| {
            if k == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                spec.coeff(k) * Complex64::new(0.0, 2.0 * core::f64::consts::PI * k as f64)
            }
        })
        .collect::<Vec<_>>();
    let mut ordered = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    for (k, c) in grid.frequencies().zip(coeffs) {
        ordered[grid.slot(k)] = c;
    }
    crate::grid::SpectralField::new(grid, ordered)
        .and_then(|s| s.to_real())
        .expect("derivative of a real field is real")
}

fn residual<S: Saturation>(eval: &mut RhsEvaluator<'_, S>, z: &[f64], zero: &[f64], out: &mut [f64]) -> f64 {
    eval.eval(z, zero, out);
    crate::grid::sup_norm(out)
}

fn is_patterned(z: &RealField) -> Option<RealField> {
    let d = spectral_derivative(z);
    (d.sup_norm() > 1e-6).then_some(d)
}

/// Damped Newton refinement of an unforced equilibrium `0 = −z + α W∗S(z)`.
///
/// Patterned states are only unique up to rotation, so their Newton systems
/// are bordered with the phase condition `⟨z', δ⟩ = 0`.
pub fn refine_equilibrium<S: Saturation>(params: &ModelParams<S>, guess: &RealField) -> Result<RealField> {
    let grid = params.grid();
    if guess.grid() != grid {
        return Err(Error::GridMismatch {
            left: grid.n_points(),
            right: guess.grid().n_points(),
        });
    }
    let n = grid.n_points();
    let zero = vec![0.0; n];
    let mut eval = RhsEvaluator::new(params);
    let mut z = guess.values().to_vec();
    let mut f = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    let mut res = residual(&mut eval, &z, &zero, &mut f);

    for iter in 0..NEWTON_MAX_ITER {
        if res < NEWTON_TOL {
            return RealField::new(grid, z);
        }
        let state = RealField::new(grid, z.clone())?;
        let jac = jacobian(params, &state);
        let step = match is_patterned(&state) {
            Some(d) => {
                let m = n + 1;
                let mut a = vec![0.0; m * m];
                for j in 0..n {
                    a[j * m..j * m + n].copy_from_slice(&jac[j * n..(j + 1) * n]);
                    a[j * m + n] = d.values()[j];
                    a[n * m + j] = d.values()[j];
                }
                let mut b: Vec<f64> = f.iter().map(|v| -v).chain([0.0]).collect();
                linalg::solve(&a, m, &mut b)?;
                b.truncate(n);
                b
            }
            None => {
                let mut b: Vec<f64> = f.iter().map(|v| -v).collect();
                Lu::factor(&jac, n)?.solve(&mut b);
                b
            }
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            for j in 0..n {
                trial[j] = z[j] + scale * step[j];
            }
            let r = residual(&mut eval, &trial, &zero, &mut f_trial);
            if r.is_finite() && r < res {
                core::mem::swap(&mut z, &mut trial);
                core::mem::swap(&mut f, &mut f_trial);
                res = r;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDivergence {
                iterations: iter + 1,
                residual: res,
            });
        }
    }
    if res < NEWTON_TOL {
        return RealField::new(grid, z);
    }
    Err(Error::NewtonDivergence {
        iterations: NEWTON_MAX_ITER,
        residual: res,
    })
}

/// Linear stability of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// Stability verdict with the spectrum it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stability: Stability,
    /// Largest eigenvalue after removing the rotation mode.
    pub leading_eigenvalue: f64,
    /// For patterned states, the eigenvalue assigned to rotations and
    /// `‖J z'‖∞ / ‖z'‖∞`.
    pub rotation_mode: Option<(f64, f64)>,
}

fn classify(leading: f64) -> Stability {
    if leading < -STABILITY_TOL {
        Stability::Stable
    } else if leading > STABILITY_TOL {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Classify an equilibrium by the largest Jacobian eigenvalue.
///
/// Rotating a patterned equilibrium yields another equilibrium, so its
/// Jacobian has an eigenvalue near zero with eigenvector `z'`. When
/// `‖J z'‖` confirms this, the eigenvalue closest to zero is excluded.
pub fn classify_equilibrium<S: Saturation>(params: &ModelParams<S>, z: &RealField) -> Result<StabilityReport> {
    let mut ev = jacobian_eigenvalues(params, z)?;
    let mut rotation_mode = None;
    if let Some(d) = is_patterned(z) {
        let n = z.len();
        let jac = jacobian(params, z);
        let jd = (0..n)
            .map(|j| (0..n).map(|m| jac[j * n + m] * d.values()[m]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        let rel = jd / d.sup_norm();
        if rel < 1e-6 {
            let idx = (0..ev.len())
                .min_by(|&a, &b| ev[a].abs().total_cmp(&ev[b].abs()))
                .expect("non-empty spectrum");
            rotation_mode = Some((ev.remove(idx), rel));
        }
    }
    let leading = ev.last().copied().unwrap_or(f64::NEG_INFINITY);
    Ok(StabilityReport {
        stability: classify(leading),
        leading_eigenvalue: leading,
        rotation_mode,
    })
}

/// One equilibrium found at one attention value.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub alpha: f64,
    /// `(∫ z² dθ)^{1/2}`.
    pub norm: f64,
    pub max_z: f64,
    pub stability: Stability,
    pub leading_eigenvalue: f64,
    pub n_peaks: usize,
    /// `‖∂z/∂t‖∞` at the refined state.
    pub residual: f64,
    /// Equilibrium rotated so that its maximum sits at index 0.
    pub state: RealField,
}

impl BranchPoint {
    pub fn stable(&self) -> bool {
        self.stability == Stability::Stable
    }

    pub fn is_zero_branch(&self) -> bool {
        self.state.sup_norm() < ZERO_BRANCH_TOL
    }
}

/// A failure recorded during a sweep; `seed` is `None` for branch searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub alpha: f64,
    pub seed: Option<usize>,
    pub error: Error,
}

/// Equilibria at every attention value of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub alphas: Vec<f64>,
    pub branches: Vec<BranchPoint>,
    /// Smallest swept `α` where a patterned stable equilibrium coexists with a
    /// stable neutral state.
    pub fold_alpha: Option<f64>,
    pub failures: Vec<SweepFailure>,
}

impl BifurcationDiagram {
    pub fn at(&self, alpha: f64) -> impl Iterator<Item = &BranchPoint> {
        self.branches.iter().filter(move |b| b.alpha == alpha)
    }
}

/// Everything found at a single `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSlice {
    pub alpha: f64,
    pub points: Vec<BranchPoint>,
    pub failures: Vec<SweepFailure>,
}

fn canonical(z: &RealField) -> RealField {
    if z.sup_norm() < ZERO_BRANCH_TOL {
        return RealField::zeros(z.grid());
    }
    z.shift(-(z.argmax() as i64))
}

/// `|ẑ(k)|` for `k = 0..=N/2`, which is unchanged by any rotation.
fn orbit_signature(z: &RealField) -> Vec<f64> {
    let spec = z.to_spectral();
    (0..=z.grid().max_frequency() + 1).map(|k| spec.coeff(k).norm()).collect()
}

fn same_orbit(a: &RealField, b: &RealField) -> bool {
    let tol = 1e-6 * a.sup_norm().max(b.sup_norm()).max(1.0);
    let (sa, sb) = (orbit_signature(a), orbit_signature(b));
    sa.iter().zip(&sb).all(|(x, y)| (x - y).abs() < tol)
}

fn branch_point<S: Saturation>(params: &ModelParams<S>, z: RealField) -> Result<BranchPoint> {
    let report = classify_equilibrium(params, &z)?;
    let grid = z.grid();
    let res = crate::dynamics::rhs(&z, &RealField::zeros(grid), params)?.sup_norm();
    let n_peaks = if z.sup_norm() < ZERO_BRANCH_TOL { 0 } else { count_peaks(&z, 0.5) };
    Ok(BranchPoint {
        alpha: params.alpha,
        norm: z.l2_norm() * libm::sqrt(grid.spacing()),
        max_z: z.max(),
        stability: report.stability,
        leading_eigenvalue: report.leading_eigenvalue,
        n_peaks,
        residual: res,
        state: canonical(&z),
    })
}

fn insert_distinct<S: Saturation>(
    params: &ModelParams<S>,
    points: &mut Vec<BranchPoint>,
    z: RealField,
) -> Result<bool> {
    let c = canonical(&z);
    if points.iter().any(|p| same_orbit(&p.state, &c)) {
        return Ok(false);
    }
    points.push(branch_point(params, z)?);
    Ok(true)
}

/// Equilibria at one attention value.
///
/// Every seed is integrated towards a steady state and Newton-refined; the
/// neutral state is always included. With `unstable_search`, Newton is also
/// started from scaled copies of every patterned stable state and from small
/// leading-mode cosines, which locates saddles between the two stable branches.
pub fn sweep_alpha<S: Saturation>(
    template: &ModelParams<S>,
    alpha: f64,
    seeds: &[RealField],
    cfg: &SimConfig,
    unstable_search: bool,
) -> Result<AlphaSlice> {
    let params = template.with_alpha(alpha)?;
    let grid = params.grid();
    let zero = RealField::zeros(grid);
    let mut points = Vec::new();
    let mut failures = Vec::new();
    insert_distinct(&params, &mut points, zero.clone())?;

    for (i, seed) in seeds.iter().enumerate() {
        let attempt = integrate(seed, &zero, &params, cfg)
            .and_then(|sim| refine_equilibrium(&params, &sim.final_state))
            .and_then(|z| insert_distinct(&params, &mut points, z));
        if let Err(error) = attempt {
            failures.push(SweepFailure {
                alpha,
                seed: Some(i),
                error,
            });
        }
    }

    if unstable_search {
        let k_max = params.kernel.k_max();
        let mut guesses: Vec<RealField> = points
            .iter()
            .filter(|p| p.stable() && !p.is_zero_branch())
            .flat_map(|p| [0.25, 0.5, 0.75].map(|c| p.state.map(|v| c * v)))
            .collect();
        guesses.extend([0.05, 0.2, 0.5].map(|a| crate::grid::cosine_mode(grid, k_max, a)));
        for g in guesses {
            // Failed branch searches are expected outside the bistable window.
            if let Ok(z) = refine_equilibrium(&params, &g) {
                insert_distinct(&params, &mut points, z)?;
            }
        }
    }
    points.sort_by(|a, b| a.norm.total_cmp(&b.norm));
    Ok(AlphaSlice {
        alpha,
        points,
        failures,
    })
}

/// Merge per-`α` slices (in sweep order) into a diagram.
pub fn assemble(slices: Vec<AlphaSlice>) -> BifurcationDiagram {
    let alphas: Vec<f64> = slices.iter().map(|s| s.alpha).collect();
    let fold_alpha = slices
        .iter()
        .find(|s| {
            let zero_stable = s.points.iter().any(|p| p.is_zero_branch() && p.stable());
            let pattern_stable = s.points.iter().any(|p| !p.is_zero_branch() && p.stable());
            zero_stable && pattern_stable
        })
        .map(|s| s.alpha);
    let mut branches = Vec::new();
    let mut failures = Vec::new();
    for s in slices {
        branches.extend(s.points);
        failures.extend(s.failures);
    }
    BifurcationDiagram {
        alphas,
        branches,
        fold_alpha,
        failures,
    }
}

/// Check that a sweep request is well formed.
pub fn validate_sweep(alphas: &[f64], seeds: &[RealField], grid: CircleGrid) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "seeds",
            value: 0.0,
            reason: "at least one seed is required",
        });
    }
    if let Some(s) = seeds.iter().find(|s| s.grid() != grid) {
        return Err(Error::GridMismatch {
            left: grid.n_points(),
            right: s.grid().n_points(),
        });
    }
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            name: "alpha_range",
            value: alphas.len() as f64,
            reason: "attention values must be non-empty and strictly increasing",
        });
    }
    Ok(())
}

/// Sequential bifurcation sweep over `alphas`.
pub fn sweep_bifurcation<S: Saturation>(
    template: &ModelParams<S>,
    alphas: &[f64],
    seeds: &[RealField],
    cfg: &SimConfig,
) -> Result<BifurcationDiagram> {
    validate_sweep(alphas, seeds, template.grid())?;
    let slices = alphas
        .iter()
        .map(|&a| sweep_alpha(template, a, seeds, cfg, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(slices))
}
