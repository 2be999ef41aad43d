//! Quasi-static inputs, response experiments and gap-selection scenarios.
//!
//! A gap in a circle of people is rendered as a positive bump of the input
//! field; the robot crosses through the gap that holds the strongest opinion.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::analysis::alignment;
use crate::dynamics::{integrate, integrate_observed, InputSource, ModelParams, SimConfig, SimResult};
use crate::grid::{circle_distance, CircleGrid, RealField};
use crate::random::uniform_noise;
use crate::saturation::Saturation;
use crate::{Error, Result};

/// Default cap on gap amplitudes.
pub const DEFAULT_AMPLITUDE_LIMIT: f64 = 0.01;
/// Default opinion level that counts as a decision.
pub const DEFAULT_STRONG_THRESHOLD: f64 = 1.0;
/// Ramped inputs must satisfy `lipschitz_bound < QUASI_STATIC_FACTOR / τ`.
pub const QUASI_STATIC_FACTOR: f64 = 0.1;
/// Fraction of each half-width used for the taper of smoothed rectangles.
pub const EDGE_FRACTION: f64 = 0.25;

/// `max_{x ∈ [0, π]} x sin x`, attained where `tan x = −x`.
fn max_x_sin_x() -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..50 {
        // Newton on g(x) = sin x + x cos x.
        let g = libm::sin(x) + x * libm::cos(x);
        let dg = 2.0 * libm::cos(x) - x * libm::sin(x);
        x -= g / dg;
    }
    x * libm::sin(x)
}

/// Profile of a single gap as a function of `d / w ∈ [0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BumpShape {
    #[default]
    RaisedCosine,
    RectangularSmoothed,
}

impl BumpShape {
    /// Value in `[0, 1]` at relative distance `x = d / w` from the center.
    pub fn profile(self, x: f64) -> f64 {
        if x >= 0.5 {
            return 0.0;
        }
        match self {
            BumpShape::RaisedCosine => 0.5 * (1.0 + libm::cos(2.0 * PI * x)),
            BumpShape::RectangularSmoothed => {
                let core = 0.5 * (1.0 - EDGE_FRACTION);
                if x <= core {
                    1.0
                } else {
                    let s = (x - core) / (0.5 * EDGE_FRACTION);
                    0.5 * (1.0 + libm::cos(PI * s))
                }
            }
        }
    }

    /// Upper bound on `|x · profile'(x)|`.
    pub fn width_sensitivity(self) -> f64 {
        match self {
            BumpShape::RaisedCosine => 0.5 * max_x_sin_x(),
            BumpShape::RectangularSmoothed => PI / (2.0 * EDGE_FRACTION),
        }
    }
}

/// Linear change of a gap's width over `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct WidthRamp {
    pub t_start: f64,
    pub t_end: f64,
    pub final_width: f64,
}

/// A gap between people: angular center, angular width and input amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Gap {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub width_ramp: Option<WidthRamp>,
}

impl Gap {
    pub fn width_at(&self, t: f64) -> f64 {
        match self.width_ramp {
            None => self.width,
            Some(r) if t <= r.t_start => self.width,
            Some(r) if t >= r.t_end => r.final_width,
            Some(r) => self.width + (r.final_width - self.width) * (t - r.t_start) / (r.t_end - r.t_start),
        }
    }

    pub fn contains(&self, theta: f64, t: f64) -> bool {
        circle_distance(theta, self.center) < 0.5 * self.width_at(t)
    }

    fn min_width(&self) -> f64 {
        self.width_ramp.map_or(self.width, |r| self.width.min(r.final_width))
    }

    /// `max_θ |∂u/∂t|` contributed by this gap's ramp.
    fn lipschitz_bound(&self, baseline: f64, shape: BumpShape) -> f64 {
        match self.width_ramp {
            None => 0.0,
            Some(r) => {
                let rate = (r.final_width - self.width).abs() / (r.t_end - r.t_start);
                (self.amplitude - baseline) * shape.width_sensitivity() * rate / self.min_width()
            }
        }
    }
}

#[cfg(feature = "serde")]
fn default_amplitude_limit() -> f64 {
    DEFAULT_AMPLITUDE_LIMIT
}

/// Gaps, background level and optional symmetry-breaking perturbation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioSpec {
    pub gaps: Vec<Gap>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub baseline: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub bump_shape: BumpShape,
    #[cfg_attr(feature = "serde", serde(default))]
    pub perturbation_seed: Option<u64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub perturbation_scale: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_amplitude_limit"))]
    pub amplitude_limit: f64,
}

impl ScenarioSpec {
    pub fn new(gaps: Vec<Gap>) -> Self {
        ScenarioSpec {
            gaps,
            baseline: 0.0,
            bump_shape: BumpShape::RaisedCosine,
            perturbation_seed: None,
            perturbation_scale: 0.0,
            amplitude_limit: DEFAULT_AMPLITUDE_LIMIT,
        }
    }

    /// Times at which some width changes slope, including `t = 0`.
    fn breakpoints(&self) -> Vec<f64> {
        let mut ts = vec![0.0];
        for g in &self.gaps {
            if let Some(r) = g.width_ramp {
                ts.extend([r.t_start.max(0.0), r.t_end.max(0.0)]);
            }
        }
        ts
    }

    /// End of the last ramp.
    pub fn static_after(&self) -> f64 {
        self.gaps
            .iter()
            .filter_map(|g| g.width_ramp.map(|r| r.t_end))
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason| Err(Error::InvalidScenario { reason });
        if self.gaps.is_empty() {
            return bad("at least one gap is required");
        }
        if !(self.baseline <= 0.0 && self.baseline.is_finite()) {
            return bad("baseline must be finite and non-positive");
        }
        if !(self.perturbation_scale >= 0.0 && self.perturbation_scale.is_finite()) {
            return bad("perturbation_scale must be finite and non-negative");
        }
        if !(self.amplitude_limit > 0.0) {
            return bad("amplitude_limit must be positive");
        }
        for g in &self.gaps {
            if !(0.0..1.0).contains(&g.center) {
                return bad("gap centers must lie in [0, 1)");
            }
            if !(g.width > 0.0 && g.width < 1.0) {
                return bad("gap widths must lie in (0, 1)");
            }
            if !(g.amplitude > 0.0 && g.amplitude <= self.amplitude_limit) {
                return bad("gap amplitudes must lie in (0, amplitude_limit]");
            }
            if let Some(r) = g.width_ramp {
                if !(r.t_start.is_finite() && r.t_end.is_finite() && r.t_start >= 0.0 && r.t_end > r.t_start) {
                    return bad("ramps need 0 <= t_start < t_end");
                }
                if !(r.final_width > 0.0 && r.final_width < 1.0) {
                    return bad("ramp final widths must lie in (0, 1)");
                }
            }
        }
        // Widths are piecewise linear in time, so overlaps first appear at a breakpoint.
        for t in self.breakpoints() {
            for i in 0..self.gaps.len() {
                for j in i + 1..self.gaps.len() {
                    let (a, b) = (&self.gaps[i], &self.gaps[j]);
                    if circle_distance(a.center, b.center) < 0.5 * (a.width_at(t) + b.width_at(t)) {
                        return Err(Error::OverlappingGaps { first: i, second: j });
                    }
                }
            }
        }
        Ok(())
    }

    /// `max_θ |∂u/∂t|` over the whole scenario.
    pub fn lipschitz_bound(&self) -> f64 {
        self.gaps
            .iter()
            .map(|g| g.lipschitz_bound(self.baseline, self.bump_shape))
            .fold(0.0, f64::max)
    }

    /// Index of the gap whose support contains `theta` at time `t`.
    pub fn gap_at(&self, theta: f64, t: f64) -> Option<usize> {
        self.gaps.iter().position(|g| g.contains(theta, t))
    }

    /// Copy with every center moved by `delta` (mod 1).
    pub fn rotated(&self, delta: f64) -> ScenarioSpec {
        let mut s = self.clone();
        for g in &mut s.gaps {
            g.center = crate::grid::wrap_angle(g.center + delta);
        }
        s
    }
}

fn render_unchecked(spec: &ScenarioSpec, grid: CircleGrid, t: f64, perturbation: Option<&[f64]>, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        let theta = grid.theta(j);
        let mut v = spec.baseline;
        for g in &spec.gaps {
            let w = g.width_at(t);
            let x = circle_distance(theta, g.center) / w;
            if x < 0.5 {
                v = spec.baseline + (g.amplitude - spec.baseline) * spec.bump_shape.profile(x);
                break;
            }
        }
        *o = v + perturbation.map_or(0.0, |p| p[j]);
    }
}

fn perturbation(spec: &ScenarioSpec, grid: CircleGrid) -> Option<Vec<f64>> {
    spec.perturbation_seed
        .map(|seed| uniform_noise(grid, seed, spec.perturbation_scale).into_values())
}

/// Input field of a scenario at time `t`.
pub fn render_input(spec: &ScenarioSpec, grid: CircleGrid, t: f64) -> Result<RealField> {
    spec.validate()?;
    let mut out = vec![0.0; grid.n_points()];
    render_unchecked(spec, grid, t, perturbation(spec, grid).as_deref(), &mut out);
    RealField::new(grid, out)
}

/// Gap input whose widths follow their ramps, with the perturbation precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct RampedGaps {
    spec: ScenarioSpec,
    grid: CircleGrid,
    perturbation: Option<Vec<f64>>,
}

impl RampedGaps {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }
}

/// Input `u(θ, t)` driving a simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Constant(RealField),
    /// `(t_switch, u)` pairs in increasing time; zero before the first switch.
    PiecewiseStatic(Vec<(f64, RealField)>),
    RampedGaps(RampedGaps),
}

impl InputSignal {
    /// Ramped gap input; rejects specs whose ramps are not slow on the
    /// timescale `τ`.
    pub fn ramped(spec: ScenarioSpec, grid: CircleGrid, tau: f64) -> Result<InputSignal> {
        spec.validate()?;
        let bound = spec.lipschitz_bound();
        let limit = QUASI_STATIC_FACTOR / tau;
        if !(bound < limit) {
            return Err(Error::QuasiStaticViolation { bound, limit });
        }
        let perturbation = perturbation(&spec, grid);
        Ok(InputSignal::RampedGaps(RampedGaps {
            spec,
            grid,
            perturbation,
        }))
    }

    pub fn piecewise(mut pieces: Vec<(f64, RealField)>) -> Result<InputSignal> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidScenario {
                reason: "piecewise input needs at least one piece",
            });
        };
        let grid = first.1.grid();
        if let Some(p) = pieces.iter().find(|p| p.1.grid() != grid) {
            return Err(Error::GridMismatch {
                left: grid.n_points(),
                right: p.1.grid().n_points(),
            });
        }
        if pieces.iter().any(|p| !p.0.is_finite()) {
            return Err(Error::NonFinite { what: "switch time" });
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(InputSignal::PiecewiseStatic(pieces))
    }

    /// Bound on `max_θ |∂u/∂t|`. Piecewise-static inputs report the bound
    /// between switches, which is zero.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            InputSignal::Constant(_) | InputSignal::PiecewiseStatic(_) => 0.0,
            InputSignal::RampedGaps(r) => r.spec.lipschitz_bound(),
        }
    }

    pub fn at(&self, t: f64) -> RealField {
        let mut out = vec![0.0; self.grid().n_points()];
        self.sample(t, &mut out);
        RealField::new(self.grid(), out).expect("rendered inputs are finite")
    }
}

impl InputSource for InputSignal {
    fn grid(&self) -> CircleGrid {
        match self {
            InputSignal::Constant(u) => u.grid(),
            InputSignal::PiecewiseStatic(p) => p[0].1.grid(),
            InputSignal::RampedGaps(r) => r.grid,
        }
    }

    fn sample(&self, t: f64, out: &mut [f64]) {
        match self {
            InputSignal::Constant(u) => out.copy_from_slice(u.values()),
            InputSignal::PiecewiseStatic(pieces) => match pieces.iter().rev().find(|p| p.0 <= t) {
                Some(p) => out.copy_from_slice(p.1.values()),
                None => out.fill(0.0),
            },
            InputSignal::RampedGaps(r) => render_unchecked(&r.spec, r.grid, t, r.perturbation.as_deref(), out),
        }
    }

    fn static_after(&self) -> f64 {
        match self {
            InputSignal::Constant(_) => 0.0,
            InputSignal::PiecewiseStatic(p) => p.last().map_or(0.0, |p| p.0.max(0.0)),
            InputSignal::RampedGaps(r) => r.spec.static_after(),
        }
    }
}

/// Steady response to a constant input.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub sim: SimResult,
    /// `û(k_max)`.
    pub alignment: Complex64,
    /// `max z(·, t_end) / max u`.
    pub amplification: f64,
}

/// Integrate from the neutral state under a constant input.
pub fn run_response_experiment<S: Saturation>(
    u: &RealField,
    params: &ModelParams<S>,
    cfg: &SimConfig,
) -> Result<Response> {
    let z0 = RealField::zeros(params.grid());
    let sim = integrate(&z0, u, params, cfg)?;
    let align = alignment(u, params.kernel.k_max());
    let u_max = u.max();
    let amplification = if u_max > 0.0 { sim.final_state.max() / u_max } else { 0.0 };
    Ok(Response {
        sim,
        alignment: align,
        amplification,
    })
}

/// Readout of a gap-selection run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Decision {
    pub chosen_gap: Option<usize>,
    /// `max_θ z(θ, t_end)`.
    pub opinion_max: f64,
    /// First time the running maximum exceeded the threshold.
    pub decision_time: Option<f64>,
    /// The gap holding the maximum changed after the decision.
    pub switched: bool,
    /// Strong opinion whose maximum lies outside every gap.
    pub ambiguous: bool,
    pub argmax_theta: f64,
}

/// Integrate a scenario from the neutral state and read out the decision.
pub fn run_scenario<S: Saturation>(
    spec: &ScenarioSpec,
    params: &ModelParams<S>,
    cfg: &SimConfig,
    strong_threshold: f64,
) -> Result<(SimResult, Decision)> {
    if !(strong_threshold > 0.0) {
        return Err(Error::InvalidParameter {
            name: "strong_threshold",
            value: strong_threshold,
            reason: "threshold must be positive",
        });
    }
    let grid = params.grid();
    let input = InputSignal::ramped(spec.clone(), grid, params.tau)?;
    let z0 = RealField::zeros(grid);

    let mut decision_time = None;
    let mut committed: Option<usize> = None;
    let mut switched = false;
    let sim = integrate_observed(&z0, &input, params, cfg, |t, z| {
        let j = crate::grid::argmax(z);
        if decision_time.is_none() && z[j] > strong_threshold {
            decision_time = Some(t);
        }
        if decision_time.is_some() {
            if let Some(g) = spec.gap_at(grid.theta(j), t) {
                match committed {
                    None => committed = Some(g),
                    Some(c) if c != g => switched = true,
                    _ => {}
                }
            }
        }
    })?;

    let last = &sim.final_state;
    let argmax_theta = grid.theta(last.argmax());
    let opinion_max = last.max();
    let strong = opinion_max > strong_threshold;
    let gap = spec.gap_at(argmax_theta, sim.t_end);
    let decision = Decision {
        chosen_gap: if strong { gap } else { None },
        opinion_max,
        decision_time,
        switched,
        ambiguous: strong && gap.is_none(),
        argmax_theta,
    };
    Ok((sim, decision))
}

/// `switched` as a function of the final width of gap `gap`.
pub fn sweep_switch_threshold<S: Saturation>(
    spec: &ScenarioSpec,
    gap: usize,
    final_widths: &[f64],
    params: &ModelParams<S>,
    cfg: &SimConfig,
    strong_threshold: f64,
) -> Result<Vec<(f64, Decision)>> {
    final_widths
        .iter()
        .map(|&w| {
            let s = with_final_width(spec, gap, w)?;
            run_scenario(&s, params, cfg, strong_threshold).map(|(_, d)| (w, d))
        })
        .collect()
}

/// Copy of `spec` whose gap `gap` ramps to `final_width`.
pub fn with_final_width(spec: &ScenarioSpec, gap: usize, final_width: f64) -> Result<ScenarioSpec> {
    let mut s = spec.clone();
    let g = s.gaps.get_mut(gap).ok_or(Error::InvalidScenario {
        reason: "gap index out of range",
    })?;
    let r = g.width_ramp.as_mut().ok_or(Error::InvalidScenario {
        reason: "gap has no width ramp",
    })?;
    r.final_width = final_width;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::design_gaussian_kernel;

    fn grid() -> CircleGrid {
        CircleGrid::new(256).unwrap()
    }

    fn gap(center: f64, width: f64) -> Gap {
        Gap {
            center,
            width,
            amplitude: 0.008,
            width_ramp: None,
        }
    }

    #[test]
    fn single_bump() {
        let spec = ScenarioSpec::new(vec![gap(0.5, 0.2)]);
        let u = render_input(&spec, grid(), 3.0).unwrap();
        assert_eq!(u.max(), 0.008);
        assert_eq!(u.values()[128], 0.008);
        for j in 0..256 {
            if circle_distance(grid().theta(j), 0.5) >= 0.1 {
                assert_eq!(u.values()[j], 0.0);
            }
        }
    }

    #[test]
    fn opposite_gaps_are_half_turn_symmetric() {
        let spec = ScenarioSpec::new(vec![gap(0.25, 0.15), gap(0.75, 0.15)]);
        let u = render_input(&spec, grid(), 0.0).unwrap();
        assert!(u.shift(128).distance(&u).unwrap() < 1e-15);
    }

    #[test]
    fn ramp_interpolates() {
        let g = Gap {
            width_ramp: Some(WidthRamp {
                t_start: 20.0,
                t_end: 60.0,
                final_width: 0.1,
            }),
            ..gap(0.5, 0.2)
        };
        assert!((g.width_at(40.0) - 0.15).abs() < 1e-15);
        assert_eq!(g.width_at(0.0), 0.2);
        assert_eq!(g.width_at(100.0), 0.1);
    }

    #[test]
    fn overlap_is_rejected() {
        let spec = ScenarioSpec::new(vec![gap(0.1, 0.2), gap(0.25, 0.2)]);
        assert_eq!(render_input(&spec, grid(), 0.0), Err(Error::OverlappingGaps { first: 0, second: 1 }));
        // Across the origin.
        let spec = ScenarioSpec::new(vec![gap(0.95, 0.2), gap(0.1, 0.2)]);
        assert!(spec.validate().is_err());
        // Only after a ramp widens a gap.
        let mut g = gap(0.2, 0.1);
        g.width_ramp = Some(WidthRamp {
            t_start: 0.0,
            t_end: 1000.0,
            final_width: 0.6,
        });
        assert!(matches!(
            ScenarioSpec::new(vec![g, gap(0.5, 0.1)]).validate(),
            Err(Error::OverlappingGaps { .. })
        ));
    }

    #[test]
    fn amplitude_cap() {
        let mut g = gap(0.5, 0.2);
        g.amplitude = 0.02;
        assert!(matches!(
            ScenarioSpec::new(vec![g]).validate(),
            Err(Error::InvalidScenario { .. })
        ));
    }

    #[test]
    fn raised_cosine_sensitivity() {
        let c = BumpShape::RaisedCosine.width_sensitivity();
        // Dense sampling oracle for max |x · d/dx (1 + cos 2πx)/2|.
        let sampled = (0..100_000)
            .map(|i| {
                let x = 0.5 * i as f64 / 100_000.0;
                (x * PI * libm::sin(2.0 * PI * x)).abs()
            })
            .fold(0.0, f64::max);
        assert!((c - sampled).abs() < 1e-8 && c >= sampled);
    }

    #[test]
    fn lipschitz_bound_dominates_finite_differences() {
        for shape in [BumpShape::RaisedCosine, BumpShape::RectangularSmoothed] {
            let mut g = gap(0.4, 0.3);
            g.width_ramp = Some(WidthRamp {
                t_start: 10.0,
                t_end: 50.0,
                final_width: 0.1,
            });
            let mut spec = ScenarioSpec::new(vec![g]);
            spec.bump_shape = shape;
            let bound = spec.lipschitz_bound();
            let fine = CircleGrid::new(4096).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..40 {
                let t = 10.0 + i as f64;
                let a = render_input(&spec, fine, t).unwrap();
                let b = render_input(&spec, fine, t + 1e-3).unwrap();
                worst = worst.max(a.distance(&b).unwrap() / 1e-3);
            }
            assert!(worst <= bound * (1.0 + 1e-6), "{shape:?}: {worst} > {bound}");
            assert!(worst > 0.5 * bound, "{shape:?}: bound {bound} is loose ({worst})");
        }
    }

    #[test]
    fn fast_ramps_are_rejected() {
        let mut g = gap(0.5, 0.2);
        g.width_ramp = Some(WidthRamp {
            t_start: 0.0,
            t_end: 0.01,
            final_width: 0.05,
        });
        let err = InputSignal::ramped(ScenarioSpec::new(vec![g]), grid(), 1.0).unwrap_err();
        assert!(matches!(err, Error::QuasiStaticViolation { .. }));
    }

    #[test]
    fn perturbation_is_seeded() {
        let mut spec = ScenarioSpec::new(vec![gap(0.25, 0.15), gap(0.75, 0.15)]);
        spec.perturbation_seed = Some(3);
        spec.perturbation_scale = 1e-9;
        let a = render_input(&spec, grid(), 0.0).unwrap();
        let b = render_input(&spec, grid(), 5.0).unwrap();
        assert_eq!(a, b);
        let clean = render_input(&ScenarioSpec { perturbation_seed: None, ..spec.clone() }, grid(), 0.0).unwrap();
        let d = a.distance(&clean).unwrap();
        assert!(d > 0.0 && d <= 1e-9);
        spec.perturbation_seed = Some(4);
        assert_ne!(render_input(&spec, grid(), 0.0).unwrap(), a);
    }

    #[test]
    fn piecewise_is_zero_before_first_switch() {
        let g = grid();
        let u = InputSignal::piecewise(vec![(5.0, RealField::constant(g, 1.0)), (2.0, RealField::constant(g, 0.5))]).unwrap();
        assert_eq!(u.at(1.0).max(), 0.0);
        assert_eq!(u.at(3.0).max(), 0.5);
        assert_eq!(u.at(7.0).max(), 1.0);
        assert_eq!(u.static_after(), 5.0);
    }

    #[test]
    fn zero_input_keeps_neutral_state() {
        let p = ModelParams::new(1.0, 0.98, 0.7, design_gaussian_kernel(grid(), 1, 3.0).unwrap()).unwrap();
        let r = run_response_experiment(&RealField::zeros(grid()), &p, &SimConfig::for_tau(1.0)).unwrap();
        assert_eq!(r.sim.final_state.sup_norm(), 0.0);
        assert_eq!(r.amplification, 0.0);
    }
}
