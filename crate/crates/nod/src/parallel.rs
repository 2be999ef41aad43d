//! Parallel sweeps and scenario batches. Results are merged in input order,
//! so the output does not depend on the number of worker threads.

use nod_core::analysis::{assemble, sweep_alpha, validate_sweep, BifurcationDiagram};
use nod_core::dynamics::count_peaks;
use nod_core::scenario::{run_scenario, with_final_width, Decision, ScenarioSpec};
use nod_core::{ModelParams, RealField, Result, SimConfig};
use rayon::prelude::*;

/// Bifurcation sweep with one task per attention value.
pub fn sweep_bifurcation(
    template: &ModelParams,
    alphas: &[f64],
    seeds: &[RealField],
    cfg: &SimConfig,
    unstable_search: bool,
) -> Result<BifurcationDiagram> {
    validate_sweep(alphas, seeds, template.grid())?;
    let slices = alphas
        .par_iter()
        .map(|&a| sweep_alpha(template, a, seeds, cfg, unstable_search))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(slices))
}

/// Outcome of one scenario run in a batch.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub seed: u64,
    pub decision: Decision,
    pub n_peaks: usize,
    pub final_state: RealField,
}

/// Run `spec` once per perturbation seed.
pub fn run_scenario_batch(
    spec: &ScenarioSpec,
    params: &ModelParams,
    cfg: &SimConfig,
    strong_threshold: f64,
    seeds: &[u64],
) -> Result<Vec<ScenarioRun>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let spec = ScenarioSpec {
                perturbation_seed: Some(seed),
                ..spec.clone()
            };
            let (sim, decision) = run_scenario(&spec, params, cfg, strong_threshold)?;
            Ok(ScenarioRun {
                seed,
                decision,
                n_peaks: count_peaks(&sim.final_state, 0.5),
                final_state: sim.final_state,
            })
        })
        .collect()
}

/// Decisions as a function of the final width of gap `gap`.
pub fn sweep_switch_threshold(
    spec: &ScenarioSpec,
    gap: usize,
    final_widths: &[f64],
    params: &ModelParams,
    cfg: &SimConfig,
    strong_threshold: f64,
) -> Result<Vec<(f64, Decision)>> {
    final_widths
        .par_iter()
        .map(|&w| {
            let s = with_final_width(spec, gap, w)?;
            run_scenario(&s, params, cfg, strong_threshold).map(|(_, d)| (w, d))
        })
        .collect()
}
