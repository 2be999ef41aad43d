//! The six subcommands. Each writes its outputs and a `manifest.json` into
//! the configured output directory and returns the report printed to stdout.

use std::path::{Path, PathBuf};

use nod_core::analysis::{eigenvalues, numerical_jacobian_spectrum, spatial_transfer_profile, BifurcationDiagram};
use nod_core::dynamics::{count_peaks, integrate, SimResult};
use nod_core::kernel::validate_kernel;
use nod_core::scenario::{run_response_experiment, run_scenario, InputSignal, QUASI_STATIC_FACTOR};
use serde_json::{json, Value};

use crate::config::{render_field, FieldComponent, RunConfig};
use crate::error::{CliError, CliResult};
use crate::formats::{self, write_json};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    DesignKernel,
    Spectrum,
    Simulate,
    Respond,
    Bifurcation,
    Scenario,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DesignKernel => "design-kernel",
            Command::Spectrum => "spectrum",
            Command::Simulate => "simulate",
            Command::Respond => "respond",
            Command::Bifurcation => "bifurcation",
            Command::Scenario => "scenario",
        }
    }
}

fn output_dir(cfg: &RunConfig) -> CliResult<PathBuf> {
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

/// Run `command` and return its report.
pub fn run(command: Command, cfg: &RunConfig) -> CliResult<Value> {
    let mut cfg = cfg.clone();
    let report = match command {
        Command::DesignKernel => design_kernel(&cfg)?,
        Command::Spectrum => spectrum(&cfg)?,
        Command::Simulate => simulate(&cfg)?,
        Command::Respond => respond(&cfg)?,
        Command::Bifurcation => bifurcation(&cfg)?,
        Command::Scenario => scenario(&mut cfg)?,
    };
    let dir = output_dir(&cfg)?;
    write_json(&dir.join("manifest.json"), &cfg.manifest(command.name()))?;
    Ok(report)
}

fn design_kernel(cfg: &RunConfig) -> CliResult<Value> {
    let kernel = cfg.kernel()?;
    let report = validate_kernel(&kernel);
    let dir = output_dir(cfg)?;
    formats::write_kernel(&dir.join("kernel.csv"), &kernel)?;
    formats::write_real_field(&dir.join("kernel_real.csv"), kernel.real_space())?;
    let out = json!({
        "k_max": kernel.k_max(),
        "passed": report.passed(),
        "checks": report.checks,
    });
    write_json(&dir.join("validation.json"), &out)?;
    if !report.passed() {
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        return Err(CliError::Validation(failed.join(", ")));
    }
    Ok(out)
}

fn spectrum(cfg: &RunConfig) -> CliResult<Value> {
    let params = cfg.params()?;
    let report = eigenvalues(&params)?;
    let ks: Vec<i64> = report.eigenvalues.keys().copied().collect();
    let lambda: Vec<f64> = report.eigenvalues.values().copied().collect();
    let transfer = spatial_transfer_profile(&params)
        .ok()
        .map(|p| p.values().copied().collect::<Vec<f64>>());
    let mut out = json!({
        "k": ks,
        "lambda": lambda,
        "k_max": report.k_max,
        "alpha_star": report.alpha_star,
        "leading_eigenvalue": report.leading_eigenvalue,
        "spatial_transfer": transfer,
    });
    if params.grid().n_points() <= 64 {
        let dense = numerical_jacobian_spectrum(&params)?;
        let dev = dense
            .iter()
            .map(|(k, v)| (v - report.eigenvalues[k]).abs())
            .fold(0.0, f64::max);
        out["dense_max_deviation"] = json!(dev);
    }
    write_json(&output_dir(cfg)?.join("spectrum.json"), &out)?;
    Ok(out)
}

fn sim_summary(sim: &SimResult) -> Value {
    json!({
        "reached_steady": sim.reached_steady,
        "t_end": sim.t_end,
        "max_z": sim.final_state.max(),
        "n_peaks": count_peaks(&sim.final_state, 0.5),
    })
}

fn write_sim(dir: &Path, sim: &SimResult) -> CliResult<()> {
    formats::write_trajectory(&dir.join("trajectory.csv"), sim)?;
    formats::write_real_field(&dir.join("final_state.csv"), &sim.final_state)
}

fn simulate(cfg: &RunConfig) -> CliResult<Value> {
    let params = cfg.params()?;
    let sim = integrate(&cfg.initial_state()?, &cfg.input_field()?, &params, &cfg.sim()?)?;
    let dir = output_dir(cfg)?;
    write_sim(&dir, &sim)?;
    let out = sim_summary(&sim);
    write_json(&dir.join("summary.json"), &out)?;
    Ok(out)
}

fn respond(cfg: &RunConfig) -> CliResult<Value> {
    let params = cfg.params()?;
    let u = cfg.input_field()?;
    let r = run_response_experiment(&u, &params, &cfg.sim()?)?;
    let dir = output_dir(cfg)?;
    write_sim(&dir, &r.sim)?;
    formats::write_real_field(&dir.join("input.csv"), &u)?;
    let mut out = sim_summary(&r.sim);
    out["max_u"] = json!(u.max());
    out["alignment"] = json!({ "re": r.alignment.re, "im": r.alignment.im, "abs": r.alignment.norm() });
    out["amplification"] = json!(r.amplification);
    write_json(&dir.join("summary.json"), &out)?;
    Ok(out)
}

fn diagram_json(d: &BifurcationDiagram) -> Value {
    let branches: Vec<Value> = d
        .branches
        .iter()
        .map(|b| {
            json!({
                "alpha": b.alpha,
                "norm": b.norm,
                "max_z": b.max_z,
                "stable": b.stable(),
                "stability": b.stability,
                "leading_eigenvalue": b.leading_eigenvalue,
                "n_peaks": b.n_peaks,
                "residual": b.residual,
            })
        })
        .collect();
    let failures: Vec<Value> = d
        .failures
        .iter()
        .map(|f| json!({ "alpha": f.alpha, "seed": f.seed, "error": f.error.to_string() }))
        .collect();
    json!({
        "alphas": d.alphas,
        "fold_alpha": d.fold_alpha,
        "branches": branches,
        "failures": failures,
    })
}

fn bifurcation(cfg: &RunConfig) -> CliResult<Value> {
    let bc = cfg
        .bifurcation
        .as_ref()
        .ok_or_else(|| CliError::Config("bifurcation needs a `bifurcation` section".into()))?;
    let params = cfg.params()?;
    let grid = params.grid();
    let default_seeds = vec![
        vec![FieldComponent::Cosine {
            k: params.kernel.k_max(),
            amplitude: 2.0,
            phase: 0.0,
        }],
        vec![FieldComponent::Random {
            amplitude: 1e-3,
            max_mode: 8,
            seed_offset: 0,
        }],
    ];
    let seeds = bc
        .seeds
        .as_ref()
        .unwrap_or(&default_seeds)
        .iter()
        .map(|c| render_field(c, grid, cfg.seed))
        .collect::<CliResult<Vec<_>>>()?;
    let alphas = bc.alphas.values()?;
    let d = parallel::sweep_bifurcation(&params, &alphas, &seeds, &cfg.sim()?, bc.unstable_search)?;
    let dir = output_dir(cfg)?;
    let out = diagram_json(&d);
    write_json(&dir.join("diagram.json"), &out)?;
    let mut w = csv::Writer::from_path(dir.join("diagram.csv")).map_err(|e| CliError::Config(e.to_string()))?;
    let io = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(["alpha", "norm", "stable", "n_peaks"]).map_err(io)?;
    for b in &d.branches {
        w.write_record([
            format!("{:?}", b.alpha),
            format!("{:?}", b.norm),
            b.stable().to_string(),
            b.n_peaks.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(dir.join("diagram.csv"), e))?;
    Ok(json!({ "fold_alpha": d.fold_alpha, "branches": d.branches.len(), "failures": d.failures.len() }))
}

fn decision_json(d: &nod_core::Decision) -> Value {
    json!({
        "chosen_gap": d.chosen_gap,
        "decision_time": d.decision_time,
        "switched": d.switched,
        "opinion_max": d.opinion_max,
        "ambiguous": d.ambiguous,
        "argmax_theta": d.argmax_theta,
    })
}

fn scenario(cfg: &mut RunConfig) -> CliResult<Value> {
    let seed = cfg.seed;
    let sc = cfg
        .scenario
        .as_mut()
        .ok_or_else(|| CliError::Config("scenario needs a `scenario` section".into()))?;
    if sc.spec.perturbation_scale > 0.0 && sc.spec.perturbation_seed.is_none() {
        sc.spec.perturbation_seed = Some(seed);
    }
    let sc = sc.clone();
    let params = cfg.params()?;
    let sim_cfg = cfg.sim()?;
    let dir = output_dir(cfg)?;
    let input = InputSignal::ramped(sc.spec.clone(), params.grid(), params.tau)?;
    let bound = input.lipschitz_bound();

    let mut out = match &sc.batch_seeds {
        Some(seeds) => {
            let runs = parallel::run_scenario_batch(&sc.spec, &params, &sim_cfg, sc.strong_threshold, seeds)?;
            let decisions: Vec<Value> = runs
                .iter()
                .map(|r| {
                    let mut d = decision_json(&r.decision);
                    d["seed"] = json!(r.seed);
                    d["n_peaks"] = json!(r.n_peaks);
                    d
                })
                .collect();
            write_json(&dir.join("decisions.json"), &decisions)?;
            json!({ "runs": decisions.len() })
        }
        None => {
            let (sim, decision) = run_scenario(&sc.spec, &params, &sim_cfg, sc.strong_threshold)?;
            write_sim(&dir, &sim)?;
            formats::write_real_field(&dir.join("input_final.csv"), &input.at(sim.t_end))?;
            let d = decision_json(&decision);
            write_json(&dir.join("decisions.json"), &d)?;
            let mut s = sim_summary(&sim);
            s["decision"] = d;
            s
        }
    };
    out["lipschitz_bound"] = json!(bound);
    out["lipschitz_limit"] = json!(QUASI_STATIC_FACTOR / params.tau);

    if let Some(sweep) = &sc.switch_sweep {
        let rows = parallel::sweep_switch_threshold(
            &sc.spec,
            sweep.gap,
            &sweep.final_widths,
            &params,
            &sim_cfg,
            sc.strong_threshold,
        )?;
        let path = dir.join("switch_sweep.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Config(e.to_string()))?;
        let io = |e: csv::Error| CliError::Config(e.to_string());
        w.write_record(["final_width", "switched", "chosen_gap", "opinion_max"]).map_err(io)?;
        for (width, d) in &rows {
            w.write_record([
                format!("{width:?}"),
                d.switched.to_string(),
                d.chosen_gap.map_or(String::new(), |g| g.to_string()),
                format!("{:?}", d.opinion_max),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
    }
    if sc.batch_seeds.is_none() {
        write_json(&dir.join("summary.json"), &out)?;
    }
    Ok(out)
}
