//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nod::{Overrides, RunConfig};
use nod_core::analysis::{eigenvalues, numerical_jacobian_spectrum, spatial_transfer_profile, sweep_alpha};
use nod_core::dynamics::{count_peaks, integrate, integrate_observed, ModelParams, SimConfig};
use nod_core::kernel::design_gaussian_kernel;
use nod_core::random::{smooth_random_field, uniform_noise};
use nod_core::scenario::run_response_experiment;
use nod_core::{CircleGrid, RealField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn model(n: usize, tau: f64, alpha: f64, xi: f64, k_c: i64, p: f64) -> ModelParams {
    let grid = CircleGrid::new(n).unwrap();
    ModelParams::new(tau, alpha, xi, design_gaussian_kernel(grid, k_c, p).unwrap()).unwrap()
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn load(name: &str, seed: Option<u64>) -> RunConfig {
    let overrides = Overrides {
        seed,
        ..Overrides::default()
    };
    RunConfig::load(Some(&preset(name)), &overrides).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn nod(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_nod")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "nod {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Heights of the cyclic local maxima above `rel · max`.
fn peak_heights(f: &RealField) -> Vec<f64> {
    let v = f.values();
    let n = v.len();
    let cut = 0.5 * f.max();
    (0..n)
        .filter(|&i| {
            let (l, r) = (v[(i + n - 1) % n], v[(i + 1) % n]);
            v[i] > cut && v[i] > l && v[i] >= r
        })
        .map(|i| v[i])
        .collect()
}

fn eigenvalue_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for n in [16usize, 64] {
        for _ in 0..5 {
            let tau = rng.gen_range(0.2..5.0);
            let alpha = rng.gen_range(0.0..2.0);
            let p = rng.gen_range(0.5..6.0);
            let k_c = rng.gen_range(1..(n as i64 / 2));
            let m = model(n, tau, alpha, 0.7, k_c, p);
            let exact = eigenvalues(&m).unwrap();
            for (k, v) in numerical_jacobian_spectrum(&m).unwrap() {
                worst = worst.max((v - exact.eigenvalue(k).unwrap()).abs());
            }
        }
    }
    check(worst < 1e-8, format!("max |dense - closed form| = {worst:.2e}"))
}

fn bifurcation_point() -> Outcome {
    let z0 = smooth_random_field(CircleGrid::new(256).unwrap(), 11, 1e-3, 8);
    let u = RealField::zeros(z0.grid());
    let run = |alpha: f64, t_final: f64| {
        let cfg = SimConfig {
            dt: 0.1,
            t_final,
            steady_tol: 1e-300,
            record_stride: 500,
        };
        integrate(&z0, &u, &model(256, 1.0, alpha, 0.0, 1, 3.0), &cfg).unwrap()
    };
    let low = run(0.95, 400.0).final_state.sup_norm();
    let high = run(1.05, 400.0).final_state.sup_norm();
    // Growth-rate sign on a 1e-3 grid: compare norms at t = 50 and t = 100.
    let mut last_decay = None;
    let mut first_growth = None;
    for i in 0..=100 {
        let alpha = 0.95 + i as f64 * 1e-3;
        let sim = run(alpha, 100.0);
        let grows = sim.final_state.sup_norm() > sim.snapshots[1].sup_norm();
        if grows && first_growth.is_none() {
            first_growth = Some(alpha);
        }
        if !grows {
            last_decay = Some(alpha);
        }
    }
    let alpha_star = eigenvalues(&model(256, 1.0, 1.0, 0.0, 1, 3.0)).unwrap().alpha_star;
    let bracket = match (last_decay, first_growth) {
        (Some(a), Some(b)) => b > a && b - a < 1e-3 + 1e-12 && a <= alpha_star && alpha_star <= b,
        _ => false,
    };
    check(
        low < 1e-6 && high > 1e-2 && bracket,
        format!(
            "|z| at 0.95 = {low:.2e}, at 1.05 = {high:.2e}; last decay {last_decay:?}, first growth {first_growth:?}, alpha* = {alpha_star}"
        ),
    )
}

fn pattern_selection() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, expected) in [("pattern_one_peak.json", 1usize), ("pattern_three_peaks.json", 3)] {
        let mut counts = BTreeMap::new();
        let mut spread: f64 = 0.0;
        for seed in 1..=10 {
            let cfg = load(name, Some(seed));
            let sim = integrate(&cfg.initial_state().unwrap(), &cfg.input_field().unwrap(), &cfg.params().unwrap(), &cfg.sim().unwrap()).unwrap();
            let peaks = count_peaks(&sim.final_state, 0.5);
            *counts.entry(peaks).or_insert(0) += 1;
            if peaks == expected && expected > 1 {
                let h = peak_heights(&sim.final_state);
                let (lo, hi) = h.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
                spread = spread.max((hi - lo) / hi);
            }
            ok &= peaks == expected;
        }
        if expected > 1 {
            ok &= spread < 0.01;
        }
        detail.push(format!("k_c={} peak counts {counts:?}", expected));
    }
    check(ok, detail.join("; "))
}

fn bistability() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, biased) in [("bifurcation_biased.json", true), ("bifurcation_unbiased.json", false)] {
        let cfg = load(name, None);
        let params = cfg.params().unwrap();
        let sim = cfg.sim().unwrap();
        let bc = cfg.bifurcation.clone().unwrap();
        let grid = params.grid();
        let seeds: Vec<RealField> = bc
            .seeds
            .unwrap()
            .iter()
            .map(|c| nod::config::render_field(c, grid, cfg.seed).unwrap())
            .collect();
        let alphas = bc.alphas.values().unwrap();
        let d = nod::parallel::sweep_bifurcation(&params, &alphas, &seeds, &sim, bc.unstable_search).unwrap();
        let alpha_star = eigenvalues(&params).unwrap().alpha_star;
        if biased {
            match d.fold_alpha {
                Some(fold) if fold < alpha_star => {
                    let mid = 0.5 * (fold + alpha_star);
                    let slice = sweep_alpha(&params, mid, &seeds, &sim, false).unwrap();
                    let zero = slice.points.iter().any(|p| p.is_zero_branch() && p.stable());
                    let pattern = slice.points.iter().any(|p| !p.is_zero_branch() && p.stable());
                    ok &= zero && pattern;
                    detail.push(format!(
                        "xi=0.7 fold {fold} < {alpha_star}, at {mid:.3} zero stable {zero}, pattern stable {pattern}"
                    ));
                }
                other => {
                    ok = false;
                    detail.push(format!("xi=0.7 fold {other:?}"));
                }
            }
        } else {
            let stable_nonzero: Vec<f64> = d
                .branches
                .iter()
                .filter(|p| !p.is_zero_branch() && p.stable())
                .map(|p| p.alpha)
                .collect();
            let above = !stable_nonzero.is_empty() && stable_nonzero.iter().all(|&a| a > alpha_star);
            ok &= d.fold_alpha.is_none() && above;
            detail.push(format!(
                "xi=0 fold {:?}, stable patterns from alpha {:?}",
                d.fold_alpha,
                stable_nonzero.first()
            ));
        }
    }
    check(ok, detail.join("; "))
}

fn input_amplification() -> Outcome {
    let aligned = load("response_aligned.json", None);
    let u = aligned.input_field().unwrap();
    let r = run_response_experiment(&u, &aligned.params().unwrap(), &aligned.sim().unwrap()).unwrap();
    let max_z = r.sim.final_state.max();
    let peaks = count_peaks(&r.sim.final_state, 0.5);
    let unaligned = load("response_unaligned.json", None);
    let v = unaligned.input_field().unwrap();
    let s = run_response_experiment(&v, &unaligned.params().unwrap(), &unaligned.sim().unwrap()).unwrap();
    let sup = s.sim.final_state.sup_norm();
    check(
        u.max() == 0.008 && u.max() < 0.01 && max_z >= 1.5 && peaks == 1 && r.sim.reached_steady && sup < 0.1,
        format!("aligned max z {max_z:.4} with {peaks} peak(s); unaligned max |z| {sup:.4}"),
    )
}

fn spatial_invariance() -> Outcome {
    let p = model(256, 1.0, 0.98, 0.7, 1, 3.0);
    let grid = p.grid();
    let m = 64;
    let z0 = smooth_random_field(grid, 3, 1.0, 10);
    let u = uniform_noise(grid, 4, 0.01);
    let cfg = SimConfig {
        dt: 0.01,
        t_final: 50.0,
        steady_tol: 1e-300,
        record_stride: 1,
    };
    let collect = |z: &RealField, u: &RealField| {
        let mut states = Vec::new();
        integrate_observed(z, u, &p, &cfg, |_, s| states.push(s.to_vec())).unwrap();
        states
    };
    let shifted = collect(&z0.shift(m), &u.shift(m));
    let plain = collect(&z0, &u);
    let worst = plain
        .iter()
        .zip(&shifted)
        .map(|(a, b)| {
            let a = RealField::new(grid, a.clone()).unwrap().shift(m);
            a.distance(&RealField::new(grid, b.clone()).unwrap()).unwrap()
        })
        .fold(0.0, f64::max);
    check(
        plain.len() == shifted.len() && plain.len() > 1000 && worst < 1e-10,
        format!("{} states, max deviation {worst:.2e}", plain.len()),
    )
}

fn mean_mode_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, tau) in [0.5, 1.0, 2.5].into_iter().enumerate() {
        let p = model(256, tau, 0.98, 0.7, 1, 3.0);
        let grid = p.grid();
        let z0 = RealField::new(
            grid,
            smooth_random_field(grid, i as u64, 1.5, 8).values().iter().map(|v| v + 0.3).collect(),
        )
        .unwrap();
        let u = RealField::new(
            grid,
            uniform_noise(grid, 10 + i as u64, 0.01).values().iter().map(|v| v - 0.004).collect(),
        )
        .unwrap();
        let u0 = u.to_spectral().coeff(0).re;
        let m0 = z0.to_spectral().coeff(0).re;
        let cfg = SimConfig {
            steady_tol: 1e-300,
            t_final: 20.0 * tau,
            ..SimConfig::for_tau(tau)
        };
        integrate_observed(&z0, &u, &p, &cfg, |t, z| {
            let m = z.iter().sum::<f64>() / z.len() as f64;
            worst = worst.max((m - (u0 + (m0 - u0) * (-t / tau).exp())).abs());
        })
        .unwrap();
    }
    check(worst < 1e-6, format!("max mean-mode deviation {worst:.2e}"))
}

fn transfer_consistency() -> Outcome {
    let p = model(256, 1.0, 0.5, 0.0, 1, 3.0);
    let grid = p.grid();
    let u = smooth_random_field(grid, 21, 1e-4, 12);
    let cfg = SimConfig {
        steady_tol: 1e-14,
        ..SimConfig::for_tau(1.0)
    };
    let sim = integrate(&RealField::zeros(grid), &u, &p, &cfg).unwrap();
    let profile = spatial_transfer_profile(&p).unwrap();
    let (zh, uh) = (sim.final_state.to_spectral(), u.to_spectral());
    let mut worst: f64 = 0.0;
    let mut modes = 0;
    let mut exact = true;
    for k in grid.frequencies() {
        let expected = 1.0 / (1.0 - 0.5 * p.kernel.coefficient(k));
        exact &= profile[&k] == expected;
        if uh.coeff(k).norm() > 1e-8 {
            modes += 1;
            let gain = zh.coeff(k) / uh.coeff(k);
            worst = worst.max((gain - expected).norm() / expected);
        }
    }
    check(
        (u.sup_norm() - 1e-4).abs() < 1e-18 && modes > 0 && worst < 1e-3 && exact,
        format!("{modes} modes, max relative gain error {worst:.2e}, profile exact {exact}"),
    )
}

fn scenario_suite() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut bounds = Vec::new();
    let run = |name: &str| {
        let out = scratch(name);
        let report = nod(&[
            "scenario",
            "--config",
            preset(&format!("{name}.json")).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        (report, read_json(&out.join("decisions.json")))
    };

    let (r, d) = run("gaps_widest");
    bounds.push(r["lipschitz_bound"].as_f64().unwrap() < r["lipschitz_limit"].as_f64().unwrap());
    let cfg = load("gaps_widest.json", None);
    let gaps = &cfg.scenario.unwrap().spec.gaps;
    let widest = (0..gaps.len()).max_by(|&a, &b| gaps[a].width.total_cmp(&gaps[b].width)).unwrap();
    let hits = d.as_array().unwrap().iter().filter(|x| x["chosen_gap"] == widest).count();
    ok &= hits == 10;
    detail.push(format!("widest gap chosen {hits}/10"));

    let (r, d) = run("gaps_symmetric");
    bounds.push(r["lipschitz_bound"].as_f64().unwrap() < r["lipschitz_limit"].as_f64().unwrap());
    let single = d
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| x["n_peaks"] == 1 && x["chosen_gap"].is_u64() && x["opinion_max"].as_f64().unwrap() >= 1.0)
        .count();
    ok &= single == 20;
    detail.push(format!("symmetric gaps, single strong peak {single}/20"));

    for (name, expected) in [("gaps_small_ramp", false), ("gaps_large_ramp", true)] {
        let (r, d) = run(name);
        bounds.push(r["lipschitz_bound"].as_f64().unwrap() < r["lipschitz_limit"].as_f64().unwrap());
        ok &= d["switched"] == expected;
        detail.push(format!("{name} switched {}", d["switched"]));
    }
    ok &= bounds.iter().all(|&b| b);
    detail.push(format!("lipschitz within limit {}/{}", bounds.iter().filter(|&&b| b).count(), bounds.len()));
    check(ok, detail.join("; "))
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let runs: [(&str, &str, &[&str]); 6] = [
        ("design-kernel", "pattern_three_peaks.json", &[]),
        ("spectrum", "bifurcation_biased.json", &[]),
        ("simulate", "pattern_one_peak.json", &["--set", "sim.t_final=20"]),
        ("respond", "response_aligned.json", &["--set", "sim.t_final=20"]),
        (
            "bifurcation",
            "bifurcation_biased.json",
            &["--set", "bifurcation.alphas={\"list\":[0.9,0.97,1.01]}", "--threads", "2"],
        ),
        (
            "scenario",
            "gaps_widest.json",
            &["--set", "scenario.batch_seeds=[3,4]", "--set", "sim.t_final=250", "--threads", "2"],
        ),
    ];
    let mut differing = Vec::new();
    let mut compared = 0;
    for (command, config, extra) in runs {
        let out = scratch(&format!("determinism-{command}"));
        let cfg = preset(config);
        let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "5"];
        args.extend_from_slice(extra);
        let a = nod(&args);
        let first = files(&out);
        let b = nod(&args);
        let second = files(&out);
        compared += first.len();
        if a != b || first != second {
            differing.push(command);
        }
    }
    check(
        differing.is_empty(),
        format!("{compared} files across 6 commands, differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("eigenvalue oracle", eigenvalue_oracle),
        ("bifurcation point", bifurcation_point),
        ("pattern selection", pattern_selection),
        ("bistability", bistability),
        ("input amplification", input_amplification),
        ("spatial invariance", spatial_invariance),
        ("mean-mode law", mean_mode_law),
        ("transfer-function consistency", transfer_consistency),
        ("scenario suite", scenario_suite),
        ("determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
