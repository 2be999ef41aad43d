//! Run configuration: a single JSON document with command-line overrides.
//!
//! Values are resolved in the order default < file < `--set` < dedicated flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nod_core::grid::{cosine_mode, CircleGrid, RealField};
use nod_core::kernel::{design_gaussian_kernel, design_kernel_from_profile, Kernel};
use nod_core::random::{smooth_random_field, uniform_noise};
use nod_core::scenario::{BumpShape, ScenarioSpec};
use nod_core::{ModelParams, SimConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::formats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Initial state for `simulate`, a sum of components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<FieldComponent>>,
    /// Constant input for `simulate` and `respond`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<FieldComponent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bifurcation: Option<BifurcationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    /// Written into manifests; ignored when a manifest is read back.
    #[serde(default, skip_serializing)]
    pub provenance: Option<Value>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Default::default())).expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub tau: f64,
    pub alpha: f64,
    pub xi: f64,
    pub kernel: KernelConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            tau: 1.0,
            alpha: 0.98,
            xi: 0.7,
            kernel: KernelConfig::default(),
        }
    }
}

/// Gaussian profile `{k_c, p}` or a `(k, W_hat)` CSV file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_c: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_points: CircleGrid::DEFAULT_POINTS,
        }
    }
}

/// Integrator settings; unset values scale with `tau`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

/// One additive term of a field on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldComponent {
    /// `amplitude · cos(2πk(θ − phase))`.
    Cosine {
        k: i64,
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    /// A single gap-shaped bump.
    Bump {
        center: f64,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        shape: BumpShape,
    },
    Constant { value: f64 },
    /// Smooth random field from modes `1..=max_mode`, rescaled to `amplitude`.
    Random {
        amplitude: f64,
        #[serde(default = "default_max_mode")]
        max_mode: usize,
        #[serde(default)]
        seed_offset: u64,
    },
    /// Independent uniform samples in `[−scale, scale]`.
    Noise {
        scale: f64,
        #[serde(default)]
        seed_offset: u64,
    },
}

fn default_max_mode() -> usize {
    8
}

impl FieldComponent {
    fn render(&self, grid: CircleGrid, seed: u64) -> CliResult<RealField> {
        let two_pi = 2.0 * std::f64::consts::PI;
        Ok(match *self {
            FieldComponent::Cosine { k, amplitude, phase } => {
                if phase == 0.0 {
                    cosine_mode(grid, k, amplitude)
                } else {
                    RealField::from_fn(grid, |t| amplitude * (two_pi * k as f64 * (t - phase)).cos())
                }
            }
            FieldComponent::Bump {
                center,
                width,
                amplitude,
                shape,
            } => {
                if !(width > 0.0 && width < 1.0) {
                    return Err(CliError::Config("bump width must lie in (0, 1)".into()));
                }
                RealField::from_fn(grid, |t| {
                    amplitude * shape.profile(nod_core::grid::circle_distance(t, center) / width)
                })
            }
            FieldComponent::Constant { value } => RealField::constant(grid, value),
            FieldComponent::Random {
                amplitude,
                max_mode,
                seed_offset,
            } => {
                if max_mode == 0 || max_mode as i64 > grid.max_frequency() {
                    return Err(CliError::Config("random max_mode must lie in 1..N/2".into()));
                }
                smooth_random_field(grid, seed.wrapping_add(seed_offset), amplitude, max_mode)
            }
            FieldComponent::Noise { scale, seed_offset } => uniform_noise(grid, seed.wrapping_add(seed_offset), scale),
        })
    }
}

/// Sum of components; an empty list is the zero field.
pub fn render_field(components: &[FieldComponent], grid: CircleGrid, seed: u64) -> CliResult<RealField> {
    let mut acc = vec![0.0; grid.n_points()];
    for c in components {
        for (a, v) in acc.iter_mut().zip(c.render(grid, seed)?.values()) {
            *a += v;
        }
    }
    Ok(RealField::new(grid, acc)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaGrid {
    List(Vec<f64>),
    /// `start, start + step, …` up to and including `stop`.
    Range { start: f64, stop: f64, step: f64 },
}

impl AlphaGrid {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        match self {
            AlphaGrid::List(v) => Ok(v.clone()),
            AlphaGrid::Range { start, stop, step } => {
                if !(*step > 0.0 && start <= stop) {
                    return Err(CliError::Config("alpha range needs step > 0 and start <= stop".into()));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // Rounded to 12 digits so that 0.8 + 3·0.02 prints as 0.86.
                Ok((0..=n)
                    .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationConfig {
    pub alphas: AlphaGrid,
    /// Initial states; defaults to a large leading-mode cosine and a small
    /// random field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<Vec<FieldComponent>>>,
    #[serde(default = "yes")]
    pub unstable_search: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub spec: ScenarioSpec,
    #[serde(default = "default_threshold")]
    pub strong_threshold: f64,
    /// Run once per perturbation seed instead of once with `seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_sweep: Option<SwitchSweep>,
}

fn default_threshold() -> f64 {
    nod_core::scenario::DEFAULT_STRONG_THRESHOLD
}

/// Repeat a ramped scenario for several final widths of one gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchSweep {
    pub gap: usize,
    pub final_widths: Vec<f64>,
}

/// Set `path` (dot separated) in a JSON object, creating objects on the way.
fn set_path(root: &mut Value, path: &str, value: Value) -> CliResult<()> {
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("malformed key `{path}`")));
    }
    for key in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("`{path}` descends into a non-object")))?;
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    node.as_object_mut()
        .ok_or_else(|| CliError::Config(format!("`{path}` descends into a non-object")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Parse a `key=value` override. The value is read as JSON when possible and
/// as a plain string otherwise.
pub fn parse_override(s: &str) -> CliResult<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{s}` is not of the form key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub set: Vec<(String, Value)>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> CliResult<RunConfig> {
        let mut root = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        if !root.is_object() {
            return Err(CliError::Config("config must be a JSON object".into()));
        }
        for (k, v) in &overrides.set {
            set_path(&mut root, k, v.clone())?;
        }
        if let Some(seed) = overrides.seed {
            set_path(&mut root, "seed", seed.into())?;
        }
        if let Some(out) = &overrides.output_dir {
            set_path(&mut root, "output_dir", Value::String(out.display().to_string()))?;
        }
        let mut cfg: RunConfig = serde_json::from_value(root).map_err(|e| CliError::Config(e.to_string()))?;
        if let (Some(base), Some(profile)) = (path.and_then(Path::parent), cfg.model.kernel.profile.as_mut()) {
            if profile.is_relative() && !base.as_os_str().is_empty() {
                *profile = base.join(&*profile);
            }
        }
        cfg.resolve()?;
        Ok(cfg)
    }

    /// Fill every defaulted value so that the config is fully explicit.
    pub fn resolve(&mut self) -> CliResult<()> {
        let k = &mut self.model.kernel;
        if k.profile.is_some() {
            if k.k_c.is_some() || k.p.is_some() {
                return Err(CliError::Config("kernel takes either {k_c, p} or a profile, not both".into()));
            }
        } else {
            k.k_c.get_or_insert(1);
            k.p.get_or_insert(3.0);
        }
        let d = SimConfig::for_tau(self.model.tau);
        let s = &mut self.sim;
        s.dt.get_or_insert(d.dt);
        s.t_final.get_or_insert(d.t_final);
        s.steady_tol.get_or_insert(d.steady_tol);
        s.record_stride.get_or_insert(d.record_stride);
        Ok(())
    }

    pub fn grid(&self) -> CliResult<CircleGrid> {
        Ok(CircleGrid::new(self.grid.n_points)?)
    }

    pub fn kernel(&self) -> CliResult<Kernel> {
        let grid = self.grid()?;
        let k = &self.model.kernel;
        match &k.profile {
            Some(path) => {
                let rows = formats::read_kernel_csv(path)?;
                let nyq = (grid.n_points() / 2) as i64;
                let profile: BTreeMap<i64, f64> = rows
                    .into_iter()
                    .filter(|&(k, v)| !((k == 0 || k == nyq) && v == 0.0))
                    .collect();
                Ok(design_kernel_from_profile(grid, &profile)?)
            }
            None => Ok(design_gaussian_kernel(grid, k.k_c.unwrap_or(1), k.p.unwrap_or(3.0))?),
        }
    }

    pub fn params(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(self.model.tau, self.model.alpha, self.model.xi, self.kernel()?)?)
    }

    pub fn sim(&self) -> CliResult<SimConfig> {
        let d = SimConfig::for_tau(self.model.tau);
        let cfg = SimConfig {
            dt: self.sim.dt.unwrap_or(d.dt),
            t_final: self.sim.t_final.unwrap_or(d.t_final),
            steady_tol: self.sim.steady_tol.unwrap_or(d.steady_tol),
            record_stride: self.sim.record_stride.unwrap_or(d.record_stride),
        };
        cfg.validate(self.model.tau)?;
        Ok(cfg)
    }

    pub fn initial_state(&self) -> CliResult<RealField> {
        let default = [FieldComponent::Random {
            amplitude: 1e-3,
            max_mode: default_max_mode(),
            seed_offset: 0,
        }];
        render_field(self.initial.as_deref().unwrap_or(&default), self.grid()?, self.seed)
    }

    pub fn input_field(&self) -> CliResult<RealField> {
        render_field(self.input.as_deref().unwrap_or(&[]), self.grid()?, self.seed)
    }

    /// Manifest document: the resolved config plus a provenance block.
    pub fn manifest(&self, command: &str) -> Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().expect("object").insert(
            "provenance".into(),
            serde_json::json!({
                "command": command,
                "nod_version": env!("CARGO_PKG_VERSION"),
                "nod_core_version": nod_core::VERSION,
            }),
        );
        v
    }
}
