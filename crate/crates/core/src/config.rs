//! JSON run configurations.
//!
//! A configuration is one JSON document with a `command` field. Every other
//! field is optional; the defaults reproduce the showcase runs.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::DEFAULT_STEP;
use crate::fock::{DEFAULT_DIM, MIN_DIM};
use crate::presets;
use crate::qed::{JcModel, PrepParams};
use crate::wigner::{GridSpec, InitialStateParams};

/// Upper limits that keep a run within memory.
pub const MAX_GRID_POINTS: usize = 4_000_000;
pub const MAX_DIM: usize = 256;
pub const MAX_SWEEP_SAMPLES: usize = 1_000_000;
pub const MAX_SNAPSHOTS: usize = 1_000;

/// Which evaluator produces the Wigner snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Closed-form expression for Fock-support states.
    #[default]
    Closed,
    /// Fock-basis sum over the RK4-evolved density matrix.
    Rho,
    /// Gaussian smoothing of the initial Wigner function.
    Convolution,
    /// All three; the closed form is written and discrepancies reported.
    Both,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Route::Closed),
            "rho" => Ok(Route::Rho),
            "convolution" => Ok(Route::Convolution),
            "both" => Ok(Route::Both),
            other => Err(Error::Parse(format!(
                "unknown route `{other}` (expected closed, rho, convolution or both)"
            ))),
        }
    }
}

/// `C0 = |C0|e^{iφ}, C1 = |C1|, C2 = |C2|e^{iϕ}` with `|C0|` from normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub c1: f64,
    pub c2: f64,
    pub phi: f64,
    pub varphi: f64,
}

impl StateConfig {
    pub fn from_params(params: &InitialStateParams) -> Self {
        Self {
            c1: params.mod_c1(),
            c2: params.mod_c2(),
            phi: params.phi(),
            varphi: params.varphi(),
        }
    }

    pub fn params(&self) -> Result<InitialStateParams> {
        InitialStateParams::new(self.c1, self.c2, self.phi, self.varphi)
    }
}

impl Default for StateConfig {
    fn default() -> Self {
        Self::from_params(&presets::showcase_state())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedState {
    pub label: String,
    #[serde(flatten)]
    pub state: StateConfig,
}

/// `count` equally spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepConfig {
    pub fn samples(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| self.start + k as f64 * step)
            .collect()
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 3.0,
            count: 61,
        }
    }
}

fn default_dim() -> usize {
    DEFAULT_DIM
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_snapshots() -> Vec<f64> {
    presets::SHOWCASE_SNAPSHOTS.to_vec()
}

fn default_wigner_grid() -> GridSpec {
    GridSpec::square(3.0, 41).expect("valid default grid")
}

fn default_measure_grid() -> GridSpec {
    GridSpec::square(3.0, 21).expect("valid default grid")
}

fn default_sets() -> Vec<NamedState> {
    presets::correlation_sets()
        .into_iter()
        .map(|(label, params)| NamedState {
            label,
            state: StateConfig::from_params(&params),
        })
        .collect()
}

fn default_true() -> bool {
    true
}

fn default_target() -> StateConfig {
    StateConfig::from_params(&presets::prepared_state())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default = "default_snapshots")]
    pub kappa_t: Vec<f64>,
    #[serde(default = "default_wigner_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub route: Route,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationsConfig {
    #[serde(default = "default_sets")]
    pub sets: Vec<NamedState>,
    #[serde(default)]
    pub kappa_t: SweepConfig,
    /// Also evaluate g2 along an RK4 trajectory and report its drift.
    #[serde(default = "default_true")]
    pub rk4_check: bool,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareConfig {
    #[serde(default = "presets::target_prep_params")]
    pub params: PrepParams,
    #[serde(default)]
    pub model: JcModel,
    /// State the prepared cavity is compared against.
    #[serde(default = "default_target")]
    pub target: StateConfig,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    #[serde(default)]
    pub state: StateConfig,
    /// The state is evolved to this time before probing.
    #[serde(default)]
    pub kappa_t: f64,
    #[serde(default = "default_measure_grid")]
    pub grid: GridSpec,
    /// 0 gives exact probabilities.
    #[serde(default)]
    pub shots: u64,
    /// Point `k` of the row-major grid uses `seed + k`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Wigner(WignerConfig),
    Correlations(CorrelationsConfig),
    Prepare(PrepareConfig),
    Measure(MeasureConfig),
}

/// Settings supplied on the command line, which take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub model: Option<JcModel>,
    pub route: Option<Route>,
}

impl RunConfig {
    /// Defaults for a command name.
    pub fn default_for(command: &str) -> Result<Self> {
        Self::from_json(format!("{{\"command\":\"{command}\"}}").as_bytes())
    }

    /// Parses and validates.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_slice(bytes).map_err(|e| Error::Config(vec![e.to_string()]))?;
        config.validate()?;
        Ok(config)
    }

    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Wigner(_) => "wigner",
            RunConfig::Correlations(_) => "correlations",
            RunConfig::Prepare(_) => "prepare",
            RunConfig::Measure(_) => "measure",
        }
    }

    pub fn output_dir(&self) -> &PathBuf {
        match self {
            RunConfig::Wigner(c) => &c.output_dir,
            RunConfig::Correlations(c) => &c.output_dir,
            RunConfig::Prepare(c) => &c.output_dir,
            RunConfig::Measure(c) => &c.output_dir,
        }
    }

    /// Applies command-line settings, rejecting ones the command does not use.
    pub fn apply(&mut self, overrides: &Overrides) -> Result<()> {
        let mut problems = Vec::new();
        let command = self.command();
        if let Some(dir) = &overrides.output_dir {
            match self {
                RunConfig::Wigner(c) => c.output_dir = dir.clone(),
                RunConfig::Correlations(c) => c.output_dir = dir.clone(),
                RunConfig::Prepare(c) => c.output_dir = dir.clone(),
                RunConfig::Measure(c) => c.output_dir = dir.clone(),
            }
        }
        match (overrides.seed, &mut *self) {
            (None, _) => {}
            (Some(seed), RunConfig::Measure(c)) => c.seed = seed,
            (Some(_), _) => problems.push(format!("--seed does not apply to `{command}`")),
        }
        match (overrides.model, &mut *self) {
            (None, _) => {}
            (Some(model), RunConfig::Prepare(c)) => c.model = model,
            (Some(_), _) => problems.push(format!("--model does not apply to `{command}`")),
        }
        match (overrides.route, &mut *self) {
            (None, _) => {}
            (Some(route), RunConfig::Wigner(c)) => c.route = route,
            (Some(_), _) => problems.push(format!("--route does not apply to `{command}`")),
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        match self {
            RunConfig::Wigner(c) => {
                check_state("state", &c.state, &mut problems);
                check_times("kappa_t", &c.kappa_t, &mut problems);
                check_grid("grid", &c.grid, &mut problems);
                check_dim(c.dim, &mut problems);
                check_step(c.step, &mut problems);
            }
            RunConfig::Correlations(c) => {
                if c.sets.is_empty() {
                    problems.push("sets: at least one state is required".into());
                }
                let mut seen = HashSet::new();
                for (k, set) in c.sets.iter().enumerate() {
                    check_label(&set.label, k, &mut problems);
                    if !seen.insert(set.label.as_str()) {
                        problems.push(format!("sets[{k}].label: duplicate label `{}`", set.label));
                    }
                    check_state(&format!("sets[{k}]"), &set.state, &mut problems);
                }
                let sweep = &c.kappa_t;
                if sweep.count == 0 || sweep.count > MAX_SWEEP_SAMPLES {
                    problems.push(format!(
                        "kappa_t.count must be between 1 and {MAX_SWEEP_SAMPLES}"
                    ));
                }
                if !(sweep.start.is_finite()
                    && sweep.stop.is_finite()
                    && sweep.start >= 0.0
                    && sweep.stop >= sweep.start)
                {
                    problems.push(format!(
                        "kappa_t: need 0 ≤ start ≤ stop, got start {} stop {}",
                        sweep.start, sweep.stop
                    ));
                }
                check_dim(c.dim, &mut problems);
                check_step(c.step, &mut problems);
            }
            RunConfig::Prepare(c) => {
                if c.params.validate().is_err() {
                    problems.push("params: all angles must be finite".into());
                }
                check_state("target", &c.target, &mut problems);
                check_dim(c.dim, &mut problems);
            }
            RunConfig::Measure(c) => {
                check_state("state", &c.state, &mut problems);
                check_times("kappa_t", &[c.kappa_t], &mut problems);
                check_grid("grid", &c.grid, &mut problems);
                check_dim(c.dim, &mut problems);
                check_step(c.step, &mut problems);
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

fn check_state(name: &str, state: &StateConfig, problems: &mut Vec<String>) {
    if let Err(e) = state.params() {
        problems.push(format!("{name}: {e}"));
    }
}

fn check_times(name: &str, times: &[f64], problems: &mut Vec<String>) {
    if times.is_empty() {
        problems.push(format!("{name}: at least one time is required"));
    }
    if times.len() > MAX_SNAPSHOTS {
        problems.push(format!("{name}: at most {MAX_SNAPSHOTS} times are allowed"));
        return;
    }
    for (k, t) in times.iter().enumerate() {
        if !(t.is_finite() && *t >= 0.0) {
            problems.push(format!(
                "{name}[{k}]: {t} is not a non-negative finite time"
            ));
        }
        if times[..k].contains(t) {
            problems.push(format!("{name}[{k}]: duplicate time {t}"));
        }
    }
}

fn check_grid(name: &str, grid: &GridSpec, problems: &mut Vec<String>) {
    if let Err(e) = grid.validate() {
        problems.push(format!("{name}: {e}"));
    }
    if grid
        .nx
        .checked_mul(grid.np)
        .is_none_or(|n| n > MAX_GRID_POINTS)
    {
        problems.push(format!("{name}: more than {MAX_GRID_POINTS} points"));
    }
}

fn check_dim(dim: usize, problems: &mut Vec<String>) {
    if dim < MIN_DIM {
        problems.push(format!("dim: {dim} is below the minimum {MIN_DIM}"));
    }
    if dim > MAX_DIM {
        problems.push(format!("dim: {dim} exceeds the maximum {MAX_DIM}"));
    }
}

fn check_step(step: f64, problems: &mut Vec<String>) {
    if !(step.is_finite() && step > 0.0) {
        problems.push(format!("step: {step} must be positive"));
    }
}

fn check_label(label: &str, k: usize, problems: &mut Vec<String>) {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if !ok {
        problems.push(format!(
            "sets[{k}].label: `{label}` must be non-empty and use only letters, digits, `_` or `-`"
        ));
    }
}
