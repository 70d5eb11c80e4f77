//! Orchestration behind the command-line subcommands.
//!
//! Each command writes its artifacts into the configured output directory
//! and returns the list of files it produced. Output depends only on the
//! configuration, so identical configurations give identical files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    CorrelationsConfig, MeasureConfig, PrepareConfig, Route, RunConfig, StateConfig, WignerConfig,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve_rk4, evolve_trajectory};
use crate::fock::{density_from_state, DensityMatrix};
use crate::io::{
    complex_pairs, write_file, write_json, write_measurement_csv, write_sweep_csv,
    write_wigner_csv, PrepReport, PrepStatus,
};
use crate::qed::{
    displaced_parity, measurement_from_parity, shot_noise_sigma, two_atom_prepare_in,
    MeasurementRecord,
};
use crate::statistics::{correlation_sweep, g2_from_rho};
use crate::wigner::{
    negativity_metrics, wigner_from_rho, wigner_grid, GridSpec, WignerGrid, WignerSource,
};

pub const WIGNER_SUMMARY: &str = "wigner_summary.json";
pub const CORRELATIONS_SUMMARY: &str = "correlations_summary.json";
pub const PREPARE_REPORT: &str = "prepare.json";
pub const MEASURE_CSV: &str = "measure.csv";
pub const MEASURE_SUMMARY: &str = "measure_summary.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
}

/// Pairwise maximum differences between the three Wigner evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteDiscrepancy {
    pub closed_vs_rho: f64,
    pub closed_vs_convolution: f64,
    pub rho_vs_convolution: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub kappa_t: f64,
    pub file: String,
    pub min_value: f64,
    pub min_location: [f64; 2],
    pub max_value: f64,
    pub negative_volume: f64,
    /// Trapezoidal `∫ W d²α` over the grid.
    pub total: f64,
    pub route_discrepancy: Option<RouteDiscrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSummary {
    pub route: Route,
    pub state: StateConfig,
    pub grid: GridSpec,
    pub snapshots: Vec<SnapshotSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSetSummary {
    pub label: String,
    pub file: String,
    pub state: StateConfig,
    /// `None` for the vacuum, where g2 is undefined.
    pub g2_initial: Option<f64>,
    pub max_g2_deviation: Option<f64>,
    pub rk4_max_g2_deviation: Option<f64>,
    pub g2a_initial: f64,
    pub g2a_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationsSummary {
    pub sets: Vec<CorrelationSetSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub kappa_t: f64,
    pub shots: u64,
    pub seed: u64,
    pub points: usize,
    /// Largest `|W_est − W|` against the Fock-sum evaluator.
    pub max_engine_deviation: f64,
    /// Points where `P_e(0) < P_e(π)` disagrees with the sign of `W`.
    pub criterion_disagreements: usize,
    /// Fraction of points within four standard deviations of the exact
    /// value; only for shot-noise runs.
    pub within_4_sigma: Option<f64>,
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    match config {
        RunConfig::Wigner(c) => cmd_wigner(c),
        RunConfig::Correlations(c) => cmd_correlations(c),
        RunConfig::Prepare(c) => cmd_prepare(c),
        RunConfig::Measure(c) => cmd_measure(c),
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn initial_density(state: &StateConfig, dim: usize) -> Result<DensityMatrix> {
    Ok(density_from_state(&state.params()?.to_state(dim)?))
}

pub fn cmd_wigner(c: &WignerConfig) -> Result<RunReport> {
    prepare_dir(&c.output_dir)?;
    let params = c.state.params()?;
    let rho0 = initial_density(&c.state, c.dim)?;
    let mut files = Vec::new();
    let mut snapshots = Vec::new();
    for &kappa_t in &c.kappa_t {
        let closed = || wigner_grid(WignerSource::ClosedForm { params, kappa_t }, &c.grid);
        let rho = || -> Result<WignerGrid> {
            let rho_t = evolve_rk4(&rho0, kappa_t, c.step)?;
            wigner_grid(WignerSource::Rho(&rho_t), &c.grid)
        };
        let convolution = || wigner_grid(WignerSource::Convolution { params, kappa_t }, &c.grid);
        let (grid, route_discrepancy) = match c.route {
            Route::Closed => (closed()?, None),
            Route::Rho => (rho()?, None),
            Route::Convolution => (convolution()?, None),
            Route::Both => {
                let (a, b, g) = (closed()?, rho()?, convolution()?);
                let ab = a.max_abs_difference(&b)?;
                let ag = a.max_abs_difference(&g)?;
                let bg = b.max_abs_difference(&g)?;
                let d = RouteDiscrepancy {
                    closed_vs_rho: ab,
                    closed_vs_convolution: ag,
                    rho_vs_convolution: bg,
                    max: ab.max(ag).max(bg),
                };
                (a, Some(d))
            }
        };
        let name = format!("wigner_kt{kappa_t}.csv");
        let path = c.output_dir.join(&name);
        write_file(&path, |out| write_wigner_csv(out, &grid))?;
        files.push(path);
        let metrics = negativity_metrics(&grid);
        snapshots.push(SnapshotSummary {
            kappa_t,
            file: name,
            min_value: metrics.min_value,
            min_location: [metrics.min_location.x(), metrics.min_location.p()],
            max_value: grid
                .values()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            negative_volume: metrics.negative_volume,
            total: grid.total(),
            route_discrepancy,
        });
    }
    let summary = WignerSummary {
        route: c.route,
        state: c.state,
        grid: c.grid,
        snapshots,
    };
    let path = c.output_dir.join(WIGNER_SUMMARY);
    write_file(&path, |out| write_json(out, &summary))?;
    files.push(path);
    Ok(RunReport { files })
}

fn max_deviation(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let values: Vec<Option<f64>> = values.into_iter().collect();
    let first = values.first().copied().flatten()?;
    values
        .iter()
        .map(|v| v.map(|g| (g - first).abs()))
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
}

pub fn cmd_correlations(c: &CorrelationsConfig) -> Result<RunReport> {
    prepare_dir(&c.output_dir)?;
    let samples = c.kappa_t.samples();
    let mut files = Vec::new();
    let mut sets = Vec::new();
    for set in &c.sets {
        let params = set.state.params()?;
        let sweep = correlation_sweep(&params, &samples)?;
        let name = format!("correlations_{}.csv", set.label);
        let path = c.output_dir.join(&name);
        write_file(&path, |out| write_sweep_csv(out, &sweep))?;
        files.push(path);

        let rk4_max_g2_deviation = if c.rk4_check {
            let trajectory =
                evolve_trajectory(&initial_density(&set.state, c.dim)?, &samples, c.step)?;
            max_deviation(trajectory.states.iter().map(|rho| g2_from_rho(rho).ok()))
        } else {
            None
        };
        sets.push(CorrelationSetSummary {
            label: set.label.clone(),
            file: name,
            state: set.state,
            g2_initial: sweep[0].g2,
            max_g2_deviation: max_deviation(sweep.iter().map(|s| s.g2)),
            rk4_max_g2_deviation,
            g2a_initial: sweep[0].g2a,
            g2a_final: sweep[sweep.len() - 1].g2a,
        });
    }
    let path = c.output_dir.join(CORRELATIONS_SUMMARY);
    write_file(&path, |out| write_json(out, &CorrelationsSummary { sets }))?;
    files.push(path);
    Ok(RunReport { files })
}

/// Writes the report in every case; a failed post-selection is reported
/// with zero success probability and then returned as an error.
pub fn cmd_prepare(c: &PrepareConfig) -> Result<RunReport> {
    prepare_dir(&c.output_dir)?;
    let target = c.target.params()?.to_state(c.dim)?;
    let (report, failed) = match two_atom_prepare_in(&c.params, c.model, c.dim) {
        Ok(prep) => (
            PrepReport {
                status: PrepStatus::Ok,
                params: c.params,
                model: c.model,
                success_probability: prep.success_probability,
                outcome_probabilities: Some(prep.outcomes),
                cavity: complex_pairs(prep.cavity.amplitudes().iter().copied()),
                target: complex_pairs(target.amplitudes().iter().copied()),
                fidelity: prep.cavity.fidelity(&target),
            },
            false,
        ),
        Err(Error::PostSelectionFailed) => (
            PrepReport {
                status: PrepStatus::PostSelectionFailed,
                params: c.params,
                model: c.model,
                success_probability: 0.0,
                outcome_probabilities: None,
                cavity: Vec::new(),
                target: complex_pairs(target.amplitudes().iter().copied()),
                fidelity: 0.0,
            },
            true,
        ),
        Err(e) => return Err(e),
    };
    let path = c.output_dir.join(PREPARE_REPORT);
    write_file(&path, |out| write_json(out, &report))?;
    if failed {
        return Err(Error::PostSelectionFailed);
    }
    Ok(RunReport { files: vec![path] })
}

/// Simulated measurement at every grid point, row-major with `x` fastest.
/// Point `k` draws its shot noise from seed `seed + k`.
pub fn measurement_scan(
    rho: &DensityMatrix,
    grid: &GridSpec,
    shots: u64,
    seed: u64,
) -> Vec<(MeasurementRecord, MeasurementRecord)> {
    let points: Vec<_> = grid.points().collect();
    points
        .par_iter()
        .enumerate()
        .map(|(k, &pt)| {
            let parity = displaced_parity(rho, pt);
            let exact = measurement_from_parity(pt, parity, 0, 0);
            let recorded = if shots == 0 {
                exact
            } else {
                measurement_from_parity(pt, parity, shots, seed.wrapping_add(k as u64))
            };
            (exact, recorded)
        })
        .collect()
}

pub fn cmd_measure(c: &MeasureConfig) -> Result<RunReport> {
    prepare_dir(&c.output_dir)?;
    let rho = evolve_rk4(&initial_density(&c.state, c.dim)?, c.kappa_t, c.step)?;
    let scan = measurement_scan(&rho, &c.grid, c.shots, c.seed);
    let mut max_engine_deviation = 0.0f64;
    let mut criterion_disagreements = 0;
    let mut within = 0usize;
    for (exact, recorded) in &scan {
        let w = wigner_from_rho(&rho, exact.alpha());
        max_engine_deviation = max_engine_deviation.max((exact.w_estimate - w).abs());
        if exact.indicates_negativity() != (w < 0.0) {
            criterion_disagreements += 1;
        }
        let sigma = shot_noise_sigma(exact.p_e_phase0, exact.p_e_phase_pi, c.shots.max(1));
        if (recorded.w_estimate - exact.w_estimate).abs() <= 4.0 * sigma {
            within += 1;
        }
    }
    let records: Vec<MeasurementRecord> = scan.iter().map(|(_, r)| *r).collect();
    let csv_path = c.output_dir.join(MEASURE_CSV);
    write_file(&csv_path, |out| write_measurement_csv(out, &records))?;
    let summary = MeasureSummary {
        kappa_t: c.kappa_t,
        shots: c.shots,
        seed: c.seed,
        points: records.len(),
        max_engine_deviation,
        criterion_disagreements,
        within_4_sigma: (c.shots > 0).then(|| within as f64 / records.len() as f64),
    };
    let summary_path = c.output_dir.join(MEASURE_SUMMARY);
    write_file(&summary_path, |out| write_json(out, &summary))?;
    Ok(RunReport {
        files: vec![csv_path, summary_path],
    })
}
