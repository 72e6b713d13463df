//! The `run` driver: integrate, stream diagnostics to CSV, write snapshots and a manifest.

use super::config::{RunConfig, SolverKind};
use super::presets::initial_state;
use super::snapshot::save_snapshot;
use crate::dynamics::{MMPParams, MMPState};
use crate::error::{Error, Result};
use crate::integrate::{imex_integrate, picard_solve, IntegrationOptions, Monitor, PicardReport};
use crate::lp::DyadicProfile;
use crate::monitors::{
    blowup_indicator, energy_ledger, sampling_bias, DiagnosticsConfig, DiagnosticsRecord,
    DiagnosticsSeries, GridSummary,
};
use serde::Serialize;
use std::fs::File;
use std::path::{Path, PathBuf};

/// Environment variable overriding `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "MMP_OUTPUT_DIR";

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const FINAL_SNAPSHOT: &str = "final.mmp";
pub const LAST_GOOD_SNAPSHOT: &str = "last_good.mmp";

/// 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column names of the diagnostics CSV for a configuration.
pub fn csv_header(config: &DiagnosticsConfig, profile: &DyadicProfile, epsilons: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "time",
        "energy_u",
        "energy_omega",
        "energy_b",
        "diss_grad_u",
        "diss_grad_omega",
        "diss_grad_b",
        "diss_div_omega",
        "diss_omega",
        "production",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(config.hs_orders.iter().map(|s| format!("hs_{s}")));
    h.extend(["curl_l2_u", "curl_l2_omega", "curl_l2_b"].map(String::from));
    if config.curl_sups {
        h.extend(["curl_sup_u", "curl_sup_b"].map(String::from));
    }
    if config.block_sups {
        h.extend(profile.blocks().map(|j| format!("block_sup_{j}")));
    }
    h.extend(config.grad_lp_exponents.iter().map(|p| format!("grad_l{p}_u")));
    h.extend(epsilons.iter().map(|e| format!("delta_eps_{e}")));
    h
}

fn csv_row(record: &DiagnosticsRecord, deltas: &[Option<f64>]) -> Vec<String> {
    let d = &record.dissipation;
    let mut row: Vec<f64> = vec![record.time];
    row.extend(record.l2_energy);
    row.extend([d.grad_u, d.grad_omega, d.grad_b, d.div_omega, d.omega, record.production]);
    row.extend(record.hs_norms.iter().map(|x| x.1));
    row.extend(record.curl_l2);
    row.extend(record.curl_sup.iter().flatten());
    row.extend(record.block_sups.iter().map(|x| x.1));
    row.extend(record.grad_lp.iter().map(|x| x.1));
    let mut out: Vec<String> = row.into_iter().map(format_value).collect();
    out.extend(deltas.iter().map(|d| d.map(format_value).unwrap_or_default()));
    out
}

/// Streams records to CSV and keeps the last accepted state and periodic snapshots.
struct RunMonitor {
    writer: csv::Writer<File>,
    series: DiagnosticsSeries,
    profile: DyadicProfile,
    epsilons: Vec<f64>,
    warn_threshold: Option<f64>,
    warned: Vec<bool>,
    params: MMPParams,
    dir: PathBuf,
    stride: usize,
    dt: f64,
    start: f64,
    last_good: Option<MMPState>,
}

impl RunMonitor {
    fn running_delta(&self, eps: f64) -> Option<f64> {
        let (first, last) = self.series.span()?;
        if last - eps < first - 1e-12 * last.abs().max(1.0) {
            return None;
        }
        blowup_indicator(&self.series, eps, &self.profile).ok().map(|r| r.delta)
    }
}

impl Monitor for RunMonitor {
    fn on_record(&mut self, _state: &MMPState, record: &DiagnosticsRecord) -> Result<()> {
        self.series.push(record.clone())?;
        let deltas: Vec<Option<f64>> = self.epsilons.iter().map(|&e| self.running_delta(e)).collect();
        if let Some(limit) = self.warn_threshold {
            for (i, d) in deltas.iter().enumerate() {
                if let Some(d) = d {
                    if *d > limit && !self.warned[i] {
                        log::warn!(
                            "blow-up indicator {d:.3e} exceeds {limit} at t = {} (eps = {})",
                            record.time,
                            self.epsilons[i]
                        );
                        self.warned[i] = true;
                    }
                }
            }
        }
        self.writer
            .write_record(csv_row(record, &deltas))
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        self.writer.flush()?;
        Ok(())
    }

    fn on_step(&mut self, state: &MMPState) -> Result<()> {
        if self.stride > 0 {
            let step = ((state.time - self.start) / self.dt).round() as usize;
            if step % self.stride == 0 {
                save_snapshot(&self.dir.join(format!("snapshot_{step:06}.mmp")), state, &self.params)?;
            }
        }
        self.last_good = Some(state.clone());
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    Unstable { time: f64, norm: f64 },
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub output_dir: PathBuf,
    pub records: usize,
    pub final_time: f64,
    pub series: DiagnosticsSeries,
}

#[derive(Serialize)]
struct Manifest {
    crate_version: String,
    status: String,
    final_time: f64,
    records: usize,
    grid: ManifestGrid,
    deltas: Vec<ManifestDelta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<ManifestEnergy>,
    sampling_bias: Vec<ManifestBias>,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<ManifestPicard>,
    config: RunConfig,
}

#[derive(Serialize)]
struct ManifestGrid {
    n: usize,
    box_length: f64,
    j_min: i32,
    j_max: i32,
    /// The supremum over dyadic blocks is taken over j_min..=j_max only.
    truncation: String,
}

#[derive(Serialize)]
struct ManifestDelta {
    epsilon: f64,
    delta: f64,
    argmax_j: i32,
    exceeds_threshold: bool,
}

#[derive(Serialize)]
struct ManifestEnergy {
    identity_residual: f64,
    worst_violation: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct ManifestBias {
    j: i32,
    grid_max: f64,
    refined_max: f64,
    relative_gap: f64,
}

#[derive(Serialize)]
struct ManifestPicard {
    iterations: usize,
    converged: bool,
    differences: Vec<f64>,
    t0_estimate: String,
    exceeds_t0: bool,
}

/// `MMP_OUTPUT_DIR` if set, else the configured directory.
pub fn output_dir(config: &RunConfig) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| config.output.dir.clone())
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    run_in(config, &output_dir(config))
}

/// Runs `config`, writing every artifact under `dir`.
pub fn run_in(config: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    std::fs::create_dir_all(dir)?;
    let grid = config.build_grid()?;
    let profile = DyadicProfile::new(&grid);
    let params = config.params();
    let diagnostics = config.diagnostics();
    let state = initial_state(&config.initial, &grid)?;
    let dt = config.dt();
    let epsilons = config.monitors.epsilons.clone();

    let mut writer = csv::Writer::from_path(dir.join(DIAGNOSTICS_FILE))
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writer
        .write_record(csv_header(&diagnostics, &profile, &epsilons))
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let mut monitor = RunMonitor {
        writer,
        series: DiagnosticsSeries::new(params, GridSummary::new(&grid, &profile)),
        profile,
        warned: vec![false; epsilons.len()],
        epsilons,
        warn_threshold: config.monitors.warn_threshold,
        params,
        dir: dir.to_path_buf(),
        stride: config.output.snapshot_stride,
        dt,
        start: state.time,
        last_good: None,
    };

    let mut picard_report: Option<PicardReport> = None;
    let result = match config.solver.kind {
        SolverKind::Imex => {
            let options = IntegrationOptions {
                cadence: config.monitors.cadence,
                snapshot_stride: 0,
                diagnostics: diagnostics.clone(),
                ..IntegrationOptions::default()
            };
            if config.steps() == 0 {
                imex_integrate(&state, &params, 0.0, 1.0, &options, &mut [&mut monitor]).map(|_| ())
            } else {
                imex_integrate(&state, &params, config.solver.t_end, dt, &options, &mut [&mut monitor])
                    .map(|_| ())
            }
        }
        SolverKind::Picard => {
            let (trajectory, report) =
                picard_solve(&state.u, &state.omega, &state.b, &params, &config.picard()?)?;
            picard_report = Some(report);
            let last = trajectory.len() - 1;
            let cadence = config.monitors.cadence;
            (|| {
                for (m, s) in trajectory.states.iter().enumerate() {
                    monitor.on_step(s)?;
                    if m % cadence == 0 || m == last {
                        let record = DiagnosticsRecord::compute(s, &profile, &diagnostics)?;
                        monitor.on_record(s, &record)?;
                    }
                }
                Ok(())
            })()
        }
    };

    let status = match result {
        Ok(()) => RunStatus::Completed,
        Err(Error::Instability { time, norm }) => {
            if let Some(s) = &monitor.last_good {
                save_snapshot(&dir.join(LAST_GOOD_SNAPSHOT), s, &params)?;
            }
            log::error!("instability at t = {time}: norm {norm:.3e}");
            RunStatus::Unstable { time, norm }
        }
        Err(e) => return Err(e),
    };
    let last_state = monitor
        .last_good
        .clone()
        .ok_or_else(|| Error::InsufficientData("run produced no state".into()))?;
    if status == RunStatus::Completed {
        save_snapshot(&dir.join(FINAL_SNAPSHOT), &last_state, &params)?;
    }

    let series = monitor.series.clone();
    let deltas = monitor
        .epsilons
        .iter()
        .filter_map(|&eps| {
            let r = blowup_indicator(&series, eps, &profile).ok()?;
            Some(ManifestDelta {
                epsilon: eps,
                delta: r.delta,
                argmax_j: r.argmax_j,
                exceeds_threshold: config.monitors.warn_threshold.is_some_and(|w| r.delta > w),
            })
        })
        .collect();
    let energy = energy_ledger(&series).ok().map(|r| ManifestEnergy {
        identity_residual: r.identity_residual,
        worst_violation: r.worst_violation,
        tolerance: r.tolerance,
    });
    let bias = if config.monitors.oversampling > 0 {
        sampling_bias(&last_state, &profile, config.monitors.oversampling)?
            .into_iter()
            .map(|b| ManifestBias {
                j: b.j,
                grid_max: b.grid_max,
                refined_max: b.refined_max,
                relative_gap: b.relative_gap,
            })
            .collect()
    } else {
        Vec::new()
    };
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        status: match status {
            RunStatus::Completed => "completed".into(),
            RunStatus::Unstable { time, .. } => format!("instability at t = {time}"),
        },
        final_time: last_state.time,
        records: series.len(),
        grid: ManifestGrid {
            n: grid.n(),
            box_length: grid.box_length(),
            j_min: profile.j_min,
            j_max: profile.j_max,
            truncation: format!(
                "dyadic suprema restricted to resolvable blocks {}..={}",
                profile.j_min, profile.j_max
            ),
        },
        deltas,
        energy,
        sampling_bias: bias,
        picard: picard_report.map(|r| ManifestPicard {
            iterations: r.iterations,
            converged: r.converged,
            differences: r.differences,
            t0_estimate: format!("{:e}", r.t0_estimate),
            exceeds_t0: r.exceeds_t0,
        }),
        config: config.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    std::fs::write(dir.join(MANIFEST_FILE), text)?;

    Ok(RunOutcome {
        status,
        output_dir: dir.to_path_buf(),
        records: series.len(),
        final_time: last_state.time,
        series,
    })
}
