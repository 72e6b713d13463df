//! Run configuration: TOML with a strict schema.
//!
//! ```toml
//! [grid]
//! n = 16
//!
//! [initial]
//! preset = "taylor_green"
//!
//! [solver]
//! kind = "imex"
//! t_end = 0.1
//! dt = 1e-3
//! ```
//!
//! Every section rejects unknown keys. Omitted values take the defaults below.

use crate::dynamics::MMPParams;
use crate::error::{Error, Result};
use crate::integrate::PicardConfig;
use crate::monitors::DiagnosticsConfig;
use crate::spectral::Grid;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    pub initial: InitialConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "default_box_length")]
    pub box_length: f64,
}

fn default_box_length() -> f64 {
    2.0 * std::f64::consts::PI
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub mu: f64,
    pub chi: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub nu: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            mu: 0.05,
            chi: 0.01,
            kappa: 0.01,
            gamma: 0.05,
            nu: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    TaylorGreen,
    SingleMode,
    RandomSeeded,
    /// Initial data read from a snapshot file.
    Snapshot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub preset: Preset,
    /// Amplitude of `u`.
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub omega_amplitude: f64,
    #[serde(default)]
    pub b_amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Lattice mode of the `single_mode` preset.
    #[serde(default = "default_mode")]
    pub mode: [i64; 3],
    /// Largest axis index populated by `random_seeded`.
    #[serde(default = "default_band")]
    pub band: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_mode() -> [i64; 3] {
    [1, 0, 0]
}

fn default_band() -> i64 {
    4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Imex,
    Picard,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_cauchy_tol")]
    pub cauchy_tol: f64,
    #[serde(default = "default_offset")]
    pub truncation_offset: i32,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default = "one")]
    pub c1: f64,
}

fn default_s() -> f64 {
    2.0
}

fn default_max_iters() -> usize {
    30
}

fn default_cauchy_tol() -> f64 {
    1e-10
}

fn default_offset() -> i32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorConfig {
    /// Steps between diagnostics records.
    pub cadence: usize,
    pub hs_orders: Vec<f64>,
    /// Window lengths ε of the blow-up indicator.
    pub epsilons: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warn_threshold: Option<f64>,
    pub block_sups: bool,
    pub curl_sups: bool,
    /// Exponents `p` of the recorded `‖∇u‖_p`.
    pub grad_lp: Vec<f64>,
    /// Refinement factor of the end-of-run sampling-bias check; 0 disables it.
    pub oversampling: usize,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            cadence: 10,
            hs_orders: vec![1.0, 2.0],
            epsilons: Vec::new(),
            warn_threshold: None,
            block_sups: true,
            curl_sups: true,
            grad_lp: Vec::new(),
            oversampling: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Steps between snapshots; 0 writes only the final state.
    pub snapshot_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("mmp-output"),
            snapshot_stride: 0,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl RunConfig {
    pub fn params(&self) -> MMPParams {
        let p = &self.params;
        MMPParams {
            mu: p.mu,
            chi: p.chi,
            kappa: p.kappa,
            gamma: p.gamma,
            nu: p.nu,
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.box_length)
    }

    /// Step size, from `dt` or from `t_end / steps`.
    pub fn dt(&self) -> f64 {
        match (self.solver.dt, self.solver.steps) {
            (Some(dt), _) => dt,
            (None, Some(m)) if m > 0 => self.solver.t_end / m as f64,
            _ => f64::NAN,
        }
    }

    pub fn steps(&self) -> usize {
        match self.solver.steps {
            Some(m) => m,
            None => (self.solver.t_end / self.dt()).round() as usize,
        }
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            hs_orders: self.monitors.hs_orders.clone(),
            block_sups: self.monitors.block_sups,
            curl_sups: self.monitors.curl_sups,
            grad_lp_exponents: self.monitors.grad_lp.clone(),
        }
    }

    pub fn picard(&self) -> Result<PicardConfig> {
        let s = &self.solver;
        let c = PicardConfig {
            s: s.s,
            t_end: s.t_end,
            steps: self.steps(),
            max_iters: s.max_iters,
            cauchy_tol: s.cauchy_tol,
            truncation_offset: s.truncation_offset,
            c0: s.c0,
            c1: s.c1,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n;
        if n < 8 || n % 2 != 0 {
            return Err(invalid("grid.n must be an even integer >= 8"));
        }
        if !(self.grid.box_length.is_finite() && self.grid.box_length > 0.0) {
            return Err(invalid("grid.box_length must be positive"));
        }
        self.params().validate()?;

        let init = &self.initial;
        for (name, a) in [
            ("amplitude", init.amplitude),
            ("omega_amplitude", init.omega_amplitude),
            ("b_amplitude", init.b_amplitude),
        ] {
            if !a.is_finite() {
                return Err(invalid(format!("initial.{name} must be finite")));
            }
        }
        match init.preset {
            Preset::SingleMode => {
                if init.mode == [0, 0, 0] {
                    return Err(invalid("initial.mode must be nonzero"));
                }
                if init.mode.iter().any(|m| m.abs() >= (n / 2) as i64) {
                    return Err(invalid("initial.mode must lie strictly inside the Nyquist band"));
                }
            }
            Preset::RandomSeeded => {
                if init.band < 1 || init.band >= (n / 2) as i64 {
                    return Err(invalid("initial.band must be in [1, n/2)"));
                }
            }
            Preset::Snapshot => {
                if init.path.is_none() {
                    return Err(invalid("initial.path is required for the snapshot preset"));
                }
            }
            Preset::TaylorGreen => {}
        }

        let s = &self.solver;
        if !(s.t_end.is_finite() && s.t_end >= 0.0) {
            return Err(invalid("solver.t_end must be nonnegative"));
        }
        match (s.dt, s.steps) {
            (Some(_), Some(_)) => return Err(invalid("give solver.dt or solver.steps, not both")),
            (None, None) => return Err(invalid("solver.dt or solver.steps is required")),
            (Some(dt), None) => {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(invalid("solver.dt must be positive"));
                }
                let m = (s.t_end / dt).round();
                if (m * dt - s.t_end).abs() > 1e-9 * s.t_end.max(dt) {
                    return Err(invalid("solver.t_end must be an integer multiple of solver.dt"));
                }
            }
            (None, Some(m)) => {
                if m == 0 && s.t_end > 0.0 {
                    return Err(invalid("solver.steps must be positive"));
                }
            }
        }
        if !(s.s > 1.5 && s.s.is_finite()) {
            return Err(invalid("s must exceed 3/2"));
        }
        if s.kind == SolverKind::Picard {
            if s.t_end <= 0.0 {
                return Err(invalid("picard horizon solver.t_end must be positive"));
            }
            self.picard()?;
        }

        let m = &self.monitors;
        if m.cadence == 0 {
            return Err(invalid("monitors.cadence must be positive"));
        }
        if m.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(invalid("monitors.epsilons must be positive"));
        }
        if !m.epsilons.is_empty() && !m.block_sups {
            return Err(invalid("monitors.epsilons requires monitors.block_sups"));
        }
        if m.hs_orders.iter().any(|s| !s.is_finite()) {
            return Err(invalid("monitors.hs_orders must be finite"));
        }
        if m.grad_lp.iter().any(|p| !(p.is_finite() && *p > 1.5)) {
            return Err(invalid("monitors.grad_lp exponents must lie in (3/2, inf)"));
        }
        if let Some(w) = m.warn_threshold {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid("monitors.warn_threshold must be positive"));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_in(message: &str) -> Option<String> {
    let start = message.find('`')?;
    let rest = &message[start + 1..];
    let end = rest.find('`')?;
    Some(rest[..end].to_string())
}

/// Parses and validates a configuration held in memory.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            key: key_in(&message),
            message,
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nn = 16\n\n[initial]\npreset = \"taylor_green\"\n\n[solver]\nkind = \"imex\"\nt_end = 0.1\ndt = 1e-3\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(c.solver.s, 2.0);
        assert_eq!(c.monitors.cadence, 10);
        assert_eq!(c.steps(), 100);
        assert_eq!(c.grid.box_length, 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn zero_viscosity_is_rejected() {
        let text = format!("{MINIMAL}\n[params]\nmu = 0.0\n");
        let e = parse_config_str(&text).unwrap_err();
        assert!(e.to_string().contains("mu must be positive"), "{e}");
    }

    #[test]
    fn unknown_key_reports_line_and_key() {
        let text = MINIMAL.replace("n = 16", "n = 16\nsize = 3");
        match parse_config_str(&text).unwrap_err() {
            Error::Parse { line, key, .. } => {
                assert_eq!(line, 3);
                assert_eq!(key.as_deref(), Some("size"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn round_trip() {
        let c = parse_config_str(MINIMAL).unwrap();
        assert_eq!(parse_config_str(&c.to_toml_string()).unwrap(), c);
    }
}
