//! Runtime diagnostics: energy ledger, Sobolev norms, block sup-norms of the
//! vorticity, the frequency-localized blow-up indicator, classical criterion
//! integrals and the adaptive cutoff.
//!
//! All time integrals use the trapezoid rule on the recorded nodes. Window
//! endpoints that fall between nodes are handled by linear interpolation, so
//! integrals over adjacent windows add up exactly.

use crate::dynamics::{EnergyTerms, MMPParams, MMPState};
use crate::error::{Error, Result};
use crate::lp::{self, DyadicProfile};
use crate::spectral::{inverse_transform, Grid, SpectralVectorField};
use crate::sum::pairwise_sum_by;

/// Which optional quantities each record carries.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsConfig {
    /// Orders `s` of the combined `H^s` norm of `(u, ω, b)`.
    pub hs_orders: Vec<f64>,
    /// Record `‖Δ_j(∇×u)‖_∞` for every resolvable block.
    pub block_sups: bool,
    /// Record `‖∇×u‖_∞` and `‖∇×b‖_∞`.
    pub curl_sups: bool,
    /// Exponents `p` for which `‖∇u‖_p` is recorded.
    pub grad_lp_exponents: Vec<f64>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            hs_orders: vec![1.0, 2.0],
            block_sups: true,
            curl_sups: true,
            grad_lp_exponents: Vec::new(),
        }
    }
}

impl DiagnosticsConfig {
    /// Energies and dissipation only.
    pub fn minimal() -> Self {
        Self {
            hs_orders: Vec::new(),
            block_sups: false,
            curl_sups: false,
            grad_lp_exponents: Vec::new(),
        }
    }
}

/// Squared dissipation norms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dissipation {
    pub grad_u: f64,
    pub grad_omega: f64,
    pub grad_b: f64,
    pub div_omega: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `(‖u‖², ‖ω‖², ‖b‖²)`.
    pub l2_energy: [f64; 3],
    pub dissipation: Dissipation,
    /// `⟨∇×u, ω⟩`, the source of the vortex-coupling production.
    pub production: f64,
    pub hs_norms: Vec<(f64, f64)>,
    /// `(‖H‖, ‖I‖, ‖J‖)` for `H, I, J` the curls of `u, ω, b`.
    pub curl_l2: [f64; 3],
    /// `(‖∇×u‖_∞, ‖∇×b‖_∞)`.
    pub curl_sup: Option<[f64; 2]>,
    pub block_sups: Vec<(i32, f64)>,
    pub grad_lp: Vec<(f64, f64)>,
}

impl DiagnosticsRecord {
    pub fn compute(
        state: &MMPState,
        profile: &DyadicProfile,
        config: &DiagnosticsConfig,
    ) -> Result<Self> {
        let terms = EnergyTerms::of(state)?;
        let [u, w, b] = state.fields();
        let curl_u = u.curl();
        let hs_norms = config
            .hs_orders
            .iter()
            .map(|&s| {
                let v: f64 = state.fields().iter().map(|f| lp::sobolev_hs(f, s).powi(2)).sum();
                (s, v.sqrt())
            })
            .collect();
        let curl_sup = if config.curl_sups {
            Some([lp::sup_norm(&curl_u)?, lp::sup_norm(&b.curl())?])
        } else {
            None
        };
        let block_sups = if config.block_sups {
            profile
                .blocks()
                .map(|j| Ok((j, lp::block_sup_norm(&curl_u, j, profile)?)))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let grad_lp = config
            .grad_lp_exponents
            .iter()
            .map(|&p| Ok((p, grad_lp_norm(u, p)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            time: state.time,
            l2_energy: [
                u.l2_norm().powi(2),
                w.l2_norm().powi(2),
                b.l2_norm().powi(2),
            ],
            dissipation: Dissipation {
                grad_u: terms.grad_u,
                grad_omega: terms.grad_omega,
                grad_b: terms.grad_b,
                div_omega: terms.div_omega,
                omega: terms.omega,
            },
            production: terms.curl_u_omega,
            hs_norms,
            curl_l2: [curl_u.l2_norm(), w.curl().l2_norm(), b.curl().l2_norm()],
            curl_sup,
            block_sups,
            grad_lp,
        })
    }

    pub fn energy(&self) -> f64 {
        self.l2_energy.iter().sum()
    }

    fn terms(&self) -> EnergyTerms {
        EnergyTerms {
            grad_u: self.dissipation.grad_u,
            grad_omega: self.dissipation.grad_omega,
            grad_b: self.dissipation.grad_b,
            div_omega: self.dissipation.div_omega,
            omega: self.dissipation.omega,
            curl_u_omega: self.production,
        }
    }

    pub fn block_sup(&self, j: i32) -> Option<f64> {
        self.block_sups.iter().find(|(b, _)| *b == j).map(|(_, v)| *v)
    }

    /// All entries finite; norms and energies nonnegative.
    pub fn is_valid(&self) -> bool {
        let d = &self.dissipation;
        let mut values = vec![d.grad_u, d.grad_omega, d.grad_b, d.div_omega, d.omega];
        values.extend(self.l2_energy);
        values.extend(self.curl_l2);
        values.extend(self.hs_norms.iter().map(|x| x.1));
        values.extend(self.block_sups.iter().map(|x| x.1));
        values.extend(self.grad_lp.iter().map(|x| x.1));
        values.extend(self.curl_sup.iter().flatten());
        values.iter().all(|v| v.is_finite() && *v >= 0.0) && self.production.is_finite()
    }
}

/// `‖∇u‖_p` with `|∇u|` the pointwise Frobenius norm and the normalized grid measure.
pub fn grad_lp_norm(u: &SpectralVectorField, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::ExponentOutOfRange(p));
    }
    let grads: Vec<_> = (0..3)
        .map(|c| inverse_transform(&u.grad_component(c)))
        .collect::<Result<_>>()?;
    let len = u.grid().len();
    let mean = pairwise_sum_by(len, |x| {
        let f2: f64 = grads
            .iter()
            .map(|g| {
                let v = g.value(x);
                v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
            })
            .sum();
        f2.powf(p / 2.0)
    }) / len as f64;
    Ok(mean.powf(1.0 / p))
}

/// Lattice facts stored with a series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSummary {
    pub n: usize,
    pub box_length: f64,
    pub j_min: i32,
    pub j_max: i32,
}

impl GridSummary {
    pub fn new(grid: &Grid, profile: &DyadicProfile) -> Self {
        Self {
            n: grid.n(),
            box_length: grid.box_length(),
            j_min: profile.j_min,
            j_max: profile.j_max,
        }
    }
}

/// Time-ordered diagnostics with the parameters that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsSeries {
    pub params: MMPParams,
    pub grid: GridSummary,
    records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsSeries {
    pub fn new(params: MMPParams, grid: GridSummary) -> Self {
        Self {
            params,
            grid,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: DiagnosticsRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(record.time > last.time) {
                return Err(Error::Validation(format!(
                    "diagnostics times must increase strictly: {} after {}",
                    record.time, last.time
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.records.first()?.time, self.records.last()?.time))
    }

    /// Records with `t0 ≤ time ≤ t1`.
    pub fn slice(&self, t0: f64, t1: f64) -> impl Iterator<Item = &DiagnosticsRecord> {
        self.records.iter().filter(move |r| r.time >= t0 && r.time <= t1)
    }
}

fn span_tolerance(first: f64, last: f64) -> f64 {
    1e-12 * first.abs().max(last.abs()).max(1.0)
}

fn check_window(times: &[f64], t0: f64, t1: f64) -> Result<()> {
    let (first, last) = match (times.first(), times.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::InsufficientData("empty series".into())),
    };
    let tol = span_tolerance(first, last);
    if !(t0 <= t1) || t0 < first - tol || t1 > last + tol {
        return Err(Error::WindowUnderflow {
            start: t0,
            end: t1,
            first,
            last,
        });
    }
    Ok(())
}

/// Trapezoid integral over `[t0, t1]` of the piecewise-linear interpolant of `(times, values)`.
pub fn window_integral(times: &[f64], values: &[f64], t0: f64, t1: f64) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::InvalidParameter("times and values differ in length".into()));
    }
    check_window(times, t0, t1)?;
    let (first, last) = (times[0], times[times.len() - 1]);
    let t0 = t0.max(first);
    let t1 = t1.min(last);
    if t1 <= t0 {
        return Ok(0.0);
    }
    let interp = |i: usize, t: f64| {
        let w = (t - times[i]) / (times[i + 1] - times[i]);
        values[i] + w * (values[i + 1] - values[i])
    };
    let pieces: Vec<f64> = (0..times.len() - 1)
        .filter_map(|i| {
            let a = times[i].max(t0);
            let b = times[i + 1].min(t1);
            if b <= a {
                return None;
            }
            let fa = if a == times[i] { values[i] } else { interp(i, a) };
            let fb = if b == times[i + 1] { values[i + 1] } else { interp(i, b) };
            Some(0.5 * (b - a) * (fa + fb))
        })
        .collect();
    Ok(pieces.iter().sum())
}

fn require_records(series: &DiagnosticsSeries, n: usize) -> Result<()> {
    if series.len() < n {
        return Err(Error::InsufficientData(format!(
            "need at least {n} records, have {}",
            series.len()
        )));
    }
    Ok(())
}

/// Discrete energy accounting over a series.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedgerReport {
    /// Largest `E(t) + 2∫D − E(0)` over the record times, `D` the inequality dissipation.
    pub worst_violation: f64,
    /// `dt²·T·max D` with `dt` the largest record spacing.
    pub tolerance: f64,
    /// Largest `|E(t) − E(0) − 2∫⟨rhs, state⟩|`: residual of the exact balance.
    pub identity_residual: f64,
    /// `identity_residual / T`.
    pub identity_residual_rate: f64,
    pub peak_dissipation: f64,
    pub duration: f64,
}

impl EnergyLedgerReport {
    pub fn inequality_holds(&self) -> bool {
        self.worst_violation <= self.tolerance
    }
}

pub fn energy_ledger(series: &DiagnosticsSeries) -> Result<EnergyLedgerReport> {
    require_records(series, 2)?;
    let p = &series.params;
    let times = series.times();
    let records = series.records();
    let energies: Vec<f64> = records.iter().map(|r| r.energy()).collect();
    let dissipation: Vec<f64> = records.iter().map(|r| r.terms().inequality_dissipation(p)).collect();
    let balance: Vec<f64> = records.iter().map(|r| r.terms().balance(p)).collect();
    let e0 = energies[0];
    let mut cumulative_d = 0.0;
    let mut cumulative_b = 0.0;
    let mut worst_violation = 0.0f64;
    let mut identity_residual = 0.0f64;
    let mut max_step = 0.0f64;
    for i in 1..records.len() {
        let h = times[i] - times[i - 1];
        max_step = max_step.max(h);
        cumulative_d += 0.5 * h * (dissipation[i - 1] + dissipation[i]);
        cumulative_b += 0.5 * h * (balance[i - 1] + balance[i]);
        worst_violation = worst_violation.max(energies[i] + 2.0 * cumulative_d - e0);
        identity_residual = identity_residual.max((energies[i] - e0 - 2.0 * cumulative_b).abs());
    }
    let duration = times[times.len() - 1] - times[0];
    let peak_dissipation = dissipation.iter().copied().fold(0.0, f64::max);
    Ok(EnergyLedgerReport {
        worst_violation,
        tolerance: max_step * max_step * duration * peak_dissipation,
        identity_residual,
        identity_residual_rate: identity_residual / duration,
        peak_dissipation,
        duration,
    })
}

/// Result of [`blowup_indicator`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupReport {
    pub delta: f64,
    pub argmax_j: i32,
    /// Blocks entering the supremum; lower and higher frequencies are unresolved on the grid.
    pub j_min: i32,
    pub j_max: i32,
    pub window: (f64, f64),
    pub per_block: Vec<(i32, f64)>,
}

/// `sup_j ∫_{T−ε}^T ‖Δ_j(∇×u)‖_∞ dt` over the resolvable blocks, `T` the last record time.
pub fn blowup_indicator(
    series: &DiagnosticsSeries,
    epsilon: f64,
    profile: &DyadicProfile,
) -> Result<BlowupReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let (_, end) = series
        .span()
        .ok_or_else(|| Error::InsufficientData("empty series".into()))?;
    let times = series.times();
    let window = (end - epsilon, end);
    check_window(&times, window.0, window.1)?;
    let mut per_block = Vec::with_capacity(profile.block_count());
    for j in profile.blocks() {
        let values: Vec<f64> = series
            .records()
            .iter()
            .map(|r| {
                r.block_sup(j).ok_or_else(|| {
                    Error::InsufficientData(format!("block sup-norm of block {j} not recorded"))
                })
            })
            .collect::<Result<_>>()?;
        per_block.push((j, window_integral(&times, &values, window.0, window.1)?));
    }
    let (argmax_j, delta) = per_block
        .iter()
        .copied()
        .fold((profile.j_min, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    Ok(BlowupReport {
        delta,
        argmax_j,
        j_min: profile.j_min,
        j_max: profile.j_max,
        window,
        per_block,
    })
}

/// Time integrals of `‖∇×u‖_∞` and `‖∇×b‖_∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BkmIntegral {
    pub vorticity: f64,
    pub current: f64,
}

pub fn bkm_integral(series: &DiagnosticsSeries, t0: f64, t1: f64) -> Result<BkmIntegral> {
    let times = series.times();
    check_window(&times, t0, t1)?;
    let sups: Vec<[f64; 2]> = series
        .records()
        .iter()
        .map(|r| r.curl_sup.ok_or_else(|| Error::InsufficientData("curl sup-norms not recorded".into())))
        .collect::<Result<_>>()?;
    let w: Vec<f64> = sups.iter().map(|s| s[0]).collect();
    let c: Vec<f64> = sups.iter().map(|s| s[1]).collect();
    Ok(BkmIntegral {
        vorticity: window_integral(&times, &w, t0, t1)?,
        current: window_integral(&times, &c, t0, t1)?,
    })
}

/// `q = 2p/(2p − 3)`, the endpoint of `2/q + 3/p = 2`.
pub fn zhou_exponent(p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.5) {
        return Err(Error::ExponentOutOfRange(p));
    }
    Ok(2.0 * p / (2.0 * p - 3.0))
}

/// `∫ ‖∇u‖_p^q dt` with `q = 2p/(2p − 3)`; needs `p` among the recorded exponents.
pub fn zhou_integral(series: &DiagnosticsSeries, p: f64, t0: f64, t1: f64) -> Result<f64> {
    let q = zhou_exponent(p)?;
    let times = series.times();
    check_window(&times, t0, t1)?;
    let values: Vec<f64> = series
        .records()
        .iter()
        .map(|r| {
            r.grad_lp
                .iter()
                .find(|(e, _)| *e == p)
                .map(|(_, v)| v.powf(q))
                .ok_or_else(|| Error::InsufficientData(format!("grad L^{p} norm not recorded")))
        })
        .collect::<Result<_>>()?;
    window_integral(&times, &values, t0, t1)
}

/// `⌊(2/ln 2)·ln(C(H + I + J)/min(μ, γ, ν) + e)⌋ + 1`.
pub fn adaptive_cutoff_n(h_l2: f64, i_l2: f64, j_l2: f64, params: &MMPParams, c: f64) -> Result<u32> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if [h_l2, i_l2, j_l2].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("curl norms must be finite and nonnegative".into()));
    }
    let x = c * (h_l2 + i_l2 + j_l2) / params.min_viscosity();
    let log_plus = (x + std::f64::consts::E).ln();
    Ok((2.0 / std::f64::consts::LN_2 * log_plus).floor() as u32 + 1)
}

/// Largest `‖H‖ + ‖I‖ + ‖J‖` among the records in `[t0, t1]`.
pub fn zeta_sup(series: &DiagnosticsSeries, t0: f64, t1: f64) -> Result<f64> {
    check_window(&series.times(), t0, t1)?;
    Ok(series
        .slice(t0, t1)
        .map(|r| r.curl_l2.iter().sum::<f64>())
        .fold(0.0, f64::max))
}

/// Grid maximum against a refined evaluation of `Δ_j(∇×u)` for one block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingBias {
    pub j: i32,
    pub grid_max: f64,
    pub refined_max: f64,
    /// `1 − grid_max / refined_max`; zero for an empty block.
    pub relative_gap: f64,
}

/// Sampling error of the block sup-norms of `∇×u`, per resolvable block.
pub fn sampling_bias(state: &MMPState, profile: &DyadicProfile, factor: usize) -> Result<Vec<SamplingBias>> {
    let curl_u = state.u.curl();
    profile
        .blocks()
        .map(|j| {
            let block = lp::delta_j(&curl_u, j, profile)?;
            let grid_max = lp::sup_norm(&block)?;
            let refined_max = lp::oversampled_sup_norm(&block, factor)?;
            let relative_gap = if refined_max > 0.0 {
                1.0 - grid_max / refined_max
            } else {
                0.0
            };
            Ok(SamplingBias {
                j,
                grid_max,
                refined_max,
                relative_gap,
            })
        })
        .collect()
}
