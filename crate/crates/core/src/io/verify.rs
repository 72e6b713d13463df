//! Self-test suites behind `mmp verify`.

use super::presets::{random_field, single_mode, taylor_green};
use crate::dynamics::{curl_rhs, rhs, EnergyTerms, MMPParams, MMPState};
use crate::error::{Error, Result};
use crate::integrate::{
    imex_integrate, picard_solve, IntegrationOptions, LinearPropagator, PicardConfig,
};
use crate::lp::{self, DyadicProfile};
use crate::monitors::{
    adaptive_cutoff_n, blowup_indicator, window_integral, DiagnosticsConfig, DiagnosticsRecord,
    DiagnosticsSeries, GridSummary,
};
use crate::spectral::{forward_transform, inverse_transform, Grid, PhysicalVectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Spectral,
    Lp,
    Dynamics,
    Picard,
    Monitors,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "lp" => Ok(Self::Lp),
            "dynamics" => Ok(Self::Dynamics),
            "picard" => Ok(Self::Picard),
            "monitors" => Ok(Self::Monitors),
            "all" => Ok(Self::All),
            other => Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
        }
    }
}

/// One measured invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn below(&mut self, suite: &'static str, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<9} {:<52} measured {:>10.3e}  tolerance {:>9.2e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.measured,
                c.tolerance
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn random_state(grid: &Grid, seed: u64, amp: f64) -> MMPState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = (grid.n() / 2 - 1) as i64;
    MMPState {
        u: random_field(grid, &mut rng, band, true).scaled(amp),
        omega: random_field(grid, &mut rng, band, false).scaled(amp),
        b: random_field(grid, &mut rng, band, true).scaled(amp),
        time: 0.0,
    }
}

fn params() -> MMPParams {
    MMPParams {
        mu: 0.05,
        chi: 0.02,
        kappa: 0.03,
        gamma: 0.04,
        nu: 0.06,
    }
}

fn spectral(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "spectral";
    for n in [8, 16] {
        let g = Grid::periodic(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let f = random_field(&g, &mut rng, (n / 2) as i64, false);
        let phys = inverse_transform(&f)?;
        let back = forward_transform(&phys);
        report.below(S, format!("round trip n={n}"), back.max_abs_diff(&f)? / f.max_abs(), 1e-12);
        report.below(S, format!("Parseval n={n}"), rel(phys.mean_square(), f.l2_norm().powi(2)), 1e-12);
        let p = f.leray_project();
        report.below(S, format!("Leray idempotent n={n}"), p.leray_project().max_abs_diff(&p)?, 1e-13);
        report.below(S, format!("Leray orthogonal n={n}"), f.sub(&p)?.inner(&p)?.abs(), 1e-12);
        report.below(S, format!("div curl n={n}"), f.curl().divergence().max_abs(), 1e-12);
        report.below(S, format!("curl grad n={n}"), f.grad_component(0).curl().max_abs(), 1e-12);
        report.below(
            S,
            format!("Lambda composition n={n}"),
            f.lambda_s(0.7).lambda_s(-1.2).max_abs_diff(&f.lambda_s(-0.5))? / f.max_abs(),
            1e-12,
        );
    }
    Ok(())
}

fn littlewood_paley(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "lp";
    let mut dev_inh: f64 = 0.0;
    let mut dev_hom: f64 = 0.0;
    let rmax = 3f64.sqrt() * 16.0;
    for i in 1..=10_000 {
        let r = rmax * i as f64 / 10_000.0;
        let inh = lp::chi(r) + (0..40).map(|j| lp::phi(r * 2f64.powi(-j))).sum::<f64>();
        let hom: f64 = (-40..40).map(|j| lp::phi(r * 2f64.powi(-j))).sum();
        dev_inh = dev_inh.max((inh - 1.0).abs());
        dev_hom = dev_hom.max((hom - 1.0).abs());
    }
    report.below(S, "partition of unity, 1e4 radii", dev_inh, 1e-12);
    report.below(S, "annulus sum, 1e4 radii", dev_hom, 1e-12);
    for n in [8, 16] {
        let g = Grid::periodic(n)?;
        let profile = DyadicProfile::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(7 + n as u64);
        let f = random_field(&g, &mut rng, (n / 2) as i64, false);
        let rec = lp::BlockDecomposition::new(&f, &profile).reconstruct();
        report.below(S, format!("reconstruction n={n}"), rec.sub(&f)?.l2_norm() / f.l2_norm(), 1e-11);
        let mut overlap: f64 = 0.0;
        for j in profile.blocks() {
            for k in profile.blocks().filter(|k| (k - j).abs() >= 2) {
                let d = lp::delta_j(&lp::delta_j(&f, k, &profile)?, j, &profile)?;
                overlap = overlap.max(d.max_abs());
            }
        }
        report.below(S, format!("quasi-orthogonality n={n}"), overlap, 0.0);
    }
    let g = Grid::periodic(32)?;
    let profile = DyadicProfile::new(&g);
    for (p, q, expected) in [(2.0, 2.0, 1.0), (2.0, f64::INFINITY, 2.5)] {
        let r = lp::bernstein_scaling_check(&g, &profile, p, q, 1, 2, 11)?;
        report.below(
            S,
            format!("Bernstein slope (p,q)=({p},{q}) vs {expected}, n=32"),
            r.max_relative_error,
            0.05,
        );
    }
    Ok(())
}

fn dynamics(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "dynamics";
    let p = params();
    for n in [8, 16] {
        let g = Grid::periodic(n)?;
        let s = random_state(&g, 3 + n as u64, 0.5);
        let t = rhs(&s, &p)?;
        let e = EnergyTerms::of(&s)?;
        report.below(S, format!("energy balance n={n}"), (t.inner(&s)? - e.balance(&p)).abs(), 1e-10);
        report.below(
            S,
            format!("solenoidal tendency n={n}"),
            t.du.divergence_defect().max(t.db.divergence_defect()),
            1e-10,
        );
        let (dh, di, dj) = curl_rhs(&s.u.curl(), &s.omega.curl(), &s.b.curl(), &s, &p)?;
        let mismatch = dh
            .max_abs_diff(&t.du.curl())?
            .max(di.max_abs_diff(&t.domega.curl())?)
            .max(dj.max_abs_diff(&t.db.curl())?);
        report.below(S, format!("curl system = curl of rhs n={n}"), mismatch, 1e-10);
        report.below(
            S,
            format!("cross-term symmetry n={n}"),
            (s.omega.curl().inner(&s.u)? - s.u.curl().inner(&s.omega)?).abs(),
            1e-12,
        );
    }
    Ok(())
}

fn picard(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "picard";
    let g = Grid::periodic(8)?;
    let p = params();
    let data = taylor_green(&g, 0.2, 0.1, 0.1);
    let mut cfg = PicardConfig::new(2.0, 0.05, 10)?;
    cfg.cauchy_tol = 1e-12;
    let (traj, r) = picard_solve(&data.u, &data.omega, &data.b, &p, &cfg)?;
    let worst_ratio = r.ratios.iter().skip(1).copied().fold(0.0, f64::max);
    report.below(S, "geometric ratio after iteration 2", worst_ratio, 0.5);
    let (imex, _) = imex_integrate(
        &data,
        &p,
        cfg.t_end,
        cfg.dt(),
        &IntegrationOptions {
            diagnostics: DiagnosticsConfig::minimal(),
            ..IntegrationOptions::default()
        },
        &mut [],
    )?;
    let a = traj.last().expect("states");
    let b = imex.last().expect("states");
    let mut diff = 0.0;
    for (x, y) in a.fields().iter().zip(b.fields()) {
        diff += lp::sobolev_hs(&x.sub(y)?, cfg.s - 1.0).powi(2);
    }
    let dt = cfg.dt();
    report.below(S, "Picard vs IMEX in H^{s-1}", diff.sqrt(), (10.0 * dt * dt).max(10.0 * cfg.cauchy_tol));

    let lin = single_mode(&g, [1, 2, 0], 1e-8, 1e-8, 1e-8)?;
    let (traj, _) = picard_solve(&lin.u, &lin.omega, &lin.b, &p, &cfg)?;
    let exact = LinearPropagator::new(&g, &p, cfg.t_end)?.apply(&lin)?;
    let end = traj.last().expect("states");
    let err = end
        .u
        .max_abs_diff(&exact.u)?
        .max(end.omega.max_abs_diff(&exact.omega)?)
        .max(end.b.max_abs_diff(&exact.b)?);
    report.below(S, "linear regime vs exponential", err, 1e-9);
    Ok(())
}

fn monitors(report: &mut VerifyReport) -> Result<()> {
    const S: &str = "monitors";
    let p = MMPParams {
        mu: 1.0,
        chi: 0.0,
        kappa: 0.0,
        gamma: 1.0,
        nu: 1.0,
    };
    let n = adaptive_cutoff_n(0.0, 0.0, 0.0, &p, 1.0)? as f64;
    report.below(S, "cutoff N at zero curls (expect 3)", (n - 3.0).abs(), 0.0);
    let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.025).collect();
    let values: Vec<f64> = times.iter().map(|t| (3.0 * t).sin().abs() + 0.1).collect();
    let split = window_integral(&times, &values, 0.0, 0.4)? + window_integral(&times, &values, 0.4, 1.0)?;
    report.below(S, "window additivity", (split - window_integral(&times, &values, 0.0, 1.0)?).abs(), 1e-12);

    for n in [8, 16] {
        let g = Grid::periodic(n)?;
        let profile = DyadicProfile::new(&g);
        let u = forward_transform(&PhysicalVectorField::from_fn(&g, |x| [0.0, 0.0, (2.0 * x[0]).cos()]));
        let mut state = MMPState::zeros(&g);
        state.u = u;
        let mut series = DiagnosticsSeries::new(p, GridSummary::new(&g, &profile));
        let mut value = 0.0;
        for i in 0..=10 {
            state.time = i as f64 * 0.1;
            let r = DiagnosticsRecord::compute(&state, &profile, &DiagnosticsConfig::default())?;
            value = r.block_sup(1).unwrap_or(0.0);
            series.push(r)?;
        }
        let eps = 0.35;
        let d = blowup_indicator(&series, eps, &profile)?;
        report.below(S, format!("frozen series delta = eps * sup n={n}"), (d.delta - eps * value).abs(), 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let u = random_field(&g, &mut rng, (n / 2 - 1) as i64, true);
        let grad: f64 = (0..3).map(|c| u.grad_component(c).l2_norm().powi(2)).sum();
        report.below(S, format!("grad/curl L2 identity n={n}"), rel(grad.sqrt(), u.curl().l2_norm()), 1e-12);
    }
    Ok(())
}

/// Runs one suite (or every suite) and collects the measurements.
pub fn verify(suite: Suite) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Spectral {
        spectral(&mut report)?;
    }
    if all || suite == Suite::Lp {
        littlewood_paley(&mut report)?;
    }
    if all || suite == Suite::Dynamics {
        dynamics(&mut report)?;
    }
    if all || suite == Suite::Picard {
        picard(&mut report)?;
    }
    if all || suite == Suite::Monitors {
        monitors(&mut report)?;
    }
    Ok(report)
}
