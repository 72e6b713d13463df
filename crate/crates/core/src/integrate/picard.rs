//! Successive approximations with frozen nonlinear forcing.
//!
//! Iterate 0 is identically zero. Iterate `n + 1` solves the linear system
//! (diffusion, vortex coupling, micro-rotation damping) exactly in time and
//! receives the quadratic terms of iterate `n` as a forcing, integrated against
//! the exponential by the trapezoid rule:
//!
//! ```text
//! v_{m+1} = E (v_m + dt/2 F_m) + dt/2 F_{m+1},    F_m = N(v^{(n)}_m)
//! ```
//!
//! Its initial data are the low-pass `S_{n+offset}` of the given data.

use super::imex::{guard, step_count};
use super::propagator::LinearPropagator;
use super::Trajectory;
use crate::dynamics::{nonlinear_terms, MMPParams, MMPState, Tendency};
use crate::error::{Error, Result};
use crate::lp::{self, DyadicProfile};
use crate::spectral::SpectralVectorField;

#[derive(Clone, Debug, PartialEq)]
pub struct PicardConfig {
    /// Sobolev index; differences are measured in `H^{s−1}`.
    pub s: f64,
    pub t_end: f64,
    /// Number of time steps `M`; nodes are `m·T/M`.
    pub steps: usize,
    pub max_iters: usize,
    pub cauchy_tol: f64,
    pub truncation_offset: i32,
    pub c0: f64,
    pub c1: f64,
}

impl PicardConfig {
    pub fn new(s: f64, t_end: f64, steps: usize) -> Result<Self> {
        let c = Self {
            s,
            t_end,
            steps,
            max_iters: 30,
            cauchy_tol: 1e-10,
            truncation_offset: 2,
            c0: 1.0,
            c1: 1.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 1.5 && self.s.is_finite()) {
            return Err(Error::Validation("s must exceed 3/2".into()));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Validation("picard horizon T must be positive".into()));
        }
        if self.steps == 0 {
            return Err(Error::Validation("picard steps must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be positive".into()));
        }
        if !(self.cauchy_tol.is_finite() && self.cauchy_tol > 0.0) {
            return Err(Error::Validation("cauchy_tol must be positive".into()));
        }
        if !(self.c0 > 0.0 && self.c1 > 0.0 && self.c0.is_finite() && self.c1.is_finite()) {
            return Err(Error::Validation("c0 and c1 must be positive".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    /// Config with `dt` given instead of the step count.
    pub fn with_dt(s: f64, t_end: f64, dt: f64) -> Result<Self> {
        Self::new(s, t_end, step_count(t_end, dt)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardReport {
    /// `sup_m ‖v^{(n)}_m − v^{(n−1)}_m‖_{H^{s−1}}` for `n = 1, 2, …`.
    pub differences: Vec<f64>,
    /// Successive ratios `differences[n+1] / differences[n]`.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub t0_estimate: f64,
    /// The horizon exceeds the advisory `T₀`.
    pub exceeds_t0: bool,
}

/// `S_j` applied to each field.
pub fn low_pass_state(state: &MMPState, j: i32, profile: &DyadicProfile) -> MMPState {
    if j > profile.j_max {
        return state.clone();
    }
    MMPState {
        u: lp::low_pass(&state.u, j, profile),
        omega: lp::low_pass(&state.omega, j, profile),
        b: lp::low_pass(&state.b, j, profile),
        time: state.time,
    }
}

/// `S_{n+2}(u₀, ω₀, b₀)`: the initial data of iterate `n + 1`.
pub fn truncate_initial_data(
    u0: &SpectralVectorField,
    omega0: &SpectralVectorField,
    b0: &SpectralVectorField,
    n: i32,
    profile: &DyadicProfile,
) -> Result<MMPState> {
    let data = MMPState::new(u0.clone(), omega0.clone(), b0.clone(), 0.0)?;
    Ok(low_pass_state(&data, n + 2, profile))
}

/// `1 / (4 C₀ C₁ ‖(u₀, ω₀, b₀)‖²_{H^s})`; infinite for zero data.
pub fn estimate_t0(
    u0: &SpectralVectorField,
    omega0: &SpectralVectorField,
    b0: &SpectralVectorField,
    s: f64,
    c0: f64,
    c1: f64,
) -> f64 {
    let norm2: f64 = [u0, omega0, b0].iter().map(|f| lp::sobolev_hs(f, s).powi(2)).sum();
    if norm2 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (4.0 * c0 * c1 * norm2)
    }
}

fn hs_difference(a: &MMPState, b: &MMPState, s: f64) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in a.fields().iter().zip(b.fields()) {
        total += lp::sobolev_hs(&x.sub(y)?, s).powi(2);
    }
    Ok(total.sqrt())
}

fn forcing(states: &[MMPState]) -> Result<Vec<Tendency>> {
    states.iter().map(nonlinear_terms).collect()
}

pub fn picard_solve(
    u0: &SpectralVectorField,
    omega0: &SpectralVectorField,
    b0: &SpectralVectorField,
    params: &MMPParams,
    config: &PicardConfig,
) -> Result<(Trajectory, PicardReport)> {
    config.validate()?;
    params.validate()?;
    let data = MMPState::new(u0.clone(), omega0.clone(), b0.clone(), 0.0)?;
    let scale = u0.max_abs().max(b0.max_abs()).max(1.0);
    if data.divergence_defect() > 1e-10 * scale {
        return Err(Error::InvalidParameter("initial u and b must be divergence-free".into()));
    }
    let grid = data.grid().clone();
    let profile = DyadicProfile::new(&grid);
    let dt = config.dt();
    let propagator = LinearPropagator::new(&grid, params, dt)?;
    let t0_estimate = estimate_t0(u0, omega0, b0, config.s, config.c0, config.c1);
    let exceeds_t0 = config.t_end > t0_estimate;
    if exceeds_t0 {
        log::warn!("horizon {} exceeds the T0 estimate {t0_estimate:.3e}", config.t_end);
    }

    let nodes = config.steps + 1;
    let time = |m: usize| m as f64 * dt;
    let zero = MMPState::zeros(&grid);
    let mut previous: Vec<MMPState> = (0..nodes)
        .map(|m| MMPState {
            time: time(m),
            ..zero.clone()
        })
        .collect();
    let mut differences = Vec::new();
    let mut converged = false;
    for n in 0..config.max_iters {
        let f = if n == 0 {
            vec![Tendency::zeros(&grid); nodes]
        } else {
            forcing(&previous)?
        };
        let mut v = low_pass_state(&data, n as i32 + config.truncation_offset, &profile);
        let mut current = Vec::with_capacity(nodes);
        current.push(v.clone());
        for m in 0..config.steps {
            let half = MMPState {
                u: v.u.axpy(0.5 * dt, &f[m].du)?,
                omega: v.omega.axpy(0.5 * dt, &f[m].domega)?,
                b: v.b.axpy(0.5 * dt, &f[m].db)?,
                time: v.time,
            };
            let mut next = propagator.apply(&half)?;
            next.u.axpy_in_place(0.5 * dt, &f[m + 1].du);
            next.omega.axpy_in_place(0.5 * dt, &f[m + 1].domega);
            next.b.axpy_in_place(0.5 * dt, &f[m + 1].db);
            next.project();
            next.time = time(m + 1);
            guard(&next)?;
            current.push(next.clone());
            v = next;
        }
        let mut diff = 0.0f64;
        for (a, b) in current.iter().zip(&previous) {
            diff = diff.max(hs_difference(a, b, config.s - 1.0)?);
        }
        differences.push(diff);
        previous = current;
        log::debug!("picard iterate {}: difference {diff:.3e}", n + 1);
        if diff < config.cauchy_tol {
            converged = true;
            break;
        }
    }
    let ratios: Vec<f64> = differences.windows(2).map(|w| w[1] / w[0]).collect();
    if !converged {
        let last = ratios.last().copied().unwrap_or(f64::INFINITY);
        if !(last < 1.0) {
            return Err(Error::NoConvergence {
                iterations: differences.len(),
                ratio: last,
            });
        }
        log::warn!(
            "picard stopped after {} iterations above tolerance (last ratio {last:.3})",
            differences.len()
        );
    }
    let report = PicardReport {
        iterations: differences.len(),
        differences,
        ratios,
        converged,
        t0_estimate,
        exceeds_t0,
    };
    Ok((
        Trajectory {
            times: previous.iter().map(|s| s.time).collect(),
            states: previous,
        },
        report,
    ))
}
