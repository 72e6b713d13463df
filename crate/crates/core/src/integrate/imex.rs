use super::propagator::LinearPropagator;
use super::Trajectory;
use crate::dynamics::{nonlinear_terms, MMPParams, MMPState, Tendency};
use crate::error::{Error, Result};
use crate::lp::{self, DyadicProfile};
use crate::monitors::{DiagnosticsConfig, DiagnosticsRecord, DiagnosticsSeries, GridSummary};

/// Any field L² norm above this aborts the step.
pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NonlinearMode {
    #[default]
    Enabled,
    /// Linear dynamics only; the step reduces to the exact exponential.
    Disabled,
}

/// Second-order integrating-factor Runge-Kutta (Heun) step with a fixed `dt`.
#[derive(Clone, Debug)]
pub struct ImexStepper {
    propagator: LinearPropagator,
    nonlinear: NonlinearMode,
}

impl ImexStepper {
    pub fn new(grid: &crate::spectral::Grid, params: &MMPParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            propagator: LinearPropagator::new(grid, params, dt)?,
            nonlinear: NonlinearMode::Enabled,
        })
    }

    pub fn with_nonlinear(mut self, mode: NonlinearMode) -> Self {
        self.nonlinear = mode;
        self
    }

    pub fn dt(&self) -> f64 {
        self.propagator.dt()
    }

    fn tendency(&self, state: &MMPState) -> Result<Tendency> {
        match self.nonlinear {
            NonlinearMode::Enabled => nonlinear_terms(state),
            NonlinearMode::Disabled => Ok(Tendency::zeros(state.grid())),
        }
    }

    /// `v* = E(v + dt N(v))`, `v' = E(v + dt/2 N(v)) + dt/2 N(v*)`.
    pub fn step(&self, state: &MMPState) -> Result<MMPState> {
        state.ensure_consistent()?;
        let dt = self.dt();
        let n0 = self.tendency(state)?;
        let shifted = |a: f64, t: &Tendency| MMPState {
            u: state.u.axpy(a, &t.du).expect("same grid"),
            omega: state.omega.axpy(a, &t.domega).expect("same grid"),
            b: state.b.axpy(a, &t.db).expect("same grid"),
            time: state.time,
        };
        let next = match self.nonlinear {
            NonlinearMode::Disabled => self.propagator.apply(state)?,
            NonlinearMode::Enabled => {
                let predictor = self.propagator.apply(&shifted(dt, &n0))?;
                let n1 = self.tendency(&predictor)?;
                let mut next = self.propagator.apply(&shifted(0.5 * dt, &n0))?;
                next.u.axpy_in_place(0.5 * dt, &n1.du);
                next.omega.axpy_in_place(0.5 * dt, &n1.domega);
                next.b.axpy_in_place(0.5 * dt, &n1.db);
                next
            }
        };
        let mut next = next;
        next.project();
        next.time = state.time + dt;
        guard(&next)?;
        Ok(next)
    }
}

pub(crate) fn guard(state: &MMPState) -> Result<()> {
    let norm = state
        .fields()
        .iter()
        .map(|f| f.l2_norm())
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    if !(norm <= OVERFLOW_GUARD) {
        return Err(Error::Instability {
            time: state.time,
            norm,
        });
    }
    Ok(())
}

/// One step with a freshly built propagator.
pub fn imex_step(state: &MMPState, params: &MMPParams, dt: f64) -> Result<MMPState> {
    ImexStepper::new(state.grid(), params, dt)?.step(state)
}

/// Observer invoked by [`imex_integrate`] on fully materialized states.
pub trait Monitor {
    /// Called at every diagnostics node with the record just computed.
    fn on_record(&mut self, state: &MMPState, record: &DiagnosticsRecord) -> Result<()>;

    /// Called after every accepted step (and once for the initial state).
    fn on_step(&mut self, _state: &MMPState) -> Result<()> {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationOptions {
    /// Steps between diagnostics records; the final state is always recorded.
    pub cadence: usize,
    /// Steps between stored trajectory states; 0 keeps only the endpoints.
    pub snapshot_stride: usize,
    pub diagnostics: DiagnosticsConfig,
    pub nonlinear: NonlinearMode,
    /// Advective Courant number above which a warning is logged.
    pub cfl_warning: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            cadence: 10,
            snapshot_stride: 0,
            diagnostics: DiagnosticsConfig::default(),
            nonlinear: NonlinearMode::Enabled,
            cfl_warning: 1.0,
        }
    }
}

/// Number of steps of size `dt` spanning `duration`.
pub(crate) fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidParameter(format!("T must be nonnegative, got {duration}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let m = (duration / dt).round();
    if (m * dt - duration).abs() > 1e-9 * duration.max(dt) {
        return Err(Error::InvalidParameter(format!(
            "T = {duration} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(m as usize)
}

/// Fixed-step integration over `duration` starting at `state.time`.
pub fn imex_integrate(
    state: &MMPState,
    params: &MMPParams,
    duration: f64,
    dt: f64,
    options: &IntegrationOptions,
    monitors: &mut [&mut dyn Monitor],
) -> Result<(Trajectory, DiagnosticsSeries)> {
    state.ensure_consistent()?;
    params.validate()?;
    let steps = step_count(duration, dt)?;
    let cadence = options.cadence.max(1);
    let grid = state.grid().clone();
    let profile = DyadicProfile::new(&grid);
    let stepper = ImexStepper::new(&grid, params, dt)?.with_nonlinear(options.nonlinear);
    let mut series = DiagnosticsSeries::new(*params, GridSummary::new(&grid, &profile));
    let mut trajectory = Trajectory::default();
    let t0 = state.time;
    let mut current = state.clone();
    let mut warned = false;

    let mut observe = |s: &MMPState, m: usize, series: &mut DiagnosticsSeries, monitors: &mut [&mut dyn Monitor]| -> Result<()> {
        for mon in monitors.iter_mut() {
            mon.on_step(s)?;
        }
        if m % cadence == 0 || m == steps {
            let record = DiagnosticsRecord::compute(s, &profile, &options.diagnostics)?;
            if !warned && options.nonlinear == NonlinearMode::Enabled {
                let umax = lp::sup_norm(&s.u)?.max(lp::sup_norm(&s.b)?);
                let courant = dt * umax / grid.spacing();
                if courant > options.cfl_warning {
                    log::warn!("advective Courant number {courant:.3} at t = {} exceeds {}", s.time, options.cfl_warning);
                    warned = true;
                }
            }
            for mon in monitors.iter_mut() {
                mon.on_record(s, &record)?;
            }
            series.push(record)?;
        }
        Ok(())
    };

    observe(&current, 0, &mut series, monitors)?;
    trajectory.push(current.clone());
    for m in 1..=steps {
        let mut next = stepper.step(&current)?;
        next.time = t0 + m as f64 * dt;
        current = next;
        observe(&current, m, &mut series, monitors)?;
        let keep = if options.snapshot_stride == 0 {
            m == steps
        } else {
            m % options.snapshot_stride == 0 || m == steps
        };
        if keep {
            trajectory.push(current.clone());
        }
    }
    Ok((trajectory, series))
}
