//! Time integration: the exact linear propagator, the IMEX integrating-factor
//! stepper and the Picard successive-approximation solver.

mod imex;
mod picard;
mod propagator;

pub use imex::{
    imex_integrate, imex_step, ImexStepper, IntegrationOptions, Monitor, NonlinearMode,
    OVERFLOW_GUARD,
};
pub use picard::{
    estimate_t0, low_pass_state, picard_solve, truncate_initial_data, PicardConfig, PicardReport,
};
pub use propagator::{symmetric_2x2_exp, LinearPropagator};

use crate::dynamics::MMPState;

/// States on a uniform time grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MMPState>,
}

impl Trajectory {
    pub fn push(&mut self, state: MMPState) {
        self.times.push(state.time);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> Option<&MMPState> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&MMPState> {
        self.states.last()
    }
}
