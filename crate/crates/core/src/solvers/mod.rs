//! Steady-state and time-evolution solvers.

mod evolution;
mod steady;

pub use evolution::{
    evolve_master, evolve_unitary, power_delta, propagate, propagate_series, rk4_step_delta,
    trace_distance, Rk4Propagator, Trajectory, STEP_FACTOR,
};
pub use steady::{
    steady_state, steady_state_with, SteadyMethod, SteadyStateResult, DEGENERACY_TOL,
    INVERSE_POWER_MAX_ITER, INVERSE_POWER_TOL,
};
