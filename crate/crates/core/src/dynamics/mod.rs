//! Schrödinger and master-equation integration, steady states, and the
//! closed-form states they are checked against.

mod analytic;
mod integrate;
mod ode;
mod regimes;
mod sparse;

pub use analytic::{analytic_steady_state, closed_form_evolved_state};
pub use integrate::{
    evolve_master, evolve_pure, evolve_with, find_steady_state, propagate_exact, steady_state_with,
    Diagnostics, EvolutionResult, IntegratorConfig, LindbladGenerator, Method, SteadyStateResult,
    CHECK_INTERVAL, DRIFT_TOL, POSITIVITY_TOL, STEP_LIMIT,
};
pub use regimes::{compare_full_effective, RegimeComparison};

#[cfg(test)]
mod tests;
