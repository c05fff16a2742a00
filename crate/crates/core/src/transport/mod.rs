//! Runge-Kutta discontinuous Galerkin solver for the slab moment systems on
//! the periodic unit interval.

pub mod dg;
pub mod grid;
pub mod initial;
pub mod metrics;
pub mod run;

pub use dg::{rk4_step, semidiscrete_rhs, DgOperator, SolveStats, WarmStart};
pub use grid::GridState;
pub use initial::build_initial_condition;
pub use metrics::{entropy_integral, error_metrics, observed_order, ErrorMetrics};
pub use run::{run_simulation, run_simulation_with, RunConfig, RunOutput};
