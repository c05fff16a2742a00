//! Entropy-based moment closures for slab-geometry linear kinetic equations,
//! their regularized variant, and the tools to measure how the regularized
//! solutions converge as the regularization parameter goes to zero.
//!
//! The crate is organized bottom-up:
//!
//! - [`entropy`], [`basis`], [`kernel`]: kinetic entropies, the Legendre
//!   velocity basis with its quadrature, and the ansatz/moment maps.
//! - [`dual`]: Newton solver for the (regularized) dual problem.
//! - [`closure`]: fluxes, sources, entropies, relative entropy, Jacobians.
//! - [`transport`]: RKDG discretization on the periodic unit interval,
//!   initial data, and error metrics between runs.
//! - [`sweep`]: regularization-parameter sweeps and table output.

pub mod basis;
pub mod closure;
pub mod dual;
pub mod entropy;
pub mod error;
pub mod kernel;
pub mod sweep;
pub mod transport;

pub use basis::VelocityBasis;
pub use closure::{ClosureContext, SourceForm};
pub use dual::{solve_dual, DualSolveReport, SolveStatus, SolverConfig};
pub use entropy::{EntropyKind, EntropyModel};
pub use error::{Error, Result};
pub use kernel::{MomentVector, MultiplierVector};
