//! One complete simulation: build the initial data, step to the final time
//! with a fixed CFL time step, and report solver statistics.

use serde::{Deserialize, Serialize};

use crate::basis::{default_quad_order, VelocityBasis};
use crate::closure::{ClosureContext, SourceForm};
use crate::dual::SolverConfig;
use crate::entropy::{EntropyKind, EntropyModel};
use crate::error::{Error, Result};
use crate::transport::dg::{DgOperator, SolveStats};
use crate::transport::grid::GridState;
use crate::transport::initial::build_initial_condition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub entropy: EntropyKind,
    /// Highest moment order; the system has `n + 1` components.
    pub n: usize,
    /// Amplitude of the initial anisotropy.
    pub m0: f64,
    pub sigma_s: f64,
    /// Regularization parameter; zero is the reference run.
    pub gamma: f64,
    pub n_cells: usize,
    pub dg_degree: usize,
    pub cfl: f64,
    pub final_time: f64,
    /// Velocity quadrature order; `None` picks the default for `n`.
    pub quad_order: Option<usize>,
    pub source_form: SourceForm,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            entropy: EntropyKind::MaxwellBoltzmann,
            n: 5,
            m0: 5.0,
            sigma_s: 1.0,
            gamma: 0.0,
            n_cells: 40,
            dg_degree: 3,
            cfl: 0.9,
            final_time: 0.1,
            quad_order: None,
            source_form: SourceForm::Regularized,
            solver: SolverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if self.n_cells < 4 {
            return bad(format!("need at least 4 cells, got {}", self.n_cells));
        }
        if !(self.m0 > 0.0) {
            return bad(format!("M0 must be positive, got {}", self.m0));
        }
        if !(self.sigma_s >= 0.0) {
            return bad(format!("sigma_s must be nonnegative, got {}", self.sigma_s));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be finite and nonnegative, got {}", self.gamma));
        }
        if let Some(q) = self.quad_order {
            if q < self.n + 1 {
                return bad(format!("quadrature order {q} is below N + 1 = {}", self.n + 1));
            }
        }
        self.solver.validate()
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order.unwrap_or_else(|| default_quad_order(self.n))
    }

    /// Closure context shared by every run of this configuration (it does
    /// not depend on `gamma`).
    pub fn context(&self) -> Result<ClosureContext> {
        Ok(ClosureContext::new(
            EntropyModel::new(self.entropy),
            VelocityBasis::new(self.n, self.quad_order())?,
            self.sigma_s,
        )
        .with_solver(self.solver)
        .with_source_form(self.source_form))
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Number of steps and the uniform step used before the last one.
    pub fn time_steps(&self) -> (usize, f64) {
        let dt = DgOperator::new(self.dg_degree).time_step(self.n_cells, self.cfl);
        let steps = (self.final_time / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (steps, dt)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: GridState,
    pub stats: SolveStats,
    pub steps: usize,
    pub dt: f64,
}

pub fn run_simulation(ctx: &ClosureContext, cfg: &RunConfig) -> Result<RunOutput> {
    run_simulation_with(ctx, cfg, |_| Ok(()))
}

/// Like [`run_simulation`], calling `observe` on the initial state and after
/// every step.
pub fn run_simulation_with<F>(ctx: &ClosureContext, cfg: &RunConfig, mut observe: F) -> Result<RunOutput>
where
    F: FnMut(&GridState) -> Result<()>,
{
    cfg.validate()?;
    if ctx.n_moments() != cfg.n + 1 {
        return Err(Error::GridMismatch(format!(
            "context has {} moments, configuration asks for {}",
            ctx.n_moments(),
            cfg.n + 1
        )));
    }
    let op = DgOperator::new(cfg.dg_degree);
    let mut state = build_initial_condition(ctx, cfg.m0, cfg.n_cells, cfg.dg_degree)?;
    observe(&state)?;
    let (steps, dt) = cfg.time_steps();
    let mut warm = op.warm_start(cfg.n_cells);
    let mut stats = SolveStats::default();
    for step in 0..steps {
        let h = if step + 1 == steps {
            cfg.final_time - state.time
        } else {
            dt
        };
        let (mut next, s) = op
            .rk4_step(ctx, &state, h, cfg.gamma, &mut warm)
            .map_err(|e| e.at(format!("gamma={:e}, step {step}", cfg.gamma)))?;
        if step + 1 == steps {
            next.time = cfg.final_time;
        }
        stats.merge(&s);
        state = next;
        observe(&state)?;
    }
    log::debug!(
        "gamma={:e}: {} steps, {} solves, {} iterations, worst residual {:e}",
        cfg.gamma,
        steps,
        stats.solves,
        stats.total_iterations,
        stats.worst_residual
    );
    Ok(RunOutput {
        state,
        stats,
        steps,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            n: 2,
            m0: 1.0,
            n_cells: 8,
            dg_degree: 1,
            final_time: 0.02,
            ..RunConfig::default()
        }
    }

    #[test]
    fn validation() {
        assert!(small().validate().is_ok());
        for bad in [
            RunConfig { final_time: 0.0, ..small() },
            RunConfig { cfl: 1.0, ..small() },
            RunConfig { n_cells: 3, ..small() },
            RunConfig { m0: -1.0, ..small() },
            RunConfig { quad_order: Some(2), ..small() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn lands_on_final_time() {
        let cfg = small();
        let (steps, dt) = cfg.time_steps();
        assert!((steps as f64 - 1.0) * dt < cfg.final_time && steps as f64 * dt >= cfg.final_time);
        let ctx = cfg.context().unwrap();
        let mut seen = 0;
        let out = run_simulation_with(&ctx, &cfg, |_| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(out.state.time, cfg.final_time);
        assert_eq!(seen, steps + 1);
        assert!(out.stats.solves > 0);
    }

    #[test]
    fn moment_count_must_match() {
        let cfg = small();
        let ctx = RunConfig { n: 3, ..cfg }.context().unwrap();
        assert!(matches!(run_simulation(&ctx, &cfg), Err(Error::GridMismatch(_))));
    }
}
