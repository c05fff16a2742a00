//! Newton solver for the (regularized) dual entropy problem
//!
//! ```text
//! maximize  alpha . u - <eta_star(alpha . m)> - (gamma / 2) |alpha|^2
//! ```
//!
//! whose maximizer `alpha_hat_gamma(u)` satisfies `u = u_hat(alpha) + gamma alpha`.
//! With `gamma = 0` this is the original dual problem, solvable only for
//! realizable `u`.
//!
//! The iteration uses a two-tier stopping rule: return as soon as the
//! residual `|u_hat(alpha) + gamma alpha - u|` drops below `tau_desired`; once it
//! is below the acceptable tolerance `tau`, spend at most `ell_max` more
//! iterations trying to reach `tau_desired` before returning anyway.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::VelocityBasis;
use crate::entropy::{EntropyKind, EntropyModel};
use crate::error::{Error, Result};
use crate::kernel::{dual_arguments, symmetrize, MomentVector, MultiplierVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Regularization parameter; zero selects the original dual problem.
    pub gamma: f64,
    /// Acceptable residual tolerance.
    pub tau: f64,
    /// Desired residual tolerance, `0 < tau_desired < tau`.
    pub tau_desired: f64,
    /// Extra iterations allowed after reaching `tau`.
    pub ell_max: usize,
    /// Hard iteration cap.
    pub k_max: usize,
    /// Backtracking factor applied to the step length.
    pub ls_shrink: f64,
    /// Armijo sufficient-increase parameter.
    pub ls_slope: f64,
    /// Smallest step length tried before the line search gives up.
    pub min_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            tau: 1e-8,
            tau_desired: 1e-11,
            ell_max: 10,
            k_max: 200,
            ls_shrink: 0.5,
            ls_slope: 1e-4,
            min_step: 2f64.powi(-40),
        }
    }
}

impl SolverConfig {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be finite and nonnegative");
        }
        if !(self.tau > 0.0) {
            return bad("tau must be positive");
        }
        if !(self.tau_desired > 0.0 && self.tau_desired < self.tau) {
            return bad("tau_desired must lie in (0, tau)");
        }
        if !(self.ls_shrink > 0.0 && self.ls_shrink < 1.0) {
            return bad("ls_shrink must lie in (0, 1)");
        }
        if !(self.ls_slope > 0.0 && self.ls_slope <= 0.5) {
            return bad("ls_slope must lie in (0, 0.5]");
        }
        if !(self.min_step > 0.0 && self.min_step < 1.0) {
            return bad("min_step must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    DesiredTolerance,
    AcceptableTolerance,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolveReport {
    pub alpha: MultiplierVector,
    pub iterations: usize,
    /// `|u_hat(alpha) + gamma alpha - u|` at the returned multipliers.
    pub final_residual: f64,
    pub status: SolveStatus,
}

impl DualSolveReport {
    pub fn converged(&self) -> bool {
        self.status != SolveStatus::Failed
    }
}

/// `alpha . u - <eta_star(alpha . m)> - (gamma / 2) |alpha|^2`.
pub fn dual_objective(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
    u: &MomentVector,
    gamma: f64,
) -> Result<f64> {
    Ok(DualProblem::new(entropy, basis, u, gamma).evaluate(alpha)?.objective)
}

/// `u - u_hat(alpha) - gamma alpha`, the gradient of [`dual_objective`].
pub fn dual_gradient(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
    u: &MomentVector,
    gamma: f64,
) -> Result<DVector<f64>> {
    Ok(DualProblem::new(entropy, basis, u, gamma).evaluate(alpha)?.gradient)
}

/// Default starting multipliers: the isotropic state with the same density.
pub fn initial_guess(entropy: &EntropyModel, basis: &VelocityBasis, u: &MomentVector) -> MultiplierVector {
    let mut alpha = MultiplierVector::zeros(basis.len());
    alpha[0] = if u[0] > 0.0 {
        entropy.eta_prime(u[0] / basis.v_measure())
    } else {
        -1.0
    };
    alpha
}

/// Solves for `alpha_hat_gamma(u)` with `gamma = config.gamma`.
///
/// A failed solve is reported through [`SolveStatus::Failed`]; errors are
/// returned only for invalid input.
pub fn solve_dual(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    u: &MomentVector,
    config: &SolverConfig,
    warm_start: Option<&MultiplierVector>,
) -> Result<DualSolveReport> {
    config.validate()?;
    if u.len() != basis.len() {
        return Err(Error::InvalidArgument(format!(
            "moment vector has {} entries, basis has {}",
            u.len(),
            basis.len()
        )));
    }
    DualProblem::new(entropy, basis, u, config.gamma).solve(config, warm_start)
}

/// `alpha_hat_gamma(0)`; only defined for `gamma > 0`.
pub fn solve_dual_at_zero(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    config: &SolverConfig,
) -> Result<DualSolveReport> {
    if !(config.gamma > 0.0) {
        return Err(Error::InvalidArgument(
            "the zero moment vector needs gamma > 0".into(),
        ));
    }
    let zero = MomentVector::zeros(basis.len());
    solve_dual(entropy, basis, &zero, config, None)
}

/// State of the dual problem at one multiplier vector.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub alpha: MultiplierVector,
    pub objective: f64,
    /// `u - u_hat(alpha) - gamma alpha`.
    pub gradient: DVector<f64>,
    pub residual: f64,
    /// Absolute rounding scale of `objective`.
    pub noise: f64,
    dual_args: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Sufficient increase of the objective.
    Armijo,
    /// Full step taken because the predicted increase is below the rounding
    /// level of the objective, and the residual decreased.
    ResidualDecrease,
}

#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub step: f64,
    pub acceptance: Acceptance,
    pub next: Iterate,
}

/// The dual problem for one moment vector and regularization parameter.
#[derive(Debug, Clone, Copy)]
pub struct DualProblem<'a> {
    pub entropy: &'a EntropyModel,
    pub basis: &'a VelocityBasis,
    pub u: &'a MomentVector,
    pub gamma: f64,
}

impl<'a> DualProblem<'a> {
    pub fn new(
        entropy: &'a EntropyModel,
        basis: &'a VelocityBasis,
        u: &'a MomentVector,
        gamma: f64,
    ) -> Self {
        Self {
            entropy,
            basis,
            u,
            gamma,
        }
    }

    pub fn evaluate(&self, alpha: &MultiplierVector) -> Result<Iterate> {
        let dual_args = dual_arguments(self.entropy, self.basis, alpha)?;
        let mut density = Vec::with_capacity(dual_args.len());
        let mut potential = 0.0;
        let mut abs_potential = 0.0;
        for (&y, &w) in dual_args.iter().zip(self.basis.weights()) {
            let (star, star_prime) = match self.entropy.kind {
                EntropyKind::MaxwellBoltzmann => {
                    let e = y.exp();
                    (e, e)
                }
                _ => (self.entropy.eta_star(y), self.entropy.eta_star_prime(y)),
            };
            potential += w * star;
            abs_potential += w * star.abs();
            density.push(star_prime);
        }
        let uhat = self.basis.project(&density);
        let gradient = &self.u.0 - uhat - self.gamma * &alpha.0;
        let linear = alpha.dot(self.u);
        let penalty = 0.5 * self.gamma * alpha.norm_squared();
        let objective = linear - potential - penalty;
        let noise = f64::EPSILON * (linear.abs() + abs_potential + penalty);
        Ok(Iterate {
            alpha: alpha.clone(),
            objective,
            residual: gradient.norm(),
            gradient,
            noise,
            dual_args,
        })
    }

    /// `<m m^T eta_star''(alpha . m)> + gamma I` at an evaluated iterate.
    pub fn hessian(&self, it: &Iterate) -> DMatrix<f64> {
        let curvature: Vec<f64> = it
            .dual_args
            .iter()
            .map(|&y| self.entropy.eta_star_double_prime(y))
            .collect();
        let mut h = symmetrize(self.basis.weighted_gram(&curvature));
        for i in 0..h.nrows() {
            h[(i, i)] += self.gamma;
        }
        h
    }

    /// Newton direction `H^{-1} g`; falls back to a shifted factorization
    /// and finally to the gradient itself.
    pub fn newton_direction(&self, it: &Iterate) -> DVector<f64> {
        let h = self.hessian(it);
        if let Some(chol) = Cholesky::new(h.clone()) {
            return chol.solve(&it.gradient);
        }
        let shift = 1e-12 * h.trace();
        let mut shifted = h;
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += shift;
        }
        match Cholesky::new(shifted) {
            Some(chol) => chol.solve(&it.gradient),
            None => it.gradient.clone(),
        }
    }

    /// Backtracking line search along the ascent direction `dir`.
    ///
    /// Trial points outside the dual domain are treated like rejected steps.
    /// Returns `None` when the step length falls below `config.min_step`.
    pub fn line_search(
        &self,
        it: &Iterate,
        dir: &DVector<f64>,
        config: &SolverConfig,
    ) -> Option<LineSearchOutcome> {
        let slope = it.gradient.dot(dir);
        let roundoff_regime = config.ls_slope * slope <= 100.0 * it.noise;
        let mut step = 1.0;
        while step >= config.min_step {
            let trial = MultiplierVector(&it.alpha.0 + step * dir);
            if let Ok(next) = self.evaluate(&trial) {
                if next.objective >= it.objective + config.ls_slope * step * slope {
                    return Some(LineSearchOutcome {
                        step,
                        acceptance: Acceptance::Armijo,
                        next,
                    });
                }
                if step == 1.0 && roundoff_regime && next.residual < it.residual {
                    return Some(LineSearchOutcome {
                        step,
                        acceptance: Acceptance::ResidualDecrease,
                        next,
                    });
                }
            }
            step *= config.ls_shrink;
        }
        None
    }

    fn solve(
        &self,
        config: &SolverConfig,
        warm_start: Option<&MultiplierVector>,
    ) -> Result<DualSolveReport> {
        let default_guess = || initial_guess(self.entropy, self.basis, self.u);
        let mut current = match warm_start.map(|a| self.evaluate(a)) {
            Some(Ok(it)) if it.objective.is_finite() => it,
            _ => self.evaluate(&default_guess())?,
        };

        let report = |it: Iterate, iterations: usize, status: SolveStatus| DualSolveReport {
            final_residual: it.residual,
            alpha: it.alpha,
            iterations,
            status,
        };

        if self.gamma == 0.0 && !(self.u[0] > 0.0) {
            return Ok(report(current, 0, SolveStatus::Failed));
        }

        let mut k = 0;
        let mut extra = 0;
        let mut acceptable_reached = false;
        while k < config.k_max {
            let r = current.residual;
            if r < config.tau_desired {
                return Ok(report(current, k, SolveStatus::DesiredTolerance));
            }
            if r < config.tau && extra > config.ell_max {
                return Ok(report(current, k, SolveStatus::AcceptableTolerance));
            }
            if !acceptable_reached && r < config.tau {
                acceptable_reached = true;
            }
            let dir = self.newton_direction(&current);
            match self.line_search(&current, &dir, config) {
                Some(outcome) => current = outcome.next,
                None => break,
            }
            k += 1;
            if acceptable_reached {
                extra += 1;
            }
        }
        let status = if current.residual < config.tau_desired {
            SolveStatus::DesiredTolerance
        } else if current.residual < config.tau {
            SolveStatus::AcceptableTolerance
        } else {
            SolveStatus::Failed
        };
        Ok(report(current, k, status))
    }
}
