//! Moment-level closure quantities for the slab-geometry moment system:
//! fluxes, scattering source, entropies and relative entropy, and the flux
//! Jacobian.
//!
//! Every operation takes the regularization parameter explicitly; `gamma = 0`
//! gives the original (unregularized) closure.

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::basis::VelocityBasis;
use crate::dual::{solve_dual, DualSolveReport, SolveStatus, SolverConfig};
use crate::entropy::EntropyModel;
use crate::error::{Error, Result};
use crate::kernel::{
    ansatz_density, ansatz_entropy, dual_arguments, moments_of_multiplier, symmetrize, MomentVector,
    MultiplierVector,
};

/// Relative entropies this far below zero are treated as rounding and clamped.
pub const RELATIVE_ENTROPY_ROUNDOFF: f64 = 1e-12;

/// Which moment vector the scattering source acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SourceForm {
    /// `sigma_s R u_hat(alpha_hat_gamma(u))`, the moments of the collision
    /// operator applied to the regularized ansatz.
    #[default]
    Regularized,
    /// `sigma_s R u`.
    Original,
}

impl std::str::FromStr for SourceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regularized" => Ok(SourceForm::Regularized),
            "original" => Ok(SourceForm::Original),
            other => Err(Error::InvalidArgument(format!("unknown source form '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosureContext {
    pub entropy: EntropyModel,
    pub basis: VelocityBasis,
    /// Tolerances for every dual solve; its `gamma` field is ignored in favour
    /// of the explicit argument of each operation.
    pub solver: SolverConfig,
    pub sigma_s: f64,
    pub source_form: SourceForm,
}

/// Closure data at a single moment vector.
#[derive(Debug, Clone)]
pub struct PointClosure {
    pub report: DualSolveReport,
    /// `u_hat(alpha_hat_gamma(u))`.
    pub realized: MomentVector,
    pub flux: MomentVector,
    pub source: MomentVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizabilityProbe {
    pub realizable: bool,
    pub multiplier_norm: Option<f64>,
}

impl ClosureContext {
    pub fn new(entropy: EntropyModel, basis: VelocityBasis, sigma_s: f64) -> Self {
        Self {
            entropy,
            basis,
            solver: SolverConfig::default(),
            sigma_s,
            source_form: SourceForm::default(),
        }
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_source_form(mut self, form: SourceForm) -> Self {
        self.source_form = form;
        self
    }

    pub fn n_moments(&self) -> usize {
        self.basis.len()
    }

    /// Diagonal of `R = diag(0, -1, ..., -1)`.
    pub fn r_diagonal(&self) -> Vec<f64> {
        (0..self.n_moments())
            .map(|i| if i == 0 { 0.0 } else { -1.0 })
            .collect()
    }

    pub fn r_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.r_diagonal()))
    }

    fn config(&self, gamma: f64) -> SolverConfig {
        self.solver.with_gamma(gamma)
    }

    /// Full dual-solve report, whatever its status.
    pub fn solve_report(
        &self,
        u: &MomentVector,
        gamma: f64,
        warm_start: Option<&MultiplierVector>,
    ) -> Result<DualSolveReport> {
        solve_dual(&self.entropy, &self.basis, u, &self.config(gamma), warm_start)
    }

    /// `alpha_hat_gamma(u)`; a failed solve becomes [`Error::ClosureFailure`].
    pub fn multipliers(
        &self,
        u: &MomentVector,
        gamma: f64,
        warm_start: Option<&MultiplierVector>,
    ) -> Result<DualSolveReport> {
        let report = self.solve_report(u, gamma, warm_start)?;
        if report.status == SolveStatus::Failed {
            return Err(Error::ClosureFailure {
                location: String::new(),
                report: Box::new(report),
            });
        }
        Ok(report)
    }

    /// Dual solve plus flux and source at one moment vector.
    pub fn evaluate(
        &self,
        u: &MomentVector,
        gamma: f64,
        warm_start: Option<&MultiplierVector>,
    ) -> Result<PointClosure> {
        let report = self.multipliers(u, gamma, warm_start)?;
        let g = ansatz_density(&self.entropy, &self.basis, &report.alpha)?;
        let realized = MomentVector(self.basis.project(&g));
        let flux = MomentVector(self.basis.project_velocity_weighted(&g));
        let source = self.source_from(u, &realized);
        Ok(PointClosure {
            report,
            realized,
            flux,
            source,
        })
    }

    fn source_from(&self, u: &MomentVector, realized: &MomentVector) -> MomentVector {
        let base = match self.source_form {
            SourceForm::Regularized => realized,
            SourceForm::Original => u,
        };
        let mut s = MomentVector::zeros(base.len());
        for i in 1..base.len() {
            s[i] = -self.sigma_s * base[i];
        }
        s
    }

    /// `f_gamma(u) = <v m G_{alpha_hat_gamma(u)}>`.
    pub fn flux(&self, u: &MomentVector, gamma: f64) -> Result<MomentVector> {
        Ok(self.evaluate(u, gamma, None)?.flux)
    }

    /// `r_gamma(u)`, scattering source.
    pub fn source(&self, u: &MomentVector, gamma: f64) -> Result<MomentVector> {
        match self.source_form {
            SourceForm::Original => Ok(self.source_from(u, u)),
            SourceForm::Regularized => Ok(self.evaluate(u, gamma, None)?.source),
        }
    }

    /// `u_hat(alpha_hat_gamma(u))`, the realizable moment vector the closure uses.
    pub fn realized_moments(&self, u: &MomentVector, gamma: f64) -> Result<MomentVector> {
        let report = self.multipliers(u, gamma, None)?;
        moments_of_multiplier(&self.entropy, &self.basis, &report.alpha)
    }

    /// `h_gamma(u) = <eta(G)> + |<m G> - u|^2 / (2 gamma)`; `h(u)` at `gamma = 0`.
    pub fn entropy_h(&self, u: &MomentVector, gamma: f64) -> Result<f64> {
        let report = self.multipliers(u, gamma, None)?;
        let kinetic = ansatz_entropy(&self.entropy, &self.basis, &report.alpha)?;
        if gamma == 0.0 {
            return Ok(kinetic);
        }
        let realized = moments_of_multiplier(&self.entropy, &self.basis, &report.alpha)?;
        Ok(kinetic + (&realized.0 - &u.0).norm_squared() / (2.0 * gamma))
    }

    /// `h(u_hat(alpha_hat_gamma(u))) + (gamma / 2) |alpha_hat_gamma(u)|^2`, the
    /// multiplier form of `h_gamma`.
    pub fn entropy_h_multiplier_form(&self, u: &MomentVector, gamma: f64) -> Result<f64> {
        let report = self.multipliers(u, gamma, None)?;
        let kinetic = ansatz_entropy(&self.entropy, &self.basis, &report.alpha)?;
        Ok(kinetic + 0.5 * gamma * report.alpha.norm_squared())
    }

    /// `j_gamma(u) = <v eta(G_{alpha_hat_gamma(u)})>`.
    pub fn entropy_flux_j(&self, u: &MomentVector, gamma: f64) -> Result<f64> {
        let report = self.multipliers(u, gamma, None)?;
        let y = dual_arguments(&self.entropy, &self.basis, &report.alpha)?;
        let eta: Vec<f64> = y.iter().map(|&yq| self.entropy.eta_of_dual(yq)).collect();
        Ok(self.basis.integrate_velocity_weighted(&eta))
    }

    /// `h_gamma(u_reg | u_ref)` evaluated kinetically:
    /// `<eta(G_a | G_b)> + (gamma / 2) |a - b|^2` with `a = alpha_hat_gamma(u_reg)`,
    /// `b = alpha_hat_gamma(u_ref)`.
    pub fn relative_entropy(
        &self,
        u_reg: &MomentVector,
        u_ref: &MomentVector,
        gamma: f64,
    ) -> Result<f64> {
        let b = self.multipliers(u_ref, gamma, None)?.alpha;
        let a = self.multipliers(u_reg, gamma, Some(&b))?.alpha;
        self.relative_entropy_of_multipliers(&a, &b, gamma)
    }

    /// Kinetic relative entropy for already solved multipliers.
    pub fn relative_entropy_of_multipliers(
        &self,
        a: &MultiplierVector,
        b: &MultiplierVector,
        gamma: f64,
    ) -> Result<f64> {
        let ya = dual_arguments(&self.entropy, &self.basis, a)?;
        let yb = dual_arguments(&self.entropy, &self.basis, b)?;
        let pointwise: Vec<f64> = ya
            .iter()
            .zip(&yb)
            .map(|(&p, &q)| self.entropy.relative_density_entropy(p, q))
            .collect();
        let value = self.basis.integrate(&pointwise) + 0.5 * gamma * (&a.0 - &b.0).norm_squared();
        clamp_relative_entropy(value)
    }

    /// `h_gamma(u_reg) - h_gamma(u_ref) - alpha_hat_gamma(u_ref) . (u_reg - u_ref)`.
    ///
    /// Suffers cancellation for nearby arguments; kept as a cross-check of
    /// [`Self::relative_entropy`].
    pub fn relative_entropy_moment_form(
        &self,
        u_reg: &MomentVector,
        u_ref: &MomentVector,
        gamma: f64,
    ) -> Result<f64> {
        let b = self.multipliers(u_ref, gamma, None)?.alpha;
        Ok(self.entropy_h(u_reg, gamma)? - self.entropy_h(u_ref, gamma)?
            - b.dot(&(&u_reg.0 - &u_ref.0)))
    }

    /// `f_gamma'(u) = <v m m^T eta_star''> (<m m^T eta_star''> + gamma I)^{-1}`.
    pub fn flux_jacobian(&self, u: &MomentVector, gamma: f64) -> Result<DMatrix<f64>> {
        let report = self.multipliers(u, gamma, None)?;
        let (a, h) = self.jacobian_blocks(&report.alpha, gamma)?;
        // X = A H^{-1}  <=>  H X^T = A^T = A
        let chol = Cholesky::new(h).ok_or_else(|| {
            Error::InvalidArgument("regularized dual Hessian is not positive definite".into())
        })?;
        Ok(chol.solve(&a).transpose())
    }

    /// `(<v m m^T eta_star''>, <m m^T eta_star''> + gamma I)` at `alpha`.
    pub fn jacobian_blocks(
        &self,
        alpha: &MultiplierVector,
        gamma: f64,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let y = dual_arguments(&self.entropy, &self.basis, alpha)?;
        let curv: Vec<f64> = y.iter().map(|&yq| self.entropy.eta_star_double_prime(yq)).collect();
        let a = symmetrize(self.basis.velocity_weighted_gram(&curv));
        let mut h = symmetrize(self.basis.weighted_gram(&curv));
        for i in 0..h.nrows() {
            h[(i, i)] += gamma;
        }
        Ok((a, h))
    }

    /// Attempts the original (`gamma = 0`) dual solve.
    pub fn realizability_probe(&self, u: &MomentVector) -> RealizabilityProbe {
        if !(u[0] > 0.0) {
            return RealizabilityProbe {
                realizable: false,
                multiplier_norm: None,
            };
        }
        match self.solve_report(u, 0.0, None) {
            Ok(rep) if rep.converged() => RealizabilityProbe {
                realizable: true,
                multiplier_norm: Some(rep.alpha.norm()),
            },
            _ => RealizabilityProbe {
                realizable: false,
                multiplier_norm: None,
            },
        }
    }
}

fn clamp_relative_entropy(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -RELATIVE_ENTROPY_ROUNDOFF {
        log::debug!("clamping relative entropy {value:e} to zero");
        Ok(0.0)
    } else {
        Err(Error::NegativeRelativeEntropy(value))
    }
}
