//! Errors between a regularized and a reference run, measured in the
//! integrated relative entropy and in discrete L2 / Linf norms, plus the
//! observed convergence order in the regularization parameter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{gauss_legendre, legendre_values_into};
use crate::closure::ClosureContext;
use crate::error::{Error, Result};
use crate::kernel::MultiplierVector;
use crate::transport::grid::GridState;

/// Gauss points per subinterval.
pub const METRIC_GAUSS_POINTS: usize = 8;
/// Subintervals per cell.
pub const METRIC_SUBINTERVALS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `int_X h_gamma(u_gamma | u) dx`.
    pub h_gamma: f64,
    /// `(int_X |u_gamma - u|^2 dx)^{1/2}`.
    pub l2: f64,
    /// Largest `|u_gamma,i - u_i|` over all quadrature points and components.
    pub linf: f64,
}

/// Reference coordinates and weights (in units of the cell width) of the
/// composite rule: `METRIC_GAUSS_POINTS` Gauss points on each of
/// `METRIC_SUBINTERVALS` equal subintervals.
pub fn cell_quadrature() -> Vec<(f64, f64)> {
    let (nodes, weights) = gauss_legendre(METRIC_GAUSS_POINTS);
    let sub = METRIC_SUBINTERVALS as f64;
    let mut out = Vec::with_capacity(METRIC_GAUSS_POINTS * METRIC_SUBINTERVALS);
    for s in 0..METRIC_SUBINTERVALS {
        let lo = -1.0 + 2.0 * s as f64 / sub;
        let half = 1.0 / sub;
        for (&x, &w) in nodes.iter().zip(&weights) {
            // xi in [lo, lo + 2/sub]; dx = h/2 dxi = h/(2 sub) dx_ref
            out.push((lo + half * (x + 1.0), 0.5 * w / sub));
        }
    }
    out
}

pub fn error_metrics(
    ctx: &ClosureContext,
    state_reg: &GridState,
    state_ref: &GridState,
    gamma: f64,
) -> Result<ErrorMetrics> {
    if !state_reg.same_shape(state_ref) {
        return Err(Error::GridMismatch(format!(
            "({} cells, degree {}, {} moments) vs ({} cells, degree {}, {} moments)",
            state_reg.n_cells(),
            state_reg.degree(),
            state_reg.n_moments(),
            state_ref.n_cells(),
            state_ref.degree(),
            state_ref.n_moments()
        )));
    }
    if (state_reg.time - state_ref.time).abs() > 1e-12 * (1.0 + state_ref.time.abs()) {
        return Err(Error::GridMismatch(format!(
            "states at different times {} and {}",
            state_reg.time, state_ref.time
        )));
    }
    let quad = cell_quadrature();
    let modes: Vec<Vec<f64>> = quad
        .iter()
        .map(|&(xi, _)| {
            let mut p = vec![0.0; state_ref.n_modes()];
            legendre_values_into(xi, &mut p);
            p
        })
        .collect();
    let h = state_ref.cell_width();

    let per_cell: Vec<(f64, f64, f64)> = (0..state_ref.n_cells())
        .into_par_iter()
        .map(|c| {
            let mut rel = 0.0;
            let mut sq = 0.0;
            let mut max = 0.0f64;
            let mut warm: Option<MultiplierVector> = None;
            for (q, &(_, w)) in quad.iter().enumerate() {
                let u_reg = state_reg.eval_with_modes(c, &modes[q]);
                let u_ref = state_ref.eval_with_modes(c, &modes[q]);
                let diff = &u_reg.0 - &u_ref.0;
                sq += w * h * diff.norm_squared();
                max = max.max(diff.amax());
                let loc = |what: &str| format!("cell {c}, metric node {q}, {what} state");
                let b = ctx
                    .multipliers(&u_ref, gamma, warm.as_ref())
                    .map_err(|e| e.at(loc("reference")))?
                    .alpha;
                let a = ctx
                    .multipliers(&u_reg, gamma, Some(&b))
                    .map_err(|e| e.at(loc("regularized")))?
                    .alpha;
                rel += w * h * ctx.relative_entropy_of_multipliers(&a, &b, gamma)?;
                warm = Some(b);
            }
            Ok((rel, sq, max))
        })
        .collect::<Result<_>>()?;

    let mut out = ErrorMetrics {
        h_gamma: 0.0,
        l2: 0.0,
        linf: 0.0,
    };
    for (rel, sq, max) in per_cell {
        out.h_gamma += rel;
        out.l2 += sq;
        out.linf = out.linf.max(max);
    }
    out.l2 = out.l2.sqrt();
    Ok(out)
}

/// `int_X h_gamma(u) dx` with the same composite rule as [`error_metrics`].
pub fn entropy_integral(ctx: &ClosureContext, state: &GridState, gamma: f64) -> Result<f64> {
    let quad = cell_quadrature();
    let h = state.cell_width();
    let per_cell: Vec<f64> = (0..state.n_cells())
        .into_par_iter()
        .map(|c| {
            let mut acc = 0.0;
            for &(xi, w) in &quad {
                let u = state.eval(c, xi);
                acc += w * h * ctx.entropy_h(&u, gamma).map_err(|e| e.at(format!("cell {c}")))?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(per_cell.iter().sum())
}

/// Observed orders `nu = log(m1 / m2) / log(g1 / g2)` between consecutive
/// `(gamma, metric)` pairs; `None` where either metric is not positive.
pub fn observed_order(values: &[(f64, f64)]) -> Result<Vec<Option<f64>>> {
    values
        .windows(2)
        .map(|w| {
            let ((g1, m1), (g2, m2)) = (w[0], w[1]);
            if !(g2 < g1) || !(g2 > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "gamma values must be positive and strictly decreasing ({g1} then {g2})"
                )));
            }
            Ok(if m1 > 0.0 && m2 > 0.0 && m1.is_finite() && m2.is_finite() {
                Some((m1 / m2).ln() / (g1 / g2).ln())
            } else {
                None
            })
        })
        .collect()
}
