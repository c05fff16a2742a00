//! Modal discontinuous Galerkin discretization of
//! `u_t + f_gamma(u)_x = r_gamma(u)` on the periodic unit interval, with a
//! local Lax-Friedrichs interface flux and classical RK4 in time.
//!
//! In cell `c` with width `h` and Legendre modes `P_j(xi)`, the modal
//! coefficients evolve as
//!
//! ```text
//! h/(2j+1) dc_j/dt = int f P_j' dxi - (F_{c+1/2} - (-1)^j F_{c-1/2})
//!                    + h/2 int r P_j dxi
//! ```
//!
//! with `(k+1)`-point Gauss quadrature for both volume integrals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{gauss_legendre, legendre_derivatives_into, legendre_values_into};
use crate::closure::ClosureContext;
use crate::dual::SolveStatus;
use crate::error::{Error, Result};
use crate::kernel::{MomentVector, MultiplierVector};
use crate::transport::grid::GridState;

/// Dissipation speed of the Lax-Friedrichs flux; bounds every characteristic
/// speed since `|v| <= 1`.
pub const LAX_FRIEDRICHS_SPEED: f64 = 1.0;

/// Dual-solver statistics accumulated over closure evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub solves: u64,
    pub total_iterations: u64,
    pub worst_residual: f64,
    /// Solves that met only the acceptable tolerance.
    pub acceptable_only: u64,
}

impl SolveStats {
    pub fn record(&mut self, iterations: usize, residual: f64, status: SolveStatus) {
        self.solves += 1;
        self.total_iterations += iterations as u64;
        self.worst_residual = self.worst_residual.max(residual);
        if status == SolveStatus::AcceptableTolerance {
            self.acceptable_only += 1;
        }
    }

    pub fn merge(&mut self, other: &SolveStats) {
        self.solves += other.solves;
        self.total_iterations += other.total_iterations;
        self.worst_residual = self.worst_residual.max(other.worst_residual);
        self.acceptable_only += other.acceptable_only;
    }
}

/// Last multipliers computed at each closure point, reused as Newton starting
/// points for the next stage.
#[derive(Debug, Clone)]
pub struct WarmStart {
    cells: Vec<CellWarmStart>,
}

#[derive(Debug, Clone)]
struct CellWarmStart {
    volume: Vec<Option<MultiplierVector>>,
    left: Option<MultiplierVector>,
    right: Option<MultiplierVector>,
}

impl WarmStart {
    pub fn new(n_cells: usize, n_volume_nodes: usize) -> Self {
        Self {
            cells: vec![
                CellWarmStart {
                    volume: vec![None; n_volume_nodes],
                    left: None,
                    right: None,
                };
                n_cells
            ],
        }
    }
}

struct CellEval {
    volume_flux: Vec<MomentVector>,
    volume_source: Vec<MomentVector>,
    left_u: MomentVector,
    left_flux: MomentVector,
    right_u: MomentVector,
    right_flux: MomentVector,
    stats: SolveStats,
}

/// DG spatial operator for a fixed polynomial degree.
#[derive(Debug, Clone)]
pub struct DgOperator {
    degree: usize,
    weights: Vec<f64>,
    /// `P_j(xi_q)`, indexed `[q][j]`.
    modes: Vec<Vec<f64>>,
    /// `P_j'(xi_q)`, indexed `[q][j]`.
    mode_derivs: Vec<Vec<f64>>,
    left_modes: Vec<f64>,
    right_modes: Vec<f64>,
}

impl DgOperator {
    pub fn new(degree: usize) -> Self {
        let (nodes, weights) = gauss_legendre(degree + 1);
        let n_modes = degree + 1;
        let tab = |f: fn(f64, &mut [f64]), x: f64| {
            let mut v = vec![0.0; n_modes];
            f(x, &mut v);
            v
        };
        Self {
            degree,
            modes: nodes.iter().map(|&x| tab(legendre_values_into, x)).collect(),
            mode_derivs: nodes.iter().map(|&x| tab(legendre_derivatives_into, x)).collect(),
            weights,
            left_modes: tab(legendre_values_into, -1.0),
            right_modes: tab(legendre_values_into, 1.0),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_volume_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn warm_start(&self, n_cells: usize) -> WarmStart {
        WarmStart::new(n_cells, self.n_volume_nodes())
    }

    /// Largest stable step for the given CFL number: `cfl h / (2k + 1)`.
    pub fn time_step(&self, n_cells: usize, cfl: f64) -> f64 {
        cfl / (n_cells as f64 * (2 * self.degree + 1) as f64)
    }

    fn eval_cell(
        &self,
        ctx: &ClosureContext,
        state: &GridState,
        cell: usize,
        gamma: f64,
        warm: &mut CellWarmStart,
    ) -> Result<CellEval> {
        let mut stats = SolveStats::default();
        let mut volume_flux = Vec::with_capacity(self.n_volume_nodes());
        let mut volume_source = Vec::with_capacity(self.n_volume_nodes());
        for (q, modes) in self.modes.iter().enumerate() {
            let u = state.eval_with_modes(cell, modes);
            let pc = ctx
                .evaluate(&u, gamma, warm.volume[q].as_ref())
                .map_err(|e| e.at(format!("cell {cell}, volume node {q}")))?;
            stats.record(pc.report.iterations, pc.report.final_residual, pc.report.status);
            warm.volume[q] = Some(pc.report.alpha);
            volume_flux.push(pc.flux);
            volume_source.push(pc.source);
        }
        let mut trace = |modes: &[f64], slot: &mut Option<MultiplierVector>, side: &str| {
            let u = state.eval_with_modes(cell, modes);
            let pc = ctx
                .evaluate(&u, gamma, slot.as_ref())
                .map_err(|e| e.at(format!("cell {cell}, {side} trace")))?;
            stats.record(pc.report.iterations, pc.report.final_residual, pc.report.status);
            *slot = Some(pc.report.alpha);
            Ok::<_, Error>((u, pc.flux))
        };
        let (left_u, left_flux) = trace(&self.left_modes, &mut warm.left, "left")?;
        let (right_u, right_flux) = trace(&self.right_modes, &mut warm.right, "right")?;
        Ok(CellEval {
            volume_flux,
            volume_source,
            left_u,
            left_flux,
            right_u,
            right_flux,
            stats,
        })
    }

    /// Semi-discrete tendency `du/dt` of every modal coefficient.
    pub fn rhs(
        &self,
        ctx: &ClosureContext,
        state: &GridState,
        gamma: f64,
        warm: &mut WarmStart,
    ) -> Result<(GridState, SolveStats)> {
        if state.degree() != self.degree {
            return Err(Error::GridMismatch(format!(
                "state has degree {}, operator {}",
                state.degree(),
                self.degree
            )));
        }
        if state.n_moments() != ctx.n_moments() {
            return Err(Error::GridMismatch(format!(
                "state has {} moments, closure {}",
                state.n_moments(),
                ctx.n_moments()
            )));
        }
        let n_cells = state.n_cells();
        if warm.cells.len() != n_cells {
            *warm = self.warm_start(n_cells);
        }
        let evals: Vec<CellEval> = warm
            .cells
            .par_iter_mut()
            .enumerate()
            .map(|(c, w)| self.eval_cell(ctx, state, c, gamma, w))
            .collect::<Result<_>>()?;

        let n_mom = state.n_moments();
        // interface_flux[c] is the numerical flux at the right edge of cell c.
        let interface_flux: Vec<Vec<f64>> = (0..n_cells)
            .map(|c| {
                let minus = &evals[c];
                let plus = &evals[(c + 1) % n_cells];
                (0..n_mom)
                    .map(|m| {
                        0.5 * (minus.right_flux[m] + plus.left_flux[m])
                            - 0.5 * LAX_FRIEDRICHS_SPEED * (plus.left_u[m] - minus.right_u[m])
                    })
                    .collect()
            })
            .collect();

        let h = state.cell_width();
        let mut out = GridState::zeros(n_cells, self.degree, n_mom);
        out.time = state.time;
        let mut stats = SolveStats::default();
        for (c, ev) in evals.iter().enumerate() {
            stats.merge(&ev.stats);
            let right = &interface_flux[c];
            let left = &interface_flux[(c + n_cells - 1) % n_cells];
            for j in 0..=self.degree {
                let scale = (2 * j + 1) as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                for m in 0..n_mom {
                    let mut volume = 0.0;
                    let mut source = 0.0;
                    for q in 0..self.n_volume_nodes() {
                        let w = self.weights[q];
                        volume += w * ev.volume_flux[q][m] * self.mode_derivs[q][j];
                        source += w * ev.volume_source[q][m] * self.modes[q][j];
                    }
                    let surface = right[m] - sign * left[m];
                    out.set(c, j, m, scale / h * (volume - surface) + 0.5 * scale * source);
                }
            }
        }
        Ok((out, stats))
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn rk4_step(
        &self,
        ctx: &ClosureContext,
        state: &GridState,
        dt: f64,
        gamma: f64,
        warm: &mut WarmStart,
    ) -> Result<(GridState, SolveStats)> {
        let mut stats = SolveStats::default();
        let stage = |s: usize, st: &GridState, warm: &mut WarmStart, stats: &mut SolveStats| {
            let (k, st_stats) = self
                .rhs(ctx, st, gamma, warm)
                .map_err(|e| e.at(format!("stage {s}, t={:e}", st.time)))?;
            stats.merge(&st_stats);
            Ok::<_, Error>(k)
        };
        let k1 = stage(1, state, warm, &mut stats)?;
        let mut s2 = state.axpy(0.5 * dt, &k1);
        s2.time = state.time + 0.5 * dt;
        let k2 = stage(2, &s2, warm, &mut stats)?;
        let mut s3 = state.axpy(0.5 * dt, &k2);
        s3.time = state.time + 0.5 * dt;
        let k3 = stage(3, &s3, warm, &mut stats)?;
        let mut s4 = state.axpy(dt, &k3);
        s4.time = state.time + dt;
        let k4 = stage(4, &s4, warm, &mut stats)?;

        let mut next = state.clone();
        for (i, c) in next.coeffs_mut().iter_mut().enumerate() {
            *c += dt / 6.0
                * (k1.coeffs()[i] + 2.0 * k2.coeffs()[i] + 2.0 * k3.coeffs()[i] + k4.coeffs()[i]);
        }
        next.time = state.time + dt;
        Ok((next, stats))
    }
}

/// Tendency of `state` with cold-started dual solves.
pub fn semidiscrete_rhs(ctx: &ClosureContext, state: &GridState, gamma: f64) -> Result<GridState> {
    let op = DgOperator::new(state.degree());
    let mut warm = op.warm_start(state.n_cells());
    Ok(op.rhs(ctx, state, gamma, &mut warm)?.0)
}

/// One RK4 step with cold-started dual solves.
pub fn rk4_step(ctx: &ClosureContext, state: &GridState, dt: f64, gamma: f64) -> Result<GridState> {
    let op = DgOperator::new(state.degree());
    let mut warm = op.warm_start(state.n_cells());
    Ok(op.rk4_step(ctx, state, dt, gamma, &mut warm)?.0)
}
