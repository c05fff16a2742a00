//! Smooth periodic initial data: at each `x` the moments of the
//! Maxwell-Boltzmann ansatz with multipliers
//! `beta(x) = (log(w / (2 sinh w)), w, 0, ..., 0)`, `w(x) = M0 (1 + cos 2 pi x) / 2`,
//! so that `u_0 = 1` everywhere and the anisotropy peaks at `x = 0`.

use std::f64::consts::{LN_2, PI};

use crate::basis::{gauss_legendre, legendre_values_into};
use crate::closure::ClosureContext;
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::kernel::{moments_of_multiplier, MomentVector, MultiplierVector};
use crate::transport::grid::GridState;

/// `w(x) = M0 (1 + cos 2 pi x) / 2`.
pub fn anisotropy(m0: f64, x: f64) -> f64 {
    0.5 * m0 * (1.0 + (2.0 * PI * x).cos())
}

/// `log(w / (2 sinh w))`, continuous at `w = 0` and overflow-free for large `w`.
pub fn normalizing_multiplier(w: f64) -> f64 {
    if w == 0.0 {
        -LN_2
    } else {
        // 2 sinh w = e^w (1 - e^{-2w})
        w.ln() - w - (-(-2.0 * w).exp_m1()).ln()
    }
}

/// Multipliers `beta(x)` of the initial ansatz.
pub fn initial_multipliers(n_moments: usize, m0: f64, x: f64) -> MultiplierVector {
    let w = anisotropy(m0, x);
    let mut beta = MultiplierVector::zeros(n_moments);
    beta[0] = normalizing_multiplier(w);
    if n_moments > 1 {
        beta[1] = w;
    }
    beta
}

/// `u0(x) = <m exp(beta(x) . m)>` by velocity quadrature.
pub fn initial_moments(ctx: &ClosureContext, m0: f64, x: f64) -> Result<MomentVector> {
    check_entropy(ctx)?;
    moments_of_multiplier(
        &ctx.entropy,
        &ctx.basis,
        &initial_multipliers(ctx.n_moments(), m0, x),
    )
}

fn check_entropy(ctx: &ClosureContext) -> Result<()> {
    if ctx.entropy.kind != EntropyKind::MaxwellBoltzmann {
        return Err(Error::UnsupportedEntropy(format!(
            "the initial condition is built from exponential ansaetze, not {:?}",
            ctx.entropy.kind
        )));
    }
    Ok(())
}

/// L2 projection of `u0` onto the DG space with `n_cells` cells of degree
/// `degree`, using a `2(k+1)`-point Gauss rule per cell.
pub fn build_initial_condition(
    ctx: &ClosureContext,
    m0: f64,
    n_cells: usize,
    degree: usize,
) -> Result<GridState> {
    check_entropy(ctx)?;
    if !(m0 > 0.0) {
        return Err(Error::InvalidArgument(format!("M0 must be positive, got {m0}")));
    }
    if n_cells == 0 {
        return Err(Error::InvalidArgument("need at least one cell".into()));
    }
    let n_mom = ctx.n_moments();
    let (nodes, weights) = gauss_legendre(2 * (degree + 1));
    let h = 1.0 / n_cells as f64;
    let mut state = GridState::zeros(n_cells, degree, n_mom);
    let mut p = vec![0.0; degree + 1];
    for c in 0..n_cells {
        for (&xi, &w) in nodes.iter().zip(&weights) {
            let x = (c as f64 + 0.5 * (xi + 1.0)) * h;
            let u = initial_moments(ctx, m0, x)?;
            legendre_values_into(xi, &mut p);
            for j in 0..=degree {
                let f = 0.5 * (2 * j + 1) as f64 * w * p[j];
                for m in 0..n_mom {
                    let cur = state.get(c, j, m);
                    state.set(c, j, m, cur + f * u[m]);
                }
            }
        }
    }
    Ok(state)
}
