//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use regmn::transport::metrics::cell_quadrature;
use regmn::transport::{build_initial_condition, DgOperator, GridState};
use regmn::{ClosureContext, EntropyModel, MomentVector, MultiplierVector, VelocityBasis};

/// `P_0(v), ..., P_n(v)` by the three-term recurrence.
pub fn legendre(v: f64, n: usize) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = v;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * v * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `<m e^{beta . m}>` by adaptive quadrature.
pub fn oracle_moments(beta: &[f64]) -> Vec<f64> {
    let n = beta.len() - 1;
    (0..=n)
        .map(|i| {
            let f = |v: f64| {
                let p = legendre(v, n);
                let y: f64 = p.iter().zip(beta).map(|(a, b)| a * b).sum();
                p[i] * y.exp()
            };
            simpson(&f, -1.0, 1.0, 1e-14)
        })
        .collect()
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn mb_context(n: usize, sigma_s: f64) -> ClosureContext {
    ClosureContext::new(
        EntropyModel::maxwell_boltzmann(),
        VelocityBasis::with_default_quadrature(n).unwrap(),
        sigma_s,
    )
}

/// `direction` rescaled to Euclidean norm `radius` (zero stays zero).
pub fn scaled(direction: &[f64], radius: f64) -> MultiplierVector {
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    let k = if norm > 0.0 { radius / norm } else { 0.0 };
    MultiplierVector::from_slice(&direction.iter().map(|x| x * k).collect::<Vec<_>>())
}

pub fn realizable(ctx: &ClosureContext, beta: &MultiplierVector) -> MomentVector {
    regmn::kernel::moments_of_multiplier(&ctx.entropy, &ctx.basis, beta).unwrap()
}

/// RK4 with `steps` equal steps of size `t_end / steps`, warm-started.
pub fn evolve(ctx: &ClosureContext, state: &GridState, t_end: f64, steps: usize, gamma: f64) -> GridState {
    let op = DgOperator::new(state.degree());
    let mut warm = op.warm_start(state.n_cells());
    let dt = t_end / steps as f64;
    let mut s = state.clone();
    for _ in 0..steps {
        s = op.rk4_step(ctx, &s, dt, gamma, &mut warm).unwrap().0;
    }
    s
}

/// `(int_0^1 |a - b|^2 dx)^{1/2}` with the composite metric rule on the grid of
/// `a`; `b` may live on a refinement of it.
pub fn l2_distance(a: &GridState, b: &GridState) -> f64 {
    let h = a.cell_width();
    let mut acc = 0.0;
    for c in 0..a.n_cells() {
        for (xi, w) in cell_quadrature() {
            let x = (c as f64 + 0.5 * (xi + 1.0)) * h;
            let d = &a.eval(c, xi).0 - &b.eval_at(x).0;
            acc += w * h * d.norm_squared();
        }
    }
    acc.sqrt()
}

/// Observed orders `log2(e_i / e_{i+1})` for a halving sequence.
pub fn halving_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Smooth problem for self-convergence studies.
pub fn smooth_problem(k: usize, n_cells: usize) -> (ClosureContext, GridState) {
    let ctx = mb_context(3, 1.0);
    let u0 = build_initial_condition(&ctx, 2.0, n_cells, k).unwrap();
    (ctx, u0)
}

/// Differences to a fine-step solution for step counts `base, 2 base, ...`.
pub fn temporal_errors(k: usize, n_cells: usize, t_end: f64, base: usize, levels: usize) -> Vec<f64> {
    let (ctx, u0) = smooth_problem(k, n_cells);
    let fine = evolve(&ctx, &u0, t_end, base << (levels + 3), 0.0);
    (0..levels)
        .map(|l| evolve(&ctx, &u0, t_end, base << l, 0.0).max_abs_diff(&fine))
        .collect()
}

/// Self-differences `|u_n - u_2n|` for `n = n0, 2 n0, ...` at a common small step.
pub fn spatial_errors(k: usize, n0: usize, levels: usize, t_end: f64) -> Vec<f64> {
    let finest = n0 << levels;
    let dt = 0.5 * DgOperator::new(k).time_step(finest, 0.9);
    let steps = (t_end / dt).ceil() as usize;
    let runs: Vec<GridState> = (0..=levels)
        .map(|l| {
            let (ctx, u0) = smooth_problem(k, n0 << l);
            evolve(&ctx, &u0, t_end, steps, 0.0)
        })
        .collect();
    runs.windows(2).map(|w| l2_distance(&w[0], &w[1])).collect()
}
