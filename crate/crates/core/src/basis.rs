//! Legendre velocity basis on `V = [-1, 1]` and Gauss-Legendre quadrature.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Measure of the velocity domain `[-1, 1]`.
pub const V_MEASURE: f64 = 2.0;

/// Gauss-Legendre rule with `n` nodes on `[-1, 1]`, nodes ascending.
///
/// Nodes are found by Newton iteration on `P_n` from the Chebyshev-like
/// initial guess; weights are `2 / ((1 - x^2) P_n'(x)^2)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "a quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Writes `P_0(v), ..., P_n(v)` into `out` (length `n + 1`).
pub fn legendre_values_into(v: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = v;
    }
    for i in 2..out.len() {
        let k = i as f64;
        out[i] = ((2.0 * k - 1.0) * v * out[i - 1] - (k - 1.0) * out[i - 2]) / k;
    }
}

/// Writes `P_0'(v), ..., P_n'(v)` into `out`, using
/// `P_{i+1}' = P_{i-1}' + (2i + 1) P_i`.
pub fn legendre_derivatives_into(v: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let mut p = vec![0.0; n];
    legendre_values_into(v, &mut p);
    out[0] = 0.0;
    if n > 1 {
        out[1] = 1.0;
    }
    for i in 1..n.saturating_sub(1) {
        out[i + 1] = out[i - 1] + (2 * i + 1) as f64 * p[i];
    }
}

/// Legendre polynomials `m_i = P_i`, `i = 0..=N`, tabulated at the nodes of
/// a Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct VelocityBasis {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `(N + 1) x Q`; column `q` is `m(v_q)`.
    values: DMatrix<f64>,
}

impl VelocityBasis {
    /// Basis of highest degree `n` with a `quad_order`-point rule.
    pub fn new(n: usize, quad_order: usize) -> Result<Self> {
        if quad_order < n + 1 {
            return Err(Error::InvalidArgument(format!(
                "quad_order {quad_order} is too small for degree {n}; need at least {}",
                n + 1
            )));
        }
        let (nodes, weights) = gauss_legendre(quad_order);
        let mut values = DMatrix::zeros(n + 1, quad_order);
        let mut col = vec![0.0; n + 1];
        for (q, &v) in nodes.iter().enumerate() {
            legendre_values_into(v, &mut col);
            values.column_mut(q).copy_from_slice(&col);
        }
        Ok(Self {
            degree: n,
            nodes,
            weights,
            values,
        })
    }

    /// Default rule size, see [`default_quad_order`].
    pub fn with_default_quadrature(n: usize) -> Result<Self> {
        Self::new(n, default_quad_order(n))
    }

    /// Highest polynomial degree `N`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of moments, `N + 1`.
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn quad_order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn v_measure(&self) -> f64 {
        V_MEASURE
    }

    /// `(P_0(v), ..., P_N(v))`.
    pub fn eval(&self, v: f64) -> Result<DVector<f64>> {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "velocity {v} lies outside [-1, 1]"
            )));
        }
        let mut out = DVector::zeros(self.len());
        legendre_values_into(v, out.as_mut_slice());
        Ok(out)
    }

    /// `<g>` for nodal values `g`.
    pub fn integrate(&self, nodal: &[f64]) -> f64 {
        nodal.iter().zip(&self.weights).map(|(g, w)| g * w).sum()
    }

    /// `<v g>` for nodal values `g`.
    pub fn integrate_velocity_weighted(&self, nodal: &[f64]) -> f64 {
        nodal
            .iter()
            .zip(&self.weights)
            .zip(&self.nodes)
            .map(|((g, w), v)| g * w * v)
            .sum()
    }

    /// `<m g>` for nodal values `g`.
    pub fn project(&self, nodal: &[f64]) -> DVector<f64> {
        let weighted = DVector::from_iterator(
            nodal.len(),
            nodal.iter().zip(&self.weights).map(|(g, w)| g * w),
        );
        &self.values * weighted
    }

    /// `<v m g>` for nodal values `g`.
    pub fn project_velocity_weighted(&self, nodal: &[f64]) -> DVector<f64> {
        let weighted = DVector::from_iterator(
            nodal.len(),
            nodal
                .iter()
                .zip(&self.weights)
                .zip(&self.nodes)
                .map(|((g, w), v)| g * w * v),
        );
        &self.values * weighted
    }

    /// `<m m^T g>` for nodal values `g`.
    pub fn weighted_gram(&self, nodal: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.values.clone();
        for (q, mut col) in scaled.column_iter_mut().enumerate() {
            col *= nodal[q] * self.weights[q];
        }
        &scaled * self.values.transpose()
    }

    /// `<v m m^T g>` for nodal values `g`.
    pub fn velocity_weighted_gram(&self, nodal: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.values.clone();
        for (q, mut col) in scaled.column_iter_mut().enumerate() {
            col *= nodal[q] * self.weights[q] * self.nodes[q];
        }
        &scaled * self.values.transpose()
    }
}

/// `max(30, 6N + 8)` nodes: doubling the rule then changes `u_hat(alpha)` by
/// less than `1e-10` for every `|alpha| <= 3`, including multipliers
/// concentrated on the highest mode.
pub fn default_quad_order(n: usize) -> usize {
    (6 * n + 8).max(30)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule_closed_form() {
        let b = VelocityBasis::new(1, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((b.nodes()[0] + s).abs() < 1e-15);
        assert!((b.nodes()[1] - s).abs() < 1e-15);
        assert!((b.weights()[0] - 1.0).abs() < 1e-15);
        assert!((b.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_underresolved_quadrature() {
        assert!(VelocityBasis::new(3, 3).is_err());
        assert!(VelocityBasis::new(3, 4).is_ok());
    }

    #[test]
    fn weights_and_second_moment() {
        for (n, q) in [(0, 1), (1, 2), (5, 30), (15, 32), (9, 201)] {
            let b = VelocityBasis::new(n, q).unwrap();
            let ones = vec![1.0; q];
            assert!((b.integrate(&ones) - 2.0).abs() < 1e-13);
            if q >= 2 {
                let v2: Vec<f64> = b.nodes().iter().map(|v| v * v).collect();
                assert!((b.integrate(&v2) - 2.0 / 3.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn exact_up_to_design_degree() {
        let q = 7;
        let b = VelocityBasis::new(0, q).unwrap();
        for p in 0..2 * q {
            let vals: Vec<f64> = b.nodes().iter().map(|v| v.powi(p as i32)).collect();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((b.integrate(&vals) - exact).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn basis_rows_and_bounds() {
        let b = VelocityBasis::new(6, 30).unwrap();
        assert!(b.values().row(0).iter().all(|&x| x == 1.0));
        assert!(b.values().iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn orthogonality() {
        let n = 12;
        let b = VelocityBasis::new(n, 30).unwrap();
        let gram = b.weighted_gram(&vec![1.0; 30]);
        for i in 0..=n {
            for j in 0..=n {
                let exact = if i == j { 2.0 / (2 * i + 1) as f64 } else { 0.0 };
                assert!((gram[(i, j)] - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eval_endpoints_and_center() {
        let b = VelocityBasis::new(4, 30).unwrap();
        assert!(b.eval(1.0).unwrap().iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let m = b.eval(-1.0).unwrap();
        for (i, x) in m.iter().enumerate() {
            assert!((x - (-1f64).powi(i as i32)).abs() < 1e-15);
        }
        let b2 = VelocityBasis::new(2, 4).unwrap();
        let c = b2.eval(0.0).unwrap();
        assert_eq!(c.as_slice(), &[1.0, 0.0, -0.5]);
        assert!(b.eval(1.0001).is_err());
        assert!(b.eval(-3.0).is_err());
    }

    #[test]
    fn node_nearest_one_has_values_near_one() {
        let b = VelocityBasis::new(2, 4).unwrap();
        let last = b.quad_order() - 1;
        let v = b.nodes()[last];
        let col = b.values().column(last);
        // P_i(v) -> 1 as v -> 1; at the outermost 4-point node the drift is O(1 - v)
        for i in 0..3 {
            assert!((col[i] - 1.0).abs() <= 3.0 * (1.0 - v));
        }
    }

    #[test]
    fn derivative_recurrence() {
        let mut d = vec![0.0; 5];
        legendre_derivatives_into(0.3, &mut d);
        // P_2' = 3x, P_3' = (15x^2 - 3)/2, P_4' = (35x^3 - 15x)/2
        let x: f64 = 0.3;
        assert!((d[2] - 3.0 * x).abs() < 1e-15);
        assert!((d[3] - (15.0 * x * x - 3.0) / 2.0).abs() < 1e-15);
        assert!((d[4] - (35.0 * x.powi(3) - 15.0 * x) / 2.0).abs() < 1e-15);
    }
}
