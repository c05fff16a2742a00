//! Moment and multiplier vectors, the entropy ansatz `G_alpha`, and the maps
//! built from it by velocity quadrature.

use std::ops::{Deref, DerefMut};

use nalgebra::{DMatrix, DVector};

use crate::basis::VelocityBasis;
use crate::entropy::EntropyModel;
use crate::error::Result;

macro_rules! vector_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub DVector<f64>);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                Self(DVector::zeros(len))
            }

            pub fn from_slice(entries: &[f64]) -> Self {
                Self(DVector::from_column_slice(entries))
            }

            pub fn into_inner(self) -> DVector<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = DVector<f64>;
            fn deref(&self) -> &DVector<f64> {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut DVector<f64> {
                &mut self.0
            }
        }

        impl From<DVector<f64>> for $name {
            fn from(v: DVector<f64>) -> Self {
                Self(v)
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(DVector::from_vec(v))
            }
        }
    };
}

vector_newtype!(
    /// Moments `u_i = <m_i g>` against the Legendre basis.
    MomentVector
);

vector_newtype!(
    /// Lagrange multipliers `alpha`, the dual coordinates of a moment vector.
    MultiplierVector
);

impl MomentVector {
    /// `(u0, 0, ..., 0)`.
    pub fn isotropic(len: usize, u0: f64) -> Self {
        let mut u = Self::zeros(len);
        u[0] = u0;
        u
    }
}

/// Values `alpha . m(v_q)` at the velocity nodes, checked against the dual
/// domain of `entropy`.
pub fn dual_arguments(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<Vec<f64>> {
    let y = basis.values().tr_mul(&alpha.0);
    for (q, &yq) in y.iter().enumerate() {
        entropy.check_dual_arg(q, yq)?;
    }
    Ok(y.data.into())
}

/// `G_alpha(v_q) = eta_star_prime(alpha . m(v_q))` at every velocity node.
pub fn ansatz_density(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<Vec<f64>> {
    let y = dual_arguments(entropy, basis, alpha)?;
    Ok(y.into_iter().map(|yq| entropy.eta_star_prime(yq)).collect())
}

/// `u_hat(alpha) = <m G_alpha>`.
pub fn moments_of_multiplier(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<MomentVector> {
    let g = ansatz_density(entropy, basis, alpha)?;
    Ok(MomentVector(basis.project(&g)))
}

/// `<m m^T eta_star''(alpha . m)>`, the Hessian of `<eta_star(alpha . m)>`.
pub fn dual_hessian_kernel(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<DMatrix<f64>> {
    let y = dual_arguments(entropy, basis, alpha)?;
    let curvature: Vec<f64> = y.iter().map(|&yq| entropy.eta_star_double_prime(yq)).collect();
    Ok(symmetrize(basis.weighted_gram(&curvature)))
}

/// `<eta_star(alpha . m)>`.
pub fn dual_potential(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<f64> {
    let y = dual_arguments(entropy, basis, alpha)?;
    let vals: Vec<f64> = y.iter().map(|&yq| entropy.eta_star(yq)).collect();
    Ok(basis.integrate(&vals))
}

/// `h = <eta(G_alpha)>`, the kinetic entropy of the ansatz.
pub fn ansatz_entropy(
    entropy: &EntropyModel,
    basis: &VelocityBasis,
    alpha: &MultiplierVector,
) -> Result<f64> {
    let y = dual_arguments(entropy, basis, alpha)?;
    let vals: Vec<f64> = y.iter().map(|&yq| entropy.eta_of_dual(yq)).collect();
    Ok(basis.integrate(&vals))
}

pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}
