//! Kinetic entropy densities and their Legendre duals.
//!
//! Every entropy here is strictly convex on `(0, inf)`. The dual derivative
//! `eta_star_prime` inverts `eta_prime` and maps a multiplier value
//! `alpha . m(v)` to a kinetic density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible Maxwell-Boltzmann exponent `alpha . m(v)` by default.
pub const DEFAULT_EXPONENT_CAP: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntropyKind {
    /// `eta(z) = z log z - z`, dual domain the whole real line.
    MaxwellBoltzmann,
    /// `eta(z) = z log z - (1 + z) log(1 + z)`, dual domain `(-inf, 0)`.
    BoseEinstein,
    /// `eta(z) = -log z`, dual domain `(-inf, 0)`.
    Burg,
}

impl EntropyKind {
    pub fn short_name(self) -> &'static str {
        match self {
            EntropyKind::MaxwellBoltzmann => "mb",
            EntropyKind::BoseEinstein => "be",
            EntropyKind::Burg => "burg",
        }
    }
}

impl std::str::FromStr for EntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mb" | "maxwell-boltzmann" | "maxwellboltzmann" => Ok(EntropyKind::MaxwellBoltzmann),
            "be" | "bose-einstein" | "boseeinstein" => Ok(EntropyKind::BoseEinstein),
            "burg" => Ok(EntropyKind::Burg),
            other => Err(Error::InvalidArgument(format!("unknown entropy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyModel {
    pub kind: EntropyKind,
    /// Only consulted for Maxwell-Boltzmann.
    pub exponent_cap: f64,
}

impl EntropyModel {
    pub fn new(kind: EntropyKind) -> Self {
        Self {
            kind,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        }
    }

    pub fn maxwell_boltzmann() -> Self {
        Self::new(EntropyKind::MaxwellBoltzmann)
    }

    pub fn bose_einstein() -> Self {
        Self::new(EntropyKind::BoseEinstein)
    }

    pub fn burg() -> Self {
        Self::new(EntropyKind::Burg)
    }

    pub fn with_exponent_cap(mut self, cap: f64) -> Self {
        self.exponent_cap = cap;
        self
    }

    pub fn is_superlinear(&self) -> bool {
        matches!(self.kind, EntropyKind::MaxwellBoltzmann)
    }

    /// Open interval `(lo, hi)` on which the dual entropy is defined.
    pub fn dual_domain(&self) -> (f64, f64) {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => (f64::NEG_INFINITY, f64::INFINITY),
            EntropyKind::BoseEinstein | EntropyKind::Burg => (f64::NEG_INFINITY, 0.0),
        }
    }

    pub fn in_dual_domain(&self, y: f64) -> bool {
        let (lo, hi) = self.dual_domain();
        y.is_finite() && y > lo && y < hi
    }

    /// Checks that the dual functions may be evaluated at `y`, which is the
    /// value of `alpha . m` at velocity node `node`.
    pub fn check_dual_arg(&self, node: usize, y: f64) -> Result<()> {
        if !self.in_dual_domain(y) {
            return Err(Error::DomainViolation { node, value: y });
        }
        if self.kind == EntropyKind::MaxwellBoltzmann && y > self.exponent_cap {
            return Err(Error::OverflowGuard {
                node,
                exponent: y,
                cap: self.exponent_cap,
            });
        }
        Ok(())
    }

    pub fn eta(&self, z: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => z * z.ln() - z,
            EntropyKind::BoseEinstein => z * z.ln() - (1.0 + z) * z.ln_1p(),
            EntropyKind::Burg => -z.ln(),
        }
    }

    pub fn eta_prime(&self, z: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => z.ln(),
            EntropyKind::BoseEinstein => z.ln() - z.ln_1p(),
            EntropyKind::Burg => -1.0 / z,
        }
    }

    pub fn eta_double_prime(&self, z: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => 1.0 / z,
            EntropyKind::BoseEinstein => 1.0 / (z * (1.0 + z)),
            EntropyKind::Burg => 1.0 / (z * z),
        }
    }

    pub fn eta_star(&self, y: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => y.exp(),
            EntropyKind::BoseEinstein => -(-y.exp()).ln_1p(),
            EntropyKind::Burg => -1.0 - (-y).ln(),
        }
    }

    pub fn eta_star_prime(&self, y: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => y.exp(),
            EntropyKind::BoseEinstein => 1.0 / (-y).exp_m1(),
            EntropyKind::Burg => -1.0 / y,
        }
    }

    pub fn eta_star_double_prime(&self, y: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => y.exp(),
            EntropyKind::BoseEinstein => {
                let d = (-y).exp_m1();
                // e^y / (1 - e^y)^2 written in terms of e^{-y} - 1
                (-y).exp() / (d * d)
            }
            EntropyKind::Burg => 1.0 / (y * y),
        }
    }

    /// `eta(eta_star_prime(y))`, evaluated without the round trip through a
    /// logarithm: `eta(G) = y G - eta_star(y)` for `G = eta_star_prime(y)`.
    pub fn eta_of_dual(&self, y: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => y.exp() * (y - 1.0),
            _ => y * self.eta_star_prime(y) - self.eta_star(y),
        }
    }

    /// Pointwise relative entropy `eta(G_a | G_b) = eta(G_a) - eta(G_b) - y_b (G_a - G_b)`
    /// for densities `G_a = eta_star_prime(y_a)` and `G_b = eta_star_prime(y_b)`.
    ///
    /// For Maxwell-Boltzmann this equals `e^{y_b} (d e^d - (e^d - 1))` with
    /// `d = y_a - y_b`, which is evaluated without cancellation for small `d`.
    pub fn relative_density_entropy(&self, y_a: f64, y_b: f64) -> f64 {
        match self.kind {
            EntropyKind::MaxwellBoltzmann => y_b.exp() * mb_bregman_kernel(y_a - y_b),
            _ => {
                let ga = self.eta_star_prime(y_a);
                let gb = self.eta_star_prime(y_b);
                self.eta_of_dual(y_a) - self.eta_of_dual(y_b) - y_b * (ga - gb)
            }
        }
    }
}

/// `d e^d - expm1(d)`, which is `d^2/2 + O(d^3)` and nonnegative.
fn mb_bregman_kernel(d: f64) -> f64 {
    if d.abs() < 0.5 {
        // sum_{n>=2} (n-1) d^n / n!
        let mut term = d; // d^n / n! at n = 1
        let mut sum = 0.0;
        for n in 2..40 {
            term *= d / n as f64;
            let add = (n - 1) as f64 * term;
            sum += add;
            if add.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        d * d.exp() - d.exp_m1()
    }
}
