//! Effective-potential expansion of the minimal-length-corrected equation.
//!
//! The deformed Schroedinger equation collapses to `(-d^2/dx^2 + V_e(x)) psi = 0`
//! with `V_e = (V - eps_gup) + beta * (V - eps_ordinary)^2`, a nine-term
//! inverse-power series `sum_i gamma_i / x^i`, i = 0..8.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{EnergyPair, GupContext, PotentialParams};

/// Coefficients `gamma[i]` of the effective potential `sum_i gamma[i] / x^i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoefficients {
    pub gamma: [f64; 9],
}

/// Expands `(V - eps_gup) + beta (V - eps_ordinary)^2` into inverse powers of x.
///
/// With `beta = 0` the five quadratic-origin coefficients gamma[5..=8] are
/// exactly zero (they are products with beta) and gamma[0] = -eps_gup.
pub fn effective_coefficients(
    p: &PotentialParams,
    g: &GupContext,
    e: &EnergyPair,
) -> EffectiveCoefficients {
    let (a1, a2, a3) = (p.alpha1, p.alpha2, p.alpha3);
    let a4sq = p.alpha4 * p.alpha4;
    let beta = g.beta;
    let eps = e.eps_ordinary;
    let eps_g = e.eps_gup;

    let gamma = [
        beta * eps * eps - eps_g,
        a1 * (1.0 - 2.0 * beta * eps),
        a2 + beta * (a1 * a1 - 2.0 * a2 * eps),
        a3 + 2.0 * beta * (a1 * a2 - a3 * eps),
        a4sq + beta * (2.0 * a1 * a3 + a2 * a2 - 2.0 * a4sq * eps),
        2.0 * beta * (a1 * a4sq + a2 * a3),
        beta * (2.0 * a2 * a4sq + a3 * a3),
        2.0 * beta * a3 * a4sq,
        beta * a4sq * a4sq,
    ];
    EffectiveCoefficients { gamma }
}

impl EffectiveCoefficients {
    /// Horner evaluation of `sum_i gamma[i] / x^i` at `x > 0`.
    pub fn effective_potential_value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
        }
        Ok(self.value_at(x))
    }

    pub(crate) fn value_at(&self, x: f64) -> f64 {
        let u = 1.0 / x;
        let mut acc = 0.0;
        for &g in self.gamma.iter().rev() {
            acc = acc * u + g;
        }
        acc
    }
}
