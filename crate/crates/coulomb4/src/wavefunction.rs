//! Closed-form bound-state wavefunctions.
//!
//! Every analytic solution in this crate has the shape
//! `psi(x) = x^power * exp(-a*x - b/x - c/x^2 - d/x^3) * poly(x)`,
//! stored here as a `WaveFunctionSpec`. The ordinary problem uses
//! `(a, b) = (sqrt(-eps_n), alpha4)` with `c = d = 0`; the deformed problem
//! fills all four exponential coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power-exponential-polynomial wavefunction on the half-line.
///
/// `exp_coeffs = [a, b, c, d]` multiply `x, 1/x, 1/x^2, 1/x^3` inside the
/// exponent with an overall minus sign; `poly_coeffs` are ascending-power
/// coefficients with nonzero leading entry for a degree-n state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionSpec {
    pub power: f64,
    pub exp_coeffs: [f64; 4],
    pub poly_coeffs: Vec<f64>,
    pub norm_constant: Option<f64>,
}

impl WaveFunctionSpec {
    /// Evaluates `x^power * exp(...) * poly(x)`; underflow to zero is
    /// permitted for extreme arguments. Applies `norm_constant` when set.
    pub fn evaluate_wavefunction(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
        }
        let value = self.prefactor_log(x).exp() * self.poly_value(x);
        Ok(self.norm_constant.unwrap_or(1.0) * value)
    }

    /// Natural log of the positive prefactor `x^power * exp(...)`.
    pub fn prefactor_log(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.exp_coeffs;
        let u = 1.0 / x;
        self.power * x.ln() - a * x - ((d * u + c) * u + b) * u
    }

    /// Logarithmic derivative `M(x)` of the prefactor.
    pub fn log_derivative(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.exp_coeffs;
        let u = 1.0 / x;
        self.power * u - a + ((3.0 * d * u + 2.0 * c) * u + b) * u * u
    }

    /// Derivative `M'(x)` of the logarithmic derivative.
    pub fn log_derivative_prime(&self, x: f64) -> f64 {
        let [_, b, c, d] = self.exp_coeffs;
        let u = 1.0 / x;
        let u2 = u * u;
        -self.power * u2 - ((12.0 * d * u + 6.0 * c) * u + 2.0 * b) * u2 * u
    }

    pub fn poly_value(&self, x: f64) -> f64 {
        self.poly_coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn poly_derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.poly_coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + k as f64 * c;
        }
        acc
    }

    pub fn poly_second_derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.poly_coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * x + (k * (k - 1)) as f64 * c;
        }
        acc
    }

    /// True when the polynomial factor is identically zero.
    pub fn is_trivial(&self) -> bool {
        self.poly_coeffs.iter().all(|&c| c == 0.0)
    }

    /// Positive roots of the polynomial factor, ascending: the nodes of the
    /// wavefunction on the half-line. Exact for degrees 0..=2.
    pub fn positive_poly_roots(&self) -> Vec<f64> {
        let c = &self.poly_coeffs;
        let degree = c.iter().rposition(|&v| v != 0.0).unwrap_or(0);
        let mut roots = match degree {
            0 => Vec::new(),
            1 => vec![-c[0] / c[1]],
            2 => {
                let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
                if disc < 0.0 {
                    Vec::new()
                } else {
                    let q = -0.5 * (c[1] + c[1].signum() * disc.sqrt());
                    let (r1, r2) = if q == 0.0 {
                        (0.0, 0.0)
                    } else {
                        (q / c[2], c[0] / q)
                    };
                    vec![r1, r2]
                }
            }
            _ => unimplemented!("root extraction implemented for degree <= 2"),
        };
        roots.retain(|&r| r > 0.0);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots
    }
}
