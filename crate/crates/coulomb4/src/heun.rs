//! Double-confluent-Heun form of the undeformed problem.
//!
//! After the substitution `y = 2 sqrt(-eps) x`, the polynomial-factor ODE
//! becomes `y^2 u'' + (-y^2 + rho y + eta) u' - (omega y + lambda2) u = 0`
//! with two irregular singular points. Its Frobenius-like series about the
//! origin terminates in a polynomial exactly when `omega = -m` and the
//! coefficient `h_{m+1}` vanish together, which reproduces the truncation
//! conditions of the recursion route.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialParams;
use crate::qes::lambda_coeffs;

/// Normalized series-coefficient magnitude below which the series is
/// considered terminated.
pub const DEFAULT_TERMINATION_TOL: f64 = 1e-8;

/// Parameters of the transformed equation:
/// `rho = 2 + alpha3/alpha4`, `eta = 4 alpha4 sqrt(-eps)`,
/// `omega = 1 + alpha1/(2 sqrt(-eps)) + alpha3/(2 alpha4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DchParams {
    pub rho: f64,
    pub eta: f64,
    pub omega: f64,
    pub lambda2: f64,
}

pub fn dch_parameters(p: &PotentialParams, eps: f64) -> Result<DchParams> {
    if !(p.alpha4 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "transformation needs alpha4 > 0, got {}",
            p.alpha4
        )));
    }
    let lambda2 = lambda_coeffs(p, eps)?.lambda2;
    let s = (-eps).sqrt();
    Ok(DchParams {
        rho: 2.0 + p.alpha3 / p.alpha4,
        eta: 4.0 * p.alpha4 * s,
        omega: 1.0 + p.alpha1 / (2.0 * s) + p.alpha3 / (2.0 * p.alpha4),
        lambda2,
    })
}

/// Series coefficients `h_0..h_N` about the origin with `h_0 = 1`:
/// `h_1 = lambda2/eta`,
/// `h_{n+2} = [(lambda2 - n(n+rho+1) - rho) h_{n+1} + (n+omega) h_n]
/// / ((n+2) eta)`.
pub fn dch_series(d: &DchParams, n_max: usize) -> Result<Vec<f64>> {
    if d.eta == 0.0 {
        return Err(Error::InvalidParams(
            "series coefficients are undefined at eta = 0".into(),
        ));
    }
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(1.0);
    if n_max >= 1 {
        h.push(d.lambda2 / d.eta);
    }
    for n in 0..n_max.saturating_sub(1) {
        let nf = n as f64;
        let next = ((d.lambda2 - nf * (nf + d.rho + 1.0) - d.rho) * h[n + 1]
            + (nf + d.omega) * h[n])
            / ((nf + 2.0) * d.eta);
        h.push(next);
    }
    Ok(h)
}

/// Checks whether the series admits a degree-m polynomial solution:
/// both `m + omega` and the normalized `h_{m+1}` must vanish. Returns the
/// verdict together with the larger of the two residuals.
pub fn polynomial_termination_check(d: &DchParams, m: usize) -> Result<(bool, f64)> {
    let h = dch_series(d, m + 1)?;
    let index_residual = (m as f64 + d.omega).abs();
    let head_max = h[..=m].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let coeff_residual = h[m + 1].abs() / head_max;
    let terminated = index_residual <= 1e-10 && coeff_residual <= DEFAULT_TERMINATION_TOL;
    Ok((terminated, index_residual.max(coeff_residual)))
}
