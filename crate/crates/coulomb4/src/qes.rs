//! Quasi-exactly-solvable machinery for the undeformed problem.
//!
//! A degree-n polynomial factor truncates the series solution only on a
//! constraint surface in parameter space. This module provides the
//! closed-form energies, the three-term recursion for the polynomial
//! coefficients, the equivalent tridiagonal determinant condition, the
//! explicit ground and first-excited constraint forms, and solvers that
//! close `alpha2` given the other three parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialParams;
use crate::wavefunction::WaveFunctionSpec;

/// Normalized determinant residual below which a parameter set is treated
/// as exactly on the truncation surface.
pub const QES_CLOSURE_TOL: f64 = 1e-8;

/// The two combinations of potential parameters and energy that drive the
/// truncation conditions: `lambda1 = alpha1 + (2 + alpha3/alpha4)*sqrt(-eps)`
/// and `lambda2 = alpha2 - alpha3^2/(4 alpha4^2) - alpha3/(2 alpha4)
/// + 2 alpha4 sqrt(-eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// A closed-form bound state of the undeformed problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QesSolution {
    pub n: u32,
    pub params: PotentialParams,
    pub energy: f64,
    pub wavefunction: WaveFunctionSpec,
    /// Normalized truncation-determinant residual at the closed-form energy.
    pub constraint_residual: f64,
}

/// Closed-form energy of the degree-n state:
/// `eps_n = -alpha1^2 alpha4^2 / (alpha3 + 2(n+1) alpha4)^2`.
pub fn closed_form_energy(n: u32, p: &PotentialParams) -> Result<f64> {
    let xi = p.alpha3 + 2.0 * (n as f64 + 1.0) * p.alpha4;
    if xi == 0.0 {
        return Err(Error::EnergyPole { n });
    }
    let ratio = p.alpha1 * p.alpha4 / xi;
    Ok(-(ratio * ratio))
}

pub fn lambda_coeffs(p: &PotentialParams, eps: f64) -> Result<LambdaPair> {
    if !(eps < 0.0) {
        return Err(Error::InvalidParams(format!(
            "lambda coefficients need eps < 0, got {eps}"
        )));
    }
    let s = (-eps).sqrt();
    let r = p.alpha3 / (2.0 * p.alpha4);
    Ok(LambdaPair {
        lambda1: p.alpha1 + (2.0 + p.alpha3 / p.alpha4) * s,
        lambda2: p.alpha2 - r * r - r + 2.0 * p.alpha4 * s,
    })
}

/// Runs the three-term recursion for the polynomial factor of a degree-n
/// candidate at energy `eps`, with `c_0 = 1`. Returns the coefficients
/// `c_0..c_n` and the terminal coefficient `c_{n+1}`, which vanishes exactly
/// when the truncation condition holds.
pub fn recursion_polynomial(n: u32, p: &PotentialParams, eps: f64) -> Result<(Vec<f64>, f64)> {
    if !(p.alpha4 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "recursion needs alpha4 > 0, got {}",
            p.alpha4
        )));
    }
    let lambda2 = lambda_coeffs(p, eps)?.lambda2;
    let s = (-eps).sqrt();
    let delta = p.delta();
    let nf = n as f64;

    let mut coeffs = Vec::with_capacity(n as usize + 2);
    coeffs.push(1.0);
    let mut below = 0.0;
    for k in 0..=n as usize {
        let kf = k as f64;
        let diag = lambda2 - 2.0 * kf * delta - kf * (kf - 1.0);
        let next =
            (diag * coeffs[k] - 2.0 * (nf + 1.0 - kf) * s * below) / (2.0 * (kf + 1.0) * p.alpha4);
        below = coeffs[k];
        coeffs.push(next);
    }
    let terminal = coeffs.pop().expect("recursion always pushes n+2 coefficients");
    Ok((coeffs, terminal))
}

/// Evaluates the (n+1)x(n+1) tridiagonal truncation determinant at the
/// closed-form energy via the three-term recurrence
/// `D_k = A_k D_{k-1} - sub_k * super_{k-1} D_{k-2}`, normalized by the
/// running product of off-diagonal pair magnitudes (floored at 1) so the
/// residual is scale-free.
pub fn qes_determinant_residual(n: u32, p: &PotentialParams) -> Result<f64> {
    let eps = closed_form_energy(n, p)?;
    let lambda2 = lambda_coeffs(p, eps)?.lambda2;
    let s = (-eps).sqrt();
    let delta = p.delta();
    let nf = n as f64;

    let mut older = 1.0;
    let mut newer = lambda2;
    let mut scale = 1.0;
    for k in 1..=n as usize {
        let kf = k as f64;
        let diag = lambda2 - 2.0 * kf * delta - kf * (kf - 1.0);
        let sub = -2.0 * (nf - kf + 1.0) * s;
        let sup = -2.0 * kf * p.alpha4;
        let next = diag * newer - sub * sup * older;
        older = newer;
        newer = next;
        scale *= (sub * sup).abs().max(1.0);
    }
    Ok(newer / scale)
}

/// Ground-state constraint left-hand side in its expanded form:
/// `4 alpha2 alpha4^2 - alpha3^2 - 2 alpha3 alpha4 + 8 alpha4^3 sqrt(-eps0)`.
pub fn ground_constraint_residual(p: &PotentialParams) -> f64 {
    let xi = p.alpha3 + 2.0 * p.alpha4;
    let s0 = (p.alpha1 * p.alpha4 / xi).abs();
    4.0 * p.alpha2 * p.alpha4 * p.alpha4 - p.alpha3 * p.alpha3 - 2.0 * p.alpha3 * p.alpha4
        + 8.0 * p.alpha4 * p.alpha4 * p.alpha4 * s0
}

/// The unique `alpha2` closing the ground-state constraint, which is linear
/// in `alpha2`.
pub fn solve_alpha2_ground(alpha1: f64, alpha3: f64, alpha4: f64) -> Result<f64> {
    if !(alpha4 > 0.0) || !(alpha1 < 0.0) {
        return Err(Error::InvalidParams(format!(
            "closure needs alpha1 < 0 and alpha4 > 0, got alpha1={alpha1}, alpha4={alpha4}"
        )));
    }
    let xi = alpha3 + 2.0 * alpha4;
    if !(xi > 0.0) {
        return Err(Error::InvalidParams(format!(
            "closure needs alpha3 + 2*alpha4 > 0, got {xi}"
        )));
    }
    let s0 = (alpha1 * alpha4 / xi).abs();
    Ok((alpha3 * alpha3 + 2.0 * alpha3 * alpha4 - 8.0 * alpha4 * alpha4 * alpha4 * s0)
        / (4.0 * alpha4 * alpha4))
}

/// First-excited constraint as the sum of its three additive terms,
/// normalized by the largest term magnitude. The raw expression scales like
/// `alpha4^8` and would underflow for small `alpha4`.
pub fn first_excited_constraint_residual(p: &PotentialParams) -> f64 {
    let (a1, a2, a3, a4) = (p.alpha1, p.alpha2, p.alpha3, p.alpha4);
    let a4sq = a4 * a4;
    let xi = a3 + 4.0 * a4;
    let t1 = 64.0 * a1 * a1 * a4sq * a4sq * a4sq * a4sq;
    let t2 = 16.0 * a4sq * a4sq * xi * (a3 * a3 + 4.0 * a3 * a4 + 8.0 * a4sq - 4.0 * a2 * a4sq) * a1;
    let t3 = xi
        * xi
        * (a3 * a3 + 2.0 * a3 * a4 - 4.0 * a2 * a4sq)
        * (a3 * a3 + 6.0 * a3 * a4 + 8.0 * a4sq - 4.0 * a2 * a4sq);
    let largest = t1.abs().max(t2.abs()).max(t3.abs());
    if largest == 0.0 {
        0.0
    } else {
        (t1 + t2 + t3) / largest
    }
}

/// All real `alpha2` roots of the first-excited constraint, ascending.
/// The constraint factors through `lambda2 (lambda2 - 2 delta) =
/// 4 alpha4 sqrt(-eps1)` with `lambda2` linear in `alpha2`.
pub fn solve_constraint_n1(alpha1: f64, alpha3: f64, alpha4: f64) -> Result<Vec<f64>> {
    if !(alpha4 > 0.0) || !(alpha1 < 0.0) {
        return Err(Error::InvalidParams(format!(
            "closure needs alpha1 < 0 and alpha4 > 0, got alpha1={alpha1}, alpha4={alpha4}"
        )));
    }
    let xi = alpha3 + 4.0 * alpha4;
    if !(xi > 0.0) {
        return Err(Error::InvalidParams(format!(
            "closure needs alpha3 + 4*alpha4 > 0, got {xi}"
        )));
    }
    let s1 = (alpha1 * alpha4 / xi).abs();
    let r = alpha3 / (2.0 * alpha4);
    let delta = 1.0 + r;
    let disc = delta * delta + 4.0 * alpha4 * s1;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let alpha2_from = |lambda2: f64| lambda2 + r * r + r - 2.0 * alpha4 * s1;
    let roots = if disc == 0.0 {
        vec![alpha2_from(delta)]
    } else {
        let root = disc.sqrt();
        let mut v = vec![alpha2_from(delta - root), alpha2_from(delta + root)];
        v.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
        v
    };
    Ok(roots)
}

/// Assembles the analytic wavefunction of the degree-n state:
/// `x^delta exp(-sqrt(-eps_n) x - alpha4/x)` times the recursion polynomial.
/// Requires the parameters to sit on the truncation surface.
pub fn build_wavefunction(n: u32, p: &PotentialParams) -> Result<WaveFunctionSpec> {
    let residual = qes_determinant_residual(n, p)?;
    if !(residual.abs() <= QES_CLOSURE_TOL) {
        return Err(Error::InvalidParams(format!(
            "parameters are off the degree-{n} truncation surface: \
             normalized constraint residual {residual:.3e} exceeds {QES_CLOSURE_TOL:e}"
        )));
    }
    let eps = closed_form_energy(n, p)?;
    let (poly_coeffs, _) = recursion_polynomial(n, p, eps)?;
    Ok(WaveFunctionSpec {
        power: p.delta(),
        exp_coeffs: [(-eps).sqrt(), p.alpha4, 0.0, 0.0],
        poly_coeffs,
        norm_constant: None,
    })
}

/// Full closed-form solution bundle for a degree-n state on the surface.
pub fn solve_ordinary(n: u32, p: &PotentialParams) -> Result<QesSolution> {
    let energy = closed_form_energy(n, p)?;
    let constraint_residual = qes_determinant_residual(n, p)?;
    let wavefunction = build_wavefunction(n, p)?;
    Ok(QesSolution {
        n,
        params: *p,
        energy,
        wavefunction,
        constraint_residual,
    })
}
