//! Deformed bound states from the Bethe-ansatz route.
//!
//! With deformation strength `beta` the eigenvalue problem picks up an
//! effective potential with inverse powers up to eight; the ansatz
//! `psi = P_n(x) x^f exp(-a x - b/x - c/(2x^2) - d/(3x^3))` closes it when
//! the exponent parameters, the polynomial roots, and the potential
//! parameters satisfy a finite algebraic system. This module evaluates
//! those conditions, solves them for the ground and first-excited states,
//! and assembles the resulting wavefunctions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::EffectiveCoefficients;
use crate::potential::PotentialParams;
use crate::wavefunction::WaveFunctionSpec;

/// Exponent parameters of the deformed ansatz. In terms of the potential
/// and the energy pair: `a = sqrt(beta eps^2 - eps_gup)`, `b = alpha2
/// sqrt(beta)`, `c = alpha3 sqrt(beta)/2`, `d = alpha4^2 sqrt(beta)/3`,
/// `f = 2 + alpha1 sqrt(beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
}

impl AnsatzParams {
    /// Recovers the ansatz purely from the effective-potential
    /// coefficients, without reference to the underlying `alpha`/`beta`
    /// split. Requires `gamma8 > 0` and `gamma0 > 0`.
    pub fn from_effective(eff: &EffectiveCoefficients) -> Result<Self> {
        let g = &eff.gamma;
        if !(g[8] > 0.0) {
            return Err(Error::InvalidParams(format!(
                "leading effective coefficient must be positive, got {}",
                g[8]
            )));
        }
        if !(g[0] > 0.0) {
            return Err(Error::InvalidParams(format!(
                "decay coefficient must be positive, got {}",
                g[0]
            )));
        }
        let sq = g[8].sqrt();
        let b = -(g[7] * g[7] - 4.0 * g[6] * g[8]) / (8.0 * g[8] * sq);
        let f = 2.0
            + (8.0 * g[5] * g[8] * g[8] - 4.0 * g[6] * g[7] * g[8] + g[7] * g[7] * g[7])
                / (16.0 * g[8] * g[8] * sq);
        Ok(AnsatzParams {
            a: g[0].sqrt(),
            b,
            c: g[7] / (4.0 * sq),
            d: sq / 3.0,
            f,
        })
    }
}

/// Builds the ansatz exponents from the potential, the deformation, and
/// the energy pair. Requires `beta eps^2 - eps_gup > 0` so the decay rate
/// is real.
pub fn ansatz_parameters(
    p: &PotentialParams,
    beta: f64,
    eps: f64,
    eps_gup: f64,
) -> Result<AnsatzParams> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "deformation strength must be non-negative, got {beta}"
        )));
    }
    let a_sq = beta * eps * eps - eps_gup;
    if !(a_sq > 0.0) {
        return Err(Error::InvalidParams(format!(
            "decay rate squared must be positive, got {a_sq}"
        )));
    }
    let sb = beta.sqrt();
    Ok(AnsatzParams {
        a: a_sq.sqrt(),
        b: p.alpha2 * sb,
        c: p.alpha3 * sb / 2.0,
        d: p.alpha4 * p.alpha4 * sb / 3.0,
        f: 2.0 + p.alpha1 * sb,
    })
}

/// A converged deformed bound state: potential, deformation, both
/// energies, polynomial roots, and the worst residual across the closure
/// conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GupSolution {
    pub n: u32,
    pub alpha1: f64,
    pub beta: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub eps_ordinary: f64,
    pub eps_gup: f64,
    pub bethe_roots: Vec<f64>,
    pub residual_norm: f64,
}

impl GupSolution {
    pub fn params(&self) -> Result<PotentialParams> {
        PotentialParams::new(self.alpha1, self.alpha2, self.alpha3, self.alpha4)
    }
}

/// Deformed energy at level `n`:
/// `eps_gup = beta eps^2 - alpha1^2 (1 - 2 beta eps)^2 / (4 (alpha1
/// sqrt(beta) + n + 2)^2)`. At `beta = 0` this reduces bit-for-bit to the
/// undeformed hydrogen-like ladder `-alpha1^2 / (4 (n+2)^2)`.
pub fn gup_energy(n: u32, eps: f64, alpha1: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "deformation strength must be non-negative, got {beta}"
        )));
    }
    let den = alpha1 * beta.sqrt() + (n as f64 + 2.0);
    if den <= 0.0 {
        return Err(Error::EnergyPole { n });
    }
    let num = 2.0 * beta * eps - 1.0;
    let num2 = (alpha1 * num) * (alpha1 * num);
    let den2 = (2.0 * den) * (2.0 * den);
    Ok(beta * eps * eps - num2 / den2)
}

/// Residual of the linear-coefficient closure condition at level `n`:
/// `alpha1 (1 - 2 beta eps) + 2 A (alpha1 sqrt(beta) + n + 2)` with
/// `A = sqrt(beta eps^2 - eps_gup)` (clamped at zero). Vanishes exactly
/// when `eps_gup` comes from [`gup_energy`].
pub fn energy_condition_residual(n: u32, eps: f64, eps_gup: f64, alpha1: f64, beta: f64) -> f64 {
    let a = (beta * eps * eps - eps_gup).max(0.0).sqrt();
    alpha1 * (1.0 - 2.0 * beta * eps) + 2.0 * a * (alpha1 * beta.sqrt() + n as f64 + 2.0)
}

fn root_power_sums(roots: &[f64]) -> (f64, f64, f64, f64) {
    let s1: f64 = roots.iter().sum();
    let s2: f64 = roots.iter().map(|x| x * x).sum();
    let s3: f64 = roots.iter().map(|x| x * x * x).sum();
    let mut pair = 0.0;
    for (i, xi) in roots.iter().enumerate() {
        for xj in &roots[i + 1..] {
            pair += xi * xj;
        }
    }
    (s1, s2, s3, pair)
}

/// Residuals of the four power-matching closure conditions tying the
/// ansatz exponents, the polynomial roots, and the effective coefficients
/// together. All four vanish on an exact solution.
pub fn general_condition_residuals(sol: &GupSolution) -> Result<[f64; 4]> {
    let p = sol.params()?;
    let ctx = crate::potential::GupContext::new(sol.beta)?;
    let pair = crate::potential::EnergyPair::new(sol.n, sol.eps_ordinary, sol.eps_gup)?;
    let eff = crate::gamma::effective_coefficients(&p, &ctx, &pair);
    let ap = ansatz_parameters(&p, sol.beta, sol.eps_ordinary, sol.eps_gup)?;
    let (a, b, c, d, f) = (ap.a, ap.b, ap.c, ap.d, ap.f);
    let g = &eff.gamma;
    let nf = sol.n as f64;
    let (s1, s2, s3, pair_sum) = root_power_sums(&sol.bethe_roots);

    let r1 = 2.0 * a * f + 2.0 * a * nf + g[1];
    let r2 = f * (f - 1.0) - 2.0 * a * b - g[2] - 2.0 * a * s1 + 2.0 * f * nf + (nf - 1.0) * nf;
    let r3 = 2.0 * b * f - 4.0 * a * c - 2.0 * b - g[3] - 2.0 * a * s2
        + 2.0 * (f + nf - 1.0) * s1
        + 2.0 * nf * b;
    let r4 = b * b - 6.0 * a * d + 4.0 * c * f - 6.0 * c - g[4] - 2.0 * a * s3
        + 2.0 * (f + nf - 1.0) * s2
        + 2.0 * pair_sum
        + 2.0 * b * s1
        + 4.0 * nf * c;
    Ok([r1, r2, r3, r4])
}

/// Residuals of the root-coupling conditions, one per polynomial root:
/// `sum_{j != i} 1/(x_i - x_j) - [x_i^4 A - sqrt(beta) (alpha4^2 +
/// alpha1 x_i^3 + alpha2 x_i^2 + alpha3 x_i) - 2 x_i^3] / x_i^4`.
pub fn bethe_residuals(sol: &GupSolution) -> Result<Vec<f64>> {
    let sb = sol.beta.sqrt();
    let a = (sol.beta * sol.eps_ordinary * sol.eps_ordinary - sol.eps_gup)
        .max(0.0)
        .sqrt();
    let roots = &sol.bethe_roots;
    let mut out = Vec::with_capacity(roots.len());
    for (i, &xi) in roots.iter().enumerate() {
        if xi == 0.0 {
            return Err(Error::InvalidParams("polynomial root at the origin".into()));
        }
        let mut pair = 0.0;
        for (j, &xj) in roots.iter().enumerate() {
            if i == j {
                continue;
            }
            if xi == xj {
                return Err(Error::InvalidParams(format!(
                    "coincident polynomial roots at {xi}"
                )));
            }
            pair += 1.0 / (xi - xj);
        }
        let x2 = xi * xi;
        let x3 = x2 * xi;
        let x4 = x2 * x2;
        let drift = (x4 * a
            - sb * (sol.alpha4 * sol.alpha4 + sol.alpha1 * x3 + sol.alpha2 * x2 + sol.alpha3 * xi)
            - 2.0 * x3)
            / x4;
        out.push(pair - drift);
    }
    Ok(out)
}

const FIXED_POINT_MAX_ITERS: usize = 200;
const NEWTON_MAX_ITERS: usize = 100;
const SOLUTION_RESIDUAL_TOL: f64 = 1e-9;

fn ground_feasible(alpha1: f64, beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Infeasible(format!(
            "deformation strength must lie in (0, 1], got {beta}"
        )));
    }
    let limit = -2.0 / (3.0 * beta.sqrt());
    if !(alpha1 > limit && alpha1 < 0.0) {
        return Err(Error::Infeasible(format!(
            "ground closure needs alpha1 in ({limit}, 0), got {alpha1}"
        )));
    }
    Ok(())
}

fn ground_step(alpha1: f64, beta: f64, v: [f64; 3]) -> Result<([f64; 3], f64, f64)> {
    let sb = beta.sqrt();
    let [_, alpha3, alpha4] = v;
    let xi = alpha3 + 2.0 * alpha4;
    if xi <= 0.0 {
        return Err(Error::Infeasible(format!(
            "energy denominator closed during iteration: xi = {xi}"
        )));
    }
    let ratio = alpha1 * alpha4 / xi;
    let eps0 = -ratio * ratio;
    let a = -alpha1 * (1.0 - 2.0 * beta * eps0) / (2.0 * (alpha1 * sb + 2.0));
    let delta = 1.0 + 2.0 * sb * a - 2.0 * beta * eps0;
    if delta <= 0.0 {
        return Err(Error::Infeasible(format!(
            "closure denominator must stay positive, got {delta}"
        )));
    }
    let alpha2_next = (2.0 + 3.0 * sb * alpha1) / delta;
    let alpha3_next = 2.0 * sb * alpha2_next / delta;
    let alpha4_sq = sb * alpha3_next / delta;
    if alpha4_sq <= 0.0 {
        return Err(Error::Infeasible(format!(
            "quartic coefficient lost positivity: alpha4^2 = {alpha4_sq}"
        )));
    }
    Ok(([alpha2_next, alpha3_next, alpha4_sq.sqrt()], eps0, a))
}

fn assemble_ground(alpha1: f64, beta: f64, v: [f64; 3]) -> Result<GupSolution> {
    let [alpha2, alpha3, alpha4] = v;
    let xi = alpha3 + 2.0 * alpha4;
    let ratio = alpha1 * alpha4 / xi;
    let eps0 = -ratio * ratio;
    let eps0_gup = gup_energy(0, eps0, alpha1, beta)?;
    let mut sol = GupSolution {
        n: 0,
        alpha1,
        beta,
        alpha2,
        alpha3,
        alpha4,
        eps_ordinary: eps0,
        eps_gup: eps0_gup,
        bethe_roots: Vec::new(),
        residual_norm: f64::INFINITY,
    };
    let r = general_condition_residuals(&sol)?;
    sol.residual_norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(sol)
}

fn ground_residual_vec(alpha1: f64, beta: f64, v: [f64; 3]) -> Result<[f64; 3]> {
    let (next, _, _) = ground_step(alpha1, beta, v)?;
    Ok([next[0] - v[0], next[1] - v[1], next[2] - v[2]])
}

/// Solves the ground-state closure for given `alpha1` and `beta`.
/// Feasibility requires `beta` in `(0, 1]` and `alpha1` in
/// `(-2/(3 sqrt(beta)), 0)`; outside that window the self-consistent
/// system has no positive solution.
pub fn solve_ground_gup(alpha1: f64, beta: f64) -> Result<GupSolution> {
    ground_feasible(alpha1, beta)?;
    let sb = beta.sqrt();
    let alpha2_seed = 2.0 + 3.0 * sb * alpha1;
    let alpha3_seed = 2.0 * sb * alpha2_seed;
    let alpha4_sq_seed = sb * alpha3_seed;
    if !(alpha4_sq_seed > 0.0) {
        return Err(Error::Infeasible(
            "seed collapsed before iteration started".into(),
        ));
    }
    let mut v = [alpha2_seed, alpha3_seed, alpha4_sq_seed.sqrt()];

    let mut converged = false;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let (next, _, _) = ground_step(alpha1, beta, v)?;
        let done = next
            .iter()
            .zip(&v)
            .all(|(n, o)| (n - o).abs() <= 1e-15 * o.abs().max(1.0));
        v = next;
        if done {
            converged = true;
            break;
        }
    }

    if converged {
        let sol = assemble_ground(alpha1, beta, v)?;
        if sol.residual_norm <= SOLUTION_RESIDUAL_TOL {
            if !(sol.alpha2 > 0.0 && sol.alpha3 > 0.0) {
                return Err(Error::Infeasible(format!(
                    "closure converged to a non-positive potential: alpha2 = {}, alpha3 = {}",
                    sol.alpha2, sol.alpha3
                )));
            }
            return Ok(sol);
        }
    }

    // Fixed point stalled; polish the displacement map with a damped
    // Newton iteration on the same three unknowns.
    let mut residual = f64::INFINITY;
    for iter in 0..NEWTON_MAX_ITERS {
        let r = ground_residual_vec(alpha1, beta, v)?;
        residual = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if residual <= 1e-15 {
            break;
        }
        let mut jac = [[0.0f64; 3]; 3];
        for j in 0..3 {
            let h = 1e-7 * v[j].abs().max(1.0);
            let mut vp = v;
            vp[j] += h;
            let mut vm = v;
            vm[j] -= h;
            let rp = ground_residual_vec(alpha1, beta, vp)?;
            let rm = ground_residual_vec(alpha1, beta, vm)?;
            for i in 0..3 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let delta = solve_linear_3(jac, r).ok_or(Error::NoConvergence {
            iterations: iter,
            residual,
        })?;
        let norm0 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut lambda = 1.0f64;
        loop {
            let trial = [v[0] - lambda * delta[0], v[1] - lambda * delta[1], v[2] - lambda * delta[2]];
            match ground_residual_vec(alpha1, beta, trial) {
                Ok(rt) => {
                    let norm = rt.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm <= (1.0 - 0.25 * lambda) * norm0 {
                        v = trial;
                        break;
                    }
                }
                Err(_) => {}
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                v = [v[0] - delta[0], v[1] - delta[1], v[2] - delta[2]];
                break;
            }
        }
    }

    let sol = assemble_ground(alpha1, beta, v)?;
    if sol.residual_norm > SOLUTION_RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            iterations: FIXED_POINT_MAX_ITERS + NEWTON_MAX_ITERS,
            residual: sol.residual_norm.max(residual),
        });
    }
    if !(sol.alpha2 > 0.0 && sol.alpha3 > 0.0) {
        return Err(Error::Infeasible(format!(
            "closure converged to a non-positive potential: alpha2 = {}, alpha3 = {}",
            sol.alpha2, sol.alpha3
        )));
    }
    Ok(sol)
}

fn solve_linear_3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn solve_linear_4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn excited_system(alpha1: f64, beta: f64, v: [f64; 4]) -> Result<[f64; 4]> {
    let sb = beta.sqrt();
    let [alpha2, alpha3, alpha4, x1] = v;
    let xi = alpha3 + 4.0 * alpha4;
    if xi <= 0.0 {
        return Err(Error::Infeasible(format!(
            "energy denominator closed during iteration: xi = {xi}"
        )));
    }
    if x1 == 0.0 {
        return Err(Error::InvalidParams("polynomial root at the origin".into()));
    }
    let ratio = alpha1 * alpha4 / xi;
    let eps1 = -ratio * ratio;
    let a = -alpha1 * (1.0 - 2.0 * beta * eps1) / (2.0 * (alpha1 * sb + 3.0));
    let d = 2.0 * beta * eps1 - 2.0 * sb * a - 1.0;

    let f1 = alpha2 * d - (2.0 * x1 * a - 5.0 * alpha1 * sb - 6.0);
    let f2 = alpha3 * d - (2.0 * x1 * x1 * a - 2.0 * sb * (2.0 * alpha2 + alpha1 * x1) - 4.0 * x1);
    let f3 = alpha4 * alpha4 * d
        - (2.0 * x1 * x1 * x1 * a
            - sb * (3.0 * alpha3 + 2.0 * (alpha2 + alpha1 * x1) * x1)
            - 4.0 * x1 * x1);
    let x2 = x1 * x1;
    let x3 = x2 * x1;
    let x4 = x2 * x2;
    let quartic = a * x4
        - (2.0 + alpha1 * sb) * x3
        - sb * (alpha2 * x2 + alpha3 * x1 + alpha4 * alpha4);
    let f4 = quartic / x4;
    Ok([f1, f2, f3, f4])
}

fn excited_newton(alpha1: f64, beta: f64, mut v: [f64; 4]) -> Option<[f64; 4]> {
    for _ in 0..NEWTON_MAX_ITERS {
        let r = excited_system(alpha1, beta, v).ok()?;
        let inf = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if inf <= 1e-12 {
            return Some(v);
        }
        let mut jac = [[0.0f64; 4]; 4];
        for j in 0..4 {
            let h = 1e-7 * v[j].abs().max(1.0);
            let mut vp = v;
            vp[j] += h;
            let mut vm = v;
            vm[j] -= h;
            let rp = excited_system(alpha1, beta, vp).ok()?;
            let rm = excited_system(alpha1, beta, vm).ok()?;
            for i in 0..4 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let delta = solve_linear_4(jac, r)?;
        let norm0 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut lambda = 1.0f64;
        let mut stepped = false;
        while lambda >= 1e-6 {
            let trial = [
                v[0] - lambda * delta[0],
                v[1] - lambda * delta[1],
                v[2] - lambda * delta[2],
                v[3] - lambda * delta[3],
            ];
            if let Ok(rt) = excited_system(alpha1, beta, trial) {
                let norm = rt.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm <= (1.0 - 0.25 * lambda) * norm0 {
                    v = trial;
                    stepped = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !stepped {
            return None;
        }
    }
    let r = excited_system(alpha1, beta, v).ok()?;
    if r.iter().fold(0.0f64, |m, x| m.max(x.abs())) <= 1e-12 {
        Some(v)
    } else {
        None
    }
}

fn assemble_excited(alpha1: f64, beta: f64, v: [f64; 4]) -> Result<GupSolution> {
    let [alpha2, alpha3, alpha4, x1] = v;
    let xi = alpha3 + 4.0 * alpha4;
    let ratio = alpha1 * alpha4 / xi;
    let eps1 = -ratio * ratio;
    let eps1_gup = gup_energy(1, eps1, alpha1, beta)?;
    let mut sol = GupSolution {
        n: 1,
        alpha1,
        beta,
        alpha2,
        alpha3,
        alpha4,
        eps_ordinary: eps1,
        eps_gup: eps1_gup,
        bethe_roots: vec![x1],
        residual_norm: f64::INFINITY,
    };
    let general = general_condition_residuals(&sol)?;
    let bethe = bethe_residuals(&sol)?;
    sol.residual_norm = general
        .iter()
        .chain(&bethe)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(sol)
}

/// Solves the first-excited closure for given `alpha1` and `beta`,
/// scanning a grid of seeds for the polynomial root. Returns every
/// distinct converged solution with a positive root and positive
/// `alpha4`, sorted by `(alpha4, x1)`.
pub fn solve_first_excited_gup(alpha1: f64, beta: f64) -> Result<Vec<GupSolution>> {
    solve_first_excited_gup_detailed(alpha1, beta).map(|(sols, _)| sols)
}

/// As [`solve_first_excited_gup`], also reporting how many converged
/// candidates were discarded for a negative polynomial root or a negative
/// quartic coefficient.
pub fn solve_first_excited_gup_detailed(
    alpha1: f64,
    beta: f64,
) -> Result<(Vec<GupSolution>, usize)> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Infeasible(format!(
            "deformation strength must lie in (0, 1], got {beta}"
        )));
    }
    if !(alpha1 < 0.0) {
        return Err(Error::Infeasible(format!(
            "attractive leading coefficient required, got {alpha1}"
        )));
    }
    if !(alpha1 * beta.sqrt() + 3.0 > 0.0) {
        return Err(Error::Infeasible(format!(
            "energy denominator is closed for alpha1 = {alpha1}, beta = {beta}"
        )));
    }

    let n_seeds = 25usize;
    let (lo, hi) = (1e-2f64, 1e2f64);
    let mut found: Vec<GupSolution> = Vec::new();
    let mut rejected = 0usize;
    for k in 0..n_seeds {
        let t = k as f64 / (n_seeds - 1) as f64;
        let x1 = lo * (hi / lo).powf(t);
        let mag = -alpha1;
        let alpha2_seed = 6.0 - x1 * mag / 3.0;
        let alpha3_seed = 4.0 * x1 - x1 * x1 * mag / 3.0;
        let alpha4_seed = (4.0 * x1 * x1 - x1 * x1 * x1 * mag / 3.0).max(1e-6).sqrt();
        let Some(v) = excited_newton(alpha1, beta, [alpha2_seed, alpha3_seed, alpha4_seed, x1])
        else {
            continue;
        };
        if !(v[3] > 0.0 && v[2] > 0.0) {
            rejected += 1;
            continue;
        }
        let Ok(sol) = assemble_excited(alpha1, beta, v) else {
            continue;
        };
        if sol.residual_norm > SOLUTION_RESIDUAL_TOL {
            continue;
        }
        let duplicate = found.iter().any(|s| {
            (s.alpha4 - sol.alpha4).abs() <= 1e-6 * s.alpha4.abs().max(1.0)
                && (s.bethe_roots[0] - sol.bethe_roots[0]).abs()
                    <= 1e-6 * s.bethe_roots[0].abs().max(1.0)
        });
        if !duplicate {
            found.push(sol);
        }
    }
    found.sort_by(|a, b| {
        (a.alpha4, a.bethe_roots[0])
            .partial_cmp(&(b.alpha4, b.bethe_roots[0]))
            .unwrap()
    });
    Ok((found, rejected))
}

/// Assembles the deformed wavefunction for a converged solution. Refuses
/// solutions whose residual norm exceeds `1e-8`.
pub fn build_gup_wavefunction(sol: &GupSolution) -> Result<WaveFunctionSpec> {
    if !(sol.residual_norm <= 1e-8) {
        return Err(Error::InvalidParams(format!(
            "solution residual {} too large to trust the wavefunction",
            sol.residual_norm
        )));
    }
    let p = sol.params()?;
    let ap = ansatz_parameters(&p, sol.beta, sol.eps_ordinary, sol.eps_gup)?;
    let mut poly = vec![1.0];
    for &root in &sol.bethe_roots {
        let mut next = vec![0.0; poly.len() + 1];
        for (k, coeff) in poly.iter().enumerate() {
            next[k] -= coeff * root;
            next[k + 1] += coeff;
        }
        poly = next;
    }
    Ok(WaveFunctionSpec {
        power: ap.f,
        exp_coeffs: [ap.a, ap.b, ap.c, ap.d],
        poly_coeffs: poly,
        norm_constant: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::effective_coefficients;
    use crate::potential::{EnergyPair, GupContext};
    use crate::testutil::SplitMix64;

    fn params(a1: f64, a2: f64, a3: f64, a4: f64) -> PotentialParams {
        PotentialParams::new(a1, a2, a3, a4).unwrap()
    }

    #[test]
    fn energy_reduces_to_hydrogen_ladder_without_deformation() {
        let mut rng = SplitMix64::new(48);
        for _ in 0..50 {
            let alpha1 = rng.uniform(-3.0, -0.01);
            let eps = rng.uniform(-2.0, -0.001);
            for n in 0..4u32 {
                let got = gup_energy(n, eps, alpha1, 0.0).unwrap();
                let expected = -(alpha1 * alpha1) / (4.0 * ((n as f64 + 2.0) * (n as f64 + 2.0)));
                assert_eq!(got, expected, "n={n}, alpha1={alpha1}");
            }
        }
    }

    #[test]
    fn energy_pole_when_denominator_closes() {
        let beta = 1.0;
        assert!(matches!(
            gup_energy(0, -0.1, -2.0, beta),
            Err(Error::EnergyPole { n: 0 })
        ));
        assert!(gup_energy(0, -0.1, -1.9, beta).is_ok());
    }

    #[test]
    fn energy_condition_vanishes_at_closed_form() {
        let mut rng = SplitMix64::new(49);
        for _ in 0..1000 {
            let beta = rng.uniform(0.01, 1.0);
            let alpha1 = rng.uniform(-1.5, -0.05);
            let eps = rng.uniform(-1.0, -1e-4);
            let n = (rng.uniform(0.0, 4.0)) as u32;
            if alpha1 * beta.sqrt() + n as f64 + 2.0 <= 1e-3 {
                continue;
            }
            let eg = gup_energy(n, eps, alpha1, beta).unwrap();
            let r = energy_condition_residual(n, eps, eg, alpha1, beta);
            assert!(
                r.abs() <= 1e-11 * alpha1.abs().max(1.0),
                "n={n}, beta={beta}, alpha1={alpha1}: residual={r:e}"
            );
        }
    }

    #[test]
    fn ansatz_routes_agree() {
        let mut rng = SplitMix64::new(50);
        for _ in 0..200 {
            let p = params(
                rng.uniform(-1.5, -0.05),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-0.5, 0.5),
                rng.uniform(0.05, 1.0),
            );
            let beta = rng.uniform(0.05, 1.0);
            let eps = rng.uniform(-1.0, -1e-3);
            let eps_gup = eps * rng.uniform(0.5, 1.5) - 0.1;
            if beta * eps * eps - eps_gup <= 1e-6 {
                continue;
            }
            let direct = ansatz_parameters(&p, beta, eps, eps_gup).unwrap();
            let ctx = GupContext::new(beta).unwrap();
            let pair = EnergyPair::new(0, eps, eps_gup).unwrap();
            let eff = effective_coefficients(&p, &ctx, &pair);
            let via_gamma = AnsatzParams::from_effective(&eff).unwrap();
            for (lhs, rhs, label) in [
                (direct.a, via_gamma.a, "a"),
                (direct.b, via_gamma.b, "b"),
                (direct.c, via_gamma.c, "c"),
                (direct.d, via_gamma.d, "d"),
                (direct.f, via_gamma.f, "f"),
            ] {
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0),
                    "{label}: {lhs} vs {rhs} for {p:?}, beta={beta}"
                );
            }
        }
    }

    #[test]
    fn ansatz_component_values() {
        let p = params(-1.0, 3.0, 0.2, 0.6);
        let ap = ansatz_parameters(&p, 0.25, -0.5, -0.4).unwrap();
        assert!((ap.d - 0.25f64.sqrt() * 0.36 / 3.0).abs() <= 1e-15 * 0.06);
        assert!((ap.d - 0.06).abs() <= 1e-15);
        let ap1 = ansatz_parameters(&p, 1.0, -0.5, -0.4).unwrap();
        assert_eq!(ap1.b, 3.0);
        assert_eq!(ap1.f, 1.0);
    }

    #[test]
    fn ansatz_rejects_imaginary_decay() {
        let p = params(-1.0, 0.0, 0.0, 0.5);
        assert!(ansatz_parameters(&p, 0.1, -0.5, 0.5).is_err());
        let eff = EffectiveCoefficients {
            gamma: [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        };
        assert!(AnsatzParams::from_effective(&eff).is_err());
        let eff = EffectiveCoefficients {
            gamma: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        assert!(AnsatzParams::from_effective(&eff).is_err());
    }

    #[test]
    fn ground_closure_at_unit_deformation() {
        let sol = solve_ground_gup(-0.5, 1.0).unwrap();
        assert!(sol.residual_norm <= 1e-9, "residual={:e}", sol.residual_norm);
        assert!((sol.alpha2 - 0.353115565777).abs() <= 1e-9);
        assert!((sol.alpha3 - 0.498762411176).abs() <= 1e-9);
        assert!((sol.alpha4 - 0.593499403556).abs() <= 1e-9);
        assert!((sol.eps_ordinary - -0.0309876374).abs() <= 1e-9);
        assert!((sol.eps_gup - -0.0303673076).abs() <= 1e-9);
        assert!(sol.bethe_roots.is_empty());
    }

    #[test]
    fn ground_closure_at_half_deformation() {
        let sol = solve_ground_gup(-0.3, 0.5).unwrap();
        assert!(sol.residual_norm <= 1e-9);
        assert!((sol.alpha2 - 1.210356658945).abs() <= 1e-9);
        assert!((sol.alpha3 - 1.519334822720).abs() <= 1e-9);
        assert!((sol.alpha4 - 0.976521505709).abs() <= 1e-9);
        assert!((sol.eps_ordinary - -0.0071179049).abs() <= 1e-9);
        assert!((sol.eps_gup - -0.0071142412).abs() <= 1e-9);
    }

    #[test]
    fn ground_window_enforced() {
        assert!(matches!(
            solve_ground_gup(-0.7, 1.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_ground_gup(0.1, 1.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_ground_gup(-0.5, 0.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_ground_gup(-0.5, 1.5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn ground_solution_satisfies_energy_condition() {
        let sol = solve_ground_gup(-0.5, 1.0).unwrap();
        let r = energy_condition_residual(0, sol.eps_ordinary, sol.eps_gup, sol.alpha1, sol.beta);
        assert!(r.abs() <= 1e-12, "residual={r:e}");
        assert!(bethe_residuals(&sol).unwrap().is_empty());
    }

    #[test]
    fn excited_closure_at_half_deformation() {
        let (sols, _) = solve_first_excited_gup_detailed(-0.3, 0.5).unwrap();
        assert!(!sols.is_empty());
        let hit = sols.iter().find(|s| {
            (s.alpha4 - 0.9824394143).abs() <= 1e-6 && (s.bethe_roots[0] - 33.6237393232).abs() <= 1e-4
        });
        let sol = hit.expect("expected branch not found");
        assert!((sol.alpha2 - 1.2143672675).abs() <= 1e-7);
        assert!((sol.alpha3 - 1.5305343764).abs() <= 1e-7);
        assert!((sol.eps_ordinary - -0.00291355).abs() <= 1e-8);
        assert!((sol.eps_gup - -0.00290758).abs() <= 1e-8);
        assert!(sol.residual_norm <= 1e-9);
        for r in bethe_residuals(sol).unwrap() {
            assert!(r.abs() <= 1e-10, "bethe residual={r:e}");
        }
    }

    #[test]
    fn excited_closure_at_unit_deformation() {
        let sols = solve_first_excited_gup(-0.5, 1.0).unwrap();
        assert!(sols
            .iter()
            .any(|s| (s.bethe_roots[0] - 14.9509776064).abs() <= 1e-4));
    }

    #[test]
    fn excited_rejects_closed_denominator() {
        assert!(matches!(
            solve_first_excited_gup(-3.1, 1.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_first_excited_gup(0.5, 0.5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn bethe_residuals_reject_degenerate_roots() {
        let mut sol = solve_ground_gup(-0.5, 1.0).unwrap();
        sol.n = 2;
        sol.bethe_roots = vec![1.0, 1.0];
        assert!(bethe_residuals(&sol).is_err());
        sol.bethe_roots = vec![0.0];
        assert!(bethe_residuals(&sol).is_err());
    }

    #[test]
    fn ground_wavefunction_parameters() {
        let sol = solve_ground_gup(-0.5, 1.0).unwrap();
        let w = build_gup_wavefunction(&sol).unwrap();
        assert_eq!(w.poly_coeffs, vec![1.0]);
        assert_eq!(w.power, 2.0 + sol.alpha1);
        let a_expected = (sol.beta * sol.eps_ordinary * sol.eps_ordinary - sol.eps_gup).sqrt();
        assert!((w.exp_coeffs[0] - a_expected).abs() <= 1e-15);
        assert!((w.exp_coeffs[1] - sol.alpha2).abs() <= 1e-12);
        assert!((w.exp_coeffs[2] - sol.alpha3 / 2.0).abs() <= 1e-12);
        assert!((w.exp_coeffs[3] - sol.alpha4 * sol.alpha4 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn excited_wavefunction_has_one_interior_node() {
        let sols = solve_first_excited_gup(-0.3, 0.5).unwrap();
        let sol = &sols[0];
        let w = build_gup_wavefunction(sol).unwrap();
        let x1 = sol.bethe_roots[0];
        assert_eq!(w.poly_coeffs.len(), 2);
        assert!((w.poly_coeffs[0] - -x1).abs() <= 1e-12 * x1);
        assert!((w.poly_coeffs[1] - 1.0).abs() <= 1e-15);
        let before = w.evaluate_wavefunction(0.9 * x1).unwrap();
        let after = w.evaluate_wavefunction(1.1 * x1).unwrap();
        assert!(before * after < 0.0, "no sign change across the root");
    }

    #[test]
    fn wavefunction_refused_for_sloppy_solution() {
        let mut sol = solve_ground_gup(-0.5, 1.0).unwrap();
        sol.residual_norm = 1e-3;
        assert!(build_gup_wavefunction(&sol).is_err());
    }

    #[test]
    fn unconverged_report_distinguishes_window_violations() {
        // Right at the window edge the iteration map loses positivity and
        // the failure surfaces as infeasibility, not silent garbage.
        let beta: f64 = 1.0;
        let edge = -2.0 / (3.0 * beta.sqrt()) + 1e-12;
        match solve_ground_gup(edge, beta) {
            Ok(sol) => assert!(sol.residual_norm <= 1e-9),
            Err(Error::Infeasible(_)) | Err(Error::NoConvergence { .. }) => {}
            Err(e) => panic!("unexpected error family: {e:?}"),
        }
    }
}
