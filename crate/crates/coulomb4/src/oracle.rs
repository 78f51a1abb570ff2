//! Brute-force finite-difference eigensolver used to cross-check every
//! closed-form result.
//!
//! The radial problem `-psi'' + V psi = eps psi` on `(0, infinity)` is
//! discretized with Dirichlet walls on a truncated interval, either
//! uniformly in `x` or uniformly in `t = ln x`. The logarithmic variant
//! substitutes `psi = sqrt(x) u(t)`, which turns the operator into a
//! symmetric generalized problem with weight `x^2`; symmetrizing by the
//! square root of the weight keeps plain Sturm bisection applicable.
//! Eigenvalues come from bisection on the negative-pivot count of the
//! shifted `L D L^T` factorization, eigenvectors from a few steps of
//! inverse iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefunction::WaveFunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridSpacing {
    Uniform,
    Logarithmic,
}

/// Truncated solution interval and its discretization. `points` counts
/// grid nodes including both Dirichlet endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub points: usize,
    pub spacing: GridSpacing,
}

pub const DEFAULT_GRID_POINTS: usize = 20_000;

impl GridSpec {
    pub fn new(x_lo: f64, x_hi: f64, points: usize, spacing: GridSpacing) -> Result<Self> {
        if !(x_lo > 0.0 && x_lo.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lower edge must be positive and finite, got {x_lo}"
            )));
        }
        if !(x_hi > x_lo && x_hi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "upper edge must exceed the lower edge, got [{x_lo}, {x_hi}]"
            )));
        }
        if points < 1000 {
            return Err(Error::InvalidParams(format!(
                "at least 1000 grid points required, got {points}"
            )));
        }
        Ok(GridSpec { x_lo, x_hi, points, spacing })
    }

    /// Chooses a domain adapted to a given wavefunction: the lower edge is
    /// pushed in until the inner suppression reaches `e^-35`, the upper
    /// edge sits forty decay lengths past the outermost polynomial root.
    pub fn default_for(spec: &WaveFunctionSpec) -> Result<Self> {
        let [a, b, c, d] = spec.exp_coeffs;
        if !(a > 0.0) {
            return Err(Error::InvalidParams(format!(
                "decay rate must be positive to choose a domain, got {a}"
            )));
        }
        let suppression = |x: f64| {
            let u = 1.0 / x;
            a * x + ((d * u + c) * u + b) * u
        };
        let target = 35.0;
        let mut x_lo = 1e-14;
        if suppression(x_lo) > target {
            let mut hi = x_lo;
            let mut doublings = 0;
            while suppression(hi) > target {
                hi *= 2.0;
                doublings += 1;
                if doublings > 200 {
                    return Err(Error::InvalidParams(
                        "inner suppression never falls below the target".into(),
                    ));
                }
            }
            let mut lo = hi / 2.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if suppression(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            x_lo = 0.5 * (lo + hi);
        }

        let degree = spec.poly_coeffs.len().saturating_sub(1);
        let outermost = if degree <= 2 {
            spec.poly_coeffs
                .iter()
                .any(|v| *v != 0.0)
                .then(|| spec.positive_poly_roots().last().copied())
                .flatten()
                .unwrap_or(0.0)
        } else {
            let lead = spec.poly_coeffs[degree];
            1.0 + spec.poly_coeffs[..degree]
                .iter()
                .fold(0.0f64, |m, v| m.max((v / lead).abs()))
        };
        let x_hi = 40.0 / a + outermost;
        GridSpec::new(x_lo, x_hi, DEFAULT_GRID_POINTS, GridSpacing::Logarithmic)
    }

    /// Grid nodes in `x`, endpoints included.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.points;
        let mut out = Vec::with_capacity(n);
        match self.spacing {
            GridSpacing::Uniform => {
                let h = (self.x_hi - self.x_lo) / (n - 1) as f64;
                for i in 0..n {
                    out.push(self.x_lo + h * i as f64);
                }
            }
            GridSpacing::Logarithmic => {
                let (t0, t1) = (self.x_lo.ln(), self.x_hi.ln());
                let h = (t1 - t0) / (n - 1) as f64;
                for i in 0..n {
                    out.push((t0 + h * i as f64).exp());
                }
            }
        }
        out[n - 1] = self.x_hi;
        out
    }
}

/// Output of the finite-difference solve: the lowest eigenvalues in
/// ascending order, the matching normalized eigenvectors sampled on
/// `grid` (zero at both walls), their interior node counts, and a
/// Richardson extrapolation estimate of the discretization error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub node_counts: Vec<usize>,
    pub grid: Vec<f64>,
    pub richardson_error: f64,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

fn assemble(potential: &impl Fn(f64) -> f64, grid: &GridSpec) -> (Vec<f64>, Tridiagonal) {
    let xs = grid.nodes();
    let m = grid.points - 2;
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    match grid.spacing {
        GridSpacing::Uniform => {
            let h = (grid.x_hi - grid.x_lo) / (grid.points - 1) as f64;
            let inv_h2 = 1.0 / (h * h);
            for &x in &xs[1..grid.points - 1] {
                diag.push(2.0 * inv_h2 + potential(x));
            }
            for _ in 0..m.saturating_sub(1) {
                off.push(-inv_h2);
            }
        }
        GridSpacing::Logarithmic => {
            let h = (grid.x_hi.ln() - grid.x_lo.ln()) / (grid.points - 1) as f64;
            let inv_h2 = 1.0 / (h * h);
            let interior = &xs[1..grid.points - 1];
            for &x in interior {
                let w = 0.25 + x * x * potential(x);
                diag.push((2.0 * inv_h2 + w) / (x * x));
            }
            for i in 0..m.saturating_sub(1) {
                off.push(-inv_h2 / (interior[i] * interior[i + 1]).max(f64::MIN_POSITIVE));
            }
        }
    }
    (xs, Tridiagonal { diag, off })
}

const PIVMIN: f64 = 1e-300;

/// Number of eigenvalues strictly below `lambda`, from the signs of the
/// pivots of the shifted factorization.
fn eigenvalues_below(t: &Tridiagonal, lambda: f64) -> usize {
    let mut count = 0usize;
    let mut q = t.diag[0] - lambda;
    if q.abs() < PIVMIN {
        q = -PIVMIN;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..t.diag.len() {
        q = t.diag[i] - lambda - t.off[i - 1] * t.off[i - 1] / q;
        if q.abs() < PIVMIN {
            q = -PIVMIN;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(t: &Tridiagonal) -> (f64, f64) {
    let m = t.diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let mut radius = 0.0;
        if i > 0 {
            radius += t.off[i - 1].abs();
        }
        if i + 1 < m {
            radius += t.off[i].abs();
        }
        lo = lo.min(t.diag[i] - radius);
        hi = hi.max(t.diag[i] + radius);
    }
    (lo, hi)
}

fn bisect_eigenvalue(t: &Tridiagonal, index: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a < 2.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if eigenvalues_below(t, mid) >= index + 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

fn lowest_eigenvalues(t: &Tridiagonal, k: usize) -> Vec<f64> {
    let (lo, hi) = gershgorin_bounds(t);
    (0..k).map(|j| bisect_eigenvalue(t, j, lo, hi)).collect()
}

/// One tridiagonal solve of `(T - sigma I) w = rhs` without pivoting;
/// vanishing pivots are clamped so a shift placed exactly on an
/// eigenvalue still produces a usable direction.
fn shifted_solve(t: &Tridiagonal, sigma: f64, rhs: &[f64]) -> Vec<f64> {
    let m = t.diag.len();
    let guard = |v: f64| {
        if v.abs() < 1e-280 {
            if v >= 0.0 {
                1e-280
            } else {
                -1e-280
            }
        } else {
            v
        }
    };
    let mut c = vec![0.0f64; m];
    let mut d = vec![0.0f64; m];
    let mut den = guard(t.diag[0] - sigma);
    if m > 1 {
        c[0] = t.off[0] / den;
    }
    d[0] = rhs[0] / den;
    for i in 1..m {
        den = guard(t.diag[i] - sigma - t.off[i - 1] * c[i - 1]);
        if i + 1 < m {
            c[i] = t.off[i] / den;
        }
        d[i] = (rhs[i] - t.off[i - 1] * d[i - 1]) / den;
    }
    for i in (0..m - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    d
}

fn inverse_iteration(t: &Tridiagonal, lambda: f64) -> Vec<f64> {
    let m = t.diag.len();
    let sigma = lambda * (1.0 + 1e-12);
    let mut v = vec![1.0f64; m];
    for _ in 0..3 {
        let w = shifted_solve(t, sigma, &v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        v = w.iter().map(|x| x / norm).collect();
    }
    v
}

/// Counts strict sign changes, skipping entries below `1e-12` of the
/// largest magnitude.
pub fn count_nodes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    let floor = 1e-12 * max;
    let mut nodes = 0;
    let mut prev = 0.0f64;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if prev != 0.0 && v.signum() != prev.signum() {
            nodes += 1;
        }
        prev = v;
    }
    nodes
}

fn trapezoid_norm(xs: &[f64], psi: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        acc += 0.5 * dx * (psi[i] * psi[i] + psi[i + 1] * psi[i + 1]);
    }
    acc
}

/// Computes the `k` lowest Dirichlet eigenpairs of `-psi'' + V psi` on
/// the truncated interval. When `richardson_tol` is given, the solve is
/// repeated on a half-resolution grid and the extrapolated error estimate
/// must not exceed the tolerance.
pub fn fd_eigen_solve(
    potential: impl Fn(f64) -> f64,
    grid: &GridSpec,
    k: usize,
    richardson_tol: Option<f64>,
) -> Result<OracleResult> {
    let interior = grid.points.saturating_sub(2);
    if k > interior {
        return Err(Error::InvalidParams(format!(
            "requested {k} eigenvalues from {interior} interior points"
        )));
    }
    let (xs, t) = assemble(&potential, grid);
    let eigenvalues = lowest_eigenvalues(&t, k);

    let coarse = GridSpec {
        points: (grid.points / 2).max(k + 2),
        ..*grid
    };
    let (_, t_coarse) = assemble(&potential, &coarse);
    let coarse_eigs = lowest_eigenvalues(&t_coarse, k);
    let richardson_error = eigenvalues
        .iter()
        .zip(&coarse_eigs)
        .fold(0.0f64, |m, (fine, co)| m.max((fine - co).abs() / 3.0));
    if let Some(tol) = richardson_tol {
        if richardson_error > tol {
            return Err(Error::GridTooCoarse {
                estimate: richardson_error,
                tolerance: tol,
            });
        }
    }

    let mut eigenvectors = Vec::with_capacity(k);
    let mut node_counts = Vec::with_capacity(k);
    for &lambda in &eigenvalues {
        let v = inverse_iteration(&t, lambda);
        let mut psi = vec![0.0f64; grid.points];
        match grid.spacing {
            GridSpacing::Uniform => {
                psi[1..grid.points - 1].copy_from_slice(&v);
            }
            GridSpacing::Logarithmic => {
                for (i, value) in v.iter().enumerate() {
                    psi[i + 1] = value / xs[i + 1].sqrt();
                }
            }
        }
        let norm = trapezoid_norm(&xs, &psi);
        if norm > 0.0 && norm.is_finite() {
            let scale = norm.sqrt();
            for value in &mut psi {
                *value /= scale;
            }
        }
        let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = psi.iter().find(|v| v.abs() > 1e-12 * max) {
            if *first < 0.0 {
                for value in &mut psi {
                    *value = -*value;
                }
            }
        }
        node_counts.push(count_nodes(&psi));
        eigenvectors.push(psi);
    }

    Ok(OracleResult {
        eigenvalues,
        eigenvectors,
        node_counts,
        grid: xs,
        richardson_error,
    })
}

/// Largest pointwise defect of an analytic wavefunction against
/// `psi'' = Ve psi`, with `Ve` the energy-shifted potential. Writing
/// `psi = e^phi P` with `M = phi'` turns the defect into
/// `Ve P - (M' + M^2) P - 2 M P' - P''`; it is normalized by the sum of
/// the magnitudes of all participating terms so that an exact solution
/// scores near machine precision at every node, including inflection
/// points where the raw defect and the raw scale vanish together.
pub fn ode_residual(
    spec: &WaveFunctionSpec,
    shifted_potential: impl Fn(f64) -> f64,
    grid: &GridSpec,
) -> Result<f64> {
    if spec.is_trivial() {
        return Err(Error::InvalidParams(
            "residual of the zero function is meaningless".into(),
        ));
    }
    let xs = grid.nodes();
    let mut worst = 0.0f64;
    for &x in &xs[1..xs.len() - 1] {
        let ve = shifted_potential(x);
        let m = spec.log_derivative(x);
        let mp = spec.log_derivative_prime(x);
        let p = spec.poly_value(x);
        let p1 = spec.poly_derivative(x);
        let p2 = spec.poly_second_derivative(x);
        let defect = ve * p - (mp + m * m) * p - 2.0 * m * p1 - p2;
        let scale = (mp.abs() + m * m) * p.abs()
            + 2.0 * m.abs() * p1.abs()
            + p2.abs()
            + ve.abs() * p.abs()
            + 1e-300;
        worst = worst.max(defect.abs() / scale);
    }
    Ok(worst)
}

/// Squared-norm of the wavefunction over the grid by composite Simpson
/// quadrature in the grid parameter, returned as
/// `(1/sqrt(norm), norm)`. Refuses shapes whose dominant small-`x- or
/// large-`x` behaviour is non-normalizable.
pub fn normalize(spec: &WaveFunctionSpec, grid: &GridSpec) -> Result<(f64, f64)> {
    let [a, b, c, d] = spec.exp_coeffs;
    if !(a > 0.0) {
        return Err(Error::NotIntegrable(format!(
            "wavefunction does not decay at infinity: a = {a}"
        )));
    }
    let inner_ok = if d != 0.0 {
        d > 0.0
    } else if c != 0.0 {
        c > 0.0
    } else if b != 0.0 {
        b > 0.0
    } else {
        2.0 * spec.power > -1.0
    };
    if !inner_ok {
        return Err(Error::NotIntegrable(
            "wavefunction is not square-integrable near the origin".into(),
        ));
    }

    let xs = grid.nodes();
    let integrand: Vec<f64> = match grid.spacing {
        GridSpacing::Uniform => xs
            .iter()
            .map(|&x| {
                let v = spec.evaluate_wavefunction(x).unwrap_or(0.0);
                v * v
            })
            .collect(),
        GridSpacing::Logarithmic => xs
            .iter()
            .map(|&x| {
                let v = spec.evaluate_wavefunction(x).unwrap_or(0.0);
                v * v * x
            })
            .collect(),
    };
    let h = match grid.spacing {
        GridSpacing::Uniform => (grid.x_hi - grid.x_lo) / (grid.points - 1) as f64,
        GridSpacing::Logarithmic => (grid.x_hi.ln() - grid.x_lo.ln()) / (grid.points - 1) as f64,
    };

    let n = integrand.len();
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 2 };
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += h / 3.0 * (integrand[i] + 4.0 * integrand[i + 1] + integrand[i + 2]);
        i += 2;
    }
    if simpson_end == n - 2 {
        acc += 0.5 * h * (integrand[n - 2] + integrand[n - 1]);
    }
    if !(acc > 0.0 && acc.is_finite()) {
        return Err(Error::NotIntegrable(format!(
            "quadrature produced a non-positive norm: {acc}"
        )));
    }
    Ok((1.0 / acc.sqrt(), acc))
}
