//! Bound-state partition function and derived thermodynamic quantities.
//!
//! The closed-form spectrum `eps_n = -(alpha1 alpha4 / (xi1 + 2 alpha4
//! n))^2` with `xi1 = alpha3 + 2 alpha4` makes the Boltzmann weight an
//! explicit function of the level index, so the truncated partition sum
//! can be evaluated both directly and through the Euler-Maclaurin
//! formula, whose integral term reduces to the imaginary error function.
//! The two routes bound each other: their difference must stay within
//! the analytic remainder estimate.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::PotentialParams;

/// `B_{2m}/(2m)!` for `m = 1..=5`.
const EM_COEFF: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
];

const EXP_ARG_LIMIT: f64 = 700.0;

/// A truncated partition-sum request: levels `0..=nu` at the given
/// temperature, with `em_order` Bernoulli correction terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionRequest {
    pub params: PotentialParams,
    pub temperature: f64,
    pub nu: u32,
    pub em_order: usize,
}

impl PartitionRequest {
    pub fn new(params: PotentialParams, temperature: f64, nu: u32, em_order: usize) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        if !(1..=4).contains(&em_order) {
            return Err(Error::InvalidParams(format!(
                "between 1 and 4 correction terms supported, got {em_order}"
            )));
        }
        Ok(PartitionRequest { params, temperature, nu, em_order })
    }
}

/// Both evaluations of the truncated sum plus the pieces of the
/// Euler-Maclaurin side: `z_euler_maclaurin = integral_term +
/// sum(correction_terms)`, where `correction_terms[0]` is the endpoint
/// average and the remaining entries are the Bernoulli-ladder terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub z_direct: f64,
    pub z_euler_maclaurin: f64,
    pub integral_term: f64,
    pub correction_terms: Vec<f64>,
    pub remainder_estimate: f64,
}

/// One row of the thermodynamic table. Heat capacity, internal energy,
/// and entropy need a three-point stencil in inverse temperature, so the
/// first and last rows carry only the partition function and free
/// energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoRow {
    pub temperature: f64,
    pub z: f64,
    pub f: f64,
    pub u: Option<f64>,
    pub c: Option<f64>,
    pub s: Option<f64>,
}

struct BoltzmannLadder {
    xi1: f64,
    two_alpha4: f64,
    k_const: f64,
}

impl BoltzmannLadder {
    fn new(p: &PotentialParams, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        let xi1 = p.alpha3 + 2.0 * p.alpha4;
        if !(xi1 > 0.0) {
            return Err(Error::Infeasible(format!(
                "spectrum denominator must be positive, alpha3 + 2 alpha4 = {xi1}"
            )));
        }
        let k_const = p.alpha1 * p.alpha1 * p.alpha4 * p.alpha4 / temperature;
        if k_const / (xi1 * xi1) > EXP_ARG_LIMIT {
            return Err(Error::Overflow(format!(
                "ground-state Boltzmann exponent {} exceeds {EXP_ARG_LIMIT}",
                k_const / (xi1 * xi1)
            )));
        }
        Ok(BoltzmannLadder { xi1, two_alpha4: 2.0 * p.alpha4, k_const })
    }

    fn weight(&self, n: f64) -> f64 {
        let u = self.xi1 + self.two_alpha4 * n;
        (self.k_const / (u * u)).exp()
    }

    /// Coefficients `q_i` of the order-th derivative in the
    /// representation `f^(order) = e^{K w^2} sum_i q_i w^i`, `w = 1/u`.
    /// Differentiating maps `q_i` to `-2 alpha4 i q_i` at `w^{i+1}` and
    /// `-4 alpha4 K q_i` at `w^{i+3}`.
    fn derivative_coeffs(&self, order: usize) -> Vec<f64> {
        let alpha4 = self.two_alpha4 / 2.0;
        let mut q = vec![1.0f64];
        for _ in 0..order {
            let mut next = vec![0.0f64; q.len() + 3];
            for (i, qi) in q.iter().enumerate() {
                if *qi == 0.0 {
                    continue;
                }
                next[i + 1] += -2.0 * alpha4 * i as f64 * qi;
                next[i + 3] += -4.0 * alpha4 * self.k_const * qi;
            }
            q = next;
        }
        q
    }

    fn derivative_at(&self, coeffs: &[f64], n: f64) -> f64 {
        let u = self.xi1 + self.two_alpha4 * n;
        let w = 1.0 / u;
        let mut poly = 0.0f64;
        for qi in coeffs.iter().rev() {
            poly = poly * w + qi;
        }
        (self.k_const * w * w).exp() * poly
    }
}

/// Direct Boltzmann sum over levels `0..=nu`, compensated so that long
/// ladders of near-equal terms do not lose digits.
pub fn partition_direct(req: &PartitionRequest) -> Result<f64> {
    let ladder = BoltzmannLadder::new(&req.params, req.temperature)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 0..=req.nu {
        let y = ladder.weight(n as f64) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Antiderivative route for the Euler-Maclaurin integral term:
/// `int_0^nu f dn = (1/(2 alpha4)) [u e^{K/u^2} - sqrt(pi K)
/// erfi(sqrt(K)/u)]` evaluated between `u = xi1` and
/// `u = xi1 + 2 alpha4 nu`.
pub fn erfi_integral(p: &PotentialParams, temperature: f64, nu: u32) -> Result<f64> {
    let ladder = BoltzmannLadder::new(p, temperature)?;
    if nu == 0 {
        return Ok(0.0);
    }
    if ladder.k_const == 0.0 {
        return Ok(nu as f64);
    }
    let sqrt_k = ladder.k_const.sqrt();
    let anti = |u: f64| -> Result<f64> {
        Ok(u * (ladder.k_const / (u * u)).exp() - (PI * ladder.k_const).sqrt() * erfi(sqrt_k / u)?)
    };
    let u_hi = ladder.xi1 + ladder.two_alpha4 * nu as f64;
    Ok((anti(u_hi)? - anti(ladder.xi1)?) / ladder.two_alpha4)
}

/// Euler-Maclaurin evaluation of the truncated sum alongside the direct
/// one, with the first omitted Bernoulli term as remainder estimate.
pub fn partition_euler_maclaurin(req: &PartitionRequest) -> Result<PartitionResult> {
    if !(1..=4).contains(&req.em_order) {
        return Err(Error::InvalidParams(format!(
            "between 1 and 4 correction terms supported, got {}",
            req.em_order
        )));
    }
    let ladder = BoltzmannLadder::new(&req.params, req.temperature)?;
    let z_direct = partition_direct(req)?;
    let integral_term = erfi_integral(&req.params, req.temperature, req.nu)?;
    let nu = req.nu as f64;

    let mut correction_terms = vec![0.5 * (ladder.weight(0.0) + ladder.weight(nu))];
    for m in 1..=req.em_order {
        let coeffs = ladder.derivative_coeffs(2 * m - 1);
        let jump = ladder.derivative_at(&coeffs, nu) - ladder.derivative_at(&coeffs, 0.0);
        correction_terms.push(EM_COEFF[m - 1] * jump);
    }
    let tail_coeffs = ladder.derivative_coeffs(2 * req.em_order + 1);
    let tail_jump =
        ladder.derivative_at(&tail_coeffs, nu) - ladder.derivative_at(&tail_coeffs, 0.0);
    let remainder_estimate = (EM_COEFF[req.em_order] * tail_jump).abs();

    let z_euler_maclaurin = integral_term + correction_terms.iter().sum::<f64>();
    Ok(PartitionResult {
        z_direct,
        z_euler_maclaurin,
        integral_term,
        correction_terms,
        remainder_estimate,
    })
}

/// Partition function and its standard derived quantities on a
/// temperature grid (strictly increasing, all positive, at least three
/// points). Internal energy, heat capacity, and entropy come from
/// three-point stencils in `b = 1/T`, so the edge rows report only `z`
/// and the free energy.
pub fn thermo_quantities(
    params: &PotentialParams,
    t_grid: &[f64],
    nu: u32,
) -> Result<Vec<ThermoRow>> {
    if t_grid.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "at least three temperatures required, got {}",
            t_grid.len()
        )));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParams(
            "temperatures must be positive and finite".into(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "temperatures must be strictly increasing".into(),
        ));
    }

    let mut ln_z = Vec::with_capacity(t_grid.len());
    let mut z_all = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let ladder = BoltzmannLadder::new(params, t)?;
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for n in 0..=nu {
            let y = ladder.weight(n as f64) - comp;
            let tt = sum + y;
            comp = (tt - sum) - y;
            sum = tt;
        }
        z_all.push(sum);
        ln_z.push(sum.ln());
    }

    let b: Vec<f64> = t_grid.iter().map(|t| 1.0 / t).collect();
    let mut rows = Vec::with_capacity(t_grid.len());
    for i in 0..t_grid.len() {
        let temperature = t_grid[i];
        let z = z_all[i];
        let free = -temperature * ln_z[i];
        if i == 0 || i + 1 == t_grid.len() {
            rows.push(ThermoRow { temperature, z, f: free, u: None, c: None, s: None });
            continue;
        }
        let (b0, b1, b2) = (b[i - 1], b[i], b[i + 1]);
        let (y0, y1, y2) = (ln_z[i - 1], ln_z[i], ln_z[i + 1]);
        let d1 = y0 * (b1 - b2) / ((b0 - b1) * (b0 - b2))
            + y1 * (2.0 * b1 - b0 - b2) / ((b1 - b0) * (b1 - b2))
            + y2 * (b1 - b0) / ((b2 - b0) * (b2 - b1));
        let d2 = 2.0
            * (y0 / ((b0 - b1) * (b0 - b2))
                + y1 / ((b1 - b0) * (b1 - b2))
                + y2 / ((b2 - b0) * (b2 - b1)));
        let u = -d1;
        let c = b1 * b1 * d2;
        let s = (u - free) / temperature;
        rows.push(ThermoRow { temperature, z, f: free, u: Some(u), c: Some(c), s: Some(s) });
    }
    Ok(rows)
}

/// Dawson integral `D(x) = e^{-x^2} int_0^x e^{t^2} dt`, accurate to a
/// few ulps across the real line: Maclaurin series below 1, a backward
/// continued fraction up to 8, the asymptotic series beyond.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax < 1.0 {
        let mut term = ax;
        let mut sum = ax;
        let mut n = 0u32;
        while term.abs() > 1e-18 * sum.abs() {
            term *= -2.0 * ax * ax / (2.0 * n as f64 + 3.0);
            sum += term;
            n += 1;
            if n > 60 {
                break;
            }
        }
        sum
    } else if ax < 8.0 {
        let two_x2 = 2.0 * ax * ax;
        let mut r = 2.0 * 120.0 + 1.0 + two_x2;
        for k in (0..120u32).rev() {
            let a_next = 4.0 * (k + 1) as f64 * ax * ax;
            r = (2.0 * k as f64 + 1.0 + two_x2) - a_next / r;
        }
        ax / r
    } else {
        let inv_2x2 = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0 / (2.0 * ax);
        let mut sum = term;
        for n in 0..40u32 {
            let next = term * (2.0 * n as f64 + 1.0) * inv_2x2;
            if next.abs() >= term.abs() || next.abs() <= 1e-18 * sum.abs() {
                break;
            }
            sum += next;
            term = next;
        }
        sum
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Imaginary error function `erfi(z) = (2/sqrt(pi)) e^{z^2} D(z)`.
/// Rejects `|z| > 26`, beyond which `e^{z^2}` leaves the double range.
pub fn erfi(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::InvalidParams(format!("erfi argument {z}")));
    }
    if z.abs() > 26.0 {
        return Err(Error::Overflow(format!(
            "erfi({z}) exceeds the representable range"
        )));
    }
    let az = z.abs();
    let value = 2.0 / PI.sqrt() * (az * az).exp() * dawson(az);
    Ok(if z < 0.0 { -value } else { value })
}
