//! Coulomb-4 potential parameters and related domain types.
//!
//! Scaled units throughout: energies carry a factor 2m/hbar^2 = 1 and
//! k_B = 1, so the potential, all epsilons, and temperatures are plain
//! inverse-length-squared numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Couplings of the four-term attractive potential
/// `V(x) = alpha1/x + alpha2/x^2 + alpha3/x^3 + alpha4^2/x^4` on x > 0.
///
/// `alpha4` is stored as the length scale itself; it enters the potential
/// squared, which keeps its sign unambiguous in wavefunction exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
}

impl PotentialParams {
    /// Builds validated parameters. Requires `alpha1 < 0` (attraction) and
    /// `alpha4 > 0` (repulsive core); `alpha2`, `alpha3` are unrestricted.
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, alpha4: f64) -> Result<Self> {
        if !(alpha1 < 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha1 must be negative, got {alpha1}"
            )));
        }
        if !(alpha4 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha4 must be positive, got {alpha4}"
            )));
        }
        if !alpha2.is_finite() || !alpha3.is_finite() {
            return Err(Error::InvalidParams(
                "alpha2 and alpha3 must be finite".into(),
            ));
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
            alpha4,
        })
    }

    /// Exponent of the bound-state power prefactor, `delta = 1 + alpha3/(2*alpha4)`.
    pub fn delta(&self) -> f64 {
        1.0 + self.alpha3 / (2.0 * self.alpha4)
    }

    /// True when the power prefactor is regular at the origin (`delta > 0`),
    /// the admissibility condition for closed-form bound states.
    pub fn is_qes_admissible(&self) -> bool {
        self.delta() > 0.0
    }

    /// Potential value at `x > 0` in scaled units.
    pub fn potential_value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
        }
        Ok(self.value_at(x))
    }

    /// Unchecked evaluation for hot loops; caller guarantees `x > 0`.
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        let u = 1.0 / x;
        (((self.alpha4 * self.alpha4 * u + self.alpha3) * u + self.alpha2) * u + self.alpha1) * u
    }
}

/// Minimal-length deformation strength (dimensionless `beta >= 0`);
/// `beta = 0` recovers the ordinary Schroedinger problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GupContext {
    pub beta: f64,
}

impl GupContext {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "beta must be non-negative, got {beta}"
            )));
        }
        Ok(Self { beta })
    }
}

/// The two energies attached to one level: `eps_ordinary` is the beta = 0
/// eigenvalue that enters the deformed equation as a parameter, `eps_gup`
/// the corrected eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPair {
    pub n: u32,
    pub eps_ordinary: f64,
    pub eps_gup: f64,
}

impl EnergyPair {
    /// Requires `eps_ordinary < 0`: every closed-form level is bound.
    pub fn new(n: u32, eps_ordinary: f64, eps_gup: f64) -> Result<Self> {
        if !(eps_ordinary < 0.0) {
            return Err(Error::InvalidParams(format!(
                "eps_ordinary must be negative, got {eps_ordinary}"
            )));
        }
        if !eps_gup.is_finite() {
            return Err(Error::InvalidParams("eps_gup must be finite".into()));
        }
        Ok(Self {
            n,
            eps_ordinary,
            eps_gup,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_coupling_signs() {
        assert!(PotentialParams::new(0.1, 0.0, 0.0, 1.0).is_err());
        assert!(PotentialParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(PotentialParams::new(-0.1, 0.0, 0.0, -1.0).is_err());
        assert!(PotentialParams::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(PotentialParams::new(-0.1, f64::NAN, 0.0, 1.0).is_err());
        assert!(PotentialParams::new(-0.1, 0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn cancelling_couplings_vanish_at_unit_x() {
        let p = PotentialParams::new(-1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.potential_value(1.0).unwrap(), 0.0);
    }

    #[test]
    fn value_matches_direct_sum_on_reference_set() {
        // -0.1 - 0.0776 - 0.0097 + 0.0053^2 at x = 1.
        let p = PotentialParams::new(-0.1, -0.0776, -0.0097, 0.0053).unwrap();
        let direct = -0.1 - 0.0776 - 0.0097 + 0.0053_f64 * 0.0053;
        let v = p.potential_value(1.0).unwrap();
        assert!((v - direct).abs() <= 1e-15, "v={v}, direct={direct}");
        assert!((v + 0.18727191).abs() < 1e-8);
    }

    #[test]
    fn attractive_tail_approaches_zero_from_below() {
        let p = PotentialParams::new(-1.0, 0.0, 0.0, 1.0).unwrap();
        let mut prev = p.potential_value(10.0).unwrap();
        for &x in &[1e2, 1e4, 1e6] {
            let v = p.potential_value(x).unwrap();
            assert!(v < 0.0, "tail must stay negative at x={x}");
            assert!(v > prev, "tail must increase toward zero at x={x}");
            prev = v;
        }
        assert!(prev.abs() < 1e-5);
    }

    #[test]
    fn rejects_non_positive_x() {
        let p = PotentialParams::new(-1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(p.potential_value(0.0).is_err());
        assert!(p.potential_value(-2.0).is_err());
    }

    #[test]
    fn delta_accessor_and_admissibility() {
        // delta > 0 exactly when alpha3 > -2*alpha4.
        let p = PotentialParams::new(-0.1, 0.0, -0.0097, 0.0053).unwrap();
        assert!((p.delta() - (1.0 - 0.0097 / 0.0106)).abs() < 1e-15);
        assert!(p.is_qes_admissible());
        let q = PotentialParams::new(-0.1, 0.0, -0.02, 0.0053).unwrap();
        assert!(!q.is_qes_admissible());
        let border = PotentialParams::new(-0.1, 0.0, -2.0 * 0.0053, 0.0053).unwrap();
        assert!(!border.is_qes_admissible());
    }

    #[test]
    fn energy_pair_requires_bound_ordinary_level() {
        assert!(EnergyPair::new(0, -0.5, 0.25).is_ok());
        assert!(EnergyPair::new(0, 0.5, 0.25).is_err());
        assert!(EnergyPair::new(0, -0.5, f64::NAN).is_err());
    }

    #[test]
    fn gup_context_rejects_negative_beta() {
        assert!(GupContext::new(-0.1).is_err());
        assert!(GupContext::new(0.0).is_ok());
        assert!(GupContext::new(1.0).is_ok());
    }
}
