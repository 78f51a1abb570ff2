//! Reference parameter sets used by tests, the verification suite, and the
//! CLI's named-set lookup.
//!
//! The `g*` sets target the ground-state constraint surface, the `e*` sets
//! the first-excited surface. All values are quoted to four decimals and are
//! therefore near, not exactly on, their surfaces; solvers re-close `alpha2`
//! before any computation that needs exact truncation.

use crate::potential::PotentialParams;

/// A named benchmark parameter set together with the state index it targets.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceSet {
    pub name: &'static str,
    pub n: u32,
    pub params: PotentialParams,
}

const fn set(name: &'static str, n: u32, a1: f64, a2: f64, a3: f64, a4: f64) -> ReferenceSet {
    ReferenceSet {
        name,
        n,
        params: PotentialParams {
            alpha1: a1,
            alpha2: a2,
            alpha3: a3,
            alpha4: a4,
        },
    }
}

pub const GROUND_SETS: [ReferenceSet; 3] = [
    set("g1", 0, -0.1, -0.0776, -0.0097, 0.0053),
    set("g2", 0, -0.1, -0.0603, -0.0070, 0.0037),
    set("g3", 0, -0.1, -0.0527, -0.0102, 0.0053),
];

pub const FIRST_EXCITED_SETS: [ReferenceSet; 3] = [
    set("e1", 1, -0.2, -0.0301, -0.0002, 0.0029),
    set("e2", 1, -0.2, -0.0141, -0.0003, 0.0569),
    set("e3", 1, -0.2, -0.0880, -0.0075, 0.0438),
];

pub fn all_sets() -> Vec<ReferenceSet> {
    GROUND_SETS.iter().chain(FIRST_EXCITED_SETS.iter()).copied().collect()
}

pub fn by_name(name: &str) -> Option<ReferenceSet> {
    all_sets().into_iter().find(|s| s.name == name)
}
