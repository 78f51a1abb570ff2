//! Error type shared by all solver and oracle routines.

use thiserror::Error;

/// Failure modes of constructors, solvers, and the eigenvalue oracle.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received arguments outside its domain.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The closed-form energy denominator alpha3 + 2(n+1)*alpha4 vanishes.
    #[error("energy denominator alpha3 + 2(n+1)*alpha4 vanishes at n = {n}")]
    EnergyPole { n: u32 },

    /// The constraint system has no real solution for these inputs.
    #[error("no real solution: {0}")]
    Infeasible(String),

    /// An iterative solver exhausted its budget above tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The discretization error estimate exceeds the requested tolerance.
    #[error("grid too coarse: Richardson estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },

    /// The wavefunction has no finite L2 norm on the half-line.
    #[error("not square-integrable: {0}")]
    NotIntegrable(String),

    /// Evaluation would overflow double precision (Boltzmann factor guard).
    #[error("overflow guard: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
