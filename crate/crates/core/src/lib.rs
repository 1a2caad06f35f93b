//! Explicit local hidden-variable (LHV) models for separable bipartite states.
//!
//! The crate is split along the objects it manipulates:
//!
//! - [`operator`]: dense complex matrices, Hermitian and density operators,
//!   Kronecker products, commutators, spectra and expectation values.
//! - [`probability`]: finite probability spaces, events, response functions and
//!   the finite integral `sum_w M(w) f1(v1, w) f2(v2, w)`.
//! - [`lhv`]: the conditional-state construction of an LHV model from a
//!   separable decomposition, reproduction checks, the `U(alpha, beta)` family
//!   and the noncommutativity witness event.
//! - [`chsh`]: spin observables, correlation functions, CHSH values and a
//!   deterministic setting search.
//! - [`random`]: seeded generators for probes, product states and decompositions.
//! - [`io`]: the JSON model file format.

#![forbid(unsafe_code)]

pub mod chsh;
pub mod error;
pub mod io;
pub mod lhv;
pub mod operator;
pub mod probability;
pub mod random;

pub use error::{Error, Result};

/// Numerical tolerances shared by the validators.
///
/// The defaults leave many orders of magnitude of headroom for the 2x2 and
/// 4x4 problems this crate is built around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm deviation allowed between a matrix and its adjoint.
    pub herm: f64,
    /// Allowed deviation of a density operator's trace from 1.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a density operator.
    pub psd: f64,
    /// Allowed deviation of a measure's total mass from 1, and of any weight below 0.
    pub measure: f64,
    /// Slack on the spectrum interval `[I(v), S(v)]` for response values.
    pub range: f64,
    /// Magnitude below which a response value counts as zero.
    pub null: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-10,
        trace: 1e-10,
        psd: 1e-9,
        measure: 1e-10,
        range: 1e-10,
        null: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
