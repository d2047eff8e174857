//! Categorical Gromov–Witten invariants of the A_n matrix-factorization
//! category, computed with exact rational arithmetic.

pub mod bar;
pub mod checks;
pub mod coeffs;
pub mod connection;
pub mod costello;
pub mod decompose;
pub mod error;
pub mod family;
pub mod homology;
pub mod linalg;
pub mod pairing;
pub mod potential;
pub mod report;
pub mod solver;

pub use error::{Error, Result};

/// Default exact scalar.
pub type Scalar = num_rational::BigRational;
/// t-series over [`Scalar`].
pub type Series = coeffs::TSeries<Scalar>;
/// Cyclic chains over [`Scalar`].
pub type Chain = bar::UChain<Scalar>;
