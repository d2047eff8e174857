//! Exact scalars, truncated t-series and Laurent polynomials in u.

mod laurent;
mod scalar;
mod series;

pub use laurent::ULaurent;
pub use scalar::{coeff_c, Field};
pub use series::{degree, monomials_of_degree, Monomial, TSeries};
