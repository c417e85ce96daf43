//! Exact sparse multivariate polynomial arithmetic.
//!
//! Polynomials are stored as `monomial -> coefficient` maps over named
//! variables. The monomial order is graded lexicographic with respect to the
//! global variable order (variable names compared as strings), which makes
//! basis enumeration and Gram-matrix indexing deterministic across runs.
//!
//! After every operation coefficients with absolute value below `1e-14` are
//! dropped, so symbolic identities (manifold residuals, reconstruction
//! checks) that cancel exactly stay exactly zero in floating point.

mod matrix;
mod monomial;
mod poly;

pub use matrix::PolyMatrix;
pub use monomial::{monomial_basis, Monomial, VarSet};
pub use poly::{CompiledPoly, Polynomial, TermRepr};

use thiserror::Error;

/// Total-degree cap; anything beyond this is a runaway expression.
pub const MAX_DEGREE: u32 = 20;

/// Coefficients below this magnitude are dropped during normalization.
pub const DROP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("duplicate variable `{0}` in variable set")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is not covered by the evaluation point")]
    MissingPoint(String),
    #[error("monomial references variable `{0}` outside the polynomial's variable set")]
    ForeignVariable(String),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}
