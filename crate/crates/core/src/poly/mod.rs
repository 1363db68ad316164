//! Exact polynomial arithmetic over the fixed variable alphabet.

pub mod det;
pub mod monomial;
pub mod ratexpr;
pub mod sparse;
pub mod text;
pub mod var;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use det::{det, det_bareiss};
pub use monomial::Monomial;
pub use ratexpr::{subst_rat, RatExpr};
pub use sparse::{int, rat, Rational, SparsePoly};
pub use var::{VarId, ALPHABET, MAX_TAIL, NVARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Hex SHA-256 of the canonical text form.
pub fn digest(p: &SparsePoly) -> String {
    hex::encode(Sha256::digest(p.to_string().as_bytes()))
}

/// `poly_subst`: substitute a rational expression for a variable.
pub fn poly_subst(p: &SparsePoly, v: VarId, value: &RatExpr) -> RatExpr {
    subst_rat(p, v, value)
}
