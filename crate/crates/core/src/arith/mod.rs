//! Exact arithmetic: rationals, sparse multivariate polynomials and reduced
//! rational functions over a named variable universe.

mod gcd;
mod poly;
mod ratfun;
mod universe;

pub use gcd::{gcd, lcm};
pub use num_rational::BigRational;
pub use poly::{rat, Monomial, MultiPoly};
pub use ratfun::{coefficient_lcm, common_denominator, RatFun};
pub use universe::Universe;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("inexact division")]
    InexactDivision,
    #[error("variable universe mismatch")]
    UniverseMismatch,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("degenerate substitution")]
    DegenerateSubstitution,
    #[error("evaluation at a pole")]
    Pole,
}

/// Binary polynomial operation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    ExactDiv,
    Gcd,
}

pub fn poly_ops(a: &MultiPoly, b: &MultiPoly, op: PolyOp) -> Result<MultiPoly, ArithError> {
    if !a.universe().same(b.universe()) {
        return Err(ArithError::UniverseMismatch);
    }
    match op {
        PolyOp::Add => a.try_add(b),
        PolyOp::Sub => a.try_sub(b),
        PolyOp::Mul => a.try_mul(b),
        PolyOp::ExactDiv => a.exact_div(b),
        PolyOp::Gcd => Ok(gcd(a, b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn ratfun_ops(a: &RatFun, b: &RatFun, op: RatOp) -> Result<RatFun, ArithError> {
    match op {
        RatOp::Add => a.try_add(b),
        RatOp::Sub => a.try_sub(b),
        RatOp::Mul => a.try_mul(b),
        RatOp::Div => a.try_div(b),
    }
}
