//! Proper-hypergeometric terms and their q-analogues.

mod eval;
mod hyper;
mod linform;
mod qterm;
mod support;

pub use eval::{SymbolicValue, TermValue};
pub use hyper::{GammaFactor, HyperTerm, Op, PowerFactor, TermShape};
pub use linform::LinForm;
pub use qterm::{QHyperTerm, QPochFactor, QTermShape, QuadForm};
pub use support::Support;

pub(crate) use eval::ProductAcc;
pub(crate) use support::support_box;

use crate::arith::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("invalid term: {0}")]
    Invalid(String),
    #[error("non-integer coefficient of discrete variable {0}")]
    NonIntegerCoefficient(String),
    #[error("{0} is not a discrete variable")]
    NotDiscrete(String),
    #[error("{0} is not a continuous variable")]
    NotContinuous(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("discrete variable {0} needs an integer value")]
    NonIntegerDiscrete(String),
    #[error("pole of term")]
    PoleOfTerm,
    #[error("unbound parameter {0}")]
    UnboundParameter(String),
    #[error("non-integer gamma argument")]
    NonIntegerGamma,
    #[error("non-integer exponent")]
    NonIntegerExponent,
    #[error(transparent)]
    Arith(#[from] ArithError),
}
