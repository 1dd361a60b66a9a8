//! Text format for terms and identities.
//!
//! ```text
//! param alpha;            # or `param none;`
//! cont x;                 # continuous variables
//! outer x;                # optional
//! let w = x*y;            # macro, expanded in later expressions
//! sum(m) int(u) <expr> = <expr>;
//! ```
//!
//! Factors: `factorial(a)`, `gamma(a)`, `pochhammer(a, m)`, `binom(a, b)`,
//! `exp(r)`, `base^e`, and in q-sums `qpoch(c*q^(a), m)`, `qbin(a, b)`,
//! `qpow(quadratic)`. Anything else must be a rational function.

mod ast;
mod lexer;
mod lower;
mod parser;
mod rational;
mod render;

use std::fmt;

pub use ast::{Binder, Document, Expr, ExprKind, Ident, IdentityAst, RhsAst, SourceSpan};
pub use lower::lower;
pub use parser::{parse_document, parse_expr};
pub use rational::{eval_rational, parse_rational};
pub use render::{render_document, render_expr, render_statement, DslTerm};

use crate::identity::IdentityStatement;
use crate::term::{HyperTerm, QHyperTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub kind: DslErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

impl DslError {
    pub fn syntax(message: impl Into<String>, span: SourceSpan) -> Self {
        DslError {
            kind: DslErrorKind::Syntax,
            message: message.into(),
            span,
        }
    }

    pub fn semantic(message: impl Into<String>, span: SourceSpan) -> Self {
        DslError {
            kind: DslErrorKind::Semantic,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            DslErrorKind::Syntax => "syntax error",
            DslErrorKind::Semantic => "error",
        };
        write!(f, "{}: {what}: {}", self.span, self.message)
    }
}

impl std::error::Error for DslError {}

/// A lowered input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Classical(IdentityStatement<HyperTerm>),
    Q(IdentityStatement<QHyperTerm>),
}

impl Statement {
    pub fn is_q(&self) -> bool {
        matches!(self, Statement::Q(_))
    }
}

pub(crate) const NO_IDENTITY: &str = "no identity or term (expected `sum(...)`, `qsum(...)` or `int(...)`)";

/// Parse and lower; `force_q` treats the file as a q-sum even without
/// `qsum` or q-functions.
pub fn parse_with(text: &str, force_q: bool) -> Result<Statement, DslError> {
    let doc = parse_document(text)?;
    if doc.identity.is_none() {
        return Err(DslError::semantic(NO_IDENTITY, end_of(text)));
    }
    lower(&doc, force_q)
}

fn end_of(text: &str) -> SourceSpan {
    let line_start = text.rfind('\n').map_or(0, |i| i + 1);
    SourceSpan {
        line: text.matches('\n').count() + 1,
        column: text[line_start..].chars().count() + 1,
        start: text.len(),
        end: text.len(),
    }
}

pub fn parse(text: &str) -> Result<Statement, DslError> {
    parse_with(text, false)
}
