use std::fmt;

use num_rational::BigRational;

/// Position of a piece of input: 1-based line and column of the start,
/// byte offsets `start..end`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            end: other.end.max(self.end),
            ..self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Num(BigRational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

/// Expression node; equality ignores spans.
#[derive(Clone, Debug, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: SourceSpan::default(),
        }
    }

    pub fn num(n: i64) -> Self {
        Expr::new(ExprKind::Num(BigRational::from_integer(n.into())))
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.to_string()))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call(name.to_string(), args))
    }
}

#[derive(Clone, Debug, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Ident {
    pub fn new(name: &str) -> Self {
        Ident {
            name: name.to_string(),
            span: SourceSpan::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    /// `qsum` instead of `sum`.
    pub q: bool,
    pub sum: Vec<Ident>,
    pub int: Vec<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhsAst {
    Expr(Expr),
    Sum(Binder, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityAst {
    pub binder: Binder,
    pub lhs: Expr,
    pub rhs: Option<RhsAst>,
}

/// A parsed input file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    /// `None` when there is no `param` line; `param none;` gives `Some([])`.
    pub params: Option<Vec<Ident>>,
    pub cont: Vec<Ident>,
    pub outer: Option<Ident>,
    pub lets: Vec<(Ident, Expr)>,
    pub identity: Option<IdentityAst>,
}
