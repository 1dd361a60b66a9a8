use num_traits::Zero;

use super::ast::*;
use super::Statement;
use crate::arith::{MultiPoly, Monomial};
use crate::identity::{IdentityStatement, IdentityTerm, Rhs};
use crate::term::{HyperTerm, LinForm, QHyperTerm};

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Add(..) | ExprKind::Sub(..) => 1,
        ExprKind::Mul(..) | ExprKind::Div(..) => 2,
        ExprKind::Neg(_) => 3,
        ExprKind::Pow(..) => 4,
        ExprKind::Num(_) | ExprKind::Var(_) | ExprKind::Call(..) => 5,
    }
}

fn at(e: &Expr, min: u8) -> String {
    let s = render_expr(e);
    if prec(e) < min {
        format!("({s})")
    } else {
        s
    }
}

/// Minimal parenthesization; parsing the output gives back the same tree.
pub fn render_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Num(c) => {
            if c.is_integer() {
                c.to_string()
            } else {
                format!("({}/{})", c.numer(), c.denom())
            }
        }
        ExprKind::Var(v) => v.clone(),
        ExprKind::Neg(a) => format!("-{}", at(a, 3)),
        ExprKind::Add(a, b) => format!("{} + {}", at(a, 1), at(b, 2)),
        ExprKind::Sub(a, b) => format!("{} - {}", at(a, 1), at(b, 2)),
        ExprKind::Mul(a, b) => format!("{}*{}", at(a, 2), at(b, 3)),
        ExprKind::Div(a, b) => format!("{}/{}", at(a, 2), at(b, 3)),
        ExprKind::Pow(a, b) => format!("{}^{}", at(a, 5), at(b, 3)),
        ExprKind::Call(f, args) => format!(
            "{f}({})",
            args.iter().map(render_expr).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn ids(v: &[Ident]) -> String {
    v.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn binder(b: &Binder) -> String {
    let mut s = String::new();
    if !b.sum.is_empty() {
        s.push_str(&format!("{}({}) ", if b.q { "qsum" } else { "sum" }, ids(&b.sum)));
    }
    if !b.int.is_empty() {
        s.push_str(&format!("int({}) ", ids(&b.int)));
    }
    s
}

pub fn render_document(d: &Document) -> String {
    let mut out = String::new();
    match &d.params {
        Some(p) if p.is_empty() => out.push_str("param none;\n"),
        Some(p) => out.push_str(&format!("param {};\n", ids(p))),
        None => {}
    }
    if !d.cont.is_empty() {
        out.push_str(&format!("cont {};\n", ids(&d.cont)));
    }
    if let Some(o) = &d.outer {
        out.push_str(&format!("outer {};\n", o.name));
    }
    for (name, e) in &d.lets {
        out.push_str(&format!("let {} = {};\n", name.name, render_expr(e)));
    }
    if let Some(id) = &d.identity {
        out.push_str(&binder(&id.binder));
        out.push_str(&render_expr(&id.lhs));
        match &id.rhs {
            Some(RhsAst::Expr(e)) => out.push_str(&format!(" = {}", render_expr(e))),
            Some(RhsAst::Sum(b, e)) => {
                out.push_str(&format!(" = {}{}", binder(b), render_expr(e)))
            }
            None => {}
        }
        out.push_str(";\n");
    }
    out
}

/// Canonical text of a term in product form.
pub trait DslTerm: IdentityTerm {
    fn render_factors(&self) -> String;
    fn binder_keyword(&self) -> &'static str;
    fn continuous_names(&self) -> Vec<String>;
}

fn product(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" * ")
    }
}

fn with_exp(s: String, e: i64) -> String {
    match e {
        1 => s,
        e if e < 0 => format!("{s}^({e})"),
        e => format!("{s}^{e}"),
    }
}

impl DslTerm for HyperTerm {
    fn render_factors(&self) -> String {
        let names = HyperTerm::universe(self).names();
        let mut parts = Vec::new();
        for g in self.gammas() {
            parts.push(with_exp(format!("gamma({})", g.arg.render(names)), g.exp));
        }
        for p in self.powers() {
            parts.push(format!("({})^({})", p.base.render(), p.exponent.render(names)));
        }
        if let Some(e) = self.exp_arg() {
            parts.push(format!("exp({})", e.render()));
        }
        if !self.rational().is_one() {
            parts.push(format!("({})", self.rational().render()));
        }
        product(parts)
    }

    fn binder_keyword(&self) -> &'static str {
        "sum"
    }

    fn continuous_names(&self) -> Vec<String> {
        let s = self.shape();
        let mut out = Vec::new();
        if s.outer_continuous {
            out.push(s.outer.clone());
        }
        out.extend(s.inner_continuous);
        out
    }
}

fn quad_poly(t: &QHyperTerm) -> MultiPoly {
    let lu = t.lin_universe();
    let q = t.qpow();
    let mut p = q.lin.to_poly(lu);
    for (&(i, j), c) in &q.quad {
        let mut e = vec![0u32; lu.len()];
        e[i] += 1;
        e[j] += 1;
        p = &p + &MultiPoly::monomial(lu, Monomial::from_exponents(e), c.clone());
    }
    p
}

fn is_zero_lin(l: &LinForm) -> bool {
    l.is_constant() && l.constant_part().is_zero()
}

impl DslTerm for QHyperTerm {
    fn render_factors(&self) -> String {
        let names = self.lin_universe().names();
        let mut parts = Vec::new();
        for f in self.qpochs() {
            let mut base = Vec::new();
            if !f.coeff.is_one() {
                base.push(format!("({})", f.coeff.render()));
            }
            if !is_zero_lin(&f.shift) {
                base.push(format!("q^({})", f.shift.render(names)));
            }
            let base = if base.is_empty() {
                "1".to_string()
            } else {
                base.join("*")
            };
            parts.push(with_exp(format!("qpoch({base}, {})", f.len.render(names)), f.exp));
        }
        if !self.qpow().is_zero() {
            parts.push(format!("qpow({})", quad_poly(self).render()));
        }
        for p in self.geoms() {
            parts.push(format!("({})^({})", p.base.render(), p.exponent.render(names)));
        }
        if !self.rational().is_one() {
            parts.push(format!("({})", self.rational().render()));
        }
        product(parts)
    }

    fn binder_keyword(&self) -> &'static str {
        "qsum"
    }

    fn continuous_names(&self) -> Vec<String> {
        Vec::new()
    }
}

fn term_binder<T: DslTerm>(t: &T) -> String {
    let mut s = String::new();
    let sums = t.shift_names();
    if !sums.is_empty() {
        s.push_str(&format!("{}({}) ", t.binder_keyword(), sums.join(", ")));
    }
    let ints = t.diff_names();
    if !ints.is_empty() {
        s.push_str(&format!("int({}) ", ints.join(", ")));
    }
    s
}

/// Declarations and identity in canonical form; parsing the output gives
/// back an equal statement.
pub fn render_statement<T: DslTerm>(stmt: &IdentityStatement<T>) -> String {
    let lhs = &stmt.lhs;
    let mut out = String::new();
    let params = lhs.param_names();
    if params.is_empty() {
        out.push_str("param none;\n");
    } else {
        out.push_str(&format!("param {};\n", params.join(", ")));
    }
    let cont = lhs.continuous_names();
    if !cont.is_empty() {
        out.push_str(&format!("cont {};\n", cont.join(", ")));
    }
    out.push_str(&format!("outer {};\n", lhs.outer_name()));
    out.push_str(&term_binder(lhs));
    out.push_str(&lhs.render_factors());
    match &stmt.rhs {
        Rhs::Closed(terms) => {
            let r = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.iter().map(|t| t.render_factors()).collect::<Vec<_>>().join(" + ")
            };
            out.push_str(&format!(" = {r};\n"));
        }
        Rhs::Sum(t) => {
            out.push_str(&format!(" = {}{};\n", term_binder(t.as_ref()), t.render_factors()));
        }
        Rhs::Unspecified => out.push_str(";\n"),
        Rhs::Boundary(text) => out.push_str(&format!(";\n# equals {text}\n")),
    }
    out
}

impl Statement {
    pub fn render(&self) -> String {
        match self {
            Statement::Classical(s) => render_statement(s),
            Statement::Q(s) => render_statement(s),
        }
    }
}
