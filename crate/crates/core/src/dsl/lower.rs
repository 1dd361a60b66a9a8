//! AST to terms: symbol roles, desugaring of binomials and friends, and
//! the integrality rules for discrete variables.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ast::*;
use super::{DslError, Statement};
use crate::arith::{Monomial, MultiPoly, RatFun, Universe};
use crate::identity::{IdentityStatement, IdentityTerm, Rhs};
use crate::term::{
    HyperTerm, LinForm, QHyperTerm, QTermShape, QuadForm, TermError, TermShape,
};

const Q_FUNCTIONS: [&str; 3] = ["qpoch", "qbin", "qpow"];

fn term_err(e: TermError, span: SourceSpan) -> DslError {
    DslError::semantic(e.to_string(), span)
}

/// Roles of the variables of one side.
#[derive(Clone, Debug)]
pub(crate) struct Roles {
    outer: String,
    outer_continuous: bool,
    sum: Vec<String>,
    int: Vec<String>,
    params: Vec<String>,
}

/// Hooks for the two term families.
pub(crate) trait Lower: IdentityTerm + Times + Sized {
    fn unit(roles: &Roles) -> Result<Self, TermError>;
    /// Universe of exponents and factor arguments.
    fn index_universe(&self) -> &Universe;
    fn scalar(&self, r: &RatFun) -> Result<Self, TermError> {
        self.times_rational(r)
    }
    fn as_rational(&self) -> Option<RatFun>;
    fn symbol(&self, name: &str) -> Result<RatFun, String>;
    fn power(lw: &Lowerer<Self>, base: &Expr, exp: &RatFun, span: SourceSpan)
        -> Result<Vec<Self>, DslError>;
    fn call(lw: &Lowerer<Self>, name: &str, args: &[Expr], span: SourceSpan)
        -> Result<Self, DslError>;
}

pub(crate) struct Lowerer<T> {
    unit: T,
}

fn affine(p: &RatFun, span: SourceSpan, what: &str) -> Result<LinForm, DslError> {
    let Some(poly) = p.to_poly() else {
        return Err(DslError::semantic(format!("{what} must be affine"), span));
    };
    if poly.total_degree() > 1 {
        return Err(DslError::semantic(format!("{what} must be affine"), span));
    }
    let len = poly.universe().len();
    let mut coeffs = vec![BigRational::zero(); len];
    let mut constant = BigRational::zero();
    for (m, c) in poly.terms() {
        match m.exponents().iter().position(|&e| e > 0) {
            Some(v) => coeffs[v] = c.clone(),
            None => constant = c.clone(),
        }
    }
    Ok(LinForm::new(coeffs, constant))
}

fn int_constant(p: &RatFun) -> Option<i64> {
    let c = p.constant_value()?;
    c.is_integer().then(|| c.to_integer().to_i64()).flatten()
}

impl<T: Lower> Lowerer<T> {
    fn arity(&self, name: &str, args: &[Expr], n: usize, span: SourceSpan) -> Result<(), DslError> {
        if args.len() != n {
            return Err(DslError::semantic(
                format!("{name} takes {n} argument{}", if n == 1 { "" } else { "s" }),
                span,
            ));
        }
        Ok(())
    }

    /// Polynomial-style evaluation over the index universe.
    fn index(&self, e: &Expr) -> Result<RatFun, DslError> {
        let u = self.unit.index_universe();
        Ok(match &e.kind {
            ExprKind::Num(c) => RatFun::constant(u, c.clone()),
            ExprKind::Var(name) => match u.index_of(name) {
                Some(i) => RatFun::var(u, i),
                None => {
                    return Err(DslError::semantic(
                        format!("`{name}` cannot appear in an exponent or a factor argument"),
                        e.span,
                    ))
                }
            },
            ExprKind::Neg(a) => -&self.index(a)?,
            ExprKind::Add(a, b) => &self.index(a)? + &self.index(b)?,
            ExprKind::Sub(a, b) => &self.index(a)? - &self.index(b)?,
            ExprKind::Mul(a, b) => &self.index(a)? * &self.index(b)?,
            ExprKind::Div(a, b) => {
                let d = self.index(b)?;
                if d.is_zero() {
                    return Err(DslError::semantic("division by zero", b.span));
                }
                &self.index(a)? / &d
            }
            ExprKind::Pow(a, b) => {
                let base = self.index(a)?;
                let Some(k) = int_constant(&self.index(b)?) else {
                    return Err(DslError::semantic("expected an integer exponent", b.span));
                };
                base.pow(k)
                    .map_err(|_| DslError::semantic("division by zero", e.span))?
            }
            ExprKind::Call(name, _) => {
                return Err(DslError::semantic(
                    format!("`{name}` cannot appear in an exponent or a factor argument"),
                    e.span,
                ))
            }
        })
    }

    fn lin(&self, e: &Expr, what: &str) -> Result<LinForm, DslError> {
        affine(&self.index(e)?, e.span, what)
    }

    fn rational_of(&self, terms: Vec<T>, span: SourceSpan, what: &str) -> Result<RatFun, DslError> {
        let u = self.unit.universe();
        let mut acc = RatFun::zero(u);
        for t in &terms {
            match t.as_rational() {
                Some(r) => acc = &acc + &r,
                None => {
                    return Err(DslError::semantic(
                        format!("{what} must be a rational function"),
                        span,
                    ))
                }
            }
        }
        Ok(acc)
    }

    fn single(&self, terms: Vec<T>, span: SourceSpan, what: &str) -> Result<T, DslError> {
        match terms.len() {
            0 => Err(DslError::semantic(format!("{what} is zero"), span)),
            1 => Ok(terms.into_iter().next().expect("one term")),
            _ => Err(DslError::semantic(
                format!("{what} must be a single product"),
                span,
            )),
        }
    }

    /// Sums collapse to one rational term whenever every summand is rational.
    fn collapse(&self, terms: Vec<T>) -> Result<Vec<T>, DslError> {
        if terms.len() < 2 {
            return Ok(terms);
        }
        let rs: Option<Vec<RatFun>> = terms.iter().map(|t| t.as_rational()).collect();
        let Some(rs) = rs else {
            return Ok(terms);
        };
        let u = self.unit.universe();
        let total = rs.iter().fold(RatFun::zero(u), |a, b| &a + b);
        if total.is_zero() {
            return Ok(Vec::new());
        }
        Ok(vec![self.unit.scalar(&total).expect("nonzero rational")])
    }

    fn rational_term(&self, r: RatFun) -> Vec<T> {
        if r.is_zero() {
            Vec::new()
        } else {
            vec![self.unit.scalar(&r).expect("nonzero rational")]
        }
    }

    fn product(&self, a: Vec<T>, b: Vec<T>, span: SourceSpan) -> Result<Vec<T>, DslError> {
        let mut out = Vec::new();
        for x in &a {
            for y in &b {
                out.push(x.times(y).map_err(|e| term_err(e, span))?);
            }
        }
        self.collapse(out)
    }

    fn reciprocal(&self, a: Vec<T>, span: SourceSpan) -> Result<Vec<T>, DslError> {
        let t = self.single(a, span, "divisor")?;
        Ok(vec![self.unit.divide(&t).map_err(|e| term_err(e, span))?])
    }

    pub(crate) fn int_power(&self, base: Vec<T>, k: i64, span: SourceSpan) -> Result<Vec<T>, DslError> {
        let base = if k < 0 {
            self.reciprocal(base, span)?
        } else {
            base
        };
        let mut acc = self.rational_term(RatFun::one(self.unit.universe()));
        for _ in 0..k.unsigned_abs() {
            acc = self.product(acc, base.clone(), span)?;
        }
        Ok(acc)
    }

    fn terms(&self, e: &Expr) -> Result<Vec<T>, DslError> {
        let u = self.unit.universe();
        match &e.kind {
            ExprKind::Num(c) => Ok(self.rational_term(RatFun::constant(u, c.clone()))),
            ExprKind::Var(name) => {
                let r = self
                    .unit
                    .symbol(name)
                    .map_err(|m| DslError::semantic(m, e.span))?;
                Ok(self.rational_term(r))
            }
            ExprKind::Neg(a) => {
                let minus = RatFun::from_int(u, -1);
                Ok(self
                    .terms(a)?
                    .into_iter()
                    .map(|t| t.times_rational(&minus).expect("nonzero"))
                    .collect())
            }
            ExprKind::Add(a, b) => {
                let mut x = self.terms(a)?;
                x.extend(self.terms(b)?);
                self.collapse(x)
            }
            ExprKind::Sub(a, b) => {
                let mut x = self.terms(a)?;
                let minus = RatFun::from_int(u, -1);
                x.extend(
                    self.terms(b)?
                        .into_iter()
                        .map(|t| t.times_rational(&minus).expect("nonzero")),
                );
                self.collapse(x)
            }
            ExprKind::Mul(a, b) => self.product(self.terms(a)?, self.terms(b)?, e.span),
            ExprKind::Div(a, b) => {
                let d = self.terms(b)?;
                if d.is_empty() {
                    return Err(DslError::semantic("division by zero", b.span));
                }
                self.product(self.terms(a)?, self.reciprocal(d, b.span)?, e.span)
            }
            ExprKind::Pow(a, b) => {
                let exp = self.index(b)?;
                if let Some(k) = int_constant(&exp) {
                    if !(-64..=64).contains(&k) {
                        return Err(DslError::semantic("integer exponent too large", b.span));
                    }
                    return self.int_power(self.terms(a)?, k, e.span);
                }
                T::power(self, a, &exp, e.span)
            }
            ExprKind::Call(name, args) => Ok(vec![T::call(self, name, args, e.span)?]),
        }
    }
}

pub(crate) trait Times: Sized {
    fn times(&self, other: &Self) -> Result<Self, TermError>;
}

impl Times for HyperTerm {
    fn times(&self, other: &Self) -> Result<Self, TermError> {
        self.mul(other)
    }
}

impl Times for QHyperTerm {
    fn times(&self, other: &Self) -> Result<Self, TermError> {
        self.mul(other)
    }
}

impl Lower for HyperTerm {
    fn unit(r: &Roles) -> Result<Self, TermError> {
        Ok(HyperTerm::one(&TermShape {
            outer: r.outer.clone(),
            outer_continuous: r.outer_continuous,
            inner_discrete: r.sum.clone(),
            inner_continuous: r.int.clone(),
            params: r.params.clone(),
        }))
    }

    fn index_universe(&self) -> &Universe {
        HyperTerm::universe(self)
    }

    fn as_rational(&self) -> Option<RatFun> {
        (self.gammas().is_empty() && self.powers().is_empty() && self.exp_arg().is_none())
            .then(|| self.rational().clone())
    }

    fn symbol(&self, name: &str) -> Result<RatFun, String> {
        let u = HyperTerm::universe(self);
        u.index_of(name)
            .map(|i| RatFun::var(u, i))
            .ok_or_else(|| format!("undeclared symbol `{name}`"))
    }

    fn power(lw: &Lowerer<Self>, base: &Expr, exp: &RatFun, span: SourceSpan) -> Result<Vec<Self>, DslError> {
        let l = affine(exp, span, "exponent")?;
        let b = lw.rational_of(lw.terms(base)?, base.span, "base of a symbolic power")?;
        let mut t = lw.unit.clone();
        t.push_power(b, l).map_err(|e| term_err(e, span))?;
        Ok(vec![t])
    }

    fn call(lw: &Lowerer<Self>, name: &str, args: &[Expr], span: SourceSpan) -> Result<Self, DslError> {
        let mut t = lw.unit.clone();
        let len = HyperTerm::universe(&t).len();
        let one = LinForm::constant(len, BigRational::one());
        let push = |t: &mut HyperTerm, l: LinForm, e: i64| t.push_gamma(l, e).map_err(|e| term_err(e, span));
        match name {
            "factorial" => {
                lw.arity(name, args, 1, span)?;
                let a = lw.lin(&args[0], "factorial argument")?;
                push(&mut t, a.add(&one), 1)?;
            }
            "gamma" => {
                lw.arity(name, args, 1, span)?;
                push(&mut t, lw.lin(&args[0], "gamma argument")?, 1)?;
            }
            "pochhammer" => {
                lw.arity(name, args, 2, span)?;
                let a = lw.lin(&args[0], "pochhammer base")?;
                let m = lw.lin(&args[1], "pochhammer length")?;
                push(&mut t, a.add(&m), 1)?;
                push(&mut t, a, -1)?;
            }
            "binom" => {
                lw.arity(name, args, 2, span)?;
                let a = lw.lin(&args[0], "binomial argument")?;
                let b = lw.lin(&args[1], "binomial argument")?;
                push(&mut t, a.add(&one), 1)?;
                push(&mut t, b.add(&one), -1)?;
                push(&mut t, a.add(&b.neg()).add(&one), -1)?;
            }
            "exp" => {
                lw.arity(name, args, 1, span)?;
                let r = lw.rational_of(lw.terms(&args[0])?, args[0].span, "exp argument")?;
                t.push_exp(r).map_err(|e| term_err(e, span))?;
            }
            _ if Q_FUNCTIONS.contains(&name) => {
                return Err(DslError::semantic(
                    format!("{name} needs a q-sum (`qsum(...)`)"),
                    span,
                ))
            }
            _ => return Err(DslError::semantic(format!("unknown function `{name}`"), span)),
        }
        Ok(t)
    }
}

impl QHyperTerm {
    /// Splits off the largest monomial in `(q, q^n, q^k..)`.
    fn split_q_monomial(&self, r: &RatFun) -> (RatFun, LinForm) {
        let ru = QHyperTerm::universe(self);
        let lu = self.lin_universe();
        let nq = 1 + self.num_discrete();
        let min_exps = |p: &MultiPoly| -> Vec<u32> {
            let mut m: Option<Vec<u32>> = None;
            for (mono, _) in p.terms() {
                let e = mono.exponents()[..nq].to_vec();
                m = Some(match m {
                    None => e,
                    Some(old) => old.iter().zip(&e).map(|(a, b)| *a.min(b)).collect(),
                });
            }
            m.unwrap_or_else(|| vec![0; nq])
        };
        let num = min_exps(r.numer());
        let den = min_exps(r.denom());
        let mono = |e: &[u32]| {
            let mut full = e.to_vec();
            full.resize(ru.len(), 0);
            MultiPoly::monomial(ru, Monomial::from_exponents(full), BigRational::one())
        };
        let m = RatFun::new(mono(&num), mono(&den)).expect("monomial");
        let coeff = r / &m;
        let mut coeffs = vec![BigRational::zero(); lu.len()];
        for v in 0..self.num_discrete() {
            coeffs[v] = BigRational::from_integer((num[v + 1] as i64 - den[v + 1] as i64).into());
        }
        let shift = LinForm::new(coeffs, BigRational::from_integer((num[0] as i64 - den[0] as i64).into()));
        (coeff, shift)
    }

    fn is_q_symbol(e: &Expr) -> bool {
        matches!(&e.kind, ExprKind::Var(v) if v == "q")
    }

    fn quad_from(&self, p: &RatFun, span: SourceSpan) -> Result<QuadForm, DslError> {
        let lu = self.lin_universe();
        let Some(poly) = p.to_poly().filter(|x| x.total_degree() <= 2) else {
            return Err(DslError::semantic("q-exponent must be a polynomial of degree at most 2", span));
        };
        let mut q = QuadForm::zero(lu.len());
        let mut coeffs = vec![BigRational::zero(); lu.len()];
        let mut constant = BigRational::zero();
        for (m, c) in poly.terms() {
            let vars: Vec<usize> = m
                .exponents()
                .iter()
                .enumerate()
                .flat_map(|(v, &e)| std::iter::repeat(v).take(e as usize))
                .collect();
            match vars.as_slice() {
                [] => constant = c.clone(),
                [v] => coeffs[*v] = c.clone(),
                [i, j] => q.add_quad(*i, *j, c.clone()),
                _ => unreachable!("degree checked"),
            }
        }
        q.lin = LinForm::new(coeffs, constant);
        Ok(q)
    }

    /// `q^e`: a monomial when `e` is integer-affine, otherwise a q-power
    /// factor.
    fn q_power(&self, e: &RatFun, span: SourceSpan) -> Result<QHyperTerm, DslError> {
        let q = self.quad_from(e, span)?;
        let disc = self.num_discrete();
        let monomial = q.quad.is_empty()
            && q.lin.constant_part().is_integer()
            && (0..q.lin.len()).all(|v| q.lin.coeff(v).is_integer() && (v < disc || q.lin.coeff(v).is_zero()));
        let mut t = self.clone();
        if monomial {
            t.mul_rational(&self.q_monomial(&q.lin)).map_err(|e| term_err(e, span))?;
        } else {
            t.push_qpow(q).map_err(|e| term_err(e, span))?;
        }
        Ok(t)
    }
}

impl Lower for QHyperTerm {
    fn unit(r: &Roles) -> Result<Self, TermError> {
        let inner: Vec<&str> = r.sum.iter().map(String::as_str).collect();
        let params: Vec<&str> = r.params.iter().map(String::as_str).collect();
        Ok(QHyperTerm::one(&QTermShape::new(&r.outer, &inner).with_params(&params)))
    }

    fn index_universe(&self) -> &Universe {
        self.lin_universe()
    }

    fn as_rational(&self) -> Option<RatFun> {
        if !self.qpochs().is_empty() || !self.geoms().is_empty() {
            return None;
        }
        let q = self.qpow();
        if q.is_zero() {
            return Some(self.rational().clone());
        }
        let l = &q.lin;
        let ok = q.quad.is_empty()
            && l.constant_part().is_integer()
            && (0..l.len()).all(|v| {
                l.coeff(v).is_integer() && (v < self.num_discrete() || l.coeff(v).is_zero())
            });
        ok.then(|| self.rational() * &self.q_monomial(l))
    }

    fn symbol(&self, name: &str) -> Result<RatFun, String> {
        let ru = QHyperTerm::universe(self);
        if name == "q" {
            return Ok(RatFun::var(ru, 0));
        }
        let lu = self.lin_universe();
        match lu.index_of(name) {
            Some(i) if i < self.num_discrete() => Err(format!(
                "discrete variable `{name}` may only appear in exponents and q-function arguments"
            )),
            Some(i) => Ok(RatFun::var(ru, self.rat_index(i))),
            None => Err(format!("undeclared symbol `{name}`")),
        }
    }

    fn power(lw: &Lowerer<Self>, base: &Expr, exp: &RatFun, span: SourceSpan) -> Result<Vec<Self>, DslError> {
        if QHyperTerm::is_q_symbol(base) {
            return Ok(vec![lw.unit.q_power(exp, span)?]);
        }
        let b = lw.rational_of(lw.terms(base)?, base.span, "base of a symbolic power")?;
        let l = affine(exp, span, "exponent")?;
        let (coeff, shift) = lw.unit.split_q_monomial(&b);
        if coeff.is_one() {
            // a power of q: q^(j*l)
            let j = shift.constant_part();
            if shift.coeffs().iter().all(Zero::is_zero) {
                let e = RatFun::from_poly(l.to_poly(lw.unit.lin_universe()).scale(j));
                return Ok(vec![lw.unit.q_power(&e, span)?]);
            }
        }
        let mut t = lw.unit.clone();
        t.push_geom(b, l).map_err(|e| term_err(e, span))?;
        Ok(vec![t])
    }

    fn call(lw: &Lowerer<Self>, name: &str, args: &[Expr], span: SourceSpan) -> Result<Self, DslError> {
        let mut t = lw.unit.clone();
        let ru = QHyperTerm::universe(&t).clone();
        let len = t.lin_universe().len();
        match name {
            "qpoch" => {
                lw.arity(name, args, 2, span)?;
                let a = lw.terms(&args[0])?;
                let a = lw.rational_of(a, args[0].span, "q-Pochhammer base")?;
                if a.is_zero() {
                    return Ok(t);
                }
                let (coeff, shift) = t.split_q_monomial(&a);
                let l = lw.lin(&args[1], "q-Pochhammer length")?;
                t.push_qpoch(coeff, shift, l, 1).map_err(|e| term_err(e, span))?;
            }
            "qbin" => {
                lw.arity(name, args, 2, span)?;
                let a = lw.lin(&args[0], "q-binomial argument")?;
                let b = lw.lin(&args[1], "q-binomial argument")?;
                let one = RatFun::one(&ru);
                let s = LinForm::constant(len, BigRational::one());
                let mut push = |l: LinForm, e: i64| {
                    t.push_qpoch(one.clone(), s.clone(), l, e).map_err(|e| term_err(e, span))
                };
                push(a.clone(), 1)?;
                push(b.clone(), -1)?;
                push(a.add(&b.neg()), -1)?;
            }
            "qpow" => {
                lw.arity(name, args, 1, span)?;
                let e = lw.index(&args[0])?;
                let q = t.quad_from(&e, args[0].span)?;
                t.push_qpow(q).map_err(|e| term_err(e, span))?;
            }
            "factorial" | "gamma" | "pochhammer" | "binom" | "exp" => {
                return Err(DslError::semantic(
                    format!("{name} is not available in q-terms"),
                    span,
                ))
            }
            _ => return Err(DslError::semantic(format!("unknown function `{name}`"), span)),
        }
        Ok(t)
    }
}

fn expand(e: &Expr, lets: &HashMap<String, Expr>) -> Expr {
    let b = |x: &Expr| Box::new(expand(x, lets));
    let kind = match &e.kind {
        ExprKind::Var(v) => match lets.get(v) {
            Some(x) => return x.clone(),
            None => ExprKind::Var(v.clone()),
        },
        ExprKind::Num(c) => ExprKind::Num(c.clone()),
        ExprKind::Neg(a) => ExprKind::Neg(b(a)),
        ExprKind::Add(x, y) => ExprKind::Add(b(x), b(y)),
        ExprKind::Sub(x, y) => ExprKind::Sub(b(x), b(y)),
        ExprKind::Mul(x, y) => ExprKind::Mul(b(x), b(y)),
        ExprKind::Div(x, y) => ExprKind::Div(b(x), b(y)),
        ExprKind::Pow(x, y) => ExprKind::Pow(b(x), b(y)),
        ExprKind::Call(f, args) => ExprKind::Call(f.clone(), args.iter().map(|a| expand(a, lets)).collect()),
    };
    Expr { kind, span: e.span }
}

fn symbols(e: &Expr, out: &mut Vec<Ident>) {
    match &e.kind {
        ExprKind::Var(v) => out.push(Ident {
            name: v.clone(),
            span: e.span,
        }),
        ExprKind::Num(_) => {}
        ExprKind::Neg(a) => symbols(a, out),
        ExprKind::Add(x, y)
        | ExprKind::Sub(x, y)
        | ExprKind::Mul(x, y)
        | ExprKind::Div(x, y)
        | ExprKind::Pow(x, y) => {
            symbols(x, out);
            symbols(y, out);
        }
        ExprKind::Call(_, args) => args.iter().for_each(|a| symbols(a, out)),
    }
}

fn uses_q_function(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Call(f, args) => Q_FUNCTIONS.contains(&f.as_str()) || args.iter().any(uses_q_function),
        ExprKind::Var(_) | ExprKind::Num(_) => false,
        ExprKind::Neg(a) => uses_q_function(a),
        ExprKind::Add(x, y)
        | ExprKind::Sub(x, y)
        | ExprKind::Mul(x, y)
        | ExprKind::Div(x, y)
        | ExprKind::Pow(x, y) => uses_q_function(x) || uses_q_function(y),
    }
}

fn lower_side<T: Lower>(roles: &Roles, e: &Expr, what: &str) -> Result<T, DslError> {
    let unit = T::unit(roles).map_err(|err| term_err(err, e.span))?;
    let lw = Lowerer { unit };
    let terms = lw.terms(e)?;
    lw.single(terms, e.span, what)
}

fn closed_rhs<T: Lower>(roles: &Roles, e: &Expr) -> Result<Vec<T>, DslError> {
    let unit = T::unit(roles).map_err(|err| term_err(err, e.span))?;
    let lw = Lowerer { unit };
    let terms = lw.terms(e)?;
    for t in &terms {
        let inner_free = (0..t.num_shifts()).all(|i| t.inner_shift_quotient(i).is_one())
            && (0..t.num_diffs()).all(|j| t.inner_diff_quotient(j).is_zero());
        if !inner_free {
            return Err(DslError::semantic(
                "right side depends on a bound variable",
                e.span,
            ));
        }
    }
    Ok(terms)
}

fn statement<T: Lower>(
    roles: &Roles,
    rhs_roles: Option<&Roles>,
    id: &IdentityAst,
) -> Result<IdentityStatement<T>, DslError> {
    let lhs = lower_side::<T>(roles, &id.lhs, "left side")?;
    let rhs = match &id.rhs {
        None => Rhs::Unspecified,
        Some(RhsAst::Expr(e)) => Rhs::Closed(closed_rhs::<T>(roles, e)?),
        Some(RhsAst::Sum(_, e)) => {
            let r = rhs_roles.expect("roles for a summed right side");
            Rhs::Sum(Box::new(lower_side::<T>(r, e, "right side")?))
        }
    };
    Ok(IdentityStatement { lhs, rhs })
}

/// Assigns roles: bound variables from the binders, the outer variable from
/// `outer` (else `n`, else `x`, else the only free symbol), parameters from
/// `param` (else every other free symbol).
pub fn lower(doc: &Document, force_q: bool) -> Result<Statement, DslError> {
    let Some(id) = &doc.identity else {
        return Err(DslError::semantic(super::NO_IDENTITY, SourceSpan::default()));
    };
    let mut lets: HashMap<String, Expr> = HashMap::new();
    for (name, e) in &doc.lets {
        let x = expand(e, &lets);
        lets.insert(name.name.clone(), x);
    }
    let id = IdentityAst {
        binder: id.binder.clone(),
        lhs: expand(&id.lhs, &lets),
        rhs: id.rhs.as_ref().map(|r| match r {
            RhsAst::Expr(e) => RhsAst::Expr(expand(e, &lets)),
            RhsAst::Sum(b, e) => RhsAst::Sum(b.clone(), expand(e, &lets)),
        }),
    };
    let rhs_binder = match &id.rhs {
        Some(RhsAst::Sum(b, _)) => Some(b.clone()),
        _ => None,
    };
    let is_q = force_q
        || id.binder.q
        || rhs_binder.as_ref().is_some_and(|b| b.q)
        || uses_q_function(&id.lhs)
        || matches!(&id.rhs, Some(RhsAst::Expr(e) | RhsAst::Sum(_, e)) if uses_q_function(e));

    let mut used = Vec::new();
    symbols(&id.lhs, &mut used);
    if let Some(RhsAst::Expr(e) | RhsAst::Sum(_, e)) = &id.rhs {
        symbols(e, &mut used);
    }

    let check_binder = |b: &Binder| -> Result<(), DslError> {
        let mut seen = BTreeSet::new();
        for v in b.sum.iter().chain(&b.int) {
            if !seen.insert(v.name.clone()) {
                return Err(DslError::semantic(format!("`{}` is bound twice", v.name), v.span));
            }
            if is_q && v.name == "q" {
                return Err(DslError::semantic("`q` is reserved in q-terms", v.span));
            }
        }
        if is_q {
            if let Some(v) = b.int.first() {
                return Err(DslError::semantic("integrals are not available in q-terms", v.span));
            }
        }
        for v in &b.sum {
            if doc.cont.iter().any(|c| c.name == v.name) {
                return Err(DslError::semantic(
                    format!("summation variable `{}` is declared continuous", v.name),
                    v.span,
                ));
            }
        }
        if b.sum.is_empty() && b.int.is_empty() {
            return Err(DslError::semantic("empty binder", id.lhs.span));
        }
        Ok(())
    };
    check_binder(&id.binder)?;
    if let Some(b) = &rhs_binder {
        check_binder(b)?;
    }

    let mut bound: BTreeSet<String> = id.binder.sum.iter().chain(&id.binder.int).map(|v| v.name.clone()).collect();
    if let Some(b) = &rhs_binder {
        bound.extend(b.sum.iter().chain(&b.int).map(|v| v.name.clone()));
    }
    let reserved = |v: &str| is_q && v == "q";
    let mut free: Vec<String> = Vec::new();
    for s in &used {
        if !bound.contains(&s.name) && !reserved(&s.name) && !free.contains(&s.name) {
            free.push(s.name.clone());
        }
    }
    let declared: Option<Vec<String>> = doc
        .params
        .as_ref()
        .map(|ps| ps.iter().map(|p| p.name.clone()).collect());
    if let Some(ps) = &doc.params {
        for p in ps {
            if bound.contains(&p.name) || reserved(&p.name) {
                return Err(DslError::semantic(
                    format!("`{}` cannot be a parameter", p.name),
                    p.span,
                ));
            }
        }
    }
    let outer = match &doc.outer {
        Some(o) => {
            if bound.contains(&o.name) || declared.as_ref().is_some_and(|d| d.contains(&o.name)) {
                return Err(DslError::semantic(
                    format!("`{}` cannot be the outer variable", o.name),
                    o.span,
                ));
            }
            o.name.clone()
        }
        None => {
            let candidates: Vec<&String> = free
                .iter()
                .filter(|v| !declared.as_ref().is_some_and(|d| d.contains(v)))
                .collect();
            if candidates.iter().any(|v| *v == "n") {
                "n".to_string()
            } else if candidates.iter().any(|v| *v == "x") {
                "x".to_string()
            } else if candidates.len() == 1 {
                candidates[0].clone()
            } else if candidates.is_empty() {
                "n".to_string()
            } else {
                return Err(DslError::semantic(
                    "cannot tell the outer variable; add `outer <name>;`",
                    id.lhs.span,
                ));
            }
        }
    };
    let params: Vec<String> = match declared {
        Some(d) => {
            for s in &used {
                if !bound.contains(&s.name) && !reserved(&s.name) && s.name != outer && !d.contains(&s.name) {
                    return Err(DslError::semantic(
                        format!("undeclared symbol `{}`", s.name),
                        s.span,
                    ));
                }
            }
            d
        }
        None => {
            let mut p: Vec<String> = free.into_iter().filter(|v| *v != outer).collect();
            p.sort();
            p
        }
    };
    let outer_continuous = doc.cont.iter().any(|c| c.name == outer);
    if is_q && outer_continuous {
        let at = doc.outer.as_ref().map_or(id.lhs.span, |o| o.span);
        return Err(DslError::semantic("q-terms need a discrete outer variable", at));
    }
    let roles_of = |b: &Binder| Roles {
        outer: outer.clone(),
        outer_continuous,
        sum: b.sum.iter().map(|v| v.name.clone()).collect(),
        int: b.int.iter().map(|v| v.name.clone()).collect(),
        params: params.clone(),
    };
    let roles = roles_of(&id.binder);
    let rhs_roles = rhs_binder.as_ref().map(roles_of);
    if is_q {
        Ok(Statement::Q(statement::<QHyperTerm>(&roles, rhs_roles.as_ref(), &id)?))
    } else {
        Ok(Statement::Classical(statement::<HyperTerm>(&roles, rhs_roles.as_ref(), &id)?))
    }
}
