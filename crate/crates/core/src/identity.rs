//! From certificates to identities: recurrences for sums, initial values,
//! WZ tuples, companion identities and the exact numeric oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{rat, MultiPoly, RatFun, Universe};
use crate::certify::{verify, Verdict, WZTuple};
use crate::operator::{Summand, UniOperator};
use crate::telescope::{creative_telescope, TelescopeCertificate, TelescopeError};
use crate::term::{HyperTerm, QHyperTerm, QTermShape, Support, TermError, TermShape};

/// Values for parameters (and `q`) used when evaluating.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    pub q: Option<BigRational>,
    pub params: BTreeMap<String, BigRational>,
}

impl Env {
    pub fn with_param(mut self, name: &str, v: BigRational) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn with_q(mut self, q: BigRational) -> Self {
        self.q = Some(q);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentityError {
    #[error("compact support hypothesis fails at {outer} = {value}")]
    NotCompact { outer: String, value: i64 },
    #[error("certificate pole on support: R_{var} has denominator {factor}, vanishing at {point}")]
    CertificatePole {
        var: String,
        factor: String,
        point: String,
    },
    #[error("assign parameters for numeric check (missing {0})")]
    Unassigned(String),
    #[error("cannot normalize by zero right side")]
    ZeroRhs,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Telescope(#[from] TelescopeError),
}

/// Evaluation and reshaping needed beyond the finder.
pub trait IdentityTerm: Summand + PartialEq + fmt::Debug {
    fn support_at(&self, n0: i64) -> Support;
    /// Value at the outer value and inner discrete values, as a cofactor and
    /// an optional exponential argument; unassigned symbols stay symbolic.
    fn value_parts(
        &self,
        outer: &BigRational,
        inner: &[i64],
        env: &Env,
    ) -> Result<(RatFun, Option<RatFun>), TermError>;
    /// Substitution placing the outer and inner discrete variables at a
    /// lattice point.
    fn point_map(&self, outer: i64, inner: &[i64]) -> Vec<(usize, RatFun)>;
    /// Whether `p` vanishes identically at the lattice point.
    fn vanishes_at(&self, p: &MultiPoly, outer: i64, inner: &[i64]) -> bool {
        RatFun::from_poly(p.clone())
            .substitute_rat(&self.point_map(outer, inner))
            .expect("polynomial substitution")
            .is_zero()
    }
    fn param_names(&self) -> Vec<String>;
    fn times_rational(&self, r: &RatFun) -> Result<Self, TermError>;
    fn divide(&self, other: &Self) -> Result<Self, TermError>;
    /// Same factors with a different choice of outer and inner variables.
    fn with_roles(&self, outer: &str, inner_discrete: &[String]) -> Result<Self, TermError>;
    /// Bound on nonnegative integers `n0` where `p` can vanish identically
    /// at the outer value `n0`.
    fn root_bound(&self, p: &MultiPoly) -> i64;
    fn is_q(&self) -> bool;
}

fn cauchy_bound(p: &MultiPoly, var: usize) -> i64 {
    let u = p.universe();
    let others: Vec<usize> = (0..u.len()).filter(|&v| v != var).collect();
    let Some((_, c)) = p.coefficients_in(&others).into_iter().next() else {
        return 0;
    };
    let coeffs = c.univariate_coeffs(var);
    let vals: Vec<BigRational> = coeffs
        .iter()
        .map(|x| x.constant_value().unwrap_or_else(BigRational::zero))
        .collect();
    let lead = vals.last().cloned().unwrap_or_else(BigRational::zero);
    if lead.is_zero() || vals.len() <= 1 {
        return 0;
    }
    let max = vals[..vals.len() - 1]
        .iter()
        .map(|a| (a / &lead).abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    (max.ceil().to_integer().to_i64().unwrap_or(i64::MAX - 1)) + 1
}

impl IdentityTerm for HyperTerm {
    fn support_at(&self, n0: i64) -> Support {
        if self.rational().denom().is_constant() {
            self.support_bounds(n0)
        } else {
            self.with_linear_factors_as_gammas().support_bounds(n0)
        }
    }

    fn value_parts(
        &self,
        outer: &BigRational,
        inner: &[i64],
        env: &Env,
    ) -> Result<(RatFun, Option<RatFun>), TermError> {
        let u = HyperTerm::universe(self);
        let mut assign: Vec<Option<BigRational>> = vec![None; u.len()];
        assign[0] = Some(outer.clone());
        for (v, &x) in self.inner_discrete().zip(inner) {
            assign[v] = Some(rat(x));
        }
        for v in self.params() {
            assign[v] = env.params.get(u.name(v)).cloned();
        }
        let val = match self.eval_partial(&assign) {
            Err(TermError::PoleOfTerm) => self.with_linear_factors_as_gammas().eval_partial(&assign)?,
            r => r?,
        };
        Ok((val.cofactor, val.exp_arg))
    }

    fn point_map(&self, outer: i64, inner: &[i64]) -> Vec<(usize, RatFun)> {
        let u = HyperTerm::universe(self);
        let mut m = vec![(0, RatFun::from_int(u, outer))];
        for (v, &x) in self.inner_discrete().zip(inner) {
            m.push((v, RatFun::from_int(u, x)));
        }
        m
    }

    fn vanishes_at(&self, p: &MultiPoly, outer: i64, inner: &[i64]) -> bool {
        let mut assign = vec![(0, rat(outer))];
        assign.extend(self.inner_discrete().zip(inner).map(|(v, &x)| (v, rat(x))));
        p.partial_eval(&assign).is_zero()
    }

    fn param_names(&self) -> Vec<String> {
        HyperTerm::universe(self).names()[self.params()].to_vec()
    }

    fn times_rational(&self, r: &RatFun) -> Result<Self, TermError> {
        let mut out = self.clone();
        out.mul_rational(r)?;
        Ok(out)
    }

    fn divide(&self, other: &Self) -> Result<Self, TermError> {
        self.mul(&other.reciprocal())
    }

    fn with_roles(&self, outer: &str, inner_discrete: &[String]) -> Result<Self, TermError> {
        let old = self.shape();
        let mut all = vec![old.outer.clone()];
        all.extend(old.inner_discrete.iter().cloned());
        all.extend(old.inner_continuous.iter().cloned());
        if !all.iter().any(|v| v == outer) {
            return Err(TermError::UnknownVariable(outer.to_string()));
        }
        let outer_continuous = (old.outer == outer && old.outer_continuous)
            || old.inner_continuous.iter().any(|v| v == outer);
        let mut inner_continuous: Vec<String> = Vec::new();
        if old.outer_continuous && old.outer != outer {
            inner_continuous.push(old.outer.clone());
        }
        inner_continuous.extend(old.inner_continuous.iter().filter(|v| *v != outer).cloned());
        let shape = TermShape {
            outer: outer.to_string(),
            outer_continuous,
            inner_discrete: inner_discrete.to_vec(),
            inner_continuous,
            params: old.params,
        };
        self.reshape(&shape)
    }

    fn root_bound(&self, p: &MultiPoly) -> i64 {
        cauchy_bound(p, 0)
    }

    fn is_q(&self) -> bool {
        false
    }
}

impl IdentityTerm for QHyperTerm {
    fn support_at(&self, n0: i64) -> Support {
        self.support_bounds(n0)
    }

    fn value_parts(
        &self,
        outer: &BigRational,
        inner: &[i64],
        env: &Env,
    ) -> Result<(RatFun, Option<RatFun>), TermError> {
        if !outer.is_integer() {
            return Err(TermError::NonIntegerDiscrete(self.outer_name()));
        }
        let mut disc = vec![outer.to_integer().to_i64().expect("outer value fits in i64")];
        disc.extend_from_slice(inner);
        let lu = self.lin_universe();
        let params: Vec<Option<BigRational>> = (self.num_discrete()..lu.len())
            .map(|v| env.params.get(lu.name(v)).cloned())
            .collect();
        Ok((self.eval_partial(&disc, env.q.as_ref(), &params)?, None))
    }

    fn point_map(&self, outer: i64, inner: &[i64]) -> Vec<(usize, RatFun)> {
        let u = QHyperTerm::universe(self);
        let qp = |e: i64| RatFun::var(u, 0).pow(e).expect("q is nonzero");
        let mut m = vec![(1, qp(outer))];
        for (i, &x) in inner.iter().enumerate() {
            m.push((2 + i, qp(x)));
        }
        m
    }

    fn param_names(&self) -> Vec<String> {
        self.lin_universe().names()[self.num_discrete()..].to_vec()
    }

    fn times_rational(&self, r: &RatFun) -> Result<Self, TermError> {
        let mut out = self.clone();
        out.mul_rational(r)?;
        Ok(out)
    }

    fn divide(&self, other: &Self) -> Result<Self, TermError> {
        self.mul(&other.reciprocal())
    }

    fn with_roles(&self, outer: &str, inner_discrete: &[String]) -> Result<Self, TermError> {
        let old = self.shape();
        if old.outer != outer && !old.inner.iter().any(|v| v == outer) {
            return Err(TermError::UnknownVariable(outer.to_string()));
        }
        let shape = QTermShape {
            outer: outer.to_string(),
            inner: inner_discrete.to_vec(),
            params: old.params,
        };
        self.reshape(&shape)
    }

    fn root_bound(&self, p: &MultiPoly) -> i64 {
        p.degree_in(0) as i64 + 1
    }

    fn is_q(&self) -> bool {
        true
    }
}

/// Right side of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs<T> {
    /// Sum of closed-form terms in the outer variable, over the left
    /// side's shape.
    Closed(Vec<T>),
    /// Another definite sum over its own inner variables.
    Sum(Box<T>),
    Unspecified,
    /// Companion identities: the left side equals the value of `F` at the
    /// lower boundary minus its limit (in words).
    Boundary(String),
}

/// `sum_k int_y lhs = rhs`; the bound variables are the inner variables of
/// the left term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityStatement<T> {
    pub lhs: T,
    pub rhs: Rhs<T>,
}

impl<T: IdentityTerm> IdentityStatement<T> {
    pub fn outer(&self) -> String {
        self.lhs.outer_name()
    }

    pub fn bound_vars(&self) -> (Vec<String>, Vec<String>) {
        (self.lhs.shift_names(), self.lhs.diff_names())
    }
}

/// `P(N, n) f(n) = 0` for `f(n) = sum_k F(n, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub p: UniOperator,
    pub subject: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialValue {
    /// Outer value, or the expansion point for a continuous outer variable.
    pub at: BigRational,
    /// Derivative order for a continuous outer variable, 0 otherwise.
    pub order: u32,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof<T> {
    pub certificate: TelescopeCertificate<T>,
    pub verdict: Verdict,
    pub recurrence: Recurrence,
    pub initial_values: Vec<InitialValue>,
    /// The right side was only checked against the recurrence numerically.
    pub numeric_rhs: bool,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Proof(Box<Proof<T>>),
    /// The two sides differ at `outer`.
    Refutation {
        outer: i64,
        lhs: RatFun,
        rhs: RatFun,
    },
    /// A recurrence without a right side to compare against.
    RecurrenceOnly(Box<TelescopeCertificate<T>>, Recurrence),
    NotFound(String),
}

fn lattice(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in bounds {
        let mut next = Vec::new();
        for p in &out {
            for k in lo..=hi {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Outer values checked for compactness and certificate poles.
const POLE_CHECK_RANGE: i64 = 24;

/// Recurrence for the sum, after checking compact support and that the
/// certificates are finite on the support boxes for `n = 0..=24 + order`.
pub fn recurrence_for_sum<T: IdentityTerm>(
    cert: &TelescopeCertificate<T>,
) -> Result<Recurrence, IdentityError> {
    let f = &cert.term;
    if f.outer_is_continuous() || f.num_diffs() > 0 {
        return Err(IdentityError::Unsupported(
            "recurrences for sums need a discrete outer variable and no integrals".into(),
        ));
    }
    let names = f.shift_names();
    let top = POLE_CHECK_RANGE + cert.p.order() as i64;
    for n0 in 0..=top {
        let Support::Box(bounds) = f.support_at(n0) else {
            return Err(IdentityError::NotCompact {
                outer: f.outer_name(),
                value: n0,
            });
        };
        for (i, r) in cert.r.iter().enumerate() {
            if r.denom().is_constant() {
                continue;
            }
            for k in lattice(&bounds) {
                if f.vanishes_at(r.denom(), n0, &k) && !sums_exactly_at(cert, n0) {
                    let mut point = vec![format!("{} = {n0}", f.outer_name())];
                    point.extend(names.iter().zip(&k).map(|(v, x)| format!("{v} = {x}")));
                    return Err(IdentityError::CertificatePole {
                        var: names[i].clone(),
                        factor: r.denom().render(),
                        point: point.join(", "),
                    });
                }
            }
        }
    }
    Ok(Recurrence {
        p: cert.p.clone(),
        subject: format!("f({}) = sum over {} of F", f.outer_name(), names.join(", ")),
    })
}

/// Fallback when a certificate has a pole on the support at `n0`: the
/// products `G_i = R_i F` taken as terms (so matching zeros of `F` cancel
/// the pole) must be finite with compact support, and `P F = sum_i
/// Delta_i G_i` must hold pointwise on a box strictly containing every
/// support involved. Summing over that box then gives `(P f)(n0) = 0`.
fn sums_exactly_at<T: IdentityTerm>(cert: &TelescopeCertificate<T>, n0: i64) -> bool {
    let f = &cert.term;
    let env = Env::default();
    let mut boxes = Vec::new();
    for a in 0..=cert.p.order() as i64 {
        boxes.push(f.support_at(n0 + a));
    }
    let mut g = Vec::new();
    for r in &cert.r {
        let Ok(gi) = f.times_rational(r) else { return false };
        boxes.push(gi.support_at(n0));
        g.push(gi);
    }
    let mut hull: Option<Vec<(i64, i64)>> = None;
    for b in boxes {
        let Support::Box(b) = b else { return false };
        if b.iter().any(|(lo, hi)| lo > hi) {
            continue;
        }
        hull = Some(match hull {
            None => b,
            Some(h) => h.iter().zip(&b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect(),
        });
    }
    let Some(hull) = hull else { return true };
    let hull: Vec<(i64, i64)> = hull.iter().map(|(lo, hi)| (lo - 1, hi + 1)).collect();
    let value = |t: &T, n: i64, k: &[i64]| -> Option<RatFun> {
        match t.value_parts(&rat(n), k, &env) {
            Ok((v, None)) => Some(v),
            Ok((v, Some(_))) if v.is_zero() => Some(v),
            _ => None,
        }
    };
    for k in lattice(&hull) {
        let map = f.point_map(n0, &k);
        let mut lhs = RatFun::zero(f.universe());
        for (a, c) in cert.p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let Ok(cv) = RatFun::from_poly(c.clone()).substitute_rat(&map) else { return false };
            let Some(v) = value(f, n0 + a as i64, &k) else { return false };
            lhs = &lhs + &(&cv * &v);
        }
        let mut rhs = RatFun::zero(f.universe());
        for (i, gi) in g.iter().enumerate() {
            let mut up = k.clone();
            up[i] += 1;
            let (Some(above), Some(at)) = (value(gi, n0, &up), value(gi, n0, &k)) else {
                return false;
            };
            rhs = &rhs + &(&above - &at);
        }
        if lhs != rhs {
            return false;
        }
    }
    true
}

fn require_params<T: IdentityTerm>(t: &T, env: &Env) -> Result<(), IdentityError> {
    for p in t.param_names() {
        if !env.params.contains_key(&p) {
            return Err(IdentityError::Unassigned(p));
        }
    }
    Ok(())
}

/// Exact value of `sum_k F(n0, k)` over the support box.
pub fn sum_value<T: IdentityTerm>(f: &T, n0: i64, env: &Env) -> Result<RatFun, IdentityError> {
    let u = f.universe();
    if f.num_diffs() > 0 || f.outer_is_continuous() {
        return Err(IdentityError::Unsupported(
            "exact evaluation of integrals".into(),
        ));
    }
    let Support::Box(bounds) = f.support_at(n0) else {
        return Err(IdentityError::NotCompact {
            outer: f.outer_name(),
            value: n0,
        });
    };
    let mut acc = RatFun::zero(u);
    for k in lattice(&bounds) {
        let (v, e) = f.value_parts(&rat(n0), &k, env)?;
        if e.is_some() && !v.is_zero() {
            return Err(IdentityError::Unsupported(
                "exact evaluation of exponential factors".into(),
            ));
        }
        acc = &acc + &v;
    }
    Ok(acc)
}

fn rhs_value<T: IdentityTerm>(rhs: &Rhs<T>, n0: i64, env: &Env) -> Result<Option<RatFun>, IdentityError> {
    match rhs {
        Rhs::Closed(terms) => {
            let mut acc: Option<RatFun> = None;
            for t in terms {
                let zeros = vec![0; t.num_shifts()];
                let (v, e) = t.value_parts(&rat(n0), &zeros, env)?;
                if e.is_some() {
                    return Err(IdentityError::Unsupported(
                        "exact evaluation of exponential factors".into(),
                    ));
                }
                acc = Some(match acc {
                    Some(a) => &a + &v.reembed(a.universe()).expect("same variables"),
                    None => v,
                });
            }
            Ok(acc)
        }
        Rhs::Sum(t) => Ok(Some(sum_value(t.as_ref(), n0, env)?)),
        Rhs::Unspecified | Rhs::Boundary(_) => Ok(None),
    }
}

/// `p(n0)` with parameters left symbolic (and `q` symbolic for q-terms).
fn coeff_at<T: IdentityTerm>(f: &T, p: &MultiPoly, n0: i64) -> RatFun {
    RatFun::from_poly(p.clone())
        .substitute_rat(&f.point_map(n0, &vec![0; f.num_shifts()]))
        .expect("polynomial substitution")
}

fn same_universe(a: &RatFun, u: &Universe) -> RatFun {
    if a.universe().same(u) {
        a.clone()
    } else {
        a.reembed(u).expect("same variables")
    }
}

/// Outer values whose sums determine every solution of the recurrence
/// on `n >= 0`: the first `order` values plus `rho + order` for each
/// nonnegative root `rho` of the leading coefficient.
pub fn initial_points<T: IdentityTerm>(f: &T, p: &UniOperator) -> Vec<i64> {
    let d = p.order() as i64;
    let mut pts: Vec<i64> = (0..d).collect();
    if let Some(lead) = p.leading() {
        let bound = f.root_bound(lead).min(10_000);
        for rho in 0..=bound {
            if coeff_at(f, lead, rho).is_zero() {
                pts.push(rho + d);
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// Searches `n = 0..=limit` for a value where the sides differ.
fn find_mismatch<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    limit: i64,
) -> Result<Option<(i64, RatFun, RatFun)>, IdentityError> {
    let env = Env::default();
    for n0 in 0..=limit {
        let l = sum_value(&stmt.lhs, n0, &env)?;
        if let Some(r) = rhs_value(&stmt.rhs, n0, &env)? {
            let r = same_universe(&r, l.universe());
            if l != r {
                return Ok(Some((n0, l, r)));
            }
        }
    }
    Ok(None)
}

pub fn prove_identity<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    max_unknowns: usize,
) -> Result<Outcome<T>, IdentityError> {
    if stmt.lhs.outer_is_continuous() {
        return prove_continuous(stmt, max_unknowns);
    }
    let cert = match creative_telescope(&stmt.lhs, max_unknowns) {
        Ok(c) => c,
        Err(e @ TelescopeError::NotFound { .. }) => return Ok(Outcome::NotFound(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let verdict = verify(&stmt.lhs, &cert).expect("certificate matches its term");
    let rec = recurrence_for_sum(&cert)?;
    let d = cert.p.order() as i64;
    let numeric_rhs = match &stmt.rhs {
        Rhs::Unspecified | Rhs::Boundary(_) => {
            return Ok(Outcome::RecurrenceOnly(Box::new(cert), rec));
        }
        Rhs::Closed(terms) => {
            let annihilated = terms.iter().all(|t| cert.p.apply(t).is_zero());
            if !annihilated {
                return Ok(match find_mismatch(stmt, d + 10)? {
                    Some((n0, l, r)) => Outcome::Refutation { outer: n0, lhs: l, rhs: r },
                    None => Outcome::NotFound(
                        "the right side does not satisfy the recurrence found".into(),
                    ),
                });
            }
            false
        }
        Rhs::Sum(t) => {
            let env = Env::default();
            let vals: Vec<RatFun> = (0..=2 * d + 10)
                .map(|n0| sum_value(t.as_ref(), n0, &env))
                .collect::<Result<_, _>>()?;
            for n0 in 0..=d + 10 {
                let u = vals[0].universe().clone();
                let mut acc = RatFun::zero(&u);
                for (a, c) in cert.p.coeffs().iter().enumerate() {
                    let ca = same_universe(&coeff_at(&stmt.lhs, c, n0), &u);
                    acc = &acc + &(&ca * &vals[n0 as usize + a]);
                }
                if !acc.is_zero() {
                    return Ok(match find_mismatch(stmt, 2 * d + 10)? {
                        Some((n0, l, r)) => Outcome::Refutation { outer: n0, lhs: l, rhs: r },
                        None => Outcome::NotFound(
                            "the right side does not satisfy the recurrence found".into(),
                        ),
                    });
                }
            }
            true
        }
    };
    let env = Env::default();
    let mut initial = Vec::new();
    for n0 in initial_points(&stmt.lhs, &cert.p) {
        let l = sum_value(&stmt.lhs, n0, &env)?;
        let r = rhs_value(&stmt.rhs, n0, &env)?.expect("closed or sum right side");
        let r = same_universe(&r, l.universe());
        if l != r {
            return Ok(Outcome::Refutation { outer: n0, lhs: l, rhs: r });
        }
        initial.push(InitialValue {
            at: rat(n0),
            order: 0,
            lhs: l.render(),
            rhs: r.render(),
        });
    }
    let mut proof = Proof {
        certificate: cert,
        verdict,
        recurrence: rec,
        initial_values: initial,
        numeric_rhs,
        text: String::new(),
    };
    proof.text = proof_text(&proof);
    Ok(Outcome::Proof(Box::new(proof)))
}

/// Differential case: both sides satisfy `P(D_x, x)`, and their Taylor
/// coefficients agree up to the order of `P` at an ordinary point.
/// Exponential factors are compared class by class, since `exp` of
/// distinct rational functions are linearly independent.
fn prove_continuous<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    max_unknowns: usize,
) -> Result<Outcome<T>, IdentityError> {
    let f = &stmt.lhs;
    if f.num_diffs() > 0 {
        return Err(IdentityError::Unsupported(
            "initial conditions for integrals over continuous variables".into(),
        ));
    }
    let Rhs::Closed(terms) = &stmt.rhs else {
        return Err(IdentityError::Unsupported(
            "a continuous outer variable needs a closed-form right side".into(),
        ));
    };
    let cert = match creative_telescope(f, max_unknowns) {
        Ok(c) => c,
        Err(e @ TelescopeError::NotFound { .. }) => return Ok(Outcome::NotFound(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let verdict = verify(f, &cert).expect("certificate matches its term");
    if !terms.iter().all(|t| cert.p.apply(t).is_zero()) {
        return Ok(Outcome::NotFound(
            "the right side does not satisfy the differential equation found".into(),
        ));
    }
    let Support::Box(bounds) = support_without_outer(f) else {
        return Err(IdentityError::NotCompact {
            outer: f.outer_name(),
            value: 0,
        });
    };
    let u = f.universe().clone();
    let lead = cert.p.leading().expect("nonzero operator").clone();
    let env = Env::default();
    let d = cert.p.order() as u32;
    let mut chosen = None;
    'points: for x0 in 0..64i64 {
        let x = rat(x0);
        let lc = RatFun::from_poly(lead.clone())
            .substitute_rat(&[(0, RatFun::constant(&u, x.clone()))])
            .expect("polynomial substitution");
        if lc.is_zero() {
            continue;
        }
        let mut rows = Vec::new();
        for a in 0..d {
            let l = taylor_sum(f, a, &x, &lattice(&bounds), &env);
            let r = taylor_sum_terms(terms, a, &x, &env);
            match (l, r) {
                (Ok(l), Ok(r)) => rows.push((a, l, r)),
                _ => continue 'points,
            }
        }
        chosen = Some((x, rows));
        break;
    }
    let Some((x, rows)) = chosen else {
        return Ok(Outcome::NotFound("no ordinary point found".into()));
    };
    let mut initial = Vec::new();
    for (a, l, r) in rows {
        if l != r {
            return Ok(Outcome::NotFound(format!(
                "derivative {a} at {} = {x} differs",
                f.outer_name()
            )));
        }
        initial.push(InitialValue {
            at: x.clone(),
            order: a,
            lhs: render_classes(&l),
            rhs: render_classes(&r),
        });
    }
    let rec = Recurrence {
        p: cert.p.clone(),
        subject: format!(
            "f({}) = sum over {} of F",
            f.outer_name(),
            f.shift_names().join(", ")
        ),
    };
    let mut proof = Proof {
        certificate: cert,
        verdict,
        recurrence: rec,
        initial_values: initial,
        numeric_rhs: false,
        text: String::new(),
    };
    proof.text = proof_text(&proof);
    Ok(Outcome::Proof(Box::new(proof)))
}

/// Sum of `cofactor * exp(arg)` grouped by `arg`.
type ExpClasses = BTreeMap<Option<RatFun>, RatFun>;

fn render_classes(c: &ExpClasses) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .map(|(e, v)| match e {
            None => v.render(),
            Some(a) => format!("({})*exp({})", v.render(), a.render()),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn add_class(c: &mut ExpClasses, e: Option<RatFun>, v: RatFun) {
    let e = e.filter(|a| !a.is_zero());
    let slot = c.entry(e.clone()).or_insert_with(|| RatFun::zero(v.universe()));
    *slot = &*slot + &v;
    if slot.is_zero() {
        c.remove(&e);
    }
}

fn taylor_sum<T: IdentityTerm>(
    f: &T,
    a: u32,
    x: &BigRational,
    points: &[Vec<i64>],
    env: &Env,
) -> Result<ExpClasses, IdentityError> {
    let q = f.outer_quotient(a);
    let mut out = ExpClasses::new();
    for k in points {
        let (v, e) = f.value_parts(x, k, env)?;
        if v.is_zero() {
            continue;
        }
        let mut map = f.point_map(0, k);
        map[0] = (0, RatFun::constant(f.universe(), x.clone()));
        let qv = q.substitute_rat(&map).map_err(|_| TermError::PoleOfTerm)?;
        add_class(&mut out, e, &qv * &v);
    }
    Ok(out)
}

fn taylor_sum_terms<T: IdentityTerm>(
    terms: &[T],
    a: u32,
    x: &BigRational,
    env: &Env,
) -> Result<ExpClasses, IdentityError> {
    let mut out = ExpClasses::new();
    for t in terms {
        let zeros = vec![0; t.num_shifts()];
        let part = taylor_sum(t, a, x, &[zeros], env)?;
        for (e, v) in part {
            add_class(&mut out, e, v);
        }
    }
    Ok(out)
}

fn support_without_outer<T: IdentityTerm>(f: &T) -> Support {
    // gamma arguments never involve a continuous outer variable
    f.support_at(0)
}

/// The tuple carried by a certificate whose operator is a unit multiple of
/// `N - 1` (or of `D_x` for a continuous outer variable).
pub fn wz_from_certificate<T: IdentityTerm>(cert: &TelescopeCertificate<T>) -> Option<WZTuple<T>> {
    let c = cert.p.coeffs();
    if c.len() != 2 || !c[1].is_constant() {
        return None;
    }
    let unit = if cert.term.outer_is_continuous() {
        c[0].is_zero()
    } else {
        (&c[0] + &c[1]).is_zero()
    };
    if !unit {
        return None;
    }
    let scale = c[1].constant_value().expect("constant").recip();
    Some(WZTuple {
        f: cert.term.clone(),
        g: cert.r.iter().map(|x| x.scale(&scale)).collect(),
        h: cert.s.iter().map(|x| x.scale(&scale)).collect(),
    })
}

/// Divide by the closed right side and look for `P = N - 1`; otherwise
/// the operator found for the quotient.
pub fn to_wz_tuple<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    max_unknowns: usize,
) -> Result<Result<WZTuple<T>, UniOperator>, IdentityError> {
    let Rhs::Closed(terms) = &stmt.rhs else {
        return Err(IdentityError::Unsupported(
            "WZ tuples need a closed-form right side".into(),
        ));
    };
    if terms.is_empty() {
        return Err(IdentityError::ZeroRhs);
    }
    if terms.len() != 1 {
        return Err(IdentityError::Unsupported(
            "WZ tuples need a single-term right side".into(),
        ));
    }
    let fhat = stmt.lhs.divide(&terms[0])?;
    let cert = creative_telescope(&fhat, max_unknowns)?;
    Ok(wz_from_certificate(&cert).ok_or(cert.p))
}

/// The identity obtained by summing (and integrating) the WZ relation over
/// every variable except `keep`.
pub fn companions<T: IdentityTerm>(
    t: &WZTuple<T>,
    keep: &str,
) -> Result<IdentityStatement<T>, IdentityError> {
    let f = &t.f;
    let outer = f.outer_name();
    let shifts = f.shift_names();
    let diffs = f.diff_names();
    if keep == outer {
        return Ok(IdentityStatement {
            lhs: f.clone(),
            rhs: Rhs::Closed(vec![f.divide(f)?]),
        });
    }
    // the surviving part of the relation for `keep`, divided by F
    let (rho, bound): (RatFun, Vec<String>) = if let Some(i) = shifts.iter().position(|v| v == keep)
    {
        let g = &t.g[i];
        let shifted = g.substitute(&f.inner_shift_map(i)).expect("shift");
        let rel = &(&shifted * &f.inner_shift_quotient(i)) - g;
        let mut b = vec![outer.clone()];
        b.extend(shifts.iter().filter(|v| *v != keep).cloned());
        (-&rel, b)
    } else if let Some(j) = diffs.iter().position(|v| v == keep) {
        let h = &t.h[j];
        let y = f.inner_diff_var(j);
        let rel = &h.derivative(y) + &(h * &f.inner_diff_quotient(j));
        let mut b = vec![outer.clone()];
        b.extend(shifts.iter().cloned());
        (-&rel, b)
    } else {
        return Err(IdentityError::UnknownVariable(keep.to_string()));
    };
    if rho.is_zero() {
        return Err(IdentityError::Unsupported(format!(
            "the relation has no {keep}-part"
        )));
    }
    let lhs = f.times_rational(&rho)?.with_roles(keep, &bound)?;
    let text = format!(
        "F at {outer} = 0 minus the limit of F as {outer} -> infinity, summed over the other variables"
    );
    Ok(IdentityStatement {
        lhs,
        rhs: Rhs::Boundary(text),
    })
}

/// One row per outer value of an exact comparison of the two sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericReport {
    pub rows: Vec<(i64, RatFun, RatFun)>,
}

impl NumericReport {
    pub fn mismatches(&self) -> Vec<i64> {
        self.rows
            .iter()
            .filter(|(_, l, r)| l != r)
            .map(|(n, _, _)| *n)
            .collect()
    }

    pub fn all_equal(&self) -> bool {
        self.mismatches().is_empty()
    }
}

pub fn numeric_check<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    range: std::ops::RangeInclusive<i64>,
    env: &Env,
) -> Result<NumericReport, IdentityError> {
    require_params(&stmt.lhs, env)?;
    let mut rows = Vec::new();
    for n0 in range {
        let l = sum_value(&stmt.lhs, n0, env)?;
        let r = rhs_value(&stmt.rhs, n0, env)?.ok_or_else(|| {
            IdentityError::Unsupported("numeric check needs a right side".into())
        })?;
        let r = same_universe(&r, l.universe());
        rows.push((n0, l, r));
    }
    Ok(NumericReport { rows })
}

/// Two lines: the certified rational identity, then how summation and the
/// initial values finish the argument.
pub fn proof_text<T: IdentityTerm>(p: &Proof<T>) -> String {
    let f = &p.certificate.term;
    let first = p.verdict.trace.lines().next().unwrap_or_default().to_string();
    let mut ops: Vec<String> = f.shift_names().iter().map(|k| format!("summing over {k}")).collect();
    ops.extend(f.diff_names().iter().map(|y| format!("integrating over {y}")));
    let how = if ops.is_empty() {
        "Applying the relation".to_string()
    } else {
        let mut s = ops.join(" and ");
        s.replace_range(0..1, &s[0..1].to_uppercase());
        s
    };
    let outer = f.outer_name();
    let op = f.outer_operator_name();
    let values: Vec<String> = p
        .initial_values
        .iter()
        .map(|v| {
            if f.outer_is_continuous() {
                format!("D^{} f({outer} = {}) = {}", v.order, v.at, v.lhs)
            } else {
                format!("f({}) = {}", v.at, v.lhs)
            }
        })
        .collect();
    let mut second = format!(
        "{how} gives ({}) f = 0; both sides agree at {}, so they are equal",
        p.recurrence.p.render(&op),
        if values.is_empty() {
            "no initial values".to_string()
        } else {
            values.join(", ")
        }
    );
    if p.numeric_rhs {
        second.push_str(" (right side checked against the recurrence numerically)");
    }
    if p.verdict.vacuous {
        second.push_str(" (vacuous)");
    }
    second.push('.');
    format!("{first}\n{second}")
}

/// Partial sums `sum_{v=0}^{N} F(outer, v)` for `N = 0..=upto`, over the
/// single bound variable of a companion statement.
pub fn partial_sums<T: IdentityTerm>(
    f: &T,
    outer: i64,
    upto: i64,
    env: &Env,
) -> Result<Vec<RatFun>, IdentityError> {
    if f.num_shifts() != 1 || f.num_diffs() != 0 {
        return Err(IdentityError::Unsupported(
            "partial sums over one discrete variable".into(),
        ));
    }
    let mut acc = RatFun::zero(f.universe());
    let mut out = Vec::new();
    for v in 0..=upto {
        let (x, e) = f.value_parts(&rat(outer), &[v], env)?;
        if e.is_some() && !x.is_zero() {
            return Err(IdentityError::Unsupported(
                "exact evaluation of exponential factors".into(),
            ));
        }
        acc = &acc + &x;
        out.push(acc.clone());
    }
    Ok(out)
}
