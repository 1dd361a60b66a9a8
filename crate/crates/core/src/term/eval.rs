//! Exact point evaluation of hypergeometric terms.
//!
//! Gamma factors are grouped into classes whose arguments differ by integers.
//! Within a class only ratios are needed, so a class with a symbolic or
//! non-integral argument evaluates exactly as a rising product once its
//! exponents cancel. The integral class is evaluated with pole counting:
//! `1/Gamma(-m) = 0`, and matched numerator/denominator poles cancel through
//! their residues `(-1)^m / m!`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rat, MultiPoly, RatFun};

use super::{HyperTerm, LinForm, TermError};

/// Value of a term at a rational point: `cofactor * exp(exp_arg)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermValue {
    pub cofactor: BigRational,
    pub exp_arg: Option<BigRational>,
}

impl TermValue {
    pub fn is_zero(&self) -> bool {
        self.cofactor.is_zero()
    }

    /// Floating-point value, for numeric sanity checks only.
    pub fn to_f64(&self) -> f64 {
        let c = self.cofactor.to_f64().unwrap_or(f64::NAN);
        match &self.exp_arg {
            Some(a) => c * a.to_f64().unwrap_or(f64::NAN).exp(),
            None => c,
        }
    }
}

/// Value with some variables left symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicValue {
    pub cofactor: RatFun,
    pub exp_arg: Option<RatFun>,
}

pub(crate) fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `Gamma(c)` for an integer `c`, or its residue when `c <= 0`.
fn gamma_integer(c: &BigInt) -> (BigRational, bool) {
    if c.is_positive() {
        let m = (c - 1u32).to_u64().expect("gamma argument fits in u64");
        (BigRational::from_integer(factorial(m)), false)
    } else {
        let m = (-c).to_u64().expect("gamma argument fits in u64");
        let sign = if m.is_even() { 1 } else { -1 };
        (BigRational::new(BigInt::from(sign), factorial(m)), true)
    }
}

/// Accumulates a product as numerator/denominator polynomials plus a zero
/// order (positive: the value vanishes; negative: it has a pole).
pub(crate) struct ProductAcc {
    pub num: MultiPoly,
    pub den: MultiPoly,
    pub order: i64,
}

impl ProductAcc {
    pub fn new(u: &crate::arith::Universe) -> Self {
        ProductAcc {
            num: MultiPoly::one(u),
            den: MultiPoly::one(u),
            order: 0,
        }
    }

    pub fn mul_scalar(&mut self, c: &BigRational, e: i64) {
        let c = num_traits::pow(c.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            self.num = self.num.scale(&c);
        } else {
            self.num = self.num.scale(&c.recip());
        }
    }

    pub fn mul_poly(&mut self, p: &MultiPoly, e: i64) {
        let pe = p.pow(e.unsigned_abs() as u32);
        if e >= 0 {
            self.num = &self.num * &pe;
        } else {
            self.den = &self.den * &pe;
        }
    }

    pub fn mul_ratfun(&mut self, r: &RatFun, e: i64) {
        self.mul_poly(r.numer(), e);
        self.mul_poly(r.denom(), -e);
    }

    pub fn finish(self) -> Result<RatFun, TermError> {
        let u = self.num.universe().clone();
        if self.order > 0 {
            return Ok(RatFun::zero(&u));
        }
        if self.order < 0 {
            return Err(TermError::PoleOfTerm);
        }
        Ok(RatFun::new(self.num, self.den)?)
    }
}

impl HyperTerm {
    fn first_symbolic(&self, l: &LinForm) -> Option<String> {
        (0..l.len())
            .find(|&v| l.depends_on(v))
            .map(|v| self.universe().name(v).to_string())
    }

    /// Evaluate with the given variables assigned (`None` keeps a symbol).
    /// Every discrete variable must be assigned an integer.
    pub fn eval_partial(&self, assign: &[Option<BigRational>]) -> Result<SymbolicValue, TermError> {
        let u = self.universe().clone();
        assert_eq!(assign.len(), u.len(), "assignment length");
        for v in 0..u.len() {
            if self.is_discrete(v) {
                match &assign[v] {
                    None => return Err(TermError::UnboundParameter(u.name(v).to_string())),
                    Some(x) if !x.is_integer() => {
                        return Err(TermError::NonIntegerDiscrete(u.name(v).to_string()))
                    }
                    _ => {}
                }
            }
        }
        let pairs: Vec<(usize, BigRational)> = assign
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.clone().map(|x| (i, x)))
            .collect();
        let mut acc = ProductAcc::new(&u);

        // gamma classes keyed by (symbolic part, fractional part of constant)
        let mut classes: BTreeMap<(Vec<BigRational>, BigRational), Vec<(BigRational, i64)>> =
            BTreeMap::new();
        for g in self.gammas() {
            let l = g.arg.partial_eval(assign);
            let c = l.constant_part().clone();
            let frac = &c - c.floor();
            classes
                .entry((l.coeffs().to_vec(), frac))
                .or_default()
                .push((c, g.exp));
        }
        for ((sym, frac), members) in classes {
            let symbolic = sym.iter().any(|c| !c.is_zero());
            if !symbolic && frac.is_zero() {
                for (c, e) in &members {
                    let (val, pole) = gamma_integer(&c.to_integer());
                    if pole {
                        acc.order -= e;
                    }
                    acc.mul_scalar(&val, *e);
                }
                continue;
            }
            let total: i64 = members.iter().map(|(_, e)| e).sum();
            if total != 0 {
                return Err(if symbolic {
                    let l = LinForm::new(sym.clone(), BigRational::zero());
                    TermError::UnboundParameter(self.first_symbolic(&l).unwrap_or_default())
                } else {
                    TermError::NonIntegerGamma
                });
            }
            let base = members.iter().map(|(c, _)| c.clone()).min().expect("nonempty class");
            let sym_poly = LinForm::new(sym, BigRational::zero()).to_poly(&u);
            for (c, e) in &members {
                // Gamma(S + c) / Gamma(S + base) = prod_{t=0}^{c-base-1} (S + base + t)
                let steps = (c - &base).to_integer().to_i64().expect("small gamma offset");
                let mut p = MultiPoly::one(&u);
                for t in 0..steps {
                    let shift = &base + rat(t);
                    p = &p * &(&sym_poly + &MultiPoly::constant(&u, shift));
                }
                acc.mul_poly(&p, *e);
            }
        }

        for p in self.powers() {
            let ex = p.exponent.partial_eval(assign);
            if !ex.is_constant() {
                return Err(TermError::UnboundParameter(
                    self.first_symbolic(&ex).unwrap_or_default(),
                ));
            }
            let e = ex.constant_part();
            if !e.is_integer() {
                return Err(TermError::NonIntegerExponent);
            }
            let e = e.to_integer().to_i64().expect("exponent fits in i64");
            let base = p.base.partial_eval(&pairs).map_err(|_| TermError::PoleOfTerm)?;
            if base.is_zero() {
                if e > 0 {
                    acc.order += 1;
                } else if e < 0 {
                    acc.order -= 1;
                }
                continue;
            }
            acc.mul_ratfun(&base, e);
        }

        let r = self
            .rational()
            .partial_eval(&pairs)
            .map_err(|_| TermError::PoleOfTerm)?;
        if r.is_zero() {
            acc.order += 1;
        } else {
            acc.mul_ratfun(&r, 1);
        }

        let exp_arg = match self.exp_arg() {
            Some(a) => Some(a.partial_eval(&pairs).map_err(|_| TermError::PoleOfTerm)?),
            None => None,
        };
        Ok(SymbolicValue {
            cofactor: acc.finish()?,
            exp_arg,
        })
    }

    /// Exact value at a point assigning every variable.
    pub fn eval_term(&self, point: &[BigRational]) -> Result<TermValue, TermError> {
        let assign: Vec<Option<BigRational>> = point.iter().cloned().map(Some).collect();
        let v = self.eval_partial(&assign)?;
        Ok(TermValue {
            cofactor: v.cofactor.constant_value().expect("fully assigned"),
            exp_arg: v
                .exp_arg
                .map(|a| a.constant_value().expect("fully assigned")),
        })
    }

    /// Evaluation with values given by variable name; unnamed variables stay
    /// symbolic.
    pub fn eval_named(&self, values: &[(&str, BigRational)]) -> Result<SymbolicValue, TermError> {
        let mut assign = vec![None; self.universe().len()];
        for (name, v) in values {
            let i = self
                .var_index(name)
                .ok_or_else(|| TermError::UnknownVariable(name.to_string()))?;
            assign[i] = Some(v.clone());
        }
        self.eval_partial(&assign)
    }
}
