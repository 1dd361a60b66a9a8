use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd;
use super::{ArithError, MultiPoly, Universe};

/// A reduced quotient of polynomials.
///
/// Canonical form: numerator and denominator coprime, both with integer
/// coefficients whose contents are coprime, denominator with positive
/// graded-lex leading coefficient, and zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFun {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ArithError> {
        if !num.universe().same(den.universe()) {
            return Err(ArithError::UniverseMismatch);
        }
        if den.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.universe());
        Self::normalize(p, den)
    }

    pub fn zero(u: &Universe) -> Self {
        RatFun {
            num: MultiPoly::zero(u),
            den: MultiPoly::one(u),
        }
    }

    pub fn one(u: &Universe) -> Self {
        RatFun {
            num: MultiPoly::one(u),
            den: MultiPoly::one(u),
        }
    }

    pub fn constant(u: &Universe, c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(u, c))
    }

    pub fn from_int(u: &Universe, c: i64) -> Self {
        Self::constant(u, super::rat(c))
    }

    pub fn var(u: &Universe, index: usize) -> Self {
        Self::from_poly(MultiPoly::var(u, index))
    }

    pub fn universe(&self) -> &Universe {
        self.num.universe()
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The polynomial this function equals, if it is one.
    pub fn to_poly(&self) -> Option<MultiPoly> {
        let d = self.den.constant_value()?;
        Some(self.num.scale(&d.recip()))
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.num.depends_on(var) || self.den.depends_on(var)
    }

    fn normalize(num: MultiPoly, den: MultiPoly) -> Self {
        let u = num.universe().clone();
        if num.is_zero() {
            return Self::zero(&u);
        }
        let (num, den) = if den.is_constant() || num.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.exact_div(&g).expect("gcd divides numerator"),
                    den.exact_div(&g).expect("gcd divides denominator"),
                )
            }
        };
        Self::fix_constants(num, den)
    }

    pub fn try_add(&self, other: &RatFun) -> Result<RatFun, ArithError> {
        if !self.universe().same(other.universe()) {
            return Err(ArithError::UniverseMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            return Ok(Self::normalize(&self.num + &other.num, self.den.clone()));
        }
        let g = gcd(&self.den, &other.den);
        let a = self.den.exact_div(&g)?;
        let b = other.den.exact_div(&g)?;
        let num = &(&self.num * &b) + &(&other.num * &a);
        let den = &self.den * &b;
        Ok(Self::normalize(num, den))
    }

    pub fn try_sub(&self, other: &RatFun) -> Result<RatFun, ArithError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &RatFun) -> Result<RatFun, ArithError> {
        if !self.universe().same(other.universe()) {
            return Err(ArithError::UniverseMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.universe()));
        }
        // cross-cancel before multiplying
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1)?;
        let d2 = other.den.exact_div(&g1)?;
        let n2 = other.num.exact_div(&g2)?;
        let d1 = self.den.exact_div(&g2)?;
        Ok(Self::fix_constants(&n1 * &n2, &d1 * &d2))
    }

    pub fn inv(&self) -> Result<RatFun, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn try_div(&self, other: &RatFun) -> Result<RatFun, ArithError> {
        self.try_mul(&other.inv()?)
    }

    pub fn scale(&self, c: &BigRational) -> RatFun {
        Self::normalize(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> RatFun {
        self * &RatFun::from_poly(p.clone())
    }

    pub fn pow(&self, e: i64) -> Result<RatFun, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        // powers of a canonical fraction stay coprime
        Ok(Self::fix_constants(base.num.pow(k), base.den.pow(k)))
    }

    /// Scale a coprime pair into canonical constant normalization.
    fn fix_constants(num: MultiPoly, den: MultiPoly) -> RatFun {
        if num.is_zero() {
            return Self::zero(den.universe());
        }
        let cn = num.content();
        let mut cd = den.content();
        if den.leading_coeff().is_negative() {
            cd = -cd;
        }
        let ratio = &cn / &cd;
        RatFun {
            num: num.scale(&(cn.recip() * BigRational::from_integer(ratio.numer().clone()))),
            den: den.scale(&(cd.recip() * BigRational::from_integer(ratio.denom().clone()))),
        }
    }

    pub fn derivative(&self, var: usize) -> RatFun {
        let dn = self.num.derivative(var);
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize(num, self.den.pow(2))
    }

    /// Apply a polynomial substitution to numerator and denominator.
    pub fn substitute(&self, map: &[(usize, MultiPoly)]) -> Result<RatFun, ArithError> {
        let den = self.den.substitute(map);
        if den.is_zero() {
            return Err(ArithError::DegenerateSubstitution);
        }
        Ok(Self::normalize(self.num.substitute(map), den))
    }

    /// Substitution where images may themselves be rational functions.
    pub fn substitute_rat(&self, map: &[(usize, RatFun)]) -> Result<RatFun, ArithError> {
        let num = poly_subst_rat(&self.num, map)?;
        let den = poly_subst_rat(&self.den, map)?;
        if den.is_zero() {
            return Err(ArithError::DegenerateSubstitution);
        }
        num.try_div(&den)
    }

    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, ArithError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ArithError::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn partial_eval(&self, assign: &[(usize, BigRational)]) -> Result<RatFun, ArithError> {
        let den = self.den.partial_eval(assign);
        if den.is_zero() {
            return Err(ArithError::Pole);
        }
        Ok(Self::normalize(self.num.partial_eval(assign), den))
    }

    pub fn reembed(&self, target: &Universe) -> Result<RatFun, ArithError> {
        Ok(RatFun {
            num: self.num.reembed(target)?,
            den: self.den.reembed(target)?,
        })
    }

    pub fn render_with(&self, sym: &dyn Fn(usize, u32) -> String) -> String {
        let n = self.num.render_with(sym);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.render_with(sym);
        let n = if self.num.num_terms() > 1 || n.starts_with('-') {
            format!("({n})")
        } else {
            n
        };
        format!("{n}/({d})")
    }

    pub fn render(&self) -> String {
        let n = self.num.render();
        if self.den.is_one() {
            return n;
        }
        let d = self.den.render();
        let n = if self.num.num_terms() > 1 || n.starts_with('-') {
            format!("({n})")
        } else {
            n
        };
        format!("{n}/({d})")
    }
}

fn poly_subst_rat(p: &MultiPoly, map: &[(usize, RatFun)]) -> Result<RatFun, ArithError> {
    let u = p.universe();
    let mut acc = RatFun::zero(u);
    for (m, c) in p.terms() {
        let mut exps = m.exponents().to_vec();
        let mut t = RatFun::one(u);
        for (v, image) in map {
            let e = exps[*v];
            if e > 0 {
                t = t.try_mul(&image.pow(e as i64)?)?;
                exps[*v] = 0;
            }
        }
        let rest = MultiPoly::monomial(u, super::Monomial::from_exponents(exps), c.clone());
        acc = acc.try_add(&t.mul_poly(&rest))?;
    }
    Ok(acc)
}

/// Common denominator of a list, primitive.
pub fn common_denominator<'a, I>(u: &Universe, items: I) -> MultiPoly
where
    I: IntoIterator<Item = &'a RatFun>,
{
    items
        .into_iter()
        .fold(MultiPoly::one(u), |acc, r| super::gcd::lcm(&acc, r.denom()))
}

/// Integer lcm of the coefficient denominators in a polynomial.
pub fn coefficient_lcm(p: &MultiPoly) -> num_bigint::BigInt {
    p.terms()
        .fold(num_bigint::BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({})", self.render())
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a RatFun> for &'a RatFun {
            type Output = RatFun;
            fn $method(self, rhs: &'a RatFun) -> RatFun {
                self.$checked(rhs).expect("rational function arithmetic")
            }
        }
        impl $trait<RatFun> for RatFun {
            type Output = RatFun;
            fn $method(self, rhs: RatFun) -> RatFun {
                (&self).$checked(&rhs).expect("rational function arithmetic")
            }
        }
    };
}

rat_binop!(Add, add, try_add);
rat_binop!(Sub, sub, try_sub);
rat_binop!(Mul, mul, try_mul);
rat_binop!(Div, div, try_div);

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}
