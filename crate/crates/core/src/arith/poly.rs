use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ArithError, Universe};

/// Exponent vector, ordered graded-lexicographically: total degree first, then
/// the earlier variable with the larger exponent wins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len].into_boxed_slice())
    }

    pub fn var(len: usize, index: usize, exp: u32) -> Self {
        let mut e = vec![0; len];
        e[index] = exp;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is dominated.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out.into_boxed_slice()))
    }

    fn with_exponent(&self, index: usize, exp: u32) -> Monomial {
        let mut e = self.0.clone();
        e[index] = exp;
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials with no zero
/// coefficients, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    universe: Universe,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MultiPoly {
    pub fn zero(universe: &Universe) -> Self {
        MultiPoly {
            universe: universe.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(universe: &Universe) -> Self {
        Self::constant(universe, BigRational::one())
    }

    pub fn constant(universe: &Universe, c: BigRational) -> Self {
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(universe.len()), c);
        }
        p
    }

    pub fn from_int(universe: &Universe, c: i64) -> Self {
        Self::constant(universe, rat(c))
    }

    pub fn var(universe: &Universe, index: usize) -> Self {
        Self::monomial(universe, Monomial::var(universe.len(), index, 1), BigRational::one())
    }

    pub fn monomial(universe: &Universe, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.0.len(), universe.len(), "monomial length");
        let mut p = Self::zero(universe);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(universe: &Universe, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(universe);
        for (m, c) in terms {
            assert_eq!(m.0.len(), universe.len(), "monomial length");
            p.add_term(m, c);
        }
        p
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value when the polynomial is constant (including zero).
    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.leading_term().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Indices of variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.universe.len()).filter(|&v| self.depends_on(v)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &MultiPoly) -> Result<(), ArithError> {
        if self.universe.same(&other.universe) {
            Ok(())
        } else {
            Err(ArithError::UniverseMismatch)
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, ArithError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, ArithError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, ArithError> {
        self.check(other)?;
        let mut out = Self::zero(&self.universe);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.universe);
        }
        MultiPoly {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.universe);
        }
        MultiPoly {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = Self::one(&self.universe);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Quotient `q` with `q * divisor == self`, or an error when the division
    /// leaves a remainder.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Result<MultiPoly, ArithError> {
        self.check(divisor)?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(ArithError::ZeroDenominator),
        };
        if divisor.terms.len() == 1 {
            let mut out = Self::zero(&self.universe);
            for (m, c) in &self.terms {
                let q = m.checked_div(&lm).ok_or(ArithError::InexactDivision)?;
                out.terms.insert(q, c / &lc);
            }
            return Ok(out);
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.universe);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.checked_div(&lm).ok_or(ArithError::InexactDivision)?;
            let qc = c / &lc;
            for (dm, dc) in &divisor.terms {
                rem.add_term(dm.mul(&qm), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = Self::zero(&self.universe);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                out.add_term(m.with_exponent(var, e - 1), c * rat(e as i64));
            }
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials over the same
    /// universe. Unmapped variables are left alone.
    pub fn substitute(&self, map: &[(usize, MultiPoly)]) -> MultiPoly {
        if map.is_empty() {
            return self.clone();
        }
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut out = Self::zero(&self.universe);
        for (m, c) in &self.terms {
            let mut rest = m.0.clone();
            let mut factor = Self::constant(&self.universe, c.clone());
            for (var, image) in map {
                let e = m.0[*var];
                if e == 0 {
                    continue;
                }
                rest[*var] = 0;
                let power = cache
                    .entry((*var, e))
                    .or_insert_with(|| image.pow(e))
                    .clone();
                factor = &factor * &power;
            }
            let rest = Monomial(rest);
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&rest), fc);
            }
        }
        out
    }

    /// Full evaluation at a point with one value per universe variable.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.universe.len(), "point length");
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute rational values for some variables, keeping the universe.
    pub fn partial_eval(&self, assign: &[(usize, BigRational)]) -> MultiPoly {
        let mut out = Self::zero(&self.universe);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let mut t = c.clone();
            for (v, val) in assign {
                if e[*v] > 0 {
                    t *= num_traits::pow(val.clone(), e[*v] as usize);
                    e[*v] = 0;
                }
            }
            out.add_term(Monomial(e), t);
        }
        out
    }

    /// Group terms by their exponents in `vars`; each coefficient has those
    /// exponents zeroed.
    pub fn coefficients_in(&self, vars: &[usize]) -> BTreeMap<Vec<u32>, MultiPoly> {
        let mut out: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = vars.iter().map(|&v| m.0[v]).collect();
            let mut rest = m.0.clone();
            for &v in vars {
                rest[v] = 0;
            }
            out.entry(key)
                .or_insert_with(|| Self::zero(&self.universe))
                .add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Coefficients as a univariate polynomial in `var`, index = degree.
    pub fn univariate_coeffs(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(&self.universe); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            out[e].add_term(m.with_exponent(var, 0), c.clone());
        }
        out
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::zero();
        }
        BigRational::new(num, den)
    }

    /// Integer-primitive associate with positive leading coefficient.
    pub fn primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Move the polynomial into another universe by symbol name.
    pub fn reembed(&self, target: &Universe) -> Result<MultiPoly, ArithError> {
        if self.universe.same(target) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.universe.len());
        for (i, name) in self.universe.names().iter().enumerate() {
            let idx = target.index_of(name);
            if idx.is_none() && self.depends_on(i) {
                return Err(ArithError::UniverseMismatch);
            }
            map.push(idx);
        }
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] += x;
                }
            }
            out.add_term(Monomial(e.into_boxed_slice()), c.clone());
        }
        Ok(out)
    }

    /// Render with a custom symbol printer `(var, exponent) -> text`.
    pub fn render_with(&self, sym: &dyn Fn(usize, u32) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    parts.push(sym(v, e));
                }
            }
            s.push_str(&parts.join("*"));
        }
        s
    }

    pub fn render(&self) -> String {
        let u = self.universe.clone();
        self.render_with(&|v, e| {
            let name = u.name(v);
            match (e, name.split_once('^')) {
                (1, _) => name.to_string(),
                // q-power symbols such as `q^k`
                (_, Some((b, x))) => format!("{b}^({e}*{x})"),
                _ => format!("{name}^{e}"),
            }
        })
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({})", self.render())
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &'a MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("polynomial universe mismatch")
            }
        }
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$checked(&rhs).expect("polynomial universe mismatch")
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            universe: self.universe.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
