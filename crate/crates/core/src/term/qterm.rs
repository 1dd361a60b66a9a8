//! q-hypergeometric terms.
//!
//! Exponent data lives over the "linear" universe `(n, k_1.., params)`;
//! rational data over `(q, q^n, q^k_1.., params)`. Index `v` of the linear
//! universe corresponds to index `v + 1` of the rational one.
//!
//! `(A q^L1; q)_L2` is handled as `Inf(L1) / Inf(L1 + L2)` with
//! `Inf(M) = (A q^M; q)_inf`, which makes negative lengths and shifts
//! uniform.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{rat, MultiPoly, RatFun, Universe};

use super::{support_box, LinForm, PowerFactor, ProductAcc, Support, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QTermShape {
    pub outer: String,
    pub inner: Vec<String>,
    pub params: Vec<String>,
}

impl QTermShape {
    pub fn new(outer: &str, inner: &[&str]) -> Self {
        QTermShape {
            outer: outer.to_string(),
            inner: inner.iter().map(|s| s.to_string()).collect(),
            params: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: &[&str]) -> Self {
        self.params = params.iter().map(|s| s.to_string()).collect();
        self
    }

    fn sorted_params(&self) -> Vec<String> {
        let mut p = self.params.clone();
        p.sort();
        p.dedup();
        p
    }

    pub fn lin_universe(&self) -> Universe {
        let mut names = vec![self.outer.clone()];
        names.extend(self.inner.iter().cloned());
        names.extend(self.sorted_params());
        Universe::new(names)
    }

    pub fn rat_universe(&self) -> Universe {
        let mut names = vec!["q".to_string(), format!("q^{}", self.outer)];
        names.extend(self.inner.iter().map(|k| format!("q^{k}")));
        names.extend(self.sorted_params());
        Universe::new(names)
    }
}

/// `(coeff * q^shift; q)_len ^ exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPochFactor {
    pub coeff: RatFun,
    pub shift: LinForm,
    pub len: LinForm,
    pub exp: i64,
}

/// Integer-valued quadratic form in the discrete variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub quad: BTreeMap<(usize, usize), BigRational>,
    pub lin: LinForm,
}

impl QuadForm {
    pub fn zero(len: usize) -> Self {
        QuadForm {
            quad: BTreeMap::new(),
            lin: LinForm::zero(len),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.quad.is_empty() && self.lin.is_constant() && self.lin.constant_part().is_zero()
    }

    pub fn add_quad(&mut self, i: usize, j: usize, c: BigRational) {
        let key = if i <= j { (i, j) } else { (j, i) };
        let e = self.quad.entry(key).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.quad.remove(&key);
        }
    }

    pub fn add(&self, other: &QuadForm) -> QuadForm {
        let mut out = QuadForm {
            quad: self.quad.clone(),
            lin: self.lin.add(&other.lin),
        };
        for (&(i, j), c) in &other.quad {
            out.add_quad(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> QuadForm {
        QuadForm {
            quad: self.quad.iter().map(|(k, c)| (*k, -c)).collect(),
            lin: self.lin.neg(),
        }
    }

    pub fn value(&self, p: &[BigRational]) -> BigRational {
        let mut v = self.lin.constant_part().clone();
        for (i, x) in p.iter().enumerate() {
            v += self.lin.coeff(i) * x;
        }
        for (&(i, j), c) in &self.quad {
            v += c * &p[i] * &p[j];
        }
        v
    }

    /// `Q(p + s) - Q(p)` as an affine form in `p`.
    pub fn delta(&self, shifts: &[(usize, i64)]) -> LinForm {
        let len = self.lin.len();
        let mut s = vec![BigRational::zero(); len];
        for &(v, d) in shifts {
            s[v] += rat(d);
        }
        let mut out = LinForm::constant(len, BigRational::zero());
        let mut coeffs = vec![BigRational::zero(); len];
        let mut constant = BigRational::zero();
        for (v, sv) in s.iter().enumerate() {
            constant += self.lin.coeff(v) * sv;
        }
        for (&(i, j), c) in &self.quad {
            coeffs[i] += c * &s[j];
            coeffs[j] += c * &s[i];
            constant += c * &s[i] * &s[j];
        }
        out = out.add(&LinForm::new(coeffs, constant));
        out
    }

    /// Integer-valued on the lattice of the first `disc` variables.
    fn integer_valued(&self, disc: usize) -> bool {
        let len = self.lin.len();
        let point = |pairs: &[(usize, i64)]| {
            let mut p = vec![BigRational::zero(); len];
            for &(v, x) in pairs {
                p[v] = rat(x);
            }
            self.value(&p).is_integer()
        };
        if !point(&[]) {
            return false;
        }
        for i in 0..disc {
            if !point(&[(i, 1)]) || !point(&[(i, -1)]) {
                return false;
            }
            for j in i + 1..disc {
                if !point(&[(i, 1), (j, 1)]) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QHyperTerm {
    lin_u: Universe,
    rat_u: Universe,
    n_inner: usize,
    qpochs: Vec<QPochFactor>,
    qpow: QuadForm,
    geoms: Vec<PowerFactor>,
    rational: RatFun,
}

impl QHyperTerm {
    pub fn one(shape: &QTermShape) -> Self {
        let lin_u = shape.lin_universe();
        let rat_u = shape.rat_universe();
        QHyperTerm {
            qpow: QuadForm::zero(lin_u.len()),
            rational: RatFun::one(&rat_u),
            lin_u,
            rat_u,
            n_inner: shape.inner.len(),
            qpochs: Vec::new(),
            geoms: Vec::new(),
        }
    }

    pub fn shape(&self) -> QTermShape {
        let names = self.lin_u.names();
        QTermShape {
            outer: names[0].clone(),
            inner: names[1..1 + self.n_inner].to_vec(),
            params: names[1 + self.n_inner..].to_vec(),
        }
    }

    /// The rational-function universe `(q, q^n, q^k.., params)`.
    pub fn universe(&self) -> &Universe {
        &self.rat_u
    }

    pub fn lin_universe(&self) -> &Universe {
        &self.lin_u
    }

    pub fn num_inner(&self) -> usize {
        self.n_inner
    }

    pub fn num_discrete(&self) -> usize {
        1 + self.n_inner
    }

    pub fn q_var(&self) -> usize {
        0
    }

    /// Rational-universe index of `q^v` for linear index `v`.
    pub fn rat_index(&self, lin: usize) -> usize {
        lin + 1
    }

    pub fn qpochs(&self) -> &[QPochFactor] {
        &self.qpochs
    }

    pub fn qpow(&self) -> &QuadForm {
        &self.qpow
    }

    pub fn geoms(&self) -> &[PowerFactor] {
        &self.geoms
    }

    pub fn rational(&self) -> &RatFun {
        &self.rational
    }

    fn is_discrete(&self, lin: usize) -> bool {
        lin <= self.n_inner
    }

    fn check_exponent(&self, l: &LinForm, allow_params: bool) -> Result<(), TermError> {
        if l.len() != self.lin_u.len() {
            return Err(TermError::Invalid("linear form length".into()));
        }
        for v in 0..l.len() {
            let c = l.coeff(v);
            if c.is_zero() {
                continue;
            }
            if self.is_discrete(v) && !c.is_integer() {
                return Err(TermError::NonIntegerCoefficient(self.lin_u.name(v).to_string()));
            }
            if !self.is_discrete(v) && !allow_params {
                return Err(TermError::Invalid(format!(
                    "parameter {} in a q-exponent",
                    self.lin_u.name(v)
                )));
            }
        }
        if !allow_params && !l.constant_part().is_integer() {
            return Err(TermError::Invalid("non-integer constant in a q-exponent".into()));
        }
        Ok(())
    }

    fn check_coefficient(&self, r: &RatFun, what: &str) -> Result<(), TermError> {
        if !r.universe().same(&self.rat_u) {
            return Err(TermError::Invalid(format!("{what}: universe mismatch")));
        }
        for v in 1..=1 + self.n_inner {
            if r.depends_on(v) {
                return Err(TermError::Invalid(format!(
                    "{what} depends on {}",
                    self.rat_u.name(v)
                )));
            }
        }
        Ok(())
    }

    /// `q^j` if `r` is exactly a power of `q`.
    fn q_power_of(&self, r: &RatFun) -> Option<i64> {
        let single = |p: &MultiPoly| -> Option<u32> {
            if p.num_terms() != 1 {
                return None;
            }
            let (m, c) = p.leading_term()?;
            if !c.is_one() {
                return None;
            }
            let e = m.exponents();
            e.iter()
                .enumerate()
                .all(|(i, x)| i == 0 || *x == 0)
                .then_some(e[0])
        };
        let a = single(r.numer())?;
        let b = single(r.denom())?;
        Some(a as i64 - b as i64)
    }

    pub fn push_qpoch(
        &mut self,
        coeff: RatFun,
        shift: LinForm,
        len: LinForm,
        exp: i64,
    ) -> Result<(), TermError> {
        self.check_coefficient(&coeff, "q-Pochhammer coefficient")?;
        self.check_exponent(&shift, false)?;
        self.check_exponent(&len, false)?;
        if coeff.is_zero() {
            return Ok(());
        }
        let (coeff, shift) = match self.q_power_of(&coeff) {
            Some(j) => (RatFun::one(&self.rat_u), shift.add_constant(&rat(j))),
            None => (coeff, shift),
        };
        if exp != 0 {
            self.qpochs.push(QPochFactor {
                coeff,
                shift,
                len,
                exp,
            });
        }
        self.normalize();
        Ok(())
    }

    pub fn push_qpow(&mut self, q: QuadForm) -> Result<(), TermError> {
        let disc = self.num_discrete();
        if q.lin.len() != self.lin_u.len() {
            return Err(TermError::Invalid("linear form length".into()));
        }
        if (disc..q.lin.len()).any(|v| q.lin.depends_on(v)) {
            return Err(TermError::Invalid("parameter in a q-exponent".into()));
        }
        if q.quad.keys().any(|&(i, j)| i >= disc || j >= disc) {
            return Err(TermError::Invalid("q-power quadratic in a parameter".into()));
        }
        let sum = self.qpow.add(&q);
        if !sum.integer_valued(disc) {
            return Err(TermError::Invalid("q-power exponent is not integer-valued".into()));
        }
        self.qpow = sum;
        Ok(())
    }

    pub fn push_geom(&mut self, base: RatFun, exponent: LinForm) -> Result<(), TermError> {
        self.check_coefficient(&base, "geometric base")?;
        self.check_exponent(&exponent, true)?;
        if base.is_zero() {
            return Err(TermError::Invalid("geometric base is zero".into()));
        }
        if base.is_one() {
            return Ok(());
        }
        if let Some(j) = self.q_power_of(&base) {
            let mut q = QuadForm::zero(self.lin_u.len());
            q.lin = exponent.scale(&rat(j));
            return self.push_qpow(q);
        }
        self.geoms.push(PowerFactor { base, exponent });
        self.normalize();
        Ok(())
    }

    pub fn mul_rational(&mut self, r: &RatFun) -> Result<(), TermError> {
        if !r.universe().same(&self.rat_u) {
            return Err(TermError::Invalid("rational factor: universe mismatch".into()));
        }
        if r.is_zero() {
            return Err(TermError::Invalid("zero rational factor".into()));
        }
        self.rational = &self.rational * r;
        Ok(())
    }

    fn normalize(&mut self) {
        self.qpochs
            .sort_by(|a, b| (&a.coeff, &a.shift, &a.len).cmp(&(&b.coeff, &b.shift, &b.len)));
        let mut merged: Vec<QPochFactor> = Vec::with_capacity(self.qpochs.len());
        for f in self.qpochs.drain(..) {
            match merged.last_mut() {
                Some(last)
                    if last.coeff == f.coeff && last.shift == f.shift && last.len == f.len =>
                {
                    last.exp += f.exp
                }
                _ => merged.push(f),
            }
        }
        merged.retain(|f| f.exp != 0);
        self.qpochs = merged;

        self.geoms.sort_by(|a, b| a.base.cmp(&b.base));
        let mut merged: Vec<PowerFactor> = Vec::with_capacity(self.geoms.len());
        for p in self.geoms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.base == p.base => last.exponent = last.exponent.add(&p.exponent),
                _ => merged.push(p),
            }
        }
        // constant integer exponents belong in the rational part
        let mut kept = Vec::with_capacity(merged.len());
        for p in merged {
            match p.exponent.int_value() {
                Some(e) => {
                    let e = e.to_i64().expect("small exponent");
                    self.rational = &self.rational * &p.base.pow(e).expect("nonzero base");
                }
                None => kept.push(p),
            }
        }
        self.geoms = kept;
    }

    pub fn mul(&self, other: &QHyperTerm) -> Result<QHyperTerm, TermError> {
        if self.shape() != other.shape() {
            return Err(TermError::Invalid("product of terms with different shapes".into()));
        }
        let mut out = self.clone();
        out.qpochs.extend(other.qpochs.iter().cloned());
        out.geoms.extend(other.geoms.iter().cloned());
        out.qpow = out.qpow.add(&other.qpow);
        out.rational = &out.rational * &other.rational;
        out.normalize();
        Ok(out)
    }

    pub fn reciprocal(&self) -> QHyperTerm {
        let mut out = self.clone();
        for f in &mut out.qpochs {
            f.exp = -f.exp;
        }
        for p in &mut out.geoms {
            p.exponent = p.exponent.neg();
        }
        out.qpow = self.qpow.neg();
        out.rational = self.rational.inv().expect("rational factor is nonzero");
        out
    }

    /// Move the term to a shape containing all of its variables.
    pub fn reshape(&self, shape: &QTermShape) -> Result<QHyperTerm, TermError> {
        let mut out = QHyperTerm::one(shape);
        let lu = out.lin_u.clone();
        let ru = out.rat_u.clone();
        let map = |i: usize| lu.index_of(self.lin_u.name(i));
        for f in &self.qpochs {
            out.push_qpoch(
                f.coeff.reembed(&ru)?,
                f.shift.remap(lu.len(), &map),
                f.len.remap(lu.len(), &map),
                f.exp,
            )?;
        }
        let mut q = QuadForm::zero(lu.len());
        q.lin = self.qpow.lin.remap(lu.len(), &map);
        for (&(i, j), c) in &self.qpow.quad {
            let (a, b) = (map(i).expect("variable"), map(j).expect("variable"));
            q.add_quad(a, b, c.clone());
        }
        out.push_qpow(q)?;
        for p in &self.geoms {
            out.push_geom(p.base.reembed(&ru)?, p.exponent.remap(lu.len(), &map))?;
        }
        out.mul_rational(&self.rational.reembed(&ru)?)?;
        Ok(out)
    }

    /// `q^M` as a Laurent monomial in `(q, q^n, q^k..)`.
    pub(crate) fn q_monomial(&self, m: &LinForm) -> RatFun {
        let u = &self.rat_u;
        let mut num = vec![0u32; u.len()];
        let mut den = vec![0u32; u.len()];
        let mut put = |idx: usize, e: i64| {
            if e > 0 {
                num[idx] += e as u32;
            } else if e < 0 {
                den[idx] += (-e) as u32;
            }
        };
        put(0, m.constant_part().to_integer().to_i64().expect("small exponent"));
        for v in 0..self.num_discrete() {
            put(v + 1, m.int_coeff(v));
        }
        let mono = |e: Vec<u32>| {
            MultiPoly::monomial(u, crate::arith::Monomial::from_exponents(e), BigRational::one())
        };
        RatFun::new(mono(num), mono(den)).expect("monomial denominator")
    }

    /// `Inf(M + d) / Inf(M)`.
    fn inf_ratio(&self, coeff: &RatFun, m: &LinForm, d: i64) -> RatFun {
        let one = RatFun::one(&self.rat_u);
        let factor = |i: i64| &one - &(coeff * &self.q_monomial(&m.add_constant(&rat(i))));
        let mut out = one.clone();
        if d > 0 {
            for i in 0..d {
                out = &out / &factor(i);
            }
        } else {
            for i in 1..=-d {
                out = &out * &factor(-i);
            }
        }
        out
    }

    /// `F(p + s) / F(p)` for a shift of discrete variables (linear indices).
    pub fn shift_by(&self, shifts: &[(usize, i64)]) -> RatFun {
        let u = &self.rat_u;
        let mut acc = RatFun::one(u);
        for f in &self.qpochs {
            let d1 = f.shift.shift_delta(shifts);
            let top = f.shift.add(&f.len);
            let d2 = top.shift_delta(shifts);
            if d1 == 0 && d2 == 0 {
                continue;
            }
            let r = &self.inf_ratio(&f.coeff, &f.shift, d1) / &self.inf_ratio(&f.coeff, &top, d2);
            acc = &acc * &r.pow(f.exp).expect("nonzero ratio");
        }
        let dq = self.qpow.delta(shifts);
        if !(dq.is_constant() && dq.constant_part().is_zero()) {
            acc = &acc * &self.q_monomial(&dq);
        }
        for p in &self.geoms {
            let d = p.exponent.shift_delta(shifts);
            if d != 0 {
                acc = &acc * &p.base.pow(d).expect("nonzero base");
            }
        }
        if !self.rational.is_one() {
            let map = self.shift_map(shifts);
            if !map.is_empty() {
                let shifted = self
                    .rational
                    .substitute_rat(&map)
                    .expect("q-shift is an automorphism");
                acc = &acc * &(&shifted / &self.rational);
            }
        }
        acc
    }

    /// `q^v -> q^s * q^v` for each shifted variable.
    fn shift_map(&self, shifts: &[(usize, i64)]) -> Vec<(usize, RatFun)> {
        let u = &self.rat_u;
        shifts
            .iter()
            .filter(|(_, s)| *s != 0)
            .map(|&(v, s)| {
                let qs = RatFun::var(u, 0).pow(s).expect("q is nonzero");
                (v + 1, &qs * &RatFun::var(u, v + 1))
            })
            .collect()
    }

    /// `K_v F / F` for a discrete variable given by linear index.
    pub fn q_shift_quotient(&self, var: usize) -> Result<RatFun, TermError> {
        if !self.is_discrete(var) {
            return Err(TermError::NotDiscrete(self.lin_u.name(var).to_string()));
        }
        Ok(self.shift_by(&[(var, 1)]))
    }

    pub fn monomial_quotient(&self, outer: u32, shifts: &[u32]) -> RatFun {
        let mut s: Vec<(usize, i64)> = shifts
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(i, &b)| (1 + i, b as i64))
            .collect();
        if outer > 0 {
            s.push((0, outer as i64));
        }
        self.shift_by(&s)
    }

    /// Polynomial substitution `q^k_i -> q * q^k_i`.
    pub fn inner_shift(&self, i: usize) -> Vec<(usize, MultiPoly)> {
        let u = &self.rat_u;
        let v = 2 + i;
        vec![(v, &MultiPoly::var(u, 0) * &MultiPoly::var(u, v))]
    }

    /// Exact value at integer discrete values, with `q` and parameters
    /// optionally left symbolic.
    pub fn eval_partial(
        &self,
        disc: &[i64],
        q: Option<&BigRational>,
        params: &[Option<BigRational>],
    ) -> Result<RatFun, TermError> {
        let u = &self.rat_u;
        let nd = self.num_discrete();
        assert_eq!(disc.len(), nd, "discrete assignment length");
        assert_eq!(params.len(), self.lin_u.len() - nd, "parameter assignment length");
        let qv = match q {
            Some(x) => RatFun::constant(u, x.clone()),
            None => RatFun::var(u, 0),
        };
        let qpow = |e: i64| qv.pow(e).map_err(|_| TermError::PoleOfTerm);
        let mut map: Vec<(usize, RatFun)> = Vec::new();
        if q.is_some() {
            map.push((0, qv.clone()));
        }
        for (v, &x) in disc.iter().enumerate() {
            map.push((v + 1, qpow(x)?));
        }
        for (j, p) in params.iter().enumerate() {
            if let Some(x) = p {
                map.push((nd + 1 + j, RatFun::constant(u, x.clone())));
            }
        }
        let subst = |r: &RatFun| r.substitute_rat(&map).map_err(|_| TermError::PoleOfTerm);
        let mut lin_point: Vec<Option<BigRational>> = disc.iter().map(|&x| Some(rat(x))).collect();
        lin_point.extend(params.iter().cloned());
        let int_of = |l: &LinForm| -> Result<i64, TermError> {
            let e = l.partial_eval(&lin_point);
            if !e.is_constant() {
                let v = (0..e.len()).find(|&v| e.depends_on(v)).unwrap_or(0);
                return Err(TermError::UnboundParameter(self.lin_u.name(v).to_string()));
            }
            let c = e.constant_part();
            if !c.is_integer() {
                return Err(TermError::NonIntegerExponent);
            }
            Ok(c.to_integer().to_i64().expect("exponent fits in i64"))
        };

        let mut acc = ProductAcc::new(u);
        let one = RatFun::one(u);
        for f in &self.qpochs {
            let a = subst(&f.coeff)?;
            let c = int_of(&f.shift)?;
            let m = int_of(&f.len)?;
            let mut val = one.clone();
            let mut order = 0i64;
            let range: Vec<i64> = if m >= 0 {
                (0..m).collect()
            } else {
                (1..=-m).map(|i| -i).collect()
            };
            let numeric = match (q, a.constant_value()) {
                (Some(x), Some(ac)) if !x.is_zero() => Some((x, ac)),
                _ => None,
            };
            if let Some((x, ac)) = numeric {
                // numbers only: a running power of q instead of rational functions
                let mut num = BigRational::one();
                let mut den = BigRational::one();
                let step = if m >= 0 { x.clone() } else { x.recip() };
                let start = range.first().copied().unwrap_or(0);
                let mut p = int_pow(x, c + start);
                for _ in &range {
                    let factor = BigRational::one() - &ac * &p;
                    if factor.is_zero() {
                        order += if m >= 0 { 1 } else { -1 };
                    } else if m >= 0 {
                        num *= factor;
                    } else {
                        den *= factor;
                    }
                    p = &p * &step;
                }
                val = RatFun::constant(u, num / den);
            } else {
                for i in range {
                    let factor = &one - &(&a * &qpow(c + i)?);
                    if factor.is_zero() {
                        order += if m >= 0 { 1 } else { -1 };
                    } else if m >= 0 {
                        val = &val * &factor;
                    } else {
                        val = &val / &factor;
                    }
                }
            }
            acc.order += order * f.exp;
            acc.mul_ratfun(&val, f.exp);
        }
        let mut point = vec![BigRational::zero(); self.lin_u.len()];
        for (v, &x) in disc.iter().enumerate() {
            point[v] = rat(x);
        }
        let qexp = self.qpow.value(&point);
        acc.mul_ratfun(
            &qpow(qexp.to_integer().to_i64().expect("q-exponent fits in i64"))?,
            1,
        );
        for p in &self.geoms {
            let e = int_of(&p.exponent)?;
            let b = subst(&p.base)?;
            if b.is_zero() {
                acc.order += e.signum();
                continue;
            }
            acc.mul_ratfun(&b, e);
        }
        let r = subst(&self.rational)?;
        if r.is_zero() {
            acc.order += 1;
        } else {
            acc.mul_ratfun(&r, 1);
        }
        acc.finish()
    }

    /// Exact rational value with `q` and every parameter assigned.
    pub fn eval_at(
        &self,
        disc: &[i64],
        q: &BigRational,
        params: &[BigRational],
    ) -> Result<BigRational, TermError> {
        let p: Vec<Option<BigRational>> = params.iter().cloned().map(Some).collect();
        let r = self.eval_partial(disc, Some(q), &p)?;
        Ok(r.constant_value().expect("fully assigned"))
    }

    /// Support box from the q-Pochhammer factors with coefficient 1, which
    /// vanish or blow up exactly like `Gamma(L1 + L2) / Gamma(L1)`.
    pub fn support_bounds(&self, n0: i64) -> Support {
        let mut factors = Vec::new();
        for f in &self.qpochs {
            if f.coeff.is_one() {
                factors.push((f.shift.add(&f.len), f.exp));
                factors.push((f.shift.clone(), -f.exp));
            }
        }
        let mut assign: Vec<Option<BigRational>> = vec![None; self.lin_u.len()];
        assign[0] = Some(rat(n0));
        let inner: Vec<usize> = (1..=self.n_inner).collect();
        support_box(&factors, &assign, &inner)
    }
}

fn int_pow(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}
