use std::ops::Range;

use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{rat, MultiPoly, RatFun, Universe};

use super::{LinForm, TermError};

/// `Gamma(arg)^exp`. Factorials and Pochhammer symbols are stored in this
/// form: `x! = Gamma(x + 1)`, `(c)_L = Gamma(c + L) / Gamma(c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaFactor {
    pub arg: LinForm,
    pub exp: i64,
}

/// `base^exponent` where the base is free of discrete variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerFactor {
    pub base: RatFun,
    pub exponent: LinForm,
}

/// Names and roles of the variables of a term.
///
/// Universe order is fixed: outer variable, inner discrete variables, inner
/// continuous variables, then parameters sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermShape {
    pub outer: String,
    pub outer_continuous: bool,
    pub inner_discrete: Vec<String>,
    pub inner_continuous: Vec<String>,
    pub params: Vec<String>,
}

impl TermShape {
    pub fn discrete(outer: &str, inner: &[&str]) -> Self {
        TermShape {
            outer: outer.to_string(),
            outer_continuous: false,
            inner_discrete: inner.iter().map(|s| s.to_string()).collect(),
            inner_continuous: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: &[&str]) -> Self {
        self.params = params.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn universe(&self) -> Universe {
        let mut params = self.params.clone();
        params.sort();
        params.dedup();
        let mut names = vec![self.outer.clone()];
        names.extend(self.inner_discrete.iter().cloned());
        names.extend(self.inner_continuous.iter().cloned());
        names.extend(params);
        Universe::new(names)
    }
}

/// A proper-hypergeometric / hyperexponential term in product form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperTerm {
    universe: Universe,
    outer_continuous: bool,
    n_disc: usize,
    n_cont: usize,
    gammas: Vec<GammaFactor>,
    powers: Vec<PowerFactor>,
    exp: Option<RatFun>,
    rational: RatFun,
}

impl HyperTerm {
    /// The constant term 1 over the given shape.
    pub fn one(shape: &TermShape) -> Self {
        let universe = shape.universe();
        HyperTerm {
            rational: RatFun::one(&universe),
            universe,
            outer_continuous: shape.outer_continuous,
            n_disc: shape.inner_discrete.len(),
            n_cont: shape.inner_continuous.len(),
            gammas: Vec::new(),
            powers: Vec::new(),
            exp: None,
        }
    }

    pub fn shape(&self) -> TermShape {
        let names = self.universe.names();
        TermShape {
            outer: names[0].clone(),
            outer_continuous: self.outer_continuous,
            inner_discrete: names[self.inner_discrete()].to_vec(),
            inner_continuous: names[self.inner_continuous()].to_vec(),
            params: names[self.params()].to_vec(),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn outer_var(&self) -> usize {
        0
    }

    pub fn outer_is_continuous(&self) -> bool {
        self.outer_continuous
    }

    pub fn inner_discrete(&self) -> Range<usize> {
        1..1 + self.n_disc
    }

    pub fn inner_continuous(&self) -> Range<usize> {
        1 + self.n_disc..1 + self.n_disc + self.n_cont
    }

    pub fn params(&self) -> Range<usize> {
        1 + self.n_disc + self.n_cont..self.universe.len()
    }

    pub fn is_discrete(&self, var: usize) -> bool {
        (var == 0 && !self.outer_continuous) || self.inner_discrete().contains(&var)
    }

    pub fn is_continuous(&self, var: usize) -> bool {
        (var == 0 && self.outer_continuous) || self.inner_continuous().contains(&var)
    }

    pub fn is_param(&self, var: usize) -> bool {
        self.params().contains(&var)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.universe.index_of(name)
    }

    pub fn gammas(&self) -> &[GammaFactor] {
        &self.gammas
    }

    pub fn powers(&self) -> &[PowerFactor] {
        &self.powers
    }

    pub fn exp_arg(&self) -> Option<&RatFun> {
        self.exp.as_ref()
    }

    pub fn rational(&self) -> &RatFun {
        &self.rational
    }

    fn check_lin(&self, l: &LinForm, what: &str) -> Result<(), TermError> {
        if l.len() != self.universe.len() {
            return Err(TermError::Invalid(format!("{what}: linear form length")));
        }
        for v in 0..l.len() {
            let c = l.coeff(v);
            if c.is_zero() {
                continue;
            }
            if self.is_continuous(v) {
                return Err(TermError::Invalid(format!(
                    "{what}: continuous variable {} in a linear form",
                    self.universe.name(v)
                )));
            }
            if self.is_discrete(v) && !c.is_integer() {
                return Err(TermError::NonIntegerCoefficient(
                    self.universe.name(v).to_string(),
                ));
            }
        }
        Ok(())
    }

    fn check_free_of_discrete(&self, r: &RatFun, what: &str) -> Result<(), TermError> {
        if !r.universe().same(&self.universe) {
            return Err(TermError::Invalid(format!("{what}: universe mismatch")));
        }
        for v in 0..self.universe.len() {
            if self.is_discrete(v) && r.depends_on(v) {
                return Err(TermError::Invalid(format!(
                    "{what} depends on discrete variable {}",
                    self.universe.name(v)
                )));
            }
        }
        Ok(())
    }

    pub fn push_gamma(&mut self, arg: LinForm, exp: i64) -> Result<(), TermError> {
        self.check_lin(&arg, "gamma argument")?;
        if exp != 0 {
            self.gammas.push(GammaFactor { arg, exp });
        }
        self.normalize();
        Ok(())
    }

    pub fn push_power(&mut self, base: RatFun, exponent: LinForm) -> Result<(), TermError> {
        self.check_lin(&exponent, "power exponent")?;
        self.check_free_of_discrete(&base, "power base")?;
        if base.is_zero() {
            return Err(TermError::Invalid("power base is zero".into()));
        }
        if let Some(c) = base.constant_value() {
            if c.is_one() {
                return Ok(());
            }
        }
        self.powers.push(PowerFactor { base, exponent });
        self.normalize();
        Ok(())
    }

    pub fn push_exp(&mut self, arg: RatFun) -> Result<(), TermError> {
        self.check_free_of_discrete(&arg, "exp argument")?;
        let merged = match self.exp.take() {
            Some(a) => &a + &arg,
            None => arg,
        };
        self.exp = (!merged.is_zero()).then_some(merged);
        Ok(())
    }

    pub fn mul_rational(&mut self, r: &RatFun) -> Result<(), TermError> {
        if !r.universe().same(&self.universe) {
            return Err(TermError::Invalid("rational factor: universe mismatch".into()));
        }
        if r.is_zero() {
            return Err(TermError::Invalid("zero rational factor".into()));
        }
        self.rational = &self.rational * r;
        Ok(())
    }

    /// Moves linear factors `L` of the rational part that are gamma
    /// arguments up to a small offset into gamma ratios, `L =
    /// Gamma(L + 1)/Gamma(L)`. The function is unchanged, but a zero of `L`
    /// now meets the gamma poles it cancels during evaluation.
    pub fn with_linear_factors_as_gammas(&self) -> HyperTerm {
        let mut forms: Vec<LinForm> = Vec::new();
        for g in &self.gammas {
            for c in -4i64..=4 {
                forms.push(g.arg.add_constant(&rat(c)));
            }
        }
        let mut out = self.clone();
        let mut num = self.rational.numer().clone();
        let mut den = self.rational.denom().clone();
        for l in forms {
            let p = l.to_poly(&self.universe);
            if p.is_constant() {
                continue;
            }
            while let Ok(q) = den.exact_div(&p) {
                den = q;
                out.gammas.push(GammaFactor { arg: l.clone(), exp: 1 });
                out.gammas.push(GammaFactor { arg: l.add_constant(&rat(1)), exp: -1 });
            }
            while let Ok(q) = num.exact_div(&p) {
                num = q;
                out.gammas.push(GammaFactor { arg: l.add_constant(&rat(1)), exp: 1 });
                out.gammas.push(GammaFactor { arg: l.clone(), exp: -1 });
            }
        }
        out.rational = RatFun::new(num, den).expect("nonzero denominator");
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        self.gammas.sort_by(|a, b| a.arg.cmp(&b.arg));
        let mut merged: Vec<GammaFactor> = Vec::with_capacity(self.gammas.len());
        for g in self.gammas.drain(..) {
            match merged.last_mut() {
                Some(last) if last.arg == g.arg => last.exp += g.exp,
                _ => merged.push(g),
            }
        }
        merged.retain(|g| g.exp != 0);
        self.gammas = merged;

        self.powers.sort_by(|a, b| a.base.cmp(&b.base));
        let mut merged: Vec<PowerFactor> = Vec::with_capacity(self.powers.len());
        for p in self.powers.drain(..) {
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
        self.powers = kept;
    }

    /// Product of two terms over the same shape.
    pub fn mul(&self, other: &HyperTerm) -> Result<HyperTerm, TermError> {
        if self.shape() != other.shape() {
            return Err(TermError::Invalid("product of terms with different shapes".into()));
        }
        let mut out = self.clone();
        out.gammas.extend(other.gammas.iter().cloned());
        out.powers.extend(other.powers.iter().cloned());
        out.rational = &out.rational * &other.rational;
        if let Some(e) = &other.exp {
            out.push_exp(e.clone())?;
        }
        out.normalize();
        Ok(out)
    }

    pub fn reciprocal(&self) -> HyperTerm {
        let mut out = self.clone();
        for g in &mut out.gammas {
            g.exp = -g.exp;
        }
        for p in &mut out.powers {
            p.exponent = p.exponent.neg();
        }
        out.exp = self.exp.as_ref().map(|e| -e);
        out.rational = self.rational.inv().expect("rational factor is nonzero");
        out
    }

    /// Move the term to another shape containing all of its variables
    /// (e.g. a closed-form right side into the summand's universe).
    pub fn reshape(&self, shape: &TermShape) -> Result<HyperTerm, TermError> {
        let mut out = HyperTerm::one(shape);
        let u = out.universe.clone();
        let map = |i: usize| u.index_of(self.universe.name(i));
        for g in &self.gammas {
            out.push_gamma(g.arg.remap(u.len(), &map), g.exp)?;
        }
        for p in &self.powers {
            out.push_power(p.base.reembed(&u)?, p.exponent.remap(u.len(), &map))?;
        }
        if let Some(e) = &self.exp {
            out.push_exp(e.reembed(&u)?)?;
        }
        out.mul_rational(&self.rational.reembed(&u)?)?;
        Ok(out)
    }

    fn shift_map(&self, shifts: &[(usize, i64)]) -> Vec<(usize, MultiPoly)> {
        shifts
            .iter()
            .filter(|(_, s)| *s != 0)
            .map(|&(v, s)| {
                (
                    v,
                    &MultiPoly::var(&self.universe, v) + &MultiPoly::from_int(&self.universe, s),
                )
            })
            .collect()
    }

    /// `F(p + s) / F(p)` for a simultaneous integer shift of discrete
    /// variables, computed factor by factor.
    pub fn shift_by(&self, shifts: &[(usize, i64)]) -> RatFun {
        let u = &self.universe;
        let mut num = MultiPoly::one(u);
        let mut den = MultiPoly::one(u);
        for g in &self.gammas {
            let d = g.arg.shift_delta(shifts);
            if d == 0 {
                continue;
            }
            let l = g.arg.to_poly(u);
            let (p, inverted) = if d > 0 {
                (rising(&l, 0, d), false)
            } else {
                (rising(&l, d, 0), true)
            };
            let pe = p.pow(g.exp.unsigned_abs() as u32);
            if (g.exp > 0) != inverted {
                num = &num * &pe;
            } else {
                den = &den * &pe;
            }
        }
        for p in &self.powers {
            let d = p.exponent.shift_delta(shifts);
            if d == 0 {
                continue;
            }
            let k = d.unsigned_abs() as u32;
            let (a, b) = (p.base.numer().pow(k), p.base.denom().pow(k));
            if d > 0 {
                num = &num * &a;
                den = &den * &b;
            } else {
                num = &num * &b;
                den = &den * &a;
            }
        }
        if !self.rational.is_one() {
            let map = self.shift_map(shifts);
            if !map.is_empty() {
                let shifted = self
                    .rational
                    .substitute(&map)
                    .expect("shift is an automorphism");
                num = &num * &(shifted.numer() * self.rational.denom());
                den = &den * &(shifted.denom() * self.rational.numer());
            }
        }
        RatFun::new(num, den).expect("shift quotient has nonzero denominator")
    }

    /// `K_v F / F` for a discrete variable `v`.
    pub fn shift_quotient(&self, var: usize) -> Result<RatFun, TermError> {
        if !self.is_discrete(var) {
            return Err(TermError::NotDiscrete(self.universe.name(var).to_string()));
        }
        Ok(self.shift_by(&[(var, 1)]))
    }

    /// `D_y F / F` for a continuous variable `y`: the sum of the factors'
    /// logarithmic derivatives.
    pub fn derivative_quotient(&self, var: usize) -> Result<RatFun, TermError> {
        if !self.is_continuous(var) {
            return Err(TermError::NotContinuous(self.universe.name(var).to_string()));
        }
        let u = &self.universe;
        let mut acc = RatFun::zero(u);
        for p in &self.powers {
            let db = p.base.derivative(var);
            if db.is_zero() {
                continue;
            }
            let e = RatFun::from_poly(p.exponent.to_poly(u));
            acc = &acc + &(&e * &(&db / &p.base));
        }
        if let Some(a) = &self.exp {
            acc = &acc + &a.derivative(var);
        }
        if self.rational.depends_on(var) {
            acc = &acc + &(&self.rational.derivative(var) / &self.rational);
        }
        Ok(acc)
    }

    /// Applies `D_var` to a quotient `q = W F / F`, returning `(D W) F / F`.
    pub fn differentiate_quotient(&self, q: &RatFun, var: usize) -> Result<RatFun, TermError> {
        let dq = self.derivative_quotient(var)?;
        Ok(&q.derivative(var) + &(q * &dq))
    }

    /// `(word applied to F) / F`, evaluated right to left using
    /// `(K W)F/F = sigma(WF/F) * KF/F` and `(D W)F/F = D(WF/F) + (WF/F)(DF/F)`.
    pub fn word_quotient(&self, word: &[Op]) -> Result<RatFun, TermError> {
        let mut q = RatFun::one(&self.universe);
        for op in word.iter().rev() {
            let var = self.op_var(*op)?;
            q = if self.is_discrete(var) {
                let shifted = q.substitute(&self.shift_map(&[(var, 1)]))?;
                &shifted * &self.shift_quotient(var)?
            } else {
                self.differentiate_quotient(&q, var)?
            };
        }
        Ok(q)
    }

    fn op_var(&self, op: Op) -> Result<usize, TermError> {
        let var = match op {
            Op::N => 0,
            Op::K(i) if i < self.n_disc => 1 + i,
            Op::D(j) if j < self.n_cont => 1 + self.n_disc + j,
            _ => return Err(TermError::Invalid(format!("operator {op:?} not declared"))),
        };
        Ok(var)
    }

    /// Quotient for an operator monomial `N^a K^b D^c` (or `D_x^a K^b D^c`).
    pub fn monomial_quotient(&self, outer: u32, shifts: &[u32], diffs: &[u32]) -> RatFun {
        let mut s: Vec<(usize, i64)> = shifts
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(i, &b)| (1 + i, b as i64))
            .collect();
        if !self.outer_continuous && outer > 0 {
            s.push((0, outer as i64));
        }
        let mut q = self.shift_by(&s);
        let mut derivs: Vec<(usize, u32)> = diffs
            .iter()
            .enumerate()
            .map(|(j, &c)| (1 + self.n_disc + j, c))
            .collect();
        if self.outer_continuous {
            derivs.push((0, outer));
        }
        for (var, c) in derivs {
            for _ in 0..c {
                q = self
                    .differentiate_quotient(&q, var)
                    .expect("continuous variable");
            }
        }
        q
    }

    /// Substitution for the action of `K_i` on rational functions.
    pub fn inner_shift(&self, i: usize) -> Vec<(usize, MultiPoly)> {
        self.shift_map(&[(1 + i, 1)])
    }
}

/// `prod_{i=lo}^{hi-1} (l + i)`.
pub(crate) fn rising(l: &MultiPoly, lo: i64, hi: i64) -> MultiPoly {
    let u = l.universe();
    let mut p = MultiPoly::one(u);
    for i in lo..hi {
        p = &p * &(l + &MultiPoly::constant(u, rat(i)));
    }
    p
}

/// Elementary operators making up a word.
///
/// `N` is the outer operator: the shift in `n`, or `D_x` when the outer
/// variable is continuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    N,
    K(usize),
    D(usize),
}
