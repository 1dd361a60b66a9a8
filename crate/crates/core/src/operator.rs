//! Recurrence/differential operators and the interface shared by classical
//! and q-terms.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{MultiPoly, RatFun, Universe};
use crate::term::{HyperTerm, QHyperTerm};

/// `N^outer * prod K_i^shifts[i] * prod D_j^diffs[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub outer: u32,
    pub shifts: Vec<u32>,
    pub diffs: Vec<u32>,
}

impl Word {
    pub fn identity(r: usize, s: usize) -> Self {
        Word {
            outer: 0,
            shifts: vec![0; r],
            diffs: vec![0; s],
        }
    }

    pub fn outer(a: u32, r: usize, s: usize) -> Self {
        Word {
            outer: a,
            ..Self::identity(r, s)
        }
    }

    pub fn is_outer_only(&self) -> bool {
        self.shifts.iter().all(|&b| b == 0) && self.diffs.iter().all(|&c| c == 0)
    }

    pub fn render(&self, outer: &str, shifts: &[String], diffs: &[String]) -> String {
        let mut parts = Vec::new();
        let mut push = |name: &str, e: u32| match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        };
        push(outer, self.outer);
        for (i, &b) in self.shifts.iter().enumerate() {
            push(&format!("K_{}", shifts[i]), b);
        }
        for (j, &c) in self.diffs.iter().enumerate() {
            push(&format!("D_{}", diffs[j]), c);
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Interface the finder and verifier need from a term.
pub trait Summand: Clone {
    /// Universe of the rational functions produced by the term.
    fn universe(&self) -> &Universe;
    fn num_shifts(&self) -> usize;
    fn num_diffs(&self) -> usize;
    fn outer_is_continuous(&self) -> bool;
    /// Variables that may appear in operator coefficients.
    fn coefficient_vars(&self) -> Vec<usize>;
    /// Variables the ansatz is collected against.
    fn inner_vars(&self) -> Vec<usize>;
    /// `(word F) / F`.
    fn word_quotient(&self, w: &Word) -> RatFun;
    /// Substitution realizing `K_i` on rational functions.
    fn inner_shift_map(&self, i: usize) -> Vec<(usize, MultiPoly)>;
    /// Universe index of the `j`-th inner continuous variable.
    fn inner_diff_var(&self, j: usize) -> usize;
    /// Substitution fixing the outer variable at a nonnegative integer, for
    /// discrete outer variables.
    fn outer_value_map(&self, n0: i64) -> Option<Vec<(usize, MultiPoly)>>;
    /// `r(n - m)`, for discrete outer variables.
    fn outer_shift_back(&self, r: &RatFun, m: u32) -> RatFun;
    fn outer_name(&self) -> String;
    fn shift_names(&self) -> Vec<String>;
    fn diff_names(&self) -> Vec<String>;

    fn inner_shift_quotient(&self, i: usize) -> RatFun {
        let mut w = Word::identity(self.num_shifts(), self.num_diffs());
        w.shifts[i] = 1;
        self.word_quotient(&w)
    }

    fn inner_diff_quotient(&self, j: usize) -> RatFun {
        let mut w = Word::identity(self.num_shifts(), self.num_diffs());
        w.diffs[j] = 1;
        self.word_quotient(&w)
    }

    fn outer_quotient(&self, a: u32) -> RatFun {
        self.word_quotient(&Word::outer(a, self.num_shifts(), self.num_diffs()))
    }

    /// Symbol used for the outer operator when rendering.
    fn outer_operator_name(&self) -> String {
        if self.outer_is_continuous() {
            format!("D_{}", self.outer_name())
        } else {
            "N".to_string()
        }
    }
}

impl Summand for HyperTerm {
    fn universe(&self) -> &Universe {
        HyperTerm::universe(self)
    }

    fn num_shifts(&self) -> usize {
        self.inner_discrete().len()
    }

    fn num_diffs(&self) -> usize {
        self.inner_continuous().len()
    }

    fn outer_is_continuous(&self) -> bool {
        self.outer_is_continuous()
    }

    fn coefficient_vars(&self) -> Vec<usize> {
        std::iter::once(self.outer_var()).chain(self.params()).collect()
    }

    fn inner_vars(&self) -> Vec<usize> {
        self.inner_discrete().chain(self.inner_continuous()).collect()
    }

    fn word_quotient(&self, w: &Word) -> RatFun {
        self.monomial_quotient(w.outer, &w.shifts, &w.diffs)
    }

    fn inner_shift_map(&self, i: usize) -> Vec<(usize, MultiPoly)> {
        self.inner_shift(i)
    }

    fn inner_diff_var(&self, j: usize) -> usize {
        self.inner_continuous().start + j
    }

    fn outer_value_map(&self, n0: i64) -> Option<Vec<(usize, MultiPoly)>> {
        if self.outer_is_continuous() {
            return None;
        }
        Some(vec![(0, MultiPoly::from_int(self.universe(), n0))])
    }

    fn outer_shift_back(&self, r: &RatFun, m: u32) -> RatFun {
        let u = self.universe();
        let image = &MultiPoly::var(u, 0) - &MultiPoly::from_int(u, m as i64);
        r.substitute(&[(0, image)]).expect("shift is an automorphism")
    }

    fn outer_name(&self) -> String {
        self.universe().name(0).to_string()
    }

    fn shift_names(&self) -> Vec<String> {
        self.universe().names()[self.inner_discrete()].to_vec()
    }

    fn diff_names(&self) -> Vec<String> {
        self.universe().names()[self.inner_continuous()].to_vec()
    }
}

impl Summand for QHyperTerm {
    fn universe(&self) -> &Universe {
        QHyperTerm::universe(self)
    }

    fn num_shifts(&self) -> usize {
        self.num_inner()
    }

    fn num_diffs(&self) -> usize {
        0
    }

    fn outer_is_continuous(&self) -> bool {
        false
    }

    fn coefficient_vars(&self) -> Vec<usize> {
        let n = QHyperTerm::universe(self).len();
        [0, 1].into_iter().chain(2 + self.num_inner()..n).collect()
    }

    fn inner_vars(&self) -> Vec<usize> {
        (2..2 + self.num_inner()).collect()
    }

    fn word_quotient(&self, w: &Word) -> RatFun {
        self.monomial_quotient(w.outer, &w.shifts)
    }

    fn inner_shift_map(&self, i: usize) -> Vec<(usize, MultiPoly)> {
        self.inner_shift(i)
    }

    fn inner_diff_var(&self, _j: usize) -> usize {
        unreachable!("q-terms have no continuous variables")
    }

    fn outer_value_map(&self, n0: i64) -> Option<Vec<(usize, MultiPoly)>> {
        let u = QHyperTerm::universe(self);
        let e = u32::try_from(n0).ok()?;
        Some(vec![(1, MultiPoly::var(u, 0).pow(e))])
    }

    fn outer_shift_back(&self, r: &RatFun, m: u32) -> RatFun {
        let u = QHyperTerm::universe(self);
        let qm = RatFun::var(u, 0).pow(-(m as i64)).expect("q is nonzero");
        r.substitute_rat(&[(1, &qm * &RatFun::var(u, 1))])
            .expect("q-shift is an automorphism")
    }

    fn outer_name(&self) -> String {
        self.lin_universe().name(0).to_string()
    }

    fn shift_names(&self) -> Vec<String> {
        self.lin_universe().names()[1..1 + self.num_inner()].to_vec()
    }

    fn diff_names(&self) -> Vec<String> {
        Vec::new()
    }
}

/// `sum c_w(n, params) * w` over words in `N`, `K_i`, `D_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OreOperator {
    universe: Universe,
    r: usize,
    s: usize,
    terms: BTreeMap<Word, MultiPoly>,
}

impl OreOperator {
    pub fn zero(universe: &Universe, r: usize, s: usize) -> Self {
        OreOperator {
            universe: universe.clone(),
            r,
            s,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(universe: &Universe, r: usize, s: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, MultiPoly)>,
    {
        let mut op = Self::zero(universe, r, s);
        for (w, c) in terms {
            op.add_term(w, c);
        }
        op
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn num_shifts(&self) -> usize {
        self.r
    }

    pub fn num_diffs(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<Word, MultiPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: MultiPoly) {
        assert_eq!(w.shifts.len(), self.r);
        assert_eq!(w.diffs.len(), self.s);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(old) => {
                let sum = &*old + &c;
                if sum.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &OreOperator) -> OreOperator {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &OreOperator) -> OreOperator {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }

    /// Order in the outer operator.
    pub fn outer_order(&self) -> u32 {
        self.terms.keys().map(|w| w.outer).max().unwrap_or(0)
    }

    pub fn max_coeff_degree(&self) -> u32 {
        self.terms.values().map(MultiPoly::total_degree).max().unwrap_or(0)
    }

    /// Left multiplication by `K_i`; coefficients are free of `k_i`.
    pub fn shift_left(&self, i: usize) -> OreOperator {
        let mut out = Self::zero(&self.universe, self.r, self.s);
        for (w, c) in &self.terms {
            let mut w = w.clone();
            w.shifts[i] += 1;
            out.add_term(w, c.clone());
        }
        out
    }

    /// Left multiplication by `D_j`; coefficients are free of `y_j`.
    pub fn diff_left(&self, j: usize) -> OreOperator {
        let mut out = Self::zero(&self.universe, self.r, self.s);
        for (w, c) in &self.terms {
            let mut w = w.clone();
            w.diffs[j] += 1;
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> OreOperator {
        let mut out = Self::zero(&self.universe, self.r, self.s);
        for (w, p) in &self.terms {
            out.add_term(w.clone(), p.scale(c));
        }
        out
    }

    /// `(T F) / F`.
    pub fn apply<T: Summand>(&self, f: &T) -> RatFun {
        let u = f.universe();
        let mut acc = RatFun::zero(u);
        for (w, c) in &self.terms {
            acc = &acc + &f.word_quotient(w).mul_poly(c);
        }
        acc
    }

    pub fn render(&self, outer: &str, shifts: &[String], diffs: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(w, c)| {
                let word = w.render(outer, shifts, diffs);
                render_coeff_times(c, &word)
            })
            .collect();
        join_signed(parts)
    }
}

fn render_coeff_times(c: &MultiPoly, word: &str) -> String {
    let cs = c.render();
    if word == "1" {
        return cs;
    }
    if c.is_one() {
        return word.to_string();
    }
    if let Some(v) = c.constant_value() {
        if v == -BigRational::one() {
            return format!("-{word}");
        }
        return format!("{cs}*{word}");
    }
    format!("({cs})*{word}")
}

fn join_signed(parts: Vec<String>) -> String {
    let mut s = String::new();
    for p in parts {
        if s.is_empty() {
            s = p;
        } else if let Some(rest) = p.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(&p);
        }
    }
    s
}

/// `sum_a p_a * N^a` (or `D_x^a` for a continuous outer variable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniOperator {
    universe: Universe,
    coeffs: Vec<MultiPoly>,
}

impl UniOperator {
    pub fn new(universe: &Universe, mut coeffs: Vec<MultiPoly>) -> Self {
        while coeffs.last().is_some_and(MultiPoly::is_zero) {
            coeffs.pop();
        }
        UniOperator {
            universe: universe.clone(),
            coeffs,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize) -> MultiPoly {
        self.coeffs
            .get(a)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&self.universe))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&MultiPoly> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> UniOperator {
        UniOperator::new(
            &self.universe,
            self.coeffs.iter().map(|p| p.scale(c)).collect(),
        )
    }

    pub fn to_ore(&self, r: usize, s: usize) -> OreOperator {
        OreOperator::from_terms(
            &self.universe,
            r,
            s,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(a, c)| (Word::outer(a as u32, r, s), c.clone())),
        )
    }

    /// `(P F) / F`.
    pub fn apply<T: Summand>(&self, f: &T) -> RatFun {
        let u = f.universe();
        let mut acc = RatFun::zero(u);
        for (a, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &f.outer_quotient(a as u32).mul_poly(c);
        }
        acc
    }

    /// `sum_a p_a(n0) * values[a]` for a discrete outer variable, with
    /// `values[a] = f(n0 + a)`; coefficients are evaluated by `eval`.
    pub fn apply_to_values(
        &self,
        eval: &dyn Fn(&MultiPoly) -> BigRational,
        values: &[BigRational],
    ) -> BigRational {
        self.coeffs
            .iter()
            .zip(values)
            .fold(BigRational::zero(), |acc, (c, v)| acc + eval(c) * v)
    }

    pub fn render(&self, outer_op: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| {
                let word = match a {
                    0 => "1".to_string(),
                    1 => outer_op.to_string(),
                    _ => format!("{outer_op}^{a}"),
                };
                render_coeff_times(c, &word)
            })
            .collect();
        join_signed(parts)
    }
}
