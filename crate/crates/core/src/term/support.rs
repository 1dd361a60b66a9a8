//! Support boxes from vanishing denominator gammas.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{HyperTerm, LinForm};

/// Where a term may be nonzero for a fixed outer value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    /// Inclusive bounds per inner discrete variable. Any `lo > hi` means the
    /// term vanishes identically.
    Box(Vec<(i64, i64)>),
    NotCompact,
}

impl Support {
    pub fn is_empty(&self) -> bool {
        matches!(self, Support::Box(b) if b.iter().any(|(lo, hi)| lo > hi))
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        match self {
            Support::Box(b) => b
                .iter()
                .zip(point)
                .all(|((lo, hi), p)| lo <= p && p <= hi),
            Support::NotCompact => true,
        }
    }
}

/// A gamma factor restricted to the inner variables: `b . k + c`.
struct Pole {
    b: Vec<i64>,
    c: i64,
    exp: i64,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    let (q, r) = (a / b, a % b);
    if r != 0 && ((r > 0) == (b > 0)) {
        q + 1
    } else {
        q
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    let (q, r) = (a / b, a % b);
    if r != 0 && ((r > 0) != (b > 0)) {
        q - 1
    } else {
        q
    }
}

/// Support box of `prod Gamma(L)^e` once the outer value is fixed.
///
/// `assign` fixes the outer variable; `inner` lists the universe indices of
/// the inner discrete variables. Factors that still depend on other
/// symbols are generically away from the poles and are ignored.
pub(crate) fn support_box(
    factors: &[(LinForm, i64)],
    assign: &[Option<BigRational>],
    inner: &[usize],
) -> Support {
    let mut num_inner: Vec<Pole> = Vec::new();
    let mut den_inner: Vec<Pole> = Vec::new();
    let mut num_const = 0i64;
    let mut den_const = 0i64;
    let mut merged: Vec<(LinForm, i64)> = Vec::new();
    for (lin, e) in factors {
        match merged.iter_mut().find(|(l, _)| l == lin) {
            Some(slot) => slot.1 += e,
            None => merged.push((lin.clone(), *e)),
        }
    }
    for (lin, e) in merged.iter().filter(|(_, e)| *e != 0) {
        let l = lin.partial_eval(assign);
        let other_symbol = (0..l.len()).any(|v| !inner.contains(&v) && l.depends_on(v));
        if other_symbol || !l.constant_part().is_integer() {
            continue;
        }
        let c = l
            .constant_part()
            .to_integer()
            .to_i64()
            .expect("constant fits in i64");
        let b: Vec<i64> = inner.iter().map(|&v| l.int_coeff(v)).collect();
        let depends = b.iter().any(|x| *x != 0);
        match (depends, *e > 0) {
            (false, true) if c <= 0 => num_const += e,
            (false, false) if c <= 0 => den_const += -e,
            (false, _) => {}
            (true, true) => num_inner.push(Pole { b, c, exp: *e }),
            (true, false) => den_inner.push(Pole { b, c, exp: -e }),
        }
    }
    if num_const > 0 {
        return Support::NotCompact;
    }
    let r = inner.len();
    if den_const > 0 && num_inner.is_empty() {
        return Support::Box(vec![(0, -1); r]);
    }

    let bounds = match propagate(&den_inner, r) {
        Propagated::Empty => return Support::Box(vec![(0, -1); r]),
        Propagated::Unbounded => return covered_box(&num_inner, &den_inner, r),
        Propagated::Bounds(b) => b,
    };
    if num_inner.is_empty() {
        return Support::Box(bounds);
    }
    if r != 1 {
        return covered_box(&num_inner, &den_inner, r);
    }
    // One inner variable: the zero order is piecewise constant with
    // breakpoints at the factor thresholds, so checking a few points per
    // piece is exact.
    let (blo, bhi) = bounds[0];
    let order_at = |k: i64| -> i64 {
        let den: i64 = den_inner
            .iter()
            .filter(|p| p.b[0] * k + p.c <= 0)
            .map(|p| p.exp)
            .sum();
        let num: i64 = num_inner
            .iter()
            .filter(|p| p.b[0] * k + p.c <= 0)
            .map(|p| p.exp)
            .sum();
        den + den_const - num
    };
    let mut candidates = vec![blo - 1, bhi + 1];
    for p in den_inner.iter().chain(&num_inner) {
        let t = floor_div(-p.c, p.b[0]);
        candidates.extend([t - 1, t, t + 1, t + 2]);
    }
    let min = *candidates.iter().min().expect("nonempty");
    let max = *candidates.iter().max().expect("nonempty");
    candidates.extend([min - 1, max + 1]);
    let outside_ok = candidates
        .into_iter()
        .filter(|&k| k < blo || k > bhi)
        .all(|k| order_at(k) > 0);
    if outside_ok {
        Support::Box(bounds)
    } else {
        covered_box(&num_inner, &den_inner, r)
    }
}

enum Propagated {
    Empty,
    Unbounded,
    Bounds(Vec<(i64, i64)>),
}

/// Box implied by the denominator poles alone: a point where some
/// `b . k + c <= 0` makes the term vanish, so each factor bounds one
/// variable by the current bounds of the others.
fn propagate(den_inner: &[Pole], r: usize) -> Propagated {
    let mut lo: Vec<Option<i64>> = vec![None; r];
    let mut hi: Vec<Option<i64>> = vec![None; r];
    for _round in 0..64 {
        let mut changed = false;
        for p in den_inner {
            for i in 0..r {
                if p.b[i] == 0 {
                    continue;
                }
                // b_i k_i >= 1 - c - max(sum_{j != i} b_j k_j)
                let mut max_rest = Some(0i64);
                for j in (0..r).filter(|&j| j != i && p.b[j] != 0) {
                    let bound = if p.b[j] > 0 { hi[j] } else { lo[j] };
                    max_rest = match (max_rest, bound) {
                        (Some(m), Some(x)) => Some(m + p.b[j] * x),
                        _ => None,
                    };
                }
                let Some(m) = max_rest else { continue };
                let rhs = 1 - p.c - m;
                if p.b[i] > 0 {
                    let nb = ceil_div(rhs, p.b[i]);
                    if lo[i].map_or(true, |x| nb > x) {
                        lo[i] = Some(nb);
                        changed = true;
                    }
                } else {
                    let nb = floor_div(rhs, p.b[i]);
                    if hi[i].map_or(true, |x| nb < x) {
                        hi[i] = Some(nb);
                        changed = true;
                    }
                }
            }
        }
        if (0..r).any(|i| matches!((lo[i], hi[i]), (Some(a), Some(b)) if a > b)) {
            return Propagated::Empty;
        }
        if !changed {
            break;
        }
    }
    let mut bounds = Vec::with_capacity(r);
    for i in 0..r {
        match (lo[i], hi[i]) {
            (Some(a), Some(b)) => bounds.push((a, b)),
            _ => return Propagated::Unbounded,
        }
    }
    Propagated::Bounds(bounds)
}

/// Pairs every numerator pole `b . k + c` with denominator poles of the
/// same direction and constant `c' <= c`, whose pole region contains its
/// own. Each pair has nonnegative zero order everywhere, so the leftover
/// denominator poles alone decide where the term must vanish.
fn covered_box(num_inner: &[Pole], den_inner: &[Pole], r: usize) -> Support {
    let mut left: Vec<Pole> = den_inner
        .iter()
        .map(|p| Pole { b: p.b.clone(), c: p.c, exp: p.exp })
        .collect();
    for p in num_inner {
        let mut need = p.exp;
        while need > 0 {
            let best = left
                .iter_mut()
                .filter(|d| d.exp > 0 && d.b == p.b && d.c <= p.c)
                .max_by_key(|d| d.c);
            let Some(d) = best else { return Support::NotCompact };
            let take = need.min(d.exp);
            d.exp -= take;
            need -= take;
        }
    }
    left.retain(|d| d.exp > 0);
    match propagate(&left, r) {
        Propagated::Empty => Support::Box(vec![(0, -1); r]),
        Propagated::Unbounded => Support::NotCompact,
        Propagated::Bounds(b) => Support::Box(b),
    }
}

impl HyperTerm {
    /// Box in the inner discrete variables outside which the term vanishes
    /// for outer value `n0`.
    pub fn support_bounds(&self, n0: i64) -> Support {
        if self.outer_is_continuous() || !self.inner_continuous().is_empty() {
            return Support::NotCompact;
        }
        let factors: Vec<(LinForm, i64)> = self
            .gammas()
            .iter()
            .map(|g| (g.arg.clone(), g.exp))
            .collect();
        let mut assign: Vec<Option<BigRational>> = vec![None; self.universe().len()];
        assign[self.outer_var()] = Some(BigRational::from_integer(n0.into()));
        let inner: Vec<usize> = self.inner_discrete().collect();
        support_box(&factors, &assign, &inner)
    }
}
