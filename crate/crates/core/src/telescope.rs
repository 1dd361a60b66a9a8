//! Finding annihilators by the Sister Celine ansatz and turning them into
//! telescoping certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;

use crate::arith::{common_denominator, gcd, MultiPoly, RatFun};
use crate::linsolve::{nullspace, SymMatrix};
use crate::operator::{OreOperator, Summand, UniOperator, Word};

/// Default cap on the number of ansatz unknowns.
pub const DEFAULT_MAX_UNKNOWNS: usize = 48;

/// Orders of the ansatz in `N`, each `K_i` and each `D_j`.
///
/// Unknowns are the word coefficients, taken over the field of rational
/// functions in the coefficient variables, so `coeff_deg` does not change
/// the solution space; it is kept as a record of the requested shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnsatzBounds {
    pub max_n: u32,
    pub max_k: Vec<u32>,
    pub max_d: Vec<u32>,
    pub coeff_deg: u32,
}

impl AnsatzBounds {
    pub fn new(max_n: u32, max_k: &[u32], max_d: &[u32], coeff_deg: u32) -> Self {
        AnsatzBounds {
            max_n,
            max_k: max_k.to_vec(),
            max_d: max_d.to_vec(),
            coeff_deg,
        }
    }

    /// Number of unknowns.
    pub fn size(&self) -> usize {
        std::iter::once(self.max_n)
            .chain(self.max_k.iter().copied())
            .chain(self.max_d.iter().copied())
            .map(|b| b as usize + 1)
            .product()
    }

    pub fn words(&self) -> Vec<Word> {
        let mut dims = vec![self.max_n];
        dims.extend(&self.max_k);
        dims.extend(&self.max_d);
        let r = self.max_k.len();
        let mut out = Vec::with_capacity(self.size());
        let mut idx = vec![0u32; dims.len()];
        loop {
            out.push(Word {
                outer: idx[0],
                shifts: idx[1..1 + r].to_vec(),
                diffs: idx[1 + r..].to_vec(),
            });
            let mut pos = 0;
            loop {
                if pos == dims.len() {
                    return out;
                }
                if idx[pos] < dims[pos] {
                    idx[pos] += 1;
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl fmt::Display for AnsatzBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {:?}, {:?}, {})",
            self.max_n, self.max_k, self.max_d, self.coeff_deg
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TelescopeError {
    #[error("ansatz too large: {size} unknowns (cap {cap})")]
    AnsatzTooLarge { size: usize, cap: usize },
    #[error("no annihilator found{}", last.as_ref().map(|b| format!(" (last bounds tried {b})")).unwrap_or_default())]
    NotFound { last: Option<AnsatzBounds> },
}

/// `P F = sum_i Delta_{k_i}(R_i F) + sum_j D_{y_j}(S_j F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeCertificate<T> {
    pub term: T,
    pub p: UniOperator,
    pub r: Vec<RatFun>,
    pub s: Vec<RatFun>,
}

/// `T = P + sum_i (K_i - 1) T_i + sum_j D_j That_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: UniOperator,
    pub t: Vec<OreOperator>,
    pub t_hat: Vec<OreOperator>,
}

impl Decomposition {
    pub fn recompose(&self, r: usize, s: usize) -> OreOperator {
        let mut out = self.p.to_ore(r, s);
        for (i, ti) in self.t.iter().enumerate() {
            out = out.add(&ti.shift_left(i)).sub(ti);
        }
        for (j, tj) in self.t_hat.iter().enumerate() {
            out = out.add(&tj.diff_left(j));
        }
        out
    }
}

/// Iterative-deepening bounds ordered by size, all of size at most `cap`.
pub fn ansatz_schedule<T: Summand>(f: &T, cap: usize) -> Vec<AnsatzBounds> {
    let r = f.num_shifts();
    let s = f.num_diffs();
    let dims = 1 + r + s;
    let mut out = Vec::new();
    let mut idx = vec![1u32; dims];
    let size = |idx: &[u32]| idx.iter().map(|&b| b as usize + 1).product::<usize>();
    if size(&idx) > cap {
        return out;
    }
    // enumerate the finite set {idx >= 1 : size(idx) <= cap}
    loop {
        out.push(AnsatzBounds {
            max_n: idx[0],
            max_k: idx[1..1 + r].to_vec(),
            max_d: idx[1 + r..].to_vec(),
            coeff_deg: 1,
        });
        let mut pos = 0;
        loop {
            if pos == dims {
                out.sort_by(|a, b| {
                    (a.size(), a.max_n, std::cmp::Reverse(&a.max_k), &a.max_d).cmp(&(
                        b.size(),
                        b.max_n,
                        std::cmp::Reverse(&b.max_k),
                        &b.max_d,
                    ))
                });
                return out;
            }
            idx[pos] += 1;
            if size(&idx) <= cap {
                break;
            }
            idx[pos] = 1;
            pos += 1;
        }
    }
}

/// The linear system of the ansatz: one row per monomial in the inner
/// variables, one column per word.
pub fn ansatz_matrix<T: Summand>(f: &T, words: &[Word]) -> SymMatrix {
    let u = f.universe();
    let quotients: Vec<RatFun> = words.iter().map(|w| f.word_quotient(w)).collect();
    let den = common_denominator(u, &quotients);
    let inner = f.inner_vars();
    let mut columns: Vec<BTreeMap<Vec<u32>, MultiPoly>> = Vec::with_capacity(words.len());
    let mut keys: BTreeSet<Vec<u32>> = BTreeSet::new();
    for q in &quotients {
        let scale = den.exact_div(q.denom()).expect("common denominator");
        let num = q.numer() * &scale;
        let col = num.coefficients_in(&inner);
        keys.extend(col.keys().cloned());
        columns.push(col);
    }
    let zero = MultiPoly::zero(u);
    let entries: Vec<Vec<MultiPoly>> = keys
        .iter()
        .map(|k| {
            columns
                .iter()
                .map(|c| c.get(k).cloned().unwrap_or_else(|| zero.clone()))
                .collect()
        })
        .collect();
    SymMatrix::new(u, entries).expect("rectangular ansatz matrix")
}

/// All annihilators from a nullspace basis of the ansatz, sorted by
/// (outer order, number of words, coefficient degree).
pub fn annihilator_basis<T: Summand>(
    f: &T,
    bounds: &AnsatzBounds,
    cap: usize,
) -> Result<Vec<OreOperator>, TelescopeError> {
    let size = bounds.size();
    if size > cap {
        return Err(TelescopeError::AnsatzTooLarge { size, cap });
    }
    let words = bounds.words();
    let m = ansatz_matrix(f, &words);
    let r = f.num_shifts();
    let s = f.num_diffs();
    let mut ops: Vec<OreOperator> = nullspace(&m)
        .into_iter()
        .map(|v| {
            OreOperator::from_terms(f.universe(), r, s, words.iter().cloned().zip(v))
        })
        .collect();
    ops.sort_by_key(|op| (op.outer_order(), op.terms().len(), op.max_coeff_degree()));
    Ok(ops)
}

pub fn find_annihilator<T: Summand>(
    f: &T,
    bounds: &AnsatzBounds,
    cap: usize,
) -> Result<OreOperator, TelescopeError> {
    annihilator_basis(f, bounds, cap)?
        .into_iter()
        .next()
        .ok_or_else(|| TelescopeError::NotFound {
            last: Some(bounds.clone()),
        })
}

pub fn decompose(t: &OreOperator) -> Decomposition {
    let u = t.universe();
    let (r, s) = (t.num_shifts(), t.num_diffs());
    let mut p: Vec<MultiPoly> = Vec::new();
    let mut ti = vec![OreOperator::zero(u, r, s); r];
    let mut th = vec![OreOperator::zero(u, r, s); s];
    for (w, c) in t.terms() {
        if let Some(j) = w.diffs.iter().position(|&e| e > 0) {
            let mut rest = w.clone();
            rest.diffs[j] -= 1;
            th[j].add_term(rest, c.clone());
            continue;
        }
        // K_i^b M = M + (K_i - 1)(1 + K_i + .. + K_i^{b-1}) M
        let mut w = w.clone();
        for i in 0..r {
            let b = w.shifts[i];
            if b == 0 {
                continue;
            }
            for e in 0..b {
                let mut part = w.clone();
                part.shifts[i] = e;
                ti[i].add_term(part, c.clone());
            }
            w.shifts[i] = 0;
        }
        let a = w.outer as usize;
        if p.len() <= a {
            p.resize(a + 1, MultiPoly::zero(u));
        }
        p[a] = &p[a] + c;
    }
    Decomposition {
        p: UniOperator::new(u, p),
        t: ti,
        t_hat: th,
    }
}

/// `R_i = -(T_i F)/F`, `S_j = -(That_j F)/F`.
pub fn extract_certificates<T: Summand>(
    f: &T,
    t: &[OreOperator],
    t_hat: &[OreOperator],
) -> (Vec<RatFun>, Vec<RatFun>) {
    let r = t.iter().map(|op| -op.apply(f)).collect();
    let s = t_hat.iter().map(|op| -op.apply(f)).collect();
    (r, s)
}

/// Make `P` primitive with a positive leading coefficient, scaling the
/// certificates along. A common polynomial factor of `P` is removed only
/// when it cannot vanish at a nonnegative outer value.
pub fn normalize_certificate<T: Summand>(c: TelescopeCertificate<T>) -> TelescopeCertificate<T> {
    let c = strip_trailing(c);
    let u = c.term.universe().clone();
    let coeffs = c.p.coeffs();
    let Some(lead) = c.p.leading() else { return c };
    let mut g = lead.primitive();
    for p in coeffs {
        if g.is_constant() {
            break;
        }
        if !p.is_zero() {
            g = gcd(&g, p);
        }
    }
    let divisible = !g.is_constant()
        && (0..64).all(|n0| match c.term.outer_value_map(n0) {
            Some(map) => !g.substitute(&map).is_zero(),
            None => true,
        });
    let g = if divisible { g } else { MultiPoly::one(&u) };
    let mut new: Vec<MultiPoly> = coeffs
        .iter()
        .map(|p| p.exact_div(&g).expect("gcd divides"))
        .collect();
    let content = new
        .iter()
        .filter(|p| !p.is_zero())
        .map(MultiPoly::content)
        .fold(None, |acc: Option<num_rational::BigRational>, x| {
            Some(match acc {
                None => x,
                Some(a) => {
                    use num_integer::Integer;
                    num_rational::BigRational::new(
                        a.numer().gcd(x.numer()),
                        a.denom().lcm(x.denom()),
                    )
                }
            })
        })
        .expect("nonzero operator");
    let sign_neg = new
        .last()
        .expect("nonzero operator")
        .leading_coeff()
        .is_negative();
    let scalar = if sign_neg { -content.recip() } else { content.recip() };
    for p in &mut new {
        *p = p.scale(&scalar);
    }
    let factor = RatFun::new(MultiPoly::constant(&u, scalar), g).expect("nonzero gcd");
    TelescopeCertificate {
        p: UniOperator::new(&u, new),
        r: c.r.iter().map(|x| x * &factor).collect(),
        s: c.s.iter().map(|x| x * &factor).collect(),
        term: c.term,
    }
}

/// `P = P' N^m` with a discrete outer variable: the relation at `n - m`
/// gives `P'(n - m) F(n) = sum Delta(R(n - m) F(n - m))`, and
/// `F(n - m) / F(n)` is the shifted-back reciprocal of `N^m F / F`.
fn strip_trailing<T: Summand>(c: TelescopeCertificate<T>) -> TelescopeCertificate<T> {
    let f = &c.term;
    let m = c.p.coeffs().iter().take_while(|p| p.is_zero()).count();
    if m == 0 || f.outer_is_continuous() {
        return c;
    }
    let u = f.universe();
    let m32 = m as u32;
    let shifted: Vec<RatFun> = c.p.coeffs()[m..]
        .iter()
        .map(|p| f.outer_shift_back(&RatFun::from_poly(p.clone()), m32))
        .collect();
    // q-shifts back may introduce powers of q in denominators
    let den = RatFun::from_poly(common_denominator(u, &shifted));
    let coeffs: Vec<MultiPoly> = shifted
        .iter()
        .map(|x| (x * &den).to_poly().expect("cleared denominator"))
        .collect();
    let q = f.outer_quotient(m32);
    let fix = |x: &RatFun| {
        if x.is_zero() {
            return x.clone();
        }
        &f.outer_shift_back(&(x / &q), m32) * &den
    };
    TelescopeCertificate {
        p: UniOperator::new(u, coeffs),
        r: c.r.iter().map(fix).collect(),
        s: c.s.iter().map(fix).collect(),
        term: c.term.clone(),
    }
}

/// Schedule, ansatz, decomposition and extraction. Annihilators whose
/// `P` vanishes are skipped in favour of the next basis vector or larger
/// bounds.
pub fn creative_telescope<T: Summand>(
    f: &T,
    max_unknowns: usize,
) -> Result<TelescopeCertificate<T>, TelescopeError> {
    let mut last = None;
    for bounds in ansatz_schedule(f, max_unknowns) {
        for op in annihilator_basis(f, &bounds, max_unknowns)? {
            let d = decompose(&op);
            if d.p.is_zero() {
                continue;
            }
            let (r, s) = extract_certificates(f, &d.t, &d.t_hat);
            let cert = normalize_certificate(TelescopeCertificate {
                term: f.clone(),
                p: d.p,
                r,
                s,
            });
            if crate::certify::residual(f, &cert).is_zero() {
                return Ok(cert);
            }
        }
        last = Some(bounds);
    }
    Err(TelescopeError::NotFound { last })
}
