//! Nullspaces of polynomial matrices over the rational-function field of
//! their coefficient variables.
//!
//! Fraction-free Gauss-Jordan elimination (Bareiss): after step `r` every
//! entry is a minor of the input, so the division by the previous pivot is
//! exact in the polynomial ring.

use num_rational::BigRational;
use num_traits::Signed;

use crate::arith::{gcd, MultiPoly, Universe};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix rows have different lengths")]
    Ragged,
    #[error("variable universe mismatch")]
    UniverseMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    universe: Universe,
    cols: usize,
    entries: Vec<Vec<MultiPoly>>,
}

impl SymMatrix {
    pub fn new(universe: &Universe, entries: Vec<Vec<MultiPoly>>) -> Result<Self, MatrixError> {
        let cols = entries.first().map_or(0, Vec::len);
        for row in &entries {
            if row.len() != cols {
                return Err(MatrixError::Ragged);
            }
            if row.iter().any(|e| !e.universe().same(universe)) {
                return Err(MatrixError::UniverseMismatch);
            }
        }
        Ok(SymMatrix {
            universe: universe.clone(),
            cols,
            entries,
        })
    }

    pub fn zeros(universe: &Universe, rows: usize, cols: usize) -> Self {
        SymMatrix {
            universe: universe.clone(),
            cols,
            entries: vec![vec![MultiPoly::zero(universe); cols]; rows],
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: MultiPoly) {
        assert!(v.universe().same(&self.universe), "variable universe mismatch");
        self.entries[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[MultiPoly] {
        &self.entries[i]
    }

    pub fn mul_vec(&self, v: &[MultiPoly]) -> Vec<MultiPoly> {
        assert_eq!(v.len(), self.cols);
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(MultiPoly::zero(&self.universe), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn eval(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(point)).collect())
            .collect()
    }
}

/// A basis of the right nullspace. Each vector is cleared of denominators,
/// primitive, and has a positive leading coefficient in its first nonzero
/// entry.
pub fn nullspace(m: &SymMatrix) -> Vec<Vec<MultiPoly>> {
    let u = m.universe.clone();
    let cols = m.cols;
    let mut a: Vec<Vec<MultiPoly>> = Vec::new();
    for row in &m.entries {
        if row.iter().all(MultiPoly::is_zero) {
            continue;
        }
        // rescaling a row by a rational constant leaves the nullspace alone
        let c = row
            .iter()
            .filter(|e| !e.is_zero())
            .map(MultiPoly::content)
            .reduce(|x, y| gcd_rational(&x, &y))
            .expect("nonzero row");
        let scaled: Vec<MultiPoly> = row.iter().map(|e| e.scale(&c.recip())).collect();
        if !a.contains(&scaled) {
            a.push(scaled);
        }
    }
    let rows = a.len();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut prev = MultiPoly::one(&u);
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best: Option<((u32, usize), usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, e) in row.iter().enumerate().skip(rank) {
                if e.is_zero() {
                    continue;
                }
                let key = (e.total_degree(), e.num_terms());
                let better = match &best {
                    None => true,
                    Some((k, bj, bi)) => (key, j, i) < (*k, *bj, *bi),
                };
                if better {
                    best = Some((key, j, i));
                }
            }
        }
        let Some((_, pj, pi)) = best else { break };
        a.swap(rank, pi);
        if pj != rank {
            for row in a.iter_mut() {
                row.swap(rank, pj);
            }
            perm.swap(rank, pj);
        }
        let r = rank;
        let pivot = a[r][r].clone();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i][r].clone();
            for j in 0..cols {
                if j == r {
                    continue;
                }
                let lhs = &pivot * &a[i][j];
                let next = if factor.is_zero() || a[r][j].is_zero() {
                    lhs
                } else {
                    &lhs - &(&factor * &a[r][j])
                };
                a[i][j] = next.exact_div(&prev).expect("Bareiss division is exact");
            }
            a[i][r] = MultiPoly::zero(&u);
        }
        // earlier pivot rows keep the common diagonal value
        prev = pivot;
        rank += 1;
    }

    let mut basis = Vec::with_capacity(cols - rank);
    for f in rank..cols {
        let mut v = vec![MultiPoly::zero(&u); cols];
        v[perm[f]] = prev.clone();
        for i in 0..rank {
            v[perm[i]] = -&a[i][f];
        }
        basis.push(normalize_vector(v));
    }
    basis
}

fn gcd_rational(a: &BigRational, b: &BigRational) -> BigRational {
    use num_integer::Integer;
    BigRational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// Divide by the polynomial gcd of the entries and fix the sign.
pub(crate) fn normalize_vector(v: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let Some(first) = v.iter().find(|e| !e.is_zero()) else {
        return v;
    };
    let mut g = first.primitive();
    for e in &v {
        if g.is_constant() {
            break;
        }
        if !e.is_zero() {
            g = gcd(&g, e);
        }
    }
    let mut out: Vec<MultiPoly> = v
        .iter()
        .map(|e| e.exact_div(&g).expect("gcd divides every entry"))
        .collect();
    let content = out
        .iter()
        .filter(|e| !e.is_zero())
        .map(MultiPoly::content)
        .reduce(|x, y| gcd_rational(&x, &y))
        .expect("nonzero vector");
    let lead_negative = out
        .iter()
        .find(|e| !e.is_zero())
        .map(|e| e.leading_coeff().is_negative())
        .unwrap_or(false);
    let s = if lead_negative { -content.recip() } else { content.recip() };
    for e in &mut out {
        *e = e.scale(&s);
    }
    out
}
