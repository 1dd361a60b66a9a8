use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rat, MultiPoly, Universe};

/// Affine form `sum c_v * v + constant` over a universe.
///
/// Coefficients of discrete variables are integers; parameters may carry
/// rational coefficients (the parameter-affine constant part of a factor).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm {
    coeffs: Vec<BigRational>,
    constant: BigRational,
}

impl LinForm {
    pub fn zero(len: usize) -> Self {
        LinForm {
            coeffs: vec![BigRational::zero(); len],
            constant: BigRational::zero(),
        }
    }

    pub fn constant(len: usize, c: BigRational) -> Self {
        let mut l = Self::zero(len);
        l.constant = c;
        l
    }

    pub fn var(len: usize, index: usize) -> Self {
        let mut l = Self::zero(len);
        l.coeffs[index] = BigRational::one();
        l
    }

    /// Build from `(index, coefficient)` pairs and an integer constant.
    pub fn from_ints(len: usize, terms: &[(usize, i64)], constant: i64) -> Self {
        let mut l = Self::constant(len, rat(constant));
        for &(i, c) in terms {
            l.coeffs[i] += rat(c);
        }
        l
    }

    pub fn new(coeffs: Vec<BigRational>, constant: BigRational) -> Self {
        LinForm { coeffs, constant }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> &BigRational {
        &self.coeffs[index]
    }

    /// Integer coefficient of a discrete variable.
    pub fn int_coeff(&self, index: usize) -> i64 {
        let c = &self.coeffs[index];
        debug_assert!(c.is_integer());
        c.to_integer().to_i64().expect("coefficient fits in i64")
    }

    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn depends_on(&self, index: usize) -> bool {
        !self.coeffs[index].is_zero()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        LinForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn neg(&self) -> LinForm {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> LinForm {
        LinForm {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn add_constant(&self, c: &BigRational) -> LinForm {
        let mut l = self.clone();
        l.constant += c;
        l
    }

    /// Change of value under an integer shift of the variables.
    pub fn shift_delta(&self, shifts: &[(usize, i64)]) -> i64 {
        shifts
            .iter()
            .map(|&(v, s)| s * self.int_coeff(v))
            .sum()
    }

    /// Substitute values for some variables, folding them into the constant.
    pub fn partial_eval(&self, assign: &[Option<BigRational>]) -> LinForm {
        let mut out = self.clone();
        for (i, val) in assign.iter().enumerate() {
            if let Some(v) = val {
                if !out.coeffs[i].is_zero() {
                    out.constant += &out.coeffs[i] * v;
                    out.coeffs[i] = BigRational::zero();
                }
            }
        }
        out
    }

    /// Integer value when the form is constant and integral.
    pub fn int_value(&self) -> Option<BigInt> {
        (self.is_constant() && self.constant.is_integer()).then(|| self.constant.to_integer())
    }

    pub fn to_poly(&self, u: &Universe) -> MultiPoly {
        assert_eq!(u.len(), self.coeffs.len());
        let mut p = MultiPoly::constant(u, self.constant.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                p = &p + &MultiPoly::var(u, i).scale(c);
            }
        }
        p
    }

    /// Re-index into a universe of a different size via an index map.
    pub fn remap(&self, len: usize, map: &dyn Fn(usize) -> Option<usize>) -> LinForm {
        let mut out = LinForm::constant(len, self.constant.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let j = map(i).expect("remapped variable exists");
                out.coeffs[j] += c;
            }
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            push_term(&mut s, c, Some(&names[i]));
        }
        if !self.constant.is_zero() || s.is_empty() {
            push_term(&mut s, &self.constant, None);
        }
        s
    }
}

fn push_term(s: &mut String, c: &BigRational, name: Option<&str>) {
    let neg = c.is_negative();
    let a = c.abs();
    if s.is_empty() {
        if neg {
            s.push('-');
        }
    } else {
        s.push_str(if neg { " - " } else { " + " });
    }
    match name {
        Some(n) if a.is_one() => s.push_str(n),
        Some(n) => s.push_str(&format!("{a}*{n}")),
        None => s.push_str(&a.to_string()),
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.coeffs.len()).map(|i| format!("v{i}")).collect();
        write!(f, "LinForm({})", self.render(&names))
    }
}
