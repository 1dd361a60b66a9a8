//! Certificate files: one JSON document holding the term (as canonical
//! DSL text), the operator and the rational certificates.
//!
//! Polynomials are sparse lists of `{exponents, coeff}` with exponents
//! aligned to `variables` and coefficients as decimal strings `"-3"` or
//! `"5/7"`, so every integer survives exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{Monomial, MultiPoly, RatFun, Universe};
use crate::dsl::{self, render_statement, DslTerm, Statement};
use crate::identity::{IdentityStatement, IdentityTerm, Rhs};
use crate::operator::UniOperator;
use crate::telescope::TelescopeCertificate;
use crate::term::{HyperTerm, QHyperTerm};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertFileError {
    #[error("malformed certificate file at {path}: {message}")]
    Malformed { path: String, message: String },
}

fn malformed(path: impl Into<String>, message: impl Into<String>) -> CertFileError {
    CertFileError::Malformed {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub n_power: u32,
    pub coeff: Vec<PolyTerm>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RationalEntry {
    pub num: Vec<PolyTerm>,
    pub den: Vec<PolyTerm>,
}

/// The file as stored.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub format_version: u32,
    pub mode: String,
    pub term: String,
    pub variables: Vec<String>,
    pub operator: Vec<OperatorEntry>,
    pub certificates: BTreeMap<String, RationalEntry>,
}

/// A certificate of either family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyCertificate {
    Classical(TelescopeCertificate<HyperTerm>),
    Q(TelescopeCertificate<QHyperTerm>),
}

fn coeff_string(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_coeff(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        None => parse_int(s).map(BigRational::from_integer),
        Some((n, d)) => {
            let n = parse_int(n)?;
            if d.starts_with(['-', '+']) {
                return None;
            }
            let d = parse_int(d)?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
    }
}

fn encode_poly(p: &MultiPoly) -> Vec<PolyTerm> {
    p.terms()
        .rev()
        .map(|(m, c)| PolyTerm {
            exponents: m.exponents().to_vec(),
            coeff: coeff_string(c),
        })
        .collect()
}

fn decode_poly(terms: &[PolyTerm], u: &Universe, path: &str) -> Result<MultiPoly, CertFileError> {
    let mut out = MultiPoly::zero(u);
    for (i, t) in terms.iter().enumerate() {
        if t.exponents.len() != u.len() {
            return Err(malformed(
                format!("{path}[{i}].exponents"),
                format!("expected {} exponents, found {}", u.len(), t.exponents.len()),
            ));
        }
        let Some(c) = parse_coeff(&t.coeff) else {
            return Err(malformed(
                format!("{path}[{i}].coeff"),
                format!("not an integer or fraction: {:?}", t.coeff),
            ));
        };
        let m = MultiPoly::monomial(u, Monomial::from_exponents(t.exponents.clone()), c);
        out = &out + &m;
    }
    Ok(out)
}

fn term_text<T: DslTerm + Clone>(t: &T) -> String {
    render_statement(&IdentityStatement {
        lhs: t.clone(),
        rhs: Rhs::Unspecified,
    })
}

fn to_doc<T: DslTerm + Clone>(c: &TelescopeCertificate<T>, mode: &str) -> CertificateDoc {
    let u = c.term.universe();
    let operator = c
        .p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(a, p)| OperatorEntry {
            n_power: a as u32,
            coeff: encode_poly(p),
        })
        .collect();
    let mut certificates = BTreeMap::new();
    let names = c.term.shift_names().into_iter().chain(c.term.diff_names());
    for (name, r) in names.zip(c.r.iter().chain(&c.s)) {
        certificates.insert(
            name,
            RationalEntry {
                num: encode_poly(r.numer()),
                den: encode_poly(r.denom()),
            },
        );
    }
    CertificateDoc {
        format_version: FORMAT_VERSION,
        mode: mode.to_string(),
        term: term_text(&c.term),
        variables: u.names().to_vec(),
        operator,
        certificates,
    }
}

impl AnyCertificate {
    pub fn to_doc(&self) -> CertificateDoc {
        match self {
            AnyCertificate::Classical(c) => to_doc(c, "classical"),
            AnyCertificate::Q(c) => to_doc(c, "q"),
        }
    }

    pub fn is_q(&self) -> bool {
        matches!(self, AnyCertificate::Q(_))
    }
}

fn from_doc<T: IdentityTerm>(doc: &CertificateDoc, term: T) -> Result<TelescopeCertificate<T>, CertFileError> {
    let u = term.universe().clone();
    if doc.variables != u.names() {
        return Err(malformed(
            "variables",
            format!("expected [{}] for this term", u.names().join(", ")),
        ));
    }
    let mut coeffs: Vec<Option<MultiPoly>> = Vec::new();
    for (i, e) in doc.operator.iter().enumerate() {
        let a = e.n_power as usize;
        if a > 64 {
            return Err(malformed(format!("operator[{i}].n_power"), "order above 64"));
        }
        if coeffs.len() <= a {
            coeffs.resize(a + 1, None);
        }
        if coeffs[a].is_some() {
            return Err(malformed(format!("operator[{i}].n_power"), "repeated power"));
        }
        coeffs[a] = Some(decode_poly(&e.coeff, &u, &format!("operator[{i}].coeff"))?);
    }
    let p = UniOperator::new(
        &u,
        coeffs
            .into_iter()
            .map(|c| c.unwrap_or_else(|| MultiPoly::zero(&u)))
            .collect(),
    );
    let shifts = term.shift_names();
    let diffs = term.diff_names();
    for name in doc.certificates.keys() {
        if !shifts.contains(name) && !diffs.contains(name) {
            return Err(malformed(
                format!("certificates.{name}"),
                "not a summation or integration variable of the term",
            ));
        }
    }
    let read = |name: &String| -> Result<RatFun, CertFileError> {
        let Some(e) = doc.certificates.get(name) else {
            return Err(malformed(format!("certificates.{name}"), "missing"));
        };
        let num = decode_poly(&e.num, &u, &format!("certificates.{name}.num"))?;
        let den = decode_poly(&e.den, &u, &format!("certificates.{name}.den"))?;
        RatFun::new(num, den).map_err(|_| malformed(format!("certificates.{name}.den"), "zero denominator"))
    };
    let r = shifts.iter().map(read).collect::<Result<Vec<_>, _>>()?;
    let s = diffs.iter().map(read).collect::<Result<Vec<_>, _>>()?;
    Ok(TelescopeCertificate { term, p, r, s })
}

pub fn read_certificate(bytes: &[u8]) -> Result<AnyCertificate, CertFileError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: CertificateDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "(document)".to_string() } else { path };
        malformed(path, e.into_inner().to_string())
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(malformed(
            "format_version",
            format!("unsupported version {}", doc.format_version),
        ));
    }
    let force_q = match doc.mode.as_str() {
        "classical" => false,
        "q" => true,
        m => return Err(malformed("mode", format!("unknown mode {m:?}"))),
    };
    let stmt = dsl::parse_with(&doc.term, force_q).map_err(|e| malformed("term", e.to_string()))?;
    match stmt {
        Statement::Classical(s) if !force_q => Ok(AnyCertificate::Classical(from_doc(&doc, s.lhs)?)),
        Statement::Q(s) if force_q => Ok(AnyCertificate::Q(from_doc(&doc, s.lhs)?)),
        _ => Err(malformed("mode", "does not match the term")),
    }
}

pub fn write_certificate(c: &AnyCertificate) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(&c.to_doc()).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// Rational function as stored in a file, e.g. for a verdict block.
pub fn encode_rational(r: &RatFun) -> RationalEntry {
    RationalEntry {
        num: encode_poly(r.numer()),
        den: encode_poly(r.denom()),
    }
}

pub fn encode_polynomial(p: &MultiPoly) -> Vec<PolyTerm> {
    encode_poly(p)
}
