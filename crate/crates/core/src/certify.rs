//! Checking telescoping relations as polynomial identities.
//!
//! Every claimed relation is divided by `F`, so only the shift and
//! derivative quotients of `F` enter; the result is a rational function
//! whose numerator must vanish.

use crate::arith::{MultiPoly, RatFun};
use crate::operator::Summand;
use crate::telescope::TelescopeCertificate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("term/certificate mismatch: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub vacuous: bool,
    pub residual: MultiPoly,
    /// Denominators of the certificates; poles there do not invalidate the
    /// formal identity.
    pub denominators: Vec<MultiPoly>,
    pub trace: String,
}

/// `K_i`, `D_j` parts of the right side, divided by `F`:
/// `sum_i [sigma_i(R_i) K_iF/F - R_i] + sum_j [D_j S_j + S_j D_jF/F]`.
fn telescoped_part<T: Summand>(f: &T, r: &[RatFun], s: &[RatFun]) -> RatFun {
    let u = f.universe();
    let mut acc = RatFun::zero(u);
    for (i, ri) in r.iter().enumerate() {
        if ri.is_zero() {
            continue;
        }
        let shifted = ri
            .substitute(&f.inner_shift_map(i))
            .expect("shift is an automorphism");
        acc = &acc + &(&(&shifted * &f.inner_shift_quotient(i)) - ri);
    }
    for (j, sj) in s.iter().enumerate() {
        if sj.is_zero() {
            continue;
        }
        let y = f.inner_diff_var(j);
        acc = &acc + &(&sj.derivative(y) + &(sj * &f.inner_diff_quotient(j)));
    }
    acc
}

fn check_shapes<T: Summand>(f: &T, r: &[RatFun], s: &[RatFun]) -> Result<(), CertifyError> {
    if r.len() != f.num_shifts() || s.len() != f.num_diffs() {
        return Err(CertifyError::Mismatch(format!(
            "expected {} shift and {} derivative certificates, got {} and {}",
            f.num_shifts(),
            f.num_diffs(),
            r.len(),
            s.len()
        )));
    }
    if r.iter().chain(s).any(|x| !x.universe().same(f.universe())) {
        return Err(CertifyError::Mismatch("certificate variables".into()));
    }
    Ok(())
}

fn relation<T: Summand>(f: &T, cert: &TelescopeCertificate<T>) -> RatFun {
    &cert.p.apply(f) - &telescoped_part(f, &cert.r, &cert.s)
}

/// Numerator of `(P F - sum Delta(R F) - sum D(S F)) / F`.
pub fn residual<T: Summand>(f: &T, cert: &TelescopeCertificate<T>) -> MultiPoly {
    relation(f, cert).numer().clone()
}

fn render_list(names: &[String], items: &[RatFun], label: &str) -> Vec<String> {
    names
        .iter()
        .zip(items)
        .map(|(n, x)| format!("{label}_{n} = {}", x.render()))
        .collect()
}

fn finish(residual: MultiPoly, vacuous: bool, first: String, cert_parts: &[RatFun]) -> Verdict {
    let valid = residual.is_zero();
    let second = if valid {
        let mut s = "numerator after clearing denominators ≡ 0".to_string();
        if vacuous {
            s.push_str(" (vacuous)");
        }
        s
    } else {
        format!(
            "numerator after clearing denominators = {} ≠ 0",
            residual.render()
        )
    };
    let mut denominators: Vec<MultiPoly> = cert_parts
        .iter()
        .filter(|x| !x.denom().is_constant())
        .map(|x| x.denom().clone())
        .collect();
    denominators.dedup();
    Verdict {
        valid,
        vacuous,
        residual,
        denominators,
        trace: format!("{first}\n{second}"),
    }
}

pub fn verify<T: Summand + PartialEq>(
    f: &T,
    cert: &TelescopeCertificate<T>,
) -> Result<Verdict, CertifyError> {
    if &cert.term != f {
        return Err(CertifyError::Mismatch("certificate is for another term".into()));
    }
    if !cert.p.universe().same(f.universe()) {
        return Err(CertifyError::Mismatch("operator variables".into()));
    }
    check_shapes(f, &cert.r, &cert.s)?;
    let rel = relation(f, cert);
    let vacuous = cert.p.is_zero() && cert.r.iter().chain(&cert.s).all(RatFun::is_zero);
    let op = f.outer_operator_name();
    let mut rhs: Vec<String> = f
        .shift_names()
        .iter()
        .map(|k| format!("Δ_{k}(R_{k} F)/F"))
        .collect();
    rhs.extend(f.diff_names().iter().map(|y| format!("D_{y}(S_{y} F)/F")));
    let rhs = if rhs.is_empty() {
        "0".to_string()
    } else {
        rhs.join(" + ")
    };
    let mut defs = vec![format!("P = {}", cert.p.render(&op))];
    defs.extend(render_list(&f.shift_names(), &cert.r, "R"));
    defs.extend(render_list(&f.diff_names(), &cert.s, "S"));
    let first = format!("(P F)/F = {rhs}, where {}", defs.join(", "));
    let parts: Vec<RatFun> = cert.r.iter().chain(&cert.s).cloned().collect();
    Ok(finish(rel.numer().clone(), vacuous, first, &parts))
}

/// `(F, g, h)` with `Δ_n F = sum_i Δ_{k_i}(g_i F) + sum_j D_{y_j}(h_j F)`.
///
/// The multipliers are stored with the same sign convention as telescoping
/// certificates, so a certificate with `P = N - 1` is a tuple as it stands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WZTuple<T> {
    pub f: T,
    pub g: Vec<RatFun>,
    pub h: Vec<RatFun>,
}

pub fn verify_wz_tuple<T: Summand>(t: &WZTuple<T>) -> Result<Verdict, CertifyError> {
    let f = &t.f;
    check_shapes(f, &t.g, &t.h)?;
    let u = f.universe();
    let outer = if f.outer_is_continuous() {
        f.outer_quotient(1)
    } else {
        &f.outer_quotient(1) - &RatFun::one(u)
    };
    let rel = &outer - &telescoped_part(f, &t.g, &t.h);
    let vacuous = outer.is_zero() && t.g.iter().chain(&t.h).all(RatFun::is_zero);
    let lead = if f.outer_is_continuous() {
        format!("D_{}", f.outer_name())
    } else {
        format!("Δ_{}", f.outer_name())
    };
    let mut rhs: Vec<String> = f
        .shift_names()
        .iter()
        .map(|k| format!("Δ_{k}(G_{k} F)/F"))
        .collect();
    rhs.extend(f.diff_names().iter().map(|y| format!("D_{y}(H_{y} F)/F")));
    let rhs = if rhs.is_empty() {
        "0".to_string()
    } else {
        rhs.join(" + ")
    };
    let mut defs = render_list(&f.shift_names(), &t.g, "G");
    defs.extend(render_list(&f.diff_names(), &t.h, "H"));
    let first = if defs.is_empty() {
        format!("({lead} F)/F = {rhs}")
    } else {
        format!("({lead} F)/F = {rhs}, where {}", defs.join(", "))
    };
    let parts: Vec<RatFun> = t.g.iter().chain(&t.h).cloned().collect();
    Ok(finish(rel.numer().clone(), vacuous, first, &parts))
}
