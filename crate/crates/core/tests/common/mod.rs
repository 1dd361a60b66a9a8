#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use wzcert::arith::{rat, Monomial, MultiPoly, RatFun, Universe};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Binomial coefficient by the multiplicative formula, zero outside `0..=n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(m: i64) -> BigInt {
    (1..=m).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

pub fn qbinom(n: i64, k: i64, qv: &BigRational) -> BigRational {
    if k < 0 || k > n {
        return BigRational::zero();
    }
    let one = BigRational::one();
    let qp = |e: i64| -> BigRational {
        let mut acc = one.clone();
        for _ in 0..e {
            acc = &acc * qv;
        }
        acc
    };
    let mut acc = one.clone();
    for i in 0..k {
        acc = acc * (&one - qp(n - i)) / (&one - qp(i + 1));
    }
    acc
}

pub fn int_rat(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

/// Sparse polynomial with small integer coefficients and degree at most
/// `deg` in each of `nvars` variables.
pub fn poly_strategy(u: Universe, deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> + Clone {
    let n = u.len();
    prop::collection::vec(
        (prop::collection::vec(0..=deg, n), -9i64..=9),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        MultiPoly::from_terms(
            &u,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::from_exponents(e), rat(c))),
        )
    })
}

pub fn nonzero_poly_strategy(u: Universe, deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly_strategy(u, deg, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn point_strategy(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-12i64..=12, 1i64..=5), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
}

pub fn ratfun(num: MultiPoly, den: MultiPoly) -> RatFun {
    RatFun::new(num, den).expect("nonzero denominator")
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Rank of a rational matrix by plain Gaussian elimination.
pub fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}.id", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> wzcert::dsl::Statement {
    wzcert::dsl::parse(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn classical_fixture(name: &str) -> wzcert::identity::IdentityStatement<wzcert::term::HyperTerm> {
    match fixture(name) {
        wzcert::dsl::Statement::Classical(s) => s,
        _ => panic!("{name} is a q statement"),
    }
}

pub fn q_fixture(name: &str) -> wzcert::identity::IdentityStatement<wzcert::term::QHyperTerm> {
    match fixture(name) {
        wzcert::dsl::Statement::Q(s) => s,
        _ => panic!("{name} is not a q statement"),
    }
}

/// The certificate for the integrand behind the Hille-Hardy formula, with
/// `x` the continuous outer variable (`"x"` or `"y"`).
pub fn hille_hardy_certificate(
    name: &str,
    x: &str,
) -> wzcert::telescope::TelescopeCertificate<wzcert::term::HyperTerm> {
    use wzcert::operator::UniOperator;
    let t = classical_fixture(name).lhs;
    let u = t.universe().clone();
    let pr = |s: &str| wzcert::dsl::parse_rational(s, &u).unwrap();
    let p = UniOperator::new(
        &u,
        vec![
            pr("n").to_poly().unwrap(),
            pr(&format!("alpha + 1 - {x}")).to_poly().unwrap(),
            pr(x).to_poly().unwrap(),
        ],
    );
    wzcert::telescope::TelescopeCertificate {
        term: t,
        p,
        r: vec![pr(&format!("-m*(alpha + m)/{x}"))],
        s: vec![pr("-u")],
    }
}

/// Every fixture certificate: the three classical sums and the q-binomial
/// sum as found, and the two Hille-Hardy certificates as written.
pub fn fixture_certificates() -> Vec<(String, wzcert::certfile::AnyCertificate)> {
    use wzcert::certfile::AnyCertificate;
    use wzcert::telescope::{creative_telescope, DEFAULT_MAX_UNKNOWNS};
    let mut out = Vec::new();
    for name in ["binomial_sum", "binomial_squares", "double_sum"] {
        let f = classical_fixture(name).lhs;
        let c = creative_telescope(&f, DEFAULT_MAX_UNKNOWNS).unwrap();
        out.push((name.to_string(), AnyCertificate::Classical(c)));
    }
    let f = q_fixture("q_binomial").lhs;
    let c = creative_telescope(&f, DEFAULT_MAX_UNKNOWNS).unwrap();
    out.push(("q_binomial".to_string(), AnyCertificate::Q(c)));
    for (name, x) in [("hille_hardy", "x"), ("hille_hardy_y", "y")] {
        out.push((name.to_string(), AnyCertificate::Classical(hille_hardy_certificate(name, x))));
    }
    out
}

/// One-variable sums the finder handles within the default cap.
pub fn classical_family() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=3, -3i64..=3, 1i64..=3)
            .prop_filter("nonzero", |(_, p, _)| *p != 0)
            .prop_map(|(b, p, r)| format!("binom(n + {b}, k) * ({p}/{r})^k")),
        (0i64..=2, 1i64..=3).prop_map(|(b, c)| format!("binom(n + {b}, k) * (k + {c})")),
        (1i64..=3, 1i64..=4)
            .prop_map(|(c, d)| format!("binom(n, k) * (-1)^k * pochhammer({c}, k)/pochhammer({d}, k)")),
        (1i64..=2, 0i64..=2).prop_map(|(a, b)| format!("binom({a}*n, k + {b}) * 2^k")),
        (0i64..=2).prop_map(|b| format!("binom(n, k) * binom(n + {b}, k)")),
    ]
}

/// q-sums with the extra width of their support over `0..=n`.
pub fn q_family() -> impl Strategy<Value = (String, i64)> {
    prop_oneof![
        (0i64..=2, 2i64..=4).prop_map(|(b, z)| (format!("qbin(n + {b}, k) * {z}^k"), b)),
        (2i64..=4).prop_map(|z| (format!("qbin(n, k) * q^(k*(k - 1)/2) * {z}^k"), 0)),
        (1i64..=3).prop_map(|c| (format!("qbin(n, k) * qpoch(q^({c}), k)/qpoch(q, k)"), 0)),
    ]
}
