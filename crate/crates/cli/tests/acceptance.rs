//! Acceptance gate: one PASS/FAIL line per criterion, with the time taken.
//! Values on the right of every comparison come from arithmetic done here
//! (binomials, powers, products), not from the library.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use wzcert::arith::{rat, Monomial, MultiPoly, RatFun, Universe};
use wzcert::certfile::{read_certificate, write_certificate, AnyCertificate};
use wzcert::certify::{verify, verify_wz_tuple, WZTuple};
use wzcert::dsl::{parse, parse_rational, render_statement, Statement};
use wzcert::identity::{
    companions, numeric_check, partial_sums, prove_identity, Env, IdentityStatement, Outcome,
};
use wzcert::linsolve::{nullspace, SymMatrix};
use wzcert::operator::{OreOperator, Summand, UniOperator, Word};
use wzcert::telescope::{creative_telescope, decompose, TelescopeCertificate, DEFAULT_MAX_UNKNOWNS};
use wzcert::term::{HyperTerm, QHyperTerm};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn statement(name: &str) -> Statement {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.id"))).unwrap();
    parse(&text).unwrap()
}

fn classical(name: &str) -> IdentityStatement<HyperTerm> {
    match statement(name) {
        Statement::Classical(s) => s,
        Statement::Q(_) => panic!("{name}: q statement"),
    }
}

fn q_statement(name: &str) -> IdentityStatement<QHyperTerm> {
    match statement(name) {
        Statement::Q(s) => s,
        Statement::Classical(_) => panic!("{name}: classical statement"),
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn big(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn pow(x: &BigRational, e: i64) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

fn constant(c: &RatFun) -> BigRational {
    c.constant_value().expect("fully evaluated")
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<(T, Duration), String> {
    let t0 = Instant::now();
    let out = f();
    let dt = t0.elapsed();
    ensure(dt < limit, || format!("{what} took {dt:.2?}, limit {limit:?}"))?;
    Ok((out, dt))
}

fn proof_of<T: wzcert::identity::IdentityTerm>(
    o: Outcome<T>,
) -> Result<wzcert::identity::Proof<T>, String> {
    match o {
        Outcome::Proof(p) => Ok(*p),
        other => Err(format!("expected a proof, got {other:?}")),
    }
}

fn bump<T: Summand>(c: &TelescopeCertificate<T>, slot: usize) -> TelescopeCertificate<T> {
    let mut out = c.clone();
    let u = c.term.universe();
    let target = if slot < out.r.len() {
        &mut out.r[slot]
    } else {
        &mut out.s[slot - c.r.len()]
    };
    let num = target.numer() + &MultiPoly::one(u);
    *target = RatFun::new(num, target.denom().clone()).unwrap();
    out
}

fn hille_hardy_expected(name: &str, x: &str) -> TelescopeCertificate<HyperTerm> {
    let t = classical(name).lhs;
    let u = t.universe().clone();
    let pr = |s: &str| parse_rational(s, &u).unwrap();
    let p = UniOperator::new(
        &u,
        vec![
            pr("n").to_poly().unwrap(),
            pr(&format!("alpha + 1 - {x}")).to_poly().unwrap(),
            pr(x).to_poly().unwrap(),
        ],
    );
    TelescopeCertificate {
        term: t,
        p,
        r: vec![pr(&format!("-m*(alpha + m)/{x}"))],
        s: vec![pr("-u")],
    }
}

fn criterion_1() -> Check {
    let mut notes = Vec::new();
    for (name, x) in [("hille_hardy", "x"), ("hille_hardy_y", "y")] {
        let expected = hille_hardy_expected(name, x);
        let bytes = std::fs::read(fixture_path(&format!("{name}.cert.json"))).unwrap();
        let AnyCertificate::Classical(file) = read_certificate(&bytes).map_err(|e| e.to_string())? else {
            return Err(format!("{name}: q certificate"));
        };
        ensure(file == expected, || format!("{name}: file differs from P, S, R"))?;
        let (v, dt) = timed(Duration::from_secs(2), name, || verify(&file.term, &file).unwrap())?;
        ensure(v.valid && v.residual.is_zero(), || format!("{name}: {}", v.trace))?;
        let (code, dt_cli) = timed(Duration::from_secs(2), name, || {
            cli(&[
                "verify",
                fixture_path(&format!("{name}.id")).to_str().unwrap(),
                fixture_path(&format!("{name}.cert.json")).to_str().unwrap(),
            ])
            .0
        })?;
        ensure(code == 0, || format!("{name}: cli exit {code}"))?;
        notes.push(format!("{name} residual ≡ 0 in {dt:.1?} (cli {dt_cli:.1?})"));
    }
    Ok(notes.join(", "))
}

fn criterion_2() -> Check {
    let s = classical("binomial_sum");
    let (o, dt) = timed(Duration::from_secs(2), "prove", || prove_identity(&s, DEFAULT_MAX_UNKNOWNS).unwrap())?;
    let p = proof_of(o)?;
    let c = p.certificate.p.coeffs();
    ensure(c.len() == 2 && c[1].is_constant() && !c[1].is_zero(), || {
        format!("P = {}", p.certificate.p.render("N"))
    })?;
    let lambda = c[1].constant_value().unwrap();
    ensure(c[0] == MultiPoly::constant(s.lhs.universe(), -&lambda * rat(2)), || {
        format!("P = {} is not a multiple of N - 2", p.certificate.p.render("N"))
    })?;
    let want = parse_rational("-k/(n - k + 1)", s.lhs.universe()).unwrap();
    ensure(p.certificate.r[0].scale(&lambda.recip()) == want, || {
        format!("R = {}", p.certificate.r[0].render())
    })?;
    ensure(verify(&s.lhs, &p.certificate).unwrap().valid, || "verify".into())?;
    let report = numeric_check(&s, 0..=20, &Env::default()).unwrap();
    for (n, l, r) in &report.rows {
        let direct: BigInt = (0..=*n).map(|k| binom(*n, k)).sum();
        let two = pow(&rat(2), *n);
        ensure(constant(l) == big(direct.clone()) && constant(r) == two && big(direct) == pow(&rat(2), *n), || {
            format!("n = {n}")
        })?;
    }
    Ok(format!("P = {}, exact for n ≤ 20, {dt:.1?}", p.certificate.p.render("N")))
}

fn criterion_3() -> Check {
    let s = classical("binomial_squares");
    let (o, dt) = timed(Duration::from_secs(10), "prove", || prove_identity(&s, DEFAULT_MAX_UNKNOWNS).unwrap())?;
    let p = proof_of(o)?;
    let u = s.lhs.universe().clone();
    for n in 0..=30i64 {
        let mut point = vec![BigRational::zero(); u.len()];
        point[0] = rat(n);
        let mut acc = BigRational::zero();
        for (a, c) in p.certificate.p.coeffs().iter().enumerate() {
            let m = n + a as i64;
            acc += c.eval(&point) * big(binom(2 * m, m));
        }
        ensure(acc.is_zero(), || format!("recurrence fails on C(2n, n) at n = {n}"))?;
    }
    Ok(format!(
        "P = {} annihilates C(2n, n) for n ≤ 30, {dt:.1?}",
        p.certificate.p.render("N")
    ))
}

fn criterion_4() -> Check {
    let s = classical("double_sum");
    let (o, dt) = timed(Duration::from_secs(30), "prove", || prove_identity(&s, DEFAULT_MAX_UNKNOWNS).unwrap())?;
    let p = proof_of(o)?;
    ensure(p.certificate.r.len() == 2 && p.certificate.r.iter().all(|r| !r.is_zero()), || {
        "expected two nonzero certificates".into()
    })?;
    ensure(p.verdict.valid, || p.verdict.trace.clone())?;
    let report = numeric_check(&s, 0..=15, &Env::default()).unwrap();
    for (n, l, r) in &report.rows {
        let direct: BigInt = (0..=*n)
            .flat_map(|j| (0..=j).map(move |k| binom(*n, j) * binom(j, k)))
            .sum();
        let three = pow(&rat(3), *n);
        ensure(big(direct.clone()) == three && constant(l) == three && constant(r) == three, || {
            format!("n = {n}")
        })?;
    }
    Ok(format!("P = {}, two certificates, exact for n ≤ 15, {dt:.1?}", p.certificate.p.render("N")))
}

fn q_binomial_oracle(n: i64, qv: &BigRational, z: &BigRational) -> (BigRational, BigRational) {
    let qb = |n: i64, k: i64| -> BigRational {
        let mut acc = BigRational::one();
        for i in 0..k {
            acc = acc * (BigRational::one() - pow(qv, n - i)) / (BigRational::one() - pow(qv, i + 1));
        }
        acc
    };
    let sum = (0..=n).fold(BigRational::zero(), |acc, k| {
        acc + qb(n, k) * pow(qv, k * (k - 1) / 2) * pow(z, k)
    });
    let prod = (0..n).fold(BigRational::one(), |acc, i| acc * (BigRational::one() + z * pow(qv, i)));
    (sum, prod)
}

fn criterion_5() -> Check {
    let s = q_statement("q_binomial");
    let (o, dt) = timed(Duration::from_secs(30), "prove", || prove_identity(&s, DEFAULT_MAX_UNKNOWNS).unwrap())?;
    let p = proof_of(o)?;
    ensure(p.verdict.valid, || p.verdict.trace.clone())?;
    let u = s.lhs.universe().clone();
    let c = p.certificate.p.coeffs();
    ensure(c.len() == 2, || format!("order {}", c.len().saturating_sub(1)))?;
    let qn = RatFun::var(&u, u.index_of("q^n").ok_or("no q^n")?);
    let z = RatFun::var(&u, u.index_of("z").ok_or("no z")?);
    let want = &RatFun::one(&u) + &(&z * &qn);
    let ratio = &-&RatFun::from_poly(c[0].clone()) / &RatFun::from_poly(c[1].clone());
    ensure(ratio == want, || format!("f(n+1)/f(n) = {}", ratio.render()))?;
    let qv = q(2, 3);
    for zv in [rat(1), q(5, 7)] {
        let env = Env::default().with_q(qv.clone()).with_param("z", zv.clone());
        let report = numeric_check(&s, 0..=12, &env).unwrap();
        for (n, l, r) in &report.rows {
            let (sum, prod) = q_binomial_oracle(*n, &qv, &zv);
            ensure(sum == prod && constant(l) == sum && constant(r) == prod, || {
                format!("z = {zv}, n = {n}")
            })?;
        }
    }
    Ok(format!("f(n+1) = ({}) f(n), exact at q = 2/3, z ∈ {{1, 5/7}}, n ≤ 12, {dt:.1?}", want.render()))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = wzcert_cli::run(std::iter::once("wzcert").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn criterion_6() -> Check {
    let mut certs: Vec<(String, AnyCertificate)> = Vec::new();
    for name in ["binomial_sum", "binomial_squares", "double_sum", "wz_binomial"] {
        let c = creative_telescope(&classical(name).lhs, DEFAULT_MAX_UNKNOWNS).map_err(|e| e.to_string())?;
        certs.push((name.into(), AnyCertificate::Classical(c)));
    }
    let c = creative_telescope(&q_statement("q_binomial").lhs, DEFAULT_MAX_UNKNOWNS).map_err(|e| e.to_string())?;
    certs.push(("q_binomial".into(), AnyCertificate::Q(c)));
    for (name, x) in [("hille_hardy", "x"), ("hille_hardy_y", "y")] {
        certs.push((name.into(), AnyCertificate::Classical(hille_hardy_expected(name, x))));
    }
    let mut count = 0;
    for (name, any) in &certs {
        macro_rules! check {
            ($c:expr) => {{
                let c = $c;
                ensure(verify(&c.term, c).unwrap().valid, || format!("{name}: unperturbed"))?;
                for slot in 0..c.r.len() + c.s.len() {
                    let v = verify(&c.term, &bump(c, slot)).unwrap();
                    ensure(!v.valid && !v.residual.is_zero(), || format!("{name}: slot {slot} accepted"))?;
                    count += 1;
                }
            }};
        }
        match any {
            AnyCertificate::Classical(c) => check!(c),
            AnyCertificate::Q(c) => check!(c),
        }
    }
    let dir = std::env::temp_dir().join(format!("wzcert-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let wrong = dir.join("wrong.id");
    std::fs::copy(fixture_path("wrong.id"), &wrong).unwrap();
    let (code, out, _) = cli(&["prove", wrong.to_str().unwrap()]);
    let _ = std::fs::remove_dir_all(&dir);
    ensure(code == 1 && out.starts_with("refuted at n = 0"), || format!("wrong.id: exit {code}, {out}"))?;
    Ok(format!("{count} perturbed certificates rejected; 2^n + 1 refuted at n = 0 with exit 1"))
}

fn run_property<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<String, String> {
    let mut runner = TestRunner::new(Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))?;
    Ok(format!("{name} 100/100"))
}

fn hyper(text: &str) -> HyperTerm {
    match parse(text).unwrap() {
        Statement::Classical(s) => s.lhs,
        Statement::Q(_) => unreachable!(),
    }
}

fn criterion_7() -> Check {
    let mut notes = Vec::new();

    // N^a K^b D^d F / F against values, with D_y F(n, k) = (k/y + c) F(n, k)
    notes.push(run_property(
        "quotients",
        (0i64..=2, 1i64..=3, 1i64..=3, -2i64..=2, 0u32..=2, 0u32..=2, 0u32..=1, 0i64..=4, 0i64..=3, 1i64..=9),
        |(b, p, r, c, a, s, d, n0, k0, y0)| {
            let f = hyper(&format!(
                "param none;\nsum(k) int(y) binom(n + {b}, k) * ({p}/{r})^k * y^k * exp({c}*y);\n"
            ));
            let w = Word { outer: a, shifts: vec![s], diffs: vec![d] };
            let quotient = Summand::word_quotient(&f, &w);
            let y = q(y0, 3);
            let value = |n: i64, k: i64| {
                f.eval_named(&[("n", rat(n)), ("k", rat(k)), ("y", y.clone())]).unwrap().cofactor.constant_value().unwrap()
            };
            let base = value(n0, k0);
            prop_assume!(!base.is_zero());
            let mut want = value(n0 + a as i64, k0 + s as i64) / base;
            if d == 1 {
                want *= q(k0 + s as i64, 1) / &y + rat(c);
            }
            let mut point = vec![BigRational::zero(); f.universe().len()];
            point[f.var_index("n").unwrap()] = rat(n0);
            point[f.var_index("k").unwrap()] = rat(k0);
            point[f.var_index("y").unwrap()] = y.clone();
            prop_assert_eq!(quotient.eval(&point).unwrap(), want);
            Ok(())
        },
    )?);

    // nullspace of a rank-deficient product against the rank at a point
    let u = Universe::new(["a"]);
    let uu = u.clone();
    notes.push(run_property(
        "nullspace",
        (1usize..=3, 1usize..=2, 2usize..=4).prop_flat_map(|(rows, inner, cols)| {
            (
                prop::collection::vec(prop::collection::vec((-3i64..=3, -3i64..=3), inner), rows),
                prop::collection::vec(prop::collection::vec((-3i64..=3, -3i64..=3), cols), inner),
            )
        }),
        move |(left, right)| {
            let u = &uu;
            let lin = |(c0, c1): (i64, i64)| {
                MultiPoly::from_terms(u, [(Monomial::one(1), rat(c0)), (Monomial::var(1, 0, 1), rat(c1))])
            };
            let rows = left.len();
            let cols = right[0].len();
            let entries: Vec<Vec<MultiPoly>> = (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| {
                            (0..right.len()).fold(MultiPoly::zero(u), |acc, t| &acc + &(&lin(left[i][t]) * &lin(right[t][j])))
                        })
                        .collect()
                })
                .collect();
            let m = SymMatrix::new(u, entries).unwrap();
            let basis = nullspace(&m);
            for v in &basis {
                prop_assert!(m.mul_vec(v).iter().all(MultiPoly::is_zero));
            }
            let rank = [q(7, 3), q(-11, 5), q(13, 2)].iter().map(|x| rank_of(m.eval(&[x.clone()]))).max().unwrap();
            prop_assert_eq!(basis.len(), cols - rank);
            Ok(())
        },
    )?);

    // T = P + sum (K - 1) T_i
    let uo = Universe::new(["n", "k"]);
    notes.push(run_property(
        "decomposition",
        prop::collection::vec((0u32..=2, 0u32..=2, -4i64..=4, -4i64..=4, 0u32..=2), 1..=6),
        move |terms| {
            let u = &uo;
            let op = OreOperator::from_terms(
                u,
                1,
                0,
                terms.iter().map(|&(a, b, c0, c1, e)| {
                    let coeff = MultiPoly::from_terms(
                        u,
                        [(Monomial::one(2), rat(c0)), (Monomial::from_exponents(vec![e, 1]), rat(c1))],
                    );
                    (Word { outer: a, shifts: vec![b], diffs: vec![] }, coeff)
                }),
            );
            prop_assert_eq!(decompose(&op).recompose(1, 0), op);
            Ok(())
        },
    )?);

    // finder output verifies, before and after the file format
    notes.push(run_property(
        "prove/verify",
        prop_oneof![
            (0i64..=3, -3i64..=3, 1i64..=3)
                .prop_filter("nonzero", |(_, p, _)| *p != 0)
                .prop_map(|(b, p, r)| format!("binom(n + {b}, k) * ({p}/{r})^k")),
            (0i64..=2, 1i64..=3).prop_map(|(b, c)| format!("binom(n + {b}, k) * (k + {c})")),
            (0i64..=2).prop_map(|b| format!("binom(n, k) * binom(n + {b}, k)")),
        ],
        |body| {
            let f = hyper(&format!("param none;\nsum(k) {body};\n"));
            let c = creative_telescope(&f, DEFAULT_MAX_UNKNOWNS).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(verify(&f, &c).unwrap().valid);
            let any = AnyCertificate::Classical(c);
            let back = read_certificate(&write_certificate(&any)).unwrap();
            prop_assert_eq!(&back, &any);
            let AnyCertificate::Classical(back) = back else { unreachable!() };
            prop_assert!(verify(&f, &back).unwrap().valid);
            Ok(())
        },
    )?);

    // rendered statements parse back to the same statement
    notes.push(run_property(
        "dsl",
        (0i64..=3, 1i64..=4, -3i64..=3, prop::sample::select(vec!["binom", "qbin"])),
        |(b, z, c, f)| {
            let text = if f == "binom" {
                format!("param a;\nsum(k) binom(n + {b}, k) * {z}^k * (k + a)/(k + {}) = {c};\n", b + 1)
            } else {
                format!("param a;\nqsum(k) qbin(n + {b}, k) * a^k * q^(k*(k - 1)/2) = qpoch(-a, n + {b}) + {c};\n")
            };
            let s = parse(&text).unwrap();
            let rendered = match &s {
                Statement::Classical(x) => render_statement(x),
                Statement::Q(x) => render_statement(x),
            };
            prop_assert_eq!(parse(&rendered).unwrap(), s);
            Ok(())
        },
    )?);
    Ok(notes.join(", "))
}

fn rank_of(mut m: Vec<Vec<BigRational>>) -> usize {
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

fn criterion_8() -> Check {
    let s = classical("wz_binomial");
    let f = s.lhs.clone();
    let g = parse_rational("-k/(2*(n - k + 1))", f.universe()).unwrap();
    let tuple = WZTuple { f: f.clone(), g: vec![g], h: vec![] };
    let v = verify_wz_tuple(&tuple).unwrap();
    ensure(v.valid, || v.trace.clone())?;

    let back = companions(&tuple, "n").map_err(|e| e.to_string())?;
    ensure(back.lhs == f, || "keep = n changed the summand".into())?;
    let source = render_statement(&IdentityStatement { lhs: f.clone(), rhs: s.rhs.clone() });
    let again = render_statement(&IdentityStatement { lhs: back.lhs.clone(), rhs: s.rhs.clone() });
    ensure(source == again, || format!("{source} vs {again}"))?;

    let comp = companions(&tuple, "k").map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for k0 in 0..=3i64 {
        let sums = partial_sums(&comp.lhs, k0, 40, &Env::default()).map_err(|e| e.to_string())?;
        // F(0, k) minus the limit of C(n, k)/2^n, which is 0
        let limit = if k0 == 0 { 1.0 } else { 0.0 };
        let vals: Vec<f64> = sums.iter().map(|x| constant(x).to_f64().unwrap()).collect();
        let tail = &vals[vals.len() - 20..];
        let monotone = tail.windows(2).all(|w| w[1] >= w[0]) || tail.windows(2).all(|w| w[1] <= w[0]);
        let err = (vals[40] - limit).abs();
        ensure(monotone && err < 1e-6, || format!("k = {k0}: monotone {monotone}, error {err:e}"))?;
        // the exact partial sums telescope to F(0, k) - F(N + 1, k)
        for (nn, x) in sums.iter().enumerate() {
            let want = big(if k0 == 0 { BigInt::one() } else { BigInt::zero() })
                - big(binom(nn as i64 + 1, k0)) / pow(&rat(2), nn as i64 + 1);
            ensure(constant(x) == want, || format!("k = {k0}, N = {nn}"))?;
        }
        notes.push(format!("k = {k0}: |S_40 - {limit}| = {err:.1e}"));
    }
    Ok(format!("WZ pair verifies, keep = n reproduces the summand, {}", notes.join("; ")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check); 8] = [
        (1, "Hille-Hardy certificates", criterion_1),
        (2, "sum of binomials", criterion_2),
        (3, "sum of squared binomials", criterion_3),
        (4, "double sum", criterion_4),
        (5, "q-binomial theorem", criterion_5),
        (6, "negative controls", criterion_6),
        (7, "property suites", criterion_7),
        (8, "WZ pair and companions", criterion_8),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let dt = t0.elapsed();
        match result {
            Ok(detail) => println!("criterion {n}: PASS {name} [{dt:.2?}] {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL {name} [{dt:.2?}] {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
