//! Text and file round trips: expressions, whole statements, certificates.

mod common;

use common::*;
use proptest::prelude::*;
use wzcert::arith::MultiPoly;
use wzcert::certfile::{read_certificate, write_certificate, AnyCertificate};
use wzcert::dsl::{
    parse, parse_document, parse_expr, render_document, render_expr, Expr, ExprKind, Statement,
};
use wzcert::operator::{Summand, UniOperator};
use wzcert::telescope::TelescopeCertificate;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..=40).prop_map(Expr::num),
        prop::sample::select(vec!["x", "y", "z", "alpha", "w1"]).prop_map(Expr::var),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::new(ExprKind::Neg(b(a)))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::new(ExprKind::Add(b(x), b(y)))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::new(ExprKind::Sub(b(x), b(y)))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::new(ExprKind::Mul(b(x), b(y)))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::new(ExprKind::Div(b(x), b(y)))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::new(ExprKind::Pow(b(x), b(y)))),
            (
                prop::sample::select(vec!["f", "binom", "gamma"]),
                prop::collection::vec(inner, 1..=3)
            )
                .prop_map(|(f, args)| Expr::call(f, args)),
        ]
    })
}

fn factor() -> impl Strategy<Value = String> {
    prop_oneof![
        (1i64..=2, 0i64..=3).prop_map(|(a, c)| format!("binom({a}*n + {c}, k)")),
        (0i64..=3).prop_map(|c| format!("1/factorial(k + {c})")),
        (1i64..=3).prop_map(|c| format!("pochhammer(a + {c}, k)")),
        Just("gamma(a + n)/gamma(a + k)".to_string()),
        (2i64..=5).prop_map(|p| format!("(-1/{p})^k")),
        Just("a^k".to_string()),
        (1i64..=3).prop_map(|c| format!("(k + {c})/(n + a)")),
        Just("(1 - a)^(n - k)".to_string()),
    ]
}

fn q_factor() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=2).prop_map(|c| format!("qbin(n + {c}, k)")),
        Just("qpoch(z*q, k)".to_string()),
        Just("z^k".to_string()),
        prop::sample::select(vec![1i64, 3]).prop_map(|c| format!("q^(k*(k + {c})/2)")),
        (1i64..=2).prop_map(|c| format!("1/qpoch(q^({c}), k)")),
        Just("(1 - z*q^n)".to_string()),
    ]
}

fn statement_text() -> impl Strategy<Value = String> {
    prop_oneof![
        (prop::collection::vec(factor(), 1..=4), any::<bool>()).prop_map(|(f, rhs)| {
            let rhs = if rhs { " = 2^n*gamma(a + n)" } else { "" };
            format!("param a;\nsum(k) {}{rhs};\n", f.join(" * "))
        }),
        prop::collection::vec(q_factor(), 1..=3)
            .prop_map(|f| format!("param z;\nqsum(k) {} = qpoch(-z, n);\n", f.join(" * "))),
        prop::collection::vec(factor(), 1..=2).prop_map(|f| {
            format!("param a;\ncont y;\nouter n;\nsum(k) int(y) {} * y^k * exp(-y);\n", f.join(" * "))
        }),
    ]
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn expressions_survive_render_and_parse(e in expr_strategy()) {
        let text = render_expr(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn documents_survive_render_and_parse(text in statement_text()) {
        let doc = parse_document(&text).unwrap();
        let again = parse_document(&render_document(&doc)).unwrap();
        prop_assert_eq!(again, doc);
    }

    #[test]
    fn statements_survive_canonical_render(text in statement_text()) {
        let s = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        let canon = s.render();
        let back = parse(&canon).map_err(|err| TestCaseError::fail(format!("{canon}: {err}")))?;
        prop_assert_eq!(&back, &s, "{}\n->\n{}", text, canon);
        prop_assert_eq!(back.render(), canon);
    }
}

fn classical_term() -> wzcert::term::HyperTerm {
    let text = "param a;\ncont y;\nouter n;\nsum(k) int(y) binom(n, k) * y^k * a^k * exp(-y);\n";
    match parse(text).unwrap() {
        Statement::Classical(s) => s.lhs,
        _ => unreachable!(),
    }
}

fn q_term() -> wzcert::term::QHyperTerm {
    match parse("param z;\nqsum(k) qbin(n, k) * z^k;\n").unwrap() {
        Statement::Q(s) => s.lhs,
        _ => unreachable!(),
    }
}

fn cert_strategy<T: Summand + std::fmt::Debug + 'static>(term: T) -> impl Strategy<Value = TelescopeCertificate<T>> {
    let u = term.universe().clone();
    let (r, s) = (term.num_shifts(), term.num_diffs());
    let poly = poly_strategy(u.clone(), 2, 4);
    let den = nonzero_poly_strategy(u.clone(), 2, 3);
    (
        prop::collection::vec(poly.clone(), 1..=3),
        prop::collection::vec((poly, den), r + s),
    )
        .prop_map(move |(p, rs)| {
            let mut parts: Vec<_> = rs.into_iter().map(|(a, b)| ratfun(a, b)).collect();
            let s_part = parts.split_off(r);
            TelescopeCertificate {
                term: term.clone(),
                p: UniOperator::new(&u, p),
                r: parts,
                s: s_part,
            }
        })
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn classical_certificate_files_round_trip(c in cert_strategy(classical_term())) {
        let any = AnyCertificate::Classical(c);
        let bytes = write_certificate(&any);
        prop_assert_eq!(read_certificate(&bytes).unwrap(), any.clone());
        prop_assert_eq!(write_certificate(&read_certificate(&bytes).unwrap()), bytes);
    }

    #[test]
    fn q_certificate_files_round_trip(c in cert_strategy(q_term())) {
        let any = AnyCertificate::Q(c);
        let bytes = write_certificate(&any);
        prop_assert_eq!(read_certificate(&bytes).unwrap(), any);
    }
}

#[test]
fn zero_operator_round_trips() {
    let t = classical_term();
    let u = t.universe().clone();
    let c = TelescopeCertificate {
        p: UniOperator::new(&u, vec![MultiPoly::zero(&u)]),
        r: vec![ratfun(MultiPoly::zero(&u), MultiPoly::one(&u))],
        s: vec![ratfun(MultiPoly::one(&u), MultiPoly::one(&u))],
        term: t,
    };
    let any = AnyCertificate::Classical(c);
    assert_eq!(read_certificate(&write_certificate(&any)).unwrap(), any);
}
