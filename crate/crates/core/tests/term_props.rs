//! Derivative quotients against finite differences, word composition, and
//! vanishing outside the reported support box.

mod common;

use common::{config, q};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use wzcert::arith::{rat, MultiPoly, RatFun};
use wzcert::dsl::{parse, Statement};
use wzcert::operator::{Summand, Word};
use wzcert::term::{HyperTerm, QHyperTerm, Support};

fn classical(text: &str) -> HyperTerm {
    match parse(text).unwrap_or_else(|e| panic!("{text}: {e}")) {
        Statement::Classical(s) => s.lhs,
        Statement::Q(_) => panic!("expected a classical term"),
    }
}

fn mixed_factor() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=2).prop_map(|c| format!("binom(n + {c}, k)")),
        (1i64..=3).prop_map(|c| format!("1/factorial(k + {c})")),
        Just("y^k".to_string()),
        (-2i64..=2).prop_map(|c| format!("exp({c}*y)")),
        (1i64..=3).prop_map(|c| format!("(y + {c})^n")),
        (1i64..=2).prop_map(|c| format!("(1 + {c}*y)^(-k)")),
        Just("(y^2 + 1)/(y + 3)".to_string()),
        (1i64..=2).prop_map(|c| format!("exp(y^2/{c} - y/(y + 4))")),
    ]
}

fn mixed_term(parts: &[String]) -> HyperTerm {
    classical(&format!(
        "param none;\ncont y;\nouter n;\nsum(k) int(y) {} * exp(y/5);\n",
        parts.join(" * ")
    ))
}

/// `log|F|` difference between two points sharing the discrete values, as
/// `ln|c1/c0| + (e1 - e0)` from exact parts.
fn log_ratio(f: &HyperTerm, n0: i64, k0: i64, y1: &BigRational, y0: &BigRational) -> f64 {
    let v = |y: &BigRational| f.eval_named(&[("n", rat(n0)), ("k", rat(k0)), ("y", y.clone())]).unwrap();
    let (a, b) = (v(y1), v(y0));
    let ratio = (&a.cofactor / &b.cofactor).constant_value().unwrap().abs();
    let de = match (a.exp_arg, b.exp_arg) {
        (Some(x), Some(z)) => (&x - &z).constant_value().unwrap().to_f64().unwrap(),
        _ => 0.0,
    };
    ratio.to_f64().unwrap().ln() + de
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn derivative_quotient_matches_finite_differences(
        parts in prop::collection::vec(mixed_factor(), 1..=4),
        n0 in 2i64..=6,
        k0 in 0i64..=2,
        (yn, yd) in (1i64..=9, 2i64..=5),
    ) {
        let f = mixed_term(&parts);
        let y0 = q(yn, yd);
        let h = q(1, 1_000_000);
        let y = f.var_index("y").unwrap();
        let assign = [
            (f.var_index("n").unwrap(), rat(n0)),
            (f.var_index("k").unwrap(), rat(k0)),
            (y, y0.clone()),
        ];
        let Ok(exact) = f.derivative_quotient(y).unwrap().partial_eval(&assign) else {
            return Ok(());
        };
        let exact = exact.constant_value().unwrap().to_f64().unwrap();
        let c0 = f.eval_named(&[("n", rat(n0)), ("k", rat(k0)), ("y", y0.clone())]).unwrap();
        prop_assume!(!c0.cofactor.is_zero());
        let fd = log_ratio(&f, n0, k0, &(&y0 + &h), &(&y0 - &h)) / 2e-6;
        let tol = 1e-4 * exact.abs().max(1.0);
        prop_assert!((fd - exact).abs() <= tol, "{:?}: exact {} vs difference {}", parts, exact, fd);
    }
}

#[derive(Clone, Copy, Debug)]
enum Letter {
    N,
    K,
    D,
}

fn shift_map(f: &HyperTerm, name: &str) -> Vec<(usize, MultiPoly)> {
    let u = f.universe();
    let v = f.var_index(name).unwrap();
    vec![(v, &MultiPoly::var(u, v) + &MultiPoly::one(u))]
}

/// `(L (g F)) / F` from `g` and the single-letter quotients.
fn apply_letter(f: &HyperTerm, g: &RatFun, l: Letter) -> RatFun {
    match l {
        Letter::N => {
            let w = Word { outer: 1, shifts: vec![0], diffs: vec![0] };
            &g.substitute(&shift_map(f, "n")).unwrap() * &Summand::word_quotient(f, &w)
        }
        Letter::K => {
            let w = Word { outer: 0, shifts: vec![1], diffs: vec![0] };
            &g.substitute(&shift_map(f, "k")).unwrap() * &Summand::word_quotient(f, &w)
        }
        Letter::D => {
            let y = f.var_index("y").unwrap();
            &g.derivative(y) + &(g * &f.derivative_quotient(y).unwrap())
        }
    }
}

fn word_of(letters: &[Letter]) -> Word {
    let mut w = Word { outer: 0, shifts: vec![0], diffs: vec![0] };
    for l in letters {
        match l {
            Letter::N => w.outer += 1,
            Letter::K => w.shifts[0] += 1,
            Letter::D => w.diffs[0] += 1,
        }
    }
    w
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::N), Just(Letter::K), Just(Letter::D)]
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn word_quotients_compose(
        parts in prop::collection::vec(mixed_factor(), 1..=3),
        w1 in prop::collection::vec(letter(), 0..=2),
        w2 in prop::collection::vec(letter(), 0..=2),
    ) {
        let f = mixed_term(&parts);
        let inner = Summand::word_quotient(&f, &word_of(&w2));
        let mut composed = inner;
        for &l in w1.iter().rev() {
            composed = apply_letter(&f, &composed, l);
        }
        let mut all = w1.clone();
        all.extend(&w2);
        prop_assert_eq!(Summand::word_quotient(&f, &word_of(&all)), composed, "{:?} {:?} {:?}", parts, w1, w2);
    }
}

fn compact_factor() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=3, 0i64..=2).prop_map(|(c, e)| format!("binom(n + {c}, k + {e})")),
        (0i64..=3).prop_map(|c| format!("binom(n, j) * binom(j + {c}, k)")),
        (0i64..=2).prop_map(|c| format!("1/factorial(n - k - j + {c})")),
        (1i64..=3).prop_map(|c| format!("1/factorial(k + {c})")),
        (2i64..=4).prop_map(|z| format!("{z}^(k + j)")),
        Just("(k + j + 1)".to_string()),
    ]
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn terms_vanish_outside_their_support_box(
        parts in prop::collection::vec(compact_factor(), 1..=3),
        n0 in 0i64..=8,
        pts in prop::collection::vec((-15i64..=25, -15i64..=25), 4),
    ) {
        let f = classical(&format!("param none;\nsum(j, k) {} * binom(n, j) * binom(n + j, k);\n", parts.join(" * ")));
        let support = f.support_bounds(n0);
        let Support::Box(b) = &support else {
            return Err(TestCaseError::fail("compact term reported as not compact"));
        };
        let (jv, kv) = (f.var_index("j").unwrap(), f.var_index("k").unwrap());
        for (j, k) in pts {
            let mut point = [0i64; 2];
            point[jv - 1] = j;
            point[kv - 1] = k;
            if support.contains(&point) {
                continue;
            }
            let v = f.eval_named(&[("n", rat(n0)), ("j", rat(j)), ("k", rat(k))]).unwrap();
            prop_assert!(v.cofactor.is_zero(), "{:?} at n={}, j={}, k={} outside {:?}", parts, n0, j, k, b);
        }
    }

    #[test]
    fn q_terms_vanish_outside_their_support_box(
        c in 0i64..=2,
        extra in prop::sample::select(vec!["", " * qpoch(q^(k + 1), n)", " * 3^k"]),
        n0 in 0i64..=6,
        k in -10i64..=15,
    ) {
        let text = format!("param none;\nqsum(k) qbin(n + {c}, k){extra};\n");
        let f: QHyperTerm = match parse(&text).unwrap() {
            Statement::Q(s) => s.lhs,
            _ => unreachable!(),
        };
        let support = f.support_bounds(n0);
        prop_assume!(!support.contains(&[k]));
        let v = f.eval_at(&[n0, k], &q(2, 3), &[]).unwrap();
        prop_assert!(v.is_zero(), "{} at n={}, k={}", text, n0, k);
    }
}
