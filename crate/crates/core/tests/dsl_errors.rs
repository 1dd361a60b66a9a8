//! Every rejected input is reported at a position inside that input, with
//! line and column matching the byte offset.

mod common;

use common::*;
use proptest::prelude::*;
use wzcert::dsl::parse;

const SOURCES: &[&str] = &[
    "binomial_sum",
    "binomial_squares",
    "double_sum",
    "q_binomial",
    "hille_hardy",
    "wrong",
];

#[derive(Clone, Debug)]
enum Edit {
    Delete { at: usize, len: usize },
    Insert { at: usize, text: &'static str },
    Replace { at: usize, text: &'static str },
}

fn edit() -> impl Strategy<Value = Edit> {
    let snippets = prop::sample::select(vec![
        "(", ")", "*", "/", "^", ";", "=", ",", "@", "#", "\n", " ", "k", "q", "binom(", "qbin(",
        "gamma(", "sum(k)", "qsum(k)", "int(u)", "param", "cont", "outer", "let", "1/0", "0", "-",
        "1/2", "n + ", "é", "exp(", "factorial(k", "))", "param none;",
    ]);
    prop_oneof![
        (any::<usize>(), 1usize..=6).prop_map(|(at, len)| Edit::Delete { at, len }),
        (any::<usize>(), snippets.clone()).prop_map(|(at, text)| Edit::Insert { at, text }),
        (any::<usize>(), snippets).prop_map(|(at, text)| Edit::Replace { at, text }),
    ]
}

fn boundary(s: &str, at: usize) -> usize {
    let mut i = at % (s.len() + 1);
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

fn apply(s: &str, e: &Edit) -> String {
    let mut out = s.to_string();
    match e {
        Edit::Delete { at, len } => {
            let a = boundary(s, *at);
            let b = boundary(s, (a + len).min(s.len()));
            out.replace_range(a..b.max(a), "");
        }
        Edit::Insert { at, text } => out.insert_str(boundary(s, *at), text),
        Edit::Replace { at, text } => {
            let a = boundary(s, *at);
            let b = boundary(s, (a + 1).min(s.len()));
            out.replace_range(a..b.max(a), text);
        }
    }
    out
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn rejections_carry_a_span_inside_the_input(
        source in prop::sample::select(SOURCES),
        edits in prop::collection::vec(edit(), 1..=3),
    ) {
        let mut text = fixture_text(source);
        for e in &edits {
            text = apply(&text, e);
        }
        if let Err(err) = parse(&text) {
            let sp = err.span;
            prop_assert!(sp.start <= sp.end && sp.end <= text.len(), "{:?} in {:?}", sp, text);
            prop_assert!(text.is_char_boundary(sp.start), "{:?}", sp);
            let before = &text[..sp.start];
            let line = before.matches('\n').count() + 1;
            let line_start = before.rfind('\n').map_or(0, |i| i + 1);
            let column = text[line_start..sp.start].chars().count() + 1;
            prop_assert_eq!((sp.line, sp.column), (line, column), "{:?}: {}", text, err.message);
            prop_assert!(!err.message.is_empty());
        }
    }

    #[test]
    fn garbage_is_rejected_with_a_span(bytes in prop::collection::vec(any::<char>(), 0..40)) {
        let text: String = bytes.into_iter().collect();
        if let Err(err) = parse(&text) {
            prop_assert!(err.span.start <= err.span.end && err.span.end <= text.len());
            prop_assert!(text.is_char_boundary(err.span.start));
        }
    }
}
