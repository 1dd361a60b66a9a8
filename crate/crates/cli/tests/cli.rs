//! The command line through `run`, with in-memory output and temporary
//! directories: exit codes, output formats, determinism, and files written
//! by `prove` passing `verify`.

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;
use wzcert_cli::{run, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK, EXIT_REFUTED};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wz(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wzcert").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Copies a fixture into a fresh directory so `prove` writes next to it.
fn staged(name: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::copy(fixture(name), &path).unwrap();
    (dir, path)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Adds 1 to the numerator of the first certificate in a certificate file.
fn bump_numerator(doc: &mut Value) {
    let certs = doc["certificates"].as_object_mut().unwrap();
    let first = certs.values_mut().next().unwrap();
    let width = doc_width(first);
    let num = first["num"].as_array_mut().unwrap();
    let zero: Vec<Value> = vec![Value::from(0); width];
    if let Some(t) = num.iter_mut().find(|t| t["exponents"].as_array().unwrap() == &zero) {
        let c: i64 = t["coeff"].as_str().unwrap().parse().unwrap();
        t["coeff"] = Value::from((c + 1).to_string());
    } else {
        num.push(serde_json::json!({ "exponents": zero, "coeff": "1" }));
    }
}

fn doc_width(entry: &Value) -> usize {
    entry["den"][0]["exponents"].as_array().unwrap().len()
}

#[test]
fn prove_writes_a_certificate_that_verifies() {
    let (_dir, id) = staged("binomial_sum.id");
    let o = wz(&["prove", s(&id)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("(P F)/F = Δ_k(R_k F)/F, where P = N - 2"), "{}", o.stdout);
    let cert = id.with_file_name("binomial_sum.cert.json");
    assert!(cert.exists());
    let v = wz(&["verify", s(&id), s(&cert)]);
    assert_eq!(v.code, EXIT_OK, "{}", v.stderr);
    assert_eq!(v.stdout.lines().count(), 2);
}

#[test]
fn out_flag_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = wz(&["prove", s(&fixture("q_binomial.id")), "--out", s(&cert), "--format", "json"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["mode"], "q");
    assert_eq!(v["verdict"]["valid"], true);
    assert!(v["verdict"]["trace"].as_str().unwrap().ends_with("≡ 0"));
    assert_eq!(v["proof"].as_str().unwrap().lines().count(), 2);
    // the document minus the verdict block is the certificate file
    let file: Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    let mut doc = v.clone();
    doc.as_object_mut().unwrap().remove("verdict");
    doc.as_object_mut().unwrap().remove("proof");
    assert_eq!(doc, file);
}

#[test]
fn wrong_identity_is_refuted_at_zero() {
    let (_dir, id) = staged("wrong.id");
    let o = wz(&["prove", s(&id)]);
    assert_eq!(o.code, EXIT_REFUTED);
    assert_eq!(o.stdout.trim(), "refuted at n = 0: left side 1, right side 2");
    assert!(!id.with_file_name("wrong.cert.json").exists());
    let c = wz(&["check", s(&id), "--range", "0..3"]);
    assert_eq!(c.code, EXIT_REFUTED);
    assert_eq!(c.stdout.lines().count(), 5, "{}", c.stdout);
}

#[test]
fn perturbed_certificate_is_invalid() {
    let (_dir, id) = staged("binomial_sum.id");
    assert_eq!(wz(&["prove", s(&id)]).code, EXIT_OK);
    let cert = id.with_file_name("binomial_sum.cert.json");
    let mut doc: Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    bump_numerator(&mut doc);
    std::fs::write(&cert, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    let o = wz(&["verify", s(&id), s(&cert)]);
    assert_eq!(o.code, EXIT_REFUTED);
    assert!(o.stdout.contains("≠ 0"), "{}", o.stdout);
}

#[test]
fn hille_hardy_files_verify() {
    for name in ["hille_hardy", "hille_hardy_y"] {
        let o = wz(&[
            "verify",
            s(&fixture(&format!("{name}.id"))),
            s(&fixture(&format!("{name}.cert.json"))),
        ]);
        assert_eq!(o.code, EXIT_OK, "{name}: {}{}", o.stdout, o.stderr);
    }
}

#[test]
fn certificate_for_another_term_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    assert_eq!(wz(&["prove", s(&fixture("binomial_sum.id")), "--out", s(&cert)]).code, EXIT_OK);
    let o = wz(&["verify", s(&fixture("binomial_squares.id")), s(&cert)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("mismatch"), "{}", o.stderr);
}

#[test]
fn companion_needs_a_wz_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    assert_eq!(wz(&["prove", s(&fixture("binomial_sum.id")), "--out", s(&cert)]).code, EXIT_OK);
    let o = wz(&["companion", s(&cert), "--keep", "n"]);
    assert_eq!(o.code, EXIT_NOT_FOUND);
    assert!(o.stderr.contains("not a WZ certificate"), "{}", o.stderr);

    let wzc = dir.path().join("wz.json");
    assert_eq!(wz(&["prove", s(&fixture("wz_binomial.id")), "--out", s(&wzc)]).code, EXIT_OK);
    let kept = wz(&["companion", s(&wzc), "--keep", "n"]);
    assert_eq!(kept.code, EXIT_OK, "{}", kept.stderr);
    let back = wzcert::dsl::parse(&kept.stdout).unwrap();
    let src = wzcert::dsl::parse(&std::fs::read_to_string(fixture("wz_binomial.id")).unwrap()).unwrap();
    let (wzcert::dsl::Statement::Classical(b), wzcert::dsl::Statement::Classical(a)) = (back, src) else {
        panic!("classical statements")
    };
    assert_eq!(b.lhs, a.lhs);
    let other = wz(&["companion", s(&wzc), "--keep", "k"]);
    assert_eq!(other.code, EXIT_OK, "{}", other.stderr);
    assert_eq!(wz(&["companion", s(&wzc), "--keep", "zz"]).code, EXIT_INPUT);
}

#[test]
fn check_with_assignments() {
    let id = fixture("q_binomial.id");
    let o = wz(&["check", s(&id), "--range", "0..8", "--assign", "z=5/7", "--assign", "q=2/3"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, "all equal\n");
    let missing = wz(&["check", s(&id), "--range", "0..3", "--assign", "q=2/3"]);
    assert_eq!(missing.code, EXIT_INPUT);
    assert_eq!(wz(&["check", s(&id), "--range", "3..1"]).code, EXIT_INPUT);
    assert_eq!(wz(&["check", s(&id), "--range", "0..3", "--assign", "w=1"]).code, EXIT_INPUT);
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.id");
    std::fs::write(&bad, "param none;\nsum(k) binom(n, k = 2^n;\n").unwrap();
    let o = wz(&["prove", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.starts_with("wzcert: "), "{}", o.stderr);
    assert!(o.stderr.contains(":2:"), "{}", o.stderr);
    assert_eq!(wz(&["prove", s(&dir.path().join("missing.id"))]).code, EXIT_INPUT);
    assert_eq!(wz(&["frobnicate"]).code, EXIT_INPUT);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"format_version\": 1}").unwrap();
    assert_eq!(wz(&["verify", s(&fixture("binomial_sum.id")), s(&junk)]).code, EXIT_INPUT);
}

#[test]
fn small_budget_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let o = wz(&[
        "prove",
        s(&fixture("binomial_squares.id")),
        "--max-unknowns",
        "2",
        "--out",
        s(&dir.path().join("c.json")),
    ]);
    assert_eq!(o.code, EXIT_NOT_FOUND, "{}{}", o.stdout, o.stderr);
}

fn identity() -> impl Strategy<Value = String> {
    prop_oneof![
        (0i64..=3, 1i64..=3, 1i64..=3).prop_map(|(b, p, r)| format!(
            "sum(k) binom(n + {b}, k) * ({p}/{r})^k = ({}/{r})^(n + {b});",
            r + p
        )),
        (0i64..=3).prop_map(|b| format!("sum(k) binom(n, k) * binom(n, k + {b}) = binom(2*n, n + {b});")),
        (1i64..=3).prop_map(|c| format!("sum(k) binom(n, k) * (k + {c}) = (n + 2*{c}) * 2^n/2;")),
        (2i64..=4).prop_map(|z| format!("qsum(k) qbin(n, k) * q^(k*(k - 1)/2) * {z}^k = qpoch(-{z}, n);")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn prove_is_deterministic_and_verifies(body in identity(), json in any::<bool>()) {
        let text = format!("param none;\n{body}\n");
        let runs: Vec<(Output, Vec<u8>)> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let id = dir.path().join("t.id");
                std::fs::write(&id, &text).unwrap();
                let mut args = vec!["prove", s(&id)];
                if json {
                    args.extend(["--format", "json"]);
                }
                let o = wz(&args);
                let cert = id.with_file_name("t.cert.json");
                let bytes = std::fs::read(&cert).unwrap_or_default();
                if o.code == EXIT_OK {
                    let v = wz(&["verify", s(&id), s(&cert)]);
                    assert_eq!(v.code, EXIT_OK, "{text}: {}", v.stdout);
                }
                (o, bytes)
            })
            .collect();
        let (a, b) = (&runs[0], &runs[1]);
        prop_assert_eq!(a.0.code, EXIT_OK, "{}: {}{}", text, a.0.stdout, a.0.stderr);
        prop_assert_eq!(&a.0.stdout, &b.0.stdout);
        prop_assert_eq!(&a.0.stderr, &b.0.stderr);
        prop_assert_eq!(&a.1, &b.1);
    }
}

#[test]
fn json_output_matches_the_schema_document() {
    let schema: Value = serde_json::from_slice(
        &std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/certificate.schema.json")).unwrap(),
    )
    .unwrap();
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |path: &str| {
        let mut k: Vec<String> = schema["$defs"][path]["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect();
        k.sort();
        k
    };
    let dir = tempfile::tempdir().unwrap();
    let o = wz(&["prove", s(&fixture("double_sum.id")), "--out", s(&dir.path().join("c.json")), "--format", "json"]);
    assert_eq!(o.code, EXIT_OK);
    let mut v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(keys(&v["verdict"]), required("verdict"));
    let obj = v.as_object_mut().unwrap();
    obj.remove("verdict");
    obj.remove("proof");
    assert_eq!(keys(&v), required("fields"));
    assert_eq!(keys(&v["certificates"]["j"]), required("rational"));
}
