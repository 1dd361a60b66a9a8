//! The `wzcert` command line: prove, verify, companion and check.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wzcert::arith::RatFun;
use wzcert::certfile::{
    encode_polynomial, read_certificate, write_certificate, AnyCertificate,
};
use wzcert::certify::{verify, Verdict};
use wzcert::dsl::{parse_rational, parse_with, render_statement, DslTerm, Statement};
use wzcert::identity::{
    companions, numeric_check, prove_identity, wz_from_certificate, Env, IdentityError,
    IdentityStatement, IdentityTerm, Outcome,
};
use wzcert::telescope::{TelescopeCertificate, DEFAULT_MAX_UNKNOWNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wzcert", version, about = "Prove and verify hypergeometric identities with rational certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a certificate for the left side and prove or refute the identity.
    Prove {
        file: PathBuf,
        /// Treat the input as a q-sum.
        #[arg(long)]
        q: bool,
        /// Largest ansatz tried (number of unknown coefficients).
        #[arg(long)]
        max_unknowns: Option<usize>,
        /// Certificate path; defaults to the input with `.cert.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a certificate file against the left side of an identity file.
    Verify { idfile: PathBuf, certfile: PathBuf },
    /// Print the companion identity obtained by keeping one variable.
    Companion {
        certfile: PathBuf,
        #[arg(long)]
        keep: String,
    },
    /// Compare both sides exactly over a range of outer values.
    Check {
        idfile: PathBuf,
        /// Inclusive range `a..b`.
        #[arg(long)]
        range: String,
        /// Parameter values `sym=rat`, e.g. `z=5/7` or `q=2/3`.
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
}

/// Failure with an exit code and a diagnostic for stderr.
struct Fail(i32, String);

fn input(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INPUT, msg.into())
}

fn read_text(p: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))
}

fn read_statement(p: &Path, force_q: bool) -> Result<Statement, Fail> {
    let text = read_text(p)?;
    parse_with(&text, force_q).map_err(|e| input(format!("{}:{e}", p.display())))
}

fn read_cert(p: &Path) -> Result<AnyCertificate, Fail> {
    let bytes = std::fs::read(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
    read_certificate(&bytes).map_err(|e| input(format!("{}: {e}", p.display())))
}

fn identity_fail(e: IdentityError) -> Fail {
    match e {
        IdentityError::Term(_) | IdentityError::UnknownVariable(_) | IdentityError::Unassigned(_) => {
            input(e.to_string())
        }
        IdentityError::ZeroRhs => input(e.to_string()),
        _ => Fail(EXIT_NOT_FOUND, e.to_string()),
    }
}

fn max_unknowns(flag: Option<usize>) -> Result<usize, Fail> {
    if let Some(u) = flag {
        return Ok(u);
    }
    match std::env::var("TELESCOPE_MAX_UNKNOWNS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input(format!("TELESCOPE_MAX_UNKNOWNS: not a number: {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_UNKNOWNS),
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "valid": v.valid,
        "vacuous": v.vacuous,
        "residual": encode_polynomial(&v.residual),
        "denominators": v.denominators.iter().map(encode_polynomial).collect::<Vec<_>>(),
        "trace": v.trace,
    })
}

fn cert_json(c: &AnyCertificate) -> Value {
    serde_json::to_value(c.to_doc()).expect("serializable")
}

fn default_out(file: &Path) -> PathBuf {
    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "certificate".into());
    file.with_file_name(format!("{stem}.cert.json"))
}

fn write_file(p: &Path, bytes: &[u8]) -> Result<(), Fail> {
    std::fs::write(p, bytes).map_err(|e| input(format!("{}: {e}", p.display())))
}

struct Proved {
    cert: AnyCertificate,
    text: String,
    verdict: Verdict,
}

enum Found {
    Proved(Proved),
    Refuted { outer: String, at: i64, lhs: RatFun, rhs: RatFun },
}

fn prove_generic<T: IdentityTerm + DslTerm>(
    stmt: &IdentityStatement<T>,
    budget: usize,
    wrap: fn(TelescopeCertificate<T>) -> AnyCertificate,
) -> Result<Found, Fail> {
    match prove_identity(stmt, budget).map_err(identity_fail)? {
        Outcome::Proof(p) => {
            let p = *p;
            Ok(Found::Proved(Proved {
                text: p.text,
                verdict: p.verdict,
                cert: wrap(p.certificate),
            }))
        }
        Outcome::RecurrenceOnly(cert, rec) => {
            let verdict = verify(&cert.term, &cert).expect("certificate matches its term");
            let op = cert.term.outer_operator_name();
            let first = verdict.trace.lines().next().unwrap_or_default().to_string();
            let text = format!(
                "{first}\nSumming gives ({}) f = 0 for {}; no right side to compare.",
                rec.p.render(&op),
                rec.subject
            );
            Ok(Found::Proved(Proved {
                text,
                verdict,
                cert: wrap(*cert),
            }))
        }
        Outcome::Refutation { outer, lhs, rhs } => Ok(Found::Refuted {
            outer: stmt.outer(),
            at: outer,
            lhs,
            rhs,
        }),
        Outcome::NotFound(msg) => Err(Fail(EXIT_NOT_FOUND, format!("not proved: {msg}"))),
    }
}

fn cmd_prove(
    file: &Path,
    q: bool,
    budget: Option<usize>,
    out_path: Option<&Path>,
    format: Format,
    out: &mut String,
) -> Result<i32, Fail> {
    let budget = max_unknowns(budget)?;
    let stmt = read_statement(file, q)?;
    let found = match &stmt {
        Statement::Classical(s) => prove_generic(s, budget, AnyCertificate::Classical)?,
        Statement::Q(s) => prove_generic(s, budget, AnyCertificate::Q)?,
    };
    match found {
        Found::Proved(p) => {
            let path = out_path.map(Path::to_path_buf).unwrap_or_else(|| default_out(file));
            write_file(&path, &write_certificate(&p.cert))?;
            match format {
                Format::Text => {
                    out.push_str(&p.text);
                    out.push('\n');
                }
                Format::Json => {
                    let mut v = cert_json(&p.cert);
                    v["verdict"] = verdict_json(&p.verdict);
                    v["proof"] = Value::String(p.text);
                    out.push_str(&serde_json::to_string_pretty(&v).expect("json"));
                    out.push('\n');
                }
            }
            Ok(EXIT_OK)
        }
        Found::Refuted { outer, at, lhs, rhs } => {
            match format {
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "refuted at {outer} = {at}: left side {}, right side {}",
                        lhs.render(),
                        rhs.render()
                    );
                }
                Format::Json => {
                    let v = json!({
                        "refuted": { "outer": outer, "at": at, "lhs": lhs.render(), "rhs": rhs.render() }
                    });
                    out.push_str(&serde_json::to_string_pretty(&v).expect("json"));
                    out.push('\n');
                }
            }
            Ok(EXIT_REFUTED)
        }
    }
}

fn verify_generic<T: IdentityTerm + DslTerm>(
    stmt: &IdentityStatement<T>,
    cert: &TelescopeCertificate<T>,
    out: &mut String,
) -> Result<i32, Fail> {
    if stmt.lhs != cert.term {
        return Err(input(
            "term/certificate mismatch: the certificate is for another term",
        ));
    }
    let v = verify(&stmt.lhs, cert).map_err(|e| input(e.to_string()))?;
    out.push_str(&v.trace);
    out.push('\n');
    Ok(if v.valid { EXIT_OK } else { EXIT_REFUTED })
}

fn cmd_verify(idfile: &Path, certfile: &Path, out: &mut String) -> Result<i32, Fail> {
    let cert = read_cert(certfile)?;
    let stmt = read_statement(idfile, cert.is_q())?;
    match (&stmt, &cert) {
        (Statement::Classical(s), AnyCertificate::Classical(c)) => verify_generic(s, c, out),
        (Statement::Q(s), AnyCertificate::Q(c)) => verify_generic(s, c, out),
        _ => Err(input("term/certificate mismatch: classical and q")),
    }
}

fn companion_generic<T: IdentityTerm + DslTerm>(
    cert: &TelescopeCertificate<T>,
    keep: &str,
    out: &mut String,
) -> Result<i32, Fail> {
    let Some(t) = wz_from_certificate(cert) else {
        return Err(Fail(
            EXIT_NOT_FOUND,
            format!(
                "not a WZ certificate: P = {} is not a unit multiple of {}",
                cert.p.render(&cert.term.outer_operator_name()),
                if cert.term.outer_is_continuous() { "D" } else { "N - 1" }
            ),
        ));
    };
    let stmt = companions(&t, keep).map_err(|e| match e {
        IdentityError::UnknownVariable(_) => input(e.to_string()),
        e => identity_fail(e),
    })?;
    out.push_str(&render_statement(&stmt));
    Ok(EXIT_OK)
}

fn cmd_companion(certfile: &Path, keep: &str, out: &mut String) -> Result<i32, Fail> {
    match read_cert(certfile)? {
        AnyCertificate::Classical(c) => companion_generic(&c, keep, out),
        AnyCertificate::Q(c) => companion_generic(&c, keep, out),
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), Fail> {
    let bad = || input(format!("--range: expected a..b, found {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b || a < 0 {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_env(assign: &[String]) -> Result<Env, Fail> {
    let mut env = Env::default();
    let u = wzcert::arith::Universe::new(Vec::<String>::new());
    for a in assign {
        let (k, v) = a
            .split_once('=')
            .ok_or_else(|| input(format!("--assign: expected sym=rat, found {a:?}")))?;
        let value = parse_rational(v.trim(), &u)
            .ok()
            .and_then(|r| r.constant_value())
            .ok_or_else(|| input(format!("--assign: not a rational number: {v:?}")))?;
        let k = k.trim();
        if k == "q" {
            env.q = Some(value);
        } else {
            env.params.insert(k.to_string(), value);
        }
    }
    Ok(env)
}

fn check_generic<T: IdentityTerm>(
    stmt: &IdentityStatement<T>,
    range: (i64, i64),
    env: &Env,
    out: &mut String,
) -> Result<i32, Fail> {
    let known: Vec<String> = stmt.lhs.param_names();
    for k in env.params.keys() {
        if !known.contains(k) {
            return Err(input(format!("--assign: {k} is not a parameter")));
        }
    }
    let report = numeric_check(stmt, range.0..=range.1, env).map_err(|e| match e {
        IdentityError::NotCompact { .. } | IdentityError::Unsupported(_) => input(e.to_string()),
        e => identity_fail(e),
    })?;
    let bad = report.mismatches();
    if bad.is_empty() {
        out.push_str("all equal\n");
        return Ok(EXIT_OK);
    }
    let outer = stmt.outer();
    let _ = writeln!(out, "{outer}\tleft\tright");
    for (n, l, r) in &report.rows {
        if l != r {
            let _ = writeln!(out, "{n}\t{}\t{}", l.render(), r.render());
        }
    }
    Ok(EXIT_REFUTED)
}

fn cmd_check(idfile: &Path, range: &str, assign: &[String], out: &mut String) -> Result<i32, Fail> {
    let range = parse_range(range)?;
    let env = parse_env(assign)?;
    match read_statement(idfile, false)? {
        Statement::Classical(s) => check_generic(&s, range, &env, out),
        Statement::Q(s) => check_generic(&s, range, &env, out),
    }
}

/// Runs one command; output goes to the writers, the exit code is returned.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut out = String::new();
    let result = match &cli.command {
        Command::Prove {
            file,
            q,
            max_unknowns,
            out: out_path,
            format,
        } => cmd_prove(file, *q, *max_unknowns, out_path.as_deref(), *format, &mut out),
        Command::Verify { idfile, certfile } => cmd_verify(idfile, certfile, &mut out),
        Command::Companion { certfile, keep } => cmd_companion(certfile, keep, &mut out),
        Command::Check {
            idfile,
            range,
            assign,
        } => cmd_check(idfile, range, assign, &mut out),
    };
    let _ = stdout.write_all(out.as_bytes());
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(stderr, "wzcert: {msg}");
            code
        }
    }
}
