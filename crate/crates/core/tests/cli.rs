use std::io::Write;
use std::process::{Command, Output};

use lambda_arith::cli::eval::{EvalOptions, Value};
use lambda_arith::cli::{eval_line, eval_value, parse, run_batch, BatchOptions, EXIT_EVAL, EXIT_OK, EXIT_PARSE};
use lambda_arith::scenarios::SCENARIOS;
use serde_json::Value as Json;

const GOLDEN: &[(&str, &str)] = &[
    ("sum(n=1..2*lam, n)", "2*lam^2 + lam"),
    ("~((lam^2/2 + lam/2) * (1/lam)^2)", "1/2"),
    ("compare(2^lam, lam^lam)", "Less"),
    ("compare(lam^2, lam^2)", "Equal"),
    ("card(Q)", "lam^2"),
    ("card(Z)", "2*lam"),
    ("card(B)", "2^lam"),
    ("card(evens)", "lam/2"),
    ("card(product(N, N))", "lam^2"),
    ("sum(n=1..lam, n^2)", "lam^3/3 + lam^2/2 + lam/6"),
    ("sum(n=0..lam, 2^n)", "2*2^lam - 1"),
    ("9*sum(n=1..lam, (1/10)^n)", "1 - (1/10)^lam"),
    ("sum(n=1..2*lam, (-1)^(n+1)*n)", "-lam"),
    ("sum(n=1..lam, binom(n+1, n))", "lam^2/2 + 3*lam/2"),
    ("binom(lam, 2)", "lam^2/2 - lam/2"),
    ("binom(10, 3)", "120"),
    ("~int(0..1, x^2)", "1/3"),
    ("~int(0..1, exp(-x))", "1 - exp(-1)"),
    ("int(0..1, x)", "1/2 + lam^(-1)/2"),
    ("~((1 - 1/lam)^lam)", "exp(-1)"),
    ("~(lam*ln(1 + 1/lam))", "1"),
    ("exp(2*lam)", "exp(2*lam)"),
    ("lam^lam * lam^lam", "lam^(2*lam)"),
    ("ln(lam^2)", "2*ln(lam)"),
    ("(lam + 1)^2", "lam^2 + 2*lam + 1"),
    ("(-1)^(2*lam)", "1"),
    ("lam - 3 < lam", "true"),
    ("2^lam >= lam^lam", "false"),
    ("1/3 + 1/6", "1/2"),
    ("0.25*lam", "lam/4"),
    ("pi^2/6", "pi^2/6"),
    ("O(lam) + lam^2", "lam^2 + O(lam)"),
];

#[test]
fn golden_suite() {
    let opts = EvalOptions::default();
    for (input, want) in GOLDEN {
        assert_eq!(eval_line(input, &opts).unwrap(), *want, "{input}");
    }
}

#[test]
fn rendered_results_parse_back() {
    let opts = EvalOptions::default();
    for (input, _) in GOLDEN {
        let Value::Expr(x) = eval_value(input, &opts).unwrap() else {
            continue;
        };
        let again = eval_value(&x.to_string(), &opts).unwrap();
        assert_eq!(again, Value::Expr(x.clone()), "{input} -> {x}");
    }
}

#[test]
fn printing_is_stable() {
    for (input, _) in GOLDEN {
        let ast = parse(input).unwrap();
        assert_eq!(parse(&ast.to_string()).unwrap(), ast, "{input}");
    }
}

#[test]
fn errors_have_codes() {
    let opts = EvalOptions::default();
    for (input, code) in [
        ("1/0", "E_DIV_ZERO"),
        ("(-1)^lam", "E_PARITY_DEPENDENT"),
        ("sum(n=1..lam, (-1)^n*n)", "E_PARITY_DEPENDENT"),
        ("foo(3)", "E_UNKNOWN_IDENT"),
        ("x + 1", "E_UNKNOWN_IDENT"),
        ("2 +* 3", "E_SYNTAX"),
        ("scenario(nope)", "E_UNKNOWN_SCENARIO"),
        ("ln(0)", "E_DOMAIN"),
    ] {
        let e = eval_line(input, &opts).unwrap_err();
        assert_eq!(e.code(), code, "{input}: {e}");
    }
}

#[test]
fn batch_of_every_scenario() {
    let text: String = SCENARIOS.iter().map(|s| format!("scenario({s})\n")).collect();
    let report = run_batch(&text, &BatchOptions::default());
    assert_eq!(report.records.len(), 11);
    assert!(report.records.iter().all(|r| r.status == "ok"));
    assert_eq!(report.exit_code, EXIT_OK);
}

#[test]
fn batch_output_is_deterministic() {
    let text = GOLDEN.iter().map(|(i, _)| *i).collect::<Vec<_>>().join("\n");
    let opts = BatchOptions {
        oracle_ns: vec![12, 120, 1200],
        ..BatchOptions::default()
    };
    let a = run_batch(&text, &opts).to_json().to_string();
    let b = run_batch(&text, &opts).to_json().to_string();
    assert_eq!(a, b);
}

fn lamcalc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lamcalc"));
    cmd.args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn batch_file(name: &str, text: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("lamcalc-{}-{name}.txt", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn binary_exit_codes() {
    let ok = batch_file("ok", "# identities\nsum(n=1..lam, n)\ncard(N)\n");
    let out = lamcalc(&["--json", ok.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["results"][0]["result"], "lam^2/2 + lam/2");

    let bad = batch_file("bad", "sum(n=1..lam, n)\n1/0\ncard(Q)\n");
    let out = lamcalc(&["--json", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(EXIT_EVAL));
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    let statuses: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["ok", "error", "ok"]);

    let syntax = batch_file("syntax", "(1 +\n");
    assert_eq!(lamcalc(&[syntax.to_str().unwrap()], None).status.code(), Some(EXIT_PARSE));
}

#[test]
fn binary_oracle_flag() {
    let f = batch_file("oracle", "sum(n=1..2*lam, n)\nsum(n=0..lam, (1/2)^n)\nsum(n=1..lam, 1/n)\n");
    let out = lamcalc(&["--json", "--oracle", "12,120,1200", f.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    for r in v["results"].as_array().unwrap() {
        assert_eq!(r["oracle"]["pass"], true, "{r}");
    }
}

#[test]
fn binary_scenarios_and_repl() {
    let out = lamcalc(&["--json", "--scenario", "all"], None);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 11);

    let out = lamcalc(&[], Some("compare(2^lam, lam^lam)\n1/0\n~((1+1/lam)^lam)\n"));
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Less");
    assert!(lines[1].starts_with("error[E_DIV_ZERO]"));
    assert_eq!(lines[2], "exp(1)");
}
