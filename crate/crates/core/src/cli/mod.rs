//! Text front end: parser, evaluator, batch runner and REPL.

pub mod eval;
pub mod lexer;
pub mod parser;

use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::expr::OrderDecision;
use crate::oracle::{marker_soundness, oracle_eval, FiniteAssignment, DEFAULT_ORACLE_PRECISION};
use eval::{EvalOptions, Evaluator, FiniteEvaluator, Value};
pub use parser::{parse, Ast};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_EVAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

/// Parses and evaluates one statement.
pub fn eval_value(text: &str, opts: &EvalOptions) -> Result<Value> {
    let ast = parse(text)?;
    Evaluator::new(opts.clone()).eval(&ast)
}

/// Parses, evaluates and renders one statement.
pub fn eval_line(text: &str, opts: &EvalOptions) -> Result<String> {
    eval_value(text, opts).map(|v| v.to_string())
}

/// `error[CODE]: message`.
pub fn render_error(e: &Error) -> String {
    format!("error[{}]: {e}", e.code())
}

pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_parse_error() {
        EXIT_PARSE
    } else if matches!(e, Error::Undecided(_)) {
        EXIT_UNDECIDED
    } else {
        EXIT_EVAL
    }
}

/// Folds per-line codes: parse > evaluation > undecided > success.
pub fn combine_exit(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_PARSE => 3,
        EXIT_EVAL => 2,
        EXIT_UNDECIDED => 1,
        _ => 0,
    };
    if rank(a) >= rank(b) {
        a
    } else {
        b
    }
}

#[derive(Clone, Debug, Default)]
pub struct BatchOptions {
    pub eval: EvalOptions,
    /// Substitution points for the oracle check; empty disables it.
    pub oracle_ns: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineRecord {
    pub input: String,
    pub line: usize,
    pub status: &'static str,
    pub result: String,
    pub code: Option<&'static str>,
    pub oracle: Option<Json>,
    pub exit: i32,
}

impl LineRecord {
    pub fn to_json(&self) -> Json {
        let mut o = json!({
            "input": self.input,
            "line": self.line,
            "status": self.status,
            "result": self.result,
        });
        if let Some(c) = self.code {
            o["code"] = json!(c);
        }
        if let Some(x) = &self.oracle {
            o["oracle"] = x.clone();
        }
        o
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchReport {
    pub records: Vec<LineRecord>,
    pub exit_code: i32,
}

impl BatchReport {
    pub fn to_json(&self) -> Json {
        json!({
            "schema": SCHEMA_VERSION,
            "results": self.records.iter().map(LineRecord::to_json).collect::<Vec<_>>(),
            "exit_code": self.exit_code,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("> {}\n{}\n", r.input, r.result));
            if let Some(o) = &r.oracle {
                let verdict = match o["pass"].as_bool() {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "skipped",
                };
                out.push_str(&format!("  oracle: {verdict}\n"));
            }
        }
        out
    }
}

/// Cross-checks an exact result against direct evaluation of the input, or a
/// marker-carrying one against its error bound.
fn oracle_evidence(ast: &Ast, value: &Value, ns: &[u64]) -> Result<Option<Json>> {
    let Value::Expr(x) = value else {
        return Ok(None);
    };
    if !x.is_exact() {
        if ns.len() < 3 {
            return Ok(None);
        }
        let truth = |n: u64| -> Result<crate::oracle::OracleValue> {
            FiniteEvaluator::new(n, DEFAULT_ORACLE_PRECISION)
                .eval(ast)?
                .ok_or_else(|| Error::Domain("no finite meaning".into()))
        };
        if truth(ns[0]).is_err() {
            return Ok(None);
        }
        let check = marker_soundness(truth, x, ns)?;
        return Ok(Some(json!({
            "kind": "marker",
            "pass": check.passed(),
            "detail": check.to_string(),
        })));
    }
    let mut points = Vec::new();
    let mut pass = true;
    for &n in ns {
        let Some(direct) = FiniteEvaluator::new(n, DEFAULT_ORACLE_PRECISION).eval(ast)? else {
            return Ok(None);
        };
        let divs = crate::oracle::divisors_of(x);
        let closed = match FiniteAssignment::new(n, divs, DEFAULT_ORACLE_PRECISION) {
            Ok(a) => oracle_eval(x, &a)?,
            Err(_) => continue,
        };
        let ok = direct.consistent_with(&closed);
        pass &= ok;
        points.push(json!({
            "N": n,
            "direct": direct.to_string(),
            "closed_form": closed.to_string(),
            "pass": ok,
        }));
    }
    if points.is_empty() {
        return Ok(None);
    }
    Ok(Some(json!({ "kind": "identity", "pass": pass, "points": points })))
}

fn run_statement(text: &str, line: usize, opts: &BatchOptions) -> LineRecord {
    let fail = |e: &Error| LineRecord {
        input: text.to_string(),
        line,
        status: "error",
        result: render_error(e),
        code: Some(e.code()),
        oracle: None,
        exit: exit_code_for(e),
    };
    let ast = match parse(text) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let value = match Evaluator::new(opts.eval.clone()).eval(&ast) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let undecided = matches!(value, Value::Order(OrderDecision::Undecided));
    let mut record = LineRecord {
        input: text.to_string(),
        line,
        status: "ok",
        result: value.to_string(),
        code: None,
        oracle: None,
        exit: if undecided { EXIT_UNDECIDED } else { EXIT_OK },
    };
    if let Value::Report(r) = &value {
        if !r.passed() {
            record.status = "fail";
            record.exit = EXIT_EVAL;
        }
    }
    if !opts.oracle_ns.is_empty() {
        match oracle_evidence(&ast, &value, &opts.oracle_ns) {
            Ok(Some(o)) => {
                if o["pass"] == json!(false) {
                    record.status = "fail";
                    record.exit = EXIT_EVAL;
                }
                record.oracle = Some(o);
            }
            Ok(None) => {}
            Err(e) => record.oracle = Some(json!({ "pass": null, "skipped": render_error(&e) })),
        }
    }
    record
}

/// Statements of a batch file with their 1-based line numbers.
pub fn statements(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let body = l.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| (i + 1, body.to_string()))
        })
        .collect()
}

/// Evaluates every statement; failures are recorded and do not stop the run.
pub fn run_batch(text: &str, opts: &BatchOptions) -> BatchReport {
    let stmts = statements(text);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(stmts.len().max(1));
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<LineRecord>> = vec![None; stmts.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                        let Some((line, s)) = stmts.get(i) else {
                            break;
                        };
                        done.push((i, run_statement(s, *line, opts)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("batch worker") {
                slots[i] = Some(r);
            }
        }
    });
    let records: Vec<LineRecord> = slots.into_iter().map(|r| r.expect("every line evaluated")).collect();
    let exit_code = records.iter().fold(EXIT_OK, |acc, r| combine_exit(acc, r.exit));
    BatchReport { records, exit_code }
}

/// Reads statements until end of input; errors are printed and skipped.
pub fn repl<R: BufRead, W: Write>(input: R, mut out: W, opts: &EvalOptions, prompt: bool) -> std::io::Result<()> {
    if prompt {
        write!(out, "lam> ")?;
        out.flush()?;
    }
    for line in input.lines() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if matches!(body, "quit" | "exit") {
            break;
        }
        if !body.is_empty() {
            let shown = std::panic::catch_unwind(|| eval_line(body, opts))
                .unwrap_or_else(|_| Err(Error::Domain("internal failure".into())));
            match shown {
                Ok(s) => writeln!(out, "{s}")?,
                Err(e) => writeln!(out, "{}", render_error(&e))?,
            }
        }
        if prompt {
            write!(out, "lam> ")?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_keeps_going() {
        let r = run_batch("sum(n=1..lam, n)\n1/0\n# note\ncard(N)\n", &BatchOptions::default());
        assert_eq!(r.records.len(), 3);
        assert_eq!(r.records[1].code, Some("E_DIV_ZERO"));
        assert_eq!(r.records[2].result, "lam");
        assert_eq!(r.exit_code, EXIT_EVAL);
        assert_eq!(r.to_json()["schema"], json!(1));
    }

    #[test]
    fn exit_precedence() {
        let r = run_batch("(1 +\n1/0\n", &BatchOptions::default());
        assert_eq!(r.exit_code, EXIT_PARSE);
        assert_eq!(combine_exit(EXIT_UNDECIDED, EXIT_EVAL), EXIT_EVAL);
    }

    #[test]
    fn oracle_flag() {
        let opts = BatchOptions {
            oracle_ns: vec![12, 120, 1200],
            ..BatchOptions::default()
        };
        let r = run_batch("sum(n=1..2*lam, n)\nsum(n=1..lam, n^3)\n", &opts);
        for rec in &r.records {
            assert_eq!(rec.oracle.as_ref().unwrap()["pass"], json!(true), "{}", rec.input);
        }
        assert_eq!(r.exit_code, EXIT_OK);
    }

    #[test]
    fn repl_survives_errors() {
        let mut out = Vec::new();
        repl("1/0\n(2\nlam + 1\n".as_bytes(), &mut out, &EvalOptions::default(), false).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("error[E_DIV_ZERO]"));
        assert!(lines[1].starts_with("error[E_SYNTAX]"));
        assert_eq!(lines[2], "lam + 1");
    }
}
