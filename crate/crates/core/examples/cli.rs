//! Driving the calculator from code, as the REPL and batch runner do.

use lambda_arith::cli::{eval::EvalOptions, eval_line, render_error, run_batch, BatchOptions};

const SESSION: &str = "
# Ramanujan's sum, corrected
sum(n=1..2*lam, n)
~((lam^2/2 + lam/2) * (1/lam)^2)
compare(2^lam, lam^lam)
card(Q) - card(N)
sum(n=1..lam, 1/n)
1/0
";

fn main() {
    let opts = EvalOptions::default();
    for line in ["lam^2 - (lam - 1)*(lam + 1)", "binom(lam, 2)", "ln(2*lam)"] {
        match eval_line(line, &opts) {
            Ok(s) => println!("{line}  =>  {s}"),
            Err(e) => println!("{line}  =>  {}", render_error(&e)),
        }
    }

    let report = run_batch(
        SESSION,
        &BatchOptions {
            oracle_ns: vec![12, 120, 1200],
            ..BatchOptions::default()
        },
    );
    println!("\n{}", report.to_text());
    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
}
