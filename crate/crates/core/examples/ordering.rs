//! Eventual dominance between λ-expressions.

use lambda_arith::cli::{eval_value, eval::EvalOptions, eval::Value};
use lambda_arith::expr::{LambdaExpr, OrderDecision};
use lambda_arith::scalar::DEFAULT_PRECISION_CAP;

fn expr(s: &str) -> LambdaExpr {
    match eval_value(s, &EvalOptions::default()).unwrap() {
        Value::Expr(x) => x,
        other => panic!("{other}"),
    }
}

fn main() {
    let chain = ["lam - 5", "lam", "3*lam", "lam^2", "lam^5", "2^lam", "lam^lam", "lam^(2*lam)"];
    for w in chain.windows(2) {
        let (a, b) = (expr(w[0]), expr(w[1]));
        let d = a.compare(&b, DEFAULT_PRECISION_CAP);
        println!("{:>12}  {:<7}  {}", w[0], d.to_string(), w[1]);
        assert_eq!(d, OrderDecision::Less);
    }

    let a = expr("(1 + 1/lam)^lam");
    let b = expr("exp(1)");
    println!("\n(1 + 1/lam)^lam = {a}");
    println!("compared with e: {}", a.compare(&b, DEFAULT_PRECISION_CAP));
    println!("standard part:   {}", a.standard_part().unwrap());

    let p = expr("(-1)^(2*lam + 1)");
    println!("(-1)^(2*lam + 1) = {p}");
    println!("(-1)^lam: {}", eval_value("(-1)^lam", &EvalOptions::default()).unwrap_err());
}
