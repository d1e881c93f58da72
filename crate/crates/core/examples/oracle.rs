//! Substituting λ = N to check results independently.

use lambda_arith::cli::{eval_value, eval::EvalOptions, eval::Value};
use lambda_arith::expr::LambdaExpr;
use lambda_arith::oracle::{identity_expr, marker_soundness_expr, oracle_convergence, oracle_eval, FiniteAssignment};
use lambda_arith::scalar::Scalar;

fn expr(s: &str) -> LambdaExpr {
    match eval_value(s, &EvalOptions::default()).unwrap() {
        Value::Expr(x) => x,
        other => panic!("{other}"),
    }
}

fn main() {
    let x = expr("lam^3/3 + lam^2/2 + lam/6");
    for n in [12, 120] {
        println!("{x} at N = {n}: {}", oracle_eval(&x, &FiniteAssignment::at(n).unwrap()).unwrap());
    }

    let lhs = expr("(lam + 1)^3");
    let rhs = expr("lam^3 + 3*lam^2 + 3*lam + 1");
    println!("(lam + 1)^3 identity: {}", identity_expr(&lhs, &rhs, &[12, 120, 1200]).unwrap().passed());

    let approx = expr("(1 - 1/lam)^lam");
    let e_inv = Scalar::exp_rational(-lambda_arith::scalar::Rational::from_integer(1.into()));
    println!("\n(1 - 1/lam)^lam -> 1/e: {}", oracle_convergence(&approx, &e_inv, &[10, 100, 1000]).unwrap());

    let exact = expr("lam^2 + lam + 1");
    let truncated = expr("lam^2 + O(lam)");
    println!("marker O(lam) on lam^2 + lam + 1: {}", marker_soundness_expr(&exact, &truncated, &[10, 100, 1000]).unwrap());
}
