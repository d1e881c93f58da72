//! Closed forms for sums up to λ, checked by brute force at finite N.

use lambda_arith::expr::{LambdaExpr, DEFAULT_TRUNC_ORDER};
use lambda_arith::oracle::{identity_sum, marker_soundness, sum_spec_at, FiniteAssignment};
use lambda_arith::scalar::Rational;
use lambda_arith::summation::{IndexPoly, SumSpec, Summand};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn main() {
    let lam = LambdaExpr::lambda();
    let two_lam = lam.scale_rational(&q(2, 1));
    let specs = [
        ("n", SumSpec::new("n", two_lam.clone(), Summand::Poly(IndexPoly::index())).unwrap()),
        ("n^3", SumSpec::new("n", lam.clone(), Summand::Poly(IndexPoly::monomial(3))).unwrap()),
        ("(1/3)^n", SumSpec::new("n", lam.clone(), Summand::Geometric(LambdaExpr::rational(q(1, 3)))).unwrap()),
        ("C(n+2, n)", SumSpec::new("n", lam.clone(), Summand::Binom(2)).unwrap()),
        ("(-1)^(n+1) n", SumSpec::new("n", two_lam.clone(), Summand::AlternatingPoly(IndexPoly::index())).unwrap()),
    ];
    for (body, s) in &specs {
        let closed = s.evaluate(DEFAULT_TRUNC_ORDER).unwrap();
        let rec = identity_sum(s, &closed, &[12, 120, 1200]).unwrap();
        println!("sum {body} to {}: {closed}   [{}]", s.upper, if rec.passed() { "exact at 12, 120, 1200" } else { "MISMATCH" });
    }

    // harmonic numbers carry an error bound
    let h = SumSpec::new("n", lam.clone(), Summand::Reciprocal { a: q(1, 1), c: LambdaExpr::zero() }).unwrap();
    let closed = h.evaluate(6).unwrap();
    println!("\nH(lam) = {closed}");
    let check = marker_soundness(
        |n| sum_spec_at(&h, &FiniteAssignment::at(n)?),
        &closed,
        &[10, 100, 1000],
    )
    .unwrap();
    println!("error bound: {check}");
}
