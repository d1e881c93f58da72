#![allow(dead_code)]

use lambda_arith::expr::LambdaExpr;
use lambda_arith::scalar::Rational;
use num_traits::Zero;
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `c · λ^λd · b^λ · λ^e` with small exact parameters.
pub fn monomial() -> impl Strategy<Value = LambdaExpr> {
    let coeff = (-9i64..=9, 1i64..=4)
        .prop_filter("non-zero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| q(n, d));
    let base = prop_oneof![4 => Just(q(1, 1)), 1 => Just(q(2, 1)), 1 => Just(q(3, 1)), 1 => Just(q(1, 2))];
    (coeff, 0u8..=4, base, -2i64..=3).prop_map(|(c, tower, b, e)| {
        let mut m = LambdaExpr::rational(c).mul_ref(&LambdaExpr::lambda_pow(q(e, 1)));
        if b != q(1, 1) {
            m = m.mul_ref(&LambdaExpr::base_pow_lambda(&b).expect("positive base"));
        }
        if tower == 0 {
            m = m.mul_ref(&LambdaExpr::lambda_tower(q(1, 1)));
        }
        m
    })
}

/// Sums of up to four monomials.
pub fn exact_expr() -> impl Strategy<Value = LambdaExpr> {
    prop::collection::vec(monomial(), 1..=4)
        .prop_map(|ms| ms.iter().fold(LambdaExpr::zero(), |acc, m| acc.add_ref(m)))
}

/// The largest substitution point the oracle handles for `x`.
pub fn largest_n(x: &LambdaExpr) -> u64 {
    if x.terms().iter().any(|t| !t.key.d.is_zero()) {
        lambda_arith::oracle::NN_GUARD
    } else {
        12_000
    }
}
