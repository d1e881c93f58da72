mod common;

use common::{exact_expr, largest_n};
use lambda_arith::cli::eval::{EvalOptions, Value};
use lambda_arith::cli::eval_value;
use lambda_arith::expr::{LambdaExpr, OrderDecision};
use lambda_arith::oracle::{oracle_compare, oracle_eval, FiniteAssignment};
use lambda_arith::scalar::{Sign, DEFAULT_PRECISION_CAP};
use proptest::prelude::*;

fn at(x: &LambdaExpr, n: u64) -> lambda_arith::oracle::OracleValue {
    oracle_eval(x, &FiniteAssignment::at(n).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_laws(a in exact_expr(), b in exact_expr(), c in exact_expr()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        prop_assert_eq!(a.add_ref(&b).add_ref(&c), a.add_ref(&b.add_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        prop_assert!(a.sub_ref(&a).is_zero());
        prop_assert_eq!(a.mul_ref(&LambdaExpr::one()), a.clone());
    }

    #[test]
    fn substitution_is_a_homomorphism(a in exact_expr(), b in exact_expr()) {
        for n in [12u64, 120] {
            let (x, y) = (at(&a, n), at(&b, n));
            prop_assert_eq!(at(&a.add_ref(&b), n), x.add(&y));
            prop_assert_eq!(at(&a.sub_ref(&b), n), x.sub(&y));
            prop_assert_eq!(at(&a.mul_ref(&b), n), x.mul(&y));
        }
    }

    #[test]
    fn order_is_eventual_dominance(a in exact_expr(), b in exact_expr()) {
        let n = largest_n(&a).min(largest_n(&b));
        let s = oracle_compare(&a, &b, &FiniteAssignment::at(n).unwrap()).unwrap();
        match a.compare(&b, DEFAULT_PRECISION_CAP) {
            OrderDecision::Less => prop_assert_eq!(s, Sign::Negative),
            OrderDecision::Greater => prop_assert_eq!(s, Sign::Positive),
            OrderDecision::Equal => prop_assert_eq!(s, Sign::Zero),
            other => prop_assert!(false, "{} vs {}: {}", a, b, other),
        }
    }

    #[test]
    fn normalization_is_idempotent(a in exact_expr()) {
        let once = a.normalize();
        prop_assert_eq!(once.normalize(), once);
    }

    #[test]
    fn rendering_parses_back(a in exact_expr()) {
        let text = a.to_string();
        match eval_value(&text, &EvalOptions::default()) {
            Ok(Value::Expr(back)) => prop_assert_eq!(back, a, "{}", text),
            other => prop_assert!(false, "{} gave {:?}", text, other),
        }
    }
}
