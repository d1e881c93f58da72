//! `(-1)^U` for polynomial exponents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::LambdaExpr;
use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParityOutcome {
    Value(LambdaExpr),
    ParityDependent,
}

impl ParityOutcome {
    pub fn is_parity_dependent(&self) -> bool {
        matches!(self, ParityOutcome::ParityDependent)
    }
}

/// Resolves `(-1)^U`. `λ` may be any multiple of the lcm `D` of the
/// denominators in `U`, so with `λ = D t` the value is fixed exactly when
/// `U(Dt)` has constant parity over all integers `t`. In the binomial basis
/// `U(Dt) = Σ c_k C(t, k)` that means every `c_k` with `k ≥ 1` is even.
pub fn parity_eval(u: &LambdaExpr) -> ParityOutcome {
    let coeffs = match u.as_rational_polynomial() {
        Some(c) => c,
        None => return ParityOutcome::ParityDependent,
    };
    if coeffs.is_empty() {
        return ParityOutcome::Value(LambdaExpr::one());
    }
    let d = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let dr = Rational::from_integer(d);
    let scaled: Vec<Rational> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * num_traits::pow(dr.clone(), k))
        .collect();
    let n = scaled.len();
    let mut values: Vec<Rational> = (0..n)
        .map(|t| {
            let t = Rational::from_integer(BigInt::from(t));
            scaled
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * &t + c)
        })
        .collect();
    let mut diffs = Vec::with_capacity(n);
    for _ in 0..n {
        diffs.push(values[0].clone());
        values = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    if diffs.iter().any(|c| !c.is_integer()) {
        return ParityOutcome::ParityDependent;
    }
    let two = BigInt::from(2);
    if diffs[1..].iter().any(|c| !c.to_integer().is_multiple_of(&two)) {
        return ParityOutcome::ParityDependent;
    }
    let sign = if diffs[0].to_integer().is_multiple_of(&two) { 1 } else { -1 };
    ParityOutcome::Value(LambdaExpr::int(sign))
}

#[cfg(test)]
mod tests {
    use super::super::q;
    use super::*;

    fn lam() -> LambdaExpr {
        LambdaExpr::lambda()
    }

    #[test]
    fn paper_cases() {
        let two = lam().scale_rational(&q(2, 1));
        assert_eq!(parity_eval(&two), ParityOutcome::Value(LambdaExpr::one()));
        let odd = two.add_ref(&LambdaExpr::one());
        assert_eq!(parity_eval(&odd), ParityOutcome::Value(LambdaExpr::int(-1)));
        assert!(parity_eval(&lam()).is_parity_dependent());
    }

    #[test]
    fn products_of_consecutive_values() {
        let x = lam().mul_ref(&lam().add_ref(&LambdaExpr::one()));
        assert_eq!(parity_eval(&x), ParityOutcome::Value(LambdaExpr::one()));
        let half = x.scale_rational(&q(1, 2));
        assert!(parity_eval(&half).is_parity_dependent());
        let sq = lam().powi(2).scale_rational(&q(1, 2));
        assert_eq!(parity_eval(&sq), ParityOutcome::Value(LambdaExpr::one()));
    }
}
