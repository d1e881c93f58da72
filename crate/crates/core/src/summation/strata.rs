//! Binomial coefficients with λ on top.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expr::{AsymptoticMarker, LambdaExpr, LambdaMonomial, ScaleKey};
use crate::scalar::{Rational, Scalar};

/// Lower index of `C(λ, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinomIndex {
    Finite(u64),
    HalfLambda,
    LambdaMinus(u64),
}

impl fmt::Display for BinomIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinomIndex::Finite(k) => write!(f, "{k}"),
            BinomIndex::HalfLambda => write!(f, "lam/2"),
            BinomIndex::LambdaMinus(k) => write!(f, "lam - {k}"),
        }
    }
}

impl BinomIndex {
    /// Classifies a λ-expression as one of the supported lower indices.
    pub fn from_expr(k: &LambdaExpr) -> Result<Self> {
        if let Some(n) = k.as_integer() {
            return u64::try_from(n)
                .map(BinomIndex::Finite)
                .map_err(|_| Error::Domain(format!("negative binomial index {k}")));
        }
        if let Some(c) = k.as_rational_polynomial() {
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            if c.len() == 2 && c[0] == Rational::from_integer(0.into()) && c[1] == half {
                return Ok(BinomIndex::HalfLambda);
            }
            if c.len() == 2 && c[1] == Rational::from_integer(1.into()) && c[0].is_integer() {
                let m = -c[0].to_integer();
                if let Ok(m) = u64::try_from(m) {
                    return Ok(BinomIndex::LambdaMinus(m));
                }
            }
        }
        Err(Error::Grammar(format!(
            "binomial index `{k}` must be finite, lam/2 or lam - k"
        )))
    }
}

/// `C(U, k) = U(U-1)…(U-k+1)/k!` for finite `k`.
pub fn binom_falling(u: &LambdaExpr, k: u64) -> LambdaExpr {
    let mut acc = LambdaExpr::one();
    let mut fact = Rational::from_integer(1.into());
    for i in 0..k {
        acc = acc.mul_ref(&u.sub_ref(&LambdaExpr::int(i as i64)));
        fact *= Rational::from_integer(BigInt::from(i + 1));
    }
    acc.scale_rational(&fact.recip())
}

/// `C(λ, k)`. The central coefficient uses the Stirling form
/// `√(2/(λπ))·2^λ` with error `O(λ^(-3/2)·2^λ)`.
pub fn binom_lambda(k: &BinomIndex) -> Result<LambdaExpr> {
    match k {
        BinomIndex::Finite(k) | BinomIndex::LambdaMinus(k) => {
            Ok(binom_falling(&LambdaExpr::lambda(), *k))
        }
        BinomIndex::HalfLambda => {
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let coeff = &Scalar::rational_power(&Rational::from_integer(2.into()), &half)?
                * &Scalar::pi().pow_rational(&-&half)?;
            let ln2 = Scalar::ln_rational(&Rational::from_integer(2.into()))?;
            let key = ScaleKey {
                s: ln2.clone(),
                e: -&half,
                ..ScaleKey::unit()
            };
            let tail = ScaleKey {
                s: ln2,
                e: Rational::new(BigInt::from(-3), BigInt::from(2)),
                ..ScaleKey::unit()
            };
            Ok(LambdaExpr::from_parts(
                vec![LambdaMonomial::new(coeff, key)],
                Some(AsymptoticMarker::new(tail)),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    #[test]
    fn small_strata() {
        let b2 = binom_lambda(&BinomIndex::Finite(2)).unwrap();
        assert_eq!(b2.to_string(), "lam^2/2 - lam/2");
        assert_eq!(binom_lambda(&BinomIndex::Finite(0)).unwrap(), LambdaExpr::one());
        assert_eq!(
            binom_lambda(&BinomIndex::LambdaMinus(1)).unwrap(),
            LambdaExpr::lambda()
        );
    }

    #[test]
    fn central_stratum() {
        let c = binom_lambda(&BinomIndex::HalfLambda).unwrap();
        assert_eq!(
            c.to_string(),
            "pi^(-1/2)*2^(1/2)*2^lam*lam^(-1/2) + O(2^lam*lam^(-3/2))"
        );
    }

    #[test]
    fn index_classification() {
        let half = LambdaExpr::lambda().scale_rational(&q(1, 2));
        assert_eq!(BinomIndex::from_expr(&half).unwrap(), BinomIndex::HalfLambda);
        let lm = LambdaExpr::lambda().sub_ref(&LambdaExpr::int(3));
        assert_eq!(BinomIndex::from_expr(&lm).unwrap(), BinomIndex::LambdaMinus(3));
        assert!(BinomIndex::from_expr(&LambdaExpr::lambda().scale_rational(&q(1, 3))).is_err());
    }
}
