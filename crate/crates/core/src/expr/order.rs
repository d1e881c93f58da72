//! Eventual-dominance comparison and standard parts.

use std::fmt;

use serde::Serialize;

use super::{LambdaExpr, ScaleKey};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OrderDecision {
    Less,
    Equal,
    Greater,
    Undecided,
    ParityDependent,
}

impl OrderDecision {
    pub fn reverse(self) -> Self {
        match self {
            OrderDecision::Less => OrderDecision::Greater,
            OrderDecision::Greater => OrderDecision::Less,
            other => other,
        }
    }
}

impl fmt::Display for OrderDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderDecision::Less => "Less",
            OrderDecision::Equal => "Equal",
            OrderDecision::Greater => "Greater",
            OrderDecision::Undecided => "Undecided",
            OrderDecision::ParityDependent => "ParityDependent",
        };
        f.write_str(s)
    }
}

/// The constant-scale coefficient of a bounded expression.
///
/// This is a terminal value: it has no conversion back into [`LambdaExpr`],
/// so an infinitesimal that was discarded cannot be multiplied back up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardPart(Scalar);

impl StandardPart {
    pub fn value(&self) -> &Scalar {
        &self.0
    }

    pub fn into_scalar(self) -> Scalar {
        self.0
    }
}

impl fmt::Display for StandardPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl LambdaExpr {
    /// Sign of the leading term of `self - other`.
    pub fn compare(&self, other: &LambdaExpr, max_precision: u32) -> OrderDecision {
        let diff = self.sub_ref(other);
        match diff.lead() {
            None if diff.is_exact() => OrderDecision::Equal,
            None => OrderDecision::Undecided,
            Some(t) => match t.coeff.sign(max_precision) {
                Sign::Positive => OrderDecision::Greater,
                Sign::Negative => OrderDecision::Less,
                Sign::Zero => OrderDecision::Equal,
                Sign::Undecided => OrderDecision::Undecided,
            },
        }
    }

    /// Like [`LambdaExpr::compare`] but an undecided sign is an error.
    pub fn try_compare(&self, other: &LambdaExpr, max_precision: u32) -> Result<OrderDecision> {
        match self.compare(other, max_precision) {
            OrderDecision::Undecided => Err(Error::Undecided(format!(
                "`{self}` versus `{other}` at {max_precision} bits"
            ))),
            d => Ok(d),
        }
    }

    pub fn standard_part(&self) -> Result<StandardPart> {
        let unit = ScaleKey::unit();
        if let Some(t) = self.lead() {
            if t.key > unit {
                return Err(Error::Unbounded(format!(
                    "`{self}` has terms above constant scale"
                )));
            }
        }
        if let Some(m) = self.marker() {
            if m.scale >= unit {
                return Err(Error::Unbounded(format!(
                    "error term of `{self}` is not infinitesimal"
                )));
            }
        }
        let c = self
            .terms()
            .iter()
            .find(|t| t.key.is_unit())
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Scalar::zero);
        Ok(StandardPart(c))
    }
}

#[cfg(test)]
mod tests {
    use super::super::q;
    use super::*;
    use crate::scalar::DEFAULT_PRECISION_CAP;

    fn lam() -> LambdaExpr {
        LambdaExpr::lambda()
    }

    #[test]
    fn paper_chains() {
        let cap = DEFAULT_PRECISION_CAP;
        let lm2 = lam().sub_ref(&LambdaExpr::int(2));
        assert_eq!(lm2.compare(&lam(), cap), OrderDecision::Less);
        let five = lam().scale_rational(&q(5, 1));
        assert_eq!(five.compare(&lam().powi(2), cap), OrderDecision::Less);
        let two = LambdaExpr::base_pow_lambda(&q(2, 1)).unwrap();
        let tower = LambdaExpr::lambda_tower(q(1, 1));
        assert_eq!(two.compare(&tower, cap), OrderDecision::Less);
        let slow = LambdaExpr::base_pow_lambda(&q(101, 100)).unwrap();
        assert_eq!(lam().powi(100).compare(&slow, cap), OrderDecision::Less);
        assert_eq!(lam().compare(&lam(), cap), OrderDecision::Equal);
    }

    #[test]
    fn standard_parts() {
        let s1 = lam()
            .powi(2)
            .scale_rational(&q(1, 2))
            .add_ref(&lam().scale_rational(&q(1, 2)));
        let dx2 = LambdaExpr::lambda_pow(q(-2, 1));
        assert_eq!(
            s1.mul_ref(&dx2).standard_part().unwrap().value(),
            &Scalar::ratio(1, 2)
        );
        assert!(LambdaExpr::lambda_pow(q(-1, 1))
            .standard_part()
            .unwrap()
            .value()
            .is_zero());
        assert!(matches!(
            lam().add_ref(&LambdaExpr::one()).standard_part(),
            Err(Error::Unbounded(_))
        ));
    }
}
