//! Canonical text form, readable back by the expression parser.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{LambdaExpr, LambdaMonomial, ScaleKey};
use crate::scalar::{Rational, Scalar};

fn exponent(q: &Rational) -> String {
    if q.is_integer() && q.is_positive() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

/// `e^(sλ)` as `b^lam` when `s = ln b` for a rational `b`.
fn exp_base(s: &Scalar) -> String {
    if let Some((c, logs)) = s.log_combination() {
        if c.is_zero() && logs.values().all(|k| k.is_integer()) {
            let mut b = Rational::one();
            for (p, k) in &logs {
                let pr = Rational::from_integer(BigInt::from(*p));
                let k = k.to_integer();
                let e: i32 = k.try_into().unwrap_or(0);
                b *= if e >= 0 {
                    num_traits::pow(pr, e as usize)
                } else {
                    num_traits::pow(pr.recip(), (-e) as usize)
                };
            }
            return if b.is_integer() {
                format!("{b}^lam")
            } else {
                format!("({b})^lam")
            };
        }
    }
    match s.as_rational() {
        Some(r) if r.is_one() => "exp(lam)".into(),
        Some(r) => format!("exp({r}*lam)"),
        None => format!("exp({}*lam)", s.to_factor_string()),
    }
}

fn key_factors(k: &ScaleKey) -> Vec<String> {
    let mut out = Vec::new();
    if !k.d.is_zero() {
        if k.d.is_one() {
            out.push("lam^lam".to_string());
        } else {
            out.push(format!("lam^({}*lam)", k.d));
        }
    }
    if !k.s.is_zero() {
        out.push(exp_base(&k.s));
    }
    if !k.e.is_zero() {
        if k.e.is_one() {
            out.push("lam".to_string());
        } else {
            out.push(format!("lam^{}", exponent(&k.e)));
        }
    }
    if k.p != 0 {
        if k.p == 1 {
            out.push("ln(lam)".to_string());
        } else {
            out.push(format!(
                "ln(lam)^{}",
                exponent(&Rational::from_integer(BigInt::from(k.p)))
            ));
        }
    }
    out
}

/// A scale key as a product, `1` for the constant scale.
pub fn render_key(k: &ScaleKey) -> String {
    let f = key_factors(k);
    if f.is_empty() {
        "1".into()
    } else {
        f.join("*")
    }
}

/// Splits a term into its sign and the text of its magnitude.
fn render_term(t: &LambdaMonomial) -> (bool, String, bool) {
    let factors = key_factors(&t.key);
    let f = factors.join("*");
    if let Some(c) = t.coeff.as_rational() {
        let neg = c.is_negative();
        let a = c.abs();
        let text = if factors.is_empty() {
            a.to_string()
        } else if a.is_one() {
            f
        } else if a.is_integer() {
            format!("{a}*{f}")
        } else if a.numer().is_one() {
            format!("{f}/{}", a.denom())
        } else {
            format!("{}*{f}/{}", a.numer(), a.denom())
        };
        return (neg, text, false);
    }
    if t.coeff.is_monomial() {
        let neg = t.coeff.is_negative_leading();
        let a = if neg { -&t.coeff } else { t.coeff.clone() };
        let text = if factors.is_empty() {
            a.to_string()
        } else {
            format!("{a}*{f}")
        };
        return (neg, text, false);
    }
    if factors.is_empty() {
        (false, t.coeff.to_string(), true)
    } else {
        (false, format!("({})*{f}", t.coeff), false)
    }
}

impl fmt::Display for LambdaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let many = self.terms().len() + usize::from(self.marker().is_some()) > 1;
        let mut first = true;
        for t in self.terms() {
            let (neg, text, compound) = render_term(t);
            let text = if compound && many {
                format!("({text})")
            } else {
                text
            };
            match (first, neg) {
                (true, true) => write!(f, "-{text}")?,
                (true, false) => write!(f, "{text}")?,
                (false, true) => write!(f, " - {text}")?,
                (false, false) => write!(f, " + {text}")?,
            }
            first = false;
        }
        if let Some(m) = self.marker() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O({})", render_key(&m.scale))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
