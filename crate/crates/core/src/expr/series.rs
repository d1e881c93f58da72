//! Truncated series: reciprocal, exp, ln and general powers.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{LambdaExpr, LambdaMonomial, ScaleKey};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Sign, DEFAULT_PRECISION_CAP};

/// Largest integer exponent expanded by repeated multiplication.
const MAX_EXACT_POWER: u64 = 64;

fn lead_monomial_inverse(x: &LambdaExpr) -> Result<LambdaMonomial> {
    let lead = match x.lead() {
        Some(t) => t,
        None if x.is_exact() => return Err(Error::DivisionByZero),
        None => {
            return Err(Error::Undecided(format!(
                "leading term of `{x}` is hidden in its error term"
            )))
        }
    };
    Ok(LambdaMonomial::new(lead.coeff.recip()?, lead.key.neg()))
}

/// Writes `x = M (1 + u)` and returns `(M⁻¹, u)`.
fn factor_lead(x: &LambdaExpr) -> Result<(LambdaMonomial, LambdaExpr)> {
    let m_inv = lead_monomial_inverse(x)?;
    let u = x.mul_monomial(&m_inv).sub_ref(&LambdaExpr::one());
    Ok((m_inv, u))
}

/// `Σ_{i=first}^{K} c_i u^i` with error `O(lead(u)^(K+1))`.
fn power_series(u: &LambdaExpr, trunc: usize, first: usize, mut coeff: impl FnMut(usize) -> Rational) -> LambdaExpr {
    let ukey = match u.effective_lead_key() {
        Some(k) => k,
        None => {
            return if first == 0 {
                LambdaExpr::rational(coeff(0))
            } else {
                LambdaExpr::zero()
            }
        }
    };
    let tail = ukey.times(trunc as i64 + 1);
    let mut sum = if first == 0 {
        LambdaExpr::rational(coeff(0))
    } else {
        LambdaExpr::zero()
    }
    .truncate_at(&tail);
    let mut p = LambdaExpr::one();
    for i in 1..=trunc {
        p = p.mul_ref(u).truncate_at(&tail);
        if i >= first {
            sum = sum.add_ref(&p.scale_rational(&coeff(i)));
        }
    }
    sum
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl LambdaExpr {
    /// `1/x` by factoring out the leading monomial.
    pub fn inv(&self, trunc: usize) -> Result<LambdaExpr> {
        let (m_inv, u) = factor_lead(self)?;
        if u.is_zero() {
            return Ok(LambdaExpr::from_parts(vec![m_inv], None));
        }
        let neg_u = u.neg_ref();
        Ok(power_series(&neg_u, trunc, 0, |_| Rational::one()).mul_monomial(&m_inv))
    }

    /// `self / other`, exact whenever the quotient is a polynomial or the
    /// divisor is a single monomial.
    pub fn checked_div(&self, other: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
        if other.is_exact() && other.terms().len() == 1 {
            let m_inv = lead_monomial_inverse(other)?;
            return Ok(self.mul_monomial(&m_inv));
        }
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let (Some(a), Some(b)) = (self.as_rational_polynomial(), other.as_rational_polynomial()) {
            if let Some(q) = exact_poly_div(&a, &b) {
                return Ok(LambdaExpr::from_rational_polynomial(&q));
            }
        }
        Ok(self.mul_ref(&other.inv(trunc)?))
    }

    /// `e^x` for `x = d·λlnλ + s·λ + e·lnλ + c + (infinitesimal)`.
    pub fn exp(&self, trunc: usize) -> Result<LambdaExpr> {
        let unit = ScaleKey::unit();
        if let Some(m) = self.marker() {
            if m.scale >= unit {
                return Err(Error::Unbounded(format!(
                    "exp of `{self}` whose error term is not infinitesimal"
                )));
            }
        }
        let mut key = ScaleKey::unit();
        let mut c0 = Scalar::zero();
        let mut small = Vec::new();
        let lam_ln = ScaleKey {
            p: 1,
            ..ScaleKey::lambda_power(1)
        };
        let lam = ScaleKey::lambda_power(1);
        let ln_lam = ScaleKey {
            p: 1,
            ..ScaleKey::unit()
        };
        let rational_coeff = |t: &LambdaMonomial| {
            t.coeff.as_rational().ok_or_else(|| {
                Error::UnrepresentableScale(format!(
                    "exp with non-rational coefficient {} on a lam power",
                    t.coeff
                ))
            })
        };
        for t in self.terms() {
            if t.key < unit {
                small.push(t.clone());
            } else if t.key == unit {
                c0 = t.coeff.clone();
            } else if t.key == lam_ln {
                key.d = rational_coeff(t)?;
            } else if t.key == lam {
                key.s = t.coeff.clone();
            } else if t.key == ln_lam {
                key.e = rational_coeff(t)?;
            } else {
                return Err(Error::UnrepresentableScale(format!(
                    "exp of a term at scale {}",
                    super::render::render_key(&t.key)
                )));
            }
        }
        let base = c0.exp()?;
        let u = LambdaExpr::from_parts(small, self.marker().cloned());
        let mut fact = Rational::one();
        let series = power_series(&u, trunc, 0, |i| {
            if i > 0 {
                fact = &fact * int(i as i64);
            }
            fact.recip()
        });
        Ok(series.mul_monomial(&LambdaMonomial::new(base, key)))
    }

    /// Natural logarithm; the leading coefficient must be positive and carry no `ln λ` power.
    pub fn ln(&self, trunc: usize) -> Result<LambdaExpr> {
        let lead = self.lead().ok_or_else(|| {
            Error::Domain(format!("ln of `{self}`, which has no leading term"))
        })?;
        if lead.key.p != 0 {
            return Err(Error::UnrepresentableScale(
                "ln of a power of ln(lam)".into(),
            ));
        }
        match lead.coeff.sign(DEFAULT_PRECISION_CAP) {
            Sign::Positive => {}
            Sign::Undecided => {
                return Err(Error::Undecided(format!("sign of {}", lead.coeff)))
            }
            _ => {
                return Err(Error::Domain(format!(
                    "ln of `{self}`, whose leading coefficient is not positive"
                )))
            }
        }
        let mut parts = vec![LambdaMonomial::new(lead.coeff.ln()?, ScaleKey::unit())];
        let k = &lead.key;
        if !k.d.is_zero() {
            parts.push(LambdaMonomial::new(
                Scalar::from_rational(k.d.clone()),
                ScaleKey {
                    p: 1,
                    ..ScaleKey::lambda_power(1)
                },
            ));
        }
        if !k.s.is_zero() {
            parts.push(LambdaMonomial::new(k.s.clone(), ScaleKey::lambda_power(1)));
        }
        if !k.e.is_zero() {
            parts.push(LambdaMonomial::new(
                Scalar::from_rational(k.e.clone()),
                ScaleKey {
                    p: 1,
                    ..ScaleKey::unit()
                },
            ));
        }
        let (_, u) = factor_lead(self)?;
        let series = power_series(&u, trunc, 1, |i| {
            let r = int(i as i64).recip();
            if i % 2 == 0 {
                -r
            } else {
                r
            }
        });
        Ok(LambdaExpr::from_parts(parts, None).add_ref(&series))
    }

    /// `base^exponent`, exact for constant and small integer exponents,
    /// otherwise `exp(exponent · ln base)`.
    pub fn pow(&self, exponent: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
        if let Some(e) = exponent.as_rational() {
            if e.is_zero() {
                return Ok(LambdaExpr::one());
            }
            if let Some(b) = self.as_scalar() {
                return Ok(LambdaExpr::constant(b.pow_rational(&e)?));
            }
            if e.is_integer() {
                if let Some(k) = e.to_integer().abs().to_u64() {
                    if k <= MAX_EXACT_POWER {
                        let p = self.powi(k as u32);
                        return if e.is_negative() { p.inv(trunc) } else { Ok(p) };
                    }
                }
            }
        }
        if self.is_zero() {
            return match exponent.lead().map(|t| t.coeff.sign(DEFAULT_PRECISION_CAP)) {
                Some(Sign::Positive) => Ok(LambdaExpr::zero()),
                _ => Err(Error::DivisionByZero),
            };
        }
        exponent.mul_ref(&self.ln(trunc)?).exp(trunc)
    }
}

/// Exact quotient of polynomials given by ascending coefficients.
fn exact_poly_div(a: &[Rational], b: &[Rational]) -> Option<Vec<Rational>> {
    let b_deg = b.iter().rposition(|c| !c.is_zero())?;
    let mut rem: Vec<Rational> = a.to_vec();
    let a_deg = match rem.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Some(Vec::new()),
    };
    if a_deg < b_deg {
        return None;
    }
    let mut quot = vec![Rational::zero(); a_deg - b_deg + 1];
    for i in (0..=a_deg - b_deg).rev() {
        let c = &rem[i + b_deg] / &b[b_deg];
        for j in 0..=b_deg {
            let t = &c * &b[j];
            rem[i + j] -= t;
        }
        quot[i] = c;
    }
    rem.iter().all(|c| c.is_zero()).then_some(quot)
}
