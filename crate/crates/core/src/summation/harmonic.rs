//! Harmonic-type and alternating sums.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::closed::bernoulli_table;
use crate::error::{Error, Result};
use crate::expr::{parity_eval, LambdaExpr, ParityOutcome, ScaleKey};
use crate::scalar::{Rational, Scalar, Sign, DEFAULT_PRECISION_CAP};

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn require_positive_infinite(u: &LambdaExpr, what: &str) -> Result<()> {
    let lead = u
        .lead()
        .ok_or_else(|| Error::Domain(format!("{what}: empty upper limit")))?;
    if !u.is_infinite() {
        return Err(Error::Domain(format!(
            "{what}: upper limit `{u}` is finite; sum it exactly instead"
        )));
    }
    match lead.coeff.sign(DEFAULT_PRECISION_CAP) {
        Sign::Positive => Ok(()),
        Sign::Undecided => Err(Error::Undecided(format!("sign of `{u}`"))),
        _ => Err(Error::Domain(format!("{what}: upper limit `{u}` is negative"))),
    }
}

/// Exact `H(n)` for a small non-negative integer.
pub fn harmonic_exact(n: u64) -> Rational {
    (1..=n).map(|k| int(k as i64).recip()).sum()
}

/// `H(U) = ln U + γ + 1/(2U) - Σ B_2k / (2k U^2k) + O(U^-(K+1))` for infinite `U`.
pub fn sum_harmonic(u: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    require_positive_infinite(u, "harmonic sum")?;
    let lead_key = u.lead().expect("checked").key.clone();
    let tail = lead_key.times(-(trunc as i64 + 1));
    let inv = u.inv(trunc)?;
    let inv2 = inv.mul_ref(&inv).truncate_at(&tail);
    let bern = bernoulli_table(trunc.max(2));
    let mut acc = u
        .ln(trunc)?
        .add_ref(&LambdaExpr::constant(Scalar::euler_gamma()))
        .add_ref(&inv.scale_rational(&int(2).recip()))
        .truncate_at(&tail);
    let mut p = inv2.clone();
    let mut k = 1usize;
    while 2 * k <= trunc {
        let c = -&bern[2 * k] / int(2 * k as i64);
        acc = acc.add_ref(&p.scale_rational(&c));
        p = p.mul_ref(&inv2).truncate_at(&tail);
        k += 1;
    }
    Ok(acc)
}

/// `H(U)` for either an exact non-negative integer or an infinite `U`.
fn harmonic_any(u: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    if let Some(n) = u.as_integer() {
        let n = n.to_u64().ok_or_else(|| {
            Error::Pole(format!("harmonic number at negative or huge index {u}"))
        })?;
        return Ok(LambdaExpr::rational(harmonic_exact(n)));
    }
    if let Some(x) = u.as_rational() {
        if (&x * int(2)).is_integer() {
            return harmonic_half(&x);
        }
        return Err(Error::Grammar(format!(
            "harmonic number at non-integer offset {u}"
        )));
    }
    sum_harmonic(u, trunc)
}

/// `H(x) = ψ(x + 1) + γ` at a half-integer `x`, from `H(-1/2) = -2 ln 2`.
fn harmonic_half(x: &Rational) -> Result<LambdaExpr> {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let mut acc = Rational::zero();
    let mut t = -half;
    // H(t) = H(t - 1) + 1/t
    while &t < x {
        t += int(1);
        acc += t.recip();
    }
    while &t > x {
        acc -= t.recip();
        t -= int(1);
    }
    let ln2 = Scalar::ln_rational(&int(2))?.scale(&int(-2));
    Ok(LambdaExpr::constant(ln2).add_ref(&LambdaExpr::rational(acc)))
}

/// `Σ_{n=1}^{U} 1/(a n + shift) = (1/a)(H(U + shift/a) - H(shift/a))`.
pub fn sum_shifted_reciprocal(
    a: &Rational,
    shift: &LambdaExpr,
    u: &LambdaExpr,
    trunc: usize,
) -> Result<LambdaExpr> {
    if !a.is_positive() {
        return Err(Error::Domain(format!("reciprocal slope {a} must be positive")));
    }
    let c = shift.scale_rational(&a.recip());
    if let (Some(cq), Some(uq)) = (c.as_rational(), u.as_integer()) {
        // finite range: sum directly, checking for a pole
        let upper = uq.to_i64().ok_or_else(|| Error::Overflow("upper limit".into()))?;
        let mut acc = Rational::zero();
        for n in 1..=upper {
            let d = int(n) + &cq;
            if d.is_zero() {
                return Err(Error::Pole(format!("term n = {n} divides by zero")));
            }
            acc += d.recip();
        }
        return Ok(LambdaExpr::rational(acc / a));
    }
    if let Some(cq) = c.as_rational() {
        if cq.is_negative() {
            let first_pole = (-&cq).ceil();
            if (-&cq).is_integer() && first_pole >= int(1) {
                return Err(Error::Pole(format!(
                    "term n = {} divides by zero",
                    first_pole.to_integer()
                )));
            }
        }
    } else {
        let lead = c.lead().expect("non-constant shift");
        if lead.key > ScaleKey::unit() && lead.coeff.sign(DEFAULT_PRECISION_CAP) != Sign::Positive {
            return Err(Error::Pole(format!(
                "shift `{shift}` makes the denominator cross zero"
            )));
        }
    }
    let top = harmonic_any(&u.add_ref(&c), trunc)?;
    let bottom = harmonic_any(&c, trunc)?;
    Ok(top.sub_ref(&bottom).scale_rational(&a.recip()))
}

/// `Σ_{n=1}^{L} (-1)^(n+1) n` for `L = 2mλ` or a finite `L`.
pub fn sum_alternating_linear_upto(upper: &LambdaExpr) -> Result<LambdaExpr> {
    if let Some(l) = upper.as_integer() {
        if l.is_negative() {
            return Err(Error::Domain(format!("negative length {l}")));
        }
        let two = BigInt::from(2);
        let v = if (&l % &two).is_zero() {
            -(l / two)
        } else {
            (l + 1) / two
        };
        return Ok(LambdaExpr::constant(Scalar::from_rational(Rational::from_integer(v))));
    }
    if let Some(coeffs) = upper.as_rational_polynomial() {
        let is_two_m_lambda = coeffs.len() == 2
            && coeffs[0].is_zero()
            && coeffs[1].is_integer()
            && coeffs[1].is_positive()
            && (coeffs[1].to_integer() % 2u32).is_zero();
        if is_two_m_lambda {
            let m = &coeffs[1] / int(2);
            return Ok(sum_alternating_linear(&m));
        }
    }
    if parity_eval(upper).is_parity_dependent() {
        return Err(Error::ParityDependent(format!(
            "the last sign of an alternating sum of length `{upper}` depends on its parity"
        )));
    }
    Err(Error::Grammar(format!(
        "alternating linear sums take lengths 2*m*lam, not `{upper}`"
    )))
}

/// `Σ_{n=1}^{2mλ} (-1)^(n+1) n = -mλ`.
pub fn sum_alternating_linear(m: &Rational) -> LambdaExpr {
    LambdaExpr::lambda().scale_rational(&-m)
}

/// `Σ_{n=1}^{U} (-1)^(n+1)/n`. With `U` even this is `H(U) - H(U/2)`; when
/// the parity of `U` is not fixed the two cases differ by `O(1/U)`, which is
/// recorded in the error term.
pub fn sum_alternating_reciprocal(u: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    if let Some(n) = u.as_integer() {
        let n = n.to_u64().ok_or_else(|| Error::Domain("negative length".into()))?;
        let v: Rational = (1..=n)
            .map(|k| {
                let r = int(k as i64).recip();
                if k % 2 == 1 {
                    r
                } else {
                    -r
                }
            })
            .sum();
        return Ok(LambdaExpr::rational(v));
    }
    require_positive_infinite(u, "alternating harmonic sum")?;
    let half = u.scale_rational(&int(2).recip());
    let even = sum_harmonic(u, trunc)?.sub_ref(&sum_harmonic(&half, trunc)?);
    match parity_eval(u) {
        ParityOutcome::Value(v) if v == LambdaExpr::one() => Ok(even),
        ParityOutcome::Value(_) => {
            // odd U: the last (positive) term 1/U is unpaired
            let last = u.inv(trunc)?;
            let shorter = u.sub_ref(&LambdaExpr::one());
            let h = shorter.scale_rational(&int(2).recip());
            Ok(sum_harmonic(&shorter, trunc)?
                .sub_ref(&sum_harmonic(&h, trunc)?)
                .add_ref(&last))
        }
        ParityOutcome::ParityDependent => {
            let lead = u.lead().expect("infinite").key.neg();
            Ok(even.truncate_at(&lead))
        }
    }
}
