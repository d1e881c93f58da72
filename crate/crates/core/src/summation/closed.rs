//! Polynomial and geometric closed forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::expr::LambdaExpr;
use crate::scalar::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `B_0 ..= B_n` with `B_1 = +1/2`, from `Σ_{i≤m} C(m+1, i) B_i = m + 1`.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
    out.push(Rational::one());
    for m in 1..=n {
        let mut acc = int(m as i64 + 1);
        for (i, bi) in out.iter().enumerate() {
            acc -= Rational::from_integer(binomial(m + 1, i)) * bi;
        }
        out.push(acc / Rational::from_integer(binomial(m + 1, m)));
    }
    out
}

/// The Bernoulli number `B_j` with `B_1 = +1/2`.
pub fn bernoulli(j: usize) -> Rational {
    bernoulli_table(j).pop().expect("non-empty table")
}

/// Ascending coefficients of the polynomial `F_k(U) = Σ_{n=1}^{U} n^k`.
pub fn faulhaber_coefficients(k: usize) -> Vec<Rational> {
    let b = bernoulli_table(k);
    let mut coeffs = vec![Rational::zero(); k + 2];
    let scale = int(k as i64 + 1).recip();
    for (j, bj) in b.iter().enumerate() {
        let c = Rational::from_integer(binomial(k + 1, j)) * bj * &scale;
        coeffs[k + 1 - j] += c;
    }
    coeffs
}

/// `Σ_{n=1}^{U} n^k`.
pub fn sum_faulhaber(k: usize, u: &LambdaExpr) -> LambdaExpr {
    crate::expr::horner(&faulhaber_coefficients(k), u)
}

/// `Σ_{n=0}^{U} x^n = (x^(U+1) - 1)/(x - 1)`.
pub fn sum_geometric(x: &LambdaExpr, u: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    let one = LambdaExpr::one();
    let u1 = u.add_ref(&one);
    if x == &one {
        return Ok(u1);
    }
    let top = x.pow(&u1, trunc)?.sub_ref(&one);
    top.checked_div(&x.sub_ref(&one), trunc)
}

/// `Σ_{n=1}^{M} n x^(n-1) = (1 - (M+1) x^M + M x^(M+1)) / (1 - x)^2`.
pub fn sum_weighted_geometric(x: &LambdaExpr, m: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    let one = LambdaExpr::one();
    if x == &one {
        return Ok(sum_faulhaber(1, m));
    }
    let xm = x.pow(m, trunc)?;
    let num = one
        .sub_ref(&m.add_ref(&one).mul_ref(&xm))
        .add_ref(&m.mul_ref(&xm).mul_ref(x));
    let den = one.sub_ref(x).powi(2);
    num.checked_div(&den, trunc)
}

/// The two diagonal halves of `(Σ_{n=0}^{U} x^n)^2`:
/// `Σ_{n=1}^{U+1} n x^(n-1)` and `Σ_{n=1}^{U} n x^(2U+1-n)`.
pub fn sum_geom_squared_upto(
    x: &LambdaExpr,
    u: &LambdaExpr,
    trunc: usize,
) -> Result<(LambdaExpr, LambdaExpr)> {
    let one = LambdaExpr::one();
    let first = sum_weighted_geometric(x, &u.add_ref(&one), trunc)?;
    // Σ_{n=1}^{U} n x^(U-n) = U Σ_{m<U} x^m - x Σ_{m=1}^{U-1} m x^(m-1)
    let inner = if x == &one {
        sum_faulhaber(1, u)
    } else {
        let head = u.mul_ref(&sum_geometric(x, &u.sub_ref(&one), trunc)?);
        let tail = x.mul_ref(&sum_weighted_geometric(x, &u.sub_ref(&one), trunc)?);
        head.sub_ref(&tail)
    };
    let second = x.pow(&u.add_ref(&one), trunc)?.mul_ref(&inner);
    Ok((first, second))
}

/// [`sum_geom_squared_upto`] with `U = λ`.
pub fn sum_geom_squared(x: &LambdaExpr, trunc: usize) -> Result<(LambdaExpr, LambdaExpr)> {
    sum_geom_squared_upto(x, &LambdaExpr::lambda(), trunc)
}

/// `Σ_{n=1}^{U} C(n+b-1, b) = U(U+1)…(U+b)/(b+1)!`.
pub fn sum_binom(b: usize, u: &LambdaExpr) -> LambdaExpr {
    let mut acc = LambdaExpr::one();
    let mut fact = Rational::one();
    for i in 0..=b {
        acc = acc.mul_ref(&u.add_ref(&LambdaExpr::int(i as i64)));
        fact *= int(i as i64 + 1);
    }
    acc.scale_rational(&fact.recip())
}
