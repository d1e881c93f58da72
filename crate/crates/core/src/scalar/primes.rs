use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1 << 16;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation of a positive integer. Fails only when a cofactor
/// beyond 64 bits survives trial division.
pub fn factor_integer(n: &BigInt) -> Result<BTreeMap<u64, i64>> {
    assert!(n.is_positive());
    let mut out = BTreeMap::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            *out.entry(p).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(out);
    }
    match rest.to_u64() {
        Some(r) if is_prime_u64(r) => {
            *out.entry(r).or_insert(0) += 1;
            Ok(out)
        }
        Some(r) => {
            // composite 64-bit cofactor with all factors above the trial limit
            let f = pollard_rho(r);
            for part in [f, r / f] {
                let sub = factor_integer(&BigInt::from(part))?;
                for (k, v) in sub {
                    *out.entry(k).or_insert(0) += v;
                }
            }
            Ok(out)
        }
        None => Err(Error::UnsupportedConstant(format!(
            "cannot factor {n} into primes"
        ))),
    }
}

fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = (x.max(y) - x.min(y)).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Signed prime exponents of a positive rational.
pub fn factor_rational(q: &Rational) -> Result<BTreeMap<u64, i64>> {
    assert!(q.is_positive());
    let mut out = factor_integer(q.numer())?;
    for (p, v) in factor_integer(q.denom())? {
        *out.entry(p).or_insert(0) -= v;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_small_and_large() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn factors_rationals() {
        let q = Rational::new(BigInt::from(72), BigInt::from(35));
        let f = factor_rational(&q).unwrap();
        assert_eq!(f.get(&2), Some(&3));
        assert_eq!(f.get(&3), Some(&2));
        assert_eq!(f.get(&5), Some(&-1));
        assert_eq!(f.get(&7), Some(&-1));
    }

    #[test]
    fn factors_semiprime_above_trial_limit() {
        let n = BigInt::from(1_000_003u64 * 999_983u64);
        let f = factor_integer(&n).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.get(&1_000_003), Some(&1));
    }
}
