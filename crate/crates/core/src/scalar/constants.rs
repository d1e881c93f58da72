//! Rigorous enclosures of the transcendental atoms.
//!
//! Every routine works in fixed point: integers scaled by `2^W`, with an
//! explicit error count in units of the last place. The returned interval
//! always contains the true value; its width is a small multiple of `2^-w`
//! for the requested `w` (plus the magnitude of the result for `exp`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::{pow2, Interval};
use super::Rational;

/// atan(1/k) scaled by 2^bits, as (value, error in ulps).
fn atan_inv(k: u64, bits: u64) -> (BigInt, BigInt) {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut power = pow2(bits) / &k;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * i + 1);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = power / &k2;
        i += 1;
    }
    // floor errors < 1 ulp per step on the power, < 3 ulps per term, tail < 2 ulps.
    (sum, BigInt::from(3 * i + 3))
}

/// Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi(w: u64) -> Interval {
    let bits = w + 16;
    let (a, ea) = atan_inv(5, bits);
    let (b, eb) = atan_inv(239, bits);
    let center = a * 16 - b * 4;
    let err = ea * 16 + eb * 4;
    Interval::from_fixed(&center, &err, bits)
}

/// atanh(a/b) for 0 <= a/b <= 1/5, scaled by 2^bits.
fn atanh_small(a: &BigInt, b: &BigInt, bits: u64) -> (BigInt, BigInt) {
    let a2 = a * a;
    let b2 = b * b;
    let mut power = (pow2(bits) * a) / b;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * i + 1);
        power = (power * &a2) / &b2;
        i += 1;
    }
    (sum, BigInt::from(3 * i + 4))
}

/// ln(2) = 2 atanh(1/3).
fn ln2_fixed(bits: u64) -> (BigInt, BigInt) {
    let (v, e) = atanh_small(&BigInt::one(), &BigInt::from(3), bits);
    (v * 2, e * 2)
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &Rational, w: u64) -> Interval {
    assert!(q.is_positive(), "ln of non-positive rational");
    if q.is_one() {
        return Interval::from_integer(0);
    }
    // q = 2^k * m with m in [2/3, 4/3].
    let mut k: i64 = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = Rational::from_integer(BigInt::from(2));
    let lower = Rational::new(BigInt::from(2), BigInt::from(3));
    let upper = Rational::new(BigInt::from(4), BigInt::from(3));
    let scale_of = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(pow2(k as u64))
        } else {
            Rational::new(BigInt::one(), pow2((-k) as u64))
        }
    };
    let mut m = q / scale_of(k);
    while m > upper {
        m /= &two;
        k += 1;
    }
    while m < lower {
        m *= &two;
        k -= 1;
    }
    let bits = w + 16 + 64 - (k.unsigned_abs().leading_zeros() as u64);
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (mut center, mut err) = if z.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        let (v, e) = atanh_small(&z.numer().abs(), z.denom(), bits);
        let v: BigInt = v * 2;
        if z.is_negative() {
            (-v, e * 2)
        } else {
            (v, e * 2)
        }
    };
    if k != 0 {
        let (l2, e2) = ln2_fixed(bits);
        center += l2 * k;
        err += e2 * k.abs();
    }
    Interval::from_fixed(&center, &err, bits)
}

/// e^x for 0 <= x <= 1/2 (x = a/b), scaled by 2^bits.
fn exp_small(a: &BigInt, b: &BigInt, bits: u64) -> (BigInt, BigInt) {
    let mut term = pow2(bits);
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        i += 1;
        term = (term * a) / (b * BigInt::from(i));
    }
    (sum, BigInt::from(2 * i + 8))
}

/// e^q for a rational q.
pub fn exp_rational(q: &Rational, w: u64) -> Interval {
    if q.is_zero() {
        return Interval::from_integer(1);
    }
    if q.is_negative() {
        let pos = exp_rational(&-q, w + 8);
        let bits = w + 8;
        return pos.recip().expect("exp is positive").round_out(bits);
    }
    // halve until x <= 1/2, then square back
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut x = q.clone();
    let mut k: u64 = 0;
    while x > half {
        x /= Rational::from_integer(BigInt::from(2));
        k += 1;
    }
    let magnitude = (crate::scalar::interval::rational_to_f64(q) * std::f64::consts::LOG2_E)
        .ceil()
        .max(0.0) as u64;
    let bits = w + 16 + 2 * k + magnitude;
    let (center, err) = exp_small(x.numer(), x.denom(), bits);
    let mut acc = Interval::from_fixed(&center, &err, bits);
    for _ in 0..k {
        acc = acc.mul(&acc).round_out(bits);
    }
    acc
}

/// Euler's constant via gamma = Ein(n) - ln n - E1(n), 0 < E1(n) < e^-n / n.
pub fn euler_gamma(w: u64) -> Interval {
    // e^-n / n < 2^-(w+2) once n >= (w+2) ln 2
    let n: u64 = ((w + 2) as f64 * std::f64::consts::LN_2).ceil() as u64 + 1;
    let guard = (n as f64 * std::f64::consts::LOG2_E).ceil() as u64 + 16;
    let bits = w + guard;
    let nb = BigInt::from(n);

    let mut t_lo = pow2(bits);
    let mut t_hi = pow2(bits);
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    let mut k: u64 = 1;
    loop {
        let kb = BigInt::from(k);
        t_lo = (&t_lo * &nb).div_floor(&kb);
        t_hi = ceil_div(&(&t_hi * &nb), &kb);
        let q_lo = t_lo.div_floor(&kb);
        let q_hi = ceil_div(&t_hi, &kb);
        if k % 2 == 1 {
            s_lo += &q_lo;
            s_hi += &q_hi;
        } else {
            s_lo -= &q_hi;
            s_hi -= &q_lo;
        }
        if k > n && q_hi <= BigInt::one() {
            break;
        }
        k += 1;
    }
    // alternating tail, terms decreasing past n: bounded by the next term (< 1 ulp)
    s_lo -= 2;
    s_hi += 2;
    let den = pow2(bits);
    let ein = Interval::new(Rational::new(s_lo, den.clone()), Rational::new(s_hi, den));
    let ln_n = ln_rational(&Rational::from_integer(nb), bits);
    let tail = Rational::new(BigInt::one(), pow2(w + 2));
    let g = ein.sub(&ln_n);
    Interval::new(g.lo() - tail, g.hi().clone()).round_out(w + 4)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// base^(a/b) for a positive rational base.
pub fn rational_power(base: &Rational, a: i64, b: u32, w: u64) -> Interval {
    assert!(base.is_positive());
    let p = Interval::point(base.clone())
        .powi(a.abs(), w)
        .expect("point power");
    let bits = w + 16 + (p.hi().numer().bits() / b.max(1) as u64);
    let root = p.nth_root(b, bits).expect("positive root");
    if a < 0 {
        root.recip().expect("positive").round_out(bits)
    } else {
        root
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::interval::rational_to_f64;

    fn width_below(iv: &Interval, bits: u64) -> bool {
        iv.width() < Rational::new(BigInt::one(), pow2(bits))
    }

    #[test]
    fn pi_matches_known_digits() {
        let p = pi(64);
        assert!((rational_to_f64(p.lo()) - std::f64::consts::PI).abs() < 1e-15);
        assert!(width_below(&p, 60));
        // 3.14159265358979323846264338327950288...
        let lo = Rational::new(
            BigInt::parse_bytes(b"314159265358979323846264338327", 10).unwrap(),
            BigInt::from(10).pow(29),
        );
        let hi = &lo + Rational::new(BigInt::one(), BigInt::from(10).pow(29));
        assert!(p.lo() >= &(lo - Rational::new(BigInt::one(), BigInt::from(10).pow(18))));
        assert!(p.hi() <= &(hi + Rational::new(BigInt::one(), BigInt::from(10).pow(18))));
    }

    #[test]
    fn ln2_and_exp_agree() {
        let l = ln_rational(&Rational::from_integer(BigInt::from(2)), 80);
        assert!((l.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let e = exp_rational(&Rational::one(), 80);
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(width_below(&e, 76));
    }

    #[test]
    fn ln_of_large_and_small_rationals() {
        let big = Rational::from_integer(BigInt::from(12000));
        assert!((ln_rational(&big, 64).to_f64() - 12000f64.ln()).abs() < 1e-12);
        let small = Rational::new(BigInt::from(1), BigInt::from(7));
        assert!((ln_rational(&small, 64).to_f64() + 7f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn exp_negative_argument() {
        let e = exp_rational(&Rational::from_integer(BigInt::from(-3)), 64);
        assert!((e.to_f64() - (-3f64).exp()).abs() < 1e-16);
        assert!(width_below(&e, 60));
    }

    #[test]
    fn gamma_known_value() {
        let g = euler_gamma(128);
        assert!((g.to_f64() - 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!(width_below(&g, 120));
    }

    #[test]
    fn rational_power_roots() {
        let r = rational_power(&Rational::from_integer(BigInt::from(2)), 1, 2, 64);
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let r = rational_power(&Rational::from_integer(BigInt::from(8)), -2, 3, 64);
        assert!(r.contains(&Rational::new(BigInt::one(), BigInt::from(4))));
    }
}
