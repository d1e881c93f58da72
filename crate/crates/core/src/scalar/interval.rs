//! Closed rational intervals with outward rounding onto dyadic grids.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

pub(crate) fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Largest multiple of `2^-bits` that is `<= q`.
pub(crate) fn floor_dyadic(q: &Rational, bits: u64) -> Rational {
    let scaled = q * Rational::from_integer(pow2(bits));
    Rational::new(scaled.floor().to_integer(), pow2(bits))
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub(crate) fn ceil_dyadic(q: &Rational, bits: u64) -> Rational {
    let scaled = q * Rational::from_integer(pow2(bits));
    Rational::new(scaled.ceil().to_integer(), pow2(bits))
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::point(Rational::from_integer(BigInt::from(n)))
    }

    /// Interval `[(center - err) / 2^bits, (center + err) / 2^bits]`.
    pub(crate) fn from_fixed(center: &BigInt, err: &BigInt, bits: u64) -> Self {
        let den = pow2(bits);
        Interval {
            lo: Rational::new(center - err, den.clone()),
            hi: Rational::new(center + err, den),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Widen outward to the `2^-bits` grid. Point intervals on the grid are kept.
    pub fn round_out(&self, bits: u64) -> Self {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn add(&self, other: &Interval) -> Self {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Self {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Self {
        if self.is_point() && other.is_point() {
            return Self::point(&self.lo * &other.lo);
        }
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.mul(&Interval::point(q.clone()))
    }

    /// `None` when the interval straddles zero.
    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Interval) -> Option<Self> {
        other.recip().map(|r| self.mul(&r))
    }

    /// Integer power, rounding intermediate products to `bits`.
    pub fn powi(&self, exp: i64, bits: u64) -> Option<Self> {
        if exp < 0 {
            return self.powi(-exp, bits)?.recip();
        }
        let mut result = Interval::from_integer(1);
        let mut base = self.clone();
        let mut e = exp as u64;
        // Even powers of sign-straddling intervals need the true range.
        if e % 2 == 0 && self.contains_zero() && !self.is_point() {
            let m = if self.lo.abs() > self.hi.abs() {
                self.lo.abs()
            } else {
                self.hi.abs()
            };
            let top = Interval::point(m).powi(exp, bits)?;
            return Some(Interval::new(Rational::zero(), top.hi));
        }
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).round_out(bits);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).round_out(bits);
            }
        }
        Some(result)
    }

    /// Positive `b`-th root of a non-negative interval, enclosed on the `2^-bits` grid.
    pub fn nth_root(&self, b: u32, bits: u64) -> Option<Self> {
        if self.lo.is_negative() || b == 0 {
            return None;
        }
        if b == 1 {
            return Some(self.clone());
        }
        let lo = root_floor(&self.lo, b, bits);
        let hi_floor = root_floor(&self.hi, b, bits);
        let hi = &hi_floor + Rational::new(BigInt::one(), pow2(bits));
        Some(Interval { lo, hi })
    }

    pub fn intersect(&self, other: &Interval) -> Option<Self> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        if lo <= hi {
            Some(Interval {
                lo: lo.clone(),
                hi: hi.clone(),
            })
        } else {
            None
        }
    }

    pub fn abs_max(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }
}

/// floor(q^(1/b) * 2^bits) / 2^bits for q >= 0.
fn root_floor(q: &Rational, b: u32, bits: u64) -> Rational {
    let scaled = q * Rational::from_integer(pow2(bits * b as u64));
    let n = scaled.floor().to_integer();
    let r = n.to_biguint().expect("non-negative").nth_root(b);
    Rational::new(BigInt::from(r), pow2(bits))
}

/// Lossy conversion that survives numerators and denominators beyond f64 range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as u64;
    let shift_d = (db - 60).max(0) as u64;
    let n = (q.numer().abs() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(1.0);
    let mag = n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32);
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Natural log of |q| as f64, valid far outside the f64 range of q itself.
pub fn rational_ln_abs(q: &Rational) -> f64 {
    let n = q.numer().abs();
    let d = q.denom().clone();
    big_ln(&n) - big_ln(&d)
}

fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top = (n >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(
                f,
                "[{:.17e}, {:.17e}]",
                rational_to_f64(&self.lo),
                rational_to_f64(&self.hi)
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn mul_handles_mixed_signs() {
        let a = Interval::new(q(-1, 1), q(2, 1));
        let b = Interval::new(q(-3, 1), q(1, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &q(-6, 1));
        assert_eq!(p.hi(), &q(3, 1));
    }

    #[test]
    fn recip_rejects_zero() {
        assert!(Interval::new(q(-1, 2), q(1, 2)).recip().is_none());
        let r = Interval::new(q(1, 2), q(2, 1)).recip().unwrap();
        assert_eq!(r, Interval::new(q(1, 2), q(2, 1)));
    }

    #[test]
    fn sqrt_two_enclosed() {
        let r = Interval::from_integer(2).nth_root(2, 64).unwrap();
        let sq = r.mul(&r);
        assert!(sq.contains(&q(2, 1)));
        assert!(r.width() <= Rational::new(BigInt::one(), pow2(63)));
    }

    #[test]
    fn even_power_of_straddling_interval() {
        let a = Interval::new(q(-2, 1), q(1, 1));
        let p = a.powi(2, 32).unwrap();
        assert_eq!(p.lo(), &q(0, 1));
        assert_eq!(p.hi(), &q(4, 1));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Rational::from_integer(BigInt::from(10).pow(400));
        assert!((rational_ln_abs(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!(rational_to_f64(&big.recip()) == 0.0 || rational_to_f64(&big.recip()) < 1e-300);
    }
}
