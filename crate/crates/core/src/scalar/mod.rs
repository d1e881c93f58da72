//! The constant field used for coefficients.
//!
//! A [`Scalar`] is a quotient of two finite sums of monomials over the atoms
//! `pi`, `gamma`, `e^q` (rational `q`), `ln p` and `p^r` (prime `p`, `0 < r < 1`).
//! The atoms are treated as algebraically independent, so two scalars are
//! equal exactly when the cross-multiplied numerators cancel term by term.
//! Logarithms of rationals are split over primes (`ln 8 = 3 ln 2`) and
//! exponentials with rational exponents are merged (`e^-3 / e^-2 = e^-1`),
//! which covers every cancellation the engine relies on. Signs that are not
//! structurally zero are decided with interval enclosures of increasing
//! precision, capped by the caller.

mod constants;
mod interval;
mod primes;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use interval::{rational_ln_abs, rational_to_f64, Interval};
pub use primes::{factor_integer, factor_rational, is_prime_u64};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap for sign decisions, in bits.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Outcome of a sign decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    Undecided,
}

impl Sign {
    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            Sign::Negative => Some(Ordering::Less),
            Sign::Zero => Some(Ordering::Equal),
            Sign::Positive => Some(Ordering::Greater),
            Sign::Undecided => None,
        }
    }
}

/// Product of atom powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pi: Rational,
    gamma: Rational,
    exp: Rational,
    logs: BTreeMap<u64, i64>,
    roots: BTreeMap<u64, Rational>,
}

impl Monomial {
    fn one() -> Self {
        Monomial {
            pi: Rational::zero(),
            gamma: Rational::zero(),
            exp: Rational::zero(),
            logs: BTreeMap::new(),
            roots: BTreeMap::new(),
        }
    }

    fn is_one(&self) -> bool {
        self.pi.is_zero()
            && self.gamma.is_zero()
            && self.exp.is_zero()
            && self.logs.is_empty()
            && self.roots.is_empty()
    }

    /// Folds `p^r` with arbitrary rational `r` into a rational factor and a root in (0, 1).
    fn put_root(&mut self, p: u64, r: Rational, factor: &mut Rational) {
        let whole = r.floor();
        let frac = &r - &whole;
        let w = whole.to_integer().to_i64().expect("small exponent");
        let pb = Rational::from_integer(BigInt::from(p));
        if w != 0 {
            *factor *= pow_rational_int(&pb, w);
        }
        if frac.is_zero() {
            self.roots.remove(&p);
        } else {
            self.roots.insert(p, frac);
        }
    }

    fn mul(&self, other: &Monomial) -> (Monomial, Rational) {
        let mut out = self.clone();
        let mut factor = Rational::one();
        out.pi += &other.pi;
        out.gamma += &other.gamma;
        out.exp += &other.exp;
        for (p, k) in &other.logs {
            let e = out.logs.entry(*p).or_insert(0);
            *e += k;
            if *e == 0 {
                out.logs.remove(p);
            }
        }
        for (p, r) in &other.roots {
            let cur = out.roots.get(p).cloned().unwrap_or_else(Rational::zero);
            out.put_root(*p, cur + r, &mut factor);
        }
        (out, factor)
    }

    fn inv(&self) -> (Monomial, Rational) {
        let mut out = Monomial::one();
        let mut factor = Rational::one();
        out.pi = -&self.pi;
        out.gamma = -&self.gamma;
        out.exp = -&self.exp;
        out.logs = self.logs.iter().map(|(p, k)| (*p, -k)).collect();
        for (p, r) in &self.roots {
            out.put_root(*p, -r, &mut factor);
        }
        (out, factor)
    }

    fn pow_rational(&self, q: &Rational) -> Result<(Monomial, Rational)> {
        let mut out = Monomial::one();
        let mut factor = Rational::one();
        out.pi = &self.pi * q;
        out.gamma = &self.gamma * q;
        out.exp = &self.exp * q;
        for (p, k) in &self.logs {
            let e = rint(*k) * q;
            if !e.is_integer() {
                return Err(Error::UnsupportedConstant(format!(
                    "non-integer power of ln({p})"
                )));
            }
            out.logs
                .insert(*p, e.to_integer().to_i64().expect("small exponent"));
        }
        out.logs.retain(|_, k| *k != 0);
        for (p, r) in &self.roots {
            out.put_root(*p, r * q, &mut factor);
        }
        Ok((out, factor))
    }

    fn eval(&self, bits: u64) -> Interval {
        let mut acc = Interval::from_integer(1);
        if !self.pi.is_zero() {
            acc = acc.mul(&atom_power(constants::pi(bits), &self.pi, bits));
        }
        if !self.gamma.is_zero() {
            acc = acc.mul(&atom_power(constants::euler_gamma(bits), &self.gamma, bits));
        }
        if !self.exp.is_zero() {
            acc = acc.mul(&constants::exp_rational(&self.exp, bits));
        }
        for (p, k) in &self.logs {
            let l = constants::ln_rational(&rint(*p as i64), bits + 8);
            acc = acc.mul(&l.powi(*k, bits + 8).expect("ln p > 0"));
        }
        for (p, r) in &self.roots {
            let num = r.numer().to_i64().expect("small");
            let den = r.denom().to_u32().expect("small");
            acc = acc.mul(&constants::rational_power(&rint(*p as i64), num, den, bits));
        }
        acc.round_out(bits)
    }
}

fn atom_power(value: Interval, q: &Rational, bits: u64) -> Interval {
    let num = q.numer().to_i64().expect("small exponent");
    let den = q.denom().to_u32().expect("small exponent");
    let p = value.powi(num.abs(), bits + 8).expect("positive atom");
    let r = p.nth_root(den, bits + 8).expect("positive atom");
    if num < 0 {
        r.recip().expect("positive atom").round_out(bits + 8)
    } else {
        r
    }
}

fn pow_rational_int(q: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), (-k) as usize)
    }
}

type Poly = BTreeMap<Monomial, Rational>;

fn poly_const(q: Rational) -> Poly {
    let mut p = Poly::new();
    if !q.is_zero() {
        p.insert(Monomial::one(), q);
    }
    p
}

fn poly_add_term(p: &mut Poly, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match p.get_mut(&m) {
        Some(existing) => {
            *existing += c;
            if existing.is_zero() {
                p.remove(&m);
            }
        }
        None => {
            p.insert(m, c);
        }
    }
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        poly_add_term(&mut out, m.clone(), c.clone());
    }
    out
}

fn poly_neg(a: &Poly) -> Poly {
    a.iter().map(|(m, c)| (m.clone(), -c)).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let (m, f) = ma.mul(mb);
            poly_add_term(&mut out, m, ca * cb * f);
        }
    }
    out
}

fn poly_mul_term(a: &Poly, m: &Monomial, c: &Rational) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        let (mm, f) = ma.mul(m);
        poly_add_term(&mut out, mm, ca * c * f);
    }
    out
}

fn poly_is_one(p: &Poly) -> bool {
    p.len() == 1 && p.iter().all(|(m, c)| m.is_one() && c.is_one())
}

fn poly_eval(p: &Poly, bits: u64) -> Interval {
    let mut acc = Interval::from_integer(0);
    for (m, c) in p {
        let v = if m.is_one() {
            Interval::point(c.clone())
        } else {
            m.eval(bits).scale(c)
        };
        acc = acc.add(&v);
    }
    acc.round_out(bits)
}

/// An exact element of the constant field.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::new(),
            den: poly_const(Rational::one()),
        }
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Scalar {
            num: poly_const(q),
            den: poly_const(Rational::one()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(rint(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(rat(n, d))
    }

    fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut num = Poly::new();
        poly_add_term(&mut num, m, c);
        Scalar {
            num,
            den: poly_const(Rational::one()),
        }
    }

    pub fn pi() -> Self {
        let mut m = Monomial::one();
        m.pi = Rational::one();
        Scalar::from_monomial(m, Rational::one())
    }

    pub fn euler_gamma() -> Self {
        let mut m = Monomial::one();
        m.gamma = Rational::one();
        Scalar::from_monomial(m, Rational::one())
    }

    /// `e^q` for rational `q`.
    pub fn exp_rational(q: Rational) -> Self {
        let mut m = Monomial::one();
        m.exp = q;
        Scalar::from_monomial(m, Rational::one())
    }

    /// `ln q` for positive rational `q`, split over its prime factors.
    pub fn ln_rational(q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive value {q}")));
        }
        let mut num = Poly::new();
        for (p, v) in factor_rational(q)? {
            let mut m = Monomial::one();
            m.logs.insert(p, 1);
            poly_add_term(&mut num, m, rint(v));
        }
        Ok(Scalar {
            num,
            den: poly_const(Rational::one()),
        })
    }

    /// Positive rational `q` raised to a rational power.
    pub fn rational_power(q: &Rational, e: &Rational) -> Result<Self> {
        Scalar::from_rational(q.clone()).pow_rational(e)
    }

    fn normalized(num: Poly, den: Poly) -> Result<Self> {
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if num.is_empty() {
            return Ok(Scalar::zero());
        }
        if poly_is_one(&den) {
            return Ok(Scalar { num, den });
        }
        if den.len() == 1 {
            let (m, c) = den.iter().next().expect("one term");
            let (mi, f) = m.inv();
            let num = poly_mul_term(&num, &mi, &(f / c));
            return Ok(Scalar {
                num,
                den: poly_const(Rational::one()),
            });
        }
        let (num, den) = if den.get(&Monomial::one()).map_or(false, |c| c.is_one()) {
            (num, den)
        } else {
            let (m, c) = den.iter().next_back().expect("non-empty");
            let (mi, f) = m.inv();
            let scale = f / c;
            (poly_mul_term(&num, &mi, &scale), poly_mul_term(&den, &mi, &scale))
        };
        // num = q * den for a single term q collapses the fraction
        let (nm, nc) = num.iter().next_back().expect("non-empty");
        let (dm, dc) = den.iter().next_back().expect("non-empty");
        let (dmi, f) = dm.inv();
        let (qm, g) = nm.mul(&dmi);
        let qc = nc / dc * f * g;
        if poly_mul_term(&den, &qm, &qc) == num {
            return Ok(Scalar::from_monomial(qm, qc));
        }
        Ok(Scalar { num, den })
    }

    /// Re-applies normalization; a no-op on values built through the public API.
    pub fn normalize(&self) -> Result<Self> {
        Scalar::normalized(self.num.clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        poly_is_one(&self.num) && poly_is_one(&self.den)
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if !poly_is_one(&self.den) {
            return None;
        }
        match self.num.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.num.iter().next().expect("one term");
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Number of monomials in the numerator (1 for a single-term constant).
    pub fn term_count(&self) -> usize {
        self.num.len() + if poly_is_one(&self.den) { 0 } else { self.den.len() }
    }

    pub fn is_monomial(&self) -> bool {
        poly_is_one(&self.den) && self.num.len() == 1
    }

    /// Writes the scalar as `r + sum q_p ln p` when it has that shape.
    pub fn log_combination(&self) -> Option<(Rational, BTreeMap<u64, Rational>)> {
        if !poly_is_one(&self.den) {
            return None;
        }
        let mut constant = Rational::zero();
        let mut logs = BTreeMap::new();
        for (m, c) in &self.num {
            if m.is_one() {
                constant = c.clone();
                continue;
            }
            let plain = m.pi.is_zero()
                && m.gamma.is_zero()
                && m.exp.is_zero()
                && m.roots.is_empty()
                && m.logs.len() == 1;
            if !plain {
                return None;
            }
            let (p, k) = m.logs.iter().next().expect("one log");
            if *k != 1 {
                return None;
            }
            logs.insert(*p, c.clone());
        }
        Some((constant, logs))
    }

    pub fn recip(&self) -> Result<Self> {
        Scalar::normalized(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Scalar::normalized(
            poly_mul(&self.num, &other.den),
            poly_mul(&self.den, &other.num),
        )
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: poly_mul_term(&self.num, &Monomial::one(), q),
            den: self.den.clone(),
        }
    }

    pub fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Rational powers are defined for single-term scalars with a positive
    /// coefficient; integer powers for everything.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self> {
        if e.is_integer() {
            return self.powi(e.to_integer().to_i64().ok_or_else(|| {
                Error::Overflow("exponent does not fit in 64 bits".into())
            })?);
        }
        if self.is_zero() {
            return if e.is_positive() {
                Ok(Scalar::zero())
            } else {
                Err(Error::DivisionByZero)
            };
        }
        if !self.is_monomial() {
            return Err(Error::UnsupportedConstant(format!(
                "fractional power of the sum {self}"
            )));
        }
        let (m, c) = self.num.iter().next().expect("one term");
        if !c.is_positive() {
            return Err(Error::Domain(format!("fractional power of negative {self}")));
        }
        let (mut out, mut factor) = m.pow_rational(e)?;
        for (p, v) in factor_rational(c)? {
            let cur = out.roots.get(&p).cloned().unwrap_or_else(Rational::zero);
            out.put_root(p, cur + rint(v) * e, &mut factor);
        }
        Ok(Scalar::from_monomial(out, factor))
    }

    /// `e^self`. Defined when `self = r + sum q_p ln p`.
    pub fn exp(&self) -> Result<Self> {
        let (r, logs) = self.log_combination().ok_or_else(|| {
            Error::UnsupportedConstant(format!("exp({self}) is outside the constant field"))
        })?;
        let mut acc = Scalar::exp_rational(r);
        for (p, q) in logs {
            acc = &acc * &Scalar::rational_power(&rint(p as i64), &q)?;
        }
        Ok(acc)
    }

    /// Natural logarithm of a single-term positive scalar without pi or gamma factors.
    pub fn ln(&self) -> Result<Self> {
        if !self.is_monomial() {
            return Err(Error::UnsupportedConstant(format!("ln({self})")));
        }
        let (m, c) = self.num.iter().next().expect("one term");
        if !c.is_positive() {
            return Err(Error::Domain(format!("ln of non-positive value {self}")));
        }
        if !m.pi.is_zero() || !m.gamma.is_zero() || !m.logs.is_empty() {
            return Err(Error::UnsupportedConstant(format!("ln({self})")));
        }
        let mut acc = Scalar::ln_rational(c)?;
        acc = &acc + &Scalar::from_rational(m.exp.clone());
        for (p, r) in &m.roots {
            acc = &acc + &Scalar::ln_rational(&rint(*p as i64))?.scale(r);
        }
        Ok(acc)
    }

    fn eval_raw(&self, bits: u64) -> Option<Interval> {
        let n = poly_eval(&self.num, bits);
        if poly_is_one(&self.den) {
            return Some(n);
        }
        let d = poly_eval(&self.den, bits);
        n.div(&d).map(|v| v.round_out(bits))
    }

    /// Rigorous enclosure of the value. Rationals come back as exact points;
    /// other values are widened onto the `2^-precision` grid with a two-ulp
    /// margin, so enclosures at higher precision nest inside lower ones.
    pub fn eval(&self, precision: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        let p = precision as u64;
        let target = Rational::new(BigInt::one(), interval::pow2(p + 1));
        let mut guard = 32u64;
        let mut best: Option<Interval> = None;
        for _ in 0..8 {
            if let Some(raw) = self.eval_raw(p + guard) {
                let done = raw.width() <= target;
                best = Some(raw);
                if done {
                    break;
                }
            }
            guard *= 2;
        }
        let raw = best.expect("denominator enclosure excludes zero");
        let ulp = Rational::new(BigInt::from(2), interval::pow2(p));
        let r = raw.round_out(p);
        Interval::new(r.lo() - &ulp, r.hi() + &ulp)
    }

    /// Sign with escalating precision: 64, 128, ... up to `max_precision` bits.
    pub fn sign(&self, max_precision: u32) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            };
        }
        let mut p = 64u32.min(max_precision.max(1));
        loop {
            let iv = self.eval(p);
            if iv.is_positive() {
                return Sign::Positive;
            }
            if iv.is_negative() {
                return Sign::Negative;
            }
            if p >= max_precision {
                return Sign::Undecided;
            }
            p = (p * 2).min(max_precision);
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.eval(64).to_f64()
    }

    /// Numeric order; `None` when the sign of the difference is undecided.
    pub fn cmp_value(&self, other: &Scalar, max_precision: u32) -> Option<Ordering> {
        (self - other).sign(max_precision).to_ordering()
    }

    /// Deterministic order on the representation, used only as a tiebreak.
    pub fn structural_cmp(&self, other: &Scalar) -> Ordering {
        self.num
            .cmp(&other.num)
            .then_with(|| self.den.cmp(&other.den))
    }

    pub fn structurally_eq(&self, other: &Scalar) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.structurally_eq(other) {
            return true;
        }
        poly_add(
            &poly_mul(&self.num, &other.den),
            &poly_neg(&poly_mul(&other.num, &self.den)),
        )
        .is_empty()
    }
}

impl Eq for Scalar {}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if let (Some(a), Some(b)) = (self.as_rational(), rhs.as_rational()) {
            return Scalar::from_rational(a + b);
        }
        if self.den == rhs.den {
            return Scalar::normalized(poly_add(&self.num, &rhs.num), self.den.clone())
                .expect("non-zero denominator");
        }
        Scalar::normalized(
            poly_add(
                &poly_mul(&self.num, &rhs.den),
                &poly_mul(&rhs.num, &self.den),
            ),
            poly_mul(&self.den, &rhs.den),
        )
        .expect("non-zero denominator")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if let (Some(a), Some(b)) = (self.as_rational(), rhs.as_rational()) {
            return Scalar::from_rational(a * b);
        }
        Scalar::normalized(
            poly_mul(&self.num, &rhs.num),
            poly_mul(&self.den, &rhs.den),
        )
        .expect("non-zero denominator")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: poly_neg(&self.num),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_rational_exponent(q: &Rational) -> String {
    if q.is_integer() && !q.is_negative() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

fn fmt_monomial(m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    if !m.exp.is_zero() {
        parts.push(format!("exp({})", m.exp));
    }
    if !m.pi.is_zero() {
        if m.pi.is_one() {
            parts.push("pi".into());
        } else {
            parts.push(format!("pi^{}", fmt_rational_exponent(&m.pi)));
        }
    }
    if !m.gamma.is_zero() {
        if m.gamma.is_one() {
            parts.push("gamma".into());
        } else {
            parts.push(format!("gamma^{}", fmt_rational_exponent(&m.gamma)));
        }
    }
    for (p, k) in &m.logs {
        if *k == 1 {
            parts.push(format!("ln({p})"));
        } else {
            parts.push(format!("ln({p})^{}", fmt_rational_exponent(&rint(*k))));
        }
    }
    for (p, r) in &m.roots {
        parts.push(format!("{p}^{}", fmt_rational_exponent(r)));
    }
    parts
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut terms: Vec<(&Monomial, &Rational)> = p.iter().collect();
    // constant first, then the remaining monomials in canonical order
    terms.sort_by_key(|(m, _)| !m.is_one());
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let atoms = fmt_monomial(m);
        if atoms.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&atoms.join("*"));
        } else if abs.numer().is_one() {
            out.push_str(&format!("{}/{}", atoms.join("*"), abs.denom()));
        } else if abs.is_integer() {
            out.push_str(&format!("{}*{}", abs, atoms.join("*")));
        } else {
            out.push_str(&format!("{}*{}/{}", abs.numer(), atoms.join("*"), abs.denom()));
        }
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if poly_is_one(&self.den) {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

impl Scalar {
    /// Display form safe to embed as a factor in a product.
    pub fn to_factor_string(&self) -> String {
        let s = self.to_string();
        if self.term_count() > 1 || (!self.is_monomial() && !self.is_zero()) {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn is_negative_leading(&self) -> bool {
        // used by renderers: a single-term scalar with negative coefficient
        self.is_monomial()
            && self
                .num
                .values()
                .next()
                .map_or(false, |c| c.is_negative())
    }

    pub fn is_even_integer(&self) -> bool {
        self.as_rational()
            .map_or(false, |q| q.is_integer() && q.to_integer().is_even())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow2r(bits: u64) -> Rational {
        Rational::new(BigInt::one(), interval::pow2(bits))
    }

    #[test]
    fn exp_quotient_collapses() {
        let a = Scalar::exp_rational(rint(-3));
        let b = Scalar::exp_rational(rint(-2));
        let q = a.checked_div(&b).unwrap();
        assert!(q.structurally_eq(&Scalar::exp_rational(rint(-1))));
    }

    #[test]
    fn annihilator_and_identity() {
        let s = &(&Scalar::zero() * &Scalar::pi()) + &Scalar::ratio(3, 4);
        assert!(s.structurally_eq(&Scalar::ratio(3, 4)));
    }

    #[test]
    fn ln_of_power_divides_to_integer() {
        let a = Scalar::ln_rational(&rint(8)).unwrap();
        let b = Scalar::ln_rational(&rint(2)).unwrap();
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q.as_rational(), Some(rint(3)));
        // interval oracle agrees
        assert!((a.to_f64() / b.to_f64() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn division_by_zero_scalar() {
        assert_eq!(
            Scalar::one().checked_div(&Scalar::zero()),
            Err(Error::DivisionByZero)
        );
        let z = &Scalar::ratio(1, 2) - &Scalar::ratio(1, 2);
        assert!(Scalar::pi().checked_div(&z).is_err());
    }

    #[test]
    fn signs() {
        let one_minus_inv_e = &Scalar::one() - &Scalar::exp_rational(rint(-1));
        assert_eq!(one_minus_inv_e.sign(DEFAULT_PRECISION_CAP), Sign::Positive);
        let zero = &(&Scalar::ratio(1, 2) + &Scalar::ratio(1, 2)) - &Scalar::one();
        assert_eq!(zero.sign(DEFAULT_PRECISION_CAP), Sign::Zero);
        let ln2_minus_1 = &Scalar::ln_rational(&rint(2)).unwrap() - &Scalar::one();
        assert_eq!(ln2_minus_1.sign(DEFAULT_PRECISION_CAP), Sign::Negative);
    }

    #[test]
    fn undecided_when_cap_too_low() {
        // pi - 355/113 is about 2.7e-7; 16 bits cannot separate it from zero
        let d = &Scalar::pi() - &Scalar::ratio(355, 113);
        assert_eq!(d.sign(16), Sign::Undecided);
        assert_eq!(d.sign(128), Sign::Negative);
    }

    #[test]
    fn pi_enclosure_width() {
        let iv = Scalar::pi().eval(64);
        assert!(iv.width() < pow2r(60));
        assert!(iv.contains(&rat(314159265, 100000000)) == false);
        assert!(iv.lo() < &rat(3141592654, 1000000000));
        assert!(iv.hi() > &rat(3141592653, 1000000000));
    }

    #[test]
    fn rational_eval_is_exact() {
        let iv = Scalar::ratio(5, 8).eval(7);
        assert!(iv.is_point());
        assert_eq!(iv.lo(), &rat(5, 8));
    }

    #[test]
    fn inverse_pair_encloses_one() {
        let e = Scalar::exp_rational(rint(1));
        let inv = Scalar::exp_rational(rint(-1));
        // structurally this is exactly 1
        assert!((&e * &inv).is_one());
        // the interval product of separately enclosed factors is also tight
        let iv = e.eval(64).mul(&inv.eval(64));
        assert!(iv.contains(&rint(1)));
        assert!(iv.width() < pow2r(60));
    }

    #[test]
    fn radicals_fold() {
        let r = Scalar::rational_power(&rint(2), &rat(1, 2)).unwrap();
        assert_eq!((&r * &r).as_rational(), Some(rint(2)));
        let six = Scalar::rational_power(&rint(6), &rat(1, 2)).unwrap();
        let three = Scalar::rational_power(&rint(3), &rat(1, 2)).unwrap();
        assert!(&r * &three == six);
    }

    #[test]
    fn exp_of_log_combination() {
        let s = &Scalar::ln_rational(&rint(2)).unwrap() + &Scalar::from_int(-3);
        let e = s.exp().unwrap();
        assert!(e == Scalar::exp_rational(rint(-3)).scale(&rint(2)));
        assert!(Scalar::pi().exp().is_err());
    }

    #[test]
    fn ln_round_trip() {
        let v = Scalar::exp_rational(rat(-5, 2)).scale(&rint(12));
        let l = v.ln().unwrap();
        let expected = &Scalar::ln_rational(&rint(12)).unwrap() + &Scalar::ratio(-5, 2);
        assert!(l == expected);
    }

    #[test]
    fn fraction_normalization_idempotent() {
        let d = &Scalar::one() - &Scalar::exp_rational(rint(-1));
        let x = Scalar::pi().checked_div(&d).unwrap();
        let once = x.normalize().unwrap();
        assert!(once.structurally_eq(&x));
        assert!(once.normalize().unwrap().structurally_eq(&once));
        // (pi / d) * d == pi
        assert!(&x * &d == Scalar::pi());
    }

    #[test]
    fn nested_enclosures() {
        let s = &Scalar::euler_gamma() + &Scalar::pi().pow_rational(&rat(-1, 2)).unwrap();
        let coarse = s.eval(64);
        let fine = s.eval(96);
        assert!(coarse.contains_interval(&fine));
        assert!(fine.width() < coarse.width());
    }
}
