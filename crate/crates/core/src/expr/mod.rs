//! Finite sums of λ-scale monomials.
//!
//! A monomial is `coeff · λ^(dλ) · e^(sλ) · λ^e · (ln λ)^p`; its scale key is
//! `(d, s, e, p)`, ordered lexicographically, which is the order of eventual
//! dominance. An expression keeps its terms sorted strictly descending by key
//! and may carry an [`AsymptoticMarker`] recording a dropped `O(scale)` tail.

mod order;
mod parity;
mod render;
mod series;

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Sign, DEFAULT_PRECISION_CAP};

pub use order::{OrderDecision, StandardPart};
pub use parity::{parity_eval, ParityOutcome};

/// Default number of series terms kept by truncating operations.
pub const DEFAULT_TRUNC_ORDER: usize = 8;

/// Exponent vector of a monomial.
#[derive(Clone, Debug)]
pub struct ScaleKey {
    /// Coefficient of `λ ln λ` in the exponent.
    pub d: Rational,
    /// Coefficient of `λ` in the exponent.
    pub s: Scalar,
    /// Power of `λ`.
    pub e: Rational,
    /// Power of `ln λ`.
    pub p: i64,
}

impl ScaleKey {
    pub fn unit() -> Self {
        ScaleKey {
            d: Rational::zero(),
            s: Scalar::zero(),
            e: Rational::zero(),
            p: 0,
        }
    }

    pub fn power(e: Rational) -> Self {
        ScaleKey {
            e,
            ..ScaleKey::unit()
        }
    }

    pub fn lambda_power(e: i64) -> Self {
        ScaleKey::power(Rational::from_integer(BigInt::from(e)))
    }

    pub fn is_unit(&self) -> bool {
        self.d.is_zero() && self.s.is_zero() && self.e.is_zero() && self.p == 0
    }

    /// Only `λ^e` with no exponential or logarithmic part.
    pub fn is_pure_power(&self) -> bool {
        self.d.is_zero() && self.s.is_zero() && self.p == 0
    }

    pub fn add(&self, other: &ScaleKey) -> ScaleKey {
        ScaleKey {
            d: &self.d + &other.d,
            s: &self.s + &other.s,
            e: &self.e + &other.e,
            p: self.p + other.p,
        }
    }

    pub fn neg(&self) -> ScaleKey {
        ScaleKey {
            d: -&self.d,
            s: -&self.s,
            e: -&self.e,
            p: -self.p,
        }
    }

    pub fn sub(&self, other: &ScaleKey) -> ScaleKey {
        self.add(&other.neg())
    }

    pub fn times(&self, k: i64) -> ScaleKey {
        let q = Rational::from_integer(BigInt::from(k));
        ScaleKey {
            d: &self.d * &q,
            s: self.s.scale(&q),
            e: &self.e * &q,
            p: self.p * k,
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Result<ScaleKey> {
        let p = Rational::from_integer(BigInt::from(self.p)) * q;
        if !p.is_integer() {
            return Err(Error::UnrepresentableScale(
                "fractional power of ln(lam)".into(),
            ));
        }
        Ok(ScaleKey {
            d: &self.d * q,
            s: self.s.scale(q),
            e: &self.e * q,
            p: p.to_integer().to_i64().ok_or_else(|| {
                Error::Overflow("ln(lam) exponent".into())
            })?,
        })
    }

    fn cmp_s(a: &Scalar, b: &Scalar) -> Ordering {
        if a.structurally_eq(b) {
            return Ordering::Equal;
        }
        let d = a - b;
        if let Some((c, logs)) = d.log_combination() {
            let mut v = crate::scalar::rational_to_f64(&c);
            let mut size = v.abs();
            for (p, k) in &logs {
                let t = crate::scalar::rational_to_f64(k) * (*p as f64).ln();
                v += t;
                size += t.abs();
            }
            if v.abs() > 1e-9 * (1.0 + size) {
                return if v > 0.0 { Ordering::Greater } else { Ordering::Less };
            }
        }
        match d.sign(DEFAULT_PRECISION_CAP) {
            Sign::Positive => Ordering::Greater,
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Undecided => a.structural_cmp(b),
        }
    }
}

impl PartialEq for ScaleKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ScaleKey {}

impl PartialOrd for ScaleKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaleKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| ScaleKey::cmp_s(&self.s, &other.s))
            .then_with(|| self.e.cmp(&other.e))
            .then_with(|| self.p.cmp(&other.p))
    }
}

/// A single term `coeff · scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaMonomial {
    pub coeff: Scalar,
    pub key: ScaleKey,
}

impl LambdaMonomial {
    pub fn new(coeff: Scalar, key: ScaleKey) -> Self {
        LambdaMonomial { coeff, key }
    }

    pub fn mul(&self, other: &LambdaMonomial) -> LambdaMonomial {
        LambdaMonomial {
            coeff: &self.coeff * &other.coeff,
            key: self.key.add(&other.key),
        }
    }
}

/// Error term `O(scale)`, optionally with a bound on the hidden constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticMarker {
    pub scale: ScaleKey,
    pub constant_hint: Option<Scalar>,
}

impl AsymptoticMarker {
    pub fn new(scale: ScaleKey) -> Self {
        AsymptoticMarker {
            scale,
            constant_hint: None,
        }
    }

    fn coarser(a: Option<&AsymptoticMarker>, b: Option<&AsymptoticMarker>) -> Option<AsymptoticMarker> {
        match (a, b) {
            (None, None) => None,
            (Some(m), None) | (None, Some(m)) => Some(m.clone()),
            (Some(x), Some(y)) => match x.scale.cmp(&y.scale) {
                Ordering::Greater => Some(x.clone()),
                Ordering::Less => Some(y.clone()),
                Ordering::Equal => Some(AsymptoticMarker::new(x.scale.clone())),
            },
        }
    }
}

/// A λ-expression: terms strictly descending by scale, plus an optional error term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaExpr {
    terms: Vec<LambdaMonomial>,
    marker: Option<AsymptoticMarker>,
}

impl LambdaExpr {
    pub fn from_parts(terms: Vec<LambdaMonomial>, marker: Option<AsymptoticMarker>) -> Self {
        let mut terms = terms;
        terms.retain(|t| !t.coeff.is_zero());
        terms.sort_by(|a, b| b.key.cmp(&a.key));
        let mut merged: Vec<LambdaMonomial> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.key == t.key => last.coeff = &last.coeff + &t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        if let Some(m) = &marker {
            merged.retain(|t| t.key > m.scale);
        }
        LambdaExpr {
            terms: merged,
            marker,
        }
    }

    pub fn zero() -> Self {
        LambdaExpr {
            terms: Vec::new(),
            marker: None,
        }
    }

    pub fn one() -> Self {
        LambdaExpr::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        LambdaExpr::monomial(c, ScaleKey::unit())
    }

    pub fn rational(q: Rational) -> Self {
        LambdaExpr::constant(Scalar::from_rational(q))
    }

    pub fn int(n: i64) -> Self {
        LambdaExpr::constant(Scalar::from_int(n))
    }

    pub fn monomial(c: Scalar, key: ScaleKey) -> Self {
        LambdaExpr::from_parts(vec![LambdaMonomial::new(c, key)], None)
    }

    /// λ itself.
    pub fn lambda() -> Self {
        LambdaExpr::monomial(Scalar::one(), ScaleKey::lambda_power(1))
    }

    pub fn lambda_pow(e: Rational) -> Self {
        LambdaExpr::monomial(Scalar::one(), ScaleKey::power(e))
    }

    /// `ln λ`.
    pub fn ln_lambda() -> Self {
        LambdaExpr::monomial(
            Scalar::one(),
            ScaleKey {
                p: 1,
                ..ScaleKey::unit()
            },
        )
    }

    /// `e^(sλ)`; with `s = ln b` this is `b^λ`.
    pub fn exp_lambda(s: Scalar) -> Self {
        LambdaExpr::monomial(
            Scalar::one(),
            ScaleKey {
                s,
                ..ScaleKey::unit()
            },
        )
    }

    /// `b^λ` for a positive rational base.
    pub fn base_pow_lambda(b: &Rational) -> Result<Self> {
        Ok(LambdaExpr::exp_lambda(Scalar::ln_rational(b)?))
    }

    /// `λ^(dλ)`.
    pub fn lambda_tower(d: Rational) -> Self {
        LambdaExpr::monomial(
            Scalar::one(),
            ScaleKey {
                d,
                ..ScaleKey::unit()
            },
        )
    }

    /// A pure error term `O(scale)`.
    pub fn big_o(scale: ScaleKey) -> Self {
        LambdaExpr {
            terms: Vec::new(),
            marker: Some(AsymptoticMarker::new(scale)),
        }
    }

    pub fn with_marker(&self, marker: Option<AsymptoticMarker>) -> Self {
        let m = AsymptoticMarker::coarser(self.marker.as_ref(), marker.as_ref());
        LambdaExpr::from_parts(self.terms.clone(), m)
    }

    /// Drops every term at or below `scale` and records `O(scale)`.
    pub fn truncate_at(&self, scale: &ScaleKey) -> Self {
        self.with_marker(Some(AsymptoticMarker::new(scale.clone())))
    }

    pub fn terms(&self) -> &[LambdaMonomial] {
        &self.terms
    }

    pub fn marker(&self) -> Option<&AsymptoticMarker> {
        self.marker.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.marker.is_none()
    }

    /// Exactly zero: no terms and no error term.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.marker.is_none()
    }

    pub fn lead(&self) -> Option<&LambdaMonomial> {
        self.terms.first()
    }

    /// The largest scale present, counting the error term.
    pub fn effective_lead_key(&self) -> Option<ScaleKey> {
        match (self.terms.first(), &self.marker) {
            (Some(t), _) => Some(t.key.clone()),
            (None, Some(m)) => Some(m.scale.clone()),
            (None, None) => None,
        }
    }

    /// The exact constant value, if the expression is a bare constant.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if !self.is_exact() {
            return None;
        }
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [t] if t.key.is_unit() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_scalar().and_then(|s| s.as_rational())
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    /// Coefficients `c_k` of an exact polynomial `Σ c_k λ^k` with rational coefficients.
    pub fn as_rational_polynomial(&self) -> Option<Vec<Rational>> {
        if !self.is_exact() {
            return None;
        }
        let mut coeffs: Vec<Rational> = Vec::new();
        for t in &self.terms {
            if !t.key.is_pure_power() || !t.key.e.is_integer() || t.key.e.is_negative() {
                return None;
            }
            let k = t.key.e.to_integer().to_usize()?;
            let c = t.coeff.as_rational()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] = c;
        }
        Some(coeffs)
    }

    /// Builds `Σ c_k λ^k`.
    pub fn from_rational_polynomial(coeffs: &[Rational]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                LambdaMonomial::new(Scalar::from_rational(c.clone()), ScaleKey::lambda_power(k as i64))
            })
            .collect();
        LambdaExpr::from_parts(terms, None)
    }

    /// True when every term and the error term are strictly below the constant scale.
    pub fn is_infinitesimal(&self) -> bool {
        let unit = ScaleKey::unit();
        self.terms.iter().all(|t| t.key < unit)
            && self.marker.as_ref().map_or(true, |m| m.scale < unit)
    }

    /// True when the leading term outgrows every constant.
    pub fn is_infinite(&self) -> bool {
        self.lead().map_or(false, |t| t.key > ScaleKey::unit())
    }

    pub fn scale_scalar(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return LambdaExpr::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| LambdaMonomial::new(&t.coeff * c, t.key.clone()))
            .collect();
        let marker = self.marker.as_ref().map(|m| AsymptoticMarker {
            scale: m.scale.clone(),
            constant_hint: m.constant_hint.as_ref().and_then(|h| {
                c.as_rational().map(|q| h.scale(&q.abs()))
            }),
        });
        LambdaExpr::from_parts(terms, marker)
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale_scalar(&Scalar::from_rational(q.clone()))
    }

    /// Multiplies every scale by `key` (and the coefficient by `coeff`).
    pub fn mul_monomial(&self, m: &LambdaMonomial) -> Self {
        let terms = self.terms.iter().map(|t| t.mul(m)).collect();
        let marker = self.marker.as_ref().map(|mk| AsymptoticMarker::new(mk.scale.add(&m.key)));
        LambdaExpr::from_parts(terms, marker)
    }

    pub fn add_ref(&self, other: &LambdaExpr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let marker = AsymptoticMarker::coarser(self.marker.as_ref(), other.marker.as_ref());
        LambdaExpr::from_parts(terms, marker)
    }

    pub fn neg_ref(&self) -> Self {
        LambdaExpr {
            terms: self
                .terms
                .iter()
                .map(|t| LambdaMonomial::new(-&t.coeff, t.key.clone()))
                .collect(),
            marker: self.marker.clone(),
        }
    }

    pub fn sub_ref(&self, other: &LambdaExpr) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &LambdaExpr) -> Self {
        if self.is_zero() || other.is_zero() {
            return LambdaExpr::zero();
        }
        let mut cands: Vec<ScaleKey> = Vec::new();
        if let Some(mb) = &other.marker {
            if let Some(ta) = self.terms.first() {
                cands.push(ta.key.add(&mb.scale));
            }
        }
        if let Some(ma) = &self.marker {
            if let Some(tb) = other.terms.first() {
                cands.push(ma.scale.add(&tb.key));
            }
            if let Some(mb) = &other.marker {
                cands.push(ma.scale.add(&mb.scale));
            }
        }
        let marker = cands.into_iter().max().map(AsymptoticMarker::new);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let key = a.key.add(&b.key);
                if marker.as_ref().map_or(false, |m| key <= m.scale) {
                    continue;
                }
                terms.push(LambdaMonomial::new(&a.coeff * &b.coeff, key));
            }
        }
        LambdaExpr::from_parts(terms, marker)
    }

    /// Exact non-negative integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Self {
        let mut acc = LambdaExpr::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Re-applies the merge/sort/drop normalization.
    pub fn normalize(&self) -> Self {
        LambdaExpr::from_parts(self.terms.clone(), self.marker.clone())
    }

    /// Substitutes `λ ↦ u` in an exact polynomial expression.
    pub fn compose_polynomial(&self, u: &LambdaExpr) -> Result<Self> {
        let coeffs = self.as_rational_polynomial().ok_or_else(|| {
            Error::Grammar(format!("`{self}` is not a polynomial in lam"))
        })?;
        Ok(horner(&coeffs, u))
    }
}

/// Evaluates `Σ c_k u^k` by Horner's rule.
pub fn horner(coeffs: &[Rational], u: &LambdaExpr) -> LambdaExpr {
    let mut acc = LambdaExpr::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(u).add_ref(&LambdaExpr::rational(c.clone()));
    }
    acc
}

impl Add for &LambdaExpr {
    type Output = LambdaExpr;
    fn add(self, rhs: &LambdaExpr) -> LambdaExpr {
        self.add_ref(rhs)
    }
}

impl Sub for &LambdaExpr {
    type Output = LambdaExpr;
    fn sub(self, rhs: &LambdaExpr) -> LambdaExpr {
        self.sub_ref(rhs)
    }
}

impl Mul for &LambdaExpr {
    type Output = LambdaExpr;
    fn mul(self, rhs: &LambdaExpr) -> LambdaExpr {
        self.mul_ref(rhs)
    }
}

impl Neg for &LambdaExpr {
    type Output = LambdaExpr;
    fn neg(self) -> LambdaExpr {
        self.neg_ref()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LambdaExpr {
            type Output = LambdaExpr;
            fn $m(self, rhs: LambdaExpr) -> LambdaExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LambdaExpr {
    type Output = LambdaExpr;
    fn neg(self) -> LambdaExpr {
        self.neg_ref()
    }
}

impl From<i64> for LambdaExpr {
    fn from(n: i64) -> Self {
        LambdaExpr::int(n)
    }
}

impl From<Scalar> for LambdaExpr {
    fn from(s: Scalar) -> Self {
        LambdaExpr::constant(s)
    }
}

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam() -> LambdaExpr {
        LambdaExpr::lambda()
    }

    #[test]
    fn lambda_plus_lambda() {
        assert_eq!(&lam() + &lam(), lam().scale_rational(&q(2, 1)));
        assert_eq!(&lam() + &LambdaExpr::zero(), lam());
    }

    #[test]
    fn triangles_make_a_square() {
        let up = (&lam() * &(&lam() + &LambdaExpr::one())).scale_rational(&q(1, 2));
        let down = (&lam() * &(&lam() - &LambdaExpr::one())).scale_rational(&q(1, 2));
        assert_eq!(&up + &down, lam().powi(2));
    }

    #[test]
    fn products_of_scales() {
        assert_eq!(&lam() * &lam(), LambdaExpr::lambda_pow(q(2, 1)));
        assert_eq!(
            &lam() * &LambdaExpr::lambda_pow(q(-2, 1)),
            LambdaExpr::lambda_pow(q(-1, 1))
        );
        assert_eq!(&lam() * &LambdaExpr::lambda_pow(q(-1, 1)), LambdaExpr::one());
    }

    #[test]
    fn key_order_is_eventual_dominance() {
        let two = ScaleKey {
            s: Scalar::ln_rational(&q(2, 1)).unwrap(),
            ..ScaleKey::unit()
        };
        let poly = ScaleKey::lambda_power(100);
        let tower = ScaleKey {
            d: q(1, 1),
            ..ScaleKey::unit()
        };
        assert!(poly < two);
        assert!(two < tower);
        let log = ScaleKey {
            p: 5,
            ..ScaleKey::unit()
        };
        assert!(log < ScaleKey::power(q(1, 100)));
    }

    #[test]
    fn marker_absorbs_smaller_terms() {
        let x = LambdaExpr::from_parts(
            vec![
                LambdaMonomial::new(Scalar::one(), ScaleKey::unit()),
                LambdaMonomial::new(Scalar::one(), ScaleKey::lambda_power(-3)),
            ],
            Some(AsymptoticMarker::new(ScaleKey::lambda_power(-2))),
        );
        assert_eq!(x.terms().len(), 1);
        let y = &x * &lam();
        assert_eq!(y.marker().unwrap().scale, ScaleKey::lambda_power(-1));
    }

    #[test]
    fn normalization_idempotent() {
        let x = &(&lam() * &lam()) - &LambdaExpr::base_pow_lambda(&q(3, 2)).unwrap();
        assert_eq!(x.normalize(), x);
        assert_eq!(x.normalize().normalize(), x.normalize());
    }
}
