//! Finite substitution: `λ := N`.
//!
//! Every λ-expression is a function of `λ` built from `N^N`, `e^(sN)`, `N^e`
//! and `(ln N)^p`, so it can be evaluated at a concrete integer, exactly when
//! the result is rational and as a rigorous enclosure otherwise. Sums are
//! evaluated term by term without any closed form. Asymptotic claims are
//! checked by fitting `|error| ≈ C N^-r` over several `N`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{LambdaExpr, LambdaMonomial};
use crate::riemann::FuncExpr;
use crate::scalar::{rational_ln_abs, rational_to_f64, Interval, Rational, Scalar, Sign};
use crate::summation::{SumSpec, Summand};

/// `N^N`-sized values are only materialised up to this `N`.
pub const NN_GUARD: u64 = 200;

/// Default substitution points: divisible by 12, geometrically spaced.
pub const DEFAULT_NS: [u64; 4] = [12, 120, 1200, 12000];

/// Default working precision for enclosures, in bits.
pub const DEFAULT_ORACLE_PRECISION: u32 = 512;

fn rq(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A value of `N` together with the divisibility it must satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAssignment {
    n: u64,
    required_divisors: Vec<u64>,
    precision: u32,
}

impl FiniteAssignment {
    pub fn new(n: u64, required_divisors: Vec<u64>, precision: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("N = {n} must be at least 2")));
        }
        let l = required_divisors
            .iter()
            .filter(|d| **d > 0)
            .fold(1u64, |acc, d| acc.lcm(d));
        if n % l != 0 {
            return Err(Error::Divisibility(format!(
                "N = {n} is not divisible by {l}"
            )));
        }
        Ok(FiniteAssignment {
            n,
            required_divisors,
            precision,
        })
    }

    /// `N` with no divisibility requirement at the default precision.
    pub fn at(n: u64) -> Result<Self> {
        FiniteAssignment::new(n, vec![], DEFAULT_ORACLE_PRECISION)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn required_divisors(&self) -> &[u64] {
        &self.required_divisors
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = bits;
        self
    }
}

/// Denominators of the λ-polynomial coefficients of `x`; `N` must be a
/// multiple of each for `x(N)` to be an integer.
pub fn divisors_of(x: &LambdaExpr) -> Vec<u64> {
    let mut out = Vec::new();
    if let Some(c) = x.as_rational_polynomial() {
        for q in c {
            if let Some(d) = q.denom().to_u64() {
                if d > 1 && !out.contains(&d) {
                    out.push(d);
                }
            }
        }
    }
    out
}

/// Result of a substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleValue {
    Exact(Rational),
    Enclosure(Interval),
}

impl OracleValue {
    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            OracleValue::Exact(q) => Some(q),
            OracleValue::Enclosure(_) => None,
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            OracleValue::Exact(q) => Interval::point(q.clone()),
            OracleValue::Enclosure(i) => i.clone(),
        }
    }

    fn from_scalar(s: &Scalar, precision: u32) -> Self {
        match s.as_rational() {
            Some(q) => OracleValue::Exact(q),
            None => OracleValue::Enclosure(s.eval(precision)),
        }
    }

    fn combine(
        &self,
        other: &OracleValue,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        approx: impl Fn(&Interval, &Interval) -> Interval,
    ) -> OracleValue {
        match (self, other) {
            (OracleValue::Exact(a), OracleValue::Exact(b)) => OracleValue::Exact(exact(a, b)),
            _ => OracleValue::Enclosure(approx(&self.interval(), &other.interval())),
        }
    }

    pub fn add(&self, other: &OracleValue) -> OracleValue {
        self.combine(other, |a, b| a + b, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &OracleValue) -> OracleValue {
        self.combine(other, |a, b| a - b, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &OracleValue) -> OracleValue {
        self.combine(other, |a, b| a * b, |a, b| a.mul(b))
    }

    /// Exact equality for rationals, overlap for enclosures.
    pub fn consistent_with(&self, other: &OracleValue) -> bool {
        match (self, other) {
            (OracleValue::Exact(a), OracleValue::Exact(b)) => a == b,
            _ => self.interval().intersect(&other.interval()).is_some(),
        }
    }

    pub fn sign(&self) -> Sign {
        match self {
            OracleValue::Exact(q) if q.is_zero() => Sign::Zero,
            OracleValue::Exact(q) if q.is_positive() => Sign::Positive,
            OracleValue::Exact(_) => Sign::Negative,
            OracleValue::Enclosure(i) if i.is_positive() => Sign::Positive,
            OracleValue::Enclosure(i) if i.is_negative() => Sign::Negative,
            OracleValue::Enclosure(_) => Sign::Undecided,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            OracleValue::Exact(q) => rational_to_f64(q),
            OracleValue::Enclosure(i) => i.to_f64(),
        }
    }
}

impl fmt::Display for OracleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleValue::Exact(q) => write!(f, "{q}"),
            OracleValue::Enclosure(i) => write!(f, "{i}"),
        }
    }
}

/// A monomial at `λ = N`, as a scalar.
fn monomial_at(m: &LambdaMonomial, n: u64) -> Result<Scalar> {
    let nq = rq(n);
    let k = &m.key;
    let mut v = m.coeff.clone();
    if !k.d.is_zero() {
        if n > NN_GUARD {
            return Err(Error::Overflow(format!(
                "lam^lam at N = {n} exceeds the guard N <= {NN_GUARD}"
            )));
        }
        v = &v * &Scalar::rational_power(&nq, &(&k.d * &nq))?;
    }
    if !k.s.is_zero() {
        v = &v * &k.s.scale(&nq).exp()?;
    }
    if !k.e.is_zero() {
        v = &v * &Scalar::rational_power(&nq, &k.e)?;
    }
    if k.p != 0 {
        v = &v * &Scalar::ln_rational(&nq)?.powi(k.p)?;
    }
    Ok(v)
}

/// `x(N)`, ignoring any error marker.
pub fn oracle_eval(x: &LambdaExpr, a: &FiniteAssignment) -> Result<OracleValue> {
    let mut acc = Scalar::zero();
    for t in x.terms() {
        acc = &acc + &monomial_at(t, a.n)?;
    }
    Ok(OracleValue::from_scalar(&acc, a.precision))
}

/// `ln |t(N)|` of one monomial with a slack that covers float rounding.
fn log_magnitude(m: &LambdaMonomial, n: u64) -> (f64, f64, Sign) {
    let c = m.coeff.eval(128);
    let sign = if c.is_positive() {
        Sign::Positive
    } else if c.is_negative() {
        Sign::Negative
    } else {
        Sign::Undecided
    };
    let lc = rational_ln_abs(&c.midpoint());
    let nf = n as f64;
    let ln_n = nf.ln();
    let k = &m.key;
    let v = lc
        + rational_to_f64(&k.d) * nf * ln_n
        + k.s.to_f64() * nf
        + rational_to_f64(&k.e) * ln_n
        + k.p as f64 * ln_n.ln();
    (v, 1e-6 * v.abs() + 1e-6, sign)
}

/// Sign of `x(N)`. A term whose magnitude dominates the sum of all others
/// (compared on a log scale) decides; otherwise the value is evaluated.
pub fn oracle_sign(x: &LambdaExpr, a: &FiniteAssignment) -> Result<Sign> {
    let terms = x.terms();
    if terms.is_empty() {
        return Ok(Sign::Zero);
    }
    let logs: Vec<(f64, f64, Sign)> = terms.iter().map(|t| log_magnitude(t, a.n)).collect();
    let (top, _) = logs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .expect("non-empty");
    let (lv, ls, sign) = logs[top];
    let rest = logs
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != top)
        .map(|(_, (v, s, _))| v + s)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = (terms.len() as f64).ln() + 1.0;
    if sign != Sign::Undecided && lv - ls - rest > margin {
        return Ok(sign);
    }
    Ok(oracle_eval(x, a)?.sign())
}

/// `x(N)` against `y(N)`.
pub fn oracle_compare(x: &LambdaExpr, y: &LambdaExpr, a: &FiniteAssignment) -> Result<Sign> {
    oracle_sign(&x.sub_ref(y), a)
}

fn int_value(x: &LambdaExpr, a: &FiniteAssignment) -> Result<i64> {
    match oracle_eval(x, a)? {
        OracleValue::Exact(q) if q.is_integer() => q
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Overflow(format!("{x} at N = {}", a.n))),
        other => Err(Error::Divisibility(format!(
            "{x} is not an integer at N = {}: {other}",
            a.n
        ))),
    }
}

fn poly_at(n: i64, coeffs: &[OracleValue]) -> OracleValue {
    let nq = Rational::from_integer(BigInt::from(n));
    let mut acc = OracleValue::Exact(Rational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(&OracleValue::Exact(nq.clone())).add(c);
    }
    acc
}

/// Above this many terms, sums of reciprocals are accumulated as enclosures.
const EXACT_RECIPROCAL_LIMIT: i64 = 1500;

/// `Σ_{n=1}^{U(N)} body(n)` by adding the terms one at a time.
pub fn sum_spec_at(spec: &SumSpec, a: &FiniteAssignment) -> Result<OracleValue> {
    let upper = int_value(&spec.upper, a)?;
    if upper < 0 {
        return Err(Error::Domain(format!("negative upper limit {upper}")));
    }
    let bits = a.precision as u64;
    let mut acc = OracleValue::Exact(Rational::zero());
    match &spec.body {
        Summand::Poly(p) | Summand::AlternatingPoly(p) => {
            let alternating = matches!(spec.body, Summand::AlternatingPoly(_));
            let coeffs = p
                .coeffs()
                .iter()
                .map(|c| oracle_eval(c, a))
                .collect::<Result<Vec<_>>>()?;
            for n in 1..=upper {
                let v = poly_at(n, &coeffs);
                acc = if alternating && n % 2 == 0 {
                    acc.sub(&v)
                } else {
                    acc.add(&v)
                };
            }
        }
        Summand::Geometric(r) | Summand::IndexGeometric(r) => {
            let weighted = matches!(spec.body, Summand::IndexGeometric(_));
            let r = oracle_eval(r, a)?;
            let mut pow = OracleValue::Exact(Rational::one());
            for n in 1..=upper {
                pow = round(pow.mul(&r), bits);
                let term = if weighted {
                    pow.mul(&OracleValue::Exact(Rational::from_integer(n.into())))
                } else {
                    pow.clone()
                };
                acc = acc.add(&term);
            }
        }
        Summand::Binom(b) => {
            // C(n+b, n) updated as n grows
            let mut c = BigInt::one();
            let mut total = BigInt::zero();
            for n in 1..=upper {
                c = c * BigInt::from(n + *b as i64) / BigInt::from(n);
                total += &c;
            }
            acc = OracleValue::Exact(Rational::from_integer(total));
        }
        Summand::Reciprocal { a: slope, c } => {
            let c = oracle_eval(c, a)?;
            let denominator = |n: i64| c.add(&OracleValue::Exact(slope * Rational::from_integer(n.into())));
            acc = match c.as_exact() {
                Some(_) if upper <= EXACT_RECIPROCAL_LIMIT => {
                    let mut q = Rational::zero();
                    for n in 1..=upper {
                        let d = denominator(n).as_exact().cloned().expect("exact");
                        if d.is_zero() {
                            return Err(Error::Pole(format!("term n = {n} divides by zero")));
                        }
                        q += d.recip();
                    }
                    OracleValue::Exact(q)
                }
                Some(c0) if fast_affine(c0, slope).is_some() => {
                    // 1/(cn/cd + sn n/sd) = cd sd / (cn sd + sn cd n)
                    let (cn, cd, sn, sd) = fast_affine(c0, slope).expect("checked");
                    let terms = (1..=upper as i128).map(|n| (cn * sd + sn * cd * n, cd * sd, false));
                    match fixed_point_sum(terms, bits + 16)? {
                        Some(i) => OracleValue::Enclosure(i),
                        None => reciprocal_enclosure(upper, &denominator, bits)?,
                    }
                }
                _ => reciprocal_enclosure(upper, &denominator, bits)?,
            };
        }
        Summand::AlternatingReciprocal => {
            if upper <= EXACT_RECIPROCAL_LIMIT {
                let mut q = Rational::zero();
                for n in 1..=upper {
                    let t = Rational::from_integer(n.into()).recip();
                    if n % 2 == 0 {
                        q -= t;
                    } else {
                        q += t;
                    }
                }
                acc = OracleValue::Exact(q);
            } else {
                let terms = (1..=upper as i128).map(|n| (n, 1, n % 2 == 0));
                acc = match fixed_point_sum(terms, bits + 16)? {
                    Some(i) => OracleValue::Enclosure(i),
                    None => {
                        let mut i = Interval::point(Rational::zero());
                        for n in 1..=upper {
                            let t = Interval::from_integer(n).recip().expect("n >= 1").round_out(bits + 16);
                            i = if n % 2 == 0 { i.sub(&t) } else { i.add(&t) }.round_out(bits + 16);
                        }
                        OracleValue::Enclosure(i)
                    }
                };
            }
        }
    }
    Ok(acc)
}

/// Numerators and denominators of `c` and `slope` when they are small.
fn fast_affine(c: &Rational, slope: &Rational) -> Option<(i128, i128, i128, i128)> {
    let small = |x: &BigInt| x.to_i128().filter(|v| v.abs() < 1 << 20);
    Some((small(c.numer())?, small(c.denom())?, small(slope.numer())?, small(slope.denom())?))
}

fn reciprocal_enclosure(upper: i64, denominator: &dyn Fn(i64) -> OracleValue, bits: u64) -> Result<OracleValue> {
    let mut iacc = Interval::point(Rational::zero());
    for n in 1..=upper {
        let r = denominator(n)
            .interval()
            .recip()
            .ok_or_else(|| Error::Pole(format!("term n = {n} may divide by zero")))?;
        iacc = iacc.add(&r.round_out(bits + 16)).round_out(bits + 16);
    }
    Ok(OracleValue::Enclosure(iacc))
}

/// Encloses `Σ ±q/p` by summing `floor` and `ceil` of `2^k q/p` as
/// integers; `None` when a term does not fit the fast path.
fn fixed_point_sum<I>(terms: I, k: u64) -> Result<Option<Interval>>
where
    I: Iterator<Item = (i128, i128, bool)>,
{
    if k > 80 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    let (mut lo_part, mut hi_part) = (0i128, 0i128);
    for (i, (p, q, negate)) in terms.enumerate() {
        if p == 0 {
            return Err(Error::Pole("a term divides by zero".into()));
        }
        if q.abs() >= 1 << 40 {
            return Ok(None);
        }
        let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
        let num = q << k;
        let (fl, r) = (num.div_euclid(p), num.rem_euclid(p));
        let ce = fl + i128::from(r != 0);
        if negate {
            lo_part -= ce;
            hi_part -= fl;
        } else {
            lo_part += fl;
            hi_part += ce;
        }
        // each term is below 2^120; flush before the partial sums can overflow
        if i % 64 == 63 {
            lo += lo_part;
            hi += hi_part;
            lo_part = 0;
            hi_part = 0;
        }
    }
    lo += lo_part;
    hi += hi_part;
    let scale = Rational::from_integer(BigInt::one() << k as usize);
    Ok(Some(Interval::new(Rational::from_integer(lo) / &scale, Rational::from_integer(hi) / &scale)))
}

fn round(v: OracleValue, bits: u64) -> OracleValue {
    match v {
        OracleValue::Enclosure(i) => OracleValue::Enclosure(i.round_out(bits + 16)),
        exact => exact,
    }
}

/// `Σ_{j=1}^{N} f(a + j dx) dx` with `dx = (b - a)/N`, term by term.
/// The bounds must be rational.
pub fn riemann_sum_at(f: &FuncExpr, a: &Rational, b: &Rational, n: u64, precision: u32) -> Result<OracleValue> {
    if b <= a {
        return Err(Error::Domain(format!("integration bounds need a < b, got [{a}, {b}]")));
    }
    let bits = precision as u64 + 16;
    let dx = (b - a) / rq(n);
    let mut total = OracleValue::Exact(Rational::zero());
    for t in f.terms() {
        let c = OracleValue::from_scalar(&t.coeff, precision + 16);
        let mut part = OracleValue::Exact(Rational::zero());
        if t.s.is_zero() {
            // exact: Σ_j (a + j dx)^k
            let mut q = Rational::zero();
            for j in 1..=n {
                let x = a + &dx * rq(j);
                q += num_traits::pow(x, t.k as usize);
            }
            part = OracleValue::Exact(q);
        } else {
            let start = OracleValue::from_scalar(&t.s.scale(a).exp()?, precision + 16);
            let r = OracleValue::from_scalar(&t.s.scale(&dx).exp()?, precision + 16);
            let mut e = start;
            for j in 1..=n {
                e = round(e.mul(&r), bits);
                let x = a + &dx * rq(j);
                let term = e.mul(&OracleValue::Exact(num_traits::pow(x, t.k as usize)));
                part = round(part.add(&term), bits);
            }
        }
        total = total.add(&c.mul(&part).mul(&OracleValue::Exact(dx.clone())));
    }
    Ok(total)
}

/// One substitution point of an identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityPoint {
    pub n: u64,
    pub lhs: OracleValue,
    pub rhs: OracleValue,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityRecord {
    pub points: Vec<IdentityPoint>,
}

impl IdentityRecord {
    pub fn passed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| p.pass)
    }

    /// First substitution point that failed.
    pub fn first_failure(&self) -> Option<&IdentityPoint> {
        self.points.iter().find(|p| !p.pass)
    }
}

/// Checks `lhs(N) = rhs(N)` at each assignment.
pub fn oracle_identity<F>(lhs: F, rhs: &LambdaExpr, at: &[FiniteAssignment]) -> Result<IdentityRecord>
where
    F: Fn(&FiniteAssignment) -> Result<OracleValue>,
{
    let mut points = Vec::with_capacity(at.len());
    for a in at {
        let l = lhs(a)?;
        let r = oracle_eval(rhs, a)?;
        let pass = l.consistent_with(&r);
        points.push(IdentityPoint {
            n: a.n,
            lhs: l,
            rhs: r,
            pass,
        });
    }
    Ok(IdentityRecord { points })
}

fn assignments(ns: &[u64], divisors: Vec<u64>) -> Result<Vec<FiniteAssignment>> {
    ns.iter()
        .map(|n| FiniteAssignment::new(*n, divisors.clone(), DEFAULT_ORACLE_PRECISION))
        .collect()
}

/// A brute-force sum against a closed form.
pub fn identity_sum(spec: &SumSpec, rhs: &LambdaExpr, ns: &[u64]) -> Result<IdentityRecord> {
    let at = assignments(ns, divisors_of(&spec.upper))?;
    oracle_identity(|a| sum_spec_at(spec, a), rhs, &at)
}

/// Two λ-expressions against each other.
pub fn identity_expr(lhs: &LambdaExpr, rhs: &LambdaExpr, ns: &[u64]) -> Result<IdentityRecord> {
    let at = assignments(ns, vec![])?;
    oracle_identity(|a| oracle_eval(lhs, a), rhs, &at)
}

/// Errors `|x(N) - target|` and the fitted law `C N^-rate`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub ns: Vec<u64>,
    /// Upper bounds of the errors.
    pub errors: Vec<f64>,
    /// `None` when every error is exactly zero.
    pub rate: Option<f64>,
    pub constant: Option<f64>,
}

impl ConvergenceRecord {
    pub fn is_exact(&self) -> bool {
        self.rate.is_none()
    }

    /// Exact, or converging at least as fast as `predicted - 0.1`.
    pub fn meets(&self, predicted: f64) -> bool {
        match self.rate {
            None => self.errors.iter().all(|e| *e == 0.0),
            Some(r) => r >= predicted - 0.1,
        }
    }
}

impl fmt::Display for ConvergenceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rate, self.constant) {
            (Some(r), Some(c)) => write!(f, "rate {r:.3}, C = {c:.3e} over N = {:?}", self.ns),
            _ => write!(f, "exact over N = {:?}", self.ns),
        }
    }
}

/// Least squares of `ln e = ln C - r ln N`.
pub fn fit_rate(ns: &[u64], errors: &[f64]) -> Result<ConvergenceRecord> {
    if ns.len() < 3 || ns.len() != errors.len() {
        return Err(Error::Domain("a rate fit needs at least three points".into()));
    }
    if errors.iter().all(|e| *e == 0.0) {
        return Ok(ConvergenceRecord {
            ns: ns.to_vec(),
            errors: errors.to_vec(),
            rate: None,
            constant: None,
        });
    }
    if errors.iter().any(|e| *e <= 0.0 || !e.is_finite()) {
        return Err(Error::Domain(format!("cannot fit errors {errors:?}")));
    }
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(ConvergenceRecord {
        ns: ns.to_vec(),
        errors: errors.to_vec(),
        rate: Some(-slope),
        constant: Some((my - slope * mx).exp()),
    })
}

fn error_bound(diff: &OracleValue) -> f64 {
    match diff {
        OracleValue::Exact(q) => rational_to_f64(&q.abs()),
        OracleValue::Enclosure(i) => rational_to_f64(&i.abs_max()),
    }
}

/// Fits `|truth(N) - target|` over `ns`.
pub fn convergence_of<F>(truth: F, target: &Scalar, ns: &[u64], precision: u32) -> Result<ConvergenceRecord>
where
    F: Fn(u64) -> Result<OracleValue>,
{
    let t = OracleValue::from_scalar(target, precision);
    let mut errors = Vec::with_capacity(ns.len());
    for n in ns {
        errors.push(error_bound(&truth(*n)?.sub(&t)));
    }
    fit_rate(ns, &errors)
}

/// `|x(N) - target|` fitted over `ns`; the marker of `x` is ignored.
pub fn oracle_convergence(x: &LambdaExpr, target: &Scalar, ns: &[u64]) -> Result<ConvergenceRecord> {
    let divs = divisors_of(x);
    convergence_of(
        |n| oracle_eval(x, &FiniteAssignment::new(n, divs.clone(), DEFAULT_ORACLE_PRECISION)?),
        target,
        ns,
        DEFAULT_ORACLE_PRECISION,
    )
}

/// How well a truncated result tracks the quantity it approximates.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerCheck {
    /// `-e` of the marker scale: the decay the marker promises.
    pub predicted_rate: f64,
    pub record: ConvergenceRecord,
}

impl MarkerCheck {
    pub fn passed(&self) -> bool {
        self.record.meets(self.predicted_rate)
    }
}

impl fmt::Display for MarkerCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "predicted {:.3}, {}", self.predicted_rate, self.record)
    }
}

/// Fits `|truth(N) - t(N)| / g(N)`, where the marker of `t` is
/// `O(g(N) N^e)` and `g` collects its `N^N` and `e^(sN)` parts; the fitted
/// rate should reach `-e`.
pub fn marker_soundness<F>(truth: F, t: &LambdaExpr, ns: &[u64]) -> Result<MarkerCheck>
where
    F: Fn(u64) -> Result<OracleValue>,
{
    let m = t
        .marker()
        .ok_or_else(|| Error::Domain(format!("`{t}` carries no error marker")))?;
    if m.scale.p != 0 {
        return Err(Error::Domain("log factors in the marker are not fitted".into()));
    }
    let divs = divisors_of(t);
    let mut errors = Vec::with_capacity(ns.len());
    for n in ns {
        let a = FiniteAssignment::new(*n, divs.clone(), DEFAULT_ORACLE_PRECISION)?;
        let diff = truth(*n)?.sub(&oracle_eval(t, &a)?);
        let mut scale_key = m.scale.clone();
        scale_key.e = Rational::zero();
        let g = monomial_at(&LambdaMonomial::new(Scalar::one(), scale_key), *n)?;
        let g = OracleValue::from_scalar(&g, DEFAULT_ORACLE_PRECISION);
        let e = error_bound(&diff);
        let gv = g.to_f64();
        errors.push(if gv.is_finite() && gv > 0.0 {
            e / gv
        } else {
            let ln = rational_ln_abs(&diff.interval().abs_max()) - rational_ln_abs(&g.interval().abs_max());
            ln.exp()
        });
    }
    Ok(MarkerCheck {
        predicted_rate: -rational_to_f64(&m.scale.e),
        record: fit_rate(ns, &errors)?,
    })
}

/// Marker soundness for a truncated `t` of an expression the oracle can
/// evaluate exactly.
pub fn marker_soundness_expr(exact: &LambdaExpr, t: &LambdaExpr, ns: &[u64]) -> Result<MarkerCheck> {
    let divs = divisors_of(exact);
    marker_soundness(
        |n| oracle_eval(exact, &FiniteAssignment::new(n, divs.clone(), DEFAULT_ORACLE_PRECISION)?),
        t,
        ns,
    )
}

/// `Σ_k C(N, k)` and `2^N`.
pub fn strata_total(n: u32) -> (BigInt, BigInt) {
    let mut c = BigInt::one();
    let mut total = BigInt::zero();
    for k in 0..=n {
        total += &c;
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    (total, BigInt::one() << n)
}

/// Number of `n`-bit strings with each count of ones, by enumeration.
pub fn strata_by_enumeration(n: u32) -> Vec<u64> {
    let mut counts = vec![0u64; n as usize + 1];
    for w in 0u64..(1u64 << n) {
        counts[w.count_ones() as usize] += 1;
    }
    counts
}

/// `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    BigInt::from(crate::summation::binomial(n as usize, k as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summation::IndexPoly;
    use crate::expr::{q, ScaleKey};
    use crate::summation::sum_faulhaber;

    fn lam() -> LambdaExpr {
        LambdaExpr::lambda()
    }

    #[test]
    fn fixed_point_sums_enclose_exact_ones() {
        // Σ 1/(3 - 2n) changes sign of the denominator after n = 1
        let exact: Rational = (1..=50i64).map(|n| Rational::new(1.into(), (3 - 2 * n).into())).sum();
        let i = fixed_point_sum((1..=50i128).map(|n| (3 - 2 * n, 1, false)), 64).unwrap().unwrap();
        assert!(i.contains(&exact) && i.width() < Rational::new(1.into(), (1i64 << 50).into()));
        let alt: Rational = (1..=50i64)
            .map(|n| Rational::new(if n % 2 == 0 { -1 } else { 1 }.into(), n.into()))
            .sum();
        let j = fixed_point_sum((1..=50i128).map(|n| (n, 1, n % 2 == 0)), 64).unwrap().unwrap();
        assert!(j.contains(&alt));
    }

    #[test]
    fn assignments_check_divisibility() {
        assert!(FiniteAssignment::new(12, vec![2, 3, 4], 64).is_ok());
        assert!(matches!(
            FiniteAssignment::new(10, vec![4], 64),
            Err(Error::Divisibility(_))
        ));
        assert!(FiniteAssignment::new(1, vec![], 64).is_err());
    }

    #[test]
    fn spec_examples() {
        let s1 = sum_faulhaber(1, &lam());
        let at = |n| FiniteAssignment::at(n).unwrap();
        assert_eq!(oracle_eval(&s1, &at(10)).unwrap(), OracleValue::Exact(q(55, 1)));
        let two = LambdaExpr::base_pow_lambda(&q(2, 1)).unwrap();
        assert_eq!(oracle_eval(&two, &at(20)).unwrap(), OracleValue::Exact(q(1048576, 1)));
        let p = lam().mul_ref(&LambdaExpr::lambda_pow(q(-2, 1)));
        assert_eq!(oracle_eval(&p, &at(1000)).unwrap(), OracleValue::Exact(q(1, 1000)));
    }

    #[test]
    fn enclosures_for_transcendental_values() {
        let x = LambdaExpr::ln_lambda();
        let v = oracle_eval(&x, &FiniteAssignment::at(1000).unwrap()).unwrap();
        let i = v.interval();
        assert!(i.width() < q(1, 1_000_000));
        assert!((i.to_f64() - 1000f64.ln()).abs() < 1e-12);
        let e = LambdaExpr::exp_lambda(Scalar::from_int(-1));
        assert!(oracle_eval(&e, &FiniteAssignment::at(30).unwrap()).unwrap().as_exact().is_none());
    }

    #[test]
    fn tower_guard() {
        let t = LambdaExpr::lambda_tower(q(1, 1));
        assert_eq!(
            oracle_eval(&t, &FiniteAssignment::at(5).unwrap()).unwrap(),
            OracleValue::Exact(q(3125, 1))
        );
        assert!(matches!(
            oracle_eval(&t, &FiniteAssignment::at(1000).unwrap()),
            Err(Error::Overflow(_))
        ));
        let two = LambdaExpr::base_pow_lambda(&q(2, 1)).unwrap();
        let s = oracle_compare(&two, &t, &FiniteAssignment::at(1000).unwrap()).unwrap();
        assert_eq!(s, Sign::Negative);
    }

    #[test]
    fn log_comparison_finds_crossover() {
        let poly = LambdaExpr::lambda_pow(q(100, 1));
        let g = LambdaExpr::base_pow_lambda(&q(101, 100)).unwrap();
        let big = FiniteAssignment::at(1_000_000).unwrap();
        assert_eq!(oracle_compare(&poly, &g, &big).unwrap(), Sign::Negative);
        let small = FiniteAssignment::at(1000).unwrap();
        assert_eq!(oracle_compare(&poly, &g, &small).unwrap(), Sign::Positive);
    }

    #[test]
    fn identities() {
        let spec = SumSpec::new("n", lam(), Summand::Poly(IndexPoly::index())).unwrap();
        let good = identity_sum(&spec, &sum_faulhaber(1, &lam()), &[10, 100, 1000]).unwrap();
        assert!(good.passed());
        let wrong = lam().powi(2).scale_rational(&q(1, 2));
        let bad = identity_sum(&spec, &wrong, &[10]).unwrap();
        assert!(!bad.passed());
        let f = bad.first_failure().unwrap();
        assert_eq!(f.lhs, OracleValue::Exact(q(55, 1)));
        assert_eq!(f.rhs, OracleValue::Exact(q(50, 1)));
    }

    #[test]
    fn two_sum_identity_at_fifty() {
        let x = q(1, 3);
        let n = 50i64;
        let mut lhs = Rational::zero();
        for k in 1..=n + 1 {
            lhs += q(k, 1) * num_traits::pow(x.clone(), (k - 1) as usize);
        }
        for k in 1..=n {
            lhs += q(k, 1) * num_traits::pow(x.clone(), (2 * n + 1 - k) as usize);
        }
        let g = crate::summation::sum_geometric(&LambdaExpr::rational(x.clone()), &lam(), 8).unwrap();
        let rhs = g.powi(2);
        let rec = oracle_identity(
            |_| Ok(OracleValue::Exact(lhs.clone())),
            &rhs,
            &[FiniteAssignment::at(50).unwrap()],
        )
        .unwrap();
        assert!(rec.passed());
    }

    #[test]
    fn brute_sums_of_each_kind() {
        let a = FiniteAssignment::new(12, vec![12], 256).unwrap();
        let geo = SumSpec::new("n", lam(), Summand::Geometric(LambdaExpr::int(2))).unwrap();
        assert_eq!(sum_spec_at(&geo, &a).unwrap(), OracleValue::Exact(q(8190, 1)));
        let b = SumSpec::new("n", lam(), Summand::Binom(1)).unwrap();
        assert_eq!(sum_spec_at(&b, &a).unwrap(), OracleValue::Exact(q(90, 1)));
        let alt = SumSpec::new("n", lam(), Summand::AlternatingPoly(IndexPoly::index())).unwrap();
        assert_eq!(sum_spec_at(&alt, &a).unwrap(), OracleValue::Exact(q(-6, 1)));
        let rec = SumSpec::new(
            "n",
            lam().scale_rational(&q(1, 4)),
            Summand::Reciprocal { a: q(4, 1), c: lam() },
        )
        .unwrap();
        let v = sum_spec_at(&rec, &a).unwrap();
        assert_eq!(v, OracleValue::Exact(q(1, 16) + q(1, 20) + q(1, 24)));
    }

    #[test]
    fn rates() {
        let x = lam().inv(8).unwrap();
        let r = oracle_convergence(&x, &Scalar::zero(), &[1000, 10000, 100000]).unwrap();
        assert!((r.rate.unwrap() - 1.0).abs() < 1e-9);
        let e = oracle_convergence(&LambdaExpr::int(3), &Scalar::from_int(3), &[10, 20, 30]).unwrap();
        assert!(e.is_exact() && e.meets(5.0));
        let riemann = convergence_of(
            |n| riemann_sum_at(&FuncExpr::power(2), &q(0, 1), &q(1, 1), n, 128),
            &Scalar::ratio(1, 3),
            &[1000, 10000, 100000],
            128,
        )
        .unwrap();
        assert!((riemann.rate.unwrap() - 1.0).abs() < 0.1, "{riemann}");
        let nine = convergence_of(
            |n| {
                let b = Interval::point(q(n as i64 - 1, n as i64)).powi(n as i64, 256).unwrap();
                Ok(OracleValue::Enclosure(b))
            },
            &Scalar::exp_rational(q(-1, 1)),
            &[1000, 10000, 100000],
            256,
        )
        .unwrap();
        assert!((nine.rate.unwrap() - 1.0).abs() < 0.1, "{nine}");
    }

    #[test]
    fn marker_is_sound_for_reciprocal() {
        let exact_den = lam().sub_ref(&LambdaExpr::int(2));
        let t = exact_den.inv(3).unwrap();
        assert_eq!(t.marker().unwrap().scale, ScaleKey::lambda_power(-5));
        let check = marker_soundness(
            |n| Ok(OracleValue::Exact(q(1, n as i64 - 2))),
            &t,
            &[1000, 10000],
        );
        assert!(check.is_err());
        let check = marker_soundness(
            |n| Ok(OracleValue::Exact(q(1, n as i64 - 2))),
            &t,
            &[100, 1000, 10000],
        )
        .unwrap();
        assert!(check.passed(), "{check}");
        for n in [1000i64, 10000] {
            let v = oracle_eval(&t, &FiniteAssignment::at(n as u64).unwrap()).unwrap();
            let err = q(1, n - 2) - v.as_exact().unwrap();
            assert_eq!(err, q(16, 1) / (num_traits::pow(q(n, 1), 4) * q(n - 2, 1)));
        }
    }

    #[test]
    fn strata_counts() {
        let (sum, pow) = strata_total(30);
        assert_eq!(sum, pow);
        let counts = strata_by_enumeration(12);
        for (k, c) in counts.iter().enumerate() {
            assert_eq!(BigInt::from(*c), binomial(12, k as u64));
        }
    }
}
