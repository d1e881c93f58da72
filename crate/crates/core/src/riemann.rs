//! Riemann sums with `λ` subintervals, checked against closed-form integrals.
//!
//! Integrands are finite sums of `c·x^k·e^(s·x)`. A sum over
//! `j = 1..λ` with `dx = (b - a)/λ` samples right endpoints; each term
//! expands binomially into sums `Σ_j j^i r^j` with `r = e^(s·dx)`, which are
//! evaluated by a recurrence in `i` (or by Faulhaber when `s = 0`).

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expr::{LambdaExpr, ScaleKey};
use crate::scalar::{Rational, Scalar, Sign, DEFAULT_PRECISION_CAP};
use crate::summation::{binomial, shift_by_one, sum_faulhaber, sum_geom_squared, IndexPoly, Rewrite};

/// `coeff · x^k · e^(s·x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncTerm {
    pub coeff: Scalar,
    pub k: u32,
    pub s: Scalar,
}

/// A finite sum of [`FuncTerm`]s, with like terms merged.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FuncExpr {
    terms: Vec<FuncTerm>,
}

impl FuncExpr {
    pub fn new(terms: Vec<FuncTerm>) -> Self {
        let mut out: Vec<FuncTerm> = Vec::new();
        for t in terms {
            if t.coeff.is_zero() {
                continue;
            }
            match out.iter_mut().find(|u| u.k == t.k && u.s.structurally_eq(&t.s)) {
                Some(u) => u.coeff = &u.coeff + &t.coeff,
                None => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        out.sort_by(|a, b| b.k.cmp(&a.k).then_with(|| a.s.structural_cmp(&b.s)));
        FuncExpr { terms: out }
    }

    pub fn constant(c: Scalar) -> Self {
        FuncExpr::new(vec![FuncTerm {
            coeff: c,
            k: 0,
            s: Scalar::zero(),
        }])
    }

    /// `x^k`.
    pub fn power(k: u32) -> Self {
        FuncExpr::new(vec![FuncTerm {
            coeff: Scalar::one(),
            k,
            s: Scalar::zero(),
        }])
    }

    pub fn x() -> Self {
        FuncExpr::power(1)
    }

    /// `e^(s·x)`.
    pub fn exp_linear(s: Scalar) -> Self {
        FuncExpr::new(vec![FuncTerm {
            coeff: Scalar::one(),
            k: 0,
            s,
        }])
    }

    pub fn terms(&self) -> &[FuncTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the expression does not depend on `x`.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [t] if t.k == 0 && t.s.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &FuncExpr) -> FuncExpr {
        FuncExpr::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn neg(&self) -> FuncExpr {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, other: &FuncExpr) -> FuncExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> FuncExpr {
        FuncExpr::new(
            self.terms
                .iter()
                .map(|t| FuncTerm {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &FuncExpr) -> FuncExpr {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                out.push(FuncTerm {
                    coeff: &a.coeff * &b.coeff,
                    k: a.k + b.k,
                    s: &a.s + &b.s,
                });
            }
        }
        FuncExpr::new(out)
    }

    pub fn powi(&self, n: u32) -> FuncExpr {
        (0..n).fold(FuncExpr::constant(Scalar::one()), |acc, _| acc.mul(self))
    }

    /// `F(x)` with `F' = f`, evaluated at a point.
    pub fn antiderivative_at(&self, x: &Scalar) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for t in &self.terms {
            acc = &acc + &(&t.coeff * &term_antiderivative(t.k, &t.s, x)?);
        }
        Ok(acc)
    }

    /// `∫_a^b f(x) dx` from the antiderivative.
    pub fn integral(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(&self.antiderivative_at(b)? - &self.antiderivative_at(a)?)
    }
}

/// Antiderivative of `x^k e^(sx)` at `x`:
/// `x^(k+1)/(k+1)` for `s = 0`, otherwise
/// `e^(sx) Σ_i (-1)^i k!/(k-i)! x^(k-i) / s^(i+1)`.
fn term_antiderivative(k: u32, s: &Scalar, x: &Scalar) -> Result<Scalar> {
    if s.is_zero() {
        return Ok(x.powi(k as i64 + 1)?.scale(&Rational::new(1.into(), (k + 1).into())));
    }
    let mut sum = Scalar::zero();
    let mut falling = BigInt::from(1);
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let c = Rational::from_integer(&falling * sign);
        let part = (&power_or_one(x, k - i)? * &s.powi(-(i as i64 + 1))?).scale(&c);
        sum = &sum + &part;
        falling *= BigInt::from(k - i);
    }
    Ok(&(s * x).exp()? * &sum)
}

fn power_or_one(x: &Scalar, n: u32) -> Result<Scalar> {
    if n == 0 {
        Ok(Scalar::one())
    } else {
        x.powi(n as i64)
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if !t.coeff.is_one() || (t.k == 0 && t.s.is_zero()) {
                factors.push(if t.coeff.term_count() > 1 {
                    format!("({})", t.coeff)
                } else {
                    t.coeff.to_string()
                });
            }
            match t.k {
                0 => {}
                1 => factors.push("x".into()),
                k => factors.push(format!("x^{k}")),
            }
            if !t.s.is_zero() {
                if t.s.is_one() {
                    factors.push("exp(x)".into());
                } else {
                    factors.push(format!("exp({}*x)", t.s.to_factor_string()));
                }
            }
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// `Σ_{j=1}^{λ} j^i r^j` for `i = 0..=k`, `r = e^(h s / λ)`.
fn index_power_sums(s: &Scalar, h: &Scalar, k: u32, trunc: usize) -> Result<Vec<LambdaExpr>> {
    let lam = LambdaExpr::lambda();
    if s.is_zero() {
        return Ok((0..=k as usize).map(|i| sum_faulhaber(i, &lam)).collect());
    }
    let sh = s * h;
    let step = LambdaExpr::monomial(sh.clone(), ScaleKey::lambda_power(-1));
    let r = step.exp(trunc)?;
    let r_top = LambdaExpr::constant(sh).add_ref(&step).exp(trunc)?;
    let inv = LambdaExpr::one().sub_ref(&r).inv(trunc)?;
    let mut out: Vec<LambdaExpr> = vec![r.sub_ref(&r_top).mul_ref(&inv)];
    let mut lam_pow = LambdaExpr::one();
    for i in 1..=k as usize {
        lam_pow = lam_pow.mul_ref(&lam);
        // (1 - r) S_i = Σ_{t<i} C(i,t) (-1)^(i-1-t) S_t - λ^i r^(λ+1)
        let mut acc = lam_pow.mul_ref(&r_top).neg_ref();
        for (t, st) in out.iter().enumerate() {
            let mut c = Rational::from_integer(binomial(i, t));
            if (i - 1 - t) % 2 == 1 {
                c = -c;
            }
            acc = acc.add_ref(&st.scale_rational(&c));
        }
        out.push(acc.mul_ref(&inv));
    }
    Ok(out)
}

fn positive_width(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    let h = b - a;
    match h.sign(DEFAULT_PRECISION_CAP) {
        Sign::Positive => Ok(h),
        Sign::Undecided => Err(Error::Undecided(format!("sign of {b} - {a}"))),
        _ => Err(Error::Domain(format!("integration bounds need a < b, got [{a}, {b}]"))),
    }
}

/// `Σ_{j=1}^{λ} f(a + j·dx)·dx` with `dx = (b - a)/λ`.
pub fn riemann_sum(f: &FuncExpr, a: &Scalar, b: &Scalar, trunc: usize) -> Result<LambdaExpr> {
    let h = positive_width(a, b)?;
    let dx = LambdaExpr::monomial(h.clone(), ScaleKey::lambda_power(-1));
    let mut total = LambdaExpr::zero();
    for t in &f.terms {
        let sums = index_power_sums(&t.s, &h, t.k, trunc)?;
        let mut acc = LambdaExpr::zero();
        let mut dx_pow = LambdaExpr::one();
        for (i, si) in sums.iter().enumerate() {
            let rest = t.k - i as u32;
            if rest == 0 || !a.is_zero() {
                let c = power_or_one(a, rest)?.scale(&Rational::from_integer(
                    binomial(t.k as usize, i),
                ));
                acc = acc.add_ref(&dx_pow.mul_ref(si).scale_scalar(&c));
            }
            dx_pow = dx_pow.mul_ref(&dx);
        }
        let pref = &t.coeff * &(&t.s * a).exp()?;
        total = total.add_ref(&acc.mul_ref(&dx).scale_scalar(&pref));
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Match,
    Mismatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Match => write!(f, "match"),
            Verdict::Mismatch => write!(f, "mismatch"),
        }
    }
}

/// A λ-sum, its standard part, and the value it is meant to reproduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralCheckReport {
    pub riemann_expr: LambdaExpr,
    pub standard_part: Scalar,
    pub analytic_value: Scalar,
    pub verdict: Verdict,
}

impl IntegralCheckReport {
    fn build(riemann_expr: LambdaExpr, analytic_value: Scalar) -> Result<Self> {
        let standard_part = riemann_expr.standard_part()?.into_scalar();
        let verdict = match (&standard_part - &analytic_value).sign(DEFAULT_PRECISION_CAP) {
            Sign::Zero => Verdict::Match,
            Sign::Undecided => {
                return Err(Error::Undecided(format!(
                    "{standard_part} against {analytic_value}"
                )))
            }
            _ => Verdict::Mismatch,
        };
        Ok(IntegralCheckReport {
            riemann_expr,
            standard_part,
            analytic_value,
            verdict,
        })
    }

    pub fn is_match(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

impl fmt::Display for IntegralCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: sum = {}, ~ {}, integral {}",
            self.verdict, self.riemann_expr, self.standard_part, self.analytic_value
        )
    }
}

/// Compares the standard part of the Riemann sum with `F(b) - F(a)`.
pub fn integral_check(
    f: &FuncExpr,
    a: &Scalar,
    b: &Scalar,
    trunc: usize,
) -> Result<IntegralCheckReport> {
    let sum = riemann_sum(f, a, b, trunc)?;
    IntegralCheckReport::build(sum, f.integral(a, b)?)
}

/// The `λ×λ` grid of unit cells read along its diagonals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalReport {
    /// `1 + 2 + … + λ`, the diagonals through the top-left corner.
    pub upper_triangle: LambdaExpr,
    /// `1 + 2 + … + (λ - 1)`, the rest.
    pub lower_triangle: LambdaExpr,
    /// Total number of cells, `λ²`.
    pub term_count: LambdaExpr,
    /// `λ²·dx²`.
    pub value: LambdaExpr,
    /// `2·Σ_{j=1}^{λ} j dx·dx`, the reading that treats both triangles alike.
    pub twice_single: LambdaExpr,
    /// `twice_single - value`.
    pub difference: LambdaExpr,
}

/// `∫_0^b ∫_0^b dx dy` as a grid sum, split into its two triangles.
pub fn double_riemann_diag(b: &Scalar, trunc: usize) -> Result<DiagonalReport> {
    let h = positive_width(&Scalar::zero(), b)?;
    let lam = LambdaExpr::lambda();
    let upper_triangle = sum_faulhaber(1, &lam);
    let lower_triangle = sum_faulhaber(1, &lam.sub_ref(&LambdaExpr::one()));
    let term_count = upper_triangle.add_ref(&lower_triangle);
    let dx = LambdaExpr::monomial(h, ScaleKey::lambda_power(-1));
    let dx2 = dx.mul_ref(&dx);
    let value = term_count.mul_ref(&dx2);
    let twice_single = riemann_sum(&FuncExpr::x(), &Scalar::zero(), b, trunc)?
        .scale_rational(&Rational::from_integer(2.into()));
    let difference = twice_single.sub_ref(&value);
    Ok(DiagonalReport {
        upper_triangle,
        lower_triangle,
        term_count,
        value,
        twice_single,
        difference,
    })
}

/// The two diagonal halves of `(Σ_{n=0}^{λ} x^n)²` at `x = 1 - b/λ`, each
/// times `dx²`, against `∫_0^b t e^(-t) dt` and `e^(-2b) ∫_0^b t e^t dt`.
pub fn geom_square_halves(
    b: &Scalar,
    trunc: usize,
) -> Result<(IntegralCheckReport, IntegralCheckReport)> {
    let h = positive_width(&Scalar::zero(), b)?;
    let dx = LambdaExpr::monomial(h.clone(), ScaleKey::lambda_power(-1));
    let x = LambdaExpr::one().sub_ref(&dx);
    let (first, second) = sum_geom_squared(&x, trunc)?;
    let dx2 = dx.mul_ref(&dx);
    let zero = Scalar::zero();
    let t = FuncExpr::x();
    let a1 = t.mul(&FuncExpr::exp_linear(Scalar::from_int(-1))).integral(&zero, &h)?;
    let a2 = &t.mul(&FuncExpr::exp_linear(Scalar::one())).integral(&zero, &h)?
        * &h.scale(&Rational::from_integer((-2).into())).exp()?;
    Ok((
        IntegralCheckReport::build(first.mul_ref(&dx2), a1)?,
        IntegralCheckReport::build(second.mul_ref(&dx2), a2)?,
    ))
}

/// Both halves together against `(e^(-b) - 1)²`.
pub fn geom_square_bridge(b: &Scalar, trunc: usize) -> Result<IntegralCheckReport> {
    let (first, second) = geom_square_halves(b, trunc)?;
    let total = first.riemann_expr.add_ref(&second.riemann_expr);
    let e = &(-b).exp()? - &Scalar::one();
    IntegralCheckReport::build(total, &e * &e)
}

/// `Σ (λ - n) n dx³` replaced by `Σ (λ - n + 1) n dx³`, with the change recorded.
pub fn cubic_extra_term(b: &Scalar) -> Result<Rewrite> {
    let h = positive_width(&Scalar::zero(), b)?;
    let lam = LambdaExpr::lambda();
    let dx3 = LambdaExpr::monomial(h.powi(3)?, ScaleKey::lambda_power(-3));
    let p = IndexPoly::new(vec![LambdaExpr::zero(), lam.clone(), LambdaExpr::int(-1)]).scale(&dx3);
    let shifted = IndexPoly::new(vec![
        LambdaExpr::zero(),
        lam.add_ref(&LambdaExpr::one()),
        LambdaExpr::int(-1),
    ])
    .scale(&dx3);
    Ok(shift_by_one(&p, &shifted, &lam))
}
