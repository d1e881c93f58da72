//! Closed forms for `Σ_{n=1}^{U}` over a fixed summand grammar.

mod closed;
mod harmonic;
mod strata;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::expr::{LambdaExpr, OrderDecision};
use crate::scalar::{Rational, DEFAULT_PRECISION_CAP};

pub use closed::{
    bernoulli, bernoulli_table, faulhaber_coefficients, sum_binom, sum_faulhaber, sum_geom_squared,
    sum_geom_squared_upto, sum_geometric, sum_weighted_geometric,
};
pub(crate) use closed::binomial;
pub use harmonic::{
    harmonic_exact, sum_alternating_linear, sum_alternating_linear_upto,
    sum_alternating_reciprocal, sum_harmonic, sum_shifted_reciprocal,
};
pub use strata::{binom_falling, binom_lambda, BinomIndex};

/// A polynomial in the summation index whose coefficients may involve λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexPoly {
    coeffs: Vec<LambdaExpr>,
}

impl IndexPoly {
    pub fn new(coeffs: Vec<LambdaExpr>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IndexPoly { coeffs }
    }

    /// The index itself, `n`.
    pub fn index() -> Self {
        IndexPoly::new(vec![LambdaExpr::zero(), LambdaExpr::one()])
    }

    pub fn constant(c: LambdaExpr) -> Self {
        IndexPoly::new(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut v = vec![LambdaExpr::zero(); k + 1];
        v[k] = LambdaExpr::one();
        IndexPoly::new(v)
    }

    pub fn coeffs(&self) -> &[LambdaExpr] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &IndexPoly) -> IndexPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = LambdaExpr::zero();
        IndexPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs
                        .get(i)
                        .unwrap_or(&zero)
                        .add_ref(other.coeffs.get(i).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> IndexPoly {
        IndexPoly::new(self.coeffs.iter().map(|c| c.neg_ref()).collect())
    }

    pub fn mul(&self, other: &IndexPoly) -> IndexPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return IndexPoly::new(Vec::new());
        }
        let mut out = vec![LambdaExpr::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        IndexPoly::new(out)
    }

    pub fn scale(&self, c: &LambdaExpr) -> IndexPoly {
        IndexPoly::new(self.coeffs.iter().map(|x| x.mul_ref(c)).collect())
    }

    /// Value at `n = x`.
    pub fn at(&self, x: &LambdaExpr) -> LambdaExpr {
        let mut acc = LambdaExpr::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// `p(a + b n)` as a polynomial in `n`.
    pub fn compose_affine(&self, a: &LambdaExpr, b: &LambdaExpr) -> IndexPoly {
        let lin = IndexPoly::new(vec![a.clone(), b.clone()]);
        let mut acc = IndexPoly::new(Vec::new());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&IndexPoly::constant(c.clone()));
        }
        acc
    }

    /// `Σ_{n=1}^{U} p(n)`.
    pub fn sum_to(&self, u: &LambdaExpr) -> LambdaExpr {
        self.coeffs
            .iter()
            .enumerate()
            .fold(LambdaExpr::zero(), |acc, (k, c)| {
                acc.add_ref(&c.mul_ref(&sum_faulhaber(k, u)))
            })
    }
}

impl fmt::Display for IndexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = match k {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{k}"),
            };
            parts.push(match (k, c == &LambdaExpr::one()) {
                (0, _) => format!("({c})"),
                (_, true) => n,
                _ => format!("({c})*{n}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Summands with a closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    /// `p(n)`.
    Poly(IndexPoly),
    /// `r^n`.
    Geometric(LambdaExpr),
    /// `n r^n`.
    IndexGeometric(LambdaExpr),
    /// `C(n + b, n)`.
    Binom(u32),
    /// `1/(a n + c)`; `c` may involve λ.
    Reciprocal { a: Rational, c: LambdaExpr },
    /// `(-1)^(n+1) p(n)`.
    AlternatingPoly(IndexPoly),
    /// `(-1)^(n+1)/n`.
    AlternatingReciprocal,
}

/// `Σ_{n=1}^{upper} body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    pub index: String,
    pub upper: LambdaExpr,
    pub body: Summand,
}

impl SumSpec {
    pub fn new(index: &str, upper: LambdaExpr, body: Summand) -> Result<Self> {
        let spec = SumSpec {
            index: index.to_string(),
            upper,
            body,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let coeffs = self.upper.as_rational_polynomial().ok_or_else(|| {
            Error::Grammar(format!(
                "upper limit `{}` must be a polynomial in lam with rational coefficients",
                self.upper
            ))
        })?;
        if self.upper.as_rational().is_some() {
            let u = self.upper.as_rational().expect("checked");
            if !u.is_integer() || u.is_negative() {
                return Err(Error::Grammar(format!(
                    "finite upper limit {u} must be a non-negative integer"
                )));
            }
        } else if coeffs.is_empty()
            || self.upper.compare(&LambdaExpr::one(), DEFAULT_PRECISION_CAP) != OrderDecision::Greater
        {
            return Err(Error::Grammar(format!(
                "upper limit `{}` must exceed the lower limit 1",
                self.upper
            )));
        }
        if let Summand::Reciprocal { a, .. } = &self.body {
            if !a.is_positive() {
                return Err(Error::Grammar(format!("reciprocal slope {a} must be positive")));
            }
        }
        Ok(())
    }

    /// Closed form of the sum.
    pub fn evaluate(&self, trunc: usize) -> Result<LambdaExpr> {
        let u = &self.upper;
        let one = LambdaExpr::one();
        match &self.body {
            Summand::Poly(p) => Ok(p.sum_to(u)),
            Summand::Geometric(r) => Ok(sum_geometric(r, u, trunc)?.sub_ref(&one)),
            Summand::IndexGeometric(r) => Ok(r.mul_ref(&sum_weighted_geometric(r, u, trunc)?)),
            Summand::Binom(b) => Ok(sum_binom(*b as usize, &u.add_ref(&one)).sub_ref(&one)),
            Summand::Reciprocal { a, c } => sum_shifted_reciprocal(a, c, u, trunc),
            Summand::AlternatingPoly(p) => alternating_poly(p, u),
            Summand::AlternatingReciprocal => sum_alternating_reciprocal(u, trunc),
        }
    }
}

/// Pairs consecutive terms: `Σ_{n=1}^{2V} (-1)^(n+1) p(n) = Σ_{j=1}^{V} (p(2j-1) - p(2j))`.
fn alternating_poly(p: &IndexPoly, u: &LambdaExpr) -> Result<LambdaExpr> {
    if p.degree() == Some(1) && p.coeffs()[0].is_zero() && u.as_rational().is_none() {
        return Ok(sum_alternating_linear_upto(u)?.mul_ref(&p.coeffs()[1]));
    }
    let two = LambdaExpr::int(2);
    let one = LambdaExpr::one();
    let paired = p
        .compose_affine(&one.neg_ref(), &two)
        .add(&p.compose_affine(&LambdaExpr::zero(), &two).neg());
    match crate::expr::parity_eval(u) {
        crate::expr::ParityOutcome::Value(sign) => {
            let half = |x: &LambdaExpr| x.scale_rational(&Rational::new(BigInt::from(1), BigInt::from(2)));
            if sign == one {
                Ok(paired.sum_to(&half(u)))
            } else {
                let v = half(&u.sub_ref(&one));
                Ok(paired.sum_to(&v).add_ref(&p.at(u)))
            }
        }
        crate::expr::ParityOutcome::ParityDependent => Err(Error::ParityDependent(format!(
            "the last sign of an alternating sum of length `{u}` depends on its parity"
        ))),
    }
}

/// A recorded, explicitly applied change of summation variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewrite {
    pub rule: &'static str,
    pub before: String,
    pub after: String,
    /// Value of `after - before`; zero for an exact rewrite.
    pub delta: LambdaExpr,
}

/// Reads `Σ_{n=1}^{U} p(n)` from the other end: `Σ_{n=0}^{U-1} p(U - n)`,
/// returned as the polynomial `n ↦ p(U - n)` over `0..U-1`.
pub fn reverse_index(p: &IndexPoly, u: &LambdaExpr) -> (IndexPoly, Rewrite) {
    let reversed = p.compose_affine(u, &LambdaExpr::int(-1));
    let lhs = p.sum_to(u);
    // Σ_{n=0}^{U-1} q(n) = q(0) + Σ_{n=1}^{U-1} q(n)
    let rhs = reversed
        .at(&LambdaExpr::zero())
        .add_ref(&reversed.sum_to(&u.sub_ref(&LambdaExpr::one())));
    let rw = Rewrite {
        rule: "reverse index",
        before: format!("sum(n=1..{u}, {p})"),
        after: format!("sum(n=0..{}, {reversed})", u.sub_ref(&LambdaExpr::one())),
        delta: rhs.sub_ref(&lhs),
    };
    (reversed, rw)
}

/// Returns `Σ_{n=1}^{U}` of `p` and of `p` with one extra unit added to the
/// index shift, together with the recorded difference between the two.
pub fn shift_by_one(p: &IndexPoly, shifted: &IndexPoly, u: &LambdaExpr) -> Rewrite {
    let a = p.sum_to(u);
    let b = shifted.sum_to(u);
    Rewrite {
        rule: "one extra term",
        before: format!("sum(n=1..{u}, {p})"),
        after: format!("sum(n=1..{u}, {shifted})"),
        delta: b.sub_ref(&a),
    }
}

impl Rewrite {
    pub fn is_exact(&self) -> bool {
        self.delta.is_zero()
    }
}
