//! Cardinalities of the sets built on `ℕ = {1, …, λ}`.
//!
//! Sets here are symbolic descriptors: [`card`] returns a λ-expression and
//! nothing is ever enumerated. Finite instantiations live in the oracle.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{LambdaExpr, OrderDecision};
use crate::scalar::{Rational, DEFAULT_PRECISION_CAP};
use crate::summation::{binom_lambda, BinomIndex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    /// `{1, 2, …, U}`.
    NatSegment(LambdaExpr),
    /// `ℤ` without zero, as `{-λ, …, -1} ∪ {1, …, λ}`.
    Integers,
    /// Pairs `p/q` with `p, q ∈ ℕ`, not reduced.
    Rationals,
    /// Words of the given length over an alphabet of `alphabet` letters.
    Strings { alphabet: u32, length: LambdaExpr },
    /// Even numbers of `ℕ`.
    Evens,
    /// Odd numbers of `ℕ`.
    Odds,
    /// `{n² : n ∈ ℕ}`, inside `ℕ_{λ²}`.
    Squares,
    /// Binary strings of length `λ` with exactly `k` ones.
    Stratum(BinomIndex),
    /// A union of pairwise disjoint sets.
    Union(Vec<SetExpr>),
    Product(Vec<SetExpr>),
}

impl SetExpr {
    pub fn naturals() -> SetExpr {
        SetExpr::NatSegment(LambdaExpr::lambda())
    }

    pub fn binary_strings() -> SetExpr {
        SetExpr::Strings {
            alphabet: 2,
            length: LambdaExpr::lambda(),
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::NatSegment(u) => write!(f, "N_({u})"),
            SetExpr::Integers => write!(f, "Z"),
            SetExpr::Rationals => write!(f, "Q"),
            SetExpr::Strings { alphabet, length } => write!(f, "strings({alphabet}, {length})"),
            SetExpr::Evens => write!(f, "evens"),
            SetExpr::Odds => write!(f, "odds"),
            SetExpr::Squares => write!(f, "squares"),
            SetExpr::Stratum(k) => write!(f, "stratum({k})"),
            SetExpr::Union(parts) | SetExpr::Product(parts) => {
                let sep = if matches!(self, SetExpr::Union(_)) { " + " } else { " x " };
                let inner: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", inner.join(sep))
            }
        }
    }
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// `n^L`.
fn word_count(alphabet: u32, length: &LambdaExpr, trunc: usize) -> Result<LambdaExpr> {
    if alphabet == 0 {
        return Err(Error::Domain("alphabet needs at least one letter".into()));
    }
    if length.as_rational().is_some() {
        let l = length.as_integer().ok_or_else(|| {
            Error::Domain(format!("string length {length} is not an integer"))
        })?;
        let l: u32 = l
            .try_into()
            .map_err(|_| Error::Domain(format!("string length {length} out of range")))?;
        return Ok(LambdaExpr::int(alphabet as i64).powi(l));
    }
    LambdaExpr::int(alphabet as i64).pow(length, trunc)
}

/// Cardinality of a set. Unions add and products multiply.
pub fn card(s: &SetExpr) -> Result<LambdaExpr> {
    let lam = LambdaExpr::lambda();
    Ok(match s {
        SetExpr::NatSegment(u) => u.clone(),
        SetExpr::Integers => lam.scale_rational(&Rational::from_integer(2.into())),
        SetExpr::Rationals => lam.powi(2),
        SetExpr::Strings { alphabet, length } => {
            word_count(*alphabet, length, crate::expr::DEFAULT_TRUNC_ORDER)?
        }
        SetExpr::Evens | SetExpr::Odds => lam.scale_rational(&half()),
        SetExpr::Squares => lam,
        SetExpr::Stratum(k) => binom_lambda(k)?,
        SetExpr::Union(parts) => {
            let mut acc = LambdaExpr::zero();
            for p in parts {
                acc = acc.add_ref(&card(p)?);
            }
            acc
        }
        SetExpr::Product(parts) => {
            let mut acc = LambdaExpr::one();
            for p in parts {
                acc = acc.mul_ref(&card(p)?);
            }
            acc
        }
    })
}

/// `|B_k|`, the number of length-`λ` binary strings with `k` ones.
pub fn stratum_card(k: &LambdaExpr) -> Result<LambdaExpr> {
    binom_lambda(&BinomIndex::from_expr(k)?)
}

/// Enumeration rules that are classically claimed to be bijections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MappingScheme {
    /// `1, -1, 2, -2, …` onto `ℤ` without zero.
    InterleaveZ,
    /// The `n`th number onto the `n`th diagonal of the `λ×λ` square of fractions.
    ZigzagQ,
    /// `n ↦ 2n` into `ℕ_{2U}`.
    Double,
    /// `n ↦ n²` into `ℕ_{U²}`.
    Square,
    Identity,
}

impl MappingScheme {
    pub const ALL: [MappingScheme; 5] = [
        MappingScheme::InterleaveZ,
        MappingScheme::ZigzagQ,
        MappingScheme::Double,
        MappingScheme::Square,
        MappingScheme::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MappingScheme::InterleaveZ => "interleave-Z",
            MappingScheme::ZigzagQ => "zigzag-Q",
            MappingScheme::Double => "double",
            MappingScheme::Square => "square",
            MappingScheme::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        MappingScheme::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))
    }

    /// Size of the codomain the scheme claims to exhaust after `steps` steps
    /// taken over `ℕ_λ`. Measured in elements, or in diagonals for `ZigzagQ`.
    pub fn codomain_size(self, steps: &LambdaExpr) -> LambdaExpr {
        let lam = LambdaExpr::lambda();
        match self {
            MappingScheme::InterleaveZ => lam.scale_rational(&Rational::from_integer(2.into())),
            MappingScheme::ZigzagQ => lam
                .scale_rational(&Rational::from_integer(2.into()))
                .sub_ref(&LambdaExpr::one()),
            MappingScheme::Double => steps.scale_rational(&Rational::from_integer(2.into())),
            MappingScheme::Square => steps.powi(2),
            MappingScheme::Identity => steps.clone(),
        }
    }
}

impl fmt::Display for MappingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number of codomain elements left unreached after `steps` domain elements.
/// Every scheme is injective, so `steps` targets are reached.
pub fn mapping_gap(m: MappingScheme, steps: &LambdaExpr) -> Result<LambdaExpr> {
    let size = m.codomain_size(steps);
    if steps.compare(&size, DEFAULT_PRECISION_CAP) == OrderDecision::Greater {
        return Err(Error::Domain(format!(
            "{m} runs out of codomain before {steps} steps"
        )));
    }
    Ok(size.sub_ref(steps))
}

/// Counts the same gap by walking the scheme at `λ = n` for `steps` steps.
pub fn mapping_gap_brute(m: MappingScheme, n: u64, steps: u64) -> Result<u64> {
    let mut reached: HashSet<(i64, i64)> = HashSet::new();
    let n_i = n as i64;
    let codomain: u64 = match m {
        MappingScheme::InterleaveZ => 2 * n,
        MappingScheme::ZigzagQ => 2 * n - 1,
        MappingScheme::Double => 2 * steps,
        MappingScheme::Square => steps * steps,
        MappingScheme::Identity => steps,
    };
    for k in 1..=steps as i64 {
        let target = match m {
            MappingScheme::InterleaveZ => {
                let v = (k + 1) / 2;
                if k % 2 == 1 {
                    (v, 0)
                } else {
                    (-v, 0)
                }
            }
            MappingScheme::ZigzagQ => (k, 0),
            MappingScheme::Double => (2 * k, 0),
            MappingScheme::Square => (k * k, 0),
            MappingScheme::Identity => (k, 0),
        };
        let inside = match m {
            MappingScheme::InterleaveZ => target.0 != 0 && target.0.abs() <= n_i,
            MappingScheme::ZigzagQ => target.0 <= 2 * n_i - 1,
            _ => true,
        };
        if inside {
            reached.insert(target);
        }
    }
    codomain
        .checked_sub(reached.len() as u64)
        .ok_or_else(|| Error::Domain("codomain smaller than image".into()))
}

/// Digits needed to write a list of `list_len` strings of `string_len`
/// digits, and the number of strings that list specifies.
pub fn diag_info_count(list_len: &LambdaExpr, string_len: &LambdaExpr) -> (LambdaExpr, LambdaExpr) {
    (list_len.mul_ref(string_len), list_len.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    fn lam() -> LambdaExpr {
        LambdaExpr::lambda()
    }

    #[test]
    fn basic_cardinalities() {
        assert_eq!(card(&SetExpr::naturals()).unwrap(), lam());
        assert_eq!(card(&SetExpr::Integers).unwrap().to_string(), "2*lam");
        assert_eq!(card(&SetExpr::Rationals).unwrap().to_string(), "lam^2");
        assert_eq!(card(&SetExpr::Odds).unwrap().to_string(), "lam/2");
        let three = SetExpr::Strings {
            alphabet: 3,
            length: lam(),
        };
        assert_eq!(card(&three).unwrap().to_string(), "3^lam");
        assert_eq!(card(&SetExpr::binary_strings()).unwrap().to_string(), "2^lam");
        let short = SetExpr::Strings {
            alphabet: 26,
            length: LambdaExpr::int(2),
        };
        assert_eq!(card(&short).unwrap(), LambdaExpr::int(676));
        let evens_odds = SetExpr::Union(vec![SetExpr::Evens, SetExpr::Odds]);
        assert_eq!(card(&evens_odds).unwrap(), lam());
    }

    #[test]
    fn strings_with_shifted_length() {
        let s = SetExpr::Strings {
            alphabet: 26,
            length: lam().sub_ref(&LambdaExpr::int(2)),
        };
        let c = card(&s).unwrap();
        let full = LambdaExpr::base_pow_lambda(&q(26, 1)).unwrap().scale_rational(&q(1, 676));
        assert_eq!(c, full);
    }

    #[test]
    fn unions_and_products() {
        let n2 = SetExpr::NatSegment(lam().scale_rational(&q(2, 1)));
        let u = SetExpr::Union(vec![SetExpr::naturals(), n2.clone()]);
        assert_eq!(card(&u).unwrap().to_string(), "3*lam");
        let p = SetExpr::Product(vec![SetExpr::naturals(), SetExpr::naturals()]);
        assert_eq!(card(&p).unwrap(), card(&SetExpr::Rationals).unwrap());
    }

    #[test]
    fn strata() {
        assert_eq!(stratum_card(&LambdaExpr::int(2)).unwrap().to_string(), "lam^2/2 - lam/2");
        assert_eq!(stratum_card(&lam().sub_ref(&LambdaExpr::one())).unwrap(), lam());
        for k in 0..6 {
            let a = stratum_card(&LambdaExpr::int(k)).unwrap();
            let b = stratum_card(&lam().sub_ref(&LambdaExpr::int(k))).unwrap();
            assert!(a.sub_ref(&b).is_zero());
        }
        assert!(stratum_card(&lam().scale_rational(&q(1, 3))).is_err());
    }

    #[test]
    fn gaps() {
        assert_eq!(mapping_gap(MappingScheme::InterleaveZ, &lam()).unwrap(), lam());
        assert_eq!(
            mapping_gap(MappingScheme::ZigzagQ, &lam()).unwrap(),
            lam().sub_ref(&LambdaExpr::one())
        );
        assert!(mapping_gap(MappingScheme::Identity, &lam()).unwrap().is_zero());
        assert_eq!(mapping_gap(MappingScheme::Double, &lam()).unwrap(), lam());
        assert_eq!(
            mapping_gap(MappingScheme::Square, &lam()).unwrap(),
            lam().powi(2).sub_ref(&lam())
        );
    }

    #[test]
    fn gaps_match_enumeration() {
        for m in MappingScheme::ALL {
            for n in [1u64, 7, 100, 1000] {
                let formula = mapping_gap(m, &lam()).unwrap();
                let at_n = formula.as_rational_polynomial().unwrap();
                let nn = Rational::from_integer(n.into());
                let v = at_n.iter().rev().fold(Rational::from_integer(0.into()), |acc, c| acc * &nn + c);
                let brute = mapping_gap_brute(m, n, n).unwrap();
                assert_eq!(v, Rational::from_integer(brute.into()), "{m} at {n}");
            }
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for m in MappingScheme::ALL {
            assert_eq!(MappingScheme::from_name(m.name()).unwrap(), m);
        }
        assert!(MappingScheme::from_name("cantor").is_err());
    }

    #[test]
    fn diagonal_information() {
        let (digits, strings) = diag_info_count(&lam(), &lam());
        assert_eq!(digits, lam().powi(2));
        assert_eq!(strings, lam());
        let (d1, s1) = diag_info_count(&LambdaExpr::one(), &lam());
        assert_eq!((d1, s1), (lam(), LambdaExpr::one()));
        let two = LambdaExpr::base_pow_lambda(&q(2, 1)).unwrap();
        let tower = LambdaExpr::lambda_tower(q(1, 1));
        assert_eq!(two.compare(&tower, DEFAULT_PRECISION_CAP), OrderDecision::Less);
    }
}
