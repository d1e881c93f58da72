use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::parser::{Arg, Ast, CmpOp};
use crate::error::{Error, Result};
use crate::expr::{parity_eval, LambdaExpr, OrderDecision, ParityOutcome, DEFAULT_TRUNC_ORDER};
use crate::oracle::{oracle_eval, FiniteAssignment, OracleValue};
use crate::riemann::{riemann_sum, FuncExpr};
use crate::scalar::{Rational, Scalar, DEFAULT_PRECISION_CAP};
use crate::scenarios::{run_scenario, ScenarioParams, ScenarioReport};
use crate::sets::{card, SetExpr};
use crate::summation::{binom_falling, BinomIndex, IndexPoly, SumSpec, Summand};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub trunc: usize,
    /// Bit cap for sign decisions.
    pub precision: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            trunc: DEFAULT_TRUNC_ORDER,
            precision: DEFAULT_PRECISION_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Expr(LambdaExpr),
    Set(SetExpr),
    Order(OrderDecision),
    Bool(bool),
    Report(Box<ScenarioReport>),
    Oracle(Vec<(u64, OracleValue)>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Expr(x) => write!(f, "{x}"),
            Value::Set(s) => write!(f, "{s}"),
            Value::Order(o) => write!(f, "{o}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Report(r) => write!(f, "{}", r.to_string().trim_end()),
            Value::Oracle(points) => {
                let parts: Vec<String> = points.iter().map(|(n, v)| format!("N={n}: {v}")).collect();
                f.write_str(&parts.join("; "))
            }
        }
    }
}

fn rq(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn grammar(msg: impl Into<String>) -> Error {
    Error::Grammar(msg.into())
}

fn constant(name: &str) -> Option<Scalar> {
    match name {
        "pi" => Some(Scalar::pi()),
        "gamma" => Some(Scalar::euler_gamma()),
        "e" => Some(Scalar::exp_rational(Rational::one())),
        _ => None,
    }
}

fn set_named(name: &str) -> Option<SetExpr> {
    Some(match name {
        "N" => SetExpr::naturals(),
        "Z" => SetExpr::Integers,
        "Q" => SetExpr::Rationals,
        "B" => SetExpr::binary_strings(),
        "evens" => SetExpr::Evens,
        "odds" => SetExpr::Odds,
        "squares" => SetExpr::Squares,
        _ => return None,
    })
}

/// `(var, lo, hi)` of a range argument, with the default variable name.
fn range<'a>(args: &'a [Arg], default: &'a str) -> Result<(&'a str, &'a Ast, &'a Ast, &'a Ast)> {
    match args {
        [Arg::Range { var, lo, hi }, Arg::Expr(body)] => {
            Ok((var.as_deref().unwrap_or(default), lo, hi, body))
        }
        _ => Err(grammar("expected (var=lo..hi, body)")),
    }
}

fn plain<'a>(args: &'a [Arg], n: usize, name: &str) -> Result<Vec<&'a Ast>> {
    let out: Vec<&Ast> = args
        .iter()
        .filter_map(|a| match a {
            Arg::Expr(e) => Some(e),
            _ => None,
        })
        .collect();
    if out.len() != n || args.len() != n {
        return Err(grammar(format!("{name} takes {n} argument(s)")));
    }
    Ok(out)
}

pub struct Evaluator {
    pub opts: EvalOptions,
    env: Vec<(String, LambdaExpr)>,
}

impl Evaluator {
    pub fn new(opts: EvalOptions) -> Self {
        Evaluator { opts, env: Vec::new() }
    }

    pub fn eval(&mut self, ast: &Ast) -> Result<Value> {
        let t = self.opts.trunc;
        Ok(match ast {
            Ast::Num(q) => Value::Expr(LambdaExpr::rational(q.clone())),
            Ast::Lam => Value::Expr(LambdaExpr::lambda()),
            Ast::Ident(name) => {
                if let Some((_, v)) = self.env.iter().rev().find(|(k, _)| k == name) {
                    Value::Expr(v.clone())
                } else if let Some(c) = constant(name) {
                    Value::Expr(LambdaExpr::constant(c))
                } else if let Some(s) = set_named(name) {
                    Value::Set(s)
                } else {
                    return Err(Error::UnknownIdentifier(name.clone()));
                }
            }
            Ast::Neg(a) => Value::Expr(self.expr(a)?.neg_ref()),
            Ast::Add(a, b) => Value::Expr(self.expr(a)?.add_ref(&self.expr(b)?)),
            Ast::Sub(a, b) => Value::Expr(self.expr(a)?.sub_ref(&self.expr(b)?)),
            Ast::Mul(a, b) => Value::Expr(self.expr(a)?.mul_ref(&self.expr(b)?)),
            Ast::Div(a, b) => Value::Expr(self.expr(a)?.checked_div(&self.expr(b)?, t)?),
            Ast::Pow(a, b) => {
                let base = self.expr(a)?;
                let e = self.expr(b)?;
                Value::Expr(self.power(&base, &e)?)
            }
            Ast::Std(a) => Value::Expr(LambdaExpr::constant(self.expr(a)?.standard_part()?.into_scalar())),
            Ast::Cmp(op, a, b) => {
                let (x, y) = (self.expr(a)?, self.expr(b)?);
                let d = self.decide(&x, &y)?;
                Value::Bool(match op {
                    CmpOp::Lt => d == OrderDecision::Less,
                    CmpOp::Le => d != OrderDecision::Greater,
                    CmpOp::Gt => d == OrderDecision::Greater,
                    CmpOp::Ge => d != OrderDecision::Less,
                    CmpOp::Eq => d == OrderDecision::Equal,
                })
            }
            Ast::Call(name, args) => self.call(name, args)?,
        })
    }

    pub fn expr(&mut self, ast: &Ast) -> Result<LambdaExpr> {
        match self.eval(ast)? {
            Value::Expr(x) => Ok(x),
            other => Err(grammar(format!("`{ast}` is {other}, not a number"))),
        }
    }

    fn scalar(&mut self, ast: &Ast) -> Result<Scalar> {
        self.expr(ast)?
            .as_scalar()
            .ok_or_else(|| Error::Domain(format!("`{ast}` must be a constant")))
    }

    fn decide(&self, a: &LambdaExpr, b: &LambdaExpr) -> Result<OrderDecision> {
        match a.try_compare(b, self.opts.precision)? {
            OrderDecision::ParityDependent => Err(Error::ParityDependent(format!("`{a}` versus `{b}`"))),
            d => Ok(d),
        }
    }

    pub fn power(&self, base: &LambdaExpr, e: &LambdaExpr) -> Result<LambdaExpr> {
        if *base == LambdaExpr::int(-1) {
            return match parity_eval(e) {
                ParityOutcome::Value(v) => Ok(v),
                ParityOutcome::ParityDependent => Err(Error::ParityDependent(format!(
                    "(-1)^({e}) depends on the parity of lam"
                ))),
            };
        }
        base.pow(e, self.opts.trunc)
    }

    fn call(&mut self, name: &str, args: &[Arg]) -> Result<Value> {
        let t = self.opts.trunc;
        let one = |s: &mut Self| -> Result<LambdaExpr> { s.expr(plain(args, 1, name)?[0]) };
        Ok(match name {
            "sum" => {
                let (var, lo, hi, body) = range(args, "n")?;
                Value::Expr(self.sum(var, lo, hi, body)?)
            }
            "int" => {
                let (var, lo, hi, body) = range(args, "x")?;
                let a = self.scalar(lo)?;
                let b = self.scalar(hi)?;
                let f = self.func(body, var)?;
                Value::Expr(riemann_sum(&f, &a, &b, t)?)
            }
            "exp" => Value::Expr(one(self)?.exp(t)?),
            "ln" => Value::Expr(one(self)?.ln(t)?),
            "pow" => {
                let p = plain(args, 2, name)?;
                let (a, b) = (self.expr(p[0])?, self.expr(p[1])?);
                Value::Expr(self.power(&a, &b)?)
            }
            "O" => {
                let x = one(self)?;
                match x.terms() {
                    [m] if x.is_exact() => Value::Expr(LambdaExpr::big_o(m.key.clone())),
                    _ => return Err(Error::Domain(format!("O(...) takes a single monomial, not `{x}`"))),
                }
            }
            "compare" => {
                let p = plain(args, 2, name)?;
                let (a, b) = (self.expr(p[0])?, self.expr(p[1])?);
                Value::Order(self.decide(&a, &b)?)
            }
            "binom" => {
                let p = plain(args, 2, name)?;
                let (u, k) = (self.expr(p[0])?, self.expr(p[1])?);
                Value::Expr(self.binom(&u, &k)?)
            }
            "card" => {
                let p = plain(args, 1, name)?;
                Value::Expr(card(&self.set(p[0])?)?)
            }
            "seg" | "strings" | "stratum" | "union" | "product" => {
                Value::Set(self.set(&Ast::Call(name.to_string(), args.to_vec()))?)
            }
            "scenario" => {
                let mut params = ScenarioParams {
                    trunc: t,
                    ..ScenarioParams::default()
                };
                let scenario = match args.first() {
                    Some(Arg::Expr(Ast::Ident(s))) => s.clone(),
                    _ => return Err(grammar("scenario(name, key=value, ...)")),
                };
                for a in &args[1..] {
                    let Arg::Named(k, v) = a else {
                        return Err(grammar("scenario options are key=value"));
                    };
                    let x = self.expr(v)?;
                    let q = || {
                        x.as_rational()
                            .ok_or_else(|| Error::Domain(format!("{k} must be a rational number")))
                    };
                    match k.as_str() {
                        "m" => params.m = q()?,
                        "b" => params.b = q()?,
                        "base" => params.base = q()?,
                        "steps" | "k" => params.steps = x.clone(),
                        other => return Err(Error::UnknownIdentifier(other.to_string())),
                    }
                }
                Value::Report(Box::new(run_scenario(&scenario, &params)?))
            }
            "oracle" => {
                let p: Vec<&Ast> = args
                    .iter()
                    .map(|a| match a {
                        Arg::Expr(e) => Ok(e),
                        _ => Err(grammar("oracle(x, N, ...)")),
                    })
                    .collect::<Result<_>>()?;
                if p.len() < 2 {
                    return Err(grammar("oracle(x, N, ...) needs at least one N"));
                }
                let x = self.expr(p[0])?;
                let mut points = Vec::new();
                for n in &p[1..] {
                    let n = self
                        .expr(n)?
                        .as_integer()
                        .and_then(|n| n.to_u64())
                        .ok_or_else(|| Error::Domain(format!("N = {n} must be a positive integer")))?;
                    let divs = crate::oracle::divisors_of(&x);
                    let a = FiniteAssignment::new(n, divs, crate::oracle::DEFAULT_ORACLE_PRECISION)?;
                    points.push((n, oracle_eval(&x, &a)?));
                }
                Value::Oracle(points)
            }
            other => return Err(Error::UnknownIdentifier(other.to_string())),
        })
    }

    fn set(&mut self, ast: &Ast) -> Result<SetExpr> {
        match ast {
            Ast::Ident(name) => {
                set_named(name).ok_or_else(|| grammar(format!("`{name}` is not a set")))
            }
            Ast::Call(name, args) => match name.as_str() {
                "seg" => {
                    let p = plain(args, 1, name)?;
                    Ok(SetExpr::NatSegment(self.expr(p[0])?))
                }
                "strings" => {
                    let p = plain(args, 2, name)?;
                    let k = self
                        .expr(p[0])?
                        .as_integer()
                        .and_then(|k| k.to_u32())
                        .ok_or_else(|| Error::Domain("alphabet size must be a small integer".into()))?;
                    Ok(SetExpr::Strings {
                        alphabet: k,
                        length: self.expr(p[1])?,
                    })
                }
                "stratum" => {
                    let p = plain(args, 1, name)?;
                    Ok(SetExpr::Stratum(BinomIndex::from_expr(&self.expr(p[0])?)?))
                }
                "union" | "product" => {
                    let parts = args
                        .iter()
                        .map(|a| match a {
                            Arg::Expr(e) => self.set(e),
                            _ => Err(grammar("set arguments")),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(if name == "union" {
                        SetExpr::Union(parts)
                    } else {
                        SetExpr::Product(parts)
                    })
                }
                _ => Err(grammar(format!("`{name}(...)` is not a set"))),
            },
            _ => Err(grammar(format!("`{ast}` is not a set"))),
        }
    }

    fn binom(&self, u: &LambdaExpr, k: &LambdaExpr) -> Result<LambdaExpr> {
        if let (Some(a), Some(b)) = (u.as_integer(), k.as_integer()) {
            let (a, b) = (
                a.to_u64().ok_or_else(|| Error::Domain("negative binomial top".into()))?,
                b.to_u64().ok_or_else(|| Error::Domain("negative binomial index".into()))?,
            );
            if b > a {
                return Ok(LambdaExpr::zero());
            }
            return Ok(LambdaExpr::rational(Rational::from_integer(crate::oracle::binomial(a, b))));
        }
        if *u == LambdaExpr::lambda() {
            return crate::sets::stratum_card(k);
        }
        match k.as_integer().and_then(|k| k.to_u64()) {
            Some(k) => Ok(binom_falling(u, k)),
            None => Err(grammar(format!("binom({u}, {k}) needs lam on top or a finite index"))),
        }
    }

    fn with_var<T>(&mut self, var: &str, v: LambdaExpr, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.env.push((var.to_string(), v));
        let r = f(self);
        self.env.pop();
        r
    }

    /// `Σ_{var=lo}^{hi} body` through the closed forms.
    fn sum(&mut self, var: &str, lo: &Ast, hi: &Ast, body: &Ast) -> Result<LambdaExpr> {
        let lo = self
            .expr(lo)?
            .as_integer()
            .and_then(|l| l.to_i64())
            .ok_or_else(|| grammar("the lower limit must be a finite integer"))?;
        let hi = self.expr(hi)?;
        let (coeff, summand) = self.summand(body, var)?;
        let t = self.opts.trunc;
        if lo < 0 {
            return Err(grammar("the lower limit must be at least 0"));
        }
        // empty finite ranges
        if let Some(h) = hi.as_integer() {
            if h < BigInt::from(lo.max(1)) {
                let zero_term = if lo == 0 && h >= BigInt::zero() {
                    self.with_var(var, LambdaExpr::zero(), |s| s.expr(body))?
                } else {
                    LambdaExpr::zero()
                };
                return Ok(zero_term);
            }
        }
        let spec = SumSpec::new(var, hi, summand)?;
        let mut total = spec.evaluate(t)?.mul_ref(&coeff);
        if lo == 0 {
            total = total.add_ref(&self.with_var(var, LambdaExpr::zero(), |s| s.expr(body))?);
        }
        for n in 1..lo {
            total = total.sub_ref(&self.with_var(var, LambdaExpr::int(n), |s| s.expr(body))?);
        }
        Ok(total)
    }

    /// A polynomial in `var` with λ-coefficients, if `ast` is one.
    fn index_poly(&mut self, ast: &Ast, var: &str) -> Result<Option<IndexPoly>> {
        if !ast.mentions(var) {
            return Ok(Some(IndexPoly::constant(self.expr(ast)?)));
        }
        Ok(match ast {
            Ast::Ident(v) if v == var => Some(IndexPoly::index()),
            Ast::Neg(a) => self.index_poly(a, var)?.map(|p| p.neg()),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) => {
                let (Some(p), Some(q)) = (self.index_poly(a, var)?, self.index_poly(b, var)?) else {
                    return Ok(None);
                };
                Some(match ast {
                    Ast::Add(..) => p.add(&q),
                    Ast::Sub(..) => p.add(&q.neg()),
                    _ => p.mul(&q),
                })
            }
            Ast::Div(a, b) if !b.mentions(var) => {
                let d = self.expr(b)?.inv(self.opts.trunc)?;
                self.index_poly(a, var)?.map(|p| p.scale(&d))
            }
            Ast::Pow(a, b) if !b.mentions(var) => {
                let k = self.expr(b)?.as_integer().and_then(|k| k.to_u32());
                match (k, self.index_poly(a, var)?) {
                    (Some(k), Some(p)) => {
                        let mut acc = IndexPoly::constant(LambdaExpr::one());
                        for _ in 0..k {
                            acc = acc.mul(&p);
                        }
                        Some(acc)
                    }
                    _ => None,
                }
            }
            _ => None,
        })
    }

    /// Splits a product into factors; the flag marks divisors.
    fn factors<'a>(ast: &'a Ast, inverted: bool, out: &mut Vec<(&'a Ast, bool)>, sign: &mut bool) {
        match ast {
            Ast::Mul(a, b) => {
                Self::factors(a, inverted, out, sign);
                Self::factors(b, inverted, out, sign);
            }
            Ast::Div(a, b) => {
                Self::factors(a, inverted, out, sign);
                Self::factors(b, !inverted, out, sign);
            }
            Ast::Neg(a) => {
                *sign = !*sign;
                Self::factors(a, inverted, out, sign);
            }
            _ => out.push((ast, inverted)),
        }
    }

    /// Matches `body` against the closed-form summands; returns the constant
    /// factor pulled out in front.
    fn summand(&mut self, body: &Ast, var: &str) -> Result<(LambdaExpr, Summand)> {
        let t = self.opts.trunc;
        if let Some(p) = self.index_poly(body, var)? {
            return Ok((LambdaExpr::one(), Summand::Poly(p)));
        }
        let mut parts = Vec::new();
        let mut negated = false;
        Self::factors(body, false, &mut parts, &mut negated);
        let mut coeff = LambdaExpr::one();
        let mut poly = IndexPoly::constant(LambdaExpr::one());
        let mut alternating: Option<bool> = None;
        let mut ratio: Option<LambdaExpr> = None;
        let mut recip: Option<IndexPoly> = None;
        let mut binom: Option<u32> = None;
        let reject = || grammar(format!("`{body}` is outside the summand grammar"));
        for (f, inv) in parts {
            if !f.mentions(var) {
                let v = self.expr(f)?;
                coeff = if inv { coeff.checked_div(&v, t)? } else { coeff.mul_ref(&v) };
                continue;
            }
            match f {
                Ast::Pow(b, e) if !b.mentions(var) => {
                    let base = self.expr(b)?;
                    let exponent = self.index_poly(e, var)?.ok_or_else(reject)?;
                    let c = exponent.coeffs();
                    let unit_slope = c.len() == 2 && c[1] == LambdaExpr::one();
                    if !unit_slope {
                        return Err(reject());
                    }
                    let shift = c[0].clone();
                    if base == LambdaExpr::int(-1) {
                        // (-1)^(n + k) = (-1)^(n + 1) (-1)^(k - 1)
                        let k = shift.as_integer().ok_or_else(reject)?;
                        let flip = (k - 1i32) % 2i32 != BigInt::zero();
                        if alternating.is_some() {
                            return Err(reject());
                        }
                        alternating = Some(flip);
                    } else {
                        if ratio.is_some() {
                            return Err(reject());
                        }
                        let r = if inv { base.inv(t)? } else { base.clone() };
                        let front = self.power(&base, &shift)?;
                        coeff = if inv { coeff.checked_div(&front, t)? } else { coeff.mul_ref(&front) };
                        ratio = Some(r);
                    }
                }
                Ast::Call(name, args) if name == "binom" && !inv => {
                    let p = plain(args, 2, name)?;
                    let top = self.index_poly(p[0], var)?.ok_or_else(reject)?;
                    let c = top.coeffs();
                    let is_index = matches!(p[1], Ast::Ident(v) if v == var);
                    if !is_index || c.len() != 2 || c[1] != LambdaExpr::one() || binom.is_some() {
                        return Err(reject());
                    }
                    let b = c[0].as_integer().and_then(|b| b.to_u32()).ok_or_else(reject)?;
                    binom = Some(b);
                }
                _ => {
                    let p = self.index_poly(f, var)?.ok_or_else(reject)?;
                    if inv {
                        if recip.is_some() {
                            return Err(reject());
                        }
                        recip = Some(p);
                    } else {
                        poly = poly.mul(&p);
                    }
                }
            }
        }
        if negated {
            coeff = coeff.neg_ref();
        }
        if alternating == Some(true) {
            coeff = coeff.neg_ref();
        }
        // move the constant part of the polynomial factor into the coefficient
        let constant_poly = poly.degree().unwrap_or(0) == 0;
        if constant_poly {
            if let Some(c) = poly.coeffs().first() {
                coeff = coeff.mul_ref(c);
            } else {
                coeff = LambdaExpr::zero();
            }
            poly = IndexPoly::constant(LambdaExpr::one());
        }
        let summand = match (alternating.is_some(), ratio, recip, binom) {
            (false, None, None, Some(b)) if constant_poly => Summand::Binom(b),
            (false, Some(r), None, None) if constant_poly => Summand::Geometric(r),
            (false, Some(r), None, None) if poly.degree() == Some(1) && poly.coeffs()[0].is_zero() => {
                coeff = coeff.mul_ref(&poly.coeffs()[1]);
                Summand::IndexGeometric(r)
            }
            (true, None, None, None) => Summand::AlternatingPoly(poly),
            (alt, None, Some(d), None) if constant_poly && d.degree() == Some(1) => {
                let a = d.coeffs()[1].as_rational().ok_or_else(reject)?;
                let c = d.coeffs()[0].clone();
                let (a, c) = if a.is_negative() {
                    coeff = coeff.neg_ref();
                    (-a, c.neg_ref())
                } else {
                    (a, c)
                };
                if alt {
                    if !c.is_zero() {
                        return Err(reject());
                    }
                    coeff = coeff.scale_rational(&a.recip());
                    Summand::AlternatingReciprocal
                } else {
                    Summand::Reciprocal { a, c }
                }
            }
            _ => return Err(reject()),
        };
        Ok((coeff, summand))
    }

    /// A function of `var` built from powers and `exp(s*var)`.
    fn func(&mut self, ast: &Ast, var: &str) -> Result<FuncExpr> {
        if !ast.mentions(var) {
            return Ok(FuncExpr::constant(self.scalar(ast)?));
        }
        let reject = || grammar(format!("`{ast}` is not a polynomial times exponentials in {var}"));
        Ok(match ast {
            Ast::Ident(v) if v == var => FuncExpr::x(),
            Ast::Neg(a) => self.func(a, var)?.neg(),
            Ast::Add(a, b) => self.func(a, var)?.add(&self.func(b, var)?),
            Ast::Sub(a, b) => self.func(a, var)?.sub(&self.func(b, var)?),
            Ast::Mul(a, b) => self.func(a, var)?.mul(&self.func(b, var)?),
            Ast::Div(a, b) if !b.mentions(var) => {
                let d = self.scalar(b)?.recip()?;
                self.func(a, var)?.scale(&d)
            }
            Ast::Pow(a, b) if !b.mentions(var) => {
                let k = self.expr(b)?.as_integer().and_then(|k| k.to_u32()).ok_or_else(reject)?;
                self.func(a, var)?.powi(k)
            }
            Ast::Call(name, args) if name == "exp" => {
                let p = plain(args, 1, name)?;
                let inner = self.func(p[0], var)?;
                let mut s = Scalar::zero();
                let mut c = Scalar::zero();
                for term in inner.terms() {
                    match term.k {
                        0 if term.s.is_zero() => c = &c + &term.coeff,
                        1 if term.s.is_zero() => s = &s + &term.coeff,
                        _ => return Err(reject()),
                    }
                }
                FuncExpr::exp_linear(s).scale(&c.exp()?)
            }
            _ => return Err(reject()),
        })
    }
}

/// Direct evaluation at `λ = N`: sums term by term, integrals as Riemann
/// sums with `N` slices. `None` for constructs without a finite meaning.
pub struct FiniteEvaluator {
    n: u64,
    bits: u32,
    env: Vec<(String, OracleValue)>,
}

fn div_values(a: &OracleValue, b: &OracleValue) -> Result<OracleValue> {
    match (a, b) {
        (_, OracleValue::Exact(q)) if q.is_zero() => Err(Error::DivisionByZero),
        (OracleValue::Exact(p), OracleValue::Exact(q)) => Ok(OracleValue::Exact(p / q)),
        _ => a
            .interval()
            .div(&b.interval())
            .map(OracleValue::Enclosure)
            .ok_or(Error::DivisionByZero),
    }
}

impl FiniteEvaluator {
    pub fn new(n: u64, bits: u32) -> Self {
        FiniteEvaluator { n, bits, env: Vec::new() }
    }

    fn round(&self, v: OracleValue) -> OracleValue {
        match v {
            OracleValue::Enclosure(i) => OracleValue::Enclosure(i.round_out(self.bits as u64 + 16)),
            e => e,
        }
    }

    fn scalar(&self, s: &Scalar) -> OracleValue {
        match s.as_rational() {
            Some(q) => OracleValue::Exact(q),
            None => OracleValue::Enclosure(s.eval(self.bits)),
        }
    }

    fn integer(&mut self, ast: &Ast) -> Result<Option<i64>> {
        Ok(match self.eval(ast)? {
            Some(OracleValue::Exact(q)) if q.is_integer() => q.to_integer().to_i64(),
            Some(OracleValue::Exact(q)) => {
                return Err(Error::Divisibility(format!("{ast} = {q} at N = {} is not an integer", self.n)))
            }
            _ => None,
        })
    }

    pub fn eval(&mut self, ast: &Ast) -> Result<Option<OracleValue>> {
        macro_rules! get {
            ($e:expr) => {
                match self.eval($e)? {
                    Some(v) => v,
                    None => return Ok(None),
                }
            };
        }
        let v = match ast {
            Ast::Num(q) => OracleValue::Exact(q.clone()),
            Ast::Lam => OracleValue::Exact(rq(self.n as i64)),
            Ast::Ident(name) => {
                if let Some((_, v)) = self.env.iter().rev().find(|(k, _)| k == name) {
                    v.clone()
                } else if let Some(c) = constant(name) {
                    self.scalar(&c)
                } else {
                    return Ok(None);
                }
            }
            Ast::Neg(a) => OracleValue::Exact(Rational::zero()).sub(&get!(a)),
            Ast::Add(a, b) => get!(a).add(&get!(b)),
            Ast::Sub(a, b) => get!(a).sub(&get!(b)),
            Ast::Mul(a, b) => get!(a).mul(&get!(b)),
            Ast::Div(a, b) => {
                let (x, y) = (get!(a), get!(b));
                div_values(&x, &y)?
            }
            Ast::Pow(a, b) => {
                let base = get!(a);
                let e = get!(b);
                match (e.as_exact(), &base) {
                    (Some(k), OracleValue::Exact(q)) if k.is_integer() => {
                        let k = k.to_integer().to_i32().ok_or_else(|| Error::Overflow("exponent".into()))?;
                        if q.is_zero() && k < 0 {
                            return Err(Error::DivisionByZero);
                        }
                        OracleValue::Exact(num_traits::pow::Pow::pow(q, k))
                    }
                    (Some(k), OracleValue::Enclosure(i)) if k.is_integer() => {
                        let k = k.to_integer().to_i64().ok_or_else(|| Error::Overflow("exponent".into()))?;
                        OracleValue::Enclosure(i.powi(k, self.bits as u64).ok_or(Error::DivisionByZero)?)
                    }
                    (Some(k), OracleValue::Exact(q)) if q.is_positive() => {
                        self.scalar(&Scalar::rational_power(q, k)?)
                    }
                    _ => return Ok(None),
                }
            }
            Ast::Call(name, args) => match name.as_str() {
                "sum" => {
                    let (var, lo, hi, body) = range(args, "n")?;
                    let (Some(lo), Some(hi)) = (self.integer(lo)?, self.integer(hi)?) else {
                        return Ok(None);
                    };
                    let mut acc = OracleValue::Exact(Rational::zero());
                    for k in lo..=hi {
                        self.env.push((var.to_string(), OracleValue::Exact(rq(k))));
                        let term = self.eval(body);
                        self.env.pop();
                        match term? {
                            Some(t) => acc = self.round(acc.add(&t)),
                            None => return Ok(None),
                        }
                    }
                    acc
                }
                "int" => {
                    let (var, lo, hi, body) = range(args, "x")?;
                    let (a, b) = (get!(lo), get!(hi));
                    let (Some(a), Some(b)) = (a.as_exact().cloned(), b.as_exact().cloned()) else {
                        return Ok(None);
                    };
                    let dx = (&b - &a) / rq(self.n as i64);
                    let mut acc = OracleValue::Exact(Rational::zero());
                    for j in 1..=self.n as i64 {
                        let x = &a + &dx * rq(j);
                        self.env.push((var.to_string(), OracleValue::Exact(x)));
                        let term = self.eval(body);
                        self.env.pop();
                        match term? {
                            Some(t) => acc = self.round(acc.add(&t)),
                            None => return Ok(None),
                        }
                    }
                    acc.mul(&OracleValue::Exact(dx))
                }
                "exp" | "ln" => {
                    let p = plain(args, 1, name)?;
                    let x = get!(p[0]);
                    let Some(q) = x.as_exact() else {
                        return Ok(None);
                    };
                    let s = if name == "exp" {
                        Scalar::exp_rational(q.clone())
                    } else {
                        Scalar::ln_rational(q)?
                    };
                    self.scalar(&s)
                }
                "pow" => {
                    let p = plain(args, 2, name)?;
                    return self.eval(&Ast::Pow(Box::new(p[0].clone()), Box::new(p[1].clone())));
                }
                "binom" => {
                    let p = plain(args, 2, name)?;
                    let (Some(u), Some(k)) = (self.integer(p[0])?, self.integer(p[1])?) else {
                        return Ok(None);
                    };
                    if u < 0 || k < 0 {
                        return Ok(None);
                    }
                    let v = if k > u {
                        BigInt::zero()
                    } else {
                        crate::oracle::binomial(u as u64, k as u64)
                    };
                    OracleValue::Exact(Rational::from_integer(v))
                }
                _ => return Ok(None),
            },
            Ast::Std(_) | Ast::Cmp(..) => return Ok(None),
        };
        Ok(Some(self.round(v)))
    }
}

/// Rounds an interval-valued oracle result for display.
pub fn enclosure_width(v: &OracleValue) -> Rational {
    match v {
        OracleValue::Exact(_) => Rational::zero(),
        OracleValue::Enclosure(i) => i.width(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parser::parse;

    fn run(s: &str) -> String {
        let mut ev = Evaluator::new(EvalOptions::default());
        match ev.eval(&parse(s).unwrap()) {
            Ok(v) => v.to_string(),
            Err(e) => format!("error {}", e.code()),
        }
    }

    #[test]
    fn engine_routes() {
        assert_eq!(run("sum(n=1..2*lam, n)"), "2*lam^2 + lam");
        assert_eq!(run("~((lam^2/2 + lam/2) * (1/lam)^2)"), "1/2");
        assert_eq!(run("compare(2^lam, lam^lam)"), "Less");
        assert_eq!(run("1/0"), "error E_DIV_ZERO");
        assert_eq!(run("(-1)^lam"), "error E_PARITY_DEPENDENT");
        assert_eq!(run("(-1)^(2*lam)"), "1");
        assert_eq!(run("card(Q)"), "lam^2");
        assert_eq!(run("card(Z) == 2*card(N)"), "true");
        assert_eq!(run("~int(0..1, x^2)"), "1/3");
        assert_eq!(run("sum(n=1..2*lam, (-1)^(n+1)*n)"), "-lam");
        assert_eq!(run("sum(n=0..lam, 2^n)"), "2*2^lam - 1");
        assert_eq!(run("sum(n=1..lam, (-1)^n*n)"), "error E_PARITY_DEPENDENT");
    }

    #[test]
    fn finite_evaluation_matches_closed_forms() {
        for s in [
            "sum(n=1..2*lam, n)",
            "sum(n=1..lam, n^2 - 3*n)",
            "sum(n=0..lam, (1/3)^n)",
            "sum(n=1..lam, n*2^n)",
            "int(0..2, 2*x)",
            "binom(lam, 3)",
        ] {
            let ast = parse(s).unwrap();
            let closed = Evaluator::new(EvalOptions::default()).expr(&ast).unwrap();
            for n in [12u64, 120] {
                let direct = FiniteEvaluator::new(n, 256).eval(&ast).unwrap().unwrap();
                let at = oracle_eval(&closed, &FiniteAssignment::at(n).unwrap()).unwrap();
                assert!(direct.consistent_with(&at), "{s} at {n}: {direct} vs {at}");
            }
        }
    }
}
