//! Recursive descent over the statement grammar.
//!
//! ```text
//! stmt  := expr (cmp expr)?
//! expr  := term (('+'|'-') term)*
//! term  := unary (('*'|'/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' args ')' | '(' expr ')' | '~' atom
//! arg   := ident '=' expr '..' expr | ident '=' expr | expr '..' expr | expr
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::lexer::{syntax, tokenize, Tok, Token};
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Expr(Ast),
    /// `var=lo..hi` or `lo..hi`.
    Range {
        var: Option<String>,
        lo: Ast,
        hi: Ast,
    },
    Named(String, Ast),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Num(Rational),
    Lam,
    Ident(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    /// `~x`, the standard part.
    Std(Box<Ast>),
    Call(String, Vec<Arg>),
    Cmp(CmpOp, Box<Ast>, Box<Ast>),
}

/// Names that may appear as bare identifiers.
pub const CONSTANTS: [&str; 3] = ["pi", "gamma", "e"];
pub const SET_NAMES: [&str; 7] = ["N", "Z", "Q", "B", "evens", "odds", "squares"];
pub const FUNCTIONS: [&str; 16] = [
    "sum", "int", "card", "binom", "exp", "ln", "pow", "compare", "scenario", "oracle", "O",
    "seg", "strings", "stratum", "union", "product",
];

impl Ast {
    pub fn num(n: i64) -> Ast {
        Ast::Num(Rational::from_integer(BigInt::from(n)))
    }

    fn level(&self) -> u8 {
        match self {
            Ast::Cmp(..) => 0,
            Ast::Add(..) | Ast::Sub(..) => 1,
            Ast::Mul(..) | Ast::Div(..) => 2,
            Ast::Neg(..) => 3,
            Ast::Pow(..) => 4,
            Ast::Num(q) if !q.is_integer() && decimal(q).is_none() => 2,
            _ => 5,
        }
    }

    /// True if `var` occurs free.
    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Ast::Num(_) | Ast::Lam => false,
            Ast::Ident(s) => s == var,
            Ast::Neg(a) | Ast::Std(a) => a.mentions(var),
            Ast::Add(a, b)
            | Ast::Sub(a, b)
            | Ast::Mul(a, b)
            | Ast::Div(a, b)
            | Ast::Pow(a, b)
            | Ast::Cmp(_, a, b) => a.mentions(var) || b.mentions(var),
            Ast::Call(_, args) => args.iter().any(|a| match a {
                Arg::Expr(e) | Arg::Named(_, e) => e.mentions(var),
                Arg::Range { var: v, lo, hi } => {
                    lo.mentions(var) || hi.mentions(var) || v.as_deref() == Some(var)
                }
            }),
        }
    }
}

/// Exact decimal text when the denominator divides a power of ten.
fn decimal(q: &Rational) -> Option<String> {
    let mut d = q.denom().clone();
    let mut digits = 0usize;
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    while d.is_even() {
        d /= &two;
        digits += 1;
    }
    let mut fives = 0usize;
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let places = digits.max(fives);
    let scaled = q * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let s = scaled.to_integer().abs().to_string();
    let s = format!("{s:0>width$}", width = places + 1);
    let (int, frac) = s.split_at(s.len() - places);
    Some(format!("{}{int}.{frac}", if q.is_negative() { "-" } else { "" }))
}

fn wrap(f: &mut fmt::Formatter<'_>, a: &Ast, min: u8) -> fmt::Result {
    if a.level() < min {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Expr(e) => write!(f, "{e}"),
            Arg::Range { var, lo, hi } => {
                if let Some(v) = var {
                    write!(f, "{v}=")?;
                }
                write!(f, "{lo}..{hi}")
            }
            Arg::Named(k, v) => write!(f, "{k}={v}"),
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(q) => match (q.is_integer(), decimal(q)) {
                (true, _) => write!(f, "{q}"),
                (false, Some(d)) => f.write_str(&d),
                (false, None) => write!(f, "{}/{}", q.numer(), q.denom()),
            },
            Ast::Lam => f.write_str("lam"),
            Ast::Ident(s) => f.write_str(s),
            Ast::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, 3)
            }
            Ast::Add(a, b) | Ast::Sub(a, b) => {
                wrap(f, a, 1)?;
                f.write_str(if matches!(self, Ast::Add(..)) { " + " } else { " - " })?;
                wrap(f, b, 2)
            }
            Ast::Mul(a, b) | Ast::Div(a, b) => {
                wrap(f, a, 2)?;
                f.write_str(if matches!(self, Ast::Mul(..)) { "*" } else { "/" })?;
                wrap(f, b, 3)
            }
            Ast::Pow(a, b) => {
                wrap(f, a, 5)?;
                f.write_str("^")?;
                wrap(f, b, 3)
            }
            Ast::Std(a) => {
                f.write_str("~")?;
                wrap(f, a, 5)
            }
            Ast::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Ast::Cmp(op, a, b) => {
                wrap(f, a, 1)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, b, 1)
            }
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<String>,
}

/// Functions whose arguments bind a variable, with the implicit name.
fn binder(name: &str) -> Option<&'static str> {
    match name {
        "sum" => Some("n"),
        "int" => Some("x"),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    fn statement(&mut self) -> Result<Ast> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::EqEq | Tok::Assign => CmpOp::Eq,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Ast::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.unary()?;
            return Ok(Ast::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let (line, column) = self.here();
        match self.bump() {
            Tok::Num(q) => Ok(Ast::Num(q)),
            Tok::Tilde => Ok(Ast::Std(Box::new(self.atom()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    return self.call(name, line, column);
                }
                if name == "lam" {
                    return Ok(Ast::Lam);
                }
                if CONSTANTS.contains(&name.as_str())
                    || SET_NAMES.contains(&name.as_str())
                    || self.scope.iter().any(|v| *v == name)
                {
                    return Ok(Ast::Ident(name));
                }
                Err(Error::UnknownIdentifier(format!("{name} at {line}:{column}")))
            }
            t => Err(syntax(line, column, format!("unexpected {t}"))),
        }
    }

    fn call(&mut self, name: String, line: usize, column: usize) -> Result<Ast> {
        if !FUNCTIONS.contains(&name.as_str()) {
            return Err(Error::UnknownIdentifier(format!("{name} at {line}:{column}")));
        }
        let mut args = Vec::new();
        let mut bound = 0usize;
        if name == "scenario" {
            // the scenario name is taken verbatim
            match self.bump() {
                Tok::Ident(s) => args.push(Arg::Expr(Ast::Ident(s))),
                t => return Err(self.error(format!("expected a scenario name, found {t}"))),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        while *self.peek() != Tok::RParen {
            let arg = self.arg()?;
            if let Arg::Range { var, .. } = &arg {
                if let Some(default) = binder(&name) {
                    self.scope.push(var.clone().unwrap_or_else(|| default.to_string()));
                    bound += 1;
                }
            }
            args.push(arg);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {}
                t => {
                    let msg = format!("expected `,` or `)`, found {t}");
                    return Err(self.error(msg));
                }
            }
        }
        self.bump();
        for _ in 0..bound {
            self.scope.pop();
        }
        Ok(Ast::Call(name, args))
    }

    fn arg(&mut self) -> Result<Arg> {
        if let (Tok::Ident(k), Tok::Assign) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.bump();
            self.bump();
            let v = self.expr()?;
            if *self.peek() == Tok::DotDot {
                self.bump();
                let hi = self.expr()?;
                return Ok(Arg::Range {
                    var: Some(k),
                    lo: v,
                    hi,
                });
            }
            return Ok(Arg::Named(k, v));
        }
        let lo = self.expr()?;
        if *self.peek() == Tok::DotDot {
            self.bump();
            let hi = self.expr()?;
            return Ok(Arg::Range { var: None, lo, hi });
        }
        Ok(Arg::Expr(lo))
    }
}

/// Parses one statement.
pub fn parse(text: &str) -> Result<Ast> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        scope: Vec::new(),
    };
    if *p.peek() == Tok::Eof {
        return Err(p.error("empty input"));
    }
    let ast = p.statement()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek())));
    }
    Ok(ast)
}
