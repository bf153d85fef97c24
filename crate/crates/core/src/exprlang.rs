//! Single-variable rational expressions: parsing, rendering, evaluation over
//! rationals, doubles or hyperreals, and a symbolic derivative.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | atom ("^" integer)?
//! atom   := number | "x" | "(" expr ")"
//! number := integer ("/" integer)? | decimal
//! ```
//!
//! A fraction literal such as `1/2` must be written without spaces; `1 / 2` is a
//! division node.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hypernum::HyperReal;
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(rational::int(n))
    }

    pub fn parse(text: &str) -> Result<Expr> {
        Parser::new(text)?.parse_all()
    }

    pub fn contains_div(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => false,
            Expr::Div(..) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.contains_div() || b.contains_div()
            }
            Expr::Pow(a, _) | Expr::Neg(a) => a.contains_div(),
        }
    }

    pub fn eval_real(&self, x: &Rational) -> Result<Rational> {
        let mut node = 0;
        eval(self, x, &mut node)
    }

    pub fn eval_hyper(&self, x: &HyperReal) -> Result<HyperReal> {
        let mut node = 0;
        eval(self, x, &mut node)
    }

    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        let mut node = 0;
        eval(self, &x, &mut node)
    }

    /// Derivative by the usual rules, with light constant folding.
    pub fn symbolic_diff(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::int(0),
            Expr::Var => Expr::int(1),
            Expr::Add(a, b) => add(a.symbolic_diff(), b.symbolic_diff()),
            Expr::Sub(a, b) => sub(a.symbolic_diff(), b.symbolic_diff()),
            Expr::Neg(a) => neg(a.symbolic_diff()),
            Expr::Mul(a, b) => add(
                mul(a.symbolic_diff(), (**b).clone()),
                mul((**a).clone(), b.symbolic_diff()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.symbolic_diff(), (**b).clone()),
                    mul((**a).clone(), b.symbolic_diff()),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(a, n) => match n {
                0 => Expr::int(0),
                _ => mul(
                    mul(Expr::int(*n as i64), pow((**a).clone(), n - 1)),
                    a.symbolic_diff(),
                ),
            },
        }
    }

    /// Expands into a polynomial; division is allowed only by nonzero constants.
    pub fn to_poly(&self) -> Result<Poly> {
        Ok(match self {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Var => Poly::x(),
            Expr::Add(a, b) => a.to_poly()?.add(&b.to_poly()?),
            Expr::Sub(a, b) => a.to_poly()?.sub(&b.to_poly()?),
            Expr::Mul(a, b) => a.to_poly()?.mul(&b.to_poly()?),
            Expr::Neg(a) => a.to_poly()?.neg(),
            Expr::Pow(a, n) => a.to_poly()?.pow(*n),
            Expr::Div(a, b) => {
                let den = b.to_poly()?;
                match den.degree() {
                    Some(0) => a.to_poly()?.scale(&(Rational::one() / den.coeff(0))),
                    None => {
                        return Err(Error::NotPolynomial(format!(
                            "division by zero in `{self}`"
                        )))
                    }
                    Some(_) => {
                        return Err(Error::NotPolynomial(format!(
                            "division by non-constant `{b}`"
                        )))
                    }
                }
            }
        })
    }

    /// Expression for a polynomial, in Horner-free expanded form.
    pub fn from_poly(p: &Poly) -> Expr {
        let mut acc: Option<Expr> = None;
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => Expr::Const(c.abs()),
                _ => {
                    let base = if k == 1 { Expr::Var } else { Expr::Pow(Box::new(Expr::Var), k as u32) };
                    if c.abs().is_one() {
                        base
                    } else {
                        Expr::Mul(Box::new(Expr::Const(c.abs())), Box::new(base))
                    }
                }
            };
            acc = Some(match (acc, c.is_negative()) {
                (None, false) => mono,
                (None, true) => Expr::Neg(Box::new(mono)),
                (Some(a), false) => Expr::Add(Box::new(a), Box::new(mono)),
                (Some(a), true) => Expr::Sub(Box::new(a), Box::new(mono)),
            });
        }
        acc.unwrap_or_else(|| Expr::int(0))
    }
}

fn is_const(e: &Expr, v: i64) -> bool {
    matches!(e, Expr::Const(c) if *c == rational::int(v))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is_const(&a, 0) => b,
        _ if is_const(&b, 0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is_const(&b, 0) => a,
        _ if is_const(&a, 0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is_const(&a, 0) || is_const(&b, 0) => Expr::int(0),
        _ if is_const(&a, 1) => b,
        _ if is_const(&b, 1) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0) {
        return Expr::int(0);
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn pow(a: Expr, n: u32) -> Expr {
    match n {
        0 => Expr::int(1),
        1 => a,
        _ => Expr::Pow(Box::new(a), n),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) if c.is_zero() => Expr::Const(c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

/// Arithmetic needed by the structural evaluator.
trait Scalar: Clone {
    fn lift(&self, c: &Rational) -> Result<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    /// `None` when the divisor is exactly zero.
    fn div(&self, o: &Self) -> Option<Result<Self>>;
    fn neg(&self) -> Self;
    fn pow(&self, n: u32) -> Result<Self>;
}

impl Scalar for Rational {
    fn lift(&self, c: &Rational) -> Result<Self> {
        Ok(c.clone())
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Option<Result<Self>> {
        (!o.is_zero()).then(|| Ok(self / o))
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pow(&self, n: u32) -> Result<Self> {
        Ok(num_traits::pow(self.clone(), n as usize))
    }
}

impl Scalar for HyperReal {
    fn lift(&self, c: &Rational) -> Result<Self> {
        HyperReal::from_real(c.clone(), self.order())
    }
    fn add(&self, o: &Self) -> Result<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Result<Self>> {
        (!o.is_zero()).then(|| self.checked_div(o))
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pow(&self, n: u32) -> Result<Self> {
        self.powi(n)
    }
}

impl Scalar for f64 {
    fn lift(&self, c: &Rational) -> Result<Self> {
        Ok(rational::to_f64(c))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Option<Result<Self>> {
        (*o != 0.0).then(|| Ok(self / o))
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pow(&self, n: u32) -> Result<Self> {
        Ok(self.powi(n as i32))
    }
}

/// Evaluates `e`; `node` is the pre-order index of `e` on entry.
fn eval<S: Scalar>(e: &Expr, x: &S, node: &mut usize) -> Result<S> {
    let here = *node;
    *node += 1;
    match e {
        Expr::Const(c) => x.lift(c),
        Expr::Var => Ok(x.clone()),
        Expr::Add(a, b) => eval(a, x, node)?.add(&eval(b, x, node)?),
        Expr::Sub(a, b) => eval(a, x, node)?.sub(&eval(b, x, node)?),
        Expr::Mul(a, b) => eval(a, x, node)?.mul(&eval(b, x, node)?),
        Expr::Div(a, b) => {
            let num = eval(a, x, node)?;
            let den = eval(b, x, node)?;
            num.div(&den).unwrap_or_else(|| {
                Err(Error::Evaluation {
                    node: here,
                    subexpr: e.to_string(),
                })
            })
        }
        Expr::Pow(a, n) => eval(a, x, node)?.pow(*n),
        Expr::Neg(a) => Ok(eval(a, x, node)?.neg()),
    }
}

// Rendering: precedence-aware, minimal parentheses, spaces around binary operators.

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(c) if c.is_negative() => 3,
        Expr::Const(_) | Expr::Var => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = precedence(self);
        match self {
            Expr::Const(c) => {
                if c.is_negative() {
                    write!(f, "-{}", c.abs())
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var => f.write_str("x"),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => "+",
                    Expr::Sub(..) => "-",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                write_operand(f, a, precedence(a) < p)?;
                write!(f, " {op} ")?;
                write_operand(f, b, precedence(b) <= p)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, precedence(a) < 3)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, precedence(a) < 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(Rational),
    Decimal(Rational),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) | Tok::Decimal(n) => format!("number `{n}`"),
            Tok::X => "`x`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

/// Byte span and token.
type Spanned = (usize, usize, Tok);

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let tok = match bytes[i] {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'x' => Tok::X,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lit = &text[start..i];
                let value = rational::parse_decimal(lit)
                    .ok_or_else(|| syntax(start, format!("malformed number `{lit}`")))?;
                let tok = if lit.contains('.') {
                    Tok::Decimal(value)
                } else {
                    Tok::Int(value)
                };
                out.push((start, i, tok));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((start, i, tok));
    }
    out.push((text.len(), text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self> {
        Ok(Self {
            text,
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].2
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].2.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        syntax(
            self.offset(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn parse_all(mut self) -> Result<Expr> {
        if self.text.trim().is_empty() {
            return Err(syntax(0, "expected an expression, found end of input"));
        }
        let e = self.expr()?;
        if *self.peek() != Tok::End {
            return Err(self.unexpected("an operator or end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let k: u32 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(at, "exponent too large"))?;
                Ok(Expr::Pow(Box::new(base), k))
            }
            other => Err(syntax(
                at,
                format!("expected a nonnegative integer exponent, found {}", other.describe()),
            )),
        }
    }

    /// `int/int` written without spaces is one fraction literal.
    fn fraction_tail(&self) -> Option<Rational> {
        let (_, num_end, _) = self.toks[self.pos - 1];
        let (slash_start, slash_end, slash) = self.toks.get(self.pos)?;
        let (den_start, _, den) = self.toks.get(self.pos + 1)?;
        match (slash, den) {
            (Tok::Slash, Tok::Int(d)) if *slash_start == num_end && slash_end == den_start => {
                Some(d.clone())
            }
            _ => None,
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if let Some(d) = self.fraction_tail() {
                    let at = self.toks[self.pos + 1].0;
                    if d.is_zero() {
                        return Err(syntax(at, "zero denominator in fraction literal"));
                    }
                    self.pos += 2;
                    return Ok(Expr::Const(n / d));
                }
                Ok(Expr::Const(n))
            }
            Tok::Decimal(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::X => {
                self.bump();
                Ok(Expr::Var)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("a number, `x` or `(`")),
        }
    }
}
