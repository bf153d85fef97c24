//! Truncated Laurent series in one infinitesimal `e`.
//!
//! A [`HyperReal`] is a finite sum `c_k e^k` with exact rational coefficients and
//! exponents confined to the window `[-K, K]`. Reals embed as exponent-0 series,
//! `e` itself is a positive infinitesimal and `e^-1` an infinite element. The order is
//! the one in which `0 < e < r` for every positive real `r`: the sign of a value is the
//! sign of its lowest-order coefficient.
//!
//! Products that spill past `e^K` are clipped and the result is flagged as
//! *saturated*, meaning it is exact only modulo `e^(K+1)`. Spilling below `e^-K` is an
//! error instead, since the lost terms would dominate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const DEFAULT_ORDER: u32 = 8;

#[derive(Clone, Debug)]
pub struct HyperReal {
    terms: Vec<(i32, Rational)>,
    order: u32,
    saturated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Zero,
    Infinitesimal,
    Appreciable,
    Infinite,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Zero => "ZERO",
            Classification::Infinitesimal => "INFINITESIMAL",
            Classification::Appreciable => "APPRECIABLE",
            Classification::Infinite => "INFINITE",
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, Classification::Infinite)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidOrder(0))
    } else {
        Ok(())
    }
}

impl HyperReal {
    pub fn zero(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            terms: Vec::new(),
            order,
            saturated: false,
        })
    }

    pub fn one(order: u32) -> Result<Self> {
        Self::from_real(Rational::one(), order)
    }

    /// Embeds a real number as an exponent-0 series.
    pub fn from_real(r: Rational, order: u32) -> Result<Self> {
        check_order(order)?;
        let terms = if r.is_zero() { Vec::new() } else { vec![(0, r)] };
        Ok(Self {
            terms,
            order,
            saturated: false,
        })
    }

    /// The monomial `e^power`.
    pub fn epsilon(power: i32, order: u32) -> Result<Self> {
        check_order(order)?;
        if power.unsigned_abs() > order {
            return Err(Error::WindowExceeded {
                exponent: power as i64,
                order,
            });
        }
        Ok(Self {
            terms: vec![(power, Rational::one())],
            order,
            saturated: false,
        })
    }

    /// Builds a series from `(exponent, coefficient)` pairs in any order; repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn from_terms<I>(order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Rational)>,
    {
        check_order(order)?;
        let mut acc: BTreeMap<i32, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(Rational::zero) += c;
        }
        let mut out = Vec::with_capacity(acc.len());
        for (e, c) in acc {
            if c.is_zero() {
                continue;
            }
            if e.unsigned_abs() > order {
                return Err(Error::WindowExceeded {
                    exponent: e as i64,
                    order,
                });
            }
            out.push((e, c));
        }
        Ok(Self {
            terms: out,
            order,
            saturated: false,
        })
    }

    /// Clips an unbounded accumulation into the window.
    fn from_accumulator(order: u32, acc: BTreeMap<i64, Rational>, saturated: bool) -> Result<Self> {
        let k = order as i64;
        let mut out = Vec::new();
        let mut saturated = saturated;
        for (e, c) in acc {
            if c.is_zero() {
                continue;
            }
            if e < -k {
                return Err(Error::WindowExceeded { exponent: e, order });
            }
            if e > k {
                saturated = true;
                continue;
            }
            out.push((e as i32, c));
        }
        Ok(Self {
            terms: out,
            order,
            saturated,
        })
    }

    pub fn terms(&self) -> &[(i32, Rational)] {
        &self.terms
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `e^exponent` (zero when absent).
    pub fn coeff(&self, exponent: i32) -> Rational {
        self.terms
            .iter()
            .find(|(e, _)| *e == exponent)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Same value re-expressed with a different truncation order.
    pub fn with_order(&self, order: u32) -> Result<Self> {
        check_order(order)?;
        let mut acc = BTreeMap::new();
        for (e, c) in &self.terms {
            acc.insert(*e as i64, c.clone());
        }
        Self::from_accumulator(order, acc, self.saturated)
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        } else {
            Ok(())
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |c: &Rational| if negate_other { -c.clone() } else { c.clone() };
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Less => {
                        i += 1;
                        (*ea, ca.clone())
                    }
                    Ordering::Greater => {
                        j += 1;
                        (*eb, rhs(cb))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (*ea, ca + rhs(cb))
                    }
                },
                (Some((ea, ca)), None) => {
                    i += 1;
                    (*ea, ca.clone())
                }
                (None, Some((eb, cb))) => {
                    j += 1;
                    (*eb, rhs(cb))
                }
                (None, None) => unreachable!(),
            };
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        Self {
            terms: out,
            order: self.order,
            saturated: self.saturated || other.saturated,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self.merge(other, true))
    }

    /// Cauchy product, clipped to the window.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(*ea as i64 + *eb as i64).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_accumulator(self.order, acc, self.saturated || other.saturated)
    }

    /// Series division by long division on leading terms.
    ///
    /// Quotient terms are produced up to `e^K`; the result is saturated when a nonzero
    /// remainder is left over, i.e. when the true quotient has terms beyond the window.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let (lead_exp, lead_coeff) = match other.terms.first() {
            Some((e, c)) => (*e as i64, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let k = self.order as i64;
        let mut rem: BTreeMap<i64, Rational> =
            self.terms.iter().map(|(e, c)| (*e as i64, c.clone())).collect();
        let mut quotient: BTreeMap<i64, Rational> = BTreeMap::new();
        while let Some((&re, rc)) = rem.iter().next() {
            let qe = re - lead_exp;
            if qe > k {
                break;
            }
            if qe < -k {
                return Err(Error::WindowExceeded {
                    exponent: qe,
                    order: self.order,
                });
            }
            let qc = rc / &lead_coeff;
            for (e, c) in &other.terms {
                let slot = rem.entry(qe + *e as i64).or_insert_with(Rational::zero);
                *slot -= &qc * c;
                if slot.is_zero() {
                    rem.remove(&(qe + *e as i64));
                }
            }
            quotient.insert(qe, qc);
        }
        let saturated = self.saturated || other.saturated || !rem.is_empty();
        Self::from_accumulator(self.order, quotient, saturated)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one(self.order)?.checked_div(self)
    }

    pub fn powi(&self, exponent: u32) -> Result<Self> {
        let mut acc = Self::one(self.order)?;
        let mut base = self.clone();
        let mut n = exponent;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self {
                terms: Vec::new(),
                order: self.order,
                saturated: self.saturated,
            };
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * factor)).collect(),
            order: self.order,
            saturated: self.saturated,
        }
    }

    /// Sign of the lowest-order coefficient; `Equal` for zero.
    pub fn signum(&self) -> Ordering {
        match self.terms.first() {
            None => Ordering::Equal,
            Some((_, c)) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Result<i32> {
        self.terms
            .first()
            .map(|(e, _)| *e)
            .ok_or(Error::ZeroValuation)
    }

    pub fn classify(&self) -> Classification {
        match self.terms.first() {
            None => Classification::Zero,
            Some((e, _)) => match e.cmp(&0) {
                Ordering::Less => Classification::Infinite,
                Ordering::Equal => Classification::Appreciable,
                Ordering::Greater => Classification::Infinitesimal,
            },
        }
    }

    /// The standard part: the real number infinitely close to a finite value.
    pub fn shadow(&self) -> Result<Rational> {
        if self.classify() == Classification::Infinite {
            return Err(Error::NotFinite);
        }
        Ok(self.coeff(0))
    }

    /// `x ≈ y`: the difference is zero or infinitesimal.
    pub fn infinitely_close(&self, other: &Self) -> Result<bool> {
        let d = self.checked_sub(other)?;
        Ok(matches!(
            d.classify(),
            Classification::Zero | Classification::Infinitesimal
        ))
    }

    /// The leading monomial `c e^v`.
    pub fn leading_term(&self) -> Result<Self> {
        let (e, c) = self.terms.first().ok_or(Error::ZeroValuation)?;
        Ok(Self {
            terms: vec![(*e, c.clone())],
            order: self.order,
            saturated: self.saturated,
        })
    }

    /// Parses the textual rendering, e.g. `"3 + 5e - e^2"` or `"e^-1"`.
    pub fn parse(text: &str, order: u32) -> Result<Self> {
        check_order(order)?;
        let terms = parse_terms(text)?;
        Self::from_terms(order, terms)
    }
}

impl PartialEq for HyperReal {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.terms == other.terms
    }
}

impl Eq for HyperReal {}

impl std::ops::Neg for HyperReal {
    type Output = HyperReal;

    fn neg(mut self) -> HyperReal {
        for (_, c) in &mut self.terms {
            *c = -c.clone();
        }
        self
    }
}

impl std::ops::Neg for &HyperReal {
    type Output = HyperReal;

    fn neg(self) -> HyperReal {
        -self.clone()
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, exponent: i32, magnitude: &Rational) -> fmt::Result {
    if exponent == 0 {
        return write!(f, "{magnitude}");
    }
    if !magnitude.is_one() {
        write!(f, "{magnitude}")?;
    }
    if exponent == 1 {
        f.write_str("e")
    } else {
        write!(f, "e^{exponent}")
    }
}

impl fmt::Display for HyperReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            fmt_monomial(f, *e, &c.abs())?;
        }
        Ok(())
    }
}

impl FromStr for HyperReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, DEFAULT_ORDER)
    }
}

/// Tokenless scanner for `[sign] term (sign term)*` where a term is
/// `number`, `number e[^int]`, `number*e[^int]` or `e[^int]`.
fn parse_terms(text: &str) -> Result<Vec<(i32, Rational)>> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut out = Vec::new();
    let syntax = |offset: usize, message: &str| Error::Syntax {
        offset,
        message: message.to_string(),
    };
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(syntax(pos, "expected a term"));
    }
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        let mut negative = false;
        match bytes.get(pos) {
            Some(b'+') => pos += 1,
            Some(b'-') => {
                negative = true;
                pos += 1
            }
            _ if first => {}
            Some(_) => return Err(syntax(pos, "expected `+` or `-`")),
            None => break,
        }
        first = false;
        skip_ws(&mut pos);

        // coefficient
        let start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
            pos += 1;
        }
        let mut coeff = if pos > start {
            let whole = &text[start..pos];
            let mut value = rational::parse_decimal(whole)
                .ok_or_else(|| syntax(start, "malformed number"))?;
            if bytes.get(pos) == Some(&b'/') && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit) {
                let dstart = pos + 1;
                pos = dstart;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let den: num_bigint::BigInt = text[dstart..pos].parse().expect("digits");
                if den.is_zero() {
                    return Err(syntax(dstart, "zero denominator"));
                }
                if !rational::is_integer(&value) {
                    return Err(syntax(start, "fraction numerator must be an integer"));
                }
                value /= Rational::from_integer(den);
            }
            Some(value)
        } else {
            None
        };
        skip_ws(&mut pos);
        if coeff.is_some() && bytes.get(pos) == Some(&b'*') {
            pos += 1;
            skip_ws(&mut pos);
            if bytes.get(pos) != Some(&b'e') {
                return Err(syntax(pos, "expected `e` after `*`"));
            }
        }

        // infinitesimal part
        let mut exponent = 0i32;
        if bytes.get(pos) == Some(&b'e') {
            pos += 1;
            exponent = 1;
            skip_ws(&mut pos);
            if bytes.get(pos) == Some(&b'^') {
                pos += 1;
                skip_ws(&mut pos);
                let estart = pos;
                if matches!(bytes.get(pos), Some(b'-') | Some(b'+')) {
                    pos += 1;
                }
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exponent = text[estart..pos]
                    .parse()
                    .map_err(|_| syntax(estart, "expected an integer exponent"))?;
            }
        } else if coeff.is_none() {
            return Err(syntax(pos, "expected a number or `e`"));
        }

        let mut c = coeff.take().unwrap_or_else(Rational::one);
        if negative {
            c = -c;
        }
        out.push((exponent, c));
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn h(s: &str) -> HyperReal {
        s.parse().unwrap()
    }

    fn h_k(s: &str, k: u32) -> HyperReal {
        HyperReal::parse(s, k).unwrap()
    }

    #[test]
    fn embedding() {
        let x = HyperReal::from_real(int(3), 8).unwrap();
        assert_eq!(x.terms(), &[(0, int(3))]);
        assert!(HyperReal::from_real(int(0), 8).unwrap().is_zero());
        let y = HyperReal::from_real(ratio(-1, 2), 4).unwrap();
        assert_eq!(y.terms(), &[(0, ratio(-1, 2))]);
        assert!(HyperReal::from_real(int(1), 0).is_err());
    }

    #[test]
    fn epsilon_window() {
        assert_eq!(HyperReal::epsilon(1, 8).unwrap(), h("e"));
        let inv = HyperReal::epsilon(-1, 8).unwrap();
        assert_eq!(inv.classify(), Classification::Infinite);
        assert!(matches!(
            HyperReal::epsilon(9, 8),
            Err(Error::WindowExceeded { exponent: 9, order: 8 })
        ));
    }

    #[test]
    fn addition() {
        assert_eq!(h("1+e").checked_add(&h("2-e")).unwrap(), h("3"));
        let s = h("e").checked_add(&h("e^2")).unwrap();
        assert_eq!(s.terms(), &[(1, int(1)), (2, int(1))]);
        let x = h("2+3e-e^2");
        assert!(x.checked_add(&-&x).unwrap().is_zero());
        assert!(matches!(
            h_k("1", 4).checked_add(&h_k("1", 8)),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn multiplication() {
        assert_eq!(h("1+e").checked_mul(&h("1-e")).unwrap(), h("1 - e^2"));
        assert_eq!(h("e").checked_mul(&h("e^-1")).unwrap(), h("1"));

        let p = h_k("2e", 2).checked_mul(&h_k("3e", 2)).unwrap();
        assert_eq!(p, h_k("6e^2", 2));
        assert!(!p.is_saturated());
        let p = h_k("2e", 1).checked_mul(&h_k("3e", 1)).unwrap();
        assert!(p.is_zero());
        assert!(p.is_saturated());

        let r = h_k("e^-1", 1).checked_mul(&h_k("e^-1", 1));
        assert!(matches!(r, Err(Error::WindowExceeded { exponent: -2, .. })));
    }

    #[test]
    fn division() {
        let q = h("2e + 3e^2").checked_div(&h("e")).unwrap();
        assert_eq!(q, h("2 + 3e"));
        assert!(!q.is_saturated());

        // geometric series, checked by multiplying back
        let g = h("1").checked_div(&h("1 - e")).unwrap();
        let expected = HyperReal::from_terms(8, (0..=8).map(|k| (k, int(1)))).unwrap();
        assert_eq!(g, expected);
        assert!(g.is_saturated());
        let back = g.checked_mul(&h("1-e")).unwrap();
        assert_eq!(back.terms(), &[(0, int(1))]);

        assert_eq!(h("e + e^2").checked_div(&h("e")).unwrap(), h("1 + e"));
        assert_eq!(h("e - e^2").checked_div(&h("e")).unwrap(), h("1 - e"));
        assert_eq!(h("1").checked_div(&h("0")), Err(Error::DivisionByZero));
        assert_eq!(h("1").checked_div(&h("e")).unwrap(), h("e^-1"));
    }

    #[test]
    fn ordering() {
        let thousandth = HyperReal::from_real(ratio(1, 1000), 8).unwrap();
        assert_eq!(h("e").compare(&thousandth).unwrap(), Ordering::Less);
        assert_eq!(h("e^2").compare(&h("e")).unwrap(), Ordering::Less);
        assert_eq!(h("3+e").compare(&h("3")).unwrap(), Ordering::Greater);
        assert_eq!(h("3+e").compare(&h("3+e")).unwrap(), Ordering::Equal);
        assert_eq!(h("-e^-1").compare(&h("-1000")).unwrap(), Ordering::Less);
    }

    #[test]
    fn classification_and_valuation() {
        assert_eq!(h("3+5e").classify(), Classification::Appreciable);
        assert_eq!(h("e^-1 + 7").classify(), Classification::Infinite);
        assert_eq!(h("e^3").classify(), Classification::Infinitesimal);
        assert_eq!(h("0").classify(), Classification::Zero);
        assert_eq!(h("2e^3 + 7e^5").valuation().unwrap(), 3);
        assert_eq!(h("0").valuation(), Err(Error::ZeroValuation));
    }

    #[test]
    fn shadows() {
        assert_eq!(h("3 + 5e - e^2").shadow().unwrap(), int(3));
        let q = h("2 + 7e").checked_div(&h("2")).unwrap();
        assert_eq!(q.shadow().unwrap(), int(1));
        assert_eq!(h("e^-1").shadow(), Err(Error::NotFinite));
        assert_eq!(h("e").shadow().unwrap(), int(0));
    }

    #[test]
    fn closeness() {
        assert!(h("3+e").infinitely_close(&h("3")).unwrap());
        assert!(h("e").infinitely_close(&h("e^2")).unwrap());
        assert!(!h("3").infinitely_close(&h("4")).unwrap());
    }

    #[test]
    fn rendering() {
        assert_eq!(h("3 + 5e - 1e^2").to_string(), "3 + 5e - e^2");
        assert_eq!(h("e^-1").to_string(), "e^-1");
        assert_eq!(h("1+2e+e^2").to_string(), "1 + 2e + e^2");
        assert_eq!(h("-1/2e^3").to_string(), "-1/2e^3");
        assert_eq!(h("0").to_string(), "0");
        assert_eq!(h("0.5*e").to_string(), "1/2e");
        assert_eq!(h("e^-1 - 3").to_string(), "e^-1 - 3");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "3 +", "3 e x", "e^", "e^x", "1/0", "3 4", "++e"] {
            assert!(matches!(h_parse(bad), Err(Error::Syntax { .. })), "{bad}");
        }
        assert!(matches!(
            HyperReal::parse("e^9", 8),
            Err(Error::WindowExceeded { .. })
        ));
    }

    fn h_parse(s: &str) -> Result<HyperReal> {
        s.parse()
    }

    #[test]
    fn powers() {
        assert_eq!(h("1+e").powi(2).unwrap(), h("1 + 2e + e^2"));
        assert_eq!(h("1+e").powi(0).unwrap(), h("1"));
        assert_eq!(h("e").recip().unwrap(), h("e^-1"));
    }
}
