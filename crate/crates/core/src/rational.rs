//! Helpers for exact rationals: literal parsing and conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-1/2"`, `"0.125"` or `"+7"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational literal: `{text}`"));
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let body = body.trim_start();
    if body.is_empty() {
        return Err(bad());
    }
    let value = if let Some((n, d)) = body.split_once('/') {
        let n = parse_digits(n.trim()).ok_or_else(bad)?;
        let d = parse_digits(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in `{text}`")));
        }
        Rational::new(n, d)
    } else {
        parse_decimal(body).ok_or_else(bad)?
    };
    Ok(if neg { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Exact value of an unsigned decimal literal such as `12`, `0.5` or `3.`.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let (whole, frac) = match s.split_once('.') {
        Some((w, f)) => (w, f),
        None => (s, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(n, d))
}

/// Nearest double to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // numerator and denominator too large for a direct conversion
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
    let n = r.numer() >> shift.max(0) as usize;
    let d = r.denom() >> shift.max(0) as usize;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

pub(crate) fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}
