//! Dense univariate polynomials over exact rationals, with real-root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::rational::{self, Rational};

/// Default absolute width for bracketing intervals of irrational roots.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Coefficients stored lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, factor: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rational::int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&(Rational::one() / l)),
            None => Poly::zero(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiple with coprime integer coefficients and positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !g.is_zero() {
            for c in &mut ints {
                *c /= &g;
            }
        }
        if ints.last().is_some_and(Signed::is_negative) {
            for c in &mut ints {
                *c = -c.clone();
            }
        }
        ints
    }

    /// Real roots with multiplicities, sorted ascending.
    ///
    /// Rational roots are extracted exactly (rational-root test on divisors of the
    /// extreme coefficients, then deflation). The remaining factor is split into
    /// square-free parts; each part's roots are isolated inside the Cauchy bound with a
    /// Sturm count and then narrowed by sign-change bisection to width `tol`.
    pub fn real_roots(&self, tol: f64) -> Vec<Root> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let mut rest = self.monic();

        for r in rational_root_candidates(&rest) {
            let mut mult = 0;
            while rest.degree().unwrap_or(0) > 0 && rest.eval(&r).is_zero() {
                let (q, _) = rest.div_rem(&Poly::new(vec![-r.clone(), Rational::one()]));
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push(Root {
                    value: RootValue::Exact(r),
                    multiplicity: mult,
                });
            }
        }

        for (mult, part) in square_free_parts(&rest) {
            for (lo, hi) in isolate(&part) {
                let (lo, hi) = refine(&part, lo, hi, tol);
                roots.push(Root {
                    value: RootValue::Interval { lo, hi },
                    multiplicity: mult,
                });
            }
        }
        roots.sort_by(|a, b| a.approx().total_cmp(&b.approx()));
        roots
    }

    /// Renders with the given variable name, highest degree first.
    pub fn display<'a>(&'a self, var: &'a str) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, var }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    var: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.poly.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = c.abs();
            match k {
                0 => write!(f, "{m}")?,
                _ => {
                    if !m.is_one() {
                        write!(f, "{m}")?;
                    }
                    f.write_str(self.var)?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootValue {
    Exact(Rational),
    /// Open interval with rational endpoints containing exactly one root; the
    /// square-free factor changes sign across it.
    Interval { lo: Rational, hi: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: RootValue,
    pub multiplicity: u32,
}

impl Root {
    /// Exact value or interval midpoint as a double.
    pub fn approx(&self) -> f64 {
        match &self.value {
            RootValue::Exact(r) => rational::to_f64(r),
            RootValue::Interval { lo, hi } => rational::to_f64(&((lo + hi) / rational::int(2))),
        }
    }

    pub fn width(&self) -> f64 {
        match &self.value {
            RootValue::Exact(_) => 0.0,
            RootValue::Interval { lo, hi } => rational::to_f64(&(hi - lo)),
        }
    }
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Interval {
            lo: f64,
            hi: f64,
            midpoint: f64,
            width: f64,
        }
        let mut map = s.serialize_map(Some(2))?;
        match &self.value {
            RootValue::Exact(r) => map.serialize_entry("exact", &r.to_string())?,
            RootValue::Interval { lo, hi } => map.serialize_entry(
                "interval",
                &Interval {
                    lo: rational::to_f64(lo),
                    hi: rational::to_f64(hi),
                    midpoint: self.approx(),
                    width: self.width(),
                },
            )?,
        }
        map.serialize_entry("multiplicity", &self.multiplicity)?;
        map.end()
    }
}

// Candidate divisor enumeration gives up beyond this magnitude; such roots are
// still found, as intervals.
const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > DIVISOR_LIMIT {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

fn rational_root_candidates(p: &Poly) -> Vec<Rational> {
    let ints = p.primitive_integer();
    let mut out = Vec::new();
    if ints.is_empty() {
        return out;
    }
    if ints[0].is_zero() {
        out.push(Rational::zero());
    }
    // lowest nonzero coefficient, after stripping powers of x
    let low = match ints.iter().find(|c| !c.is_zero()) {
        Some(c) => c,
        None => return out,
    };
    let (Some(num), Some(den)) = (divisors(low), divisors(ints.last().unwrap())) else {
        return out;
    };
    let mut seen = std::collections::BTreeSet::new();
    for a in &num {
        for b in &den {
            let r = Rational::new(BigInt::from(*a), BigInt::from(*b));
            if seen.insert(r.clone()) {
                out.push(r.clone());
                out.push(-r);
            }
        }
    }
    out
}

/// Yun's algorithm: `(multiplicity, square-free factor)` pairs of positive degree.
fn square_free_parts(p: &Poly) -> Vec<(u32, Poly)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((i, a.clone()));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

fn cauchy_bound(p: &Poly) -> Rational {
    let lead = p.leading().unwrap().abs();
    let max = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::one() + max
}

/// Disjoint intervals `(lo, hi)` each holding exactly one root of a square-free `p`
/// with no rational roots (so no root sits on a dyadic endpoint).
fn isolate(p: &Poly) -> Vec<(Rational, Rational)> {
    let chain = sturm_chain(p);
    let b = cauchy_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = rational::int(2);
    while let Some((lo, hi)) = stack.pop() {
        let n = sign_changes(&chain, &lo) - sign_changes(&chain, &hi);
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort();
    out
}

fn refine(p: &Poly, mut lo: Rational, mut hi: Rational, tol: f64) -> (Rational, Rational) {
    let two = rational::int(2);
    let positive_at_lo = p.eval(&lo).is_positive();
    loop {
        let scale = rational::to_f64(&lo).abs().max(rational::to_f64(&hi).abs()).max(1.0);
        if rational::to_f64(&(&hi - &lo)) <= tol * scale {
            return (lo, hi);
        }
        let mid = (&lo + &hi) / &two;
        let v = p.eval(&mid);
        if v.is_zero() {
            // only reachable when p has a rational root at a dyadic point
            return (mid.clone(), mid);
        }
        if v.is_positive() == positive_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
