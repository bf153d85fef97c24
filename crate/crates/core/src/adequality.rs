//! Fermat's method of adequality for extrema and tangents.
//!
//! [`adequate_extremum`] runs the six-step procedure literally on a polynomial
//! `f(a)`: form `f(a+e)`, set it adequal to `f(a)`, cancel, divide by the lowest
//! power of `e`, suppress every term still carrying `e`, and solve what is left.
//! Each step is recorded in a [`DerivationTrace`].

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::homogeneity::difference_quotient;
use crate::hypernum::{Classification, HyperReal, DEFAULT_ORDER};
use crate::poly::{Poly, Root, RootValue, ROOT_TOLERANCE};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    FormIncrement,
    Adequate,
    Cancel,
    DivideByE,
    Suppress,
    Solve,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: String,
    pub after: String,
    /// DIVIDE_BY_E: the power of `e` divided out. SUPPRESS: the lowest `e`-power
    /// among the suppressed terms (absent when nothing was suppressed).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    fn push(&mut self, rule: Rule, before: String, after: String, power: Option<u32>) {
        self.steps.push(TraceStep {
            rule,
            before,
            after,
            power,
        });
    }
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            let tag = serde_json::to_value(s.rule).expect("rule serializes");
            let tag = tag.as_str().unwrap_or_default();
            match s.power {
                Some(p) => writeln!(f, "{}. {tag} (e^{p}): {}  =>  {}", i + 1, s.before, s.after)?,
                None => writeln!(f, "{}. {tag}: {}  =>  {}", i + 1, s.before, s.after)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointReport {
    #[serde(rename = "residual_coeffs", serialize_with = "ser_poly")]
    pub residual: Poly,
    pub roots: Vec<Root>,
    pub trace: DerivationTrace,
}

fn ser_poly<S: Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.coeffs().iter().map(|c| c.to_string()))
}

pub(crate) fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Polynomial in `e` whose coefficients are polynomials in `a`; index = power of `e`.
#[derive(Clone, Debug, PartialEq)]
struct Bivariate(Vec<Poly>);

impl Bivariate {
    /// `p(a + e)` by binomial expansion.
    fn shifted(p: &Poly) -> Self {
        let deg = p.degree().unwrap_or(0);
        let mut groups = vec![vec![Rational::zero(); deg + 1]; deg + 1];
        for (j, c) in p.coeffs().iter().enumerate() {
            let mut binom = Rational::one();
            for k in 0..=j {
                // term c * C(j,k) a^(j-k) e^k
                groups[k][j - k] += c * &binom;
                binom = binom * rational::int((j - k) as i64) / rational::int(k as i64 + 1);
            }
        }
        Self(groups.into_iter().map(Poly::new).collect())
    }

    fn minus_constant_term(&self, p: &Poly) -> Self {
        let mut g = self.0.clone();
        if g.is_empty() {
            g.push(Poly::zero());
        }
        g[0] = g[0].sub(p);
        Self(g)
    }

    /// Lowest power of `e` with a nonzero coefficient.
    fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|p| !p.is_zero())
    }

    fn shift_down(&self, v: usize) -> Self {
        Self(self.0[v..].to_vec())
    }
}

impl fmt::Display for Bivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (k, p) in self.0.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let nonzero = p.coeffs().iter().filter(|c| !c.is_zero()).count();
            let body = p.display("a").to_string();
            let e = match k {
                0 => String::new(),
                1 => "e".into(),
                _ => format!("e^{k}"),
            };
            parts.push(match (k, nonzero) {
                (0, _) => body,
                (_, 1) if body == "1" => e,
                (_, 1) if body == "-1" => format!("-{e}"),
                (_, 1) => format!("{body}*{e}"),
                _ => format!("({body})*{e}"),
            });
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        for (i, p) in parts.iter().enumerate() {
            match (i, p.strip_prefix('-')) {
                (0, _) => f.write_str(p)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {p}")?,
            }
        }
        Ok(())
    }
}

/// Extremum of a polynomial by adequality.
pub fn adequate_extremum(f: &Expr) -> Result<CriticalPointReport> {
    let p = f.to_poly()?;
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::DegenerateInput(format!(
            "`{f}` is constant; every point is trivially extremal"
        )));
    }
    let fa = p.display("a").to_string();
    let mut trace = DerivationTrace::default();

    let shifted = Bivariate::shifted(&p);
    trace.push(
        Rule::FormIncrement,
        format!("f(a) = {fa}"),
        format!("f(a+e) = {shifted}"),
        None,
    );
    trace.push(
        Rule::Adequate,
        "f(a+e) =_AD f(a)".into(),
        format!("{shifted} =_AD {fa}"),
        None,
    );

    let cancelled = shifted.minus_constant_term(&p);
    trace.push(
        Rule::Cancel,
        format!("{shifted} - ({fa})"),
        cancelled.to_string(),
        None,
    );

    // Nonconstant p always leaves the e^1 coefficient p'(a) nonzero, so this is 1 in
    // practice; dividing by the highest common power covers the general case.
    let v = cancelled
        .valuation()
        .expect("nonconstant polynomial leaves e-terms after cancelling");
    let divided = cancelled.shift_down(v);
    trace.push(
        Rule::DivideByE,
        cancelled.to_string(),
        divided.to_string(),
        Some(v as u32),
    );

    let residual = divided.0[0].clone();
    let suppressed = Bivariate(
        std::iter::once(Poly::zero())
            .chain(divided.0[1..].iter().cloned())
            .collect(),
    );
    trace.push(
        Rule::Suppress,
        divided.to_string(),
        residual.display("a").to_string(),
        suppressed.valuation().map(|k| k as u32),
    );

    let roots = residual.real_roots(ROOT_TOLERANCE);
    let solved = if roots.is_empty() {
        "no real solutions".to_string()
    } else {
        roots
            .iter()
            .map(|r| match &r.value {
                RootValue::Exact(x) => format!("a = {x}"),
                RootValue::Interval { .. } => format!("a ≈ {:.15}", r.approx()),
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    trace.push(
        Rule::Solve,
        format!("{} = 0", residual.display("a")),
        solved,
        None,
    );

    Ok(CriticalPointReport {
        residual,
        roots,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentResult {
    #[serde(serialize_with = "ser_rational")]
    pub x0: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub y0: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub slope: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub intercept: Rational,
    /// Distance from the origin to where the tangent meets the axis `x = 0`; for
    /// `y = x^2` this is the distance from the vertex along the axis of symmetry.
    #[serde(serialize_with = "ser_rational")]
    pub vertex_distance: Rational,
}

/// Tangent to `y = f(x)` at `x0`, with slope the shadow of the difference quotient.
pub fn tangent_line(f: &Expr, x0: &Rational) -> Result<TangentResult> {
    let y0 = f.eval_real(x0)?;
    let eps = HyperReal::epsilon(1, DEFAULT_ORDER)?;
    let q = difference_quotient(f, x0, &eps)?;
    if q.classify() == Classification::Infinite {
        return Err(Error::NotDifferentiable {
            reason: format!("difference quotient is infinite at x = {x0}"),
            values: vec![(eps.to_string(), None)],
        });
    }
    let slope = q.shadow()?;
    let intercept = &y0 - &slope * x0;
    Ok(TangentResult {
        x0: x0.clone(),
        y0,
        vertex_distance: intercept.abs(),
        slope,
        intercept,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayReport {
    /// The ray leaves the curve on its convex outside for every positive infinitesimal step.
    pub outside: bool,
    /// Lowest power of `e` in `curve - ray` along the ray.
    pub leading_power: i32,
    #[serde(serialize_with = "ser_rational")]
    pub leading_coefficient: Rational,
    /// The first-order term vanishes: the ray is the tangent.
    pub tangent: bool,
}

/// Checks whether the ray from `(x0, c x0^2)` with the given slope stays outside the
/// parabola `y = c x^2` for a positive infinitesimal step `e`.
///
/// The ray runs toward the axis of symmetry (decreasing `|x|`; rightward from the
/// vertex itself), matching the decreasing ordinate `q = y - e` of the classical
/// construction. "Outside" means the ray lies on the side of the curve away from the
/// focus: `c * (curve - ray) >= 0` at leading order.
pub fn transverse_ray_check(f: &Expr, x0: &Rational, slope: &Rational) -> Result<RayReport> {
    let p = f.to_poly()?;
    let c = p.coeff(2);
    if p.degree() != Some(2) || !p.coeff(0).is_zero() || !p.coeff(1).is_zero() {
        return Err(Error::InvalidInput(format!(
            "`{f}` is not a parabola of the form c*x^2"
        )));
    }
    let dir = if x0.is_positive() {
        -Rational::one()
    } else {
        Rational::one()
    };
    let step = HyperReal::epsilon(1, DEFAULT_ORDER)?.scale(&dir);
    let base = HyperReal::from_real(x0.clone(), DEFAULT_ORDER)?;
    let x = base.checked_add(&step)?;
    let y0 = f.eval_real(x0)?;
    let ray = HyperReal::from_real(y0, DEFAULT_ORDER)?.checked_add(&step.scale(slope))?;
    let gap = f.eval_hyper(&x)?.checked_sub(&ray)?;
    // Along the ray gap = (2c x0 - slope) dir e + c e^2, never identically zero.
    let (power, coeff) = gap.terms()[0].clone();
    let oriented = if c.is_positive() { coeff.clone() } else { -coeff.clone() };
    Ok(RayReport {
        outside: oriented.is_positive(),
        leading_power: power,
        leading_coefficient: coeff,
        tangent: power >= 2,
    })
}
