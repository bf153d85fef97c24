//! Leibniz's law of homogeneity, Euler's arithmetic and geometric equality, and
//! Cauchy-style derivatives and continuity read off through the shadow.

use serde::{Serialize, Serializer};

use crate::adequality::ser_rational;
use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::hypernum::{Classification, HyperReal, DEFAULT_ORDER};
use crate::rational::{self, Rational};

/// Keeps only the lowest-order terms, e.g. `a + dx = a`, `dx + ddy = dx`.
pub fn tlh_normalize(x: &HyperReal) -> Result<HyperReal> {
    x.leading_term()
}

/// `(f(x0 + alpha) - f(x0)) / alpha`, computed at `alpha`'s truncation order.
pub fn difference_quotient(f: &Expr, x0: &Rational, alpha: &HyperReal) -> Result<HyperReal> {
    let order = alpha.order();
    let base = HyperReal::from_real(x0.clone(), order)?;
    let fx = HyperReal::from_real(f.eval_real(x0)?, order)?;
    let moved = f.eval_hyper(&base.checked_add(alpha)?)?;
    moved.checked_sub(&fx)?.checked_div(alpha)
}

fn ser_hyper<S: Serializer>(x: &HyperReal, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductRuleTrace {
    #[serde(serialize_with = "ser_hyper")]
    pub du: HyperReal,
    #[serde(serialize_with = "ser_hyper")]
    pub dv: HyperReal,
    /// `(u + du)(v + dv) - uv`, expanded literally.
    #[serde(serialize_with = "ser_hyper")]
    pub full_differential: HyperReal,
    /// Leading-order part of the full differential (zero when that is zero).
    #[serde(serialize_with = "ser_hyper")]
    pub tlh_reduced: HyperReal,
    /// `u dv + v du`.
    #[serde(serialize_with = "ser_hyper")]
    pub linear_part: HyperReal,
    /// `full_differential - linear_part`; always equal to `du dv`.
    #[serde(serialize_with = "ser_hyper")]
    pub discarded: HyperReal,
    #[serde(serialize_with = "ser_rational")]
    pub shadow_slope: Rational,
}

/// Expands `d(uv)` at `x0` along `e` and splits it into `u dv + v du` plus `du dv`.
pub fn product_rule_trace(u: &Expr, v: &Expr, x0: &Rational) -> Result<ProductRuleTrace> {
    let k = DEFAULT_ORDER;
    let eps = HyperReal::epsilon(1, k)?;
    let x = HyperReal::from_real(x0.clone(), k)?.checked_add(&eps)?;
    let u0 = HyperReal::from_real(u.eval_real(x0)?, k)?;
    let v0 = HyperReal::from_real(v.eval_real(x0)?, k)?;
    let du = u.eval_hyper(&x)?.checked_sub(&u0)?;
    let dv = v.eval_hyper(&x)?.checked_sub(&v0)?;

    let full = u0
        .checked_add(&du)?
        .checked_mul(&v0.checked_add(&dv)?)?
        .checked_sub(&u0.checked_mul(&v0)?)?;
    let tlh_reduced = if full.is_zero() {
        full.clone()
    } else {
        tlh_normalize(&full)?
    };
    let linear_part = u0.checked_mul(&dv)?.checked_add(&v0.checked_mul(&du)?)?;
    let discarded = full.checked_sub(&linear_part)?;
    let shadow_slope = full.checked_div(&eps)?.shadow()?;
    Ok(ProductRuleTrace {
        du,
        dv,
        full_differential: full,
        tlh_reduced,
        linear_part,
        discarded,
        shadow_slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModeComparison {
    /// `x - y` is zero or infinitesimal.
    pub arithmetic_equal: bool,
    /// `x / y` is infinitely close to 1; `None` when `y = 0`.
    #[serde(serialize_with = "ser_geometric")]
    pub geometric_equal: Option<bool>,
}

fn ser_geometric<S: Serializer>(g: &Option<bool>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match g {
        Some(b) => s.serialize_bool(*b),
        None => s.serialize_str("UNDEFINED"),
    }
}

pub fn compare_modes(x: &HyperReal, y: &HyperReal) -> Result<ModeComparison> {
    let arithmetic_equal = x.infinitely_close(y)?;
    let geometric_equal = if y.is_zero() {
        None
    } else {
        let one = HyperReal::one(x.order())?;
        Some(match x.checked_div(y) {
            Ok(ratio) => ratio.infinitely_close(&one)?,
            // the ratio fell below e^-K, so it is infinite
            Err(Error::WindowExceeded { .. }) => false,
            Err(e) => return Err(e),
        })
    };
    Ok(ModeComparison {
        arithmetic_equal,
        geometric_equal,
    })
}

/// `{e, 2e, e^2}`.
pub fn default_derivative_witnesses(order: u32) -> Result<Vec<HyperReal>> {
    let e = HyperReal::epsilon(1, order)?;
    Ok(vec![
        e.clone(),
        e.scale(&rational::int(2)),
        HyperReal::epsilon(2, order)?,
    ])
}

/// `{e, -e, e^2, -e^2}`.
pub fn default_continuity_witnesses(order: u32) -> Result<Vec<HyperReal>> {
    let e = HyperReal::epsilon(1, order)?;
    let e2 = HyperReal::epsilon(2, order)?;
    Ok(vec![e.clone(), -e, e2.clone(), -e2])
}

fn check_witnesses(witnesses: &[HyperReal]) -> Result<()> {
    if witnesses.is_empty() {
        return Err(Error::InvalidInput("no witnesses given".into()));
    }
    for w in witnesses {
        if w.classify() != Classification::Infinitesimal {
            return Err(Error::InvalidInput(format!(
                "witness `{w}` is not a nonzero infinitesimal"
            )));
        }
    }
    Ok(())
}

/// Shadow of the difference quotient, required to agree across all witnesses.
pub fn derivative_shadow(f: &Expr, x0: &Rational, witnesses: &[HyperReal]) -> Result<Rational> {
    check_witnesses(witnesses)?;
    if let Err(Error::Evaluation { subexpr, .. }) = f.eval_real(x0) {
        return Err(Error::NotDifferentiable {
            reason: format!("`{subexpr}` has a pole at x = {x0}"),
            values: witnesses.iter().map(|w| (w.to_string(), None)).collect(),
        });
    }
    let mut values = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        let q = difference_quotient(f, x0, w)?;
        values.push((w.to_string(), q.shadow().ok()));
    }
    let labelled = || {
        values
            .iter()
            .map(|(w, v)| (w.clone(), v.as_ref().map(|r| r.to_string())))
            .collect()
    };
    if values.iter().any(|(_, v)| v.is_none()) {
        return Err(Error::NotDifferentiable {
            reason: format!("difference quotient is infinite at x = {x0}"),
            values: labelled(),
        });
    }
    let first = values[0].1.clone().unwrap();
    if values.iter().any(|(_, v)| v.as_ref() != Some(&first)) {
        return Err(Error::NotDifferentiable {
            reason: format!("difference quotients disagree at x = {x0}"),
            values: labelled(),
        });
    }
    Ok(first)
}

/// Whether every witness step `alpha` moves `f` by at most an infinitesimal.
pub fn microcontinuity_check(f: &Expr, x0: &Rational, witnesses: &[HyperReal]) -> Result<bool> {
    check_witnesses(witnesses)?;
    let y0 = f.eval_real(x0)?;
    for w in witnesses {
        let y0 = HyperReal::from_real(y0.clone(), w.order())?;
        let x = HyperReal::from_real(x0.clone(), w.order())?.checked_add(w)?;
        let y = match f.eval_hyper(&x) {
            Ok(y) => y,
            Err(Error::Evaluation { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if !y.classify().is_finite() || !y.infinitely_close(&y0)? {
            return Ok(false);
        }
    }
    Ok(true)
}
