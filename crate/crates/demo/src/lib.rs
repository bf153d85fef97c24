//! Browser bindings. Every entry point takes plain strings and numbers and returns
//! a JSON document; failures come back as `{"error": kind, "message": ...}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use shadowcalc::adequality::{adequate_extremum, tangent_line};
use shadowcalc::rational::{parse_rational, to_f64};
use shadowcalc::rearrange::{decreasing_rearrangement, hull_touch_point, sample_grid};
use shadowcalc::{Error, Expr, HyperReal};

const MAX_GRID: usize = 4096;
const MAX_SAMPLES: usize = 2000;

fn respond(result: Result<Value, Error>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.kind(), "message": e.to_string() }).to_string(),
    }
}

/// Evaluates `expr` at a hyperreal such as `2 + e` with truncation order `order`.
#[wasm_bindgen]
pub fn evaluate(expr: &str, at: &str, order: u32) -> String {
    respond((|| {
        let f = Expr::parse(expr)?;
        let y = f.eval_hyper(&HyperReal::parse(at, order)?)?;
        Ok(json!({
            "value": y.to_string(),
            "shadow": y.shadow().ok().map(|s| s.to_string()),
            "classification": y.classify(),
            "saturated": y.is_saturated(),
        }))
    })())
}

/// Tangent at `x0` plus samples of the curve on `[lo, hi]` for plotting.
/// Polynomials also get their critical points.
#[wasm_bindgen]
pub fn tangent(expr: &str, x0: &str, lo: f64, hi: f64, samples: usize) -> String {
    respond((|| {
        let f = Expr::parse(expr)?;
        let x0 = parse_rational(x0)?;
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidInput("empty plotting window".into()));
        }
        let t = tangent_line(&f, &x0)?;
        let m = samples.clamp(2, MAX_SAMPLES);
        let curve: Vec<Value> = (0..m)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (m - 1) as f64;
                json!([x, f.eval_f64(x).ok().filter(|y| y.is_finite())])
            })
            .collect();
        let critical: Vec<f64> = match adequate_extremum(&f) {
            Ok(report) => report.roots.iter().map(|r| r.approx()).collect(),
            Err(_) => Vec::new(),
        };
        Ok(json!({
            "tangent": t,
            "slope_f64": to_f64(&t.slope),
            "intercept_f64": to_f64(&t.intercept),
            "x0_f64": to_f64(&t.x0),
            "y0_f64": to_f64(&t.y0),
            "curve": curve,
            "critical_points": critical,
        }))
    })())
}

/// Samples `expr` at `i/n`, sorts the values into non-increasing order and
/// picks the hull touch point.
#[wasm_bindgen]
pub fn rearrange(expr: &str, n: usize) -> String {
    respond((|| {
        if n > MAX_GRID {
            return Err(Error::InvalidInput(format!("grid larger than {MAX_GRID}")));
        }
        let g = sample_grid(&Expr::parse(expr)?, n)?;
        let r = decreasing_rearrangement(&g);
        let touch = hull_touch_point(&r)?;
        Ok(json!({
            "p": (0..g.n()).map(|k| g.abscissa(k)).collect::<Vec<_>>(),
            "f": g.values(),
            "g_hat": r.g_hat,
            "psi": r.psi.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "riemann_f": r.riemann_f,
            "riemann_g": r.riemann_g,
            "hull_touch": { "index": touch.index + 1, "a": touch.a },
        }))
    })())
}
