//! Decreasing rearrangement on the grid `p_i = i/n`, `i = 1..=n`.
//!
//! A finite `n` stands in for an infinite hypernatural. Values are doubles; indices in
//! the Rust API are 0-based (slot `k` holds `f(p_{k+1})`), while the CSV and JSON
//! exports use the 1-based grid labels.
//!
//! The rearrangement is a stable descending sort, so equal values keep their
//! original left-to-right order. [`check_uniformity_lemma`] verifies the
//! combinatorial fact behind continuity of the rearranged function: for every
//! `i < j` there are grid indices `m < n` with `n - m <= j - i` and
//! `|f(p_m) - f(p_n)| >= g_i - g_j`.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exprlang::Expr;
use crate::rational::{self, Rational};
use crate::summation::compensated_sum;

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one point".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "value at grid point {} is not finite",
                i + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Abscissa of slot `k`, i.e. `(k+1)/n`.
    pub fn abscissa(&self, k: usize) -> f64 {
        (k + 1) as f64 / self.n() as f64
    }

    /// Grid measure of `{x : f(x) > y}`.
    pub fn distribution(&self, y: f64) -> f64 {
        distribution_function(self, y)
    }
}

/// Samples `f` at `p_i = i/n` in double precision.
pub fn sample_grid(f: &Expr, n: usize) -> Result<GridFunction> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid size must be at least 2, got {n}")));
    }
    let values = (1..=n)
        .map(|i| match f.eval_f64(i as f64 / n as f64) {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::PoleOnGrid { index: i }),
        })
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementResult {
    /// `psi[k]` is the source slot whose value lands in slot `k`.
    pub psi: Vec<usize>,
    pub g_hat: Vec<f64>,
    pub riemann_f: f64,
    pub riemann_g: f64,
}

impl RearrangementResult {
    pub fn rearranged_grid(&self) -> GridFunction {
        GridFunction {
            values: self.g_hat.clone(),
        }
    }
}

fn riemann_sum(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let dx = 1.0 / n as f64;
    compensated_sum(values.map(|v| v * dx))
}

pub fn decreasing_rearrangement(g: &GridFunction) -> RearrangementResult {
    let v = &g.values;
    let mut psi: Vec<usize> = (0..v.len()).collect();
    // stable: ties stay in index order
    psi.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    let g_hat: Vec<f64> = psi.iter().map(|&k| v[k]).collect();
    RearrangementResult {
        riemann_f: riemann_sum(v.iter().copied(), v.len()),
        riemann_g: riemann_sum(g_hat.iter().copied(), v.len()),
        psi,
        g_hat,
    }
}

pub fn distribution_function(g: &GridFunction, y: f64) -> f64 {
    g.values.iter().filter(|&&v| v > y).count() as f64 / g.n() as f64
}

/// One instance of the lemma: positions `i < j` of the rearrangement, witnessed by
/// grid slots `m < n` of the original.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaWitness {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub n: usize,
    /// `g_i - g_j`.
    pub drop: f64,
    /// `|f(p_m) - f(p_n)|`.
    pub spread: f64,
    /// `spread - drop`.
    pub slack: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniformityCheck {
    pub holds: bool,
    /// The pair with the least slack, if `n >= 2`.
    pub worst_witness: Option<LemmaWitness>,
}

/// Verifies the lemma for every pair `i < j` in `O(n^2)`.
///
/// For fixed `i`, let `A = {k : f(p_k) >= g_i}`. Sweeping `j` downward from `n`, the
/// set `B = {k : f(p_k) <= g_j}` only grows, so the closest `A`–`B` pair is
/// maintained incrementally from precomputed nearest-`A` distances.
pub fn check_uniformity_lemma(g: &GridFunction, r: &RearrangementResult) -> UniformityCheck {
    let v = &g.values;
    let gh = &r.g_hat;
    let n = v.len();
    let mut holds = true;
    let mut worst: Option<LemmaWitness> = None;
    let mut nearest_a = vec![0usize; n];

    for i in 0..n.saturating_sub(1) {
        let in_a = |k: usize| v[k] >= gh[i];
        // nearest member of A for every slot, ties to the left
        let mut last = None;
        for (k, slot) in nearest_a.iter_mut().enumerate() {
            if in_a(k) {
                last = Some(k);
            }
            *slot = last.unwrap_or(usize::MAX);
        }
        let mut next = None;
        for k in (0..n).rev() {
            if in_a(k) {
                next = Some(k);
            }
            if let Some(nx) = next {
                if nearest_a[k] == usize::MAX || nx - k < k - nearest_a[k] {
                    nearest_a[k] = nx;
                }
            }
        }

        let mut t = n;
        let mut best: Option<(usize, usize)> = None; // (distance, b slot)
        for j in (i + 1..n).rev() {
            while t > 0 && gh[t - 1] <= gh[j] {
                t -= 1;
                let b = r.psi[t];
                let d = b.abs_diff(nearest_a[b]);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, b));
                }
            }
            let (dist, b) = best.expect("B contains slot psi[j]");
            let a = nearest_a[b];
            let (m, nn) = match a.cmp(&b) {
                std::cmp::Ordering::Less => (a, b),
                std::cmp::Ordering::Greater => (b, a),
                // a slot in both A and B forces g_i = g_j; any neighbour pair works
                std::cmp::Ordering::Equal if a + 1 < n => (a, a + 1),
                std::cmp::Ordering::Equal => (a - 1, a),
            };
            let drop = gh[i] - gh[j];
            let spread = (v[m] - v[nn]).abs();
            let w = LemmaWitness {
                i,
                j,
                m,
                n: nn,
                drop,
                spread,
                slack: spread - drop,
            };
            if dist.max(nn - m) > j - i || w.slack < 0.0 {
                holds = false;
            }
            if worst.is_none_or(|cur| w.slack < cur.slack) {
                worst = Some(w);
            }
        }
    }
    UniformityCheck {
        holds,
        worst_witness: worst,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HullTouch {
    /// 0-based slot of the touch point.
    pub index: usize,
    pub a: f64,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Slots of the points on the convex-hull boundary of `(p_k, values[k])`, collinear
/// boundary points included (monotone chain; points are already sorted by `x`).
pub fn hull_boundary(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let pt = |k: usize| ((k + 1) as f64 / n as f64, values[k]);
    let yscale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = 16.0 * f64::EPSILON * yscale / n as f64;
    let chain = |upper: bool| {
        let mut h: Vec<usize> = Vec::new();
        for k in 0..n {
            while h.len() >= 2 {
                let c = cross(pt(h[h.len() - 2]), pt(h[h.len() - 1]), pt(k));
                let turns_wrong = if upper { c > tol } else { c < -tol };
                if !turns_wrong {
                    break;
                }
                h.pop();
            }
            h.push(k);
        }
        h
    };
    let mut on_hull = chain(false);
    on_hull.extend(chain(true));
    on_hull.sort_unstable();
    on_hull.dedup();
    on_hull
}

/// Interior point where the graph of `g_hat` touches its convex hull, closest to the
/// median slot (ties to the smaller slot). Setting `a` to its value makes
/// `|g(x) - a|` at most linear in `|x - p|` nearby.
pub fn hull_touch_point(r: &RearrangementResult) -> Result<HullTouch> {
    let g = &r.g_hat;
    let n = g.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 grid points, got {n}")));
    }
    if g.iter().all(|&v| v == g[0]) {
        return Err(Error::DegenerateInput(
            "rearrangement is constant; every level gives a divergent integral".into(),
        ));
    }
    let index = hull_boundary(g)
        .into_iter()
        .filter(|&k| k > 0 && k + 1 < n)
        .min_by_key(|&k| ((2 * k).abs_diff(n - 1), k))
        .ok_or_else(|| Error::DegenerateInput("no interior hull point".into()))?;
    Ok(HullTouch { index, a: g[index] })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "I")]
    pub integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KonyaginReport {
    /// 0-based slot of the hull touch point the level was taken from, if any.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_one_based"
    )]
    pub index: Option<usize>,
    pub a: f64,
    pub levels: Vec<Level>,
    /// Least-squares slope of `I(C)` against `ln C`.
    pub growth_slope: f64,
}

fn ser_one_based<S: Serializer>(i: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i {
        Some(i) => s.serialize_u64(*i as u64 + 1),
        None => s.serialize_none(),
    }
}

/// Grid points needed to resolve truncation at level `c`.
pub fn required_grid(c: f64) -> usize {
    (10.0 * c).ceil() as usize
}

/// Riemann sums of the truncations `min(C, 1/|f - a|)` for each level `C`.
pub fn konyagin_probe(g: &GridFunction, a: f64, levels: &[f64]) -> Result<KonyaginReport> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("level a must be finite".into()));
    }
    if levels.len() < 2 {
        return Err(Error::InvalidInput("need at least two truncation levels".into()));
    }
    if levels.iter().any(|c| !c.is_finite() || *c < 2.0) {
        return Err(Error::InvalidInput("truncation levels must be finite and >= 2".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("truncation levels must be strictly ascending".into()));
    }
    let cmax = *levels.last().unwrap();
    let n = g.n();
    if n < required_grid(cmax) {
        return Err(Error::Resolution {
            n,
            c: cmax,
            required: required_grid(cmax),
        });
    }
    let dx = 1.0 / n as f64;
    let levels: Vec<Level> = levels
        .iter()
        .map(|&c| {
            let integral = compensated_sum(g.values.iter().map(|&v| {
                let d = (v - a).abs();
                let h = if d == 0.0 { c } else { c.min(1.0 / d) };
                h * dx
            }));
            Level { c, integral }
        })
        .collect();
    let growth_slope = least_squares_slope(
        levels.iter().map(|l| l.c.ln()),
        levels.iter().map(|l| l.integral),
    );
    Ok(KonyaginReport {
        index: None,
        a,
        levels,
        growth_slope,
    })
}

fn least_squares_slope(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> f64 {
    let pts: Vec<(f64, f64)> = xs.zip(ys).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiemannCheck {
    pub sum_f: f64,
    pub sum_g: f64,
    pub abs_diff: f64,
    /// `4 n u max|v|`, with `u` the unit roundoff.
    pub bound: f64,
}

impl RiemannCheck {
    pub fn within_bound(&self) -> bool {
        self.abs_diff <= self.bound
    }
}

pub fn riemann_preservation_check(g: &GridFunction, r: &RearrangementResult) -> RiemannCheck {
    let n = g.n();
    let sum_f = riemann_sum(g.values.iter().copied(), n);
    let sum_g = riemann_sum(r.g_hat.iter().copied(), n);
    let vmax = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    RiemannCheck {
        sum_f,
        sum_g,
        abs_diff: (sum_f - sum_g).abs(),
        bound: 4.0 * n as f64 * (f64::EPSILON / 2.0) * vmax,
    }
}

/// Both right-hand Riemann sums in exact arithmetic on the stored doubles.
pub fn riemann_sums_exact(g: &GridFunction, r: &RearrangementResult) -> (Rational, Rational) {
    let n = rational::int(g.n() as i64);
    let exact = |vals: &[f64]| {
        vals.iter()
            .map(|&v| rational::from_f64(v).expect("grid values are finite"))
            .fold(Rational::from_integer(0.into()), |acc, v| acc + v)
            / &n
    };
    (exact(&g.values), exact(&r.g_hat))
}

/// CSV with columns `i, p_i, f, g_hat, psi` (1-based `i` and `psi`).
pub fn write_csv<W: Write>(g: &GridFunction, r: &RearrangementResult, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "p_i", "f", "g_hat", "psi"]).map_err(io)?;
    for k in 0..g.n() {
        w.serialize((k + 1, g.abscissa(k), g.values[k], r.g_hat[k], r.psi[k] + 1))
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    Ok(())
}
