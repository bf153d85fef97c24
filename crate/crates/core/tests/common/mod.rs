//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_bigint::BigInt;
use rand::Rng;
use shadowcalc::poly::Poly;
use shadowcalc::rational::{self, Rational};
use shadowcalc::rearrange::{GridFunction, RearrangementResult};
use shadowcalc::{Expr, HyperReal};

pub fn rand_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let n = rng.gen_range(-max_num..=max_num);
    let d = rng.gen_range(1..=max_den);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Random polynomial of degree exactly `deg` (nonzero leading coefficient).
pub fn rand_poly<R: Rng>(rng: &mut R, deg: usize, max_num: i64, max_den: i64) -> Poly {
    let mut coeffs: Vec<Rational> = (0..=deg).map(|_| rand_rational(rng, max_num, max_den)).collect();
    while deg > 0 && coeffs[deg] == rational::int(0) {
        coeffs[deg] = rand_rational(rng, max_num, max_den);
    }
    Poly::new(coeffs)
}

/// Random finite hyperreal with exponents in `0..=order`.
pub fn rand_finite_hyper<R: Rng>(rng: &mut R, order: u32) -> HyperReal {
    let count = rng.gen_range(0..=4);
    let terms: Vec<(i32, Rational)> = (0..count)
        .map(|_| (rng.gen_range(0..=order as i32), rand_rational(rng, 20, 9)))
        .collect();
    HyperReal::from_terms(order, terms).unwrap()
}

/// Random expression tree over `x` and small rationals, with divisions.
pub fn rand_rational_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            Expr::Var
        } else {
            Expr::Const(rand_rational(rng, 5, 3))
        };
    }
    let a = Box::new(rand_rational_expr(rng, depth - 1));
    let b = Box::new(rand_rational_expr(rng, depth - 1));
    match rng.gen_range(0..6) {
        0 => Expr::Add(a, b),
        1 => Expr::Sub(a, b),
        2 => Expr::Mul(a, b),
        3 => Expr::Div(a, b),
        4 => Expr::Pow(a, rng.gen_range(0..=3)),
        _ => Expr::Neg(a),
    }
}

/// Real eigenvalues of the companion matrix, i.e. approximate real roots of `p`.
pub fn companion_real_roots(p: &Poly) -> Vec<f64> {
    let Some(deg) = p.degree() else { return vec![] };
    if deg == 0 {
        return vec![];
    }
    let lead = rational::to_f64(p.leading().unwrap());
    let c: Vec<f64> = p.coeffs().iter().map(|c| rational::to_f64(c) / lead).collect();
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i];
    }
    let mut roots: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * z.re.abs().max(1.0))
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Continuous piecewise-linear function through random knots, sampled on `i/n`.
/// With `plateaus`, knot values are quantized so that flat pieces and ties occur.
pub fn rand_piecewise_linear<R: Rng>(rng: &mut R, n: usize, plateaus: bool) -> GridFunction {
    let knots = rng.gen_range(2..=8);
    let mut xs: Vec<f64> = (0..knots).map(|_| rng.gen_range(0.0..1.0)).collect();
    xs.push(0.0);
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    let ys: Vec<f64> = xs
        .iter()
        .map(|_| {
            let y: f64 = rng.gen_range(-1.0..1.0);
            if plateaus {
                (y * 4.0).round() / 4.0
            } else {
                y
            }
        })
        .collect();
    let values = (1..=n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let k = xs.windows(2).position(|w| x <= w[1]).unwrap_or(xs.len() - 2);
            let (x0, x1, y0, y1) = (xs[k], xs[k + 1], ys[k], ys[k + 1]);
            if x1 == x0 {
                y1
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        })
        .collect();
    GridFunction::new(values).unwrap()
}

/// Brute-force form of the lemma: every pair `i < j` of the rearrangement has
/// slots `m < n` with `n - m <= j - i` and `|v_m - v_n| >= g_i - g_j`.
pub fn naive_lemma_holds(g: &GridFunction, r: &RearrangementResult) -> bool {
    let v = g.values();
    let gh = &r.g_hat;
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let drop = gh[i] - gh[j];
            let mut found = false;
            'search: for m in 0..n {
                for nn in m + 1..n {
                    if nn - m > j - i {
                        break;
                    }
                    if (v[m] - v[nn]).abs() >= drop {
                        found = true;
                        break 'search;
                    }
                }
            }
            if !found {
                return false;
            }
        }
    }
    true
}

/// `max |v_m - v_n|` over `|m - n| <= d`, for every `d` in `1..n`.
pub fn oscillation_profile(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0f64; n];
    for m in 0..n {
        for k in m + 1..n {
            let d = k - m;
            out[d] = out[d].max((v[m] - v[k]).abs());
        }
    }
    for d in 1..n {
        out[d] = out[d].max(out[d - 1]);
    }
    out
}
