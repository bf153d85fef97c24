//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shadowcalc::adequality::{adequate_extremum, tangent_line};
use shadowcalc::homogeneity::{
    compare_modes, default_derivative_witnesses, derivative_shadow, product_rule_trace,
};
use shadowcalc::poly::{Poly, RootValue};
use shadowcalc::rational::{int, ratio, Rational};
use shadowcalc::rearrange::{
    check_uniformity_lemma, decreasing_rearrangement, distribution_function, hull_touch_point,
    konyagin_probe, riemann_sums_exact, sample_grid, GridFunction,
};
use shadowcalc::{Expr, HyperReal};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn h(s: &str) -> HyperReal {
    s.parse().unwrap()
}

fn parabola_tangent() -> Outcome {
    let f = Expr::parse("x^2").unwrap();
    for x0 in [int(1), int(2), int(3), ratio(7, 2)] {
        let t = tangent_line(&f, &x0).map_err(|e| e.to_string())?;
        let y0 = &x0 * &x0;
        ensure(t.y0 == y0 && t.vertex_distance == y0, || {
            format!("x0 = {x0}: r = {}, y0 = {}", t.vertex_distance, t.y0)
        })?;
    }
    Ok("r = y0 exactly at x0 in {1, 2, 3, 7/2}".into())
}

fn euler_ratio() -> Outcome {
    for text in ["e + e^2", "e - e^2"] {
        let q = h(text).checked_div(&h("e")).unwrap();
        ensure(q.shadow().unwrap() == int(1), || format!("st(({text})/e) = {}", q.shadow().unwrap()))?;
    }
    let cases = [
        ("2 + 7e", "2", true, Some(true)),
        ("e", "e^2", true, Some(false)),
        ("e", "0", true, None),
    ];
    for (x, y, arith, geo) in cases {
        let m = compare_modes(&h(x), &h(y)).unwrap();
        ensure(m.arithmetic_equal == arith && m.geometric_equal == geo, || {
            format!("compare_modes({x}, {y}) = {m:?}")
        })?;
    }
    Ok("st((e ± e^2)/e) = 1; modes (T,T), (T,F), (T,UNDEFINED)".into())
}

fn product_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..50 {
        let deg = rng.gen_range(0..=4);
        let u = Expr::from_poly(&rand_poly(&mut rng, deg, 9, 5));
        let deg = rng.gen_range(0..=4);
        let v = Expr::from_poly(&rand_poly(&mut rng, deg, 9, 5));
        let x0 = rand_rational(&mut rng, 12, 7);
        let t = product_rule_trace(&u, &v, &x0).map_err(|e| e.to_string())?;
        let uv = Expr::Mul(Box::new(u.clone()), Box::new(v.clone()));
        let oracle = uv.symbolic_diff().eval_real(&x0).unwrap();
        ensure(t.shadow_slope == oracle, || {
            format!("case {case}: slope {} vs oracle {oracle} for u = {u}, v = {v}", t.shadow_slope)
        })?;
        let dudv = t.du.checked_mul(&t.dv).unwrap();
        ensure(t.discarded == dudv, || format!("case {case}: discarded part != du dv"))?;
    }
    Ok("50 random pairs: slope = oracle, discarded = du dv".into())
}

/// Roots with multiplicity, checked against the symbolic derivative.
fn check_roots(f: &Expr, expected_exact: Option<&[(Rational, u32)]>) -> Result<(), String> {
    let report = adequate_extremum(f).map_err(|e| e.to_string())?;
    let d = f.symbolic_diff();
    let dpoly = d.to_poly().unwrap();
    let total: u32 = report.roots.iter().map(|r| r.multiplicity).sum();

    if let Some(expected) = expected_exact {
        let got: Vec<(Rational, u32)> = report
            .roots
            .iter()
            .map(|r| match &r.value {
                RootValue::Exact(x) => Ok((x.clone(), r.multiplicity)),
                other => Err(format!("expected exact root, got {other:?}")),
            })
            .collect::<Result<_, _>>()?;
        return ensure(got == expected, || format!("{f}: roots {got:?} vs {expected:?}"));
    }

    let oracle = companion_real_roots(&dpoly);
    ensure(total as usize == oracle.len(), || {
        format!("{f}: {total} roots vs oracle {oracle:?}")
    })?;
    let mut flat = Vec::new();
    for r in &report.roots {
        for _ in 0..r.multiplicity {
            flat.push(r.approx());
        }
        match &r.value {
            RootValue::Exact(x) => {
                let v = d.eval_real(x).unwrap();
                ensure(v.is_zero(), || format!("{f}: f'({x}) = {v}"))?;
            }
            RootValue::Interval { lo, hi } => {
                let scale = r.approx().abs().max(1.0);
                ensure(r.width() <= 1e-12 * scale * 1.0000001, || {
                    format!("{f}: interval width {}", r.width())
                })?;
                if r.multiplicity % 2 == 1 {
                    let (a, b) = (d.eval_real(lo).unwrap(), d.eval_real(hi).unwrap());
                    ensure((a < Rational::zero()) != (b < Rational::zero()) && !a.is_zero(), || {
                        format!("{f}: no sign change of f' on [{lo}, {hi}]")
                    })?;
                }
            }
        }
    }
    for (got, want) in flat.iter().zip(&oracle) {
        ensure((got - want).abs() <= 1e-6 * want.abs().max(1.0), || {
            format!("{f}: root {got} vs eigenvalue {want}")
        })?;
    }
    Ok(())
}

fn adequality_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut exact_cases = 0;
    for case in 0..100 {
        if case % 2 == 0 {
            // generic polynomial; derivative roots are mostly irrational
            let deg = rng.gen_range(2..=6);
            let f = Expr::from_poly(&rand_poly(&mut rng, deg, 9, 4));
            check_roots(&f, None).map_err(|e| format!("case {case}: {e}"))?;
        } else {
            // antiderivative of c * prod (x - r_k): derivative roots known exactly
            let k = rng.gen_range(1..=5);
            let mut roots: Vec<Rational> = (0..k).map(|_| rand_rational(&mut rng, 6, 3)).collect();
            if rng.gen_bool(0.3) {
                roots.push(roots[0].clone());
            }
            let mut deriv = Poly::constant(rand_rational(&mut rng, 5, 2) + ratio(1, 7));
            for r in &roots {
                deriv = deriv.mul(&Poly::new(vec![-r.clone(), int(1)]));
            }
            let f = Poly::new(
                std::iter::once(rand_rational(&mut rng, 5, 2))
                    .chain(
                        deriv
                            .coeffs()
                            .iter()
                            .enumerate()
                            .map(|(j, c)| c / int(j as i64 + 1)),
                    )
                    .collect(),
            );
            roots.sort();
            let mut expected: Vec<(Rational, u32)> = Vec::new();
            for r in roots {
                match expected.last_mut() {
                    Some((x, m)) if *x == r => *m += 1,
                    _ => expected.push((r, 1)),
                }
            }
            check_roots(&Expr::from_poly(&f), Some(&expected))
                .map_err(|e| format!("case {case}: {e}"))?;
            exact_cases += 1;
        }
    }
    Ok(format!("100 random polynomials ({exact_cases} with rational critical points)"))
}

fn rearrangement_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut grids = 0;
    for n in [16usize, 64, 256] {
        for case in 0..200 {
            let g = rand_piecewise_linear(&mut rng, n, case % 3 == 0);
            let r = decreasing_rearrangement(&g);
            let tag = || format!("n = {n}, case {case}");

            ensure(r.g_hat.windows(2).all(|w| w[0] >= w[1]), || format!("{}: not non-increasing", tag()))?;
            let mut a = g.values().to_vec();
            let mut b = r.g_hat.clone();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            ensure(a == b, || format!("{}: multisets differ", tag()))?;

            let gh = GridFunction::new(r.g_hat.clone()).unwrap();
            let mut levels = vec![a[0] - 1.0, a[n - 1] + 1.0];
            for w in a.windows(2) {
                levels.push(w[0]);
                levels.push(w[0] + (w[1] - w[0]) / 2.0);
            }
            levels.push(a[n - 1]);
            for y in levels {
                ensure(distribution_function(&g, y) == distribution_function(&gh, y), || {
                    format!("{}: distribution differs at y = {y}", tag())
                })?;
            }

            let (sf, sg) = riemann_sums_exact(&g, &r);
            ensure(sf == sg, || format!("{}: exact Riemann sums differ", tag()))?;

            let check = check_uniformity_lemma(&g, &r);
            ensure(check.holds, || format!("{}: lemma fails: {:?}", tag(), check.worst_witness))?;
            if n == 16 {
                ensure(naive_lemma_holds(&g, &r), || format!("{}: naive oracle disagrees", tag()))?;
            }
            grids += 1;
        }
    }
    Ok(format!("{grids} grids: monotone, equinumerable, equimeasurable, exact sums, lemma"))
}

fn konyagin() -> Outcome {
    let f = Expr::parse("x").unwrap();
    let g = sample_grid(&f, 1_000_000).unwrap();
    let levels = [1e2, 1e3, 1e4];
    let rep = konyagin_probe(&g, 0.5, &levels).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for l in &rep.levels {
        let oracle = 2.0 + 2.0 * (l.c / 2.0).ln();
        let rel = (l.integral - oracle).abs() / oracle;
        worst = worst.max(rel);
        ensure(rel <= 0.02, || format!("C = {}: I = {} vs {oracle}", l.c, l.integral))?;
    }
    ensure((rep.growth_slope - 2.0).abs() <= 0.1, || format!("slope {}", rep.growth_slope))?;

    let f = Expr::parse("x*(1-x)").unwrap();
    let g = sample_grid(&f, 1_000_000).unwrap();
    let touch = hull_touch_point(&decreasing_rearrangement(&g)).map_err(|e| e.to_string())?;
    let rep2 = konyagin_probe(&g, touch.a, &levels).map_err(|e| e.to_string())?;
    ensure(rep2.growth_slope >= 0.5, || format!("x(1-x) slope {}", rep2.growth_slope))?;
    Ok(format!(
        "f = x: max rel err {:.3e}, slope {:.4}; f = x(1-x): a = {:.6}, slope {:.3}",
        worst, rep.growth_slope, touch.a, rep2.growth_slope
    ))
}

fn shadow_homomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let x = rand_finite_hyper(&mut rng, 8);
        let y = rand_finite_hyper(&mut rng, 8);
        let (sx, sy) = (x.shadow().unwrap(), y.shadow().unwrap());
        let sum = x.checked_add(&y).unwrap().shadow().unwrap();
        let prod = x.checked_mul(&y).unwrap().shadow().unwrap();
        ensure(sum == &sx + &sy && prod == &sx * &sy, || format!("case {case}: x = {x}, y = {y}"))?;
        let real = HyperReal::from_real(sx, 8).unwrap();
        ensure(x.infinitely_close(&real).unwrap(), || format!("case {case}: {x} not ≈ its shadow"))?;
    }
    Ok("1000 random pairs".into())
}

fn witness_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let witnesses = default_derivative_witnesses(8).unwrap();
    let mut done = 0;
    let mut attempts = 0;
    while done < 100 {
        attempts += 1;
        let f = rand_rational_expr(&mut rng, 4);
        let x0 = rand_rational(&mut rng, 9, 4);
        if f.eval_real(&x0).is_err() || f.symbolic_diff().eval_real(&x0).is_err() {
            continue;
        }
        let d = derivative_shadow(&f, &x0, &witnesses).map_err(|e| format!("{f} at {x0}: {e}"))?;
        let oracle = f.symbolic_diff().eval_real(&x0).unwrap();
        ensure(d == oracle, || format!("{f} at {x0}: {d} vs symbolic {oracle}"))?;
        done += 1;
    }
    Ok(format!("100 rational functions ({attempts} draws), all witnesses agree with the symbolic derivative"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "parabola tangent: r = y0", parabola_tangent, Duration::from_secs(1)),
        ("AC2", "Euler ratio and comparison modes", euler_ratio, Duration::from_secs(1)),
        ("AC3", "product rule, discarded part = du dv", product_rule, Duration::from_secs(5)),
        ("AC4", "adequality roots = derivative roots", adequality_oracle, Duration::from_secs(30)),
        ("AC5", "rearrangement invariants", rearrangement_invariants, Duration::from_secs(60)),
        ("AC6", "divergent integral at desk scale", konyagin, Duration::from_secs(120)),
        ("AC7", "shadow homomorphism, standard part", shadow_homomorphism, Duration::from_secs(5)),
        ("AC8", "witness independence", witness_independence, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed <= limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; too slow: {elapsed:?} > {limit:?}")),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
