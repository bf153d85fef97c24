use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use shadowcalc::adequality::{adequate_extremum, tangent_line};
use shadowcalc::homogeneity::{
    compare_modes, default_derivative_witnesses, derivative_shadow, tlh_normalize,
};
use shadowcalc::rational::parse_rational;
use shadowcalc::rearrange::{
    check_uniformity_lemma, decreasing_rearrangement, hull_touch_point, konyagin_probe,
    riemann_preservation_check, sample_grid, write_csv,
};
use shadowcalc::{Error, Expr, HyperReal, DEFAULT_ORDER};

/// Exact infinitesimal calculus from the command line. All reports are JSON on stdout.
#[derive(Parser)]
#[command(name = "shadowcalc", version)]
struct Cli {
    /// Truncation order K: hyperreals keep exponents of `e` in [-K, K].
    #[arg(long, global = true, env = "SHADOWCALC_ORDER", default_value_t = DEFAULT_ORDER as i64)]
    order: i64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression in x at a hyperreal point.
    Eval {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Derivative at a rational point as the shadow of difference quotients.
    Diff {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Comma-separated infinitesimal increments, e.g. "e,2e,e^2".
        #[arg(long, allow_hyphen_values = true)]
        witnesses: Option<String>,
    },
    /// Critical points of a polynomial by adequality, with the derivation.
    Extremum { expr: String },
    /// Tangent line at a rational point.
    Tangent {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Keep only the lowest-order term of a hyperreal.
    Tlh {
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Arithmetic and geometric comparison of two hyperreals.
    Compare {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// Non-increasing rearrangement of f sampled at i/N.
    Rearrange {
        expr: String,
        #[arg(long)]
        grid: usize,
        /// Write the per-slot table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Growth of the truncated integral of 1/|g - a| as the truncation level rises.
    Konyagin {
        expr: String,
        #[arg(long)]
        grid: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        /// Level a; defaults to the hull touch point of the rearrangement.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
    },
}

fn order(k: i64) -> Result<u32, Error> {
    if (1..=i64::from(u16::MAX)).contains(&k) {
        Ok(k as u32)
    } else {
        Err(Error::InvalidOrder(k))
    }
}

fn expr(text: &str) -> Result<Expr, Error> {
    Expr::parse(text)
}

fn run(cli: Cli) -> Result<Value, Error> {
    let k = order(cli.order)?;
    let out = match cli.command {
        Command::Eval { expr: f, at } => {
            let f = expr(&f)?;
            let x = HyperReal::parse(&at, k)?;
            let y = f.eval_hyper(&x)?;
            let class = y.classify();
            json!({
                "value": y.to_string(),
                "shadow": y.shadow().ok().map(|s| s.to_string()),
                "classification": class,
                "saturated": y.is_saturated(),
            })
        }
        Command::Diff { expr: f, at, witnesses } => {
            let f = expr(&f)?;
            let x0 = parse_rational(&at)?;
            let ws = match witnesses {
                Some(list) => list
                    .split(',')
                    .map(|w| HyperReal::parse(w.trim(), k))
                    .collect::<Result<Vec<_>, _>>()?,
                None => default_derivative_witnesses(k)?,
            };
            let d = derivative_shadow(&f, &x0, &ws)?;
            json!({
                "derivative": d.to_string(),
                "witnesses": ws.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            })
        }
        Command::Extremum { expr: f } => {
            let report = adequate_extremum(&expr(&f)?)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["trace_text"] = Value::String(report.trace.to_string());
            v
        }
        Command::Tangent { expr: f, at } => {
            let t = tangent_line(&expr(&f)?, &parse_rational(&at)?)?;
            serde_json::to_value(t).expect("tangent serializes")
        }
        Command::Tlh { value } => {
            let x = HyperReal::parse(&value, k)?;
            let t = if x.is_zero() { x.clone() } else { tlh_normalize(&x)? };
            json!({ "input": x.to_string(), "normalized": t.to_string() })
        }
        Command::Compare { x, y } => {
            let m = compare_modes(&HyperReal::parse(&x, k)?, &HyperReal::parse(&y, k)?)?;
            serde_json::to_value(m).expect("comparison serializes")
        }
        Command::Rearrange { expr: f, grid, csv } => {
            let g = sample_grid(&expr(&f)?, grid)?;
            let r = decreasing_rearrangement(&g);
            if let Some(path) = &csv {
                let file = File::create(path)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                write_csv(&g, &r, &mut w)?;
                w.flush()
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            }
            let sums = riemann_preservation_check(&g, &r);
            let lemma = check_uniformity_lemma(&g, &r);
            let touch = hull_touch_point(&r)?;
            json!({
                "n": g.n(),
                "max": r.g_hat[0],
                "min": r.g_hat[g.n() - 1],
                "riemann_f": r.riemann_f,
                "riemann_g": r.riemann_g,
                "riemann_within_bound": sums.within_bound(),
                "lemma_holds": lemma.holds,
                "hull_touch": { "index": touch.index + 1, "a": touch.a },
                "csv": csv.map(|p| p.display().to_string()),
            })
        }
        Command::Konyagin { expr: f, grid, levels, a } => {
            let g = sample_grid(&expr(&f)?, grid)?;
            let report = match a {
                Some(a) => konyagin_probe(&g, a, &levels)?,
                None => {
                    let touch = hull_touch_point(&decreasing_rearrangement(&g))?;
                    let mut report = konyagin_probe(&g, touch.a, &levels)?;
                    report.index = Some(touch.index);
                    report
                }
            };
            serde_json::to_value(report).expect("report serializes")
        }
    };
    Ok(out)
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        Error::Syntax { offset, .. } => v["offset"] = json!(offset),
        Error::Evaluation { node, subexpr } => {
            v["node"] = json!(node);
            v["subexpr"] = json!(subexpr);
        }
        Error::PoleOnGrid { index } => v["index"] = json!(index),
        Error::NotDifferentiable { values, .. } => {
            v["values"] = values
                .iter()
                .map(|(w, s)| json!({ "witness": w, "shadow": s }))
                .collect();
        }
        Error::Resolution { required, .. } => v["required_grid"] = json!(required),
        _ => {}
    }
    v
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &v).expect("stdout");
            writeln!(out).expect("stdout");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
