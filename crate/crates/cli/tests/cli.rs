use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowcalc"))
        .args(args)
        .env_remove("SHADOWCALC_ORDER")
        .output()
        .unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn err_json(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn derivative_of_square() {
    let v = ok_json(&["diff", "x^2", "--at", "3"]);
    assert_eq!(v["derivative"], "6");
    let v = ok_json(&["diff", "x^3", "--at", "-1/2", "--witnesses", "e, -e, 3e^2"]);
    assert_eq!(v["derivative"], "3/4");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 3);
}

#[test]
fn evaluate_at_hyperreal() {
    let v = ok_json(&["eval", "x^2", "--at", "1+e"]);
    assert_eq!(v["value"], "1 + 2e + e^2");
    assert_eq!(v["shadow"], "1");
    assert_eq!(v["classification"], "APPRECIABLE");

    let v = ok_json(&["eval", "1/x", "--at", "e"]);
    assert_eq!(v["value"], "e^-1");
    assert_eq!(v["shadow"], Value::Null);
    assert_eq!(v["classification"], "INFINITE");
}

#[test]
fn truncation_order_flag_and_env() {
    let v = ok_json(&["eval", "x^3", "--at", "e", "--order", "2"]);
    assert_eq!(v["value"], "0");
    assert_eq!(v["saturated"], true);

    let out = Command::new(env!("CARGO_BIN_EXE_shadowcalc"))
        .args(["eval", "x^3", "--at", "e"])
        .env("SHADOWCALC_ORDER", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["saturated"], true);

    let e = err_json(&["eval", "x", "--at", "e", "--order", "0"], 2);
    assert_eq!(e["error"], "InvalidOrder");
}

#[test]
fn extremum_of_parabola() {
    let v = ok_json(&["extremum", "x*(1-x)"]);
    assert_eq!(v["roots"][0]["exact"], "1/2");
    assert_eq!(v["roots"].as_array().unwrap().len(), 1);
    let rules: Vec<&str> = v["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["rule"].as_str().unwrap())
        .collect();
    assert_eq!(
        rules,
        ["FORM_INCREMENT", "ADEQUATE", "CANCEL", "DIVIDE_BY_E", "SUPPRESS", "SOLVE"]
    );
    assert!(v["trace_text"].as_str().unwrap().contains("6. SOLVE"));

    let e = err_json(&["extremum", "1/x"], 1);
    assert_eq!(e["error"], "NotPolynomial");
}

#[test]
fn tangent_and_tlh_and_compare() {
    let v = ok_json(&["tangent", "x^2", "--at", "7/2"]);
    assert_eq!(v["vertex_distance"], "49/4");
    assert_eq!(v["slope"], "7");

    assert_eq!(ok_json(&["tlh", "e + e^2"])["normalized"], "e");
    assert_eq!(ok_json(&["tlh", "-3e^-1 + 5"])["normalized"], "-3e^-1");
    assert_eq!(ok_json(&["tlh", "0"])["normalized"], "0");

    let v = ok_json(&["compare", "e", "e^2"]);
    assert_eq!(v["arithmetic_equal"], true);
    assert_eq!(v["geometric_equal"], false);
    assert_eq!(ok_json(&["compare", "e", "0"])["geometric_equal"], "UNDEFINED");
}

#[test]
fn rearrange_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let v = ok_json(&["rearrange", "x", "--grid", "4", "--csv", path.to_str().unwrap()]);
    assert_eq!(v["n"], 4);
    assert_eq!(v["lemma_holds"], true);
    assert_eq!(v["riemann_f"], v["riemann_g"]);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,p_i,f,g_hat,psi");
    assert_eq!(lines[1], "1,0.25,0.25,1.0,4");
    assert_eq!(lines.len(), 5);
}

#[test]
fn konyagin_defaults_to_hull_point() {
    let v = ok_json(&["konyagin", "x", "--grid", "20000", "--levels", "100,1000"]);
    assert!(v["index"].as_u64().is_some());
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    assert!((v["growth_slope"].as_f64().unwrap() - 2.0).abs() < 0.1);

    let v = ok_json(&["konyagin", "x", "--grid", "20000", "--levels", "100,1000", "--a", "0.5"]);
    assert!(v.get("index").is_none());
    assert_eq!(v["a"], 0.5);

    let e = err_json(&["konyagin", "x", "--grid", "100", "--levels", "100,1000"], 1);
    assert_eq!(e["error"], "ResolutionError");
}

#[test]
fn domain_errors_exit_one() {
    let e = err_json(&["diff", "1/x", "--at", "0"], 1);
    assert_eq!(e["error"], "NotDifferentiable");
    assert_eq!(e["values"].as_array().unwrap().len(), 3);

    let e = err_json(&["eval", "1/(x-1)", "--at", "1"], 1);
    assert_eq!(e["error"], "EvaluationError");

    let e = err_json(&["rearrange", "1/(x-1/2)", "--grid", "4"], 1);
    assert_eq!(e["error"], "EvaluationError");
    assert_eq!(e["index"], 2);
}

#[test]
fn usage_errors_exit_two() {
    let e = err_json(&["diff", "x^", "--at", "1"], 2);
    assert_eq!(e["error"], "SyntaxError");
    assert_eq!(e["offset"], 2);
    err_json(&["eval", "x", "--at", "1 +"], 2);
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["diff", "x"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["extremum", "x^4 - 2*x^2 + x/3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
