use std::path::Path;
use std::process::Command;

use serde_json::Value;

const X3: &str = r#"{"p":2,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":3,"a_ij":[1]}]}"#;
const X3_LVL1: &str = r#"{"p":2,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":3,"a_ij":[1]},{"i":1,"j":5,"a_ij":[1]}]}"#;

fn aswl(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_aswl"))
        .args(args)
        .current_dir(dir)
        .env("ASWL_THREADS", "2")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

fn rat(v: &Value) -> (String, String) {
    (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
}

fn r(n: &str, d: &str) -> (String, String) {
    (n.to_string(), d.to_string())
}

#[test]
fn info_reports_invariants_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    let (code, v) = aswl(dir.path(), &["info", "--spec", "x3.json"]);
    assert_eq!(code, 0);
    assert_eq!(rat(&v["invariants"]["delta"]), r("3", "1"));
    assert_eq!(v["invariants"]["m"], 0);
    assert_eq!(rat(&v["invariants"]["w"]), r("1", "6"));
    assert_eq!(v["stability"]["m_prime"], 2);
    assert_eq!(v["degree_l"]["1"], 2);
    assert_eq!(v["degree_l"]["2"], 5);
    assert_eq!(v["degree_l"]["3"], 11);
    assert_eq!(v["spec_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn lfun_reports_slopes_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    let (code, v) = aswl(dir.path(), &["lfun", "--spec", "x3.json", "--m-chi", "1"]);
    assert_eq!(code, 0);
    let slopes: Vec<_> = v["l"]["polygon_q"]["slopes"].as_array().unwrap().iter().map(rat).collect();
    assert_eq!(slopes, vec![r("1", "2"), r("1", "2")]);
    assert_eq!(v["l"]["coefficients"], serde_json::json!([["1"], ["0"], ["2"]]));
    assert_eq!(v["parameters"]["path"], "euler");
    assert_eq!(v["pass"], true);
}

#[test]
fn dwork_report_embeds_parameters() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    let (code, v) = aswl(dir.path(), &["dwork", "--spec", "x3.json", "--m-chi", "1"]);
    assert_eq!(code, 0);
    let p = &v["parameters"];
    assert!(p["dimensions_tried"].as_array().unwrap().len() >= 2);
    assert_eq!(p["stabilization"]["stable"], true);
    assert_eq!(p["stabilization"]["certified"], true);
    assert!(p["precision_digits"].as_u64().unwrap() >= 1);
    assert_eq!(v["cross_path"]["agree"], true);
    assert!(v["trace_formula"].as_array().unwrap().iter().all(|t| t["holds"] == true));
}

#[test]
fn verify_and_compare_pass_on_the_example_towers() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    write(dir.path(), "x3b.json", X3_LVL1);
    let (code, v) = aswl(dir.path(), &["verify", "--spec", "x3.json", "--m-chi-max", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["conductors"].as_array().unwrap().len(), 3);
    let (code, v) = aswl(dir.path(), &["compare", "--spec", "x3.json", "--other", "x3b.json", "--m-chi", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["identical"], true);
}

#[test]
fn compare_rejects_a_relevant_difference() {
    let dir = tempfile::tempdir().unwrap();
    // same support over F_4, different leading coefficient
    write(dir.path(), "a.json", r#"{"p":2,"a":2,"field_modulus":[1,1,1],"coeffs":[{"i":0,"j":3,"a_ij":[1,0]}]}"#);
    write(dir.path(), "b.json", r#"{"p":2,"a":2,"field_modulus":[1,1,1],"coeffs":[{"i":0,"j":3,"a_ij":[0,1]}]}"#);
    let (code, v) = aswl(dir.path(), &["compare", "--spec", "a.json", "--other", "b.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "RelevantSetMismatch");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"p":2,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":4,"a_ij":[1]}]}"#);
    write(dir.path(), "nocoeffs.json", r#"{"p":2,"a":1,"field_modulus":[1,1]}"#);
    let (code, v) = aswl(dir.path(), &["info", "--spec", "bad.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ForbiddenExponent");
    assert_eq!(v["error"]["location"], serde_json::json!({"i": 0, "j": 4}));
    let (code, v) = aswl(dir.path(), &["info", "--spec", "nocoeffs.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ParseError");
    let (code, _) = aswl(dir.path(), &["info", "--spec", "missing.json"]);
    assert_eq!(code, 2);
}

#[test]
fn precision_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    // one digit cannot resolve the coefficients at conductor 2^3
    let (code, v) = aswl(
        dir.path(),
        &["dwork", "--spec", "x3.json", "--m-chi", "3", "--prec", "1", "--max-dim", "32"],
    );
    assert_eq!(code, 3, "{v}");
    let kind = v["error"]["kind"].as_str().unwrap();
    assert!(kind == "SaturatedPrecision" || kind == "PrecisionHole", "{kind}");
}

#[test]
fn plots_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "x3.json", X3);
    let (c1, _) = aswl(dir.path(), &["plot", "--spec", "x3.json", "--m-chi", "2", "--out", "a"]);
    let (c2, _) = aswl(dir.path(), &["plot", "--spec", "x3.json", "--m-chi", "2", "--out", "b"]);
    assert_eq!((c1, c2), (0, 0));
    for f in ["polygon_m2.svg", "polygon_m2.txt", "plot.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let svg = std::fs::read_to_string(dir.path().join("a/polygon_m2.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}
