use confquant::cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("confquant").chain(args.iter().copied()), &mut out, &mut err);
    let json = serde_json::from_slice(&out).unwrap_or(Value::Null);
    (code, json, String::from_utf8_lossy(&err).into_owned())
}

#[test]
fn coeffs_half_density_plane() {
    let (code, json, _) = run(&["coeffs", "--n", "2", "--lambda", "1/2", "--mu", "1/2"]);
    assert_eq!(code, 0);
    let c = &json["coefficients"];
    assert_eq!(c["gamma2"], "1/2");
    assert_eq!(c["gamma4"], "1/48");
    assert_eq!(c["gamma5"], "1/12");
}

#[test]
fn coeffs_alpha_vanishes_at_lambda_zero() {
    let (code, json, _) = run(&["coeffs", "--n", "3", "--lambda", "0", "--mu", "3/4"]);
    assert_eq!(code, 0);
    assert_eq!(json["coefficients"]["alpha"], "0");
}

#[test]
fn inadmissible_resonance_exits_3() {
    let (code, _, err) = run(&["coeffs", "--n", "2", "--lambda", "1/4", "--mu", "5/4"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn yamabe_scalar_coefficient() {
    let (code, json, _) = run(&["quantize", "--example", "yamabe", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(json["scalar_coefficient"], "-1/6");
}

#[test]
fn unknown_suite_exits_2() {
    let (code, _, _) = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn malformed_rational_exits_2() {
    let (code, _, _) = run(&["coeffs", "--n", "2", "--lambda", "1/x", "--mu", "1/2"]);
    assert_eq!(code, 2);
}

#[test]
fn ideal_suite_reports_witness() {
    let (code, json, err) = run(&["verify", "--suite", "ideal", "--n", "3"]);
    assert_eq!(code, 0, "{err}");
    let notes = json.to_string();
    assert!(notes.contains("x3^2") || err.contains("x3^2"));
}

#[test]
fn resonances_listing() {
    let (code, json, _) = run(&["resonances", "--n", "1"]);
    assert_eq!(code, 0);
    let deltas: Vec<_> = json["resonant_deltas"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_owned()).collect();
    assert_eq!(deltas, ["1", "3/2", "2"]);
}
