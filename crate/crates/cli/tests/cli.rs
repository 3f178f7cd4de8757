use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_resurgence"));
    c.env_remove("RESURGENCE_PREC");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value) -> (f64, f64) {
    let f = |k: &str| v[k].as_str().unwrap().parse::<f64>().unwrap();
    (f("re"), f("im"))
}

#[test]
fn boundary_median_matches_radial_limit_for_the_first_character() {
    let out = run(&["verify", "--suite", "main2", "--family", "chi", "--s", "2", "--t", "3", "--n", "1", "--m", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let check = &r["checks"][0];
    assert_eq!(check["pass"], true);
    for side in ["lhs", "rhs"] {
        let (re, im) = num(&check[side]);
        assert!((re + 1.93185).abs() < 1e-5 && (im + 0.51764).abs() < 1e-5, "{side}: {re} {im}");
    }
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn strange_identity_at_minus_one() {
    let out = run(&["verify", "--suite", "strange", "--family", "hikami", "--u", "1", "--l", "0", "--alpha", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let check = &json(&out)["checks"][0];
    let (re, im) = num(&check["lhs"]);
    assert!((re - 3.0).abs() < 1e-30 && im.abs() < 1e-30);
    let (re, _) = num(&check["rhs"]);
    assert!((re - 3.0).abs() < 1e-20);
}

#[test]
fn non_coprime_pair_is_a_usage_error() {
    let out = run(&["verify", "--suite", "gentor", "--family", "chi", "--s", "2", "--t", "4", "--n", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coprime"));
}

#[test]
fn missing_family_parameter_is_a_usage_error() {
    let out = run(&["verify", "--suite", "cm", "--family", "chi", "--s", "2", "--t", "3", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--m"));
}

#[test]
fn inapplicable_suite_is_a_usage_error() {
    let out = run(&["verify", "--suite", "strange", "--family", "t3-2k", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // the decomposition residual at 128 bits is a few ulps, above 1e-50
    let out = run(&["verify", "--suite", "gentor", "--family", "chi", "--s", "3", "--t", "4", "--n", "1", "--m", "1", "--tol", "1e-50"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["checks"][0]["pass"], false);
}

#[test]
fn trefoil_coefficients_export() {
    let out = run(&["export", "--what", "coefficients", "--count", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let exact: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(exact, ["1", "23", "1681", "257543"]);
    assert!(text.starts_with("n,C_n,a_n,C_n_float\n"));
}

#[test]
fn trefoil_singularities_export() {
    let out = run(&["export", "--what", "singularities", "--count", "3"]);
    let t = json(&out);
    let rows = t["rows"].as_array().unwrap();
    let sym: Vec<&str> = rows.iter().map(|r| r[3].as_str().unwrap()).collect();
    assert_eq!(sym, ["pi^2/6", "25*pi^2/6", "49*pi^2/6"]);
    let pi2 = std::f64::consts::PI.powi(2);
    for (r, k) in rows.iter().zip([1.0, 25.0, 49.0]) {
        let v: f64 = r[4].as_str().unwrap().parse().unwrap();
        assert!((v - k * pi2 / 6.0).abs() < 1e-12);
    }
}

#[test]
fn zero_count_is_a_usage_error() {
    let out = run(&["export", "--what", "coefficients", "--count", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["verify", "--suite", "disc", "--x", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(!String::from_utf8(a).unwrap().contains("wall_time"));
}

#[test]
fn timings_are_opt_in() {
    let out = run(&["verify", "--suite", "cm", "--timings"]);
    assert!(json(&out)["checks"][0]["wall_time"].is_number());
}

#[test]
fn precision_from_environment_and_config() {
    let out = bin().args(["verify", "--suite", "cm"]).env("RESURGENCE_PREC", "96").output().unwrap();
    assert_eq!(json(&out)["precision"], 96);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"family": "chi", "s": 3, "t": 4, "n": 1, "m": 2, "precision": 80, "tolerance": 1e-12}"#).unwrap();
    let out = bin()
        .args(["verify", "--suite", "gentor", "--config", cfg.to_str().unwrap()])
        .env("RESURGENCE_PREC", "96")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["precision"], 80);
    assert_eq!(r["tolerance"], 1e-12);
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
    // an explicit flag wins over the file
    let out = run(&["verify", "--suite", "cm", "--config", cfg.to_str().unwrap(), "--prec", "72"]);
    assert_eq!(json(&out)["precision"], 72);
}

#[test]
fn csv_report_has_stable_header() {
    let out = run(&["verify", "--suite", "cm", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,inputs,lhs_re,lhs_im,rhs_re,rhs_im,abs_error,tolerance,pass\n"));
}

#[test]
fn eval_lateral_sums_are_conjugate() {
    let get = |side: &str| {
        let out = run(&["eval", "--what", "lateral", "--at", "2", "--side", side, "--prec", "96"]);
        assert_eq!(out.status.code(), Some(0));
        num(&json(&out)["value"])
    };
    let (p, m) = (get("plus"), get("minus"));
    assert!((p.0 - m.0).abs() < 1e-15 && (p.1 + m.1).abs() < 1e-15);
    assert!(p.1.abs() > 1e-6);
}

#[test]
fn eval_on_the_cut_needs_a_side() {
    let out = run(&["eval", "--what", "borel", "--at", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "--what", "borel", "--at", "5", "--side", "plus"]);
    assert_eq!(out.status.code(), Some(0));
}
