use std::fs;
use std::process::Command;

use poncelet_core::cli::{run_with, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_FAIL, EXIT_PASS};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("poncelet").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn orbit_incircle_circumradius_column() {
    let (code, out, _) = run(&["orbit", "--family", "incircle", "--a", "2", "--b", "1", "--n", "100"]);
    assert_eq!(code, EXIT_PASS);
    let r = column(&out, "R");
    assert_eq!(r.len(), 100);
    assert!(r.iter().all(|x| (x - 1.5).abs() < 1e-12));
    let header = out.lines().next().unwrap();
    assert_eq!(header, "t,x1,y1,x2,y2,x3,y3,L,L2,A,r,R,omega");
}

#[test]
fn orbit_homothetic_area_column() {
    let (code, out, _) = run(&["orbit", "--family", "homothetic", "--a", "2", "--b", "1", "--n", "100"]);
    assert_eq!(code, EXIT_PASS);
    let expected = 1.5 * 3f64.sqrt();
    assert!(column(&out, "A").iter().all(|x| (x - expected).abs() < 1e-12));
}

#[test]
fn orbit_poristic_equilateral_rows() {
    let (code, out, _) = run(&["orbit", "--family", "poristic", "--R", "1", "--r", "0.5", "--n", "10"]);
    assert_eq!(code, EXIT_PASS);
    let l2 = column(&out, "L2");
    assert_eq!(l2.len(), 10);
    assert!(l2.iter().all(|x| (x - 9.0).abs() < 1e-12));
}

#[test]
fn orbit_values_carry_17_digits() {
    let (_, out, _) = run(&["orbit", "--family", "confocal", "--a", "2", "--b", "1", "--n", "3"]);
    let row = out.lines().nth(1).unwrap();
    for field in row.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{field}");
    }
}

#[test]
fn orbit_is_deterministic() {
    let args = ["orbit", "--family", "circumellipse", "--a", "3", "--b", "1", "--n", "20"];
    assert_eq!(run(&args).1, run(&args).1);
}

#[test]
fn invariants_family_ii_sum_sq_sides() {
    let (code, out, _) = run(&["invariants", "--family", "circumellipse", "--a", "2", "--b", "1"]);
    assert_eq!(code, EXIT_PASS);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let l2 = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["invariant"] == "sum_sq_sides")
        .unwrap();
    assert_eq!(l2["expected"].as_f64().unwrap(), 80.0);
    assert!(l2["max_rel_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn invariants_family_iii_cotangents_note() {
    let (code, out, _) = run(&[
        "invariants", "--family", "homothetic", "--a", "2", "--b", "1", "--invariant", "sum_cotangents",
    ]);
    assert_eq!(code, EXIT_PASS);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let r = &doc["reports"][0];
    assert!((r["expected"].as_f64().unwrap() - 1.25 * 3f64.sqrt()).abs() < 1e-12);
    assert!(r["note"].as_str().unwrap().contains("L₂/(4A)"));
}

#[test]
fn invariants_tight_tolerance_fails() {
    let (code, _, _) = run(&["invariants", "--family", "incircle", "--a", "2", "--b", "1", "--tol", "1e-30"]);
    assert_eq!(code, EXIT_FAIL);
}

#[test]
fn locus_examples() {
    for (family, k, class) in [
        ("circumellipse", "6", "Ellipse"),
        ("homothetic", "13", "Circle"),
        ("confocal", "9", "StationaryPoint"),
    ] {
        let (code, out, _) = run(&["locus", "--family", family, "--a", "2", "--b", "1", "--k", k]);
        assert_eq!(code, EXIT_PASS, "{family} X{k}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["fits"][0]["class"], class);
    }
    let (_, out, _) = run(&["locus", "--family", "circumellipse", "--a", "2", "--b", "1", "--k", "6"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let g = &doc["fits"][0]["geometry"];
    assert!((g["semi_major"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!((g["semi_minor"].as_f64().unwrap() - 0.6).abs() < 1e-9);
}

#[test]
fn locus_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("x1.csv");
    let svg_path = dir.path().join("x1.svg");
    let (code, _, _) = run(&[
        "locus", "--family", "homothetic", "--a", "2", "--b", "1", "--k", "1,6", "--n", "64",
        "--out", csv_path.to_str().unwrap(), "--svg", svg_path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_PASS);
    let csv_text = fs::read_to_string(&csv_path).unwrap();
    assert!(csv_text.starts_with("k,t,x,y\n"));
    assert_eq!(csv_text.lines().count(), 1 + 2 * 64);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains(r#"version="1.1""#));
    assert!(svg.contains(r#"id="X1""#) && svg.contains(r#"id="X6""#));
    assert!(svg.contains("stroke-dasharray"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let json_out = dir.path().join("out.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"family": "incircle", "a": 2, "b": 1, "centers": [3], "samples": 80, "outputs": {{"json": "{}"}}}}"#,
            json_out.display()
        ),
    )
    .unwrap();
    let (code, out, _) = run(&["locus", "--config", cfg.to_str().unwrap(), "--k", "5"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(doc["fits"][0]["k"], 5);
    assert_eq!(doc["fits"][0]["class"], "Circle");
    assert_eq!(doc["samples"], 80);
}

#[test]
fn registry_extension() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("extra.txt");
    fs::write(&reg, "# extra\n901, incenter again, 1\n902, null, 0\n").unwrap();
    let reg = reg.to_str().unwrap();
    let (code, out, _) = run(&["locus", "--family", "confocal", "--a", "2", "--b", "1", "--k", "901", "--registry", reg]);
    assert_eq!(code, EXIT_PASS);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["fits"][0]["class"], "Ellipse");
    let (code, _, err) = run(&["locus", "--family", "confocal", "--a", "2", "--b", "1", "--k", "902", "--registry", reg]);
    assert_eq!(code, EXIT_DEGENERATE);
    assert!(err.contains("degenerate"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["orbit", "--family", "incircle", "--a", "1", "--b", "2"],
        vec!["orbit", "--family", "nonsense", "--a", "2", "--b", "1"],
        vec!["orbit", "--a", "2", "--b", "1"],
        vec!["locus", "--family", "incircle", "--a", "2", "--b", "1"],
        vec!["locus", "--family", "incircle", "--a", "2", "--b", "1", "--k", "99999"],
        vec!["orbit", "--family", "poristic", "--R", "1", "--r", "0.6"],
        vec!["certify", "--relation", "thm99"],
        vec!["orbit", "--config", "/nonexistent/run.json"],
        vec!["frobnicate"],
    ] {
        let (code, _, _) = run(&args);
        assert_eq!(code, EXIT_CONFIG, "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"famly": "incircle"}"#).unwrap();
    assert_eq!(run(&["orbit", "--config", bad.to_str().unwrap()]).0, EXIT_CONFIG);
}

#[test]
fn table1_matches() {
    let dir = tempfile::tempdir().unwrap();
    let json_out = dir.path().join("t.json");
    let (code, out, _) = run(&["table1", "--a", "2", "--b", "1", "--json", json_out.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("F.III") && out.trim_end().ends_with("PASS"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["spot_checks"].as_array().unwrap().len(), 3);
}

#[test]
fn table1_csv_format() {
    let (code, out, _) = run(&["table1", "--format", "csv", "--k", "1,2", "--column", "conf,fi"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.lines().count(), 1 + 4);
    assert!(out.starts_with("k,column,expected,observed"));
}

#[test]
fn certify_examples() {
    for (rel, a, b) in [("thm2", "2", "1"), ("thm7", "3", "1"), ("thm3", "2", "1"), ("thm5", "2", "1"), ("thm6", "2", "1"), ("obs", "2", "1")] {
        let (code, out, _) = run(&["certify", "--relation", rel, "--a", a, "--b", b]);
        assert_eq!(code, EXIT_PASS, "{rel}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert!(doc["certificates"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
}

#[test]
fn certify_conjecture_probe_reports_failure() {
    let (code, out, _) = run(&["certify", "--relation", "conjecture1"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let c = &doc["certificates"][0];
    assert!(c["parameters"]["max_confocal_residual"].as_f64().unwrap() < 1e-9);
    let pass = c["pass"].as_bool().unwrap();
    assert_eq!(code, if pass { EXIT_PASS } else { EXIT_FAIL });
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_poncelet"))
        .args(["orbit", "--family", "incircle", "--a", "2", "--b", "1", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
    let status = Command::new(env!("CARGO_BIN_EXE_poncelet"))
        .args(["orbit", "--family", "incircle", "--a", "-2", "--b", "1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}
