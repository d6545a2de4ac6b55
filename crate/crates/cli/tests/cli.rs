use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn helicity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helicity"))
        .args(args)
        .env_remove("HELICITY_GRID")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn contact_on_the_sphere() {
    let out = helicity(&["contact", "--manifold", "s3", "--h", "cos(2*eta)", "--grid", "24"]);
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["method"], "ContactFormula");
    assert_eq!(v["grid"], "24x24x24");
    assert!(v["tolerances"]["primitive"].as_f64().unwrap() > 0.0);
    assert_eq!(v["bounds"]["tight_lower"], true);
}

#[test]
fn cross_check_reports_direct_value() {
    let out = helicity(&["contact", "--h", "cos(eta)^2", "--grid", "32", "--cross-check"]);
    let v = stdout_json(&out);
    assert!(v["cross_check"]["direct_value"].as_f64().unwrap().abs() < 1e-5);
}

#[test]
fn non_exact_spectrum_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "has_c1.json", r#"{"N": 1, "coeffs": [[0.1, -0.2], [1, 0], [0.1, 0.2]]}"#);
    let out = helicity(&["torus", "--coeffs", &p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotExact"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = helicity(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage"));
    let out = helicity(&["contact", "--h", "1", "--h-file", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn not_basic_exits_one() {
    let out = helicity(&["contact", "--h", "cos(xi1)", "--grid", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("NotBasic"));
}

#[test]
fn output_is_deterministic() {
    let args = ["contact", "--h", "exp(cos(2*eta))", "--grid", "16"];
    let (a, b) = (helicity(&args), helicity(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let value_line = text.lines().find(|l| l.trim_start().starts_with("\"value\"")).unwrap();
    let digits: String = value_line.split(':').nth(1).unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
    assert!(digits.len() >= 17, "{value_line}");
}

#[test]
fn config_file_and_env_with_flags_winning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"h": "1", "grid": 12}"#);
    let v = stdout_json(&helicity(&["contact", "--config", &cfg]));
    assert_eq!(v["grid"], "12x12x12");
    let v = stdout_json(&helicity(&["contact", "--config", &cfg, "--grid", "10"]));
    assert_eq!(v["grid"], "10x10x10");
    let out = Command::new(env!("CARGO_BIN_EXE_helicity"))
        .args(["bounds", "--h", "2"])
        .env("HELICITY_GRID", "8")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["grid"], "8x8x8");
}

#[test]
fn field_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "h.json", r#"{"manifold": "s3", "expr": "1"}"#);
    let v = stdout_json(&helicity(&["direct", "--h-file", &p, "--grid", "16"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let q = write(dir.path(), "k.json", r#"{"manifold": "t3", "expr": "1"}"#);
    let out = helicity(&["direct", "--h-file", &q, "--grid", "16"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ManifoldMismatch"));
}

#[test]
fn lipschitz_csv() {
    let out = helicity(&["lipschitz", "--rho", "r^-2", "--nmax", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,r_n,L_n"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 20.0);
    assert!((last[2] - 8.709870426879625).abs() < 1e-10);
}

#[test]
fn limit_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("limit.csv");
    let out = helicity(&[
        "limit", "--h", "cos(2*eta)+1", "--h", "cos(2*eta)+0.5", "--h", "cos(2*eta)", "--grid", "16",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,value,sup_gap");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].ends_with(','));
}

#[test]
fn double_suspension_json() {
    let v = stdout_json(&helicity(&[
        "double-suspension", "--f1", "0", "--f2", "0", "--grid", "32x16x4", "--sphere-grid", "8",
    ]));
    let want = 4.0 * std::f64::consts::PI.powi(4);
    assert!((v["formula_value"].as_f64().unwrap() - want).abs() < 1e-9 * want);
    assert!(v["termwise"]["h_reeb"].is_number());
}

#[test]
fn torus_formula_and_direct() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.json", r#"{"N": 2, "coeffs": [[0.5, 0], [0, 0], [0, 0], [0, 0], [0.5, 0]]}"#);
    let v = stdout_json(&helicity(&["torus", "--coeffs", &p, "--direct", "--grid", "16"]));
    let kappa = v["kappa"].as_f64().unwrap();
    assert!((kappa - 8.0 * std::f64::consts::PI.powi(3)).abs() < 1e-9 * kappa);
    let f = v["formula_value"].as_f64().unwrap();
    assert!((f + kappa * 13.0 / 6.0).abs() < 1e-9 * kappa);
    assert!((v["direct_value"].as_f64().unwrap() - f).abs() < 1e-8 * f.abs());
    assert_eq!(v["exact"], true);
}

#[test]
fn furstenberg_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "f.json", r#"{"N": 1, "coeffs": [[0.25, 0], [0.1, 0], [0.25, 0]]}"#);
    let v = stdout_json(&helicity(&["furstenberg", "--theta", "golden", "--d", "1", "--f", &p, "--split", "--orbit", "100"]));
    assert!(v["split"]["residual_sup"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["orbit"]["length"], 100);
    let out = helicity(&["split", "--f", &p, "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("k,c0_partial,c1_partial\n"));
    let v = stdout_json(&helicity(&["furstenberg", "--example", "3", "--strict"]));
    assert_eq!(v["example"]["frequencies"], serde_json::json!([2, 7, 138]));
    assert!(v["theta"]["exact"].as_str().unwrap().contains('/'));
    let out = helicity(&["split", "--f", &p, "--theta", "1/1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ResonantDivisor"));
}

#[test]
fn discrepancy_and_suspension() {
    let v = stdout_json(&helicity(&["discrepancy", "--n", "100000", "--k", "8"]));
    assert!(v["value"].as_f64().unwrap() < 0.02);
    let v = stdout_json(&helicity(&["suspension", "--f", "bump(r/0.9)*0.5", "--grid", "96x8x4"]));
    assert!((v["value"].as_f64().unwrap() - v["twice_calabi"].as_f64().unwrap()).abs() < 1e-6);
    let out = helicity(&["suspension", "--f", "bump(r/0.95)"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("NotCompactlySupported"));
}

#[test]
fn sphere_subcommands() {
    let v = stdout_json(&helicity(&["lift", "--f", "cos(phi)"]));
    assert!((v["value"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-12);
    let v = stdout_json(&helicity(&["disc-average", "--h", "cos(eta)^2"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    let v = stdout_json(&helicity(&["relative", "--h", "1", "--k", "cos(2*eta)", "--grid", "16"]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-12);
    let v = stdout_json(&helicity(&["timedep", "--h", "t*cos(2*eta)", "--grid", "12"]));
    assert!((v["value"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-6);
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "pts.json",
        r#"[{"phi": 0, "psi": 0, "sign": 1}, {"phi": 3.141592653589793, "psi": 1, "sign": -1}]"#,
    );
    let v = stdout_json(&helicity(&["fiber-linking", "--f", "cos(phi)", "--points", &p]));
    assert!((v["value"].as_f64().unwrap() + 2.0).abs() < 1e-15);
}
