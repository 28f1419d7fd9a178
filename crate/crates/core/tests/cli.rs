use std::fs;
use std::path::Path;

use beltrami::cli::main_with_args;
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> i32 {
    let mut v = vec!["beltrami".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    v.push("--out".into());
    v.push(dir.display().to_string());
    main_with_args(v)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("run.json")).unwrap()).unwrap()
}

fn record<'a>(r: &'a Value, probe: &str) -> &'a Value {
    r["records"].as_array().unwrap().iter().find(|x| x["probe"] == probe).unwrap_or_else(|| panic!("no {probe}"))
}

#[test]
fn corpus_list_and_alpha_table() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["corpus-list"]), 0);
    assert!(fs::read_to_string(d.path().join("corpus.txt")).unwrap().contains("power"));
    assert_eq!(run(d.path(), &["probe-alpha-table"]), 0);
    let csv = fs::read_to_string(d.path().join("alpha_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn probe_suite_power_closed_form() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["probe-suite", "--corpus", "power:K=2"]), 0);
    let r = report(d.path());
    assert!(record(&r, "mu-nu-saturation")["value"].as_f64().unwrap() < 1e-8);
    let c = record(&r, "campanato-exponent");
    assert!(c["pass"].as_bool().unwrap());
    assert!(d.path().join("morrey.csv").exists());
}

#[test]
fn probe_suite_poincare_equality() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["probe-suite", "--corpus", "poincare-equality"]), 0);
    let r = report(d.path());
    assert!(record(&r, "poincare-equality")["value"].as_f64().unwrap() < 1e-6);
    assert!(r["records"].as_array().unwrap().iter().all(|x| x["probe"] != "directional"));
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("skipped")));
}

#[test]
fn solve_beltrami_zero_field() {
    let d = tempfile::tempdir().unwrap();
    let code = run(d.path(), &["solve-beltrami", "--field", "zero", "--manufactured", "z + 0.1*z^2", "--grid-n", "64"]);
    assert_eq!(code, 0);
    let r = report(d.path());
    assert!(r["solves"][0]["residual_l2"].as_f64().unwrap() < 1e-10);
    assert!(d.path().join("solution.cgrid").exists());
}

#[test]
fn solve_leray_lions_laplace() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["solve-leray-lions", "--field", "identity", "--grid-n", "64"]), 0);
    assert!(d.path().join("u.cgrid").exists());
}

#[test]
fn convert_field_diag() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["convert-field", "--field", "diag:K=2"]), 0);
    let r = report(d.path());
    let lip = record(&r, "hstar-lipschitz")["value"].as_f64().unwrap();
    assert!((lip - 1.0 / 3.0).abs() < 1e-6, "{lip}");
}

#[test]
fn config_file_and_errors() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg.json");
    fs::write(&cfg, "{\n  \"grid\": {\"n\": 64},\n  \"nope\": true\n}").unwrap();
    assert_eq!(run(d.path(), &["corpus-list", "--config", cfg.to_str().unwrap()]), 2);
    fs::write(&cfg, r#"{"corpus": "power:K=3", "probes": {"points": 16}}"#).unwrap();
    assert_eq!(run(d.path(), &["probe-morrey", "--config", cfg.to_str().unwrap()]), 0);
    assert_eq!(report(d.path())["config"]["corpus"], "power:K=3");
    assert_eq!(run(d.path(), &["probe-suite", "--corpus", "no-such-entry"]), 2);
    assert_eq!(run(d.path(), &["no-such-command"]), 2);
}

#[test]
fn failing_assertion_sets_exit_code() {
    let d = tempfile::tempdir().unwrap();
    let code = run(d.path(), &["solve-rh", "--field", "linear:k=0.3", "--corpus", "power:K=2", "--tol", "1e-12"]);
    assert!(code == 0 || code == 1);
    let r = report(d.path());
    let fails = r["records"].as_array().unwrap().iter().filter(|x| x["assertion"] == true && x["pass"] == false).count();
    assert_eq!(code == 1, fails > 0);
}

#[test]
fn reports_are_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let args = ["probe-suite", "--corpus", "linear-phase-exp:k=1/3,phi0=0.5", "--source", "grid", "--seed", "3"];
    assert_eq!(run(d.path(), &args), 0);
    let a = fs::read(d.path().join("run.json")).unwrap();
    assert_eq!(run(d.path(), &args), 0);
    assert_eq!(a, fs::read(d.path().join("run.json")).unwrap());
}
