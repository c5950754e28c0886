use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn mu_report_schema_for_q() {
    let o = run(&["mu", "--D", "1", "--p", "5", "--chi", "quad5", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for key in ["job", "character", "level", "coefficients", "mu", "norm_chain", "interpolation_checks", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["level"], serde_json::json!({"h": 3, "ell": 1, "N": 4}));
    for key in ["Z", "Y", "X", "GammaG"] {
        assert_eq!(v["norm_chain"][key], 0);
    }
    let ic = &v["interpolation_checks"][0];
    for key in ["m", "lhs", "rhs", "padic_agreement_exponent"] {
        assert!(ic.get(key).is_some());
    }
    assert_eq!(v["pass"], true);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["series", "--D", "5", "--p", "5", "--f", "sqrt5", "--workers", "1"]);
    let b = run(&["series", "--D", "5", "--p", "5", "--f", "sqrt5", "--workers", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn decompose_reports_cover() {
    let o = run(&["decompose", "--D", "5", "--f", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cover: pass"));
}

#[test]
fn rationals_print_as_fractions() {
    let o = run(&["zeta", "--D", "1", "--f", "5"]);
    let v = json(&o);
    let vals: Vec<&str> = v["values"].as_array().unwrap().iter().map(|r| r["value"].as_str().unwrap()).collect();
    assert_eq!(vals.len(), 4);
    assert!(vals.iter().all(|s| s.contains('/')));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("iwasawa-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.cfg");
    std::fs::write(&path, "# dedekind at s = -1\nD = 13\nm = 2\ndedekind = true\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&run(&["zeta", "--config", p]));
    assert_eq!(v["totals"][0]["dedekind"], "1/6");
    let v = json(&run(&["zeta", "--config", p, "--D", "5"]));
    assert_eq!(v["totals"][0]["dedekind"], "1/30");
    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(run(&["zeta", "--config", p]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["zeta"]).status.code(), Some(2));
    assert_eq!(run(&["zeta", "--D", "12"]).status.code(), Some(2));
    assert_eq!(run(&["mu", "--D", "5", "--p", "4"]).status.code(), Some(2));
    // p must divide f
    assert_eq!(run(&["mu", "--D", "5", "--p", "5", "--f", "3"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn class_number_two_is_rejected() {
    assert_eq!(run(&["zeta", "--D", "10"]).status.code(), Some(1));
}
