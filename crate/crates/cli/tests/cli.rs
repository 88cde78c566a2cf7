//! End-to-end runs of the `qdtau` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn qdtau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdtau")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const CONFIG: &str = r#"{"zeros": [[0.45, 0.12]],
 "poles": [[0, 0], [-0.5885011172553458, 0.8084964038195901], [-0.9364566872907963, -0.35078322768961984],
           [0.6216099682706644, 0.7833269096274834], [0.6967067093471654, -0.7173560908995228]],
 "scale": [1.0, 0.5], "tolerance": 1e-10}"#;

#[test]
fn kappa_of_the_five_pole_sphere() {
    let out = qdtau(&["kappa", "--genus", "0", "--signature", "1,-1,-1,-1,-1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["results"]["kappa_plus"], "-40/3");
    assert_eq!(r["results"]["kappa_minus"], "56/3");
}

#[test]
fn picard_verify_has_zero_residuals() {
    let out = qdtau(&["picard", "verify", "--genus", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for id in r["results"]["identities"].as_array().unwrap() {
        assert!(id["residual"].as_object().unwrap().values().all(|v| v == "0"), "{id}");
    }
}

#[test]
fn picard_solve_reports_rationals_as_strings() {
    let out = qdtau(&["picard", "solve", "--genus", "1", "--n", "3", "--out", "/dev/stdout"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["lambda_expansion"]["phi"], "-1/12");
    assert_eq!(r["results"]["lambda_p_expansion"]["phi"], "5/12");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(qdtau(&["periods", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qdtau(&["kappa", "--genus", "0", "--signature", "1,1"]).status.code(), Some(2));
    assert_eq!(qdtau(&["kappa", "--genus", "0", "--bogus"]).status.code(), Some(2));
    assert_eq!(qdtau(&["picard", "verify", "--genus", "0", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn periods_report_is_byte_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, CONFIG).unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qdtau"))
            .args(["periods", "--config", cfg.to_str().unwrap()])
            .env("QDTAU_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["results"]["omega_minus"].as_array().unwrap().len(), 2);
    assert_eq!(r["results"]["homological_coords"].as_array().unwrap().len(), 4);
}

#[test]
fn degenerate_writes_csv_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("samples.csv");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = qdtau(&["tau", "degenerate", "--kind", "zero-pole", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t_abs,re_dlogtau_p,im_dlogtau_p,re_dlogtau_m,im_dlogtau_m,gamma_running_p,gamma_running_m");
    assert_eq!(lines.count(), 11);
    let g = report(&out)["results"]["gamma_plus"].as_f64().unwrap();
    assert!((g + 8.0 / 3.0).abs() < 0.05);
}

#[test]
fn basis_change_accepts_integer_and_rational_entries() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = dir.path().join("sigma.json");
    std::fs::write(&sigma, r#"{"sigma": [[1, 0, "0/1", 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]]}"#).unwrap();
    let out = qdtau(&["tau", "basis-change", "--sigma", sigma.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["results"]["residual"].as_f64().unwrap() < 1e-4);
    std::fs::write(&sigma, r#"[[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]"#).unwrap();
    assert_eq!(qdtau(&["tau", "basis-change", "--sigma", sigma.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bergman_probe_reports_identities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = qdtau(&["bergman", "--config", cfg.to_str().unwrap(), "--probe", "0.3,1.4", "-0.7,-1.1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["q"]["x"], serde_json::json!([-0.7, -1.1]));
}

#[test]
fn quick_suite_passes() {
    let out = qdtau(&["suite", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("[PASS]")).count(), 3, "{stderr}");
    assert_eq!(report(&out)["passed"], true);
}
