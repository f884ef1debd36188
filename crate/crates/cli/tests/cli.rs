use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn paneitz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paneitz"))
        .args(args)
        .current_dir(dir)
        .env_remove("PANEITZ_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn solve_reference(dir: &Path) {
    let out = paneitz(
        dir,
        &[
            "solve", "--a", "1", "--b", "0.5", "--p", "7", "--out", "sol.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn verify_identities_with_r_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(
        dir.path(),
        &[
            "verify",
            "identities",
            "--r-list",
            "0.1:0.9:0.1",
            "--out",
            "id.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_json(&dir.path().join("id.json"));
    assert_eq!(report["command"], "verify");
    assert_eq!(report["flags"]["r_list"].as_array().unwrap().len(), 9);
    for r in report["reports"].as_array().unwrap() {
        assert_eq!(r["passed"], true, "{r}");
    }
}

#[test]
fn verify_hyper_contains_four_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(dir.path(), &["verify", "hyper", "--out", "h.json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_json(&dir.path().join("h.json"));
    let names: Vec<&str> = report["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names.iter().filter(|n| n.contains("four_forms")).count(),
        1,
        "{names:?}"
    );
}

#[test]
fn unattainable_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(dir.path(), &["verify", "identities", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "everything"][..],
        &["verify", "identities", "--r-list", "0:2:0.5"],
        &["solve", "--a", "0", "--b", "1"],
        &["solve", "--a", "-1"],
        &["solve", "--a", "1", "--b", "-0.5"],
        &["demo", "nonexistence", "--alpha", "-1"],
        &["check-representation", "--sol", "missing.csv"],
        &["map", "hyperbolic", "--sol", "missing.csv"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&paneitz(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn solve_writes_solution_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    solve_reference(dir.path());
    let csv = std::fs::read_to_string(dir.path().join("sol.csv")).unwrap();
    assert!(csv.starts_with("r,v,dv,w,dw\n"));
    assert_eq!(csv.lines().count(), 1 + 1001);
    let side = read_json(&dir.path().join("sol.json"));
    assert_eq!(side["a"], 1.0);
    assert!(side["shoot"]["residual"].as_f64().unwrap() <= 1e-11);
}

#[test]
fn zero_source_gives_constant_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(
        dir.path(),
        &[
            "solve", "--a", "1", "--b", "0", "--p", "0", "--out", "z.csv",
        ],
    );
    assert_eq!(code(&out), 0);
    let mut rdr = std::fs::read_to_string(dir.path().join("z.csv")).unwrap();
    rdr = rdr.split_off(rdr.find('\n').unwrap() + 1);
    for line in rdr.lines() {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn nonconvergent_solve_exits_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(
        dir.path(),
        &["solve", "--a", "0.8", "--b", "1", "--out", "bad.csv"],
    );
    assert_eq!(code(&out), 1);
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(!diag["trace"].as_array().unwrap().is_empty());
    assert!(!dir.path().join("bad.csv").exists());
}

#[test]
fn representation_constants() {
    let dir = tempfile::tempdir().unwrap();
    solve_reference(dir.path());
    let ok = paneitz(
        dir.path(),
        &[
            "check-representation",
            "--sol",
            "sol.csv",
            "--constants",
            "oracle",
            "--rows",
            "rows.csv",
        ],
    );
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(std::fs::read_to_string(dir.path().join("rows.csv"))
        .unwrap()
        .starts_with("r,v,rhs,diff\n"));

    let bad = paneitz(
        dir.path(),
        &[
            "check-representation",
            "--sol",
            "sol.csv",
            "--constants",
            "paper",
            "--report",
            "paper.json",
        ],
    );
    assert_eq!(code(&bad), 1);
    let report = read_json(&dir.path().join("paper.json"));
    let notes = report["reports"][0]["notes"].as_array().unwrap();
    assert!(notes
        .iter()
        .any(|n| n.as_str().unwrap().starts_with("erratum")));
}

#[test]
fn map_hyperbolic_prints_alpha() {
    let dir = tempfile::tempdir().unwrap();
    solve_reference(dir.path());
    let out = paneitz(dir.path(), &["map", "hyperbolic", "--sol", "sol.csv"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    let alpha: f64 = text
        .split_whitespace()
        .find_map(|w| w.strip_prefix("alpha="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((alpha - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-3);
    let profile = std::fs::read_to_string(dir.path().join("sol_hyperbolic.csv")).unwrap();
    assert!(profile.starts_with("rho,u\n"));
}

#[test]
fn nonexistence_table_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(dir.path(), &["demo", "nonexistence", "--alpha", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let csv = std::fs::read_to_string(dir.path().join("nonexistence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho_x,T,u,u_over_T"));
    let t: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(t.len(), 4);
    assert!(t.windows(2).all(|w| w[1] < w[0]), "{t:?}");
}

#[test]
fn errata_table_lists_detectors() {
    let dir = tempfile::tempdir().unwrap();
    let out = paneitz(dir.path(), &["errata", "--report", "errata.json"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "boggio-C",
        "theorem1-constants",
        "hyper-kernel-factors",
        "choi-xu-beta",
    ] {
        assert!(text.contains(name), "{name}");
    }
    assert!(text.contains("1/(16 pi)") && text.contains("15^(-1/2) alpha^-4"));
    assert_eq!(
        read_json(&dir.path().join("errata.json"))["errata"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}

#[test]
fn reports_are_deterministic_modulo_timestamps() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = paneitz(
            dir.path(),
            &[
                "verify",
                "kernels",
                "--samples",
                "200",
                "--seed",
                "7",
                "--out",
                "r.json",
            ],
        );
        assert_eq!(code(&out), 0);
        let mut v = read_json(&dir.path().join("r.json"));
        let obj = v.as_object_mut().unwrap();
        obj.remove("started");
        obj.remove("finished");
        v
    };
    let first = run();
    assert_eq!(first, run());
    assert_eq!(first["flags"]["suite"], "kernels");
    assert_eq!(first["reports"][0]["seed"], 7);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_paneitz"))
        .args(["verify", "kernels", "--samples", "100", "--out", "env.json"])
        .current_dir(dir.path())
        .env("PANEITZ_SEED", "1234")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        read_json(&dir.path().join("env.json"))["flags"]["seed"],
        1234
    );
}
