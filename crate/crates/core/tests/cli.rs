use std::path::{Path, PathBuf};
use std::process::Command;

use hdtransform::cli::{qq_paths, run, EXIT_INPUT, EXIT_OK};
use hdtransform::io::{qq_sup_deviation, read_result, QqPoint};
use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn hd(args: &[&str]) -> i32 {
    run(std::iter::once("hdtransform").chain(args.iter().copied()))
}

fn out(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn read_json(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_qq(path: &PathBuf) -> Vec<QqPoint> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["theoretical", "sample"]);
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn estimate_golden_box_cox() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(&dir, "r.json");
    let bc = data("boxcox_theta0.csv");
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &bc,
            "--response",
            "y",
            "--seed",
            "3",
            "--out",
            &o
        ]),
        EXIT_OK
    );
    let doc = read_result(&o).unwrap();
    let r = &doc.result;
    assert!((-0.05..=0.05).contains(&r.theta_hat), "{}", r.theta_hat);
    let ci = r.ci.unwrap();
    assert!(ci.lo <= r.theta_hat && r.theta_hat <= ci.hi);
    assert!(r.sigma_boot.unwrap() > 0.0);
    assert!(doc.tool_version.starts_with("hdtransform"));
    assert_eq!(doc.config.as_ref().unwrap()["inference"]["seed"], 3);
    // 41 grid points plus bisection steps
    assert!(r.solver_trace.len() > 41);
    let min = r
        .solver_trace
        .iter()
        .map(|(_, s)| s.abs())
        .fold(f64::INFINITY, f64::min);
    assert!(r.mean_psi_at_hat.abs() <= min + r.epsilon_n);
    let v = read_json(&o);
    for key in [
        "theta_hat",
        "sigma_boot",
        "sigma_plug",
        "ci",
        "n_boot",
        "seed",
        "solver_trace",
        "tool_version",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn bootstrap_zero_omits_interval() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(&dir, "r.json");
    let bc = data("boxcox_theta0.csv");
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &bc,
            "--response",
            "y",
            "--bootstrap",
            "0",
            "--out",
            &o
        ]),
        EXIT_OK
    );
    let v = read_json(&o);
    assert!(v.get("ci").is_none());
    assert!(v.get("sigma_boot").is_none());
    assert!(v.get("theta_hat").is_some());
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(&dir, "r.json");
    let missing = out(&dir, "nope.csv");
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &missing,
            "--response",
            "y",
            "--out",
            &o
        ]),
        EXIT_INPUT
    );
    let bc = data("boxcox_theta0.csv");
    assert_eq!(
        hd(&["estimate", "--data", &bc, "--response", "nope", "--out", &o]),
        EXIT_INPUT
    );
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &bc,
            "--response",
            "y",
            "--grid",
            "3",
            "--out",
            &o
        ]),
        EXIT_INPUT
    );
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &bc,
            "--response",
            "y",
            "--alpha",
            "1.5",
            "--out",
            &o
        ]),
        EXIT_INPUT
    );
    assert_eq!(hd(&["estimate", "--data", &bc]), EXIT_INPUT);
    assert_eq!(hd(&["frobnicate"]), EXIT_INPUT);
    // negative responses are outside the Box-Cox domain
    let yj = data("yeojohnson_theta1.csv");
    assert_eq!(
        hd(&["estimate", "--data", &yj, "--response", "y", "--out", &o]),
        EXIT_INPUT
    );
    assert!(!Path::new(&o).exists());
}

#[test]
fn test_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let o = out(&dir, "t.json");
    let bc = data("boxcox_theta0.csv");
    assert_eq!(
        hd(&[
            "test",
            "--data",
            &bc,
            "--response",
            "y",
            "--null",
            "0",
            "--seed",
            "1",
            "--out",
            &o
        ]),
        EXIT_OK
    );
    assert_eq!(read_json(&o)["test"]["reject"], false);

    let yj = data("yeojohnson_theta1.csv");
    assert_eq!(
        hd(&[
            "test",
            "--data",
            &yj,
            "--response",
            "y",
            "--family",
            "yeo-johnson",
            "--null",
            "0",
            "--seed",
            "1",
            "--out",
            &o
        ]),
        EXIT_OK
    );
    let v = read_json(&o);
    assert_eq!(v["test"]["reject"], true);
    assert!(v["test"]["z_stat"].as_f64().unwrap().abs() > 1.96);

    assert_eq!(
        hd(&["test", "--data", &bc, "--response", "y", "--null", "2.5"]),
        EXIT_INPUT
    );
    assert_eq!(
        hd(&[
            "test",
            "--data",
            &bc,
            "--response",
            "y",
            "--theta-max",
            "1",
            "--null",
            "1.2"
        ]),
        EXIT_INPUT
    );
    assert_eq!(
        hd(&["test", "--data", &bc, "--response", "y", "--null", "-3"]),
        EXIT_INPUT
    );
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let bc = data("boxcox_theta0.csv");
    let a = out(&dir, "a.json");
    let b = out(&dir, "b.json");
    let c = out(&dir, "c.json");
    let common = [
        "estimate",
        "--data",
        &bc,
        "--response",
        "y",
        "--bootstrap",
        "30",
        "--seed",
        "9",
    ];
    let with = |extra: &[&str]| -> Vec<String> {
        common.iter().chain(extra).map(|s| s.to_string()).collect()
    };
    assert_eq!(
        run(std::iter::once("hdtransform".to_string()).chain(with(&["--out", &a]))),
        EXIT_OK
    );
    assert_eq!(
        run(std::iter::once("hdtransform".to_string()).chain(with(&[
            "--threads",
            "1",
            "--out",
            &b
        ]))),
        EXIT_OK
    );
    assert_eq!(
        run(std::iter::once("hdtransform".to_string()).chain(with(&[
            "--threads",
            "3",
            "--out",
            &c
        ]))),
        EXIT_OK
    );
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    assert_eq!(ta, std::fs::read(&c).unwrap());
}

#[test]
fn simulate_shape_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let table = out(&dir, "t1.csv");
    assert_eq!(
        hd(&[
            "simulate",
            "--config",
            &data("table1.json"),
            "--reps",
            "10",
            "--out",
            &table
        ]),
        EXIT_OK
    );
    let mut r = csv::Reader::from_path(&table).unwrap();
    let headers = r.headers().unwrap().clone();
    for col in ["mean_estimator", "acceptance_rate", "mae", "rel_mse"] {
        assert!(headers.iter().any(|h| h == col), "missing {col}");
    }
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let detail = read_json(&out(&dir, "t1.json"));
    assert_eq!(
        detail["reports"][0]["records"].as_array().unwrap().len(),
        10
    );
    assert_eq!(detail["reports"][0]["config"]["reps"], 10);

    let bad = out(&dir, "bad.json");
    std::fs::write(
        &bad,
        r#"{"configurations": [{"family": "box-cox", "theta0": 0, "n": 200, "p": 20,
            "snr": "high", "cov_kind": "identity", "reps": 5}]}"#,
    )
    .unwrap();
    assert_eq!(
        hd(&["simulate", "--config", &bad, "--out", &table]),
        EXIT_INPUT
    );

    // the binary reports the field path on stderr
    let o = Command::new(env!("CARGO_BIN_EXE_hdtransform"))
        .args(["simulate", "--config", &bad, "--out", &table])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("configurations[0].snr"), "{err}");

    let bad_s = out(&dir, "bad_s.json");
    std::fs::write(
        &bad_s,
        r#"{"configurations": [{"family": "box-cox", "theta0": 0, "n": 200, "p": 20, "s": 30,
            "snr": 1, "cov_kind": "identity", "reps": 5}]}"#,
    )
    .unwrap();
    assert_eq!(
        hd(&["simulate", "--config", &bad_s, "--out", &table]),
        EXIT_INPUT
    );
}

#[test]
fn qq_outputs_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bc = data("boxcox_theta0.csv");
    let e = out(&dir, "e.json");
    assert_eq!(
        hd(&[
            "estimate",
            "--data",
            &bc,
            "--response",
            "y",
            "--bootstrap",
            "0",
            "--out",
            &e
        ]),
        EXIT_OK
    );
    let near = dir.path().join("near");
    assert_eq!(
        hd(&[
            "qq",
            "--data",
            &bc,
            "--response",
            "y",
            "--theta-hat-from",
            &e,
            "--out-prefix",
            near.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let far = dir.path().join("far");
    assert_eq!(
        hd(&[
            "qq",
            "--data",
            &bc,
            "--response",
            "y",
            "--theta",
            "1.5",
            "--out-prefix",
            far.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let [near_theta, near_zero, near_raw] = qq_paths(&near);
    let q = read_qq(&near_theta);
    assert_eq!(q.len(), 200);
    assert!(q
        .windows(2)
        .all(|w| w[0].sample <= w[1].sample && w[0].theoretical < w[1].theoretical));
    assert!(near_zero.exists() && near_raw.exists());
    let d_near = qq_sup_deviation(&q);
    let d_far = qq_sup_deviation(&read_qq(&qq_paths(&far)[0]));
    assert!(d_near < 0.6, "{d_near}");
    assert!(d_far > 2.0 * d_near, "{d_far} vs {d_near}");

    assert_eq!(
        hd(&["qq", "--data", &bc, "--response", "y", "--out-prefix", "x"]),
        EXIT_INPUT
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(hd(&["--version"]), EXIT_OK);
    assert_eq!(hd(&["estimate", "--help"]), EXIT_OK);
}
