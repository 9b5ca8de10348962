//! End-to-end checks of the `quotail` binary: file formats, exit codes,
//! and byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quotail_core::calibration::{fit_price_function, Observation};
use quotail_core::tail::{hill_estimator, TailFit};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quotail"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should launch")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn write_model(dir: &Path) -> PathBuf {
    let path = dir.join("model.json");
    std::fs::write(
        &path,
        r#"{
  "demand": {"mu0": 1.0, "sigma0": 1.0, "jump_mu": 0.1, "jump_sigma": 0.3},
  "supply": {"mu0": 1.0, "sigma0": 0.8, "jump_mu": -0.05, "jump_sigma": 0.2},
  "jumps": {"independent": {"lambda1": 0.5, "lambda2": 0.7}},
  "corr": {"conditional": {"rho": -0.4}},
  "dt": 1.0,
  "d_over_s": 1.0
}"#,
    )
    .unwrap();
    path
}

fn write_pf(dir: &Path) -> PathBuf {
    let path = dir.join("pf.json");
    std::fs::write(&path, r#"{"q": 2.0, "epsilon": 0.1, "tau0": 1.0}"#).unwrap();
    path
}

#[test]
fn batch_csv_has_the_documented_shape_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path());
    let out = dir.path().join("batch.csv");
    let result = run(&[
        "simulate",
        "--config",
        model.to_str().unwrap(),
        "--n",
        "500",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 0, "{result:?}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r1,r2,k1,k2"));
    assert_eq!(lines.count(), 500);

    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("batch.csv.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["seed"], 11);
    assert_eq!(meta["n_written"], 500);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("batch.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
    let digest = manifest["config_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn quotient_values_reduce_the_batch() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path());
    let batch_out = dir.path().join("batch.csv");
    let quot_out = dir.path().join("quot.csv");
    let common = ["--n", "400", "--seed", "9"];
    let result = run(&[
        &["simulate", "--config", model.to_str().unwrap()],
        &common[..],
        &["--out", batch_out.to_str().unwrap()],
    ]
    .concat());
    assert_eq!(exit_code(&result), 0);
    let result = run(&[
        &["simulate", "--config", model.to_str().unwrap()],
        &common[..],
        &["--emit", "quotient", "--out", quot_out.to_str().unwrap()],
    ]
    .concat());
    assert_eq!(exit_code(&result), 0);

    let batch = std::fs::read_to_string(&batch_out).unwrap();
    let quot = std::fs::read_to_string(&quot_out).unwrap();
    let pairs: Vec<(f64, f64)> = batch
        .lines()
        .skip(1)
        .map(|line| {
            let mut it = line.split(',');
            let r1: f64 = it.next().unwrap().parse().unwrap();
            let r2: f64 = it.next().unwrap().parse().unwrap();
            (r1, r2)
        })
        .collect();
    let values: Vec<f64> = quot.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(quot.lines().next(), Some("value"));
    assert_eq!(values.len(), pairs.len());
    for ((r1, r2), v) in pairs.iter().zip(&values) {
        assert_eq!(*v, r1 / r2);
    }
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path());
    let pf = write_pf(dir.path());
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "3"), ("c.csv", "1")] {
        let out = dir.path().join(name);
        let result = run(&[
            "simulate",
            "--config",
            model.to_str().unwrap(),
            "--n",
            "150000",
            "--seed",
            "77",
            "--emit",
            "rc",
            "--pf",
            pf.to_str().unwrap(),
            "--condition-positive",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&result), 0, "{result:?}");
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "thread count changed the bytes");
    assert_eq!(outputs[0], outputs[2], "rerun changed the bytes");
}

#[test]
fn density_stdout_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = write_model(dir.path());
    let result = run(&[
        "density",
        "--config",
        model_path.to_str().unwrap(),
        "--method",
        "quadrature",
        "--x",
        "1.25",
    ]);
    assert_eq!(exit_code(&result), 0);
    let text = String::from_utf8(result.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w,value,abs_error,method"));
    let row = lines.next().unwrap();
    let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();

    let model: quotail_core::QuotientModel =
        serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    let trunc = quotail_core::density_series::SeriesTruncation::for_model(&model).unwrap();
    let expected = quotail_core::density_series::quotient_density(1.25, &model, trunc)
        .unwrap()
        .value;
    assert!((value - expected).abs() <= 1e-12 * expected);
}

#[test]
fn tail_output_parses_and_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("values.csv");
    let mut text = String::from("value\n");
    let n = 4000;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        text.push_str(&format!("{}\n", (1.0 - u).powf(-0.5)));
    }
    std::fs::write(&input, text).unwrap();

    let result = run(&[
        "tail",
        "--input",
        input.to_str().unwrap(),
        "--estimator",
        "hill",
    ]);
    assert_eq!(exit_code(&result), 0);
    let fit: TailFit = serde_json::from_slice(&result.stdout).unwrap();

    let values: Vec<f64> = (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            (1.0_f64 - u).powf(-0.5)
        })
        .collect();
    let expected = hill_estimator(&values, None).unwrap();
    assert_eq!(fit.zeta_hat, expected.zeta_hat);
    assert_eq!(fit.n_used, expected.n_used);
}

#[test]
fn calibrate_matches_the_library_fit() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("obs.csv");
    let mut text = String::from("demand,supply,rel_change\n");
    let mut observations = Vec::new();
    let n = 60;
    for i in 0..n {
        let demand = 0.6 + 1.7 * (i as f64 + 1.0) / n as f64;
        let supply = 1.1;
        let u = demand / supply - supply / demand;
        let rel = 0.07 * u.signum() * u.abs().powf(1.0 / 3.0);
        text.push_str(&format!("{demand},{supply},{rel}\n"));
        observations.push(Observation {
            demand,
            supply,
            rel_change: rel,
        });
    }
    std::fs::write(&input, text).unwrap();

    let result = run(&["calibrate", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_code(&result), 0, "{result:?}");
    let report: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let expected = fit_price_function(&observations).unwrap();
    assert_eq!(report["q_hat"].as_f64().unwrap(), expected.q_hat);
    assert_eq!(report["n"].as_u64().unwrap() as usize, expected.n);
    assert!(report.get("drawdown_probability").is_none());
}

#[test]
fn gbm_path_rows_are_never_snapped() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gbm.csv");
    let result = run(&[
        "path",
        "--gbm-mu",
        "0.05",
        "--gbm-sigma",
        "0.2",
        "--gbm-dt",
        "0.01",
        "--p0",
        "100",
        "--steps",
        "25",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&result), 0, "{result:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,price,snapped");
    assert_eq!(lines.len(), 27);
    assert!(lines[1].starts_with("0,100.0,"));
    for line in &lines[1..] {
        assert!(line.ends_with(",0"));
    }
    let summary: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(summary["steps"], 25);
    assert_eq!(summary["rejections"], 0);
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path());
    // Unknown flag.
    let out = run(&["simulate", "--config", model.to_str().unwrap(), "--bogus"]);
    assert_eq!(exit_code(&out), 64);
    // rc without a price function.
    let out = run(&[
        "simulate",
        "--config",
        model.to_str().unwrap(),
        "--n",
        "10",
        "--seed",
        "1",
        "--emit",
        "rc",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 64);
    // Survival fit without a window.
    let out = run(&["tail", "--input", "x.csv", "--estimator", "loglog-survival"]);
    assert_eq!(exit_code(&out), 64);
    // Help and version still exit 0.
    assert_eq!(exit_code(&run(&["--help"])), 0);
    assert_eq!(exit_code(&run(&["--version"])), 0);
}

#[test]
fn config_and_domain_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path());
    // Malformed JSON.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&[
        "density",
        "--config",
        bad.to_str().unwrap(),
        "--method",
        "quadrature",
        "--x",
        "1",
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
    // Valid JSON, invalid parameters.
    let invalid = dir.path().join("invalid.json");
    std::fs::write(
        &invalid,
        r#"{
  "demand": {"mu0": 1.0, "sigma0": -1.0, "jump_mu": 0.0, "jump_sigma": 0.1},
  "supply": {"mu0": 1.0, "sigma0": 1.0, "jump_mu": 0.0, "jump_sigma": 0.1},
  "jumps": {"independent": {"lambda1": 0.5, "lambda2": 0.5}},
  "corr": {"conditional": {"rho": 0.0}},
  "dt": 1.0,
  "d_over_s": 1.0
}"#,
    )
    .unwrap();
    let out = run(&[
        "density",
        "--config",
        invalid.to_str().unwrap(),
        "--method",
        "quadrature",
        "--x",
        "1",
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
    // A method the model class does not support.
    let out = run(&[
        "density",
        "--config",
        model.to_str().unwrap(),
        "--method",
        "exact",
        "--x",
        "1",
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
    // Asymptotic evaluation too close to the origin.
    let out = run(&[
        "density",
        "--config",
        model.to_str().unwrap(),
        "--method",
        "asymptotic",
        "--x",
        "1",
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
    // Conditioning the batch emission.
    let out = run(&[
        "simulate",
        "--config",
        model.to_str().unwrap(),
        "--n",
        "10",
        "--seed",
        "1",
        "--condition-positive",
        "--out",
        dir.path().join("y.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
}

#[test]
fn missing_files_exit_4_and_rejection_budget_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "tail",
        "--input",
        "/nonexistent/values.csv",
        "--estimator",
        "hill",
    ]);
    assert_eq!(exit_code(&out), 4, "{out:?}");

    // Legs that are almost surely nonpositive exhaust the per-step redraw
    // budget, which is a numeric failure.
    let cfg = dir.path().join("stuck.json");
    std::fs::write(
        &cfg,
        r#"{
  "p0": 100.0,
  "steps": 3,
  "pf": {"q": 2.0, "epsilon": 0.1, "tau0": 1.0},
  "model": {
    "demand": {"mu0": -50.0, "sigma0": 0.01, "jump_mu": 0.0, "jump_sigma": 0.1},
    "supply": {"mu0": 1.0, "sigma0": 0.01, "jump_mu": 0.0, "jump_sigma": 0.1},
    "jumps": {"independent": {"lambda1": 0.0, "lambda2": 0.0}},
    "corr": {"conditional": {"rho": 0.0}},
    "dt": 1.0,
    "d_over_s": 1.0
  }
}"#,
    )
    .unwrap();
    let out = run(&[
        "path",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        dir.path().join("p.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3, "{out:?}");
}
