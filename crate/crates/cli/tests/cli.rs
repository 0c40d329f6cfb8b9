//! Runs the built binary and checks exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

use twopiece_cli::io::{read_chain_csv, read_sidecar};

fn twopiece(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twopiece")).args(args).output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

fn stdout_rows(out: &Output) -> Vec<String> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(String::from).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(twopiece(&["--help"]).status.code(), Some(0));
    assert_eq!(twopiece(&["fit", "--model", "ar-sepd"]).status.code(), Some(1));
    assert_eq!(twopiece(&["sample", "--family", "sepd", "--alpha", "1.3", "--p", "2", "--n", "5"]).status.code(), Some(1));

    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.csv");
    std::fs::write(&bad, "1.0\n2.0\nx\n4.0\n").unwrap();
    let out = twopiece(&["fit", "--model", "ar-sepd", "--data", path_str(&bad), "--out", path_str(d.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn kl_table_rows() {
    let out = twopiece(&["kl-table", "--family", "sepd"]);
    let rows = stdout_rows(&out);
    assert_eq!(rows[0], "p,kl_to_p_minus_1,kl_to_p_plus_1");
    assert_eq!(rows.len(), 30);
    assert!(rows[1].starts_with("2,0.0720"));
    let rows = stdout_rows(&twopiece(&["kl-table", "--family", "sgld", "--extended"]));
    assert_eq!(rows.len(), 35);
    assert!(rows.last().unwrap().starts_with("180,"));
}

#[test]
fn prior_table_is_a_distribution() {
    let rows = stdout_rows(&twopiece(&["prior-table", "--family", "sgld", "--p-max", "40"]));
    assert_eq!(rows.len(), 41);
    let total: f64 = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn fit_outputs_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let data = d.path().join("y.csv");
    let sample = twopiece(&["sample", "--family", "sepd", "--alpha", "0.4", "--p", "2", "--n", "80", "--seed", "5"]);
    let values: Vec<String> = stdout_rows(&sample)[1..].to_vec();
    assert_eq!(values.len(), 80);
    std::fs::write(&data, format!("value\n{}\n", values.join("\n"))).unwrap();
    let out = d.path().join("fit");
    let status = twopiece(&[
        "fit", "--model", "ar-sepd", "--data", path_str(&data), "--header", "--iterations", "600", "--burn-in", "100",
        "--p-max", "30", "--out", path_str(&out), "--seed", "2",
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let (names, cols) = read_chain_csv(&out.join("chain.csv")).unwrap();
    assert_eq!(names, ["phi1", "alpha", "p", "sigma"]);
    assert!(cols.iter().all(|c| c.len() == 500));
    assert!(cols[2].iter().all(|&p| p.fract() == 0.0 && (1.0..=30.0).contains(&p)));
    let text = std::fs::read_to_string(out.join("chain.csv")).unwrap();
    let reparsed: Vec<String> = cols[1].iter().map(|v| format!("{v:?}")).collect();
    let written: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(reparsed, written);

    let meta = read_sidecar(&out.join("chain.meta")).unwrap();
    let get = |k: &str| meta.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    assert_eq!(get("seed").as_deref(), Some("2"));
    assert_eq!(get("n_iter").as_deref(), Some("600"));
    let rate: f64 = get("acceptance.p").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&rate));
    assert_eq!(csv_rows(&out.join("summary.csv")).len(), 5);
}

#[test]
fn forecast_config_and_flags() {
    let d = tempfile::tempdir().unwrap();
    let data = d.path().join("series.csv");
    let lines: Vec<String> = (0..45).map(|t| format!("2020-{:02}-01,{}", t % 12 + 1, (t as f64 * 0.9).sin() * 2.0 + t as f64 * 0.01)).collect();
    std::fs::write(&data, lines.join("\n")).unwrap();
    let config = d.path().join("forecast.toml");
    std::fs::write(&config, "window = 30\nmodels = [\"ols-ar\", \"sepd-ar\"]\n[mcmc]\nn_iter = 300\nn_burn = 100\n").unwrap();
    let out = d.path().join("fc");
    let status = twopiece(&[
        "forecast", "--data", path_str(&data), "--config", path_str(&config), "--window", "35", "--out", path_str(&out),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let sepd = csv_rows(&out.join("forecast_sepd-ar.csv"));
    assert_eq!(sepd.len(), 1 + 45 - 35);
    assert_eq!(sepd[0][..3], ["t", "date", "point_forecast"]);
    assert!(!out.join("forecast_bayes-normal-ar.csv").exists());
    let cmp = csv_rows(&out.join("comparison.csv"));
    assert_eq!(cmp.len(), 3);
    assert_eq!(cmp[1][0], "ols-ar");
}

#[test]
fn thread_count_does_not_change_results() {
    let d = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        let out = d.path().join(format!("t{threads}"));
        let status = twopiece(&[
            "coverage-study", "--model", "ar-sepd", "--replicates", "3", "--iterations", "300", "--burn-in", "100",
            "--threads", threads, "--seed", "9", "--out", path_str(&out),
        ]);
        assert!(status.status.success());
        std::fs::read(out.join("coverage.csv")).unwrap()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn demo_writes_truth_table() {
    let d = tempfile::tempdir().unwrap();
    let status = twopiece(&[
        "demo", "--model", "reg-sgld", "--n", "60", "--iterations", "500", "--burn-in", "100", "--out", path_str(d.path()),
    ]);
    assert!(status.status.success());
    let rows = csv_rows(&d.path().join("summary.csv"));
    assert_eq!(rows[0], ["parameter", "true", "mean", "median", "lower", "upper", "covered"]);
    let params: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(params, ["beta0", "beta1", "alpha", "p", "sigma"]);
    assert_eq!(csv_rows(&d.path().join("data.csv")).len(), 61);
}
