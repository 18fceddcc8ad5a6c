use std::path::Path;
use std::process::{Command, Output};

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{initial_state, Beta, ModelParams};
use raman_photostat::photostat::{stokes_distribution_hermite, stokes_moments};

fn raman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raman"))
        .args(args)
        .env_remove("RAMAN_NUM_THREADS")
        .output()
        .expect("spawn raman")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn stokes_csv_round_trips_library_values() {
    let out = stdout(&raman(&["stokes-dist", "--kappa", "0.35", "--beta", "1.5", "--time", "0.8", "--n-max", "10"]));
    let (table, footer) = out.split_once("\n\n").expect("moments footer");
    let p = ModelParams::new(1.0, 0.5, 0.35, Beta::Finite(1.5)).unwrap();
    let s = evolve_covariance(&initial_state(&p), &p, 0.8).unwrap();
    let dist = stokes_distribution_hermite(&s, 10).unwrap();
    let rows = records(table);
    assert_eq!(rows.len(), 11);
    for row in &rows {
        let n: usize = row[1].parse().unwrap();
        let printed: f64 = row[2].parse().unwrap();
        let exact = dist.get(n).unwrap();
        assert!((printed - exact).abs() <= 1e-15 * exact.abs());
    }
    let m = records(footer);
    let moments = stokes_moments(&s).unwrap();
    assert_eq!(m[0][1].parse::<f64>().unwrap(), moments.mean);
    assert_eq!(m[0][2].parse::<f64>().unwrap(), moments.variance);
}

#[test]
fn json_output_parses_with_moments() {
    let out = stdout(&raman(&["stokes-dist", "--kappa", "0.5", "--beta", "inf", "--time", "1", "--n-max", "3", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mean = v["moments"][0]["mean"].as_f64().unwrap();
    assert!((mean - 0.5f64.sinh().powi(2)).abs() < 1e-12);
    assert!(v["invariant_report"].is_array());
}

#[test]
fn sweep_covers_the_cartesian_grid_in_order() {
    let out = stdout(&raman(&["sweep", "--kappa", "0.1,0.2", "--beta", "1,inf", "--time-grid", "0:1:2"]));
    let rows = records(&out);
    assert_eq!(rows.len(), 2 * 2 * 3);
    let times: Vec<&str> = rows.iter().take(3).map(|r| &r[4]).collect();
    assert_eq!(times, ["0", "0.5", "1"]);
    assert_eq!(&rows[0][8], "NaN");
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let args = ["sweep", "--kappa", "0.1,0.3,0.5", "--time-grid", "0:2:8"];
    let one = stdout(&raman(&[&args[..], &["--threads", "1"]].concat()));
    let four = stdout(&raman(&[&args[..], &["--threads", "4"]].concat()));
    assert_eq!(one, four);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["stokes-dist", "--kappa", "-1"][..],
        &["stokes-dist", "--time", "1", "--time-grid", "0:1:2"],
        &["stokes-dist", "--time-grid", "1:0:2"],
        &["joint-dist", "--n-max", "60"],
        &["stokes-dist", "--beta", "cold"],
    ] {
        assert_eq!(raman(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_is_strict_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kappa": 0.2, "bogus": 1}"#).unwrap();
    assert_eq!(raman(&["stokes-dist", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"kappa": 0.2, "time": 0.5, "n_max": 2}"#).unwrap();
    let from_file = stdout(&raman(&["stokes-dist", "--config", good.to_str().unwrap()]));
    let overridden = stdout(&raman(&["stokes-dist", "--config", good.to_str().unwrap(), "--kappa", "0.5"]));
    let direct = stdout(&raman(&["stokes-dist", "--kappa", "0.5", "--time", "0.5", "--n-max", "2"]));
    assert_ne!(from_file, overridden);
    assert_eq!(overridden, direct);
}

#[test]
fn caustic_exits_with_three_and_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("g.csv");
    let out = raman(&[
        "propagator", "--kappa", "0", "--beta", "inf", "--time", "3.141592653589793",
        "--x1", "0,0", "--x2", "0.1,0.2", "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!target.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("p.csv");
    let args = ["propagator", "--kappa", "0.2", "--time", "1", "--x1", "0.1,0.2", "--x2-grid", "-1:1:4"];
    let printed = stdout(&raman(&args));
    stdout(&raman(&[&args[..], &["--out", target.to_str().unwrap()]].concat()));
    assert_eq!(std::fs::read_to_string(&target).unwrap(), printed);
    assert_eq!(records(&printed).len(), 25);
}

#[test]
fn missing_output_directory_is_reported() {
    let out = raman(&["ledger", "--out", "/nonexistent-dir/ledger.csv"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(!Path::new("/nonexistent-dir/ledger.csv").exists());
}

#[test]
fn ledger_matches_golden_file() {
    let out = stdout(&raman(&["ledger"]));
    let got = records(&out);
    let golden = records(include_str!("golden/ledger.csv"));
    assert_eq!(got.len(), golden.len());
    for (g, e) in got.iter().zip(&golden) {
        assert_eq!(&g[0], &e[0]);
        assert_eq!(&g[1], &e[1]);
        for i in 2..5 {
            let (a, b): (f64, f64) = (g[i].parse().unwrap(), e[i].parse().unwrap());
            assert!((a - b).abs() <= 1e-12, "{} {}: {a} vs {b}", &g[0], &g[1]);
        }
        assert_eq!(&g[5], &e[5], "{} {}", &g[0], &g[1]);
    }
}

#[test]
fn validate_passes() {
    let out = raman(&["validate", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 14);
}
