//! End-to-end behavior of the `vdw` binary: fail-closed configuration
//! handling, row-count contracts, and scan output shape.

use std::fs;
use std::path::Path;
use std::process::Command;

fn vdw() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vdw"))
}

fn repo_config(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    path.to_string_lossy().into_owned()
}

#[test]
fn misspelled_key_fails_closed_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    let text = fs::read_to_string(repo_config("fig2_distance_scan.json"))
        .unwrap()
        .replace("\"scan\"", "\"sscan\"");
    fs::write(&config, text).unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-distance", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(!status.success());
    assert!(!out.exists(), "no output files may be produced on error");
}

#[test]
fn distance_scan_row_count_contract() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    // shrink the stock config to a quick grid but keep 200-row semantics
    let text = fs::read_to_string(repo_config("fig2_distance_scan.json"))
        .unwrap()
        .replace("\"count\": 200", "\"count\": 20")
        .replace("\"relative_tolerance\": 1e-10", "\"relative_tolerance\": 1e-8");
    fs::write(&config, text).unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-distance", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("force_vs_distance.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 21, "20 data rows plus one header");
    assert_eq!(
        lines[0],
        "r_m,t_s,F_A_res_N,F_A_nonres_N,F_A_total_N,F_B_res_N,F_B_total_N,quad_err_est"
    );
    assert!(out.join("force_vs_distance.svg").exists());
}

#[test]
fn time_scan_resonant_column_decays_to_ground_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    let text = fs::read_to_string(repo_config("fig4_time_scan.json"))
        .unwrap()
        .replace("\"count\": 120", "\"count\": 24");
    fs::write(&config, text).unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-time", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("force_vs_time.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|line| line.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let res: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let total: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    let nonres_last = rows.last().unwrap()[3];
    // resonant column decays monotonically in magnitude
    assert!(res.windows(2).all(|w| w[1].abs() < w[0].abs()));
    // crossover: repulsive at t=0, attractive ground-state-like at the end
    assert!(total.first().unwrap() > &0.0);
    assert!(total.last().unwrap() < &0.0);
    assert!((total.last().unwrap() - nonres_last).abs() <= 1e-3 * nonres_last.abs());
}

#[test]
fn body_environment_switches_to_vector_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    let text = fs::read_to_string(repo_config("body_distance_scan.json"))
        .unwrap()
        .replace("\"count\": 40", "\"count\": 4");
    fs::write(&config, text).unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-distance", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("body_scan.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("r_m,t_s,F_A_res_x_N,F_A_res_y_N,F_A_res_z_N,"));
    assert!(header.ends_with("quad_err_est"));
    // off-axis body bends the force out of the separation axis
    let first: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let fa_total_x = first[8];
    assert!(fa_total_x != 0.0);
}

#[test]
fn cp_consistency_reports_small_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["cp-consistency", "--config"])
        .arg(repo_config("cp_consistency.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("cp_consistency.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t_s,n_points,F_single_x_N,F_single_y_N,F_single_z_N,F_pair_x_N,F_pair_y_N,F_pair_z_N,rel_dev"
    );
    for line in &lines[1..] {
        let rel: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(rel <= 1e-10, "deviation {rel}");
    }
}

#[test]
fn kernel_check_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["kernel-check", "--seed", "42", "--count", "300", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("kernel_check.csv")).unwrap();
    assert!(csv.lines().next().unwrap() == "check,count,max_rel_deviation,tolerance,status");
    assert_eq!(csv.matches("pass").count(), 7);
    assert_eq!(csv.matches("fail").count(), 0);
}

#[test]
fn scan_type_must_match_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-time", "--config"])
        .arg(repo_config("fig2_distance_scan.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(!status.success());
    assert!(!out.exists());
}

#[test]
fn explicit_positions_are_rejected_in_two_atom_scans() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    let text = fs::read_to_string(repo_config("fig2_distance_scan.json"))
        .unwrap()
        .replace(
            "\"initial_mixture\": [\"ex\", \"ey\", \"ez\"]",
            "\"initial_mixture\": [\"ex\", \"ey\", \"ez\"], \"position_nm\": [0.0, 0.0, 50.0]",
        );
    fs::write(&config, text).unwrap();
    let out = dir.path().join("out");
    let status = vdw()
        .args(["force-vs-distance", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(!status.success());
    assert!(!out.exists());
}
