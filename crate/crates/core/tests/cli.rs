use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use leaky_qsl::output::{read_csv, CSV_HEADER};
use leaky_qsl::sweep::run_sweep;
use leaky_qsl::SweepSpec;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leaky-qsl")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn figure2_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let svg = dir.path().join("fig2.svg");
    let o = run(&["figure2", "--csv", path(&csv), "--plot", path(&svg), "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 1 + 4 * 400);
    let rows = read_csv(&csv).unwrap();
    let expected = run_sweep(&SweepSpec::fig2(), 1).unwrap().rows;
    assert_eq!(rows, expected);
    let plot = fs::read_to_string(&svg).unwrap();
    assert_eq!(plot.matches("<polyline").count(), 4);
    assert!(plot.contains("β = 15e-9") && plot.contains("β = 100e-9"));
}

#[test]
fn single_point_qsl() {
    let o = run(&["qsl", "--y1", "0.01", "--beta-x", "0.3", "--tau-start", "4", "--tau-d", "0.5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "4.0");
    assert_eq!(fields[1], "3e-10");
    assert_eq!(fields[5], "0.5");
    assert_eq!(fields[11], "analytic");
}

#[test]
fn trace_output() {
    let o = run(&["trace", "--beta-x", "50", "--tau-stop", "0.01"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("t,re_a_tilde,im_a_tilde,re_a_full,im_a_full,re_a_dot,im_a_dot,abs_a\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let spec = SweepSpec {
        tau_stop: 4.0,
        tau_count: 5,
        ..SweepSpec::fig3()
    };
    fs::write(&cfg, spec.to_config_string()).unwrap();
    let o = run(&["sweep", "--config", path(&cfg), "--tau-count", "3", "--beta-x", "0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("0.01")));
    assert_eq!(rows[2].split(',').next(), Some("4.0"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["sweep", "--bogus"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["qsl", "--y1", "0"])), 1);
    assert_eq!(code(&run(&["sweep", "--n-quad", "7"])), 1);
    assert_eq!(code(&run(&["sweep", "--config", "/nonexistent/run.cfg"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn nonconvergence_exits_two_without_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hard.cfg");
    fs::write(&cfg, "solver = volterra\nh = 0.5\nvolterra_tol = 1e-30\nbeta_x = 50\ntau_count = 2\ntau_stop = 1\n").unwrap();
    let svg = dir.path().join("never.svg");
    let o = run(&["sweep", "--config", path(&cfg), "--plot", path(&svg)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau = 1"));
    assert!(!svg.exists());
}

#[test]
fn validate_exit_codes() {
    let o = run(&["validate"]);
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("INFO cubic_mode_difference"));
    let o = run(&["validate", "--tolerance", "1e-30"]);
    assert_eq!(code(&o), 3);
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("FAIL kernel_oracle") && text.contains("measured="));
    assert_eq!(code(&run(&["validate", "--tol", "nope=1"])), 1);
}
