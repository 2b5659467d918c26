//! End-to-end shell checks through the real binary.

use std::fs;
use std::path::Path;
use std::process::Command;

fn tflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tflow"))
}

fn write_config(dir: &Path, series: &Path, snapshot: &Path) -> std::path::PathBuf {
    let cfg = format!(
        "grid.n = 32\n\
         stepper.dt = 1e-3\n\
         horizon = 0.05\n\
         record_every = 10\n\
         initial.kind = random_bandlimited\n\
         initial.seed = 3\n\
         initial.amplitude = 0.2\n\
         initial.theta_mean = 1.0\n\
         initial.phi_mean = 0.1\n\
         output.series = {}\n\
         output.snapshot = {}\n",
        series.display(),
        snapshot.display()
    );
    let path = dir.join("run.cfg");
    fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn simulate_is_deterministic_and_restartable() {
    let dir = tempfile::tempdir().unwrap();
    let series_a = dir.path().join("a.csv");
    let snap_a = dir.path().join("a.bin");
    let cfg_a = write_config(dir.path(), &series_a, &snap_a);

    let out = tflow().arg("simulate").arg(&cfg_a).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("conserved triple"), "{stdout}");

    // Identical config + seed -> identical bytes.
    let series_b = dir.path().join("b.csv");
    let snap_b = dir.path().join("b.bin");
    let cfg_b = write_config(dir.path(), &series_b, &snap_b);
    let out = tflow().arg("simulate").arg(&cfg_b).output().unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&series_a).unwrap(), fs::read(&series_b).unwrap());
    assert_eq!(fs::read(&snap_a).unwrap(), fs::read(&snap_b).unwrap());

    // Reload the final snapshot as a fresh initial condition; the horizon
    // is absolute time, so it must extend past the snapshot instant.
    let series_c = dir.path().join("c.csv");
    let cfg = format!(
        "grid.n = 32\nhorizon = 0.06\ninitial.kind = from_snapshot\n\
         initial.snapshot = {}\noutput.series = {}\n",
        snap_a.display(),
        series_c.display()
    );
    let cfg_c = dir.path().join("restart.cfg");
    fs::write(&cfg_c, cfg).unwrap();
    let out = tflow().arg("simulate").arg(&cfg_c).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&series_c).unwrap();
    // Restarted run begins at the snapshot time.
    let first_t: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first_t - 0.05).abs() < 1e-12, "restart time {first_t}");
}

#[test]
fn bad_config_reports_the_key_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "conductivity.q = 1.5\n").unwrap();
    let out = tflow().arg("simulate").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("conductivity.q"), "{err}");
    assert!(err.contains("[2, inf)"), "{err}");
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = tflow().args(["experiment", "frobnicate"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown experiment"), "{err}");
    assert!(err.contains("fixed_point"), "{err}");
}

#[test]
fn version_flag_works() {
    let out = tflow().arg("--version").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("tflow"), "{text}");
}

#[test]
fn fixed_point_experiment_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflow()
        .args(["experiment", "fixed_point", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all checks passed"), "{text}");
    assert!(dir.path().join("fixed_point_series.csv").exists());
}
