use std::path::Path;
use std::process::{Command, Output};

fn voltacell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voltacell"))
        .args(args)
        .env_remove("VOLTACELL_THREADS")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = voltacell(&[]);
    assert!(!o.status.success());
    assert!(text(&o.stderr).contains("Usage"), "{}", text(&o.stderr));
}

#[test]
fn short_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hd");
    let o = voltacell(&[
        "run", "--scenario", "high_discharge", "--coarse", "--dt", "6", "--tend", "12", "--out", path(&out),
        "--threads", "1",
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    for f in ["manifest.txt", "timeseries.csv", "mesh.vtk", "summary.txt", "snapshot_000002.vtk"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(text(&o.stdout).contains("P_avg"));
}

#[test]
fn electrochemical_model_flag_reaches_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&[
        "run", "--scenario", "low_charge", "--coarse", "--dt", "6", "--tend", "6", "--model", "electrochemical",
        "--no-vtk", "--out", path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let m = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(m.contains("model = electrochemical"), "{m}");
}

#[test]
fn unknown_preset_fails_with_a_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&["run", "--scenario", "high_dischrge", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    assert!(err.starts_with("error:") && err.contains("high_discharge"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

#[test]
fn bad_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&["run", "--scenario", "low_charge", "--set", "soc_anode=2", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("soc_anode"));
}

#[test]
fn temporal_convergence_writes_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&["convergence", "--case", "temporal", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("temporal.csv")).unwrap();
    assert!(csv.lines().count() >= 4, "{csv}");
}

#[test]
fn mesh_command_exports_the_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&["mesh", "--spec", "high_discharge", "--coarse", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(dir.path().join("mesh.vtk").is_file());
    assert!(text(&o.stdout).contains("elements"));
}

#[test]
fn compare_tabulates_both_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = voltacell(&[
        "compare", "--scenario", "low_discharge", "--coarse", "--set", "dt=6", "--set", "t_end=12", "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
    for m in ["full", "electrochemical"] {
        assert!(dir.path().join("low_discharge").join(m).join("timeseries.csv").is_file(), "{m}");
    }
}
