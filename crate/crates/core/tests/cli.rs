//! The `shockform` binary: flags, artifacts and failure modes.

use std::process::Command;

use shockform::checkpoint;
use shockform::runner::CSV_COLUMNS;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shockform"))
}

#[test]
fn writes_artifacts_for_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "scenario = baseline_shock\neos.kind = polytropic\neos.gamma = 3\ngrid.n1 = 128\ngrid.n2 = 16\n\
         grid.L1 = 2\nrun.t_max = 0.2\ndata.amplitude = 0.01\nlattice.n_u = 9\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin().arg("--config").arg(&cfg).arg("--out").arg(&out).args(["--workers", "1"]).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let csv = std::fs::read_to_string(out.join("run.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let verdict: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdicts"].as_object().unwrap().len(), 10);
    assert_eq!(verdict["scenario"], "baseline_shock");
    let state = checkpoint::read(&out.join("final.chk")).unwrap();
    assert!((state.t - 0.2).abs() < 1e-9);
}

#[test]
fn empty_config_is_rejected_with_the_required_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    std::fs::write(&cfg, "").unwrap();
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("grid.n1") && msg.contains("data.amplitude"), "{msg}");
}

#[test]
fn needs_a_config_or_scenario_and_three_levels() {
    assert_eq!(bin().output().unwrap().status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["--scenario", "convergence_study", "--levels", "2", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 levels"));
    assert!(bin().args(["--scenario", "no_such_scenario"]).output().unwrap().status.code() != Some(0));
}
