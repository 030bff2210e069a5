use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pseudoherm"))
}

#[test]
fn verify_passes_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["verify", "--suite", "transform", "--model", "heisenberg", "--m", "1", "--points", "3"])
        .args(["--factor", "random-trig:2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"verdict\": \"pass\""));

    let csv = bin().args(["report", "--format", "csv-summary"]).arg(&out).output().unwrap();
    assert_eq!(csv.status.code(), Some(0));
    let body = String::from_utf8(csv.stdout).unwrap();
    assert!(body.starts_with("check_id,anchor,points,max_residual"));
}

#[test]
fn violations_exit_with_one() {
    let status = bin()
        .args(["verify", "--suite", "transform", "--model", "heisenberg", "--points", "2", "--factor"])
        .args(["random-trig:2", "--tol", "1e-30"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn bad_input_exits_with_two() {
    let bad_m = bin().args(["verify", "--m", "9"]).output().unwrap();
    assert_eq!(bad_m.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_m.stderr).contains("error"));
    let bad_flag = bin().args(["verify", "--nonsense"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "m = 1\nunknown_key = 3\n").unwrap();
    let bad_file = bin().arg("verify").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(bad_file.status.code(), Some(2));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "model = \"heisenberg\"\nm = 2\npoints = 50\nsuite = \"transform\"\n").unwrap();
    let out = bin().arg("verify").arg("--config").arg(&cfg).args(["--points", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"points\": 2,"));
    assert!(text.contains("\"m\": 2,"));
}
