use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tuniv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tuniv")).args(args).current_dir(dir).output().expect("tuniv runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const TASK_1: &str = r#"{"m": 1, "target": {"index": "2"}, "s": 2, "zeta": {"index": 1}, "curve": {"subfamily": null}, "t": 8}"#;

#[test]
fn enum_show_first_polynomial_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = tuniv(&["enum", "show", "--kind", "poly", "--index", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "p_1(z) = 0");
    let out = tuniv(&["enum", "show", "--kind", "scale", "--index", "3"], dir.path());
    assert_eq!(stdout(&out).trim(), "a_3 = 0.75");
    let out = tuniv(&["enum", "show", "--kind", "tuple", "--index", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn family_certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("radii.json"), r#"{"family": {"kind": "radii"}, "delta": 0.05, "alpha_samples": 64}"#).unwrap();
    fs::write(dir.path().join("spiral.json"), r#"{"family": {"kind": "single_spiral"}}"#).unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"family": {"kind": "helix"}}"#).unwrap();
    let ok = tuniv(&["family", "certify", "--config", "radii.json", "--report", "r.json"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(dir.path().join("r.json").exists());
    assert_eq!(tuniv(&["family", "certify", "--config", "spiral.json"], dir.path()).status.code(), Some(0));
    assert_eq!(tuniv(&["family", "certify", "--config", "bad.json"], dir.path()).status.code(), Some(3));
    assert_eq!(tuniv(&["family", "certify", "--config", "missing.json"], dir.path()).status.code(), Some(3));
}

#[test]
fn build_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), format!(r#"{{"family": {{"kind": "radii"}}, "tasks": [{TASK_1}]}}"#)).unwrap();
    fs::write(dir.path().join("task.json"), TASK_1).unwrap();
    let build = tuniv(&["build", "--config", "cfg.json", "--out", "s.json"], dir.path());
    assert_eq!(build.status.code(), Some(0), "{}", stdout(&build));
    assert!(dir.path().join("s.certificates.json").exists());

    let all = tuniv(&["verify", "--series", "s.json", "--report", "v.json"], dir.path());
    assert_eq!(all.status.code(), Some(0));
    let search = tuniv(&["verify", "--series", "s.json", "--task", "task.json", "--report", "v.json"], dir.path());
    assert_eq!(search.status.code(), Some(0), "{}", stdout(&search));
    let exact = tuniv(
        &["verify", "--series", "s.json", "--task", "task.json", "--indices", "1,2,1,2,8,1,32,15", "--report", "v.json"],
        dir.path(),
    );
    assert_eq!(exact.status.code(), Some(0), "{}", stdout(&exact));
    // An off-target index tuple fails verification.
    let wrong = tuniv(&["verify", "--series", "s.json", "--indices", "1,2,1,2,8,1,32,3", "--report", "v.json"], dir.path());
    assert_eq!(wrong.status.code(), Some(2));
    // Indices that contradict the task are invalid input.
    let clash = tuniv(
        &["verify", "--series", "s.json", "--task", "task.json", "--indices", "1,3,1,2,8,1,32,15", "--report", "v.json"],
        dir.path(),
    );
    assert_eq!(clash.status.code(), Some(3));
}

#[test]
fn version_mismatch_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), format!(r#"{{"family": {{"kind": "radii"}}, "tasks": [{TASK_1}]}}"#)).unwrap();
    assert_eq!(tuniv(&["build", "--config", "cfg.json", "--out", "s.json"], dir.path()).status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.json")).unwrap();
    let marker = format!("\"tool_version\": \"{}\"", env!("CARGO_PKG_VERSION"));
    assert!(text.contains(&marker));
    fs::write(dir.path().join("old.json"), text.replace(&marker, "\"tool_version\": \"0.0.0-old\"")).unwrap();
    let refused = tuniv(&["verify", "--series", "old.json", "--report", "v.json"], dir.path());
    assert_eq!(refused.status.code(), Some(3));
    let forced = tuniv(&["verify", "--series", "old.json", "--report", "v.json", "--allow-version-mismatch"], dir.path());
    assert_eq!(forced.status.code(), Some(0));
}

#[test]
fn empty_task_list_gives_empty_series() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"family": {"kind": "radii"}, "tasks": []}"#).unwrap();
    let out = tuniv(&["build", "--config", "cfg.json", "--out", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = fs::read_to_string(dir.path().join("s.json")).unwrap();
    assert!(text.contains("\"terms\": []"));
}

#[test]
fn tiny_degree_budget_aborts_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let task = TASK_1.replace("\"s\": 2", "\"s\": 1000000");
    fs::write(dir.path().join("cfg.json"), format!(r#"{{"family": {{"kind": "radii"}}, "tasks": [{task}]}}"#)).unwrap();
    let out = tuniv(&["build", "--config", "cfg.json", "--out", "s.json", "--max-degree", "8"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("s.json").exists());
}

#[test]
fn invalid_config_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"family": {"kind": "radii"}, "core_radius": 1.5}"#).unwrap();
    let out = tuniv(&["build", "--config", "cfg.json", "--out", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = tuniv(&["build", "--config", "cfg.json", "--out", "s.json", "--control-samples", "8"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decompose_zero_function() {
    let dir = tempfile::tempdir().unwrap();
    let task_h = TASK_1.replace("\"index\": 1", "\"index\": 2");
    fs::write(
        dir.path().join("dec.json"),
        format!(r#"{{"build": {{"family": {{"kind": "radii"}}}}, "f": [], "tasks_g": [{TASK_1}], "tasks_h": [{task_h}]}}"#),
    )
    .unwrap();
    let out = tuniv(&["decompose", "--config", "dec.json", "--out", "d"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("identity g - h = f"));
    assert!(dir.path().join("d.g.json").exists() && dir.path().join("d.h.json").exists());
}

#[test]
fn demo_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tuniv(&["demo", "--out", "demo"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for f in ["config.json", "series.json", "certificates.json"] {
        assert!(dir.path().join("demo").join(f).exists(), "{f}");
    }
    let verify = tuniv(&["verify", "--series", "demo/series.json", "--report", "v.json"], dir.path());
    assert_eq!(verify.status.code(), Some(0));
}
