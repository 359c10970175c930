use std::path::Path;
use std::process::{Command, Output};

fn reflex(args: &[&str], config_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reflex"));
    cmd.args(args).env_remove("REFLEX_CONFIG");
    if let Some(p) = config_env {
        cmd.env("REFLEX_CONFIG", p);
    }
    cmd.output().expect("run reflex")
}

fn code(args: &[&str]) -> Option<i32> {
    reflex(args, None).status.code()
}

#[test]
fn grasp_exit_codes() {
    let nominal = [
        "grasp",
        "--controller",
        "full",
        "--object",
        "0.30,0,0.0325",
        "--target",
        "0.30,0",
        "--seed",
        "7",
    ];
    assert_eq!(code(&nominal), Some(0));
    assert_eq!(code(&["grasp", "--controller", "baseline"]), Some(1));
    assert_eq!(code(&["grasp", "--controller", "psychic"]), Some(2));
    assert_eq!(code(&["grasp", "--object", "0.3,0"]), Some(2));
    assert_eq!(code(&["grasp", "--object", "0.3,0,-0.01"]), Some(2));
}

#[test]
fn grasp_writes_log_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    let rec = dir.path().join("rec.csv");
    let out = reflex(
        &[
            "grasp",
            "--object",
            "0.30,0,0.0325",
            "--log",
            log.to_str().unwrap(),
            "--record",
            rec.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    let log = std::fs::read_to_string(log).unwrap();
    assert!(log.lines().count() > 100);
    assert!(log.contains("APPROACH") && log.contains("TRANSPORT"));
    let rec = std::fs::read_to_string(rec).unwrap();
    assert_eq!(rec.lines().count(), 2);
    assert!(rec.contains("SUCCEEDED"));
}

#[test]
fn sweep_rejects_zero_pitch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    assert_eq!(
        code(&["sweep", "--pitch", "0", "--out-dir", out.to_str().unwrap()]),
        Some(2)
    );
}

#[test]
fn sweep_writes_outputs_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = reflex(
        &["sweep", "--pitch", "0.1", "--svg", "--out-dir", out.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    for name in [
        "trials.csv",
        "grid.csv",
        "areas.csv",
        "summary.txt",
        "timing.txt",
        "success_map.svg",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("11250"));
    assert!(
        !summary.contains("real-time"),
        "wall-clock numbers leaked into the summary"
    );
}

#[test]
fn clutter_with_no_episodes_writes_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    assert_eq!(
        code(&["clutter", "--episodes", "0", "--out-dir", out.to_str().unwrap()]),
        Some(0)
    );
    let table = std::fs::read_to_string(out.join("table.csv")).unwrap();
    assert_eq!(table.trim(), "controller,class,trials,successes,rate");
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "d_near = 0.2\nd_far = 0.1\n").unwrap();
    let out = reflex(&["grasp", "--object", "0.30,0,0.0325"], Some(&bad));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "k_sideways = 3.0\n").unwrap();
    assert_eq!(reflex(&["grasp"], Some(&unknown)).status.code(), Some(2));

    let good = dir.path().join("good.toml");
    std::fs::write(&good, "t_fail = 3.0\nr_power = 0.03\n").unwrap();
    assert_eq!(
        reflex(&["grasp", "--object", "0.30,0,0.0325"], Some(&good))
            .status
            .code(),
        Some(0)
    );

    // An explicit flag wins over the environment.
    let out = reflex(
        &["--config", good.to_str().unwrap(), "grasp", "--object", "0.30,0,0.0325"],
        Some(&bad),
    );
    assert_eq!(out.status.code(), Some(0));
}
