use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontier-nav")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["bogus"]), 1);
    assert_eq!(code(&["gen-scenes", "--seed", "x", "--count", "1", "--out", "o"]), 1);
    assert_eq!(code(&["run", "--scene", "s.json", "--episode-seed", "1", "--replan", "n:0"]), 1);
    assert_eq!(code(&["bench", "--scenes", "d", "--out", "r.json", "--policies", "magic"]), 1);
    assert_eq!(code(&["gen-data", "--scenes", "d", "--out", "o", "--mixture", "chess=3"]), 1);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["bench", "--help"]), 0);
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing");
    assert_eq!(code(&["bench", "--scenes", missing.to_str().unwrap(), "--out", "r.json"]), 2);
    assert_eq!(code(&["run", "--scene", missing.to_str().unwrap(), "--episode-seed", "1"]), 2);
}

#[test]
fn run_writes_snapshots_and_a_result() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = dir.path().join("scenes");
    let snaps = dir.path().join("snaps");
    assert_eq!(code(&["gen-scenes", "--seed", "7", "--count", "1", "--out", scenes.to_str().unwrap()]), 0);
    let scene = std::fs::read_dir(&scenes).unwrap().next().unwrap().unwrap().path();
    let out = run(&[
        "run",
        "--scene",
        scene.to_str().unwrap(),
        "--episode-seed",
        "4",
        "--policy",
        "nearest",
        "--replan",
        "n:5",
        "--snapshot-dir",
        snaps.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let steps = result["steps"].as_u64().unwrap() as usize;
    let ppms = std::fs::read_dir(&snaps).unwrap().count();
    assert_eq!(ppms, steps);
    assert!(result["termination"].is_string());
}
