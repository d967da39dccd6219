use std::path::Path;
use std::process::Command;

fn islr(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_islr")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn small_dataset(dir: &Path) -> String {
    let d = dir.join("d");
    let d = d.to_str().unwrap().to_string();
    islr(&[
        "synth", "--out", &d, "--classes", "3", "--per-class", "10", "--intermediate-per-class", "10", "--gestures",
        "2", "--frame-takes", "0", "--tuple-takes", "4",
    ]);
    d
}

#[test]
fn self_test_with_one_neighbour_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let d = small_dataset(dir.path());
    let out = islr(&["evaluate-poses", "--data", &d, "--self-test", "--set", "k=1"]);
    assert_eq!(out.lines().last(), Some("accuracy,1.000"));
}

#[test]
fn sweep_reports_every_grid_in_the_set() {
    let dir = tempfile::tempdir().unwrap();
    let d = small_dataset(dir.path());
    let out = islr(&["sweep-grid", "--data", &d]);
    let csv = out.split_once("grid,accuracy\n").unwrap().1;
    let grids: Vec<&str> = csv.lines().filter_map(|l| l.split(',').next()).collect();
    assert_eq!(grids, ["5x5", "10x10", "10x15", "15x15", "15x20", "20x20"]);
}

#[test]
fn bad_override_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_islr"))
        .args(["sweep-grid", "--data", "/nonexistent", "--set", "k=0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
