use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn quadlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadlab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_two_faces() {
    let out = quadlab(&["enumerate", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "9");
}

#[test]
fn exhaustive_verify_passes() {
    let out = quadlab(&["verify", "--n", "3", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn random_verify_passes_in_both_modes() {
    for mode in ["exact-rejection", "free-shift"] {
        let out = quadlab(&["--seed", "5", "verify", "--n", "30", "--samples", "20", "--mode", mode]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
    }
}

#[test]
fn gh_of_a_space_with_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, "3\n1\n2 1\n").unwrap();
    let out = quadlab(&["gh", path(&a), path(&a)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim(), "0.0");
}

#[test]
fn sample_then_convert_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.txt");
    let map = dir.path().join("q.json");
    let back = dir.path().join("back.txt");
    assert!(quadlab(&["--seed", "9", "sample", "--n", "25", "--mode", "exact-rejection", "--what", "tree", "--out", path(&tree)]).status.success());
    assert!(quadlab(&["schaeffer", "forward", path(&tree), "--out", path(&map)]).status.success());
    assert!(quadlab(&["schaeffer", "reverse", path(&map), "--out", path(&back)]).status.success());
    assert_eq!(fs::read_to_string(&tree).unwrap(), fs::read_to_string(&back).unwrap());
}

#[test]
fn same_seed_same_output() {
    let a = quadlab(&["--seed", "3", "sample", "--n", "40", "--what", "map"]);
    let b = quadlab(&["--seed", "3", "sample", "--n", "40", "--what", "map"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(quadlab(&["enumerate"]).status.code(), Some(2));
    assert_eq!(quadlab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_two() {
    let out = quadlab(&["gh", "/nonexistent/a", "/nonexistent/b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bottleneck_found_exits_one() {
    let out = quadlab(&["loops", "--n", "10000", "--dumbbell", "--csv"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("n,seed,K"));
}
