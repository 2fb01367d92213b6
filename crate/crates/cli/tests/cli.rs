use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stickkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stickkit"))
        .args(args)
        .current_dir(dir)
        .env("STICKKIT_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const C6: &str = "graph 6 bipartite
name 0 a1
name 1 b1
name 2 a2
name 3 b2
name 4 a3
name 5 b3
side 0 A
side 1 B
side 2 A
side 3 B
side 4 A
side 5 B
edge 0 1
edge 1 2
edge 2 3
edge 3 4
edge 4 5
edge 5 0
";

#[test]
fn recognize_verify_render() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c6.graph"), C6).unwrap();
    let out = stickkit(dir.path(), &["recognize", "--class", "stick", "c6.graph", "--svg", "c6.svg"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("yes"));
    assert!(dir.path().join("c6.geom.json").exists());
    let svg = fs::read_to_string(dir.path().join("c6.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 7);

    let out = stickkit(dir.path(), &["verify", "c6.graph", "c6.geom.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "match");

    let out = stickkit(dir.path(), &["render", "c6.geom.json", "-o", "again.svg"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("again.svg")).unwrap(), svg);
}

#[test]
fn verify_reports_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c6.graph"), C6).unwrap();
    assert_eq!(stickkit(dir.path(), &["recognize", "c6.graph"]).status.code(), Some(0));
    let fewer = C6.replace("edge 5 0\n", "");
    fs::write(dir.path().join("p6.graph"), fewer).unwrap();
    let out = stickkit(dir.path(), &["verify", "p6.graph", "c6.geom.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("spurious"));
}

#[test]
fn sat_reduction_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("one.cnf3"), "c one clause\np m1in3 3 1\n1 2 3 0\n").unwrap();
    let out = stickkit(
        dir.path(),
        &["reduce", "sat2stick", "one.cnf3", "-o", "one.graph", "--witness", "F T F", "--o-order", "order.txt"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("vertices 81"));
    let out = stickkit(dir.path(), &["decode", "one.graph", "one.registry.json", "order.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "F T F");

    let out = stickkit(dir.path(), &["reduce", "sat2stick", "one.cnf3", "-o", "one.graph", "--witness", "T T F"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_order_of_reduction_verifies() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("two.cnf3"), "p m1in3 4 2\n1 2 3 0\n2 3 4 0\n").unwrap();
    let out = stickkit(dir.path(), &["reduce", "sat2stick", "two.cnf3", "-o", "two.graph", "--witness", "T F F T"]);
    assert_eq!(out.status.code(), Some(0));
    let out = stickkit(dir.path(), &["decode", "two.graph", "two.registry.json", "two.order.txt"]);
    assert_eq!(stdout(&out).trim(), "T F F T");
    // the reversed order is not a representation
    let order = fs::read_to_string(dir.path().join("two.order.txt")).unwrap();
    let mut lines: Vec<&str> = order.lines().collect();
    lines.reverse();
    fs::write(dir.path().join("rev.txt"), lines.join("\n")).unwrap();
    let out = stickkit(dir.path(), &["decode", "two.graph", "two.registry.json", "rev.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn biphook_reduction_and_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c6.graph"), C6).unwrap();
    let out = stickkit(dir.path(), &["reduce", "stick2biphook", "c6.graph", "-o", "gamma.graph"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "vertices 24, edges 48");
    let out = stickkit(dir.path(), &["recognize", "--class", "biphook", "gamma.graph"]);
    assert_eq!(out.status.code(), Some(0));
    let out = stickkit(dir.path(), &["recognize", "--class", "mpt", "--budget", "2", "gamma.graph"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).trim(), "exhausted");
}

#[test]
fn gadget_check_quick_targets() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["handy", "forced-cycle", "four-cycle", "cycles"] {
        let out = stickkit(dir.path(), &["gadget-check", target, "--json", "r.json"]);
        assert_eq!(out.status.code(), Some(0), "{target}");
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
        assert!(json.as_array().unwrap().iter().all(|r| r["status"] == "verified"));
    }
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stickkit(dir.path(), &["recognize", "--frobnicate", "x"]).status.code(), Some(64));
    assert_eq!(stickkit(dir.path(), &["recognize", "--budget", "0", "x"]).status.code(), Some(64));
    assert_eq!(stickkit(dir.path(), &["gadget-check", "nothing"]).status.code(), Some(64));
    assert_eq!(stickkit(dir.path(), &["verify", "missing.graph", "g.json"]).status.code(), Some(66));
    fs::write(dir.path().join("bad.graph"), "graph x plain\n").unwrap();
    assert_eq!(stickkit(dir.path(), &["recognize", "bad.graph"]).status.code(), Some(65));
}
