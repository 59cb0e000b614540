use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn subrule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subrule")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn classify_cantor() {
    let o = subrule(&["classify", "--rule", "cantor", "--levels", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: TreeLikeManyEnds"), "{}", stdout(&o));
}

#[test]
fn growth_of_quadrant_sphere() {
    let o = subrule(&["analyze", "growth", "--rule", "quadrant-sphere", "--levels", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let r = &v["report"];
    assert_eq!(r["exact"]["cumulative"], serde_json::json!({"kind": "polynomial", "degree": 3}));
    assert_eq!(r["empirical"]["kind"], "polynomial");
    assert_eq!(r["empirical"]["degree"], 3);
    assert_eq!(r["agree"], true);
    assert_eq!(v["config"]["levels"], 10);
}

#[test]
fn exit_codes() {
    assert_eq!(subrule(&["classify", "--rule", "ideal-point"]).status.code(), Some(0));
    // level 8 of the barycentric rule exceeds the default cell budget
    assert_eq!(subrule(&["classify", "--rule", "barycentric-2"]).status.code(), Some(2));
    assert_eq!(subrule(&["classify", "--rule", "barycentric-2", "--levels", "6"]).status.code(), Some(3));
    assert_eq!(subrule(&["classify", "--rule", "no-such-rule"]).status.code(), Some(1));
    assert_eq!(subrule(&["classify", "--rule", "cantor", "--levels", "0"]).status.code(), Some(1));
    assert_eq!(subrule(&["subdivide", "--rule", "cantor", "--budget", "40"]).status.code(), Some(2));
}

#[test]
fn flags_change_conditional_verdicts() {
    let o = subrule(&["classify", "--rule", "quadrant-annulus"]);
    assert_eq!(o.status.code(), Some(3));
    let o = subrule(&["classify", "--rule", "quadrant-annulus", "--qi-to-group"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: E2"));
    assert!(stdout(&o).contains("conditional on: qi_to_group"));
}

fn export(dir: &Path) {
    let o = subrule(&["corpus", "export", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn export_and_validate_files() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let list = json(&subrule(&["corpus", "list", "--format", "json"]));
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|m| m["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 8);
    for name in names {
        let rule = dir.path().join(format!("{name}.rule.json"));
        let complex = dir.path().join(format!("{name}.complex.json"));
        let o = subrule(&["validate", "--rule", rule.to_str().unwrap(), "--complex", complex.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o), "ok\n");
    }
    let rule = dir.path().join("two-point.rule.json");
    let complex = dir.path().join("two-point.complex.json");
    let from_files = subrule(&["subdivide", "--rule", rule.to_str().unwrap(), "--complex", complex.to_str().unwrap()]);
    assert_eq!(stdout(&from_files), stdout(&subrule(&["subdivide", "--rule", "two-point"])));
}

#[test]
fn validate_reports_ideal_closure_bug() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let good = fs::read_to_string(dir.path().join("cantor.rule.json")).unwrap();
    let bad = good.replacen(r#""local_id":"e","rank":1,"type":"B""#, r#""local_id":"e","rank":1,"type":"A""#, 1);
    assert_ne!(good, bad);
    let path = dir.path().join("bad.rule.json");
    fs::write(&path, bad).unwrap();
    let o = subrule(&["validate", "--rule", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("IdealClosureViolation"), "{}", stdout(&o));
    let o = subrule(&["classify", "--rule", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_file_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.rule.json");
    fs::write(&path, "{\"format_version\": ").unwrap();
    let o = subrule(&["validate", "--rule", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        for cmd in [&["classify", "--format", "json"][..], &["graph"][..], &["analyze", "ends", "--format", "dot"][..]]
        {
            let mut args = cmd.to_vec();
            args.extend(["--rule", "binary-circle", "--levels", "5", "--out", out]);
            assert_eq!(subrule(&args).status.code(), Some(0));
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["classification.json", "ends.dot", "graph.dot"]);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn graph_exports() {
    let o = subrule(&["graph", "--rule", "cantor", "--levels", "1"]);
    let dot = stdout(&o);
    assert!(dot.contains("graph"));
    let v = json(&subrule(&["graph", "--rule", "cantor", "--levels", "1", "--format", "json"]));
    // origin, 3 vertices at level 0, 6 at level 1
    assert_eq!(v["report"]["vertices"].as_array().unwrap().len(), 10);
}

#[test]
fn subdivide_writes_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = subrule(&["subdivide", "--rule", "cantor", "--levels", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for n in 0..=2 {
        assert!(dir.path().join(format!("level-{n}.complex.json")).exists());
    }
    assert!(stdout(&o).contains("level 2: 15 cells, 12 in the limit set"), "{}", stdout(&o));
}

#[test]
fn remaining_analyses_run() {
    for a in ["ends", "hyperbolicity", "delta"] {
        let o = subrule(&["analyze", a, "--rule", "binary-circle", "--levels", "5", "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{a}");
        assert_eq!(json(&o)["command"], format!("analyze {a}"));
    }
    let o = subrule(&["analyze", "ends", "--rule", "two-point", "--levels", "4"]);
    assert!(stdout(&o).contains("ends: two"));
}
