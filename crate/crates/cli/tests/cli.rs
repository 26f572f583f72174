use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn kpart(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpart")).current_dir(dir).args(args).output().unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const C4_PROBLEM: &str = r#"{"graph":{"n":4,"edges":[[0,1],[1,2],[2,3],[0,3]]},"terminals":[0,2],"sizes":[2,2]}"#;

#[test]
fn solve_c4_prints_partition_and_trace() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.json", C4_PROBLEM);
    let out = kpart(dir.path(), &["solve", "--problem", "p.json", "--trace", "t.jsonl", "--dot", "d.dot"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"parts\":[[0,1],[2,3]]}\n");

    let trace = std::fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 2);
    for line in trace.lines() {
        kpart::io::parse_trace_event(line).unwrap();
    }
    let dot = std::fs::read_to_string(dir.path().join("d.dot")).unwrap();
    assert!(dot.starts_with("graph"));
}

#[test]
fn solve_output_verifies() {
    let dir = TempDir::new().unwrap();
    let out = kpart(dir.path(), &["gen", "--family", "circulant", "--n", "11", "--param", "1,2", "-o", "g.json"]);
    assert_eq!(out.status.code(), Some(0));
    file(&dir, "p.json", r#"{"graph_path":"g.json","terminals":[0,3,5,9],"sizes":[2,4,3,2]}"#);
    let solved = kpart(dir.path(), &["solve", "--problem", "p.json"]);
    assert_eq!(solved.status.code(), Some(0));
    file(&dir, "part.json", &stdout(&solved));
    let verify = kpart(dir.path(), &["verify", "--problem", "p.json", "--partition", "part.json"]);
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(stdout(&verify), "{\"ok\":true,\"violations\":[]}\n");
}

#[test]
fn connectivity_on_path_prints_witness() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p3.json", r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    let out = kpart(dir.path(), &["connectivity", "--graph", "p3.json", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out), "{\"cut\":[1],\"side_a\":[0],\"side_b\":[2]}\n");

    let ok = kpart(dir.path(), &["connectivity", "--graph", "p3.json", "--k", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "{\"k_connected\":true}\n");
}

#[test]
fn verify_reports_disconnected_part() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.json", C4_PROBLEM);
    file(&dir, "bad.json", r#"{"parts":[[0,2],[1,3]]}"#);
    let out = kpart(dir.path(), &["verify", "--problem", "p.json", "--partition", "bad.json"]);
    assert_eq!(out.status.code(), Some(5));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["ok"], false);
    let codes: Vec<&str> = report["violations"].as_array().unwrap().iter().map(|v| v["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"CONNECTED"));
}

#[test]
fn solve_on_non_connected_input_certifies_cut() {
    let dir = TempDir::new().unwrap();
    // Two triangles sharing vertex 2.
    file(
        &dir,
        "p.json",
        r#"{"graph":{"n":5,"edges":[[0,1],[0,2],[1,2],[2,3],[2,4],[3,4]]},"terminals":[0,1],"sizes":[2,3]}"#,
    );
    let out = kpart(dir.path(), &["solve", "--problem", "p.json"]);
    assert_eq!(out.status.code(), Some(3));
    let w: kpart::CutWitness = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(w.cut.len(), 1);
    let g = kpart::io::parse_graph(r#"{"n":5,"edges":[[0,1],[0,2],[1,2],[2,3],[2,4],[3,4]]}"#).unwrap();
    w.check(&g).unwrap();
}

#[test]
fn oracle_agrees_and_reports_infeasible() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.json", C4_PROBLEM);
    let out = kpart(dir.path(), &["oracle", "--problem", "p.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"parts\":[[0,1],[2,3]]}\n");

    // Star with terminals on two leaves: part 0 cannot grow past its leaf
    // without taking the center from part 1.
    file(&dir, "star.json", r#"{"graph":{"n":4,"edges":[[0,1],[0,2],[0,3]]},"terminals":[1,2],"sizes":[2,2]}"#);
    let none = kpart(dir.path(), &["oracle", "--problem", "star.json"]);
    assert_eq!(none.status.code(), Some(5));
}

#[test]
fn single_terminal_problems() {
    let dir = TempDir::new().unwrap();
    file(&dir, "one.json", r#"{"graph":{"n":4,"edges":[[0,1],[1,2]]},"terminals":[2],"sizes":[3]}"#);
    let out = kpart(dir.path(), &["solve", "--problem", "one.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"parts\":[[0,1,2]]}\n");

    file(&dir, "short.json", r#"{"graph":{"n":4,"edges":[[0,1],[1,2]]},"terminals":[2],"sizes":[4]}"#);
    let cut = kpart(dir.path(), &["solve", "--problem", "short.json"]);
    assert_eq!(cut.status.code(), Some(3));
    assert_eq!(stdout(&cut), "{\"cut\":[],\"side_a\":[0,1,2],\"side_b\":[3]}\n");
}

#[test]
fn tiny_budget_stalls_with_trace_tail() {
    let dir = TempDir::new().unwrap();
    // Part 0 fills {0,2,3} first, leaving terminal 1 without a free
    // neighbor, so growing part 1 takes more than one move.
    let problem = r#"{"graph":{"n":5,"edges":[[0,2],[0,3],[0,4],[1,2],[1,3],[2,3],[2,4]]},"terminals":[0,1],"sizes":[3,2]}"#;
    file(&dir, "p.json", problem);
    let stalled = kpart(dir.path(), &["solve", "--problem", "p.json", "--budget", "1"]);
    assert_eq!(stalled.status.code(), Some(4));
    let tail = stdout(&stalled);
    assert!(!tail.is_empty());
    for line in tail.lines() {
        let event = kpart::io::parse_trace_event(line).unwrap();
        assert_eq!(event.augmentation, 2);
    }
    let full = kpart(dir.path(), &["solve", "--problem", "p.json"]);
    assert_eq!(full.status.code(), Some(0));
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    file(&dir, "loop.json", r#"{"n":3,"edges":[[1,1]]}"#);
    let out = kpart(dir.path(), &["connectivity", "--graph", "loop.json", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));

    file(&dir, "extra.json", r#"{"n":3,"edges":[],"weights":[]}"#);
    assert_eq!(kpart(dir.path(), &["connectivity", "--graph", "extra.json", "--k", "1"]).status.code(), Some(2));
    assert_eq!(kpart(dir.path(), &["solve", "--problem", "missing.json"]).status.code(), Some(2));
    assert_eq!(kpart(dir.path(), &["gen", "--family", "cycle", "--n", "2", "-o", "x.json"]).status.code(), Some(2));
    assert_eq!(kpart(dir.path(), &["gen", "--family", "random", "--n", "5", "-o", "x.json"]).status.code(), Some(2));
    assert_eq!(kpart(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gen_random_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["gen", "--family", "random", "--n", "14", "--param", "0.4", "--k", "3", "--seed", "9", "-o"];
    let a = kpart(dir.path(), &[&args[..], &["a.json"]].concat());
    let b = kpart(dir.path(), &[&args[..], &["b.json"]].concat());
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    let ga = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    assert_eq!(ga, std::fs::read_to_string(dir.path().join("b.json")).unwrap());
    let conn = kpart(dir.path(), &["connectivity", "--graph", "a.json", "--k", "3"]);
    assert_eq!(conn.status.code(), Some(0));

    let h = kpart(dir.path(), &["gen", "--family", "hypercube", "--param", "3", "-o", "h.json"]);
    assert_eq!(h.status.code(), Some(0));
    let g = kpart::io::parse_graph(&std::fs::read_to_string(dir.path().join("h.json")).unwrap()).unwrap();
    assert_eq!((g.n(), g.edge_count()), (8, 12));
}
