use std::path::Path;
use std::process::{Command, Output};

fn densemap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densemap"))
        .args(args)
        .env_remove("DENSEMAP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn run_greedy(path: &Path, seed: &str) -> Output {
    densemap(&["greedy", "--seed", seed, "--steps", "100", "--policy", "enum", "--out", path.to_str().unwrap()])
}

#[test]
fn greedy_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let out = run_greedy(&path, "7");
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("100 steps"));
    let lines = std::fs::read_to_string(&path).unwrap().lines().count();
    assert_eq!(lines, 102);
    let out = densemap(&["check", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn traces_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(code(&run_greedy(&a, "11")), 0);
    assert_eq!(code(&run_greedy(&b, "11")), 0);
    assert_eq!(code(&run_greedy(&c, "12")), 0);
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn tampered_trace_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    assert_eq!(code(&run_greedy(&path, "7")), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let line = &lines[40];
    let start = line.find("\"q_assigned\":\"").unwrap() + "\"q_assigned\":\"".len();
    let end = start + line[start..].find('"').unwrap();
    lines[40] = format!("{}12345/7{}", &line[..start], &line[end..]);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let out = densemap(&["check", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&out), 5, "{}", stdout(&out));
}

#[test]
fn malformed_trace_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.jsonl");
    std::fs::write(&path, "not json\n").unwrap();
    assert_eq!(code(&densemap(&["check", "--in", path.to_str().unwrap()])), 3);
}

#[test]
fn out_dir_variable_applies_to_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_densemap"))
        .args(["greedy", "--seed", "3", "--steps", "20", "--out", "rel.jsonl"])
        .env("DENSEMAP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("rel.jsonl").is_file());
}

#[test]
fn small_commands() {
    let out = densemap(&["between", "1/2", "2/3"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "7/12"));
    let out = densemap(&["between", "0", "sqrt(2)"]);
    assert_eq!(stdout(&out).trim(), "1/2");
    let out = densemap(&["locate", "3/2"]);
    assert_eq!(stdout(&out).trim(), "4");
    let out = densemap(&["enumerate", "--count", "5"]);
    assert_eq!(stdout(&out), "index,rational\n0,1/1\n1,1/2\n2,2/1\n3,1/3\n4,3/2\n");
}

#[test]
fn cantor_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("family.json");
    std::fs::write(&path, r#"[["1/10","1/5"],["2/5","1/2"]]"#).unwrap();
    let out = densemap(&["cantor", "--intervals", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["point"], "1/2");
    assert_eq!(rows[1]["point"], "2/3");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&densemap(&["greedy", "--seed", "1", "--steps", "-1", "--out", "x"])), 2);
    assert_eq!(code(&densemap(&["frobnicate"])), 2);
    assert_eq!(code(&densemap(&["locate", "0"])), 3);
    assert_eq!(code(&densemap(&["between", "sqrt(2)", "1"])), 3);
    assert_eq!(code(&densemap(&["check", "--in", "/nonexistent/trace.jsonl"])), 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let out = densemap(&[
        "greedy", "--seed", "1", "--steps", "500", "--max-depth", "4", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 6);
}
