use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_bwqa");

fn core(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core").join(rel)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("bwqa-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn replay_of_fixture_exits_zero() {
    let out = Command::new(BIN).arg("replay").arg(core("fixtures/dialogue.jsonl")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("7 of 7 answers match"), "{stdout}");
}

#[test]
fn replay_mismatch_exits_two() {
    let text = std::fs::read_to_string(core("fixtures/dialogue.jsonl")).unwrap();
    let p = scratch("mismatch.jsonl", &text.replacen("two blocks", "three blocks", 1));
    let out = Command::new(BIN).arg("replay").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("MISMATCH"));
}

#[test]
fn replay_config_errors_exit_three() {
    let p = scratch("broken.jsonl", "{\"seq\":0\n");
    let out = Command::new(BIN).arg("replay").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
    let out = Command::new(BIN).args(["replay", "/nonexistent/t.jsonl"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(BIN).args(["repl", "--world", "/nonexistent/w.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn repl_moves_and_answers() {
    let mut child = Command::new(BIN)
        .args(["repl", "--sim-clock", "--world"])
        .arg(core("data/worlds/logo-row.json"))
        .arg("--trees")
        .arg(core("data"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let script = ":move Toyota 0.08 -0.6 0.225\n:wait 180\nWhen did I move the Toyota block?\n:scene 1\n:quit\n";
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("You moved the Toyota block three minutes ago."), "{stdout}");
    assert!(stdout.contains("Toyota: (-0.24, -0.6, 0.075)"), "{stdout}");
}
