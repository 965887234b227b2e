use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_positional"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn run_writes_transcripts_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "kind = \"tree-embed\"\nseeds = 5\nbreakers = [\"random\"]\n[tree]\nshape = \"spider\"\nlegs = 10\nleg_len = 2\n");
    let out = dir.path().join("out");
    let st = bin().arg("run").arg(&cfg).env("POSITIONAL_OUT_DIR", &out).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let jsonl = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "jsonl")).count();
    assert_eq!(jsonl, 5);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(summary.starts_with("kind,maker,breaker,seed,outcome,maker_moves"));
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "kind = \"tree-embed\"\nseeds = 1\nbogus = 3\n[tree]\nshape = \"path\"\nn = 10\n");
    let st = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("bogus"));
    let cfg = write(dir.path(), "d.toml", "kind = \"matching\"\nseeds = 1\nbreakers = [\"nobody\"]\n[matching]\nr = 4\n");
    let st = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn audit_flags_corruption_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let st = bin().args(["run"]).arg(configs().join("matching.toml")).arg("--out-dir").arg(&out).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let first = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .min()
        .unwrap();
    let st = bin().arg("audit").arg(&first).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).starts_with("PASS"));

    let text = fs::read_to_string(&first).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // move 5 (a Breaker move) re-claims what Maker took on move 0
    lines[6] = copy_elements(&lines[1], &lines[6]);
    let bad = write(dir.path(), "bad.jsonl", &(lines.join("\n") + "\n"));
    let st = bin().arg("audit").arg(&bad).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&st.stdout).to_string();
    assert!(stdout.contains("FAIL replay (first violation at 5"), "{stdout}");

    let garbled = write(dir.path(), "garbled.jsonl", &text.replacen("\"record\":\"move\"", "\"record\":\"mvoe\"", 1));
    let st = bin().arg("audit").arg(&garbled).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("line 2"));
}

/// `into` with its claimed elements replaced by those of `from`.
fn copy_elements(from: &str, into: &str) -> String {
    let field = |line: &str| -> String {
        let start = line.find("\"elements\":").unwrap();
        let end = start + line[start..].find(']').unwrap() + 1;
        line[start..end].to_string()
    };
    into.replacen(&field(into), &field(from), 1)
}

#[test]
fn box_config_emits_csv_traces() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().arg("run").arg(configs().join("box.toml")).arg("--out-dir").arg(dir.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let csv = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && !p.ends_with("summary.csv"))
        .count();
    assert_eq!(csv, 7 * 3);
}

#[test]
fn shipped_configs_run_clean() {
    for name in ["tree_path.toml", "triangle.toml", "hypergraph.toml", "hampath.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let st = bin().arg("run").arg(configs().join(name)).arg("--out-dir").arg(dir.path()).output().unwrap();
        assert_eq!(st.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&st.stderr));
    }
}

#[test]
fn solve_and_beck() {
    let h = configs().join("k4_triangles.txt");
    let st = bin().arg("solve").arg(&h).args(["--bias", "1:1", "--first", "maker"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let out = String::from_utf8_lossy(&st.stdout).to_string();
    assert!(out.starts_with("winner: "), "{out}");
    let st = bin().arg("beck").arg(&h).args(["--bias", "1:2"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).contains("beck sum: "));
    let st = bin().arg("solve").arg(&h).args(["--bias", "0:1"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn play_session_with_passes_audits_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", "kind = \"tree-embed\"\nseeds = 1\n[tree]\nshape = \"path\"\nn = 12\n");
    let mut child = bin()
        .arg("play")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"0 1\n\n\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("round 1:"), "{text}");
    let saved = text.lines().find_map(|l| l.strip_prefix("transcript saved to ")).unwrap().to_string();
    let st = bin().arg("audit").arg(saved).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));
}
