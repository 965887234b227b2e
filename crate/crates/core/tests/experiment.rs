use std::fs;

use positional::experiment::audit::audit_text;
use positional::experiment::{audit_path, run_experiment, ExperimentConfig};

fn config(dir: &std::path::Path, body: &str) -> ExperimentConfig {
    let text = format!("out_dir = {:?}\n{body}", dir.display().to_string());
    ExperimentConfig::from_toml(&text).unwrap()
}

fn closure(body: &str, expected_rows: usize) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), body);
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.rows.len(), expected_rows);
    for p in &out.transcripts {
        let r = audit_path(p).unwrap();
        assert!(r.passed(), "{}", r.render());
    }
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), expected_rows + 1);
}

#[test]
fn tree_runs_audit_clean() {
    closure(
        "kind = \"tree-embed\"\nseeds = 3\nbreakers = [\"random\", \"max_degree\", \"isolator\"]\n[tree]\nshape = \"spider\"\nlegs = 20\nleg_len = 2\n",
        9,
    );
    closure("kind = \"tree-embed\"\nseeds = 2\nbreakers = [\"random\", \"null\"]\n[tree]\nshape = \"path\"\nn = 50\n", 4);
    closure("kind = \"tree-embed\"\nseeds = 2\nbreakers = [\"random\"]\n[tree]\nshape = \"h_tree\"\nleg_len = 12\n", 2);
}

#[test]
fn subgame_runs_audit_clean() {
    closure("kind = \"matching\"\nseeds = 3\nbreakers = [\"random\", \"max_degree\"]\n[matching]\nr = 8\n", 6);
    closure("kind = \"hampath\"\nseeds = 2\nbreakers = [\"random\"]\n[hampath]\nk = 12\n", 2);
    closure("kind = \"hamcon\"\nseeds = 2\nbreakers = [\"random\"]\n[hamcon]\nk = 8\n", 2);
}

#[test]
fn triangle_and_box_runs_audit_clean() {
    closure(
        "kind = \"triangle\"\nseeds = 3\nmakers = [\"triangle_greedy\", \"random\"]\nbreakers = [\"triangle_delayer\"]\n[triangle]\nn = 9\n",
        6,
    );
    closure("kind = \"box\"\nseeds = 2\n[box]\nm = 5\nrounds = 40\nadversaries = [\"uniform\", \"potential_greedy\"]\n", 4);
    closure("kind = \"box\"\nseeds = 1\n[box]\nm = 4\nq = 3\nrounds = 30\n", 7);
}

#[test]
fn hypergraph_runs_audit_clean() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    fs::write(&h, "6\n0 1\n2 3\n4 5\n").unwrap();
    let cfg = config(
        &dir.path().join("out"),
        &format!("kind = \"custom-hypergraph\"\nseeds = 2\nmakers = [\"minimax\", \"random\"]\nbreakers = [\"potential\", \"minimax\"]\n[hypergraph]\nfile = {:?}\n", h.display().to_string()),
    );
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.rows.len(), 8);
    for p in &out.transcripts {
        let r = audit_path(p).unwrap();
        assert!(r.passed(), "{}", r.render());
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let body = "kind = \"tree-embed\"\nseeds = 2\nbreakers = [\"random\"]\n[tree]\nshape = \"random_bounded\"\nn = 40\nmax_degree = 4\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(&config(a.path(), body)).unwrap();
    let rb = run_experiment(&config(b.path(), body)).unwrap();
    for (x, y) in ra.transcripts.iter().zip(&rb.transcripts) {
        assert_eq!(fs::read_to_string(x).unwrap(), fs::read_to_string(y).unwrap());
    }
}

#[test]
fn duplicate_claim_is_flagged_at_its_move() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "kind = \"tree-embed\"\nseeds = 1\nbreakers = [\"random\"]\n[tree]\nshape = \"path\"\nn = 20\n");
    let out = run_experiment(&cfg).unwrap();
    let text = fs::read_to_string(&out.transcripts[0]).unwrap();
    let mut lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // lines[0] is the header; move i sits on line i + 1
    let first = lines[1]["elements"].clone();
    lines[4]["elements"] = first;
    let corrupt: String = lines.iter().map(|v| format!("{v}\n")).collect();
    let r = audit_text(&corrupt, "corrupt").unwrap();
    let bad = r.first_failure().unwrap();
    assert_eq!(bad.name, "replay");
    assert_eq!(bad.first_violation, Some(3));
}

#[test]
fn garbage_line_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "kind = \"matching\"\nseeds = 1\n[matching]\nr = 4\n");
    let out = run_experiment(&cfg).unwrap();
    let text = fs::read_to_string(&out.transcripts[0]).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = "{not json";
    let err = audit_text(&lines.join("\n"), "x").unwrap_err();
    assert!(matches!(err, positional::Error::Parse { line: 3, .. }), "{err}");
}

#[test]
fn forfeit_audit_reports_reason_and_guards() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "kind = \"tree-embed\"\nseeds = 4\nbias = \"1:3\"\nbreakers = [\"max_degree\"]\n[tree]\nshape = \"spider\"\nlegs = 20\nleg_len = 2\n",
    );
    let out = run_experiment(&cfg).unwrap();
    let mut saw = false;
    for p in &out.transcripts {
        let r = audit_path(p).unwrap();
        assert!(r.passed(), "{}", r.render());
        if let Some(reason) = &r.forfeit {
            saw = true;
            assert!(!reason.is_empty());
            assert!(!r.guards.is_empty());
            assert!(r.render().contains("guards:"));
        }
    }
    assert!(saw, "expected at least one forfeit at bias 1:3");
}

#[test]
fn passing_human_matches_null_breaker() {
    use positional::experiment::{play_one, play_session};
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "kind = \"tree-embed\"\nseeds = 1\nbreakers = [\"null\"]\n[tree]\nshape = \"spider\"\nlegs = 8\nleg_len = 2\n");
    let input = "\n".repeat(200);
    let mut out = Vec::new();
    let (human, path) = play_session(&cfg, &mut input.as_bytes(), &mut out).unwrap();
    let (null, _) = play_one(&cfg, &cfg.maker_names()[0], "null", cfg.seed_values()[0]).unwrap();
    let maker = |t: &positional::Transcript| {
        t.moves.iter().filter(|m| m.player == positional::Side::Maker).map(|m| (m.elements.clone(), m.note.clone())).collect::<Vec<_>>()
    };
    assert_eq!(maker(&human), maker(&null));
    assert_eq!(human.outcome, null.outcome);
    assert!(audit_path(&path).unwrap().passed());
    assert!(String::from_utf8(out).unwrap().contains("round 1:"));
}

#[test]
fn owned_edge_reprompts() {
    use positional::experiment::play_session;
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "kind = \"triangle\"\nseeds = 1\nmakers = [\"lowest_free\"]\n[triangle]\nn = 6\n");
    // lowest_free Maker opens with 0-1; claiming it again must be refused
    let input = "0 1\n9 9\n2 3\n\n\n\n\n\n\n\n\n\n\n\n\n\n";
    let mut out = Vec::new();
    let (t, path) = play_session(&cfg, &mut input.as_bytes(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.matches("illegal move").count(), 2, "{text}");
    let b = &t.moves[1];
    assert_eq!(b.player, positional::Side::Breaker);
    assert_eq!(b.elements.len(), 1);
    assert!(audit_path(&path).unwrap().passed());
}

#[test]
fn summary_counts_match_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "kind = \"matching\"\nseeds = 4\nbreakers = [\"random\", \"isolator\"]\n[matching]\nr = 6\n");
    run_experiment(&cfg).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.deserialize::<std::collections::HashMap<String, String>>() {
        let rec = rec.unwrap();
        let t = positional::Transcript::from_jsonl(&fs::read_to_string(dir.path().join(&rec["file"])).unwrap()).unwrap();
        assert_eq!(rec["maker_moves"], t.maker_moves().to_string());
        assert_eq!(rec["breaker_moves"], t.breaker_moves().to_string());
        assert_eq!(rec["outcome"], t.outcome.label());
        assert_eq!(rec["seed"], t.seed.to_string());
        rows += 1;
    }
    assert_eq!(rows, 8);
}
