//! Batch runs: one transcript per (seed, matchup), a summary CSV, and
//! weight-trace CSVs for box-game runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::adversary::{breaker_by_name, LowestFree, MinimaxBreaker, MinimaxMaker, NullBreaker, RandomPlayer, TriangleGreedyMaker};
use crate::board::Board;
use crate::boxgame::{adversary_by_name, play_rbox, BoxMode, BoxTrace};
use crate::error::{Error, Result};
use crate::game::{run_game, GameSetup, GameState, GameStatus, Side, Strategy, WinRule};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::oracle::checks::{triangle_factor, verify_tree_copy};
use crate::parallel::SoloMaker;
use crate::potential::PotentialBreaker;
use crate::rng::{stream_rng, streams};
use crate::subgames::{BipartiteBoard, HamPathMaker, HamconMaker, MatchingMaker};
use crate::transcript::{Outcome, Transcript};
use crate::tree::{TreeEmbedMaker, TreeSpec};

use super::config::{ExperimentConfig, GameKind, TreeSection, TreeShape};

/// The Maker side of a prepared game, kept typed so the final state can
/// be summarised after play.
pub enum MakerBox {
    Tree(Box<TreeEmbedMaker>),
    Matching(SoloMaker<MatchingMaker>),
    Hamcon(SoloMaker<HamconMaker>),
    Hampath(SoloMaker<HamPathMaker>),
    Other(Box<dyn Strategy>),
}

impl MakerBox {
    pub fn strategy(&mut self) -> &mut dyn Strategy {
        match self {
            MakerBox::Tree(m) => m.as_mut(),
            MakerBox::Matching(m) => m,
            MakerBox::Hamcon(m) => m,
            MakerBox::Hampath(m) => m,
            MakerBox::Other(m) => m.as_mut(),
        }
    }

    /// Final-state facts recorded in the transcript report for the auditor.
    pub fn finale(&self, state: &GameState) -> Value {
        match self {
            MakerBox::Tree(m) => {
                let host = Graph::from_edges(state.vertex_count().unwrap_or(0), &state.maker_edges());
                let verified = m.embedding().is_total().then(|| verify_tree_copy(m.tree(), &host, m.embedding().map()).unwrap_or(false));
                json!({ "embedding": m.embedding().map(), "verified": verified })
            }
            MakerBox::Matching(m) => json!({ "matching": m.inner.matching(state) }),
            MakerBox::Hamcon(m) => json!({ "success": m.inner.success(state) }),
            MakerBox::Hampath(m) => json!({ "path": m.inner.path(state), "endpoints": m.inner.endpoints() }),
            MakerBox::Other(_) => Value::Null,
        }
    }
}

/// How a prepared game decides a Maker win.
pub enum Rule {
    Declared,
    Hypergraph(Hypergraph),
    TriangleFactor,
}

pub fn triangle_status(state: &GameState) -> GameStatus {
    let g = Graph::from_edges(state.vertex_count().unwrap_or(0), &state.maker_edges());
    if triangle_factor(&g).is_some() {
        GameStatus::MakerWin
    } else if state.free_count() == 0 {
        GameStatus::BreakerWin
    } else {
        GameStatus::Undecided
    }
}

pub struct Prepared {
    pub board: Arc<Board>,
    pub maker: MakerBox,
    pub rule: Rule,
    pub extra: Value,
}

pub fn build_tree(t: &TreeSection, base: &ExperimentConfig, seed: u64) -> Result<TreeSpec> {
    let need = |x: Option<usize>, what: &str| x.ok_or_else(|| Error::Config(format!("tree.{what} missing")));
    let mut rng = stream_rng(seed, streams::TREE);
    match t.shape {
        TreeShape::Path => TreeSpec::path(need(t.n, "n")?),
        TreeShape::Star => TreeSpec::star(need(t.n, "n")?),
        TreeShape::Spider => TreeSpec::spider(need(t.legs, "legs")?, need(t.leg_len, "leg_len")?),
        TreeShape::Caterpillar => TreeSpec::caterpillar(need(t.spine, "spine")?),
        TreeShape::Broom => TreeSpec::broom(need(t.support, "support")?, need(t.leaves_each, "leaves_each")?),
        TreeShape::DoubleStar => TreeSpec::double_star(need(t.leaves_each, "leaves_each")?),
        TreeShape::HTree => TreeSpec::h_tree(need(t.leg_len, "leg_len")?),
        TreeShape::TwinBar => TreeSpec::twin_bar(need(t.bar_len, "bar_len")?),
        TreeShape::Random => TreeSpec::random_prufer(need(t.n, "n")?, &mut rng),
        TreeShape::RandomBounded => TreeSpec::random_bounded(need(t.n, "n")?, need(t.max_degree, "max_degree")?, &mut rng),
        TreeShape::File => {
            let path = base.resolve(t.file.as_ref().ok_or_else(|| Error::Config("tree.file missing".into()))?);
            TreeSpec::parse(&fs::read_to_string(&path)?)
        }
    }
}

fn load_hypergraph(cfg: &ExperimentConfig) -> Result<Hypergraph> {
    let h = cfg.hypergraph.as_ref().ok_or_else(|| Error::Config("[hypergraph] missing".into()))?;
    Hypergraph::parse(&fs::read_to_string(cfg.resolve(&h.file))?)
}

/// Board, Maker and win rule for one seed.
pub fn prepare(cfg: &ExperimentConfig, maker: &str, seed: u64) -> Result<Prepared> {
    let bias = cfg.bias()?;
    let q = bias.q;
    let sub = |what: &str| Error::Config(format!("[{what}] missing"));
    match cfg.kind {
        GameKind::TreeEmbed => {
            let tree = build_tree(cfg.tree.as_ref().ok_or_else(|| sub("tree"))?, cfg, seed)?;
            let n = tree.n();
            let board = Arc::new(Board::complete(n)?);
            let m = TreeEmbedMaker::new(tree, n, q, cfg.thresholds(), seed)?;
            Ok(Prepared { board, maker: MakerBox::Tree(Box::new(m)), rule: Rule::Declared, extra: Value::Null })
        }
        GameKind::Matching => {
            let s = cfg.matching.as_ref().ok_or_else(|| sub("matching"))?;
            let board = Arc::new(Board::bipartite(s.r)?);
            let bb = BipartiteBoard::complete(&board, s.slack.unwrap_or(0))?;
            let m = MatchingMaker::new(bb, q, s.mode, s.cap, board.size())?;
            Ok(Prepared { board, maker: MakerBox::Matching(SoloMaker::new(m)), rule: Rule::Declared, extra: Value::Null })
        }
        GameKind::Hamcon => {
            let s = cfg.hamcon.as_ref().ok_or_else(|| sub("hamcon"))?;
            let board = Arc::new(Board::complete(s.k)?);
            let state = GameState::new(board.clone());
            let m = HamconMaker::new(&state, (0..s.k).collect(), None, q, s.params.clone(), seed)?;
            Ok(Prepared { board, maker: MakerBox::Hamcon(SoloMaker::new(m)), rule: Rule::Declared, extra: Value::Null })
        }
        GameKind::Hampath => {
            let s = cfg.hampath.as_ref().ok_or_else(|| sub("hampath"))?;
            let board = Arc::new(Board::complete(s.k)?);
            let state = GameState::new(board.clone());
            let m = HamPathMaker::new(&state, (0..s.k).collect(), 0, s.k - 1, q, s.params.clone(), seed)?;
            Ok(Prepared { board, maker: MakerBox::Hampath(SoloMaker::new(m)), rule: Rule::Declared, extra: Value::Null })
        }
        GameKind::Triangle => {
            let s = cfg.triangle.as_ref().ok_or_else(|| sub("triangle"))?;
            let board = Arc::new(Board::complete(s.n)?);
            let m: Box<dyn Strategy> = match maker {
                "triangle_greedy" => Box::new(TriangleGreedyMaker),
                "random" => Box::new(RandomPlayer::maker(seed)),
                "lowest_free" => Box::new(LowestFree(Side::Maker)),
                other => return Err(Error::Config(format!("unknown triangle maker `{other}`"))),
            };
            Ok(Prepared { board, maker: MakerBox::Other(m), rule: Rule::TriangleFactor, extra: Value::Null })
        }
        GameKind::CustomHypergraph => {
            let h = load_hypergraph(cfg)?;
            let board = Arc::new(Board::elements(h.board_size())?);
            let cap = cfg.hypergraph.as_ref().map_or(5_000_000, |s| s.node_cap);
            let m: Box<dyn Strategy> = match maker {
                "random" => Box::new(RandomPlayer::maker(seed)),
                "lowest_free" => Box::new(LowestFree(Side::Maker)),
                "minimax" => Box::new(MinimaxMaker::new(&h, bias, cap)?),
                other => return Err(Error::Config(format!("unknown hypergraph maker `{other}`"))),
            };
            let extra = json!({ "hypergraph": h.to_text() });
            Ok(Prepared { board, maker: MakerBox::Other(m), rule: Rule::Hypergraph(h), extra })
        }
        GameKind::Box => Err(Error::Config("box runs have no Maker-Breaker board".into())),
    }
}

pub fn make_breaker(cfg: &ExperimentConfig, rule: &Rule, name: &str, seed: u64) -> Result<Box<dyn Strategy>> {
    if let Rule::Hypergraph(h) = rule {
        let bias = cfg.bias()?;
        let cap = cfg.hypergraph.as_ref().map_or(5_000_000, |s| s.node_cap);
        return Ok(match name {
            "potential" => Box::new(PotentialBreaker::new(h, bias)?),
            "minimax" => Box::new(MinimaxBreaker::new(h, bias, cap)?),
            "null" => Box::new(NullBreaker),
            _ => breaker_by_name(name, seed)?,
        });
    }
    breaker_by_name(name, seed)
}

/// Plays one prepared game against `breaker`; the transcript's report
/// carries the Maker's final-state summary under `final`.
pub fn play_prepared(cfg: &ExperimentConfig, prepared: &mut Prepared, breaker: &mut dyn Strategy, seed: u64) -> Result<(Transcript, GameState)> {
    let bias = cfg.bias()?;
    let cap = cfg.move_cap.unwrap_or(4 * prepared.board.size() + 16);
    // the output location is not part of the game; leaving it out keeps
    // transcripts of identical runs byte-identical wherever they are written
    let mut echoed = serde_json::to_value(cfg).expect("serialize");
    if let Value::Object(map) = &mut echoed {
        map.remove("out_dir");
    }
    let mut setup_params = json!({ "config": echoed });
    if !prepared.extra.is_null() {
        setup_params["extra"] = prepared.extra.clone();
    }
    let setup = GameSetup::new(cfg.kind.label(), bias, cfg.first()?, seed).with_cap(cap).with_params(setup_params);
    let tri = triangle_status;
    let rule = match &prepared.rule {
        Rule::Declared => WinRule::MakerDeclared,
        Rule::Hypergraph(h) => WinRule::Hypergraph(h),
        Rule::TriangleFactor => WinRule::Predicate(&tri),
    };
    let (mut t, state) = run_game(prepared.board.clone(), &setup, prepared.maker.strategy(), breaker, &rule);
    if let Value::Object(map) = &mut t.report {
        map.insert("final".into(), prepared.maker.finale(&state));
    }
    Ok((t, state))
}

/// One game, in memory.
pub fn play_one(cfg: &ExperimentConfig, maker: &str, breaker: &str, seed: u64) -> Result<(Transcript, GameState)> {
    let mut p = prepare(cfg, maker, seed)?;
    let mut b = make_breaker(cfg, &p.rule, breaker, seed)?;
    play_prepared(cfg, &mut p, b.as_mut(), seed)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SummaryRow {
    pub kind: String,
    pub maker: String,
    pub breaker: String,
    pub seed: u64,
    pub outcome: String,
    pub maker_moves: usize,
    pub breaker_moves: usize,
    pub forfeit_reason: String,
    pub guards_held: String,
    pub guards: String,
    pub bounds: String,
    pub file: String,
}

fn collect_guards(v: &Value, out: &mut Vec<(String, bool)>, prefix: &str) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                if k == "guards" {
                    if let Value::Object(g) = x {
                        for (gk, gv) in g {
                            if let Value::Bool(b) = gv {
                                out.push((format!("{p}.{gk}"), *b));
                            }
                        }
                    }
                } else {
                    collect_guards(x, out, &p);
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                collect_guards(x, out, &format!("{prefix}[{i}]"));
            }
        }
        _ => {}
    }
}

/// Every boolean under a `guards` key of the Maker's params.
pub fn guard_flags(t: &Transcript) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    collect_guards(&t.params["maker"], &mut out, "");
    out
}

fn bounds_of(t: &Transcript) -> Value {
    let r = &t.report["maker"];
    let mut b = serde_json::Map::new();
    for key in ["moves", "move_bound", "move_bound_exceeded"] {
        if !r[key].is_null() {
            b.insert(key.into(), r[key].clone());
        }
    }
    let pipe = &r["pipeline"];
    if !pipe.is_null() {
        if !pipe["danger_bound"].is_null() {
            b.insert("danger_bound".into(), pipe["danger_bound"].clone());
            b.insert("ever_dangerous".into(), pipe["audit"]["ever_dangerous"].clone());
        }
        let par = &pipe["parallel"];
        if !par.is_null() {
            b.insert("between_visit_bound".into(), par["describe"]["between_visit_bound"].clone());
            b.insert("max_between_visits".into(), par["summary"]["max_between_visits"].clone());
        }
    }
    Value::Object(b)
}

pub fn summary_row(t: &Transcript, file: &str) -> SummaryRow {
    let guards = guard_flags(t);
    let forfeit_reason = match &t.outcome {
        Outcome::Forfeit { side, reason } => format!("{side}: {reason}"),
        _ => String::new(),
    };
    SummaryRow {
        kind: t.kind.clone(),
        maker: t.maker.clone(),
        breaker: t.breaker.clone(),
        seed: t.seed,
        outcome: t.outcome.label().to_string(),
        maker_moves: t.maker_moves(),
        breaker_moves: t.breaker_moves(),
        forfeit_reason,
        guards_held: if guards.is_empty() { String::new() } else { guards.iter().all(|g| g.1).to_string() },
        guards: serde_json::to_string(&guards.iter().map(|(k, v)| (k.clone(), *v)).collect::<std::collections::BTreeMap<_, _>>())
            .expect("serialize"),
        bounds: serde_json::to_string(&bounds_of(t)).expect("serialize"),
        file: file.to_string(),
    }
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub rows: Vec<SummaryRow>,
    pub transcripts: Vec<PathBuf>,
    pub traces: Vec<PathBuf>,
}

/// Box-game record, one JSON object per line: a header, one line per
/// round (weights after BoxMaker's move, reset box), a footer.
pub fn box_jsonl(trace: &BoxTrace, seed: u64, rounds: usize) -> String {
    let mut out = String::new();
    let q = match trace.mode {
        BoxMode::Integral { q } => Some(q),
        BoxMode::Continuous => None,
    };
    let header = json!({
        "record": "box_header",
        "format_version": crate::transcript::FORMAT_VERSION,
        "kind": "box",
        "m": trace.m,
        "q": q,
        "rounds": rounds,
        "adversary": trace.adversary,
        "seed": seed,
    });
    out.push_str(&header.to_string());
    out.push('\n');
    for r in &trace.rounds {
        out.push_str(&json!({ "record": "round", "round": r.round, "weights": r.weights, "reset": r.reset }).to_string());
        out.push('\n');
    }
    let footer = json!({
        "record": "box_footer",
        "max_weight": trace.max_weight,
        "max_phi_increment": trace.max_phi_increment,
        "violations": trace.violations,
        "forfeit": trace.forfeit,
    });
    out.push_str(&footer.to_string());
    out.push('\n');
    out
}

fn run_box(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput> {
    let s = cfg.boxes.as_ref().ok_or_else(|| Error::Config("[box] missing".into()))?;
    let mode = match s.q {
        Some(q) => BoxMode::Integral { q },
        None => BoxMode::Continuous,
    };
    let mut out = RunOutput { out_dir: out_dir.to_path_buf(), rows: Vec::new(), transcripts: Vec::new(), traces: Vec::new() };
    for adv_name in &s.adversaries {
        for seed in cfg.seed_values() {
            let mut adv = adversary_by_name(adv_name, seed)?;
            let trace = play_rbox(s.m, mode, s.rounds, adv.as_mut(), true)?;
            let stem = format!("box__{}__s{seed}", slug(adv_name));
            let csv_path = out_dir.join(format!("{stem}.csv"));
            write_atomic(&csv_path, trace.to_csv().as_bytes())?;
            let jsonl_path = out_dir.join(format!("{stem}.jsonl"));
            write_atomic(&jsonl_path, box_jsonl(&trace, seed, s.rounds).as_bytes())?;
            let outcome = if trace.forfeit.is_some() {
                "forfeit"
            } else if trace.violations.is_empty() {
                "within_bound"
            } else {
                "violation"
            };
            let bound = crate::boxgame::continuous_bound(s.m, s.rounds);
            out.rows.push(SummaryRow {
                kind: "box".into(),
                maker: adv_name.clone(),
                breaker: "max_weight_reset".into(),
                seed,
                outcome: outcome.into(),
                maker_moves: trace.rounds.len(),
                breaker_moves: trace.rounds.len(),
                forfeit_reason: trace.forfeit.clone().unwrap_or_default(),
                guards_held: String::new(),
                guards: "{}".into(),
                bounds: json!({
                    "max_weight": trace.max_weight,
                    "weight_bound": bound,
                    "max_phi_increment": trace.max_phi_increment,
                    "violations": trace.violations.len(),
                })
                .to_string(),
                file: format!("{stem}.jsonl"),
            });
            out.transcripts.push(jsonl_path);
            out.traces.push(csv_path);
        }
    }
    Ok(out)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write_atomic(path, &bytes)
}

/// Runs every (maker, breaker, seed) of the config and writes transcripts,
/// `summary.csv` and `config.json` (the config with defaults filled in).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let out_dir = cfg.output_dir();
    fs::create_dir_all(&out_dir)?;
    write_atomic(&out_dir.join("config.json"), serde_json::to_string_pretty(cfg).expect("serialize").as_bytes())?;
    let out = if cfg.kind == GameKind::Box {
        run_box(cfg, &out_dir)?
    } else {
        let mut out = RunOutput { out_dir: out_dir.clone(), rows: Vec::new(), transcripts: Vec::new(), traces: Vec::new() };
        for maker in cfg.maker_names() {
            for breaker in &cfg.breakers {
                for seed in cfg.seed_values() {
                    let (t, _) = play_one(cfg, &maker, breaker, seed)?;
                    let name = format!("{}__{}__{}__s{seed}.jsonl", slug(cfg.kind.label()), slug(&maker), slug(breaker));
                    let path = out_dir.join(&name);
                    write_atomic(&path, t.to_jsonl().as_bytes())?;
                    out.rows.push(summary_row(&t, &name));
                    out.transcripts.push(path);
                }
            }
        }
        out
    };
    write_summary(&out_dir.join("summary.csv"), &out.rows)?;
    Ok(out)
}
