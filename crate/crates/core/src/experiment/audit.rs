//! Offline transcript auditor: replays a transcript from the empty board and
//! re-checks every invariant that applies to its game kind.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::board::ElementId;
use crate::boxgame::{cbox_breaker_reset, continuous_bound, potential_phi};
use crate::error::{Error, Result};
use crate::game::{winner_check, GameState, GameStatus, Side};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::oracle::checks::{is_hamilton_path, maximum_matching, triangle_factor, triangle_invariant_check, verify_tree_copy};
use crate::subgames::hamcon::maker_graph_done;
use crate::transcript::{replay_with, MoveRecord, Outcome, Transcript};
use crate::tree::case1::dangerous_set;
use crate::tree::{PartialEmbedding, TreeSpec, VertexStatus};

use super::runner::guard_flags;

/// Result of one invariant over the whole transcript.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Index (into the move list, or the round number for box traces) of
    /// the first violation.
    pub first_violation: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub source: String,
    pub kind: String,
    pub outcome: String,
    pub forfeit: Option<String>,
    pub guards: BTreeMap<String, bool>,
    pub checks: Vec<Check>,
    /// Observations that are reported but never fail the audit.
    pub flags: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} {} [{}] outcome={}", self.source, self.kind, self.outcome);
        if let Some(r) = &self.forfeit {
            let _ = writeln!(s, "  forfeit: {r}");
        }
        if !self.guards.is_empty() {
            let held: Vec<String> = self.guards.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  guards: {}", held.join(" "));
        }
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            match c.first_violation {
                Some(i) => {
                    let _ = writeln!(s, "  {mark} {} (first violation at {i}: {})", c.name, c.detail);
                }
                None if c.detail.is_empty() => {
                    let _ = writeln!(s, "  {mark} {}", c.name);
                }
                None => {
                    let _ = writeln!(s, "  {mark} {} ({})", c.name, c.detail);
                }
            }
        }
        for f in &self.flags {
            let _ = writeln!(s, "  note: {f}");
        }
        s
    }
}

/// Accumulates one invariant, keeping the first violation only.
struct Tracker {
    name: &'static str,
    first: Option<(usize, String)>,
    info: String,
}

impl Tracker {
    fn new(name: &'static str) -> Tracker {
        Tracker { name, first: None, info: String::new() }
    }

    fn fail(&mut self, at: usize, why: impl Into<String>) {
        if self.first.is_none() {
            self.first = Some((at, why.into()));
        }
    }

    fn ensure(&mut self, ok: bool, at: usize, why: impl FnOnce() -> String) {
        if !ok {
            self.fail(at, why());
        }
    }

    fn done(self) -> Check {
        match self.first {
            Some((i, d)) => Check { name: self.name.into(), passed: false, first_violation: Some(i), detail: d },
            None => Check { name: self.name.into(), passed: true, first_violation: None, detail: self.info },
        }
    }
}

fn kv<'a>(note: &'a str, key: &str) -> Option<&'a str> {
    note.split_whitespace().find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn embed_tokens(note: &str) -> Vec<std::result::Result<(usize, usize), String>> {
    note.split_whitespace()
        .filter_map(|tok| tok.strip_prefix("embed="))
        .map(|pair| {
            let (x, v) = pair.split_once(':').ok_or_else(|| format!("malformed embed token `{pair}`"))?;
            match (x.parse(), v.parse()) {
                (Ok(x), Ok(v)) => Ok((x, v)),
                _ => Err(format!("malformed embed token `{pair}`")),
            }
        })
        .collect()
}

fn maker_graph(state: &GameState) -> Graph {
    Graph::from_edges(state.vertex_count().unwrap_or(0), &state.maker_edges())
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_u64().map(|x| x as usize)
}

/// Per-kind checks fed by the replay hook.
trait KindAudit {
    fn after_move(&mut self, i: usize, m: &MoveRecord, state: &GameState);
    fn finish(self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, flags: &mut Vec<String>);
}

struct NoAudit;

impl KindAudit for NoAudit {
    fn after_move(&mut self, _: usize, _: &MoveRecord, _: &GameState) {}
    fn finish(self: Box<Self>, _: &Transcript, _: &GameState, _: &mut Vec<Check>, _: &mut Vec<String>) {}
}

struct TreeAudit {
    tree: TreeSpec,
    emb: PartialEmbedding,
    case_one: bool,
    danger: f64,
    danger_bound: Option<f64>,
    open_cap: Option<f64>,
    d1: usize,
    stage2_seen: bool,
    ever_dangerous: BTreeSet<usize>,
    stage1_embedded: usize,
    boards: Vec<Vec<ElementId>>,
    board_of: BTreeMap<u32, usize>,
    visit_bound: f64,
    since_visit: Vec<usize>,
    counting: bool,
    soundness: Tracker,
    danger_check: Tracker,
    priority: Tracker,
    work: Tracker,
    visits: Tracker,
    open_degree: Option<(usize, String)>,
}

impl TreeAudit {
    fn new(t: &Transcript) -> Result<TreeAudit> {
        let p = &t.params["maker"];
        let n = as_usize(&p["n"]).ok_or_else(|| Error::Config("tree transcript lacks n".into()))?;
        let edges: Vec<(usize, usize)> = serde_json::from_value(p["tree"].clone())
            .map_err(|e| Error::Config(format!("tree transcript lacks edges: {e}")))?;
        let tree = TreeSpec::from_edges(n, &edges)?;
        let board_n = crate::board::Board::from_spec(&t.board)?.vertex_count().unwrap_or(n);
        let pipe = &t.report["maker"]["pipeline"];
        let boards: Vec<Vec<ElementId>> =
            serde_json::from_value(pipe["parallel"]["describe"]["boards"].clone()).unwrap_or_default();
        let mut board_of = BTreeMap::new();
        for (j, b) in boards.iter().enumerate() {
            for e in b {
                board_of.insert(e.0, j);
            }
        }
        Ok(TreeAudit {
            emb: PartialEmbedding::new(n, board_n),
            tree,
            case_one: p["case"] == "CaseI",
            danger: p["thresholds"]["danger"].as_f64().unwrap_or(f64::INFINITY),
            danger_bound: p["pipeline"]["danger_bound"].as_f64(),
            open_cap: p["pipeline"]["open_degree_cap"].as_f64(),
            d1: as_usize(&p["census"]["d1"]).unwrap_or(0),
            stage2_seen: false,
            ever_dangerous: BTreeSet::new(),
            stage1_embedded: 0,
            since_visit: vec![0; boards.len()],
            visit_bound: pipe["parallel"]["describe"]["between_visit_bound"].as_f64().unwrap_or(f64::INFINITY),
            boards,
            board_of,
            counting: false,
            soundness: Tracker::new("embedding_soundness"),
            danger_check: Tracker::new("danger_accounting"),
            priority: Tracker::new("danger_priority"),
            work: Tracker::new("stage1_work_bound"),
            visits: Tracker::new("between_visit_bound"),
            open_degree: None,
        })
    }
}

impl KindAudit for TreeAudit {
    fn after_move(&mut self, i: usize, m: &MoveRecord, state: &GameState) {
        if m.player == Side::Maker {
            let stage2 = kv(&m.note, "stage") == Some("2");
            let extend = self.case_one && !self.stage2_seen && kv(&m.note, "rule") == Some("extend");
            let tokens = embed_tokens(&m.note);
            let last = tokens.len().saturating_sub(1);
            for (t, tok) in tokens.into_iter().enumerate() {
                // a finished connector embeds without a claim of its own, so
                // its tokens precede the extension's on the same move; the
                // extension's own vertex is always the final token
                if extend && t == last {
                    let d = dangerous_set(&self.tree, &self.emb, state, self.danger);
                    if !d.is_empty() {
                        self.priority.fail(i, format!("extension while {d:?} were dangerous"));
                    }
                }
                match tok {
                    Ok((x, v)) => {
                        if x >= self.tree.n() {
                            self.soundness.fail(i, format!("tree vertex {x} out of range"));
                        } else if let Err(e) = self.emb.embed(x, v) {
                            self.soundness.fail(i, e);
                        } else if !stage2 {
                            self.stage1_embedded += 1;
                        }
                    }
                    Err(e) => self.soundness.fail(i, e),
                }
            }
            if stage2 && !self.boards.is_empty() {
                if let Some(j) = kv(&m.note, "board").and_then(|b| b.parse::<usize>().ok()) {
                    if !self.counting {
                        self.counting = true;
                        self.since_visit.iter_mut().for_each(|c| *c = 0);
                    }
                    if j < self.since_visit.len() {
                        let c = self.since_visit[j];
                        let bound = self.visit_bound;
                        self.visits.ensure(c as f64 <= bound, i, || format!("{c} Breaker claims on board {j} since the last visit, bound {bound:.3}"));
                        self.since_visit[j] = 0;
                    } else {
                        self.visits.fail(i, format!("unknown board {j}"));
                    }
                }
            }
            self.stage2_seen |= stage2;
        } else if self.counting {
            for e in &m.elements {
                if let Some(&j) = self.board_of.get(&e.0) {
                    self.since_visit[j] += 1;
                }
            }
        }
        if let Some(v) = self.emb.violation(&self.tree, state) {
            self.soundness.fail(i, v);
        }
        if self.case_one && !self.stage2_seen {
            let d = dangerous_set(&self.tree, &self.emb, state, self.danger);
            self.ever_dangerous.extend(d);
            if let (Some(bound), true) = (self.danger_bound, m.player == Side::Breaker) {
                let c = self.ever_dangerous.len();
                self.danger_check.ensure(c as f64 <= bound, i, || format!("{c} vertices have been dangerous, bound {bound:.3}"));
            }
            if let (Some(cap), None) = (self.open_cap, &self.open_degree) {
                let n = state.vertex_count().unwrap_or(0);
                let hot = (0..n).find(|&v| {
                    let live = match self.emb.preimage(v) {
                        None => true,
                        Some(x) => self.emb.status(&self.tree, x) == VertexStatus::Open,
                    };
                    live && state.breaker_degree(v) as f64 >= cap
                });
                if let Some(v) = hot {
                    self.open_degree = Some((i, format!("vertex {v} has Breaker degree {} >= open-degree cap {cap:.2}", state.breaker_degree(v))));
                }
            }
        }
    }

    fn finish(mut self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, flags: &mut Vec<String>) {
        let last = t.moves.len().saturating_sub(1);
        let mut fin = Tracker::new("tree_copy");
        if t.outcome.is_maker_win() {
            let ok = self.emb.is_total()
                && verify_tree_copy(&self.tree, &maker_graph(state), self.emb.map()).unwrap_or(false);
            fin.ensure(ok, last, || "Maker declared a win without a verified copy of the tree".into());
        }
        let forfeited = matches!(t.outcome, Outcome::Forfeit { side: Side::Maker, .. });
        if !forfeited {
            let reported: Option<Vec<Option<usize>>> = serde_json::from_value(t.report["maker"]["embedding"].clone()).ok();
            if let Some(r) = reported {
                fin.ensure(r == self.emb.map(), last, || "recorded embedding differs from the replayed one".into());
            }
        }
        if self.case_one {
            self.danger_check.info = format!("{} ever dangerous", self.ever_dangerous.len());
        } else {
            let bound = 3.0 * self.d1 as f64 * (self.tree.n() as f64).powf(0.2);
            let got = self.stage1_embedded;
            self.work.info = format!("{got} embedded in stage 1, bound {bound:.2}");
            self.work.ensure(got as f64 <= bound, last, || format!("{got} vertices embedded in stage 1, bound {bound:.2}"));
        }
        if let Some((i, why)) = &self.open_degree {
            flags.push(format!("open-degree cap exceeded at move {i}: {why}"));
        }
        checks.push(self.soundness.done());
        checks.push(fin.done());
        if self.case_one {
            checks.push(self.danger_check.done());
            checks.push(self.priority.done());
        } else {
            checks.push(self.work.done());
            if !self.boards.is_empty() {
                checks.push(self.visits.done());
            }
        }
    }
}

struct MatchingAudit;

impl KindAudit for MatchingAudit {
    fn after_move(&mut self, _: usize, _: &MoveRecord, _: &GameState) {}

    fn finish(self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, _: &mut Vec<String>) {
        let mut c = Tracker::new("perfect_matching");
        let last = t.moves.len().saturating_sub(1);
        let r = state.vertex_count().unwrap_or(0) / 2;
        let mut adj = vec![Vec::new(); r];
        for (u, v) in state.maker_edges() {
            let (a, b) = (u.min(v), u.max(v));
            if a < r && b >= r {
                adj[a].push(b - r);
            }
        }
        let size = maximum_matching(r, r, &adj).iter().filter(|x| x.is_some()).count();
        c.info = format!("maximum Maker matching {size} of {r}");
        if t.outcome.is_maker_win() {
            c.ensure(size == r, last, || format!("declared win but the maximum Maker matching has size {size} < {r}"));
            let pairs: Option<Vec<(usize, usize)>> = serde_json::from_value(t.report["final"]["matching"].clone()).ok().flatten();
            if let Some(pairs) = pairs {
                let mut seen = BTreeSet::new();
                let ok = pairs.len() == r
                    && pairs.iter().all(|&(a, b)| state.is_maker_edge(a, b) && seen.insert(a) && seen.insert(b));
                c.ensure(ok, last, || "recorded matching is not a perfect matching of Maker edges".into());
            }
        }
        checks.push(c.done());
    }
}

struct HamconAudit;

impl KindAudit for HamconAudit {
    fn after_move(&mut self, _: usize, _: &MoveRecord, _: &GameState) {}

    fn finish(self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, _: &mut Vec<String>) {
        let mut c = Tracker::new("hamilton_connected");
        if t.outcome.is_maker_win() {
            let p = &t.params["maker"];
            let samples = as_usize(&p["samples"]).unwrap_or(0);
            let seed = p["seed"].as_u64().unwrap_or(t.seed);
            let ok = maker_graph_done(&maker_graph(state), samples, seed);
            c.ensure(ok, t.moves.len().saturating_sub(1), || "declared win but the Maker graph fails the completion test".into());
        }
        checks.push(c.done());
    }
}

struct HampathAudit;

impl KindAudit for HampathAudit {
    fn after_move(&mut self, _: usize, _: &MoveRecord, _: &GameState) {}

    fn finish(self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, _: &mut Vec<String>) {
        let mut c = Tracker::new("hamilton_path");
        if t.outcome.is_maker_win() {
            let path: Option<Vec<usize>> = serde_json::from_value(t.report["final"]["path"].clone()).ok().flatten();
            let ends: Option<(usize, usize)> = serde_json::from_value(t.report["final"]["endpoints"].clone()).ok();
            let ok = match (path, ends) {
                (Some(p), Some((a, b))) => is_hamilton_path(&maker_graph(state), &p, a, b),
                _ => false,
            };
            c.ensure(ok, t.moves.len().saturating_sub(1), || "declared win without a Hamilton path of Maker edges".into());
        }
        checks.push(c.done());
    }
}

struct TriangleAudit {
    delayer: bool,
    claim: Tracker,
}

impl KindAudit for TriangleAudit {
    fn after_move(&mut self, i: usize, m: &MoveRecord, state: &GameState) {
        if self.delayer && m.player == Side::Breaker && !triangle_invariant_check(&maker_graph(state)) {
            self.claim.fail(i, "a Maker triangle has all corners of Maker degree 2");
        }
    }

    fn finish(mut self: Box<Self>, t: &Transcript, state: &GameState, checks: &mut Vec<Check>, _: &mut Vec<String>) {
        let last = t.moves.len().saturating_sub(1);
        let g = maker_graph(state);
        if self.delayer {
            self.claim.ensure(triangle_invariant_check(&g), last, || "final Maker graph violates the degree-3 claim".into());
        }
        let mut factor = Tracker::new("triangle_factor");
        if t.outcome.is_maker_win() {
            let n = g.vertex_count();
            factor.ensure(triangle_factor(&g).is_some(), last, || "declared win without a triangle factor".into());
            if self.delayer {
                let need = (7 * n).div_ceil(6);
                let e = g.edge_count();
                factor.ensure(e >= need, last, || format!("factor completed with {e} Maker edges, fewer than {need}"));
                factor.info = format!("{e} Maker edges, at least {need} required");
            }
        }
        if self.delayer {
            checks.push(self.claim.done());
        }
        checks.push(factor.done());
    }
}

struct HypergraphAudit {
    h: Hypergraph,
    first_win: Option<usize>,
    broken: Option<(usize, String)>,
}

impl KindAudit for HypergraphAudit {
    fn after_move(&mut self, i: usize, _: &MoveRecord, state: &GameState) {
        if self.first_win.is_some() || self.broken.is_some() {
            return;
        }
        match winner_check(state, &self.h) {
            Ok(GameStatus::MakerWin) => self.first_win = Some(i),
            Ok(_) => {}
            Err(e) => self.broken = Some((i, e.to_string())),
        }
    }

    fn finish(self: Box<Self>, t: &Transcript, _: &GameState, checks: &mut Vec<Check>, _: &mut Vec<String>) {
        let mut c = Tracker::new("winner_consistency");
        if let Some((i, e)) = self.broken {
            c.fail(i, e);
        }
        let last = t.moves.len().saturating_sub(1);
        match (&t.outcome, self.first_win) {
            (Outcome::MakerWin { move_index }, Some(i)) if *move_index == i => {}
            (Outcome::MakerWin { move_index }, found) => {
                c.fail(*move_index, format!("declared Maker win at {move_index}, first full winning set at {found:?}"))
            }
            (_, Some(i)) => c.fail(i, "Maker owned a winning set but the game went on"),
            _ => {}
        }
        let _ = last;
        checks.push(c.done());
    }
}

fn kind_audit(t: &Transcript) -> Result<Box<dyn KindAudit>> {
    Ok(match t.kind.as_str() {
        "tree-embed" => Box::new(TreeAudit::new(t)?),
        "matching" => Box::new(MatchingAudit),
        "hamcon" => Box::new(HamconAudit),
        "hampath" => Box::new(HampathAudit),
        "triangle" => Box::new(TriangleAudit { delayer: t.breaker == "triangle_delayer", claim: Tracker::new("triangle_claim") }),
        "custom-hypergraph" => {
            let text = t.params["setup"]["extra"]["hypergraph"]
                .as_str()
                .ok_or_else(|| Error::Config("hypergraph transcript lacks its family".into()))?;
            Box::new(HypergraphAudit { h: Hypergraph::parse(text)?, first_win: None, broken: None })
        }
        _ => Box::new(NoAudit),
    })
}

/// Audits an in-memory game transcript.
pub fn audit_transcript(t: &Transcript, source: &str) -> Result<AuditReport> {
    let mut checks = Vec::new();
    let mut flags = Vec::new();
    let mut kind = kind_audit(t)?;
    let replayed = replay_with(t, |i, m, state| {
        kind.after_move(i, m, state);
        Ok(())
    });
    let forfeit = match &t.outcome {
        Outcome::Forfeit { side, reason } => Some(format!("{side}: {reason}")),
        _ => None,
    };
    match replayed {
        Err(e) => checks.push(Check { name: "replay".into(), passed: false, first_violation: Some(e.move_index), detail: e.message }),
        Ok(state) => {
            checks.push(Check { name: "replay".into(), passed: true, first_violation: None, detail: format!("{} moves", t.moves.len()) });
            let mut oc = Tracker::new("outcome");
            let last = t.moves.len().saturating_sub(1);
            match &t.outcome {
                Outcome::MakerWin { move_index } => {
                    oc.ensure(*move_index == last, *move_index, || format!("win recorded at {move_index} but the game has {} moves", t.moves.len()))
                }
                Outcome::Exhausted => oc.ensure(state.free_count() == 0, last, || "board not exhausted".into()),
                _ => {}
            }
            checks.push(oc.done());
            kind.finish(t, &state, &mut checks, &mut flags);
        }
    }
    let guards: BTreeMap<String, bool> = guard_flags(t).into_iter().collect();
    if let Some(r) = t.report["maker"]["pipeline"]["audit"]["part_degree_guard"].as_bool() {
        if !r {
            flags.push("partition part-degree guard did not hold".into());
        }
    }
    Ok(AuditReport { source: source.into(), kind: t.kind.clone(), outcome: t.outcome.label().into(), forfeit, guards, checks, flags })
}

#[derive(serde::Deserialize)]
struct BoxRound {
    round: usize,
    weights: Vec<f64>,
    reset: usize,
}

const TOL: f64 = 1e-9;

/// Audits a box-game JSONL record: each BoxMaker move adds non-negative
/// weight of total at most one, the reset hits a maximum-weight box, weights
/// stay below `1 + ln(m + j)` and Φ grows by at most one per round.
pub fn audit_box(text: &str, source: &str) -> Result<AuditReport> {
    let mut header: Option<Value> = None;
    let mut rounds: Vec<BoxRound> = Vec::new();
    let mut footer: Option<Value> = None;
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse = |msg: String| Error::Parse { line: ln + 1, msg };
        let v: Value = serde_json::from_str(line).map_err(|e| parse(e.to_string()))?;
        match v["record"].as_str() {
            Some("box_header") if header.is_none() && ln == 0 => header = Some(v),
            Some("round") if header.is_some() && footer.is_none() => {
                rounds.push(serde_json::from_value(v).map_err(|e| parse(e.to_string()))?)
            }
            Some("box_footer") if header.is_some() && footer.is_none() => footer = Some(v),
            _ => return Err(parse("unexpected record".into())),
        }
    }
    let header = header.ok_or(Error::Parse { line: 1, msg: "missing box header".into() })?;
    let m = as_usize(&header["m"]).ok_or(Error::Parse { line: 1, msg: "missing m".into() })?;
    let q = as_usize(&header["q"]);
    let mut weights = vec![0.0f64; m];
    let mut delta = Tracker::new("box_move");
    let mut reset = Tracker::new("box_reset");
    let mut bound = Tracker::new("box_weight_bound");
    let mut phi = Tracker::new("box_phi_increment");
    let mut max_w: f64 = 0.0;
    for (idx, r) in rounds.iter().enumerate() {
        let j = idx + 1;
        if r.round != j || r.weights.len() != m {
            delta.fail(j, "round numbering or width is off");
            break;
        }
        let phi_before = potential_phi(&weights);
        let d: Vec<f64> = r.weights.iter().zip(&weights).map(|(a, b)| a - b).collect();
        let sum: f64 = d.iter().sum();
        delta.ensure(d.iter().all(|&x| x >= -TOL) && sum <= 1.0 + TOL, j, || format!("increments {d:?}"));
        if let Some(q) = q {
            let integral = d.iter().all(|&x| ((x * q as f64) - (x * q as f64).round()).abs() < 1e-6);
            delta.ensure(integral, j, || format!("increments {d:?} are not multiples of 1/{q}"));
        }
        let b = continuous_bound(m, j);
        let mx = r.weights.iter().cloned().fold(0.0, f64::max);
        max_w = max_w.max(mx);
        bound.ensure(mx <= b + TOL, j, || format!("weight {mx:.4} above {b:.4}"));
        let expect = cbox_breaker_reset(&r.weights);
        reset.ensure(r.reset == expect, j, || format!("reset box {} but box {expect} has maximum weight", r.reset));
        weights.clone_from(&r.weights);
        if r.reset < m {
            weights[r.reset] = 0.0;
        }
        let inc = potential_phi(&weights) - phi_before;
        phi.ensure(inc <= 1.0 + TOL, j, || format!("potential grew by {inc:.6}"));
    }
    bound.info = format!("max weight {max_w:.4} over {} rounds", rounds.len());
    let mut flags = Vec::new();
    let forfeit = footer.as_ref().and_then(|f| f["forfeit"].as_str().map(String::from));
    if footer.is_none() {
        flags.push("record has no footer".into());
    }
    let mut checks = vec![delta.done(), reset.done(), bound.done(), phi.done()];
    if let Some(f) = &footer {
        let recorded = f["max_weight"].as_f64().unwrap_or(f64::NAN);
        let ok = rounds.is_empty() || (recorded - max_w).abs() < 1e-6;
        checks.push(Check {
            name: "box_footer".into(),
            passed: ok,
            first_violation: (!ok).then_some(rounds.len()),
            detail: if ok { String::new() } else { format!("footer max weight {recorded} vs replayed {max_w}") },
        });
    }
    Ok(AuditReport {
        source: source.into(),
        kind: "box".into(),
        outcome: if forfeit.is_some() { "forfeit".into() } else { "complete".into() },
        forfeit,
        guards: BTreeMap::new(),
        checks,
        flags,
    })
}

/// Audits transcript text of either format.
pub fn audit_text(text: &str, source: &str) -> Result<AuditReport> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let is_box = serde_json::from_str::<Value>(first).map(|v| v["record"] == "box_header").unwrap_or(false);
    if is_box {
        audit_box(text, source)
    } else {
        audit_transcript(&Transcript::from_jsonl(text)?, source)
    }
}

pub fn audit_path(path: &Path) -> Result<AuditReport> {
    let text = std::fs::read_to_string(path)?;
    audit_text(&text, &path.display().to_string())
}
