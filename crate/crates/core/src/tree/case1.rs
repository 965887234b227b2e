//! Case I: many leaf neighbours. Embed everything but a set `L'` of
//! leaves with distinct supports while handling dangerous vertices
//! first, then attach the remaining leaves through a perfect matching.

use serde::Serialize;
use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::Result;
use crate::game::GameState;
use crate::parallel::SubStrategy;
use crate::subgames::{free_edge, BipartiteBoard, Connector, ConnectorStep, MatchingMaker};

use super::census::{leaf_split, select_independent_leaves, DegreeCensus};
use super::embed::{PartialEmbedding, VertexStatus};
use super::strategy::{Ctx, Proposal, ThresholdConfig};
use super::TreeSpec;

enum Task {
    Idle,
    /// Embed every new tree-neighbour of the vertex sitting on `v`.
    Close(usize),
    /// Connector from an open vertex towards the available vertex `v`;
    /// on success `xp`, `yp`, `vp` go onto the connector's `x`, `y` and `v`.
    Connect { conn: Connector, xp: usize, yp: usize, vp: usize, v: usize },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CaseOneAudit {
    pub stage1_moves: usize,
    pub stage2_moves: usize,
    pub close_moves: usize,
    pub attach_moves: usize,
    pub connector_moves: usize,
    pub extend_moves: usize,
    pub connectors: Vec<usize>,
    pub ever_dangerous: usize,
    pub max_dangerous: usize,
    pub leftover_violations: usize,
    pub open_degree_violations: usize,
    pub first_violation_move: Option<usize>,
    pub stage2_leaves: usize,
}

pub struct CaseOne {
    n: usize,
    leaves: Vec<usize>,
    in_lprime: Vec<bool>,
    danger: f64,
    open_cap: f64,
    c: usize,
    budget: usize,
    danger_bound: f64,
    slack_exponent: f64,
    matching_mode: crate::subgames::Mode,
    matching_cap: u64,
    q: usize,
    started: bool,
    stage: u8,
    task: Task,
    matching: Option<(MatchingMaker, Vec<usize>)>,
    ever: Vec<bool>,
    audit: CaseOneAudit,
}

/// Board vertices that are dangerous: Breaker degree at least the
/// threshold and either available or holding an open tree vertex.
pub fn dangerous_set(tree: &TreeSpec, emb: &PartialEmbedding, state: &GameState, threshold: f64) -> Vec<usize> {
    let n = state.vertex_count().unwrap_or(0);
    (0..n)
        .filter(|&v| state.breaker_degree(v) as f64 >= threshold)
        .filter(|&v| match emb.preimage(v) {
            None => true,
            Some(x) => emb.status(tree, x) == VertexStatus::Open,
        })
        .collect()
}

impl CaseOne {
    pub fn new(tree: &TreeSpec, census: &DegreeCensus, cfg: &ThresholdConfig, q: usize) -> Result<CaseOne> {
        let n = tree.n();
        let leaves = select_independent_leaves(tree, census)?;
        let mut in_lprime = vec![false; n];
        for &l in &leaves {
            in_lprime[l] = true;
        }
        let nf = n as f64;
        Ok(CaseOne {
            n,
            leaves,
            in_lprime,
            danger: cfg.danger(n),
            open_cap: nf.powf(cfg.open_degree_exponent),
            c: cfg.connector_c(n),
            budget: cfg.connector_budget(n),
            danger_bound: 4.0 * nf.powf(1.0 + cfg.alpha) / nf.sqrt(),
            slack_exponent: 0.95,
            matching_mode: cfg.matching_mode,
            matching_cap: cfg.matching_cap,
            q,
            started: false,
            stage: 1,
            task: Task::Idle,
            matching: None,
            ever: vec![false; n],
            audit: CaseOneAudit::default(),
        })
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn audit(&self) -> &CaseOneAudit {
        &self.audit
    }

    fn in_tprime(&self, x: usize) -> bool {
        !self.in_lprime[x]
    }

    pub(crate) fn step(&mut self, ctx: &mut Ctx<'_>) -> Proposal {
        if !self.started {
            self.started = true;
            let w = (0..self.n).find(|&x| self.in_tprime(x)).expect("T' is non-empty");
            ctx.embed(w, 0)?;
        }
        if self.stage == 1 {
            self.observe(ctx);
            match self.stage1(ctx)? {
                Some(p) => {
                    self.audit.stage1_moves += 1;
                    return Ok(Some(p));
                }
                None => {
                    self.stage = 2;
                }
            }
        }
        let p = self.stage2(ctx)?;
        if p.is_some() {
            self.audit.stage2_moves += 1;
        }
        Ok(p)
    }

    /// Danger bookkeeping and the two Stage 1 properties, checked before
    /// each Stage 1 move.
    fn observe(&mut self, ctx: &Ctx<'_>) {
        let d = dangerous_set(ctx.tree, ctx.emb, ctx.state, self.danger);
        for &v in &d {
            if !self.ever[v] {
                self.ever[v] = true;
                self.audit.ever_dangerous += 1;
            }
        }
        self.audit.max_dangerous = self.audit.max_dangerous.max(d.len());
        let mut bad = false;
        if ((self.n - ctx.emb.len()) as f64) < 0.5 * leaf_split(self.n) {
            self.audit.leftover_violations += 1;
            bad = true;
        }
        let open_bad = (0..self.n).any(|v| {
            let live = match ctx.emb.preimage(v) {
                None => true,
                Some(x) => ctx.emb.status(ctx.tree, x) == VertexStatus::Open,
            };
            live && ctx.state.breaker_degree(v) as f64 > self.open_cap
        });
        if open_bad {
            self.audit.open_degree_violations += 1;
            bad = true;
        }
        if bad && self.audit.first_violation_move.is_none() {
            self.audit.first_violation_move = Some(self.audit.stage1_moves);
        }
    }

    fn stage1(&mut self, ctx: &mut Ctx<'_>) -> Proposal {
        loop {
            match std::mem::replace(&mut self.task, Task::Idle) {
                Task::Close(v) => {
                    let x = ctx.emb.preimage(v).ok_or("closing an unused vertex")?;
                    let Some(y) = ctx.emb.new_neighbors(ctx.tree, x).next() else { continue };
                    let u = ctx
                        .free_available_neighbor(v)
                        .ok_or_else(|| format!("cannot close {v}: no free edge to an available vertex"))?;
                    let e = free_edge(ctx.state, v, u).expect("free");
                    ctx.embed(y, u)?;
                    self.task = Task::Close(v);
                    self.audit.close_moves += 1;
                    return Ok(Some((e, format!("stage=1 rule=close v={v}"))));
                }
                Task::Connect { mut conn, xp, yp, vp, v } => match conn.next(ctx.state)? {
                    ConnectorStep::Claim(e) => {
                        self.audit.connector_moves += 1;
                        let note = format!("stage=1 rule=connect v={v} u={}", conn.u);
                        self.task = Task::Connect { conn, xp, yp, vp, v };
                        return Ok(Some((e, note)));
                    }
                    ConnectorStep::Done { x, y } => {
                        self.audit.connectors.push(conn.moves());
                        ctx.embed(xp, x)?;
                        ctx.embed(yp, y)?;
                        ctx.embed(vp, v)?;
                        self.task = Task::Close(v);
                    }
                },
                Task::Idle => {
                    let d = dangerous_set(ctx.tree, ctx.emb, ctx.state, self.danger);
                    if let Some(&v) = d.first() {
                        if let Some(p) = self.handle_dangerous(ctx, v)? {
                            return Ok(Some(p));
                        }
                        continue;
                    }
                    if (0..self.n).all(|x| !self.in_tprime(x) || ctx.emb.is_embedded(x)) {
                        return Ok(None);
                    }
                    return self.extend(ctx).map(Some);
                }
            }
        }
    }

    /// Sets up the task for dangerous `v`; returns a claim when `v` is
    /// attached directly.
    fn handle_dangerous(&mut self, ctx: &mut Ctx<'_>, v: usize) -> std::result::Result<Option<(ElementId, String)>, String> {
        if ctx.emb.is_taken(v) {
            self.task = Task::Close(v);
            return Ok(None);
        }
        let open = |ctx: &Ctx<'_>, u: usize| {
            ctx.emb.preimage(u).is_some_and(|x| ctx.emb.status(ctx.tree, x) == VertexStatus::Open)
        };
        if let Some(u) = (0..self.n).find(|&u| open(ctx, u) && ctx.state.is_free_edge(u, v)) {
            let x = ctx.emb.preimage(u).expect("taken");
            let y = ctx.emb.new_neighbors(ctx.tree, x).next().expect("open");
            let e = free_edge(ctx.state, u, v).expect("free");
            ctx.embed(y, v)?;
            self.task = Task::Close(v);
            self.audit.attach_moves += 1;
            return Ok(Some((e, format!("stage=1 rule=attach v={v} u={u}"))));
        }
        for u in (0..self.n).filter(|&u| open(ctx, u)) {
            let up = ctx.emb.preimage(u).expect("taken");
            for xp in ctx.emb.new_neighbors(ctx.tree, up) {
                for yp in ctx.emb.new_neighbors(ctx.tree, xp) {
                    if let Some(vp) = ctx.emb.new_neighbors(ctx.tree, yp).find(|&w| w != xp) {
                        let candidates: Vec<usize> = ctx.emb.available().filter(|&w| w != v).collect();
                        let conn = Connector::new(ctx.state, u, v, &candidates, self.c, self.budget);
                        self.task = Task::Connect { conn, xp, yp, vp, v };
                        return Ok(None);
                    }
                }
            }
        }
        Err(format!("dangerous vertex {v}: no open vertex with a new path of length three"))
    }

    /// Rule (2): grow `T'` from its lowest open vertex into the lowest
    /// available vertex across a free edge.
    fn extend(&mut self, ctx: &mut Ctx<'_>) -> std::result::Result<(ElementId, String), String> {
        for x in (0..self.n).filter(|&x| self.in_tprime(x)) {
            let Some(v) = ctx.emb.image(x) else { continue };
            let Some(y) = ctx.emb.new_neighbors(ctx.tree, x).find(|&y| self.in_tprime(y)) else { continue };
            if let Some(u) = ctx.free_available_neighbor(v) {
                let e = free_edge(ctx.state, v, u).expect("free");
                ctx.embed(y, u)?;
                self.audit.extend_moves += 1;
                return Ok((e, "stage=1 rule=extend".to_string()));
            }
        }
        Err("no free edge extends T'".into())
    }

    fn stage2(&mut self, ctx: &mut Ctx<'_>) -> Proposal {
        if self.matching.is_none() {
            let rest: Vec<usize> = self.leaves.iter().copied().filter(|&l| !ctx.emb.is_embedded(l)).collect();
            self.audit.stage2_leaves = rest.len();
            if rest.is_empty() {
                return Ok(None);
            }
            let y: Vec<usize> = rest
                .iter()
                .map(|&l| ctx.emb.image(ctx.tree.neighbors(l)[0]).ok_or("leaf support not embedded"))
                .collect::<std::result::Result<_, _>>()?;
            let x: Vec<usize> = ctx.emb.available().collect();
            if x.len() != y.len() {
                return Err(format!("|X| = {} but |Y| = {}", x.len(), y.len()));
            }
            let r = x.len();
            let slack = (r as f64).powf(self.slack_exponent).ceil() as usize;
            let board = BipartiteBoard::from_state(ctx.state, y, x, slack).map_err(|e| e.to_string())?;
            let mm = MatchingMaker::new(board, self.q, self.matching_mode, self.matching_cap, ctx.state.board_size())
                .map_err(|e| e.to_string())?;
            self.matching = Some((mm, rest));
        }
        let (mm, rest) = self.matching.as_mut().expect("built above");
        if let Some(pairs) = mm.matching(ctx.state) {
            attach_leaves(ctx, rest, &pairs)?;
            return Ok(None);
        }
        let step = mm.next_claim(ctx.state)?;
        let mut sim = ctx.state.clone();
        sim.apply_claim(crate::game::Side::Maker, step.claim).map_err(|e| e.to_string())?;
        if let Some(pairs) = mm.matching(&sim) {
            attach_leaves(ctx, rest, &pairs)?;
        }
        Ok(Some((step.claim, "stage=2 rule=match".to_string())))
    }

    pub fn params(&self) -> Value {
        json!({
            "leaves": self.leaves,
            "danger_threshold": self.danger,
            "danger_bound": self.danger_bound,
            "open_degree_cap": self.open_cap,
            "connector_c": self.c,
            "connector_budget": self.budget,
        })
    }

    pub fn report(&self) -> Value {
        json!({
            "stage": self.stage,
            "audit": self.audit,
            "danger_bound": self.danger_bound,
            "danger_bound_exceeded": self.audit.ever_dangerous as f64 > self.danger_bound,
            "matching": self.matching.as_ref().map(|(m, _)| json!({
                "params": m.params(),
                "report": m.report(),
            })),
        })
    }
}

/// Puts each remaining leaf on the vertex matched to its support's image.
fn attach_leaves(ctx: &mut Ctx<'_>, rest: &[usize], pairs: &[(usize, usize)]) -> std::result::Result<(), String> {
    for &(support_img, target) in pairs {
        let l = rest
            .iter()
            .copied()
            .find(|&l| ctx.emb.image(ctx.tree.neighbors(l)[0]) == Some(support_img))
            .ok_or("matched vertex carries no leaf")?;
        ctx.embed(l, target)?;
    }
    Ok(())
}
