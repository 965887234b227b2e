//! Case II: few leaf neighbours, hence many long bare paths. Embed the
//! forest left after cutting those paths greedily, then fill each path
//! with a fixed-endpoint Hamilton path of its own random part, all parts
//! played in parallel.

use serde::Serialize;
use serde_json::{json, Value};

use crate::game::{GameState, Side};
use crate::graph::Graph;
use crate::parallel::{inflated_bias, ParallelMaker};
use crate::rng::{stream_rng, streams};
use crate::subgames::{free_edge, HamPathMaker, HamPathParams, Region};

use super::decompose::{bare_decomposition, Decomposition};
use super::partition::{random_partition, Partition, PartitionConfig};
use super::strategy::{Ctx, Proposal, ThresholdConfig};
use super::TreeSpec;

#[derive(Debug, Clone, Default, Serialize)]
pub struct CaseTwoAudit {
    pub stage1_moves: usize,
    pub stage1_embedded: usize,
    /// `3 |D_1| n^0.2`.
    pub stage1_work_bound: f64,
    pub stage2_moves: usize,
    pub sub_bias: usize,
    /// Per part: `(min degree of G_i, n_i - 10 n_i n^-0.05)`.
    pub part_degrees: Vec<(usize, f64)>,
    pub part_degree_guard: bool,
    /// Maker move count (within this game) at which Stage 2 began.
    pub stage2_start: Option<usize>,
}

pub struct CaseTwo {
    n: usize,
    q: usize,
    seed: u64,
    threshold: f64,
    decomposition: Decomposition,
    in_forest: Vec<bool>,
    forest_adj: Vec<Vec<usize>>,
    partition_cfg: PartitionConfig,
    hampath: HamPathParams,
    partition: Option<Partition>,
    parallel: Option<ParallelMaker<HamPathMaker>>,
    done: Vec<bool>,
    moves: usize,
    audit: CaseTwoAudit,
}

impl CaseTwo {
    pub fn new(tree: &TreeSpec, cfg: &ThresholdConfig, q: usize, seed: u64) -> CaseTwo {
        let n = tree.n();
        let threshold = cfg.bare_len(n);
        let decomposition = bare_decomposition(tree, threshold);
        let mut in_forest = vec![false; n];
        for &v in &decomposition.forest_vertices {
            in_forest[v] = true;
        }
        let mut forest_adj = vec![Vec::new(); n];
        for &(u, v) in &decomposition.forest_edges {
            forest_adj[u].push(v);
            forest_adj[v].push(u);
        }
        for a in forest_adj.iter_mut() {
            a.sort_unstable();
        }
        let d1 = (0..n).filter(|&v| tree.degree(v) == 1).count();
        let audit = CaseTwoAudit {
            stage1_work_bound: 3.0 * d1 as f64 * (n as f64).powf(0.2),
            part_degree_guard: true,
            ..CaseTwoAudit::default()
        };
        CaseTwo {
            n,
            q,
            seed,
            threshold,
            decomposition,
            in_forest,
            forest_adj,
            partition_cfg: cfg.partition,
            hampath: cfg.hampath.clone(),
            partition: None,
            parallel: None,
            done: Vec::new(),
            moves: 0,
            audit,
        }
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn audit(&self) -> &CaseTwoAudit {
        &self.audit
    }

    pub(crate) fn step(&mut self, ctx: &mut Ctx<'_>, opponent_last: &[crate::board::ElementId]) -> Proposal {
        if self.parallel.is_none() {
            if let Some(p) = self.stage1(ctx)? {
                self.moves += 1;
                self.audit.stage1_moves += 1;
                return Ok(Some(p));
            }
            self.audit.stage1_embedded = ctx.emb.len();
            if self.decomposition.paths.is_empty() {
                return Ok(None);
            }
            self.enter_stage2(ctx)?;
        } else {
            self.parallel.as_mut().expect("checked").observe(opponent_last);
        }
        let par = self.parallel.as_mut().expect("stage 2 running");
        let Some(step) = par.step(ctx.state)? else { return Ok(None) };
        let mut sim = ctx.state.clone();
        sim.apply_claim(Side::Maker, step.claim).map_err(|e| e.to_string())?;
        for (i, sub) in par.subs().iter().enumerate() {
            if self.done[i] {
                continue;
            }
            if let Some(path) = sub.path(&sim) {
                self.done[i] = true;
                let bare = &self.decomposition.paths[i];
                for (j, &x) in bare.interior.iter().enumerate() {
                    ctx.embed(x, path[j + 1])?;
                }
            }
        }
        self.moves += 1;
        self.audit.stage2_moves += 1;
        Ok(Some((step.claim, format!("stage=2 rule=path {}", step.note))))
    }

    /// Greedy forest embedding; `None` once every forest vertex is placed.
    fn stage1(&mut self, ctx: &mut Ctx<'_>) -> Proposal {
        loop {
            for x in (0..self.n).filter(|&x| self.in_forest[x]) {
                let Some(v) = ctx.emb.image(x) else { continue };
                for &y in &self.forest_adj[x] {
                    if ctx.emb.is_embedded(y) {
                        continue;
                    }
                    if let Some(u) = ctx.free_available_neighbor(v) {
                        let e = free_edge(ctx.state, v, u).expect("free");
                        ctx.embed(y, u)?;
                        return Ok(Some((e, "stage=1 rule=forest".to_string())));
                    }
                }
            }
            // Place the lowest vertex of a component with nothing embedded yet.
            let root = (0..self.n).find(|&x| {
                self.in_forest[x] && !ctx.emb.is_embedded(x) && !self.component_touched(ctx, x)
            });
            match root {
                Some(x) => {
                    let v = ctx.emb.available().next().ok_or("no available vertex for a forest root")?;
                    ctx.embed(x, v)?;
                }
                None => {
                    if (0..self.n).any(|x| self.in_forest[x] && !ctx.emb.is_embedded(x)) {
                        return Err("forest extension blocked: no free edge to an available vertex".into());
                    }
                    return Ok(None);
                }
            }
        }
    }

    fn component_touched(&self, ctx: &Ctx<'_>, start: usize) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            if ctx.emb.is_embedded(x) {
                return true;
            }
            for &y in &self.forest_adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    fn enter_stage2(&mut self, ctx: &mut Ctx<'_>) -> std::result::Result<(), String> {
        let state: &GameState = ctx.state;
        let paths = &self.decomposition.paths;
        let available: Vec<usize> = ctx.emb.available().collect();
        let endpoints: Vec<(usize, usize)> = paths
            .iter()
            .map(|p| Ok((ctx.emb.image(p.a).ok_or("path end not embedded")?, ctx.emb.image(p.b).ok_or("path end not embedded")?)))
            .collect::<std::result::Result<_, String>>()?;
        let sizes: Vec<usize> = paths.iter().map(|p| p.interior.len()).collect();
        let mut host = Graph::new(self.n);
        for side in [Side::Maker, Side::Breaker] {
            for (u, v) in state.side_edges(side) {
                host.add_edge(u, v);
            }
        }
        let mut rng = stream_rng(self.seed, streams::PARTITION);
        let partition = random_partition(&available, &endpoints, &sizes, &host, &self.partition_cfg, &mut rng)
            .map_err(|e| e.to_string())?;
        let total: usize = sizes.iter().sum();
        let sub_q = inflated_bias(paths.len(), self.q, total);
        self.audit.sub_bias = sub_q;
        let nf = self.n as f64;
        let mut subs = Vec::new();
        let mut boards = Vec::new();
        for (i, (part, &(fa, fb))) in partition.parts.iter().zip(&endpoints).enumerate() {
            let mut verts = part.clone();
            verts.push(fa);
            verts.push(fb);
            verts.sort_unstable();
            let region = Region::new(verts.clone(), self.n);
            let mut g = region.available_graph(state);
            let (la, lb) = (region.local(fa).expect("in region"), region.local(fb).expect("in region"));
            if g.has_edge(la, lb) {
                g = Graph::from_edges(g.vertex_count(), &g.edges().into_iter().filter(|&e| e != (la.min(lb), la.max(lb))).collect::<Vec<_>>());
            }
            let ni = part.len() + 1;
            let need = ni as f64 - 10.0 * ni as f64 * nf.powf(-0.05);
            self.audit.part_degrees.push((g.min_degree(), need));
            if (g.min_degree() as f64) < need {
                self.audit.part_degree_guard = false;
            }
            let sub_seed = self.seed ^ ((i as u64 + 1) << 32);
            let sub = HamPathMaker::new(state, verts, fa, fb, sub_q, self.hampath.clone(), sub_seed)
                .map_err(|e| format!("board {i}: {e}"))?;
            boards.push(region.free_edges(state, Some((fa, fb))));
            subs.push(sub);
        }
        let par = ParallelMaker::new(subs, boards, self.q, state.board_size()).map_err(|e| e.to_string())?;
        self.done = vec![false; paths.len()];
        self.partition = Some(partition);
        self.parallel = Some(par);
        self.audit.stage2_start = Some(self.moves);
        Ok(())
    }

    pub fn params(&self) -> Value {
        json!({
            "bare_threshold": self.threshold,
            "forest_vertices": self.decomposition.forest_vertices.len(),
            "paths": self.decomposition.paths,
        })
    }

    pub fn report(&self) -> Value {
        json!({
            "audit": self.audit,
            "stage1_work_bound_exceeded": self.audit.stage1_embedded as f64 > self.audit.stage1_work_bound,
            "partition": self.partition,
            "parallel": self.parallel.as_ref().map(|p| json!({
                "describe": p.describe(),
                "summary": p.summary(),
            })),
        })
    }
}
