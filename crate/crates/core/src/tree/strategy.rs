//! The spanning-tree Maker: tree analysis, then the Case I or Case II
//! pipeline, one edge per turn.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::{Error, Result};
use crate::game::{Decision, GameState, Side, Strategy};
use crate::subgames::{HamPathParams, Mode, ENUMERATION_CAP};

use super::case1::CaseOne;
use super::case2::CaseTwo;
use super::census::{classify, degree_census, DegreeCensus, TreeCase};
use super::embed::PartialEmbedding;
use super::partition::PartitionConfig;
use super::TreeSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub alpha: f64,
    pub epsilon: f64,
    /// Bare paths of at least `n^bare_exponent` edges are cut out in Case II.
    pub bare_exponent: f64,
    /// Case I danger threshold `n^danger_exponent`.
    pub danger_exponent: f64,
    /// Connector budget `connector_coeff * n^alpha`.
    pub connector_coeff: f64,
    /// Connector fan-out `c = connector_fan * n^alpha`.
    pub connector_fan: f64,
    /// Audit cap on Breaker degrees of available/open vertices, `n^open_degree_exponent`.
    pub open_degree_exponent: f64,
    /// Forfeit after `cap_factor * n` Maker moves.
    pub cap_factor: usize,
    /// Reported move slack `C n^0.95`.
    pub move_coeff: f64,
    pub move_exponent: f64,
    pub partition: PartitionConfig,
    pub matching_mode: Mode,
    pub matching_cap: u64,
    pub hampath: HamPathParams,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            alpha: 0.004,
            epsilon: 0.04,
            bare_exponent: 0.2,
            danger_exponent: 0.5,
            connector_coeff: 11.0,
            connector_fan: 5.0,
            open_degree_exponent: 0.6,
            cap_factor: 2,
            move_coeff: 10.0,
            move_exponent: 0.95,
            partition: PartitionConfig::default(),
            matching_mode: Mode::Auto,
            matching_cap: ENUMERATION_CAP,
            hampath: HamPathParams::default(),
        }
    }
}

impl ThresholdConfig {
    pub fn n_alpha(&self, n: usize) -> f64 {
        (n as f64).powf(self.alpha)
    }

    pub fn danger(&self, n: usize) -> f64 {
        (n as f64).powf(self.danger_exponent)
    }

    pub fn bare_len(&self, n: usize) -> f64 {
        (n as f64).powf(self.bare_exponent)
    }

    pub fn connector_budget(&self, n: usize) -> usize {
        (self.connector_coeff * self.n_alpha(n)).floor() as usize
    }

    pub fn connector_c(&self, n: usize) -> usize {
        ((self.connector_fan * self.n_alpha(n)).floor() as usize).max(1)
    }

    pub fn move_bound(&self, n: usize) -> f64 {
        n as f64 + self.move_coeff * (n as f64).powf(self.move_exponent)
    }
}

/// Which theorem hypotheses hold for this run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TreeGuards {
    pub max_degree: bool,
    pub bias: bool,
    pub alpha_range: bool,
    pub epsilon_range: bool,
}

/// Per-call view shared by both pipelines. `tokens` collects the
/// `embed=x:v` records attached to the next move's note.
pub(crate) struct Ctx<'a> {
    pub tree: &'a TreeSpec,
    pub state: &'a GameState,
    pub emb: &'a mut PartialEmbedding,
    pub tokens: Vec<String>,
}

impl Ctx<'_> {
    pub fn embed(&mut self, x: usize, v: usize) -> std::result::Result<(), String> {
        self.emb.embed(x, v)?;
        self.tokens.push(format!("embed={x}:{v}"));
        Ok(())
    }

    /// Lowest-id available board vertex joined to `v` by a free edge.
    pub fn free_available_neighbor(&self, v: usize) -> Option<usize> {
        let n = self.state.vertex_count().unwrap_or(0);
        (0..n).find(|&u| u != v && !self.emb.is_taken(u) && self.state.is_free_edge(v, u))
    }
}

/// A move proposed by a pipeline: the claim and its note.
pub(crate) type Proposal = std::result::Result<Option<(ElementId, String)>, String>;

enum Pipeline {
    One(Box<CaseOne>),
    Two(Box<CaseTwo>),
}

pub struct TreeEmbedMaker {
    tree: TreeSpec,
    q: usize,
    cfg: ThresholdConfig,
    seed: u64,
    census: DegreeCensus,
    case: TreeCase,
    guards: TreeGuards,
    emb: PartialEmbedding,
    pipeline: Pipeline,
    moves: usize,
    forfeit: Option<String>,
}

impl TreeEmbedMaker {
    /// Maker for a copy of `tree` on `K_n`, `n = tree.n()`, against
    /// Breaker bias `q`.
    pub fn new(tree: TreeSpec, board_vertices: usize, q: usize, cfg: ThresholdConfig, seed: u64) -> Result<TreeEmbedMaker> {
        let n = tree.n();
        if board_vertices != n {
            return Err(Error::Precondition(format!("tree has {n} vertices, board has {board_vertices}")));
        }
        if q == 0 {
            return Err(Error::InvalidBias("q must be positive".into()));
        }
        let census = degree_census(&tree)?;
        let case = classify(&census);
        let nf = n as f64;
        let guards = TreeGuards {
            max_degree: tree.max_degree() as f64 <= nf.powf(cfg.epsilon),
            bias: q as f64 <= nf.powf(cfg.alpha),
            alpha_range: cfg.alpha > 0.0 && cfg.alpha < 0.005,
            epsilon_range: cfg.epsilon > 0.0 && cfg.epsilon < 0.05,
        };
        let pipeline = match case {
            TreeCase::CaseI => Pipeline::One(Box::new(CaseOne::new(&tree, &census, &cfg, q)?)),
            TreeCase::CaseII => Pipeline::Two(Box::new(CaseTwo::new(&tree, &cfg, q, seed))),
        };
        Ok(TreeEmbedMaker {
            emb: PartialEmbedding::new(n, n),
            tree,
            q,
            cfg,
            seed,
            census,
            case,
            guards,
            pipeline,
            moves: 0,
            forfeit: None,
        })
    }

    pub fn case(&self) -> TreeCase {
        self.case
    }

    pub fn embedding(&self) -> &PartialEmbedding {
        &self.emb
    }

    pub fn guards(&self) -> TreeGuards {
        self.guards
    }

    pub fn moves(&self) -> usize {
        self.moves
    }

    pub fn tree(&self) -> &TreeSpec {
        &self.tree
    }

    fn propose(&mut self, state: &GameState, opponent_last: &[ElementId]) -> (Proposal, Vec<String>) {
        let mut ctx = Ctx { tree: &self.tree, state, emb: &mut self.emb, tokens: Vec::new() };
        let p = match &mut self.pipeline {
            Pipeline::One(c) => c.step(&mut ctx),
            Pipeline::Two(c) => c.step(&mut ctx, opponent_last),
        };
        (p, ctx.tokens)
    }
}

impl Strategy for TreeEmbedMaker {
    fn name(&self) -> String {
        "tree_embed".into()
    }

    fn side(&self) -> Side {
        Side::Maker
    }

    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], _budget: usize) -> Decision {
        let cap = self.cfg.cap_factor * self.tree.n();
        if self.moves >= cap {
            let reason = format!("move cap {cap} reached");
            self.forfeit = Some(reason.clone());
            return Decision::forfeit(reason);
        }
        let (proposal, tokens) = self.propose(state, opponent_last);
        match proposal {
            Ok(Some((e, note))) => {
                self.moves += 1;
                let mut parts = vec![note];
                parts.extend(tokens);
                Decision::noted(vec![e], parts.join(" "))
            }
            Ok(None) => {
                let mut parts = vec!["rule=idle".to_string()];
                parts.extend(tokens);
                Decision::noted(vec![], parts.join(" "))
            }
            Err(reason) => {
                self.forfeit = Some(reason.clone());
                Decision::forfeit(reason)
            }
        }
    }

    fn completed(&self, state: &GameState) -> bool {
        self.emb.is_total() && self.emb.violation(&self.tree, state).is_none()
    }

    fn params(&self) -> Value {
        let n = self.tree.n();
        json!({
            "n": n,
            "q": self.q,
            "seed": self.seed,
            "tree": self.tree.edges(),
            "case": self.case,
            "census": {
                "d1": self.census.d1.len(),
                "d2": self.census.d2.len(),
                "d_gt2": self.census.d_gt2.len(),
                "leaf_neighbors": self.census.leaf_neighbors.len(),
            },
            "config": self.cfg,
            "thresholds": {
                "leaf_split": super::census::leaf_split(n),
                "bare_len": self.cfg.bare_len(n),
                "danger": self.cfg.danger(n),
                "connector_budget": self.cfg.connector_budget(n),
                "connector_c": self.cfg.connector_c(n),
                "move_cap": self.cfg.cap_factor * n,
                "move_bound": self.cfg.move_bound(n),
            },
            "guards": self.guards,
            "pipeline": match &self.pipeline {
                Pipeline::One(c) => c.params(),
                Pipeline::Two(c) => c.params(),
            },
        })
    }

    fn report(&self) -> Value {
        let n = self.tree.n();
        json!({
            "case": self.case,
            "moves": self.moves,
            "move_bound": self.cfg.move_bound(n),
            "move_bound_exceeded": self.moves as f64 > self.cfg.move_bound(n),
            "embedded": self.emb.len(),
            "embedding": self.emb.map(),
            "forfeit": self.forfeit,
            "pipeline": match &self.pipeline {
                Pipeline::One(c) => c.report(),
                Pipeline::Two(c) => c.report(),
            },
        })
    }
}
