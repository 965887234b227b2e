//! Delegated Maker strategies: perfect matchings through the dual Hall
//! game, Hamilton-connected subgraphs, fixed-endpoint Hamilton paths, and
//! the length-three connector they share with the tree embedder.
//!
//! Each strategy plays on a vertex region of an edge board and proposes one
//! claim per call through [`crate::parallel::SubStrategy`].

pub mod connector;
pub mod hamcon;
pub mod hampath;
pub mod matching;

pub use connector::{Connector, ConnectorStep};
pub use hamcon::{hamcon_hypergraph, HamconMaker, HamconParams};
pub use hampath::{HamPathMaker, HamPathParams};
pub use matching::{hall_hypergraph, hall_set_count, BipartiteBoard, MatchingMaker};

use serde::{Deserialize, Serialize};

use crate::board::ElementId;
use crate::game::GameState;
use crate::graph::Graph;

/// Exact dual potential play or a cheap greedy stand-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Heuristic,
    /// Exact when the dual family is small enough to enumerate.
    #[default]
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "heuristic" => Ok(Mode::Heuristic),
            "auto" => Ok(Mode::Auto),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Default enumeration cap for dual families.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// A set of board vertices with a local numbering `0..k`.
#[derive(Debug, Clone)]
pub struct Region {
    verts: Vec<usize>,
    local: Vec<u32>,
}

const NOT_IN: u32 = u32::MAX;

impl Region {
    pub fn new(verts: Vec<usize>, board_vertices: usize) -> Region {
        let mut local = vec![NOT_IN; board_vertices];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i as u32;
        }
        Region { verts, local }
    }

    pub fn k(&self) -> usize {
        self.verts.len()
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }

    pub fn global(&self, i: usize) -> usize {
        self.verts[i]
    }

    pub fn local(&self, v: usize) -> Option<usize> {
        match self.local.get(v) {
            Some(&i) if i != NOT_IN => Some(i as usize),
            _ => None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.local(v).is_some()
    }

    /// Maker's graph induced on the region, in local numbering.
    pub fn maker_graph(&self, state: &GameState) -> Graph {
        self.graph_where(state, |s, u, v| s.is_maker_edge(u, v))
    }

    /// Region edges not owned by Breaker, in local numbering.
    pub fn available_graph(&self, state: &GameState) -> Graph {
        self.graph_where(state, |s, u, v| s.board().edge(u, v).is_some() && !s.is_breaker_edge(u, v))
    }

    fn graph_where(&self, state: &GameState, keep: impl Fn(&GameState, usize, usize) -> bool) -> Graph {
        let k = self.k();
        let mut g = Graph::new(k);
        for i in 0..k {
            for j in i + 1..k {
                if keep(state, self.verts[i], self.verts[j]) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Breaker's degree of `v` counted inside the region.
    pub fn breaker_degree(&self, state: &GameState, v: usize) -> usize {
        self.verts.iter().filter(|&&u| u != v && state.is_breaker_edge(u, v)).count()
    }

    /// Free board edges inside the region, optionally skipping one pair.
    pub fn free_edges(&self, state: &GameState, skip: Option<(usize, usize)>) -> Vec<ElementId> {
        let mut out = Vec::new();
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                let (u, v) = (self.verts[i], self.verts[j]);
                if let Some((a, b)) = skip {
                    if (u, v) == (a, b) || (u, v) == (b, a) {
                        continue;
                    }
                }
                if let Some(e) = state.board().edge(u, v) {
                    if state.is_free(e) {
                        out.push(e);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// The free element joining `u` and `v`, if any.
pub fn free_edge(state: &GameState, u: usize, v: usize) -> Option<ElementId> {
    state.board().edge(u, v).filter(|&e| state.is_free(e))
}
