//! Joining a vertex `v` to an anchor `u` by a Maker path `u - x - y - v`
//! through an independent set of Breaker's graph.
//!
//! Maker first claims `c` edges from `v` into `I`, then `c` edges from `u`
//! into the rest of `I`, then one edge between the two neighbourhoods.

use serde::Serialize;

use crate::board::ElementId;
use crate::game::GameState;

use super::free_edge;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectorStep {
    Claim(ElementId),
    /// Maker owns `u-x`, `x-y` and `y-v`.
    Done { x: usize, y: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Connector {
    pub u: usize,
    pub v: usize,
    pub c: usize,
    pub budget: usize,
    independent: Vec<usize>,
    moves: usize,
}

impl Connector {
    /// `candidates` are the vertices the path may pass through; `u`, `v`
    /// and Breaker-neighbours of either are dropped before the greedy
    /// independent set is built in ascending id order.
    pub fn new(state: &GameState, u: usize, v: usize, candidates: &[usize], c: usize, budget: usize) -> Connector {
        let mut sorted: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&w| w != u && w != v && !state.is_breaker_edge(w, u) && !state.is_breaker_edge(w, v))
            .collect();
        sorted.sort_unstable();
        sorted.dedup();
        let mut independent: Vec<usize> = Vec::new();
        for w in sorted {
            if independent.iter().all(|&x| !state.is_breaker_edge(x, w)) {
                independent.push(w);
            }
        }
        Connector { u, v, c: c.max(1), budget, independent, moves: 0 }
    }

    pub fn independent_set(&self) -> &[usize] {
        &self.independent
    }

    pub fn moves(&self) -> usize {
        self.moves
    }

    pub fn next(&mut self, state: &GameState) -> Result<ConnectorStep, String> {
        let nv: Vec<usize> = self.independent.iter().copied().filter(|&w| state.is_maker_edge(w, self.v)).collect();
        let rest: Vec<usize> = self.independent.iter().copied().filter(|w| !nv.contains(w)).collect();
        let nu: Vec<usize> = rest.iter().copied().filter(|&w| state.is_maker_edge(w, self.u)).collect();

        for &y in &nv {
            for &x in &nu {
                if state.is_maker_edge(x, y) {
                    return Ok(ConnectorStep::Done { x, y });
                }
            }
        }
        if self.moves >= self.budget {
            return Err(format!("connector budget {} exhausted", self.budget));
        }
        if nv.len() < self.c {
            if let Some(e) = rest.iter().find_map(|&w| free_edge(state, self.v, w)) {
                return Ok(self.claim(e));
            }
        }
        if nv.is_empty() {
            return Err(format!("no free edge from {} into the independent set", self.v));
        }
        if nu.len() < self.c {
            if let Some(e) = rest.iter().filter(|w| !nu.contains(w)).find_map(|&w| free_edge(state, self.u, w)) {
                return Ok(self.claim(e));
            }
        }
        for &y in &nv {
            for &x in &nu {
                if let Some(e) = free_edge(state, x, y) {
                    return Ok(self.claim(e));
                }
            }
        }
        Err(format!("no bridging edge between the neighbourhoods of {} and {}", self.u, self.v))
    }

    fn claim(&mut self, e: ElementId) -> ConnectorStep {
        self.moves += 1;
        ConnectorStep::Claim(e)
    }
}
