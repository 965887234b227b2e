//! Breaker adversaries and a few simple Makers used as opponents in tests
//! and experiments. Every choice breaks ties by the lowest id.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::{Error, Result};
use crate::game::{Decision, GameState, Side, Strategy};
use crate::hypergraph::Hypergraph;
use crate::oracle::minimax::Solver;
use crate::rng::{stream_rng, streams};

/// Never claims anything.
pub struct NullBreaker;

impl Strategy for NullBreaker {
    fn name(&self) -> String {
        "null".into()
    }
    fn side(&self) -> Side {
        Side::Breaker
    }
    fn choose(&mut self, _: &GameState, _: &[ElementId], _: usize) -> Decision {
        Decision::pass()
    }
}

/// Uniformly random free elements from the seeded Breaker stream.
pub struct RandomPlayer {
    side: Side,
    rng: ChaCha8Rng,
}

impl RandomPlayer {
    pub fn breaker(seed: u64) -> RandomPlayer {
        RandomPlayer { side: Side::Breaker, rng: stream_rng(seed, streams::BREAKER) }
    }

    pub fn maker(seed: u64) -> RandomPlayer {
        RandomPlayer { side: Side::Maker, rng: stream_rng(seed, streams::MAKER) }
    }
}

impl Strategy for RandomPlayer {
    fn name(&self) -> String {
        "random".into()
    }
    fn side(&self) -> Side {
        self.side
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let free: Vec<ElementId> = state.free_elements().collect();
        Decision::claim(free.choose_multiple(&mut self.rng, budget).copied().collect())
    }
}

/// Claims the lowest-id free elements.
pub struct LowestFree(pub Side);

impl Strategy for LowestFree {
    fn name(&self) -> String {
        "lowest_free".into()
    }
    fn side(&self) -> Side {
        self.0
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        Decision::claim(state.free_elements().take(budget).collect())
    }
}

/// Claims the free edge whose endpoints carry the most Maker edges.
pub struct MaxDegreeBreaker;

impl Strategy for MaxDegreeBreaker {
    fn name(&self) -> String {
        "max_degree".into()
    }
    fn side(&self) -> Side {
        Side::Breaker
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        if !state.board().is_edge_board() {
            return Decision::claim(state.free_elements().take(budget).collect());
        }
        let mut scored: Vec<(usize, ElementId)> = state
            .free_elements()
            .map(|e| {
                let (u, v) = state.board().endpoints(e);
                (state.maker_degree(u) + state.maker_degree(v), e)
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        Decision::claim(scored.into_iter().take(budget).map(|(_, e)| e).collect())
    }
}

/// Picks a vertex of lowest Maker degree that still has free edges and
/// claims its free edges until none are left, then moves on.
pub struct IsolatorBreaker {
    target: Option<usize>,
}

impl IsolatorBreaker {
    pub fn new() -> IsolatorBreaker {
        IsolatorBreaker { target: None }
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }
}

impl Default for IsolatorBreaker {
    fn default() -> Self {
        IsolatorBreaker::new()
    }
}

fn free_edge_at(state: &GameState, v: usize, n: usize) -> Option<ElementId> {
    (0..n).filter(|&u| u != v).find_map(|u| state.board().edge(v, u).filter(|&e| state.is_free(e)))
}

impl Strategy for IsolatorBreaker {
    fn name(&self) -> String {
        "isolator".into()
    }
    fn side(&self) -> Side {
        Side::Breaker
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let Some(n) = state.vertex_count() else {
            return Decision::claim(state.free_elements().take(budget).collect());
        };
        let mut scratch = state.clone();
        let mut picks = Vec::with_capacity(budget);
        while picks.len() < budget {
            let keep = self.target.filter(|&t| free_edge_at(&scratch, t, n).is_some());
            let target = match keep {
                Some(t) => t,
                None => {
                    let next = (0..n)
                        .filter(|&v| free_edge_at(&scratch, v, n).is_some())
                        .min_by_key(|&v| (scratch.maker_degree(v), v));
                    match next {
                        Some(v) => v,
                        None => break,
                    }
                }
            };
            self.target = Some(target);
            let e = free_edge_at(&scratch, target, n).expect("target has a free edge");
            scratch.apply_claim(Side::Breaker, e).expect("free edge");
            picks.push(e);
        }
        Decision::noted(picks, self.target.map(|t| format!("target={t}")).unwrap_or_default())
    }
}

/// The triangle-factor delayer: answers Maker's edge `(x, y)` by claiming
/// the third edge of a triangle Maker threatens through it.
pub struct TriangleDelayer;

/// The delayer's reply to Maker's last edge `(x, y)`, `x < y`.
pub fn triangle_delayer_move(state: &GameState, maker_last: Option<(usize, usize)>) -> Option<ElementId> {
    let n = state.vertex_count()?;
    if let Some((x, y)) = maker_last {
        for (a, b) in [(x, y), (y, x)] {
            for z in 0..n {
                if z == a || z == b {
                    continue;
                }
                if state.is_maker_edge(a, z) && state.is_free_edge(b, z) {
                    return state.board().edge(b, z);
                }
            }
        }
    }
    state.free_elements().next()
}

impl Strategy for TriangleDelayer {
    fn name(&self) -> String {
        "triangle_delayer".into()
    }
    fn side(&self) -> Side {
        Side::Breaker
    }
    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], budget: usize) -> Decision {
        if budget == 0 {
            return Decision::pass();
        }
        let last = opponent_last.first().map(|&e| {
            let (u, v) = state.board().endpoints(e);
            (u.min(v), u.max(v))
        });
        let mut picks = Vec::new();
        let mut scratch = state.clone();
        if let Some(e) = triangle_delayer_move(state, last) {
            scratch.apply_claim(Side::Breaker, e).expect("free");
            picks.push(e);
        }
        picks.extend(scratch.free_elements().take(budget - picks.len()));
        Decision::claim(picks)
    }
}

/// Optimal Breaker on a small explicit hypergraph, via the minimax solver.
pub struct MinimaxBreaker {
    solver: Solver,
    fallbacks: usize,
}

impl MinimaxBreaker {
    pub fn new(h: &Hypergraph, bias: crate::game::Bias, node_cap: u64) -> Result<MinimaxBreaker> {
        Ok(MinimaxBreaker { solver: Solver::new(h, bias, node_cap)?, fallbacks: 0 })
    }
}

fn masks(state: &GameState) -> (u32, u32) {
    let mut m = 0u32;
    let mut b = 0u32;
    for (i, o) in state.ownership().iter().enumerate() {
        match o {
            crate::game::Owner::Maker => m |= 1 << i,
            crate::game::Owner::Breaker => b |= 1 << i,
            crate::game::Owner::Free => {}
        }
    }
    (m, b)
}

fn unmask(mask: u32) -> Vec<ElementId> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(ElementId).collect()
}

impl Strategy for MinimaxBreaker {
    fn name(&self) -> String {
        "minimax".into()
    }
    fn side(&self) -> Side {
        Side::Breaker
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let (m, b) = masks(state);
        match self.solver.best_move(m, b, Side::Breaker) {
            Some(mv) => Decision::claim(unmask(mv).into_iter().take(budget).collect()),
            None => {
                self.fallbacks += 1;
                Decision::noted(state.free_elements().take(budget).collect(), "minimax inconclusive; lowest free")
            }
        }
    }
    fn report(&self) -> Value {
        json!({ "fallbacks": self.fallbacks, "nodes": self.solver.nodes() })
    }
}

/// Optimal Maker on a small explicit hypergraph.
pub struct MinimaxMaker {
    solver: Solver,
}

impl MinimaxMaker {
    pub fn new(h: &Hypergraph, bias: crate::game::Bias, node_cap: u64) -> Result<MinimaxMaker> {
        Ok(MinimaxMaker { solver: Solver::new(h, bias, node_cap)? })
    }
}

impl Strategy for MinimaxMaker {
    fn name(&self) -> String {
        "minimax".into()
    }
    fn side(&self) -> Side {
        Side::Maker
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let (m, b) = masks(state);
        match self.solver.best_move(m, b, Side::Maker) {
            Some(mv) => Decision::claim(unmask(mv).into_iter().take(budget).collect()),
            None => Decision::noted(state.free_elements().take(budget).collect(), "minimax inconclusive; lowest free"),
        }
    }
}

/// Greedy triangle-factor builder: closes a triangle on uncovered vertices
/// when it can, otherwise adds an edge between uncovered vertices that
/// shares an endpoint with its own edges.
pub struct TriangleGreedyMaker;

impl Strategy for TriangleGreedyMaker {
    fn name(&self) -> String {
        "triangle_greedy".into()
    }
    fn side(&self) -> Side {
        Side::Maker
    }
    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let Some(n) = state.vertex_count() else {
            return Decision::claim(state.free_elements().take(budget).collect());
        };
        let g = crate::graph::Graph::from_edges(n, &state.maker_edges());
        let covered = greedy_triangle_cover(&g);
        let mut best: Option<(u8, ElementId)> = None;
        for e in state.free_elements() {
            let (u, v) = state.board().endpoints(e);
            if covered[u] || covered[v] {
                continue;
            }
            let closes = (0..n).any(|z| !covered[z] && z != u && z != v && g.has_edge(u, z) && g.has_edge(v, z));
            let touches = g.degree(u) > 0 || g.degree(v) > 0;
            let score = if closes { 2 } else if touches { 1 } else { 0 };
            if best.map_or(true, |(s, _)| score > s) {
                best = Some((score, e));
            }
        }
        match best {
            Some((_, e)) => Decision::claim(vec![e]),
            None => Decision::claim(state.free_elements().take(budget.min(1)).collect()),
        }
    }
}

/// Vertices covered by a greedily chosen set of disjoint triangles.
fn greedy_triangle_cover(g: &crate::graph::Graph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut covered = vec![false; n];
    for u in 0..n {
        if covered[u] {
            continue;
        }
        'found: for &v in g.neighbors(u) {
            if covered[v] {
                continue;
            }
            for &w in g.neighbors(v) {
                if w != u && !covered[w] && g.has_edge(u, w) {
                    covered[u] = true;
                    covered[v] = true;
                    covered[w] = true;
                    break 'found;
                }
            }
        }
    }
    covered
}

/// Breaker adversaries available by name on edge boards.
pub fn breaker_by_name(name: &str, seed: u64) -> Result<Box<dyn Strategy>> {
    Ok(match name {
        "null" => Box::new(NullBreaker),
        "random" => Box::new(RandomPlayer::breaker(seed)),
        "max_degree" | "max_free_degree" => Box::new(MaxDegreeBreaker),
        "isolator" => Box::new(IsolatorBreaker::new()),
        "triangle_delayer" => Box::new(TriangleDelayer),
        "lowest_free" => Box::new(LowestFree(Side::Breaker)),
        other => return Err(Error::Config(format!("unknown breaker `{other}`"))),
    })
}

pub const BREAKER_NAMES: &[&str] = &["null", "random", "max_degree", "isolator", "triangle_delayer", "lowest_free"];

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::board::Board;
    use crate::game::{run_game, Bias, GameSetup, WinRule};

    #[test]
    fn isolator_on_k4_takes_the_star_of_vertex_0() {
        let board = Arc::new(Board::complete(4).unwrap());
        let setup = GameSetup::new("iso", Bias::new(1, 1).unwrap(), Side::Breaker, 0).with_cap(6);
        struct Passive;
        impl Strategy for Passive {
            fn name(&self) -> String {
                "passive".into()
            }
            fn side(&self) -> Side {
                Side::Maker
            }
            fn choose(&mut self, _: &GameState, _: &[ElementId], _: usize) -> Decision {
                Decision::pass()
            }
        }
        let (t, s) = run_game(board.clone(), &setup, &mut Passive, &mut IsolatorBreaker::new(), &WinRule::Never);
        assert_eq!(t.breaker_moves(), 3);
        for v in 1..4 {
            assert!(s.is_breaker_edge(0, v));
        }
    }

    #[test]
    fn delayer_blocks_the_path_triangle() {
        let board = Arc::new(Board::complete(4).unwrap());
        let mut s = GameState::new(board.clone());
        s.apply_claim(Side::Maker, board.edge(1, 2).unwrap()).unwrap();
        s.apply_claim(Side::Maker, board.edge(2, 3).unwrap()).unwrap();
        assert_eq!(triangle_delayer_move(&s, Some((2, 3))), board.edge(1, 3));
        let fresh = GameState::new(board.clone());
        assert_eq!(triangle_delayer_move(&fresh, None), Some(ElementId(0)));
        // both completions already Breaker's: fallback to lowest free
        let mut t = GameState::new(board.clone());
        t.apply_claim(Side::Maker, board.edge(0, 1).unwrap()).unwrap();
        t.apply_claim(Side::Maker, board.edge(1, 2).unwrap()).unwrap();
        t.apply_claim(Side::Breaker, board.edge(0, 2).unwrap()).unwrap();
        assert_eq!(triangle_delayer_move(&t, Some((1, 2))), board.edge(0, 3));
    }

    #[test]
    fn random_breaker_is_replayable() {
        let board = Arc::new(Board::complete(6).unwrap());
        let setup = GameSetup::new("r", Bias::new(1, 2).unwrap(), Side::Maker, 11);
        let run = || run_game(board.clone(), &setup, &mut LowestFree(Side::Maker), &mut RandomPlayer::breaker(11), &WinRule::Never).0;
        assert_eq!(run(), run());
    }
}
