//! Perfect matching on a balanced bipartite region.
//!
//! The Hall game on `E(G)` is the `(q:1)` game whose winning sets are the
//! edge sets `E(A', B')` with `|A'| = t`, `|B'| = r - t + 1`. Maker touching
//! every such set is exactly Hall's condition for his graph, so in exact
//! mode Maker plays the potential Breaker of the Hall game: Breaker's `q`
//! claims are Hall-Maker's claims, Maker's single claim is Hall-Breaker's.

use serde::Serialize;
use serde_json::{json, Value};

use crate::board::{Board, ElementId};
use crate::error::{Error, Result};
use crate::game::{Bias, GameState, Side};
use crate::hypergraph::Hypergraph;
use crate::oracle::checks::{maximum_matching, next_combination};
use crate::parallel::{Step, SubStrategy};
use crate::potential::{beck_sum, criterion_holds, PotentialLedger};

use super::Mode;
#[cfg(test)]
use super::ENUMERATION_CAP;

/// A balanced bipartite board: parts `a` and `b` (board vertices) and the
/// playable edges between them.
#[derive(Debug, Clone, Serialize)]
pub struct BipartiteBoard {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// `(i, j, element)`: local A-index, local B-index, board element.
    pub edges: Vec<(usize, usize, ElementId)>,
    pub slack: usize,
}

impl BipartiteBoard {
    /// All board edges between `a` and `b` that Breaker has not claimed.
    pub fn from_state(state: &GameState, a: Vec<usize>, b: Vec<usize>, slack: usize) -> Result<BipartiteBoard> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Precondition(format!("parts of sizes {} and {}", a.len(), b.len())));
        }
        if a.iter().any(|v| b.contains(v)) {
            return Err(Error::Precondition("parts overlap".into()));
        }
        let board = state.board();
        let mut edges = Vec::new();
        for (i, &u) in a.iter().enumerate() {
            for (j, &v) in b.iter().enumerate() {
                if let Some(e) = board.edge(u, v) {
                    if !state.is_breaker_edge(u, v) {
                        edges.push((i, j, e));
                    }
                }
            }
        }
        edges.sort_by_key(|x| x.2);
        Ok(BipartiteBoard { a, b, edges, slack })
    }

    /// The whole of `K_{r,r}` on a fresh bipartite board.
    pub fn complete(board: &Board, slack: usize) -> Result<BipartiteBoard> {
        let n = board.vertex_count().ok_or_else(|| Error::InvalidBoard("not an edge board".into()))?;
        let r = n / 2;
        let state = GameState::new(std::sync::Arc::new(board.clone()));
        BipartiteBoard::from_state(&state, (0..r).collect(), (r..2 * r).collect(), slack)
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn min_degree(&self) -> usize {
        let r = self.r();
        let mut da = vec![0; r];
        let mut db = vec![0; r];
        for &(i, j, _) in &self.edges {
            da[i] += 1;
            db[j] += 1;
        }
        da.into_iter().chain(db).min().unwrap_or(0)
    }

    /// Minimum degree at least `r - g`.
    pub fn slack_holds(&self) -> bool {
        self.min_degree() + self.slack >= self.r()
    }

    /// Local adjacency of Maker's graph on this board.
    pub fn maker_adjacency(&self, state: &GameState) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.r()];
        for &(i, j, e) in &self.edges {
            if state.owner(e) == crate::game::Owner::Maker {
                adj[i].push(j);
            }
        }
        adj
    }
}

/// `sum_t C(r,t) C(r,r-t+1)`, i.e. `C(2r, r+1)`.
pub fn hall_set_count(r: usize) -> f64 {
    let binom = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k.min(n - k)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    (1..=r).map(|t| binom(r, t) * binom(r, r - t + 1)).sum()
}

/// The Hall game's family over the board's local edge numbering (the
/// position in `board.edges`). Sets may be empty when the board lacks the
/// edges between the chosen parts.
pub fn hall_hypergraph(board: &BipartiteBoard, cap: u64) -> Result<Hypergraph> {
    let r = board.r();
    let count = hall_set_count(r);
    if count > cap as f64 || board.edges.len() > 128 {
        return Err(Error::TooLarge(format!("Hall family of K_{{{r},{r}}} has {count} sets (cap {cap})")));
    }
    let mut from_a = vec![0u128; r];
    let mut to_b = vec![0u128; r];
    for (x, &(i, j, _)) in board.edges.iter().enumerate() {
        from_a[i] |= 1 << x;
        to_b[j] |= 1 << x;
    }
    let union = |masks: &[u128], pick: &[usize]| pick.iter().fold(0u128, |m, &i| m | masks[i]);
    let mut sets = Vec::with_capacity(count as usize);
    for t in 1..=r {
        let s = r - t + 1;
        let mut ca: Vec<usize> = (0..t).collect();
        loop {
            let ma = union(&from_a, &ca);
            let mut cb: Vec<usize> = (0..s).collect();
            loop {
                let mut m = ma & union(&to_b, &cb);
                let mut set = Vec::with_capacity(m.count_ones() as usize);
                while m != 0 {
                    set.push(m.trailing_zeros() as usize);
                    m &= m - 1;
                }
                sets.push(set);
                if !next_combination(&mut cb, r) {
                    break;
                }
            }
            if !next_combination(&mut ca, r) {
                break;
            }
        }
    }
    Hypergraph::with_empty_sets(board.edges.len(), sets)
}

/// Which of the proposition's hypotheses held for this instance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MatchingGuards {
    pub enumerable: bool,
    /// Beck's criterion for the `(q:1)` Hall game.
    pub criterion: bool,
    /// `q <= r / (12 log2 r)`.
    pub bias: bool,
    /// Minimum degree at least `r - g(r)`.
    pub slack: bool,
}

/// Maker strategy claiming a perfect matching of a bipartite board.
pub struct MatchingMaker {
    board: BipartiteBoard,
    q: usize,
    mode: Mode,
    ledger: Option<PotentialLedger>,
    beck: Option<f64>,
    set_count: f64,
    guards: MatchingGuards,
    moves: usize,
}

impl MatchingMaker {
    /// `mode` `Exact` fails when the Hall family exceeds `cap`; `Auto`
    /// falls back to the heuristic instead.
    pub fn new(board: BipartiteBoard, q: usize, mode: Mode, cap: u64, board_size: usize) -> Result<MatchingMaker> {
        if q == 0 {
            return Err(Error::InvalidBias("q must be positive".into()));
        }
        let r = board.r();
        let set_count = hall_set_count(r);
        let family = match mode {
            Mode::Heuristic => None,
            Mode::Exact => Some(hall_hypergraph(&board, cap)?),
            Mode::Auto => hall_hypergraph(&board, cap).ok(),
        };
        let dual = Bias { p: q, q: 1 };
        let bias_guard = r >= 2 && (q as f64) <= r as f64 / (12.0 * (r as f64).log2());
        let guards = MatchingGuards {
            enumerable: set_count <= cap as f64,
            criterion: family.as_ref().is_some_and(|h| criterion_holds(h, dual)),
            bias: bias_guard,
            slack: board.slack_holds(),
        };
        let beck = family.as_ref().map(|h| beck_sum(h, dual));
        let ledger = match &family {
            Some(h) => {
                let map = board.edges.iter().map(|x| x.2).collect();
                Some(PotentialLedger::new(h, Side::Breaker, q, 1, map, board_size)?)
            }
            None => None,
        };
        let mode = if ledger.is_some() { Mode::Exact } else { Mode::Heuristic };
        Ok(MatchingMaker { board, q, mode, ledger, beck, set_count, guards, moves: 0 })
    }

    pub fn board(&self) -> &BipartiteBoard {
        &self.board
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn guards(&self) -> MatchingGuards {
        self.guards
    }

    /// A perfect matching of Maker's graph as `(a, b)` board-vertex pairs.
    pub fn matching(&self, state: &GameState) -> Option<Vec<(usize, usize)>> {
        let r = self.board.r();
        let adj = self.board.maker_adjacency(state);
        let mate = maximum_matching(r, r, &adj);
        mate.iter()
            .enumerate()
            .map(|(i, m)| m.map(|j| (self.board.a[i], self.board.b[j])))
            .collect()
    }

    /// A free edge that enlarges Maker's maximum matching: its A end is
    /// reachable from an unmatched A vertex by an alternating path, its B
    /// end likewise from an unmatched B vertex. Most constrained A end
    /// first, then the B end with the lowest Breaker degree.
    fn heuristic_claim(&self, state: &GameState) -> Option<ElementId> {
        let r = self.board.r();
        let adj = self.board.maker_adjacency(state);
        let mate = maximum_matching(r, r, &adj);
        let mut mate_b: Vec<Option<usize>> = vec![None; r];
        let mut adj_b = vec![Vec::new(); r];
        for (i, m) in mate.iter().enumerate() {
            if let Some(j) = *m {
                mate_b[j] = Some(i);
            }
            for &j in &adj[i] {
                adj_b[j].push(i);
            }
        }
        let reach = |roots: Vec<usize>, nbrs: &[Vec<usize>], other_mate: &[Option<usize>]| {
            let mut seen = vec![false; r];
            let mut stack = roots;
            for &x in &stack {
                seen[x] = true;
            }
            while let Some(x) = stack.pop() {
                for &y in &nbrs[x] {
                    if let Some(x2) = other_mate[y] {
                        if !seen[x2] {
                            seen[x2] = true;
                            stack.push(x2);
                        }
                    }
                }
            }
            seen
        };
        let ra = reach((0..r).filter(|&i| mate[i].is_none()).collect(), &adj, &mate_b);
        let rb = reach((0..r).filter(|&j| mate_b[j].is_none()).collect(), &adj_b, &mate);
        let mut options = vec![0usize; r];
        for &(i, j, e) in &self.board.edges {
            if ra[i] && rb[j] && state.is_free(e) {
                options[i] += 1;
            }
        }
        self.board
            .edges
            .iter()
            .filter(|&&(i, j, e)| ra[i] && rb[j] && state.is_free(e))
            .min_by_key(|&&(i, j, _)| {
                (options[i], mate[i].is_some(), mate_b[j].is_some(), state.breaker_degree(self.board.b[j]), i, j)
            })
            .map(|x| x.2)
    }
}

impl SubStrategy for MatchingMaker {
    fn label(&self) -> String {
        format!("matching[{}]", if self.mode == Mode::Exact { "exact" } else { "heuristic" })
    }

    fn is_complete(&self, state: &GameState) -> bool {
        self.matching(state).is_some()
    }

    fn next_claim(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        let claim = match self.ledger.as_mut() {
            Some(ledger) => ledger.defend(state, 1).first().copied(),
            None => self.heuristic_claim(state),
        };
        match claim {
            Some(e) => {
                self.moves += 1;
                Ok(Step::new(e))
            }
            None => Err("no free edge at an unmatched vertex".into()),
        }
    }

    fn moves_made(&self) -> usize {
        self.moves
    }

    fn params(&self) -> Value {
        json!({
            "r": self.board.r(),
            "q": self.q,
            "mode": self.mode,
            "slack": self.board.slack,
            "hall_sets": self.set_count,
            "beck_sum": self.beck,
            "guards": self.guards,
        })
    }

    fn report(&self) -> Value {
        json!({
            "moves": self.moves,
            "alive_hall_sets": self.ledger.as_ref().map(|l| l.alive_count()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn kr(r: usize) -> (Arc<Board>, BipartiteBoard) {
        let board = Arc::new(Board::bipartite(r).unwrap());
        let bb = BipartiteBoard::complete(&board, 0).unwrap();
        (board, bb)
    }

    #[test]
    fn hall_family_sizes() {
        let (_, b1) = kr(1);
        let h = hall_hypergraph(&b1, ENUMERATION_CAP).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.sets()[0].len(), 1);

        let (_, b2) = kr(2);
        let h = hall_hypergraph(&b2, ENUMERATION_CAP).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.sets().iter().all(|s| s.len() == 2));
    }

    #[test]
    fn closed_form_count() {
        for r in 1..=6 {
            let (_, b) = kr(r);
            let h = hall_hypergraph(&b, ENUMERATION_CAP).unwrap();
            // Vandermonde: C(2r, r+1)
            let expected = (0..r + 1).fold(1u64, |acc, i| acc * (2 * r - i) as u64 / (i + 1) as u64);
            assert_eq!(h.len() as u64, expected, "r={r}");
            assert_eq!(hall_set_count(r) as u64, expected);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let (_, b) = kr(6);
        assert!(matches!(hall_hypergraph(&b, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn single_edge_in_one_move() {
        let (board, b) = kr(1);
        let mut m = MatchingMaker::new(b, 1, Mode::Exact, ENUMERATION_CAP, board.size()).unwrap();
        let mut state = GameState::new(board);
        let step = m.next_claim(&state).unwrap();
        state.apply_claim(Side::Maker, step.claim).unwrap();
        assert!(m.is_complete(&state));
    }
}
