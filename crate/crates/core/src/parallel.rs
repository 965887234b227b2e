//! Playing several disjoint sub-games at once under a global `(1:q)` bias.
//!
//! Each sub-board is a box whose weight is the number of Breaker claims on
//! it since Maker last played there, divided by `q`. Maker plays on a box of
//! maximum weight (lowest index on ties); when that board is already won,
//! its box is emptied and Maker plays on the lowest-index unfinished board
//! instead.

use serde_json::{json, Value};

use crate::board::ElementId;
use crate::boxgame::cbox_breaker_reset;
use crate::error::{Error, Result};
use crate::game::{Decision, GameState, Side, Strategy};

/// One Maker claim proposed by a sub-strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub claim: ElementId,
    pub note: String,
}

impl Step {
    pub fn new(claim: ElementId) -> Step {
        Step { claim, note: String::new() }
    }

    pub fn noted(claim: ElementId, note: impl Into<String>) -> Step {
        Step { claim, note: note.into() }
    }
}

/// A Maker strategy for a single-claim-per-turn sub-game with its own
/// completion predicate.
pub trait SubStrategy {
    fn label(&self) -> String;
    fn is_complete(&self, state: &GameState) -> bool;
    /// The next claim, or a forfeit reason.
    fn next_claim(&mut self, state: &GameState) -> std::result::Result<Step, String>;
    fn moves_made(&self) -> usize;
    fn params(&self) -> Value {
        Value::Null
    }
    fn report(&self) -> Value {
        Value::Null
    }
}

/// Runs a sub-strategy as a stand-alone Maker.
pub struct SoloMaker<S: SubStrategy> {
    pub inner: S,
}

impl<S: SubStrategy> SoloMaker<S> {
    pub fn new(inner: S) -> SoloMaker<S> {
        SoloMaker { inner }
    }
}

impl<S: SubStrategy> Strategy for SoloMaker<S> {
    fn name(&self) -> String {
        self.inner.label()
    }

    fn side(&self) -> Side {
        Side::Maker
    }

    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        if budget == 0 || self.inner.is_complete(state) {
            return Decision::pass();
        }
        match self.inner.next_claim(state) {
            Ok(step) => Decision::noted(vec![step.claim], step.note),
            Err(reason) => Decision::forfeit(reason),
        }
    }

    fn completed(&self, state: &GameState) -> bool {
        self.inner.is_complete(state)
    }

    fn params(&self) -> Value {
        self.inner.params()
    }

    fn report(&self) -> Value {
        self.inner.report()
    }
}

/// `ceil(q (1 + ln(m + ceil(total / (q+1)))))`.
pub fn inflated_bias(m: usize, q: usize, total_elements: usize) -> usize {
    (q as f64 * (1.0 + ((m + k_cap(q, total_elements)) as f64).ln())).ceil() as usize
}

/// `ceil(total / (q+1))`, the round bound of the composite game.
pub fn k_cap(q: usize, total_elements: usize) -> usize {
    total_elements.div_ceil(q + 1)
}

/// Real-valued bound on Breaker claims on one board between Maker visits.
pub fn between_visit_bound(m: usize, q: usize, total_elements: usize) -> f64 {
    q as f64 * (1.0 + ((m + k_cap(q, total_elements)) as f64).ln())
}

/// Board choice for the next Maker move from the per-board Breaker counts
/// since the last visit. Returns `(board, emptied)` where `emptied` is a
/// finished board whose box was selected and zeroed instead, or `None`
/// when every board is finished.
pub fn schedule_move(since_visit: &[usize], q: usize, finished: &[bool]) -> Option<(usize, Option<usize>)> {
    if finished.iter().all(|&f| f) {
        return None;
    }
    let weights: Vec<f64> = since_visit.iter().map(|&c| c as f64 / q as f64).collect();
    let j = cbox_breaker_reset(&weights);
    if !finished[j] {
        return Some((j, None));
    }
    let r = finished.iter().position(|&f| !f).expect("some board unfinished");
    Some((r, Some(j)))
}

/// Composite Maker over disjoint sub-boards.
pub struct ParallelMaker<S: SubStrategy> {
    subs: Vec<S>,
    boards: Vec<Vec<ElementId>>,
    board_of: Vec<u32>,
    q: usize,
    budgets: Vec<Option<usize>>,
    since_visit: Vec<usize>,
    visits: Vec<usize>,
    max_between: Vec<usize>,
    outside_claims: usize,
    total: usize,
}

const NO_BOARD: u32 = u32::MAX;

impl<S: SubStrategy> ParallelMaker<S> {
    /// `boards[i]` is the element set `V_i` played by `subs[i]`.
    pub fn new(subs: Vec<S>, boards: Vec<Vec<ElementId>>, q: usize, board_size: usize) -> Result<ParallelMaker<S>> {
        if subs.is_empty() || subs.len() != boards.len() {
            return Err(Error::Precondition("need one sub-board per sub-strategy, at least one".into()));
        }
        if q == 0 {
            return Err(Error::InvalidBias("q must be positive".into()));
        }
        let mut board_of = vec![NO_BOARD; board_size];
        for (i, b) in boards.iter().enumerate() {
            for e in b {
                if e.index() >= board_size {
                    return Err(Error::OutOfRange(e.index(), board_size));
                }
                if board_of[e.index()] != NO_BOARD {
                    return Err(Error::Precondition(format!("element {e} lies on two sub-boards")));
                }
                board_of[e.index()] = i as u32;
            }
        }
        let m = subs.len();
        let total = boards.iter().map(Vec::len).sum();
        Ok(ParallelMaker {
            subs,
            boards,
            board_of,
            q,
            budgets: vec![None; m],
            since_visit: vec![0; m],
            visits: vec![0; m],
            max_between: vec![0; m],
            outside_claims: 0,
            total,
        })
    }

    pub fn with_budgets(mut self, budgets: Vec<Option<usize>>) -> ParallelMaker<S> {
        self.budgets = budgets;
        self
    }

    pub fn subs(&self) -> &[S] {
        &self.subs
    }

    pub fn m(&self) -> usize {
        self.subs.len()
    }

    pub fn bound(&self) -> f64 {
        between_visit_bound(self.m(), self.q, self.total)
    }

    pub fn board_of(&self, e: ElementId) -> Option<usize> {
        match self.board_of.get(e.index()) {
            Some(&b) if b != NO_BOARD => Some(b as usize),
            _ => None,
        }
    }

    /// Feeds the opponent's claims into the per-board counters.
    pub fn observe(&mut self, claims: &[ElementId]) {
        for &e in claims {
            match self.board_of(e) {
                Some(i) => self.since_visit[i] += 1,
                None => self.outside_claims += 1,
            }
        }
    }

    /// One composite move: schedule a board and delegate to it.
    pub fn step(&mut self, state: &GameState) -> std::result::Result<Option<Step>, String> {
        let finished: Vec<bool> = self.subs.iter().map(|s| s.is_complete(state)).collect();
        let Some((j, emptied)) = schedule_move(&self.since_visit, self.q, &finished) else {
            return Ok(None);
        };
        if let Some(e) = emptied {
            self.since_visit[e] = 0;
        }
        if let Some(t) = self.budgets[j] {
            if self.subs[j].moves_made() >= t {
                return Err(format!("board {j}: move budget {t} exhausted"));
            }
        }
        let step = self.subs[j].next_claim(state).map_err(|r| format!("board {j}: {r}"))?;
        if self.board_of(step.claim) != Some(j) {
            return Err(format!("board {j}: claim {} lies outside its board", step.claim));
        }
        self.max_between[j] = self.max_between[j].max(self.since_visit[j]);
        self.since_visit[j] = 0;
        self.visits[j] += 1;
        let note = if step.note.is_empty() { format!("board={j}") } else { format!("board={j} {}", step.note) };
        Ok(Some(Step { claim: step.claim, note }))
    }

    pub fn all_complete(&self, state: &GameState) -> bool {
        self.subs.iter().all(|s| s.is_complete(state))
    }

    pub fn describe(&self) -> Value {
        json!({
            "m": self.m(),
            "q": self.q,
            "total_elements": self.total,
            "k_cap": k_cap(self.q, self.total),
            "inflated_bias": inflated_bias(self.m(), self.q, self.total),
            "between_visit_bound": self.bound(),
            "boards": self.boards,
        })
    }

    pub fn summary(&self) -> Value {
        json!({
            "visits": self.visits,
            "max_between_visits": self.max_between,
            "outside_claims": self.outside_claims,
            "subs": self.subs.iter().map(|s| s.report()).collect::<Vec<_>>(),
        })
    }
}

impl<S: SubStrategy> Strategy for ParallelMaker<S> {
    fn name(&self) -> String {
        format!("parallel({})", self.subs.iter().map(|s| s.label()).collect::<Vec<_>>().join(","))
    }

    fn side(&self) -> Side {
        Side::Maker
    }

    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], _budget: usize) -> Decision {
        self.observe(opponent_last);
        match self.step(state) {
            Ok(Some(step)) => Decision::noted(vec![step.claim], step.note),
            Ok(None) => Decision::noted(vec![], "scheduler complete"),
            Err(reason) => Decision::forfeit(reason),
        }
    }

    fn completed(&self, state: &GameState) -> bool {
        self.all_complete(state)
    }

    fn params(&self) -> Value {
        json!({ "parallel": self.describe() })
    }

    fn report(&self) -> Value {
        json!({ "parallel": self.summary() })
    }
}

/// Sub-game "own every element of a fixed set", claiming in id order.
pub struct ClaimAll {
    pub targets: Vec<ElementId>,
    moves: usize,
}

impl ClaimAll {
    pub fn new(targets: Vec<ElementId>) -> ClaimAll {
        ClaimAll { targets, moves: 0 }
    }
}

impl SubStrategy for ClaimAll {
    fn label(&self) -> String {
        "claim_all".into()
    }

    fn is_complete(&self, state: &GameState) -> bool {
        self.targets.iter().all(|&e| state.owner(e) == crate::game::Owner::Maker)
    }

    fn next_claim(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        if self.targets.iter().any(|&e| state.owner(e) == crate::game::Owner::Breaker) {
            return Err("a target element was claimed by Breaker".into());
        }
        let e = self.targets.iter().copied().find(|&e| state.is_free(e)).ok_or("no free target")?;
        self.moves += 1;
        Ok(Step::new(e))
    }

    fn moves_made(&self) -> usize {
        self.moves
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::board::Board;
    use crate::game::{run_game, Bias, GameSetup, WinRule};
    use crate::transcript::Outcome;

    #[test]
    fn inflated_bias_examples() {
        assert_eq!(inflated_bias(2, 1, 20), 4);
        assert_eq!(inflated_bias(1, 1, 2), 2);
        let a = between_visit_bound(3, 2, 30) / 2.0;
        let b = 1.0 + ((3 + k_cap(2, 30)) as f64).ln();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn scheduler_examples() {
        assert_eq!(schedule_move(&[0, 1], 1, &[false, false]), Some((1, None)));
        assert_eq!(schedule_move(&[1, 1], 2, &[false, false]), Some((0, None)));
        assert_eq!(schedule_move(&[0, 3, 1], 1, &[false, true, false]), Some((0, Some(1))));
        assert_eq!(schedule_move(&[0, 0], 1, &[true, true]), None);
    }

    #[test]
    fn two_singleton_boards() {
        let board = Arc::new(Board::elements(2).unwrap());
        let subs = vec![ClaimAll::new(vec![ElementId(0)]), ClaimAll::new(vec![ElementId(1)])];
        let mut maker = ParallelMaker::new(subs, vec![vec![ElementId(0)], vec![ElementId(1)]], 1, 2).unwrap();
        struct Idle;
        impl Strategy for Idle {
            fn name(&self) -> String {
                "idle".into()
            }
            fn side(&self) -> Side {
                Side::Breaker
            }
            fn choose(&mut self, _: &GameState, _: &[ElementId], _: usize) -> Decision {
                Decision::pass()
            }
        }
        let setup = GameSetup::new("parallel", Bias::new(1, 1).unwrap(), Side::Maker, 0);
        let (t, _) = run_game(board, &setup, &mut maker, &mut Idle, &WinRule::MakerDeclared);
        assert_eq!(t.outcome, Outcome::MakerWin { move_index: 2 });
        assert_eq!(t.maker_moves(), 2);
    }

    #[test]
    fn overlapping_boards_are_rejected() {
        let subs = vec![ClaimAll::new(vec![]), ClaimAll::new(vec![])];
        assert!(ParallelMaker::new(subs, vec![vec![ElementId(0)], vec![ElementId(0)]], 1, 2).is_err());
    }
}
