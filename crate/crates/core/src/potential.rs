//! Beck's criterion, greedy potential play and the fake-moves wrapper.
//!
//! For a `(p:q)` game with winning family `F`, a set `B` that Breaker has
//! not touched contributes `lambda^(-u(B))` to the potential, where
//! `lambda = (1+q)^(1/p)` and `u(B)` counts the elements of `B` Maker has
//! not claimed yet.

use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::{Error, Result};
use crate::game::{Bias, Decision, GameState, Owner, Side, Strategy};
use crate::hypergraph::Hypergraph;

const LOG_THRESHOLD: f64 = 500.0;
const TIE_EPS: f64 = 1e-12;

/// `sum_B (1+q)^(-|B|/p)`, switching to log-sum-exp when some `|B|/p`
/// exceeds 500.
pub fn beck_sum(h: &Hypergraph, bias: Bias) -> f64 {
    let ln_base = ((1 + bias.q) as f64).ln();
    let p = bias.p as f64;
    let exps: Vec<f64> = h.sets().iter().map(|s| -(s.len() as f64) / p * ln_base).collect();
    if exps.is_empty() {
        return 0.0;
    }
    let large = h.sets().iter().any(|s| s.len() as f64 / p > LOG_THRESHOLD);
    if !large {
        return exps.iter().map(|x| x.exp()).sum();
    }
    let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rest: f64 = exps.iter().map(|x| (x - max).exp()).sum();
    (max + rest.ln()).exp()
}

/// Strict form of the criterion: `beck_sum < 1/(1+q)`.
pub fn criterion_holds(h: &Hypergraph, bias: Bias) -> bool {
    beck_sum(h, bias) < 1.0 / (1 + bias.q) as f64
}

/// Incrementally maintained potential of a winning family played on (a
/// subset of) a game board. The `attacker` tries to fill a set; the other
/// side kills sets by touching them. Local element `i` of the family is the
/// board element `map[i]`.
#[derive(Debug, Clone)]
pub struct PotentialLedger {
    lambda: f64,
    attacker: Side,
    sets: Vec<Vec<u32>>,
    containing: Vec<Vec<u32>>,
    alive: Vec<bool>,
    unclaimed: Vec<u32>,
    weight: Vec<f64>,
    running_sum: f64,
    map: Vec<ElementId>,
    order: Vec<usize>,
    local_of: Vec<u32>,
    seen: Vec<Owner>,
}

const UNMAPPED: u32 = u32::MAX;

impl PotentialLedger {
    /// Ledger for the game in which the attacker claims `attacker_bias`
    /// elements per turn and the defender `defender_bias`.
    pub fn new(
        h: &Hypergraph,
        attacker: Side,
        attacker_bias: usize,
        defender_bias: usize,
        map: Vec<ElementId>,
        board_size: usize,
    ) -> Result<PotentialLedger> {
        if map.len() != h.board_size() {
            return Err(Error::BoardMismatch { expected: h.board_size(), actual: map.len() });
        }
        if attacker_bias == 0 || defender_bias == 0 {
            return Err(Error::InvalidBias(format!("{attacker_bias}:{defender_bias}")));
        }
        let lambda = ((1 + defender_bias) as f64).powf(1.0 / attacker_bias as f64);
        let mut local_of = vec![UNMAPPED; board_size];
        for (i, e) in map.iter().enumerate() {
            if e.index() >= board_size {
                return Err(Error::OutOfRange(e.index(), board_size));
            }
            local_of[e.index()] = i as u32;
        }
        let n = h.board_size();
        let mut containing = vec![Vec::new(); n];
        let mut sets = Vec::with_capacity(h.len());
        let mut weight = vec![0.0; n];
        let mut unclaimed = Vec::with_capacity(h.len());
        let mut running_sum = 0.0;
        for (si, s) in h.sets().iter().enumerate() {
            let local: Vec<u32> = s.iter().map(|e| e.0).collect();
            let w = lambda.powi(-(local.len() as i32));
            for &x in &local {
                containing[x as usize].push(si as u32);
                weight[x as usize] += w;
            }
            running_sum += w;
            unclaimed.push(local.len() as u32);
            sets.push(local);
        }
        let mut order: Vec<usize> = (0..map.len()).collect();
        order.sort_by_key(|&i| map[i]);
        Ok(PotentialLedger {
            lambda,
            order,
            attacker,
            alive: vec![true; sets.len()],
            sets,
            containing,
            unclaimed,
            weight,
            running_sum,
            map,
            local_of,
            seen: vec![Owner::Free; board_size],
        })
    }

    /// Ledger where the family lives directly on the game board.
    pub fn for_board(h: &Hypergraph, bias: Bias) -> Result<PotentialLedger> {
        let map = (0..h.board_size()).map(ElementId::from).collect();
        PotentialLedger::new(h, Side::Maker, bias.p, bias.q, map, h.board_size())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn running_sum(&self) -> f64 {
        self.running_sum
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn is_alive(&self, set: usize) -> bool {
        self.alive[set]
    }

    pub fn unclaimed(&self, set: usize) -> u32 {
        self.unclaimed[set]
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    /// An alive set the attacker has fully claimed, if any.
    pub fn completed_set(&self) -> Option<usize> {
        (0..self.sets.len()).find(|&i| self.alive[i] && self.unclaimed[i] == 0)
    }

    fn set_value(&self, s: usize) -> f64 {
        self.lambda.powi(-(self.unclaimed[s] as i32))
    }

    /// Records a claim of the board element `e` by `side`; elements outside
    /// the family's board are ignored.
    pub fn record(&mut self, side: Side, e: ElementId) {
        if e.index() >= self.local_of.len() {
            return;
        }
        self.seen[e.index()] = side.into();
        let local = self.local_of[e.index()];
        if local == UNMAPPED {
            return;
        }
        let sets = std::mem::take(&mut self.containing[local as usize]);
        for &s in &sets {
            let s = s as usize;
            if !self.alive[s] {
                continue;
            }
            let old = self.set_value(s);
            if side == self.attacker {
                self.unclaimed[s] -= 1;
                let new = self.set_value(s);
                self.running_sum += new - old;
                for &x in &self.sets[s] {
                    self.weight[x as usize] += new - old;
                }
            } else {
                self.alive[s] = false;
                self.running_sum -= old;
                for &x in &self.sets[s] {
                    self.weight[x as usize] -= old;
                }
            }
        }
        self.containing[local as usize] = sets;
    }

    /// Brings the ledger up to date with every claim made in `state`.
    pub fn sync(&mut self, state: &GameState) {
        for i in 0..self.seen.len() {
            let now = state.ownership()[i];
            if now != self.seen[i] {
                match now {
                    Owner::Maker => self.record(Side::Maker, ElementId(i as u32)),
                    Owner::Breaker => self.record(Side::Breaker, ElementId(i as u32)),
                    Owner::Free => {}
                }
            }
        }
    }

    /// Current potential weight of local element `i`.
    pub fn weight(&self, local: usize) -> f64 {
        self.weight[local]
    }

    /// Potential recomputed from scratch, for consistency checks.
    pub fn recompute_sum(&self) -> f64 {
        (0..self.sets.len()).filter(|&s| self.alive[s]).map(|s| self.set_value(s)).sum()
    }

    pub fn consistent(&self) -> bool {
        let r = self.recompute_sum();
        (self.running_sum - r).abs() <= 1e-9 * r.abs().max(1e-300) || (self.running_sum - r).abs() < 1e-15
    }

    /// Greedily picks up to `count` elements that are free in `state`,
    /// each maximizing the weight of alive sets through it (lowest id on
    /// ties), recording each pick as a defender claim before the next.
    pub fn defend(&mut self, state: &GameState, count: usize) -> Vec<ElementId> {
        self.sync(state);
        let defender = self.attacker.other();
        let mut picks = Vec::with_capacity(count);
        for _ in 0..count {
            let mut best: Option<(f64, usize)> = None;
            for &local in &self.order {
                let e = self.map[local];
                if !state.is_free(e) || self.seen[e.index()] != Owner::Free {
                    continue;
                }
                let w = self.weight[local];
                if best.map_or(true, |(bw, _)| w > bw + TIE_EPS * bw.abs()) {
                    best = Some((w, local));
                }
            }
            let Some((_, local)) = best else { break };
            let e = self.map[local];
            self.record(defender, e);
            picks.push(e);
        }
        picks
    }
}

/// One greedy potential move for Breaker on a family played directly on
/// the board, computed from scratch.
pub fn potential_breaker_move(h: &Hypergraph, state: &GameState, bias: Bias) -> Result<Vec<ElementId>> {
    if h.board_size() != state.board_size() {
        return Err(Error::BoardMismatch { expected: state.board_size(), actual: h.board_size() });
    }
    let mut ledger = PotentialLedger::for_board(h, bias)?;
    Ok(ledger.defend(state, bias.q.min(state.free_count())))
}

/// Breaker playing greedy potential play on an explicit family.
pub struct PotentialBreaker {
    ledger: PotentialLedger,
    max_drift: f64,
}

impl PotentialBreaker {
    pub fn new(h: &Hypergraph, bias: Bias) -> Result<PotentialBreaker> {
        Ok(PotentialBreaker { ledger: PotentialLedger::for_board(h, bias)?, max_drift: 0.0 })
    }

    pub fn ledger(&self) -> &PotentialLedger {
        &self.ledger
    }
}

impl Strategy for PotentialBreaker {
    fn name(&self) -> String {
        "potential".into()
    }

    fn side(&self) -> Side {
        Side::Breaker
    }

    fn choose(&mut self, state: &GameState, _: &[ElementId], budget: usize) -> Decision {
        let picks = self.ledger.defend(state, budget);
        let r = self.ledger.recompute_sum();
        let drift = (self.ledger.running_sum() - r).abs() / r.abs().max(1e-300);
        if r > 0.0 {
            self.max_drift = self.max_drift.max(drift);
        }
        Decision::claim(picks)
    }

    fn params(&self) -> Value {
        json!({ "lambda": self.ledger.lambda() })
    }

    fn report(&self) -> Value {
        json!({ "final_sum": self.ledger.running_sum(), "max_relative_drift": self.max_drift })
    }
}

/// Runs a `(1:q)` Maker strategy in a `(1:q')` game, `q' < q`, by granting
/// Breaker `q - q'` imaginary claims per round in a shadow position.
///
/// Each Breaker turn is topped up in the shadow to exactly `q` new claims:
/// real claims the shadow does not already own, then the lowest-id
/// shadow-free elements. Shadow-free elements are always really free, so
/// the inner strategy's claims are always legal.
pub struct FakeMoves<S: Strategy> {
    inner: S,
    q: usize,
    q_prime: usize,
    shadow: Option<GameState>,
    breaker_moves_seen: usize,
    fake_claims: usize,
    fallback_moves: usize,
}

impl<S: Strategy> FakeMoves<S> {
    pub fn new(inner: S, q: usize, q_prime: usize) -> Result<FakeMoves<S>> {
        if q_prime == 0 || q_prime >= q {
            return Err(Error::Precondition(format!("fake moves need 0 < q' < q, got q={q}, q'={q_prime}")));
        }
        if inner.side() != Side::Maker {
            return Err(Error::Precondition("fake moves wrap a Maker strategy".into()));
        }
        Ok(FakeMoves {
            inner,
            q,
            q_prime,
            shadow: None,
            breaker_moves_seen: 0,
            fake_claims: 0,
            fallback_moves: 0,
        })
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn shadow(&self) -> Option<&GameState> {
        self.shadow.as_ref()
    }

    pub fn fake_claims(&self) -> usize {
        self.fake_claims
    }

    /// `1 + |X|/(q+1)` as the exact integer test `(moves - 1)(q + 1) <= |X|`.
    pub fn within_bound(moves: usize, board: usize, q: usize) -> bool {
        moves.saturating_sub(1) * (q + 1) <= board
    }

    fn top_up(&mut self, state: &GameState, last: &[ElementId]) -> Vec<ElementId> {
        let shadow = self.shadow.get_or_insert_with(|| GameState::new(state.board_arc()));
        let mut new_claims = Vec::with_capacity(self.q);
        for &e in last {
            if shadow.is_free(e) && new_claims.len() < self.q {
                new_claims.push(e);
            }
        }
        // real claims beyond q cannot occur (q' < q), but keep shadow honest
        for &e in last {
            if shadow.is_free(e) && !new_claims.contains(&e) {
                new_claims.push(e);
            }
        }
        let mut fakes = 0;
        for e in shadow.free_elements() {
            if new_claims.len() >= self.q {
                break;
            }
            if !new_claims.contains(&e) {
                new_claims.push(e);
                fakes += 1;
            }
        }
        self.fake_claims += fakes;
        shadow.apply_move(Side::Breaker, &new_claims).expect("shadow-free elements are free");
        new_claims
    }
}

impl<S: Strategy> Strategy for FakeMoves<S> {
    fn name(&self) -> String {
        format!("fake_moves({})", self.inner.name())
    }

    fn side(&self) -> Side {
        Side::Maker
    }

    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], budget: usize) -> Decision {
        if self.shadow.is_none() {
            self.shadow = Some(GameState::new(state.board_arc()));
        }
        let mut shadow_last = Vec::new();
        let breaker_moves = state.move_count(Side::Breaker);
        if self.breaker_moves_seen < breaker_moves {
            self.breaker_moves_seen = breaker_moves;
            shadow_last = self.top_up(state, opponent_last);
        }
        let shadow = self.shadow.as_ref().expect("initialized above");
        if shadow.free_count() == 0 {
            let fallback: Vec<ElementId> = state.free_elements().take(budget.min(1)).collect();
            self.fallback_moves += 1;
            if let Some(shadow) = self.shadow.as_mut() {
                for &e in &fallback {
                    if shadow.is_free(e) {
                        let _ = shadow.apply_claim(Side::Maker, e);
                    }
                }
            }
            return Decision::noted(fallback, "fake-moves fallback: shadow board exhausted");
        }
        let d = self.inner.choose(shadow, &shadow_last, 1);
        if d.forfeit.is_some() {
            return d;
        }
        let shadow = self.shadow.as_mut().expect("initialized above");
        let mut claims = Vec::with_capacity(1);
        for e in d.claims.into_iter().take(1) {
            if shadow.is_free(e) && state.is_free(e) {
                shadow.apply_claim(Side::Maker, e).expect("checked free");
                claims.push(e);
            }
        }
        shadow.apply_move(Side::Maker, &[]).expect("empty move");
        Decision::noted(claims, d.note)
    }

    fn completed(&self, state: &GameState) -> bool {
        self.inner.completed(state)
    }

    fn params(&self) -> Value {
        json!({ "q": self.q, "q_prime": self.q_prime, "inner": self.inner.params() })
    }

    fn report(&self) -> Value {
        json!({ "fake_claims": self.fake_claims, "fallback_moves": self.fallback_moves, "inner": self.inner.report() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::board::Board;
    use crate::game::{run_game, GameSetup, WinRule};
    use crate::transcript::replay;

    fn b11() -> Bias {
        Bias::new(1, 1).unwrap()
    }

    fn k5_triangles() -> Hypergraph {
        let board = Board::complete(5).unwrap();
        let mut sets = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    sets.push(vec![
                        board.edge(a, b).unwrap().index(),
                        board.edge(b, c).unwrap().index(),
                        board.edge(a, c).unwrap().index(),
                    ]);
                }
            }
        }
        Hypergraph::new(10, sets).unwrap()
    }

    #[test]
    fn beck_sum_examples() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        assert!((beck_sum(&h, b11()) - 0.25).abs() < 1e-12);
        assert!(criterion_holds(&h, b11()));
        let singles = Hypergraph::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!((beck_sum(&singles, b11()) - 1.5).abs() < 1e-12);
        let one = Hypergraph::new(1, vec![vec![0]]).unwrap();
        assert!(!criterion_holds(&one, b11()));
        let tri = k5_triangles();
        assert_eq!(tri.len(), 10);
        assert!((beck_sum(&tri, b11()) - 1.25).abs() < 1e-12);
        assert!(!criterion_holds(&tri, b11()));
    }

    #[test]
    fn log_space_agrees_with_direct_evaluation() {
        let big: Vec<usize> = (0..1200).collect();
        let h = Hypergraph::new(1200, vec![big.clone(), big[..1100].to_vec()]).unwrap();
        let s = beck_sum(&h, Bias::new(2, 1).unwrap());
        let direct = 2f64.powf(-600.0) + 2f64.powf(-550.0);
        assert!((s - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn greedy_move_examples() {
        let board = Arc::new(Board::elements(3).unwrap());
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let s = GameState::new(board.clone());
        assert_eq!(potential_breaker_move(&h, &s, b11()).unwrap(), vec![ElementId(2)]);

        let b2 = Arc::new(Board::elements(2).unwrap());
        let h2 = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let mut s2 = GameState::new(b2.clone());
        s2.apply_claim(Side::Maker, ElementId(0)).unwrap();
        assert_eq!(potential_breaker_move(&h2, &s2, b11()).unwrap(), vec![ElementId(1)]);
        s2.apply_claim(Side::Breaker, ElementId(1)).unwrap();
        assert!(potential_breaker_move(&h2, &s2, b11()).unwrap().is_empty());
    }

    #[test]
    fn ledger_tracks_recomputation() {
        let h = k5_triangles();
        let board = Arc::new(Board::complete(5).unwrap());
        let mut state = GameState::new(board);
        let mut ledger = PotentialLedger::for_board(&h, b11()).unwrap();
        for (i, side) in [(0, Side::Maker), (4, Side::Breaker), (1, Side::Maker), (7, Side::Maker)] {
            state.apply_claim(side, ElementId(i)).unwrap();
            ledger.sync(&state);
            assert!(ledger.consistent());
        }
        assert!(ledger.running_sum() > 0.0);
    }

    struct LowestFree;
    impl Strategy for LowestFree {
        fn name(&self) -> String {
            "lowest".into()
        }
        fn side(&self) -> Side {
            Side::Maker
        }
        fn choose(&mut self, s: &GameState, _: &[ElementId], budget: usize) -> Decision {
            Decision::claim(s.free_elements().take(budget).collect())
        }
    }

    struct HighestFree;
    impl Strategy for HighestFree {
        fn name(&self) -> String {
            "highest".into()
        }
        fn side(&self) -> Side {
            Side::Breaker
        }
        fn choose(&mut self, s: &GameState, _: &[ElementId], budget: usize) -> Decision {
            let mut f: Vec<ElementId> = s.free_elements().collect();
            f.reverse();
            Decision::claim(f.into_iter().take(budget).collect())
        }
    }

    #[test]
    fn fake_moves_rejects_equal_bias() {
        assert!(FakeMoves::new(LowestFree, 2, 2).is_err());
    }

    #[test]
    fn fake_moves_stay_legal_on_eight_elements() {
        for first in [Side::Maker, Side::Breaker] {
            let board = Arc::new(Board::elements(8).unwrap());
            let setup = GameSetup::new("fake", Bias::new(1, 1).unwrap(), first, 0);
            let mut maker = FakeMoves::new(LowestFree, 3, 1).unwrap();
            let (t, _) = run_game(board, &setup, &mut maker, &mut HighestFree, &WinRule::Never);
            assert!(!matches!(t.outcome, crate::transcript::Outcome::Forfeit { .. }), "{:?}", t.outcome);
            assert!(replay(&t).is_ok());
        }
    }
}
