//! Exhaustive game-tree search over small boards.
//!
//! Positions are keyed by the raw ownership bitmasks (no symmetry
//! reduction). Maker maximizes `WIN - maker_moves`, Breaker minimizes, so a
//! Maker win is found at its shortest and a Breaker loss is delayed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{Bias, Side};
use crate::hypergraph::Hypergraph;

pub const DEFAULT_ELEMENT_CAP: usize = 16;
const WIN: i32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveResult {
    pub winner: Side,
    /// Number of Maker moves in the fastest forced win.
    pub maker_win_length: Option<usize>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solved(SolveResult),
    Inconclusive { nodes: u64 },
}

impl Verdict {
    pub fn winner(&self) -> Option<Side> {
        match self {
            Verdict::Solved(r) => Some(r.winner),
            Verdict::Inconclusive { .. } => None,
        }
    }
}

/// Compiled form of a small hypergraph game.
pub struct Solver {
    size: usize,
    sets: Vec<u32>,
    bias: Bias,
    memo: HashMap<(u32, u32, bool), i32>,
    nodes: u64,
    node_cap: u64,
}

impl Solver {
    pub fn new(h: &Hypergraph, bias: Bias, node_cap: u64) -> Result<Solver> {
        Solver::with_element_cap(h, bias, node_cap, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_element_cap(h: &Hypergraph, bias: Bias, node_cap: u64, cap: usize) -> Result<Solver> {
        if h.board_size() > cap.min(31) {
            return Err(Error::TooLarge(format!("{} elements exceed the solver cap {cap}", h.board_size())));
        }
        let sets = h
            .sets()
            .iter()
            .map(|s| s.iter().fold(0u32, |m, e| m | (1 << e.index())))
            .collect();
        Ok(Solver { size: h.board_size(), sets, bias, memo: HashMap::new(), nodes: 0, node_cap })
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn full(&self) -> u32 {
        if self.size == 32 {
            u32::MAX
        } else {
            (1u32 << self.size) - 1
        }
    }

    fn maker_won(&self, maker: u32) -> bool {
        self.sets.iter().any(|&s| s & maker == s)
    }

    fn all_dead(&self, breaker: u32) -> bool {
        self.sets.iter().all(|&s| s & breaker != 0)
    }

    /// Score of the position with `side` to move; `None` once the node cap is hit.
    pub fn value(&mut self, maker: u32, breaker: u32, side: Side) -> Option<i32> {
        let made = maker.count_ones().div_ceil(self.bias.p as u32) as i32;
        self.search(maker, breaker, side, made)
    }

    fn search(&mut self, maker: u32, breaker: u32, side: Side, maker_moves: i32) -> Option<i32> {
        if self.maker_won(maker) {
            return Some(WIN - maker_moves);
        }
        let free = self.full() & !(maker | breaker);
        if free == 0 || self.all_dead(breaker) {
            return Some(0);
        }
        let key = (maker, breaker, side == Side::Maker);
        if let Some(&v) = self.memo.get(&key) {
            // stored relative to the current Maker move count
            return Some(if v > 0 { v - maker_moves } else { v });
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return None;
        }
        let take = self.bias.of(side).min(free.count_ones() as usize);
        let mut best: Option<i32> = None;
        let mut moves = Vec::new();
        combinations(free, take, &mut moves);
        for mv in moves {
            let v = match side {
                Side::Maker => self.search(maker | mv, breaker, Side::Breaker, maker_moves + 1)?,
                Side::Breaker => self.search(maker, breaker | mv, Side::Maker, maker_moves)?,
            };
            best = Some(match (side, best) {
                (_, None) => v,
                (Side::Maker, Some(b)) => b.max(v),
                (Side::Breaker, Some(b)) => b.min(v),
            });
            // cannot do better than an immediate win / a sure block
            if (side == Side::Maker && v == WIN - maker_moves - 1) || (side == Side::Breaker && v == 0) {
                break;
            }
        }
        let v = best.unwrap_or(0);
        self.memo.insert(key, if v > 0 { v + maker_moves } else { v });
        Some(v)
    }

    /// Best move for `side` in the given position (first optimal in
    /// enumeration order), or `None` on cap exhaustion or a finished game.
    pub fn best_move(&mut self, maker: u32, breaker: u32, side: Side) -> Option<u32> {
        let free = self.full() & !(maker | breaker);
        if free == 0 {
            return None;
        }
        let take = self.bias.of(side).min(free.count_ones() as usize);
        let mut moves = Vec::new();
        combinations(free, take, &mut moves);
        let base = maker.count_ones().div_ceil(self.bias.p as u32) as i32;
        let mut best: Option<(i32, u32)> = None;
        for mv in moves {
            let v = match side {
                Side::Maker => self.search(maker | mv, breaker, Side::Breaker, base + 1)?,
                Side::Breaker => self.search(maker, breaker | mv, Side::Maker, base)?,
            };
            let better = match (side, best) {
                (_, None) => true,
                (Side::Maker, Some((b, _))) => v > b,
                (Side::Breaker, Some((b, _))) => v < b,
            };
            if better {
                best = Some((v, mv));
            }
        }
        best.map(|(_, mv)| mv)
    }
}

/// All subsets of `free` with exactly `k` bits, in increasing numeric order
/// of their lowest differing element.
pub fn combinations(free: u32, k: usize, out: &mut Vec<u32>) {
    let bits: Vec<u32> = (0..32).filter(|i| free & (1 << i) != 0).collect();
    fn rec(bits: &[u32], k: usize, start: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=bits.len().saturating_sub(k) {
            if bits.len() < k {
                break;
            }
            rec(bits, k - 1, i + 1, acc | (1 << bits[i]), out);
        }
    }
    if k == 0 {
        out.push(0);
        return;
    }
    rec(&bits, k, 0, 0, out);
}

/// Exact game value from the empty board. Maker-bitmask solving supports up
/// to [`DEFAULT_ELEMENT_CAP`] elements.
pub fn minimax_solve(h: &Hypergraph, bias: Bias, first: Side, node_cap: u64) -> Result<Verdict> {
    let mut solver = Solver::new(h, bias, node_cap)?;
    Ok(match solver.search(0, 0, first, 0) {
        None => Verdict::Inconclusive { nodes: solver.nodes },
        Some(v) if v > 0 => Verdict::Solved(SolveResult {
            winner: Side::Maker,
            maker_win_length: Some((WIN - v) as usize),
            nodes: solver.nodes,
        }),
        Some(_) => Verdict::Solved(SolveResult { winner: Side::Breaker, maker_win_length: None, nodes: solver.nodes }),
    })
}

/// Whether any Maker play beats a fixed deterministic Breaker. `breaker`
/// maps `(maker_mask, breaker_mask)` to the Breaker's claim mask. Returns
/// the first winning Maker line found.
pub fn maker_beats_fixed_breaker<F>(h: &Hypergraph, bias: Bias, first: Side, mut breaker: F) -> Result<Option<Vec<u32>>>
where
    F: FnMut(u32, u32) -> u32,
{
    if h.board_size() > DEFAULT_ELEMENT_CAP {
        return Err(Error::TooLarge(format!("{} elements", h.board_size())));
    }
    let sets: Vec<u32> = h.sets().iter().map(|s| s.iter().fold(0u32, |m, e| m | (1 << e.index()))).collect();
    let full = (1u32 << h.board_size()) - 1;
    let mut memo: HashMap<(u32, u32, bool), bool> = HashMap::new();

    #[allow(clippy::too_many_arguments)]
    fn go<F: FnMut(u32, u32) -> u32>(
        sets: &[u32],
        full: u32,
        bias: Bias,
        maker: u32,
        breaker: u32,
        side: Side,
        f: &mut F,
        memo: &mut HashMap<(u32, u32, bool), bool>,
        line: &mut Vec<u32>,
    ) -> bool {
        if sets.iter().any(|&s| s & maker == s) {
            return true;
        }
        let free = full & !(maker | breaker);
        if free == 0 || sets.iter().all(|&s| s & breaker != 0) {
            return false;
        }
        let key = (maker, breaker, side == Side::Maker);
        if memo.get(&key) == Some(&false) {
            return false;
        }
        let won = match side {
            Side::Breaker => {
                let mv = f(maker, breaker) & free;
                go(sets, full, bias, maker, breaker | mv, Side::Maker, f, memo, line)
            }
            Side::Maker => {
                let mut moves = Vec::new();
                combinations(free, bias.p.min(free.count_ones() as usize), &mut moves);
                let mut any = false;
                for mv in moves {
                    line.push(mv);
                    if go(sets, full, bias, maker | mv, breaker, Side::Breaker, f, memo, line) {
                        any = true;
                        break;
                    }
                    line.pop();
                }
                any
            }
        };
        memo.insert(key, won);
        won
    }

    let mut line = Vec::new();
    let won = go(&sets, full, bias, 0, 0, first, &mut breaker, &mut memo, &mut line);
    Ok(won.then_some(line))
}
