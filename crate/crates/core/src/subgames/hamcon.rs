//! Building a Hamilton-connected subgraph of a dense region.
//!
//! Exact mode plays the potential Breaker of the `(q:1)` game on
//! `H1 ∪ H2`, the edge sets whose touching gives the expansion criterion
//! (`D = ln ln k`, small sets up to `k / ln k`). Because the criterion is
//! only sufficient for large `k`, a completion phase follows once every
//! dual set is dead. Heuristic mode grows the worst-expanding sets found
//! by sampling.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::{Error, Result};
use crate::game::{Bias, GameState, Side};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::oracle::checks::{hamcon_condition_check, hamilton_endpoints, next_combination, HAMILTON_VERTEX_CAP};
use crate::parallel::{Step, SubStrategy};
use crate::potential::{beck_sum, criterion_holds, PotentialLedger};
use crate::rng::{stream_rng, streams};

use super::{free_edge, Mode, Region, ENUMERATION_CAP};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamconParams {
    pub mode: Mode,
    pub enumeration_cap: u64,
    /// Smallest region accepted.
    pub floor: usize,
    /// `g(k)`; defaults to `ceil(k / ln^2 k)`.
    pub slack: Option<usize>,
    /// Random sets per sampled condition check.
    pub samples: usize,
    /// `C` in the reported move bound `C k ln^2 k`.
    pub move_coeff: f64,
}

impl Default for HamconParams {
    fn default() -> Self {
        HamconParams {
            mode: Mode::Auto,
            enumeration_cap: ENUMERATION_CAP,
            floor: 8,
            slack: None,
            samples: 256,
            move_coeff: 10.0,
        }
    }
}

pub fn default_slack(k: usize) -> usize {
    let l = (k as f64).ln();
    (k as f64 / (l * l)).ceil() as usize
}

fn ln_ln(k: usize) -> f64 {
    (k as f64).ln().ln()
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k.min(n - k)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Size of the `B` side of an `H1` set with `|A| = a`:
/// `k - a - ceil(D a) + 1`, so that touching all of them means
/// `|N(A)| >= ceil(D a)`. `None` when no such `B` fits.
pub fn h1_b_size(k: usize, a: usize) -> Option<usize> {
    let need = (ln_ln(k) * a as f64).ceil().max(0.0) as usize;
    (need + a <= k && need >= 1).then(|| k - a - need + 1)
}

/// Number of sets in `H1 ∪ H2` for a region of `k` vertices.
pub fn hamcon_set_count(k: usize) -> f64 {
    let s = k as f64 / (k as f64).ln();
    let h1: f64 = (1..=s.floor() as usize)
        .filter_map(|a| h1_b_size(k, a).map(|b| binom(k, a) * binom(k - a, b)))
        .sum();
    let a2 = s.ceil() as usize;
    let h2 = if 2 * a2 <= k { binom(k, a2) * binom(k - a2, a2) / 2.0 } else { 0.0 };
    h1 + h2
}

/// `H1 ∪ H2` over the edges of `g`; local element `x` is `edges[x]`.
pub fn hamcon_hypergraph(g: &Graph, cap: u64) -> Result<(Hypergraph, Vec<(usize, usize)>)> {
    let k = g.vertex_count();
    let edges = g.edges();
    let count = hamcon_set_count(k);
    if count > cap as f64 || edges.len() > 128 || k < 3 {
        return Err(Error::TooLarge(format!("H1 and H2 on {k} vertices: {count} sets (cap {cap})")));
    }
    let mut inc = vec![0u128; k];
    for (x, &(u, v)) in edges.iter().enumerate() {
        inc[u] |= 1 << x;
        inc[v] |= 1 << x;
    }
    let union = |pick: &[usize]| pick.iter().fold(0u128, |m, &i| m | inc[i]);
    let to_set = |mut m: u128| {
        let mut s = Vec::with_capacity(m.count_ones() as usize);
        while m != 0 {
            s.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        s
    };
    let s = k as f64 / (k as f64).ln();
    let mut sets = Vec::new();
    let push_pairs = |a: usize, b: usize, unordered: bool, sets: &mut Vec<Vec<usize>>| {
        let mut ca: Vec<usize> = (0..a).collect();
        loop {
            let rest: Vec<usize> = (0..k).filter(|v| !ca.contains(v)).collect();
            let ma = union(&ca);
            let mut cb: Vec<usize> = (0..b).collect();
            loop {
                let bs: Vec<usize> = cb.iter().map(|&i| rest[i]).collect();
                if !unordered || ca[0] < bs[0] {
                    sets.push(to_set(ma & union(&bs)));
                }
                if !next_combination(&mut cb, rest.len()) {
                    break;
                }
            }
            if !next_combination(&mut ca, k) {
                break;
            }
        }
    };
    for a in 1..=s.floor() as usize {
        if let Some(b) = h1_b_size(k, a) {
            push_pairs(a, b, false, &mut sets);
        }
    }
    let a2 = s.ceil() as usize;
    if 2 * a2 <= k {
        push_pairs(a2, a2, true, &mut sets);
    }
    Ok((Hypergraph::with_empty_sets(edges.len(), sets)?, edges))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HamconGuards {
    pub enumerable: bool,
    pub criterion: bool,
    /// `q <= k / ln^2 k`
    pub bias: bool,
    /// Minimum degree at least `k - g(k)`.
    pub slack: bool,
}

/// Maker strategy for a Hamilton-connected subgraph of a region.
pub struct HamconMaker {
    region: Region,
    q: usize,
    params: HamconParams,
    mode: Mode,
    ledger: Option<PotentialLedger>,
    guards: HamconGuards,
    beck: Option<f64>,
    slack: usize,
    seed: u64,
    skip: Option<(usize, usize)>,
    rng: ChaCha8Rng,
    moves: usize,
    dual_moves: usize,
    completion_moves: usize,
    guard_moves: usize,
}

impl HamconMaker {
    /// `skip` is a vertex pair Maker must leave alone (treated as absent).
    pub fn new(
        state: &GameState,
        verts: Vec<usize>,
        skip: Option<(usize, usize)>,
        q: usize,
        params: HamconParams,
        seed: u64,
    ) -> Result<HamconMaker> {
        let n = state.vertex_count().ok_or_else(|| Error::InvalidBoard("hamcon needs an edge board".into()))?;
        let k = verts.len();
        if k < params.floor {
            return Err(Error::Precondition(format!("region of {k} vertices is below the floor {}", params.floor)));
        }
        if q == 0 {
            return Err(Error::InvalidBias("q must be positive".into()));
        }
        let region = Region::new(verts, n);
        let mut g = region.available_graph(state);
        if let Some((x, y)) = skip {
            if let (Some(i), Some(j)) = (region.local(x), region.local(y)) {
                g = without_edge(&g, i, j);
            }
        }
        let slack = params.slack.unwrap_or_else(|| default_slack(k));
        let family = match params.mode {
            Mode::Heuristic => None,
            Mode::Exact => Some(hamcon_hypergraph(&g, params.enumeration_cap)?),
            Mode::Auto => hamcon_hypergraph(&g, params.enumeration_cap).ok(),
        };
        let dual = Bias { p: q, q: 1 };
        let lk = (k as f64).ln();
        let guards = HamconGuards {
            enumerable: hamcon_set_count(k) <= params.enumeration_cap as f64,
            criterion: family.as_ref().is_some_and(|(h, _)| criterion_holds(h, dual)),
            bias: q as f64 <= k as f64 / (lk * lk),
            slack: g.min_degree() + slack >= k,
        };
        let beck = family.as_ref().map(|(h, _)| beck_sum(h, dual));
        let ledger = match &family {
            Some((h, edges)) => {
                let map: Vec<ElementId> = edges
                    .iter()
                    .map(|&(u, v)| state.board().edge(region.global(u), region.global(v)).expect("region edge"))
                    .collect();
                Some(PotentialLedger::new(h, Side::Breaker, q, 1, map, state.board_size())?)
            }
            None => None,
        };
        let mode = if ledger.is_some() { Mode::Exact } else { Mode::Heuristic };
        Ok(HamconMaker {
            region,
            q,
            params,
            mode,
            ledger,
            guards,
            beck,
            slack,
            seed,
            skip,
            rng: stream_rng(seed, streams::SAMPLER),
            moves: 0,
            dual_moves: 0,
            completion_moves: 0,
            guard_moves: 0,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn guards(&self) -> HamconGuards {
        self.guards
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Maker's local graph is Hamilton connected (brute force up to 12
    /// vertices) or satisfies the expansion criterion (larger regions).
    pub fn success(&self, state: &GameState) -> bool {
        let g = self.region.maker_graph(state);
        maker_graph_done(&g, self.params.samples, self.seed)
    }

    pub fn move_bound(&self) -> f64 {
        let k = self.region.k() as f64;
        self.params.move_coeff * k * k.ln() * k.ln()
    }

    fn is_skipped(&self, i: usize, j: usize) -> bool {
        let (u, v) = (self.region.global(i), self.region.global(j));
        self.skip.is_some_and(|(x, y)| (x, y) == (u, v) || (x, y) == (v, u))
    }

    fn dual_claim(&mut self, state: &GameState) -> Option<ElementId> {
        let ledger = self.ledger.as_mut()?;
        ledger.sync(state);
        if ledger.alive_count() == 0 {
            return None;
        }
        ledger.defend(state, 1).first().copied()
    }

    /// With `urgent_only`, answers only when some edge must be taken now
    /// (tiny regions: its loss costs Hamilton pairs, or a vertex short of
    /// degree three has no spare free edge).
    fn greedy_claim(&mut self, state: &GameState, urgent_only: bool) -> Option<ElementId> {
        let g = self.region.maker_graph(state);
        let k = g.vertex_count();
        let free: Vec<(usize, usize, ElementId)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.is_skipped(i, j))
            .filter_map(|(i, j)| free_edge(state, self.region.global(i), self.region.global(j)).map(|e| (i, j, e)))
            .collect();
        if free.is_empty() {
            return None;
        }
        if k <= PROGRESS_CAP {
            // an edge whose loss would cost Hamilton pairs of Maker's
            // graph plus the free edges is claimed first
            let mut open = g.clone();
            free.iter().for_each(|f| open.add_edge(f.0, f.1));
            let base = connected_pairs(&open);
            let mut critical: Option<(usize, ElementId)> = None;
            for &(i, j, e) in &free {
                let loss = base - connected_pairs(&without_edge(&open, i, j));
                if loss > 0 && critical.map_or(true, |(l, _)| loss > l) {
                    critical = Some((loss, e));
                }
            }
            if let Some((_, e)) = critical {
                return Some(e);
            }
            // spare free edges at a vertex still short of degree three
            let spare = |v: usize| -> Option<i64> {
                let need = 3 - g.degree(v).min(3) as i64;
                (need > 0).then(|| (open.degree(v) - g.degree(v)) as i64 - need)
            };
            let urgent = free.iter().filter_map(|f| spare(f.0).into_iter().chain(spare(f.1)).min()).min();
            if urgent_only && urgent.map_or(true, |u| u > 1) {
                return None;
            }
            let pool: Vec<(usize, usize, ElementId)> = match urgent {
                Some(u) if u <= 1 => free
                    .iter()
                    .copied()
                    .filter(|f| spare(f.0) == Some(u) || spare(f.1) == Some(u))
                    .collect(),
                _ => free.clone(),
            };
            let mut best: Option<(f64, ElementId)> = None;
            for &(i, j, e) in &pool {
                let mut h = g.clone();
                h.add_edge(i, j);
                let score = path_progress(&h);
                if best.map_or(true, |(s, _)| score > s) {
                    best = Some((score, e));
                }
            }
            return best.map(|b| b.1);
        }
        if urgent_only {
            return None;
        }
        let min_deg = (0..k).filter(|&v| free.iter().any(|f| f.0 == v || f.1 == v)).map(|v| g.degree(v)).min()?;
        if min_deg < 3 || k > HAMILTON_VERTEX_CAP {
            if let Some(e) = self.expansion_claim(&g, &free) {
                return Some(e);
            }
        }
        if k <= HAMILTON_VERTEX_CAP {
            let mut best: Option<(usize, ElementId)> = None;
            for &(i, j, e) in &free {
                let mut h = g.clone();
                h.add_edge(i, j);
                let score = connected_pairs(&h);
                if best.map_or(true, |(s, _)| score > s) {
                    best = Some((score, e));
                }
            }
            return best.map(|b| b.1);
        }
        free.iter().min_by_key(|f| (g.degree(f.0) + g.degree(f.1), f.2)).map(|f| f.2)
    }

    /// Free edge joining the two worst-expanding small sets among all
    /// singletons and a batch of sampled sets.
    fn expansion_claim(&mut self, g: &Graph, free: &[(usize, usize, ElementId)]) -> Option<ElementId> {
        let k = g.vertex_count();
        let small = ((k as f64 / (k as f64).ln()).floor() as usize).clamp(1, k);
        let mut candidates: Vec<Vec<usize>> = (0..k).map(|v| vec![v]).collect();
        for _ in 0..self.params.samples {
            let s = self.rng.gen_range(1..=small);
            candidates.push(sample(&mut self.rng, k, s).into_vec());
        }
        let ext = |set: &[usize]| -> Vec<bool> {
            let mut inside = vec![false; k];
            set.iter().for_each(|&v| inside[v] = true);
            let mut out = vec![false; k];
            for &v in set {
                for &u in g.neighbors(v) {
                    if !inside[u] {
                        out[u] = true;
                    }
                }
            }
            out
        };
        let ratio = |set: &[usize]| ext(set).iter().filter(|&&x| x).count() as f64 / set.len() as f64;
        let mut scored: Vec<(f64, usize)> = candidates.iter().enumerate().map(|(i, s)| (ratio(s), i)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let worst = &candidates[scored[0].1];
        let mut in_worst = vec![false; k];
        worst.iter().for_each(|&v| in_worst[v] = true);
        let worst_nb = ext(worst);
        let grows = |x: usize, y: usize| in_worst[x] && !in_worst[y] && !worst_nb[y];
        // prefer the second worst set disjoint from the first
        for &(_, idx) in scored.iter().skip(1).take(64) {
            let other = &candidates[idx];
            if other.iter().any(|&v| in_worst[v]) {
                continue;
            }
            let pick = free
                .iter()
                .filter(|f| (grows(f.0, f.1) && other.contains(&f.1)) || (grows(f.1, f.0) && other.contains(&f.0)))
                .min_by_key(|f| (g.degree(f.0) + g.degree(f.1), f.2));
            if let Some(f) = pick {
                return Some(f.2);
            }
        }
        free.iter()
            .filter(|f| grows(f.0, f.1) || grows(f.1, f.0))
            .min_by_key(|f| (g.degree(f.0) + g.degree(f.1), f.2))
            .map(|f| f.2)
    }
}

fn without_edge(g: &Graph, i: usize, j: usize) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|&e| e != (i.min(j), i.max(j))).collect();
    Graph::from_edges(g.vertex_count(), &edges)
}

const PROGRESS_CAP: usize = 10;

/// Smooth proxy for Hamilton connectivity on tiny graphs: every partial
/// path state `(start, covered set, end)` counts `3^|covered|`.
fn path_progress(g: &Graph) -> f64 {
    let k = g.vertex_count();
    let nb: Vec<u32> = (0..k).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect();
    let weights: Vec<f64> = (0..=k).map(|c| 3f64.powi(c as i32)).collect();
    let mut dp = vec![0u32; 1 << k];
    let mut total = 0.0;
    for s in 0..k {
        dp.iter_mut().for_each(|x| *x = 0);
        dp[1 << s] = 1 << s;
        for mask in 1..(1usize << k) {
            let ends = dp[mask];
            if ends == 0 {
                continue;
            }
            total += ends.count_ones() as f64 * weights[mask.count_ones() as usize];
            let mut e = ends;
            while e != 0 {
                let v = e.trailing_zeros() as usize;
                e &= e - 1;
                let mut ext = nb[v] & !(mask as u32);
                while ext != 0 {
                    let w = ext.trailing_zeros() as usize;
                    ext &= ext - 1;
                    dp[mask | (1 << w)] |= 1 << w;
                }
            }
        }
    }
    total
}

fn connected_pairs(g: &Graph) -> usize {
    match hamilton_endpoints(g, HAMILTON_VERTEX_CAP) {
        Some(ends) => ends.iter().map(|m| m.count_ones() as usize).sum(),
        None => 0,
    }
}

/// Completion predicate shared with the auditor.
pub fn maker_graph_done(g: &Graph, samples: usize, seed: u64) -> bool {
    let k = g.vertex_count();
    if k <= HAMILTON_VERTEX_CAP {
        return crate::oracle::hamilton_connected_oracle(g, HAMILTON_VERTEX_CAP) == Some(true);
    }
    if g.min_degree() < 3 {
        return false;
    }
    let mut rng = stream_rng(seed, streams::SAMPLER);
    hamcon_condition_check(g, samples, &mut rng).holds
}

impl SubStrategy for HamconMaker {
    fn label(&self) -> String {
        format!("hamcon[{}]", if self.mode == Mode::Exact { "exact" } else { "heuristic" })
    }

    fn is_complete(&self, state: &GameState) -> bool {
        self.success(state)
    }

    fn next_claim(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        if self.ledger.is_some() {
            if let Some(e) = self.greedy_claim(state, true) {
                self.moves += 1;
                self.guard_moves += 1;
                return Ok(Step::noted(e, "phase=guard"));
            }
        }
        if let Some(e) = self.dual_claim(state) {
            self.moves += 1;
            self.dual_moves += 1;
            return Ok(Step::noted(e, "phase=dual"));
        }
        match self.greedy_claim(state, false) {
            Some(e) => {
                self.moves += 1;
                self.completion_moves += 1;
                Ok(Step::noted(e, if self.ledger.is_some() { "phase=completion" } else { "phase=greedy" }))
            }
            None => Err("no free edge left in the region".into()),
        }
    }

    fn moves_made(&self) -> usize {
        self.moves
    }

    fn params(&self) -> Value {
        json!({
            "k": self.region.k(),
            "q": self.q,
            "mode": self.mode,
            "slack": self.slack,
            "d": ln_ln(self.region.k()),
            "small_bound": self.region.k() as f64 / (self.region.k() as f64).ln(),
            "dual_sets": hamcon_set_count(self.region.k()),
            "beck_sum": self.beck,
            "guards": self.guards,
            "move_bound": self.move_bound(),
            "samples": self.params.samples,
            "seed": self.seed,
        })
    }

    fn report(&self) -> Value {
        json!({
            "moves": self.moves,
            "dual_moves": self.dual_moves,
            "completion_moves": self.completion_moves,
            "guard_moves": self.guard_moves,
            "move_bound_exceeded": self.moves as f64 > self.move_bound(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Board;
    use std::sync::Arc;

    #[test]
    fn set_count_matches_enumeration() {
        for k in [8, 9, 10] {
            let (h, _) = hamcon_hypergraph(&Graph::complete(k), ENUMERATION_CAP).unwrap();
            assert_eq!(h.len() as f64, hamcon_set_count(k), "k={k}");
        }
    }

    #[test]
    fn k8_counts() {
        // a=1: 8*1, a=2: 28*6, a=3: 56*10, H2: 70/2
        assert_eq!(hamcon_set_count(8), 771.0);
    }

    #[test]
    fn region_below_floor_is_rejected() {
        let state = GameState::new(Arc::new(Board::complete(7).unwrap()));
        let r = HamconMaker::new(&state, (0..7).collect(), None, 1, HamconParams::default(), 0);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
