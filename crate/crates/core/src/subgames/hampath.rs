//! Hamilton path with prescribed endpoints `a`, `b` in a dense region.
//!
//! Stage 1 grows two disjoint Maker paths `P_a`, `P_b` while handling
//! dangerous vertices (Breaker degree at least `k^δ'`). Stage 2 joins the
//! free ends of the two paths through the leftover vertices, by default
//! with a rotation-extension builder; the Hamilton-connected builder can be
//! used instead. The final path is `P_a`, the joining path, then `P_b`
//! reversed.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::board::ElementId;
use crate::error::{Error, Result};
use crate::game::GameState;
use crate::oracle::checks::hamilton_path_between;
use crate::parallel::{Step, SubStrategy};

use super::connector::{Connector, ConnectorStep};
use super::hamcon::{HamconMaker, HamconParams};
use super::{free_edge, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stage2 {
    #[default]
    RotationExtension,
    Hamcon,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamPathParams {
    pub gamma: f64,
    pub beta: f64,
    pub delta_prime: Option<f64>,
    pub delta: Option<f64>,
    pub stage2: Stage2,
    pub hamcon: HamconParams,
}

impl Default for HamPathParams {
    fn default() -> Self {
        HamPathParams {
            gamma: 0.1,
            beta: 0.5,
            delta_prime: None,
            delta: None,
            stage2: Stage2::RotationExtension,
            hamcon: HamconParams::default(),
        }
    }
}

impl HamPathParams {
    /// `δ' = max(1/2 + 2γ, β) + 0.01` unless overridden.
    pub fn delta_prime(&self) -> f64 {
        self.delta_prime.unwrap_or_else(|| (0.5 + 2.0 * self.gamma).max(self.beta) + 0.01)
    }

    /// `δ = δ' + 2γ + 0.01` unless overridden.
    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.delta_prime() + 2.0 * self.gamma + 0.01)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HamPathGuards {
    /// Minimum degree at least `k - k^β`.
    pub degree: bool,
    /// `q <= k^γ`.
    pub bias: bool,
    /// `γ < 1/8`, `β + 2γ < 1`, and the δ chain.
    pub exponents: bool,
}

impl HamPathGuards {
    pub fn all(&self) -> bool {
        self.degree && self.bias && self.exponents
    }
}

/// Per-move checks of the Stage 1 invariants.
#[derive(Debug, Clone, Default, Serialize)]
pub struct HamPathAudit {
    pub checks: usize,
    /// `k - |P_a| - |P_b| >= k^δ` failed.
    pub leftover_violations: usize,
    /// `d_B(v) <= 2 k^δ'` failed for an eligible vertex.
    pub degree_violations: usize,
    /// Dangerous count above `4 k^(1+γ) / k^δ'`.
    pub danger_violations: usize,
    pub max_dangerous: usize,
    pub first_violation_move: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    A,
    B,
}

enum Phase {
    One,
    Two { x: usize, y: usize, q: Vec<usize>, hamcon: Option<HamconMaker> },
}

/// Maker strategy for an `a`-`b` Hamilton path of a region.
pub struct HamPathMaker {
    region: Region,
    a: usize,
    b: usize,
    q: usize,
    params: HamPathParams,
    seed: u64,
    guards: HamPathGuards,
    pa: Vec<usize>,
    pb: Vec<usize>,
    used: Vec<bool>,
    phase: Phase,
    pending: Option<(End, usize)>,
    extend_after: bool,
    connector: Option<(Connector, usize)>,
    moves: usize,
    stage1_moves: usize,
    connector_moves: Vec<usize>,
    ever_dangerous: Vec<bool>,
    audit: HamPathAudit,
}

impl HamPathMaker {
    pub fn new(
        state: &GameState,
        verts: Vec<usize>,
        a: usize,
        b: usize,
        q: usize,
        params: HamPathParams,
        seed: u64,
    ) -> Result<HamPathMaker> {
        let n = state.vertex_count().ok_or_else(|| Error::InvalidBoard("hampath needs an edge board".into()))?;
        let k = verts.len();
        if a == b || !verts.contains(&a) || !verts.contains(&b) {
            return Err(Error::Precondition("endpoints must be two distinct region vertices".into()));
        }
        let region = Region::new(verts, n);
        let g = region.available_graph(state);
        let kf = k as f64;
        let (gamma, beta) = (params.gamma, params.beta);
        let (dp, d) = (params.delta_prime(), params.delta());
        let guards = HamPathGuards {
            degree: g.min_degree() as f64 >= kf - kf.powf(beta),
            bias: q as f64 <= kf.powf(gamma),
            exponents: gamma > 0.0
                && gamma < 0.125
                && beta > 0.0
                && beta + 2.0 * gamma < 1.0
                && dp > (0.5 + 2.0 * gamma).max(beta)
                && d > dp + 2.0 * gamma
                && d < 1.0,
        };
        let mut used = vec![false; k];
        used[region.local(a).expect("a in region")] = true;
        used[region.local(b).expect("b in region")] = true;
        Ok(HamPathMaker {
            a,
            b,
            q,
            params,
            seed,
            guards,
            pa: vec![a],
            pb: vec![b],
            used,
            phase: Phase::One,
            pending: None,
            extend_after: false,
            connector: None,
            moves: 0,
            stage1_moves: 0,
            connector_moves: Vec::new(),
            ever_dangerous: vec![false; k],
            audit: HamPathAudit::default(),
            region,
        })
    }

    pub fn k(&self) -> usize {
        self.region.k()
    }

    pub fn guards(&self) -> HamPathGuards {
        self.guards
    }

    pub fn audit(&self) -> &HamPathAudit {
        &self.audit
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    fn kf(&self) -> f64 {
        self.k() as f64
    }

    fn danger_threshold(&self) -> f64 {
        self.kf().powf(self.params.delta_prime())
    }

    fn stop_threshold(&self) -> f64 {
        2.0 * self.kf().powf(self.params.delta())
    }

    fn danger_bound(&self) -> f64 {
        4.0 * self.kf().powf(1.0 + self.params.gamma) / self.danger_threshold()
    }

    fn kgamma(&self) -> f64 {
        self.kf().powf(self.params.gamma)
    }

    /// The assembled `a`-`b` Hamilton path, once every edge is Maker's.
    pub fn path(&self, state: &GameState) -> Option<Vec<usize>> {
        if self.k() == 2 {
            return state.is_maker_edge(self.a, self.b).then(|| vec![self.a, self.b]);
        }
        let Phase::Two { q, .. } = &self.phase else { return None };
        let mut full = self.pa.clone();
        full.extend_from_slice(&q[1..]);
        full.extend(self.pb.iter().rev());
        if full.len() != self.k() {
            return None;
        }
        let mut seen = vec![false; self.k()];
        for &v in &full {
            let i = self.region.local(v)?;
            if seen[i] {
                return None;
            }
            seen[i] = true;
        }
        full.windows(2).all(|w| state.is_maker_edge(w[0], w[1])).then_some(full)
    }

    fn end_of(&self, which: End) -> usize {
        match which {
            End::A => *self.pa.last().unwrap(),
            End::B => *self.pb.last().unwrap(),
        }
    }

    fn push(&mut self, which: End, v: usize) {
        let i = self.region.local(v).expect("region vertex");
        self.used[i] = true;
        match which {
            End::A => self.pa.push(v),
            End::B => self.pb.push(v),
        }
    }

    fn unused(&self) -> Vec<usize> {
        (0..self.k()).filter(|&i| !self.used[i]).map(|i| self.region.global(i)).collect()
    }

    /// Unused vertices plus the path ends other than `a`, `b`.
    fn eligible(&self) -> Vec<usize> {
        let mut e = self.unused();
        for end in [self.end_of(End::A), self.end_of(End::B)] {
            if end != self.a && end != self.b {
                e.push(end);
            }
        }
        e
    }

    fn claim(&mut self, e: ElementId, note: String) -> std::result::Result<Step, String> {
        self.moves += 1;
        if matches!(self.phase, Phase::One) {
            self.stage1_moves += 1;
        }
        Ok(Step::noted(e, note))
    }

    fn run_audit(&mut self, dangerous: usize) {
        let k = self.kf();
        let leftover = (self.k() - self.pa.len() - self.pb.len()) as f64;
        self.audit.checks += 1;
        let mut bad = false;
        if leftover < k.powf(self.params.delta()) {
            self.audit.leftover_violations += 1;
            bad = true;
        }
        self.audit.max_dangerous = self.audit.max_dangerous.max(dangerous);
        if dangerous as f64 > self.danger_bound() {
            self.audit.danger_violations += 1;
            bad = true;
        }
        if bad && self.audit.first_violation_move.is_none() {
            self.audit.first_violation_move = Some(self.moves);
        }
    }

    fn audit_degrees(&mut self, state: &GameState) {
        let cap = 2.0 * self.danger_threshold();
        let over = self
            .eligible()
            .iter()
            .filter(|&&v| self.region.breaker_degree(state, v) as f64 > cap)
            .count();
        if over > 0 {
            self.audit.degree_violations += 1;
            if self.audit.first_violation_move.is_none() {
                self.audit.first_violation_move = Some(self.moves);
            }
        }
    }

    /// Extension of one path by a free edge to the lowest unused vertex.
    fn extend(&mut self, state: &GameState, which: End, why: &str) -> std::result::Result<Step, String> {
        let x = self.end_of(which);
        let pick = self.unused().into_iter().find_map(|w| free_edge(state, x, w).map(|e| (w, e)));
        match pick {
            Some((w, e)) => {
                self.pending = Some((which, w));
                self.claim(e, format!("stage=1 case={why} from={x} to={w}"))
            }
            None => Err(format!("no free edge extends the path at {x}")),
        }
    }

    fn stage1(&mut self, state: &GameState) -> Option<std::result::Result<Step, String>> {
        if let Some((which, w)) = self.pending.take() {
            if state.is_maker_edge(self.end_of(which), w) {
                self.push(which, w);
            }
        }
        if let Some((mut conn, v)) = self.connector.take() {
            match conn.next(state) {
                Ok(ConnectorStep::Claim(e)) => {
                    self.connector = Some((conn, v));
                    return Some(self.claim(e, format!("stage=1 case=2.2 connector target={v}")));
                }
                Ok(ConnectorStep::Done { x, y }) => {
                    self.connector_moves.push(conn.moves());
                    self.push(End::A, x);
                    self.push(End::A, y);
                    self.push(End::A, v);
                    self.extend_after = true;
                }
                Err(e) => return Some(Err(format!("stage 1 connector: {e}"))),
            }
        }
        let leftover = (self.k() - self.pa.len() - self.pb.len()) as f64;
        if !self.extend_after && leftover < self.stop_threshold() {
            return None;
        }
        let threshold = self.danger_threshold();
        let dangerous: Vec<usize> = self
            .eligible()
            .into_iter()
            .filter(|&v| self.region.breaker_degree(state, v) as f64 >= threshold)
            .collect();
        for &v in &dangerous {
            let i = self.region.local(v).unwrap();
            self.ever_dangerous[i] = true;
        }
        self.run_audit(dangerous.len());
        self.audit_degrees(state);
        if self.moves >= 2 * self.k() {
            return Some(Err(format!("move cap {} reached", 2 * self.k())));
        }
        if self.extend_after {
            self.extend_after = false;
            return Some(self.extend(state, End::A, "2.2-extend"));
        }
        let Some(&v) = dangerous.iter().min() else {
            let which = if self.pa.len() <= self.pb.len() { End::A } else { End::B };
            return Some(self.extend(state, which, "1"));
        };
        if v == self.end_of(End::A) {
            return Some(self.extend(state, End::A, "2.1"));
        }
        if v == self.end_of(End::B) {
            return Some(self.extend(state, End::B, "2.1"));
        }
        let x = self.end_of(End::A);
        if let Some(e) = free_edge(state, x, v) {
            self.pending = Some((End::A, v));
            self.extend_after = true;
            return Some(self.claim(e, format!("stage=1 case=2.2 direct target={v}")));
        }
        let kg = self.kgamma();
        let c = ((5.0 * kg).floor() as usize).max(1);
        let budget = (11.0 * kg).ceil() as usize;
        let cands: Vec<usize> = self.unused().into_iter().filter(|&w| w != v).collect();
        self.connector = Some((Connector::new(state, x, v, &cands, c, budget), v));
        self.stage1(state)
    }

    fn enter_stage2(&mut self, state: &GameState) -> std::result::Result<(), String> {
        let x = self.end_of(End::A);
        let y = self.end_of(End::B);
        let hamcon = if self.params.stage2 == Stage2::Hamcon {
            let mut verts = self.unused();
            verts.push(x);
            verts.push(y);
            verts.sort_unstable();
            let p = self.params.hamcon.clone();
            HamconMaker::new(state, verts, Some((self.a, self.b)), self.q, p, self.seed).ok()
        } else {
            None
        };
        self.phase = Phase::Two { x, y, q: vec![x], hamcon };
        Ok(())
    }

    fn stage2(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        if self.moves >= 2 * self.k() {
            return Err(format!("move cap {} reached", 2 * self.k()));
        }
        let Phase::Two { hamcon, .. } = &mut self.phase else { unreachable!() };
        if let Some(h) = hamcon {
            if !h.success(state) {
                let step = h.next_claim(state).map_err(|e| format!("stage 2 hamcon: {e}"))?;
                return self.claim(step.claim, format!("stage=2 hamcon {}", step.note));
            }
            self.adopt_hamcon_path(state);
        }
        self.rotation_extension(state)
    }

    /// Replaces the joining path by a Hamilton path of Maker's graph on
    /// the leftover, when the brute force can find one.
    fn adopt_hamcon_path(&mut self, state: &GameState) {
        let Phase::Two { x, y, q, hamcon } = &mut self.phase else { return };
        let Some(h) = hamcon.take() else { return };
        let g = h.region().maker_graph(state);
        let (lx, ly) = (h.region().local(*x).unwrap(), h.region().local(*y).unwrap());
        if let Some(p) = hamilton_path_between(&g, lx, ly) {
            *q = p[..p.len() - 1].iter().map(|&i| h.region().global(i)).collect();
        }
    }

    fn rotation_extension(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        let Phase::Two { y, q, .. } = &self.phase else { unreachable!() };
        let y = *y;
        let mut path = q.clone();
        let mut in_path = vec![false; self.k()];
        for &v in &path {
            in_path[self.region.local(v).unwrap()] = true;
        }
        let target_set = |in_path: &[bool]| -> Vec<usize> {
            let u: Vec<usize> = (0..self.k())
                .filter(|&i| !in_path[i] && !self.used[i])
                .map(|i| self.region.global(i))
                .collect();
            if u.is_empty() {
                vec![y]
            } else {
                u
            }
        };
        for _ in 0..4 * self.k() + 4 {
            let end = *path.last().unwrap();
            let targets = target_set(&in_path);
            if targets == [y] && state.is_maker_edge(end, y) {
                self.set_q(path);
                return Err("joining path already complete".into());
            }
            if targets != [y] {
                if let Some(&u) = targets.iter().find(|&&u| state.is_maker_edge(end, u)) {
                    in_path[self.region.local(u).unwrap()] = true;
                    path.push(u);
                    continue;
                }
            }
            if let Some(e) = self.best_extension(state, end, &targets, &in_path, y) {
                self.set_q(path);
                return self.claim(e, format!("stage=2 extend from={end}"));
            }
            match self.rotate(state, &path, &targets) {
                Rotation::Free(p) => {
                    path = p;
                    continue;
                }
                Rotation::Claim(p, e) => {
                    self.set_q(p);
                    return self.claim(e, "stage=2 rotate".into());
                }
                Rotation::Stuck => break,
            }
        }
        self.set_q(path);
        Err("stage 2: no extension or rotation available".into())
    }

    fn set_q(&mut self, path: Vec<usize>) {
        if let Phase::Two { q, .. } = &mut self.phase {
            *q = path;
        }
    }

    /// Free edge from `end` into the targets, most constrained target first.
    fn best_extension(&self, state: &GameState, end: usize, targets: &[usize], in_path: &[bool], y: usize) -> Option<ElementId> {
        let open: Vec<usize> = (0..self.k())
            .filter(|&i| !in_path[i] && !self.used[i])
            .map(|i| self.region.global(i))
            .chain(std::iter::once(y))
            .collect();
        targets
            .iter()
            .filter_map(|&u| free_edge(state, end, u).map(|e| (u, e)))
            .min_by_key(|&(u, _)| {
                let room = open.iter().filter(|&&w| w != u && !state.is_breaker_edge(u, w)).count();
                (room, u)
            })
            .map(|(_, e)| e)
    }

    /// Pósa rotations with the start fixed: breadth-first over rotations
    /// along Maker edges, looking for an end with a Maker or free edge into
    /// `targets`; failing that, one rotation whose pivot edge is free.
    fn rotate(&self, state: &GameState, path: &[usize], targets: &[usize]) -> Rotation {
        let reaches = |end: usize| targets.iter().any(|&t| state.is_maker_edge(end, t) || free_edge(state, end, t).is_some());
        let mut seen_ends = vec![*path.last().unwrap()];
        let mut frontier = vec![path.to_vec()];
        let mut explored: Vec<Vec<usize>> = Vec::new();
        let limit = 4 * self.k();
        while let Some(p) = frontier.pop() {
            if explored.len() >= limit {
                break;
            }
            let m = p.len() - 1;
            let end = p[m];
            for i in 0..m.saturating_sub(1) {
                if !state.is_maker_edge(end, p[i]) {
                    continue;
                }
                let rotated = rotated(&p, i);
                let new_end = *rotated.last().unwrap();
                if seen_ends.contains(&new_end) {
                    continue;
                }
                seen_ends.push(new_end);
                if reaches(new_end) {
                    return Rotation::Free(rotated);
                }
                frontier.insert(0, rotated);
            }
            explored.push(p);
        }
        for p in &explored {
            let m = p.len() - 1;
            let end = p[m];
            for i in 0..m.saturating_sub(1) {
                if let Some(e) = free_edge(state, end, p[i]) {
                    if reaches(p[i + 1]) {
                        return Rotation::Claim(p.clone(), e);
                    }
                }
            }
        }
        Rotation::Stuck
    }
}

enum Rotation {
    Free(Vec<usize>),
    Claim(Vec<usize>, ElementId),
    Stuck,
}

/// `p_0 .. p_i, p_m, p_{m-1}, .., p_{i+1}`.
fn rotated(p: &[usize], i: usize) -> Vec<usize> {
    let mut out = p[..=i].to_vec();
    out.extend(p[i + 1..].iter().rev());
    out
}

impl SubStrategy for HamPathMaker {
    fn label(&self) -> String {
        format!("hampath({}-{})", self.a, self.b)
    }

    fn is_complete(&self, state: &GameState) -> bool {
        self.path(state).is_some()
    }

    fn next_claim(&mut self, state: &GameState) -> std::result::Result<Step, String> {
        if self.k() == 2 {
            return match free_edge(state, self.a, self.b) {
                Some(e) => self.claim(e, "direct".into()),
                None => Err("the edge between the endpoints is not free".into()),
            };
        }
        if matches!(self.phase, Phase::One) {
            if let Some(step) = self.stage1(state) {
                return step;
            }
            if let Some((w_end, w)) = self.pending.take() {
                if state.is_maker_edge(self.end_of(w_end), w) {
                    self.push(w_end, w);
                }
            }
            self.enter_stage2(state)?;
        }
        self.stage2(state)
    }

    fn moves_made(&self) -> usize {
        self.moves
    }

    fn params(&self) -> Value {
        json!({
            "k": self.k(),
            "a": self.a,
            "b": self.b,
            "q": self.q,
            "gamma": self.params.gamma,
            "beta": self.params.beta,
            "delta_prime": self.params.delta_prime(),
            "delta": self.params.delta(),
            "danger_threshold": self.danger_threshold(),
            "stop_threshold": self.stop_threshold(),
            "danger_bound": self.danger_bound(),
            "stage2": self.params.stage2,
            "guards": self.guards,
        })
    }

    fn report(&self) -> Value {
        json!({
            "moves": self.moves,
            "stage1_moves": self.stage1_moves,
            "pa_len": self.pa.len(),
            "pb_len": self.pb.len(),
            "ever_dangerous": self.ever_dangerous.iter().filter(|&&d| d).count(),
            "connector_moves": self.connector_moves,
            "audit": self.audit,
        })
    }
}
