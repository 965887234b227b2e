//! The box game with resets, in its continuous form and in the integral
//! `(m, q)` form reached through the weight bridge `q_i / q`.
//!
//! BoxBreaker always resets a box of maximum weight. Weights are kept in
//! continuous units (integral play stores exact claim counts and divides by
//! `q`), so the checked bound is `1 + ln(m + j)` in round `j`, which is
//! `q(1 + ln(m + j))` claimed elements.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BoxMode {
    Continuous,
    Integral { q: usize },
}

/// Box weights after some number of full rounds.
#[derive(Debug, Clone)]
pub struct BoxState {
    mode: BoxMode,
    weights: Vec<f64>,
    counts: Vec<u64>,
    last_reset: Vec<usize>,
    round: usize,
}

impl BoxState {
    pub fn new(m: usize, mode: BoxMode) -> Result<BoxState> {
        if m == 0 {
            return Err(Error::Precondition("at least one box".into()));
        }
        if let BoxMode::Integral { q: 0 } = mode {
            return Err(Error::InvalidBias("q must be positive".into()));
        }
        Ok(BoxState { mode, weights: vec![0.0; m], counts: vec![0; m], last_reset: vec![0; m], round: 0 })
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn mode(&self) -> BoxMode {
        self.mode
    }

    /// Weights in continuous units.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Claim counts per box (integral mode; zero otherwise).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Round in which each box was last reset (0 if never).
    pub fn last_reset(&self) -> &[usize] {
        &self.last_reset
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    pub fn phi(&self) -> f64 {
        potential_phi(&self.weights)
    }

    /// Adds a continuous delta vector (entries >= 0 summing to 1).
    pub fn add_continuous(&mut self, delta: &WeightDelta) -> Result<()> {
        if delta.0.len() != self.m() {
            return Err(Error::BoardMismatch { expected: self.m(), actual: delta.0.len() });
        }
        if delta.0.iter().any(|&d| d < 0.0 || !d.is_finite()) {
            return Err(Error::Precondition("negative weight delta".into()));
        }
        let s: f64 = delta.0.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("deltas sum to {s}, not 1")));
        }
        for (w, d) in self.weights.iter_mut().zip(&delta.0) {
            *w += d;
        }
        Ok(())
    }

    /// Adds integral claims through the bridge.
    pub fn add_claims(&mut self, claims: &[usize]) -> Result<()> {
        let BoxMode::Integral { q } = self.mode else {
            return Err(Error::Precondition("integral claims in continuous mode".into()));
        };
        if claims.len() != self.m() {
            return Err(Error::BoardMismatch { expected: self.m(), actual: claims.len() });
        }
        rbox_bridge(claims, q)?;
        for (i, &c) in claims.iter().enumerate() {
            self.counts[i] += c as u64;
            self.weights[i] = self.counts[i] as f64 / q as f64;
        }
        Ok(())
    }

    /// Zeroes box `i` and closes the round.
    pub fn reset(&mut self, i: usize) {
        self.weights[i] = 0.0;
        self.counts[i] = 0;
        self.round += 1;
        self.last_reset[i] = self.round;
    }
}

/// Index of a maximum-weight box, lowest index on ties.
pub fn cbox_breaker_reset(weights: &[f64]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = i;
        }
    }
    best
}

/// Continuous weight increments of one BoxMaker move.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDelta(pub Vec<f64>);

/// `delta_i = q_i / q`; rejects moves claiming more than `q` elements.
pub fn rbox_bridge(claims: &[usize], q: usize) -> Result<WeightDelta> {
    let total: usize = claims.iter().sum();
    if q == 0 || total > q {
        return Err(Error::Precondition(format!("BoxMaker claimed {total} elements with q = {q}")));
    }
    Ok(WeightDelta(claims.iter().map(|&c| c as f64 / q as f64).collect()))
}

pub fn potential_phi(weights: &[f64]) -> f64 {
    weights.iter().map(|w| w.exp()).sum()
}

/// `1 + ln(m + k)`, the continuous weight bound for the first `k` rounds.
pub fn continuous_bound(m: usize, k: usize) -> f64 {
    1.0 + ((m + k) as f64).ln()
}

/// BoxMaker adversaries. Each returns a distribution of one unit of
/// weight (non-negative entries summing to 1); integral play rounds it to
/// `q` claims with [`quantize`].
pub trait BoxAdversary {
    fn name(&self) -> String;
    fn distribute(&mut self, state: &BoxState) -> Vec<f64>;
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

fn spread(m: usize, over: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; m];
    let share = 1.0 / over.len() as f64;
    for &i in over {
        v[i] = share;
    }
    // exact unit sum despite rounding
    let s: f64 = v.iter().sum();
    v[over[0]] += 1.0 - s;
    v
}

/// Largest-remainder rounding of a unit distribution to `q` claims.
pub fn quantize(dist: &[f64], q: usize) -> Vec<usize> {
    let scaled: Vec<f64> = dist.iter().map(|d| d * q as f64).collect();
    let mut out: Vec<usize> = scaled.iter().map(|x| x.floor() as usize).collect();
    let mut left = q.saturating_sub(out.iter().sum());
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for i in order {
        if left == 0 {
            break;
        }
        if dist[i] > 0.0 {
            out[i] += 1;
            left -= 1;
        }
    }
    out
}

/// Spreads evenly over all boxes.
pub struct Uniform;

impl BoxAdversary for Uniform {
    fn name(&self) -> String {
        "uniform".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        spread(s.m(), &(0..s.m()).collect::<Vec<_>>())
    }
}

/// Always piles onto one box.
pub struct SingleBox(pub usize);

impl BoxAdversary for SingleBox {
    fn name(&self) -> String {
        format!("single_box({})", self.0)
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        unit(s.m(), self.0.min(s.m() - 1))
    }
}

/// Piles onto the box reset longest ago.
pub struct LeastRecentlyReset;

impl BoxAdversary for LeastRecentlyReset {
    fn name(&self) -> String {
        "least_recently_reset".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        let i = (0..s.m()).min_by_key(|&i| (s.last_reset()[i], i)).unwrap_or(0);
        unit(s.m(), i)
    }
}

/// Random proportions from its own seeded stream.
pub struct RandomSpread {
    rng: ChaCha8Rng,
}

impl RandomSpread {
    pub fn new(seed: u64) -> RandomSpread {
        RandomSpread { rng: stream_rng(seed, streams::BOX_ADVERSARY) }
    }
}

impl BoxAdversary for RandomSpread {
    fn name(&self) -> String {
        "random".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        let raw: Vec<f64> = (0..s.m()).map(|_| self.rng.gen::<f64>().powi(4)).collect();
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return unit(s.m(), 0);
        }
        let mut v: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let s2: f64 = v.iter().sum();
        let j = (0..v.len()).max_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap()).unwrap();
        v[j] += 1.0 - s2;
        v
    }
}

/// Puts the whole unit on the box that maximizes the potential left after
/// BoxBreaker's reply.
pub struct PotentialGreedy;

impl BoxAdversary for PotentialGreedy {
    fn name(&self) -> String {
        "potential_greedy".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        let w = s.weights();
        let m = w.len();
        // top two weights for the post-move maximum
        let mut top = (f64::NEG_INFINITY, usize::MAX);
        let mut second = f64::NEG_INFINITY;
        for (i, &x) in w.iter().enumerate() {
            if x > top.0 {
                second = top.0;
                top = (x, i);
            } else if x > second {
                second = x;
            }
        }
        let phi = s.phi();
        let mut best = (f64::NEG_INFINITY, 0);
        for i in 0..m {
            let raised = w[i] + 1.0;
            let other_max = if i == top.1 { second } else { top.0 };
            let mx = raised.max(other_max);
            let after = phi - w[i].exp() + raised.exp() - mx.exp() + 1.0;
            if after > best.0 + 1e-12 {
                best = (after, i);
            }
        }
        unit(m, best.1)
    }
}

/// Spreads evenly over every box except a heaviest one.
pub struct NonMaxSpreader;

impl BoxAdversary for NonMaxSpreader {
    fn name(&self) -> String {
        "non_max_spreader".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        if s.m() == 1 {
            return unit(1, 0);
        }
        let skip = cbox_breaker_reset(s.weights());
        spread(s.m(), &(0..s.m()).filter(|&i| i != skip).collect::<Vec<_>>())
    }
}

/// The classic phase adversary: spread evenly over the boxes not reset in
/// the current phase; a new phase starts when only one such box is left.
pub struct Harmonic {
    live: Vec<usize>,
    phase_start: usize,
}

impl Harmonic {
    pub fn new() -> Harmonic {
        Harmonic { live: Vec::new(), phase_start: 0 }
    }
}

impl Default for Harmonic {
    fn default() -> Self {
        Harmonic::new()
    }
}

impl BoxAdversary for Harmonic {
    fn name(&self) -> String {
        "harmonic".into()
    }
    fn distribute(&mut self, s: &BoxState) -> Vec<f64> {
        self.live.retain(|&i| s.last_reset()[i] <= self.phase_start);
        if self.live.len() <= 1 {
            self.live = (0..s.m()).collect();
            self.phase_start = s.round();
        }
        spread(s.m(), &self.live)
    }
}

/// Every adversary of the test zoo, in a fixed order.
pub fn adversary_zoo(seed: u64) -> Vec<Box<dyn BoxAdversary>> {
    vec![
        Box::new(Uniform),
        Box::new(SingleBox(0)),
        Box::new(LeastRecentlyReset),
        Box::new(RandomSpread::new(seed)),
        Box::new(PotentialGreedy),
        Box::new(NonMaxSpreader),
        Box::new(Harmonic::new()),
    ]
}

pub fn adversary_by_name(name: &str, seed: u64) -> Result<Box<dyn BoxAdversary>> {
    Ok(match name {
        "uniform" => Box::new(Uniform),
        "single_box" => Box::new(SingleBox(0)),
        "least_recently_reset" => Box::new(LeastRecentlyReset),
        "random" => Box::new(RandomSpread::new(seed)),
        "potential_greedy" => Box::new(PotentialGreedy),
        "non_max_spreader" => Box::new(NonMaxSpreader),
        "harmonic" => Box::new(Harmonic::new()),
        other => return Err(Error::Config(format!("unknown box adversary `{other}`"))),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Weights right after BoxMaker's move (continuous units).
    pub weights: Vec<f64>,
    pub reset: usize,
    pub phi_before: f64,
    pub phi_after_maker: f64,
    pub phi_after_reset: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub round: usize,
    pub kind: ViolationKind,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    WeightAfterMaker,
    WeightAfterReset,
    PhiIncrement,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxTrace {
    pub m: usize,
    pub mode: BoxMode,
    pub adversary: String,
    pub rounds: Vec<RoundRecord>,
    pub max_weight: f64,
    pub max_phi_increment: f64,
    pub violations: Vec<Violation>,
    pub forfeit: Option<String>,
}

impl BoxTrace {
    /// CSV with one row per round: per-box weights (claim units in
    /// integral mode), the reset box, Φ after the reset and the bound.
    pub fn to_csv(&self) -> String {
        let scale = match self.mode {
            BoxMode::Continuous => 1.0,
            BoxMode::Integral { q } => q as f64,
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["round".to_string()];
        header.extend((0..self.m).map(|i| format!("w{i}")));
        header.extend(["reset", "phi", "bound"].map(String::from));
        w.write_record(&header).expect("in-memory write");
        for r in &self.rounds {
            let mut row = vec![r.round.to_string()];
            row.extend(r.weights.iter().map(|x| format!("{}", x * scale)));
            row.push(r.reset.to_string());
            row.push(format!("{}", r.phi_after_reset));
            row.push(format!("{}", r.bound * scale));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Plays `k` rounds of BoxMaker against the max-weight reset strategy,
/// checking the weight bound after each BoxMaker move and each reset, and
/// (continuous mode) the per-round potential increment.
pub fn play_rbox(m: usize, mode: BoxMode, k: usize, adversary: &mut dyn BoxAdversary, keep_rounds: bool) -> Result<BoxTrace> {
    let mut state = BoxState::new(m, mode)?;
    let mut trace = BoxTrace {
        m,
        mode,
        adversary: adversary.name(),
        rounds: Vec::new(),
        max_weight: 0.0,
        max_phi_increment: f64::NEG_INFINITY,
        violations: Vec::new(),
        forfeit: None,
    };
    for j in 1..=k {
        let phi_before = state.phi();
        let dist = adversary.distribute(&state);
        let applied = match mode {
            BoxMode::Continuous => state.add_continuous(&WeightDelta(dist)),
            BoxMode::Integral { q } => state.add_claims(&quantize(&dist, q)),
        };
        if let Err(e) = applied {
            trace.forfeit = Some(format!("round {j}: {e}"));
            break;
        }
        let bound = continuous_bound(m, j);
        let after_maker = state.weights().to_vec();
        let phi_after_maker = state.phi();
        let mx = state.max_weight();
        trace.max_weight = trace.max_weight.max(mx);
        if mx > bound {
            trace.violations.push(Violation { round: j, kind: ViolationKind::WeightAfterMaker, value: mx, limit: bound });
        }
        let reset = cbox_breaker_reset(state.weights());
        state.reset(reset);
        let after = state.max_weight();
        if after > bound {
            trace.violations.push(Violation { round: j, kind: ViolationKind::WeightAfterReset, value: after, limit: bound });
        }
        let phi_after_reset = state.phi();
        let inc = phi_after_reset - phi_before;
        trace.max_phi_increment = trace.max_phi_increment.max(inc);
        if inc > 1.0 + 1e-9 {
            trace.violations.push(Violation { round: j, kind: ViolationKind::PhiIncrement, value: inc, limit: 1.0 });
        }
        if keep_rounds {
            trace.rounds.push(RoundRecord {
                round: j,
                weights: after_maker,
                reset,
                phi_before,
                phi_after_maker,
                phi_after_reset,
                bound,
            });
        }
    }
    Ok(trace)
}
