//! Game state, the `(p:q)` turn loop and the strategy contract.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::board::{Board, ElementId};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::transcript::{MoveRecord, Outcome, Transcript, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Maker,
    Breaker,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Maker => Side::Breaker,
            Side::Breaker => Side::Maker,
        }
    }

    fn slot(self) -> usize {
        match self {
            Side::Maker => 0,
            Side::Breaker => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Maker => "maker",
            Side::Breaker => "breaker",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s.to_ascii_lowercase().as_str() {
            "maker" => Ok(Side::Maker),
            "breaker" => Ok(Side::Breaker),
            other => Err(Error::Config(format!("unknown side `{other}`"))),
        }
    }
}

/// `(p:q)`: Maker claims `p` elements per turn, Breaker `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bias {
    pub p: usize,
    pub q: usize,
}

impl Bias {
    pub fn new(p: usize, q: usize) -> Result<Bias> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidBias(format!("{p}:{q}")));
        }
        Ok(Bias { p, q })
    }

    pub fn of(self, side: Side) -> usize {
        match side {
            Side::Maker => self.p,
            Side::Breaker => self.q,
        }
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.q)
    }
}

impl FromStr for Bias {
    type Err = Error;
    fn from_str(s: &str) -> Result<Bias> {
        let (p, q) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidBias(format!("expected p:q, got `{s}`")))?;
        let p = p.trim().parse().map_err(|_| Error::InvalidBias(s.to_string()))?;
        let q = q.trim().parse().map_err(|_| Error::InvalidBias(s.to_string()))?;
        Bias::new(p, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    Free,
    Maker,
    Breaker,
}

impl From<Side> for Owner {
    fn from(s: Side) -> Owner {
        match s {
            Side::Maker => Owner::Maker,
            Side::Breaker => Owner::Breaker,
        }
    }
}

/// Ownership of every board element plus per-vertex degree caches of the
/// Maker graph `M` and the Breaker graph `B`.
#[derive(Debug, Clone)]
pub struct GameState {
    board: Arc<Board>,
    owner: Vec<Owner>,
    maker_deg: Vec<u32>,
    breaker_deg: Vec<u32>,
    claims: [usize; 2],
    moves: [usize; 2],
}

impl GameState {
    pub fn new(board: Arc<Board>) -> GameState {
        let n = board.vertex_count().unwrap_or(0);
        GameState {
            owner: vec![Owner::Free; board.size()],
            maker_deg: vec![0; n],
            breaker_deg: vec![0; n],
            claims: [0; 2],
            moves: [0; 2],
            board,
        }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn board_arc(&self) -> Arc<Board> {
        Arc::clone(&self.board)
    }

    pub fn board_size(&self) -> usize {
        self.owner.len()
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.board.vertex_count()
    }

    #[inline]
    pub fn owner(&self, e: ElementId) -> Owner {
        self.owner[e.index()]
    }

    #[inline]
    pub fn is_free(&self, e: ElementId) -> bool {
        self.owner[e.index()] == Owner::Free
    }

    pub fn ownership(&self) -> &[Owner] {
        &self.owner
    }

    /// Owner of the edge `(u, v)`, or `None` when the board has no such edge.
    #[inline]
    pub fn edge_owner(&self, u: usize, v: usize) -> Option<Owner> {
        self.board.edge(u, v).map(|e| self.owner[e.index()])
    }

    #[inline]
    pub fn is_free_edge(&self, u: usize, v: usize) -> bool {
        self.edge_owner(u, v) == Some(Owner::Free)
    }

    #[inline]
    pub fn is_maker_edge(&self, u: usize, v: usize) -> bool {
        self.edge_owner(u, v) == Some(Owner::Maker)
    }

    #[inline]
    pub fn is_breaker_edge(&self, u: usize, v: usize) -> bool {
        self.edge_owner(u, v) == Some(Owner::Breaker)
    }

    #[inline]
    pub fn maker_degree(&self, v: usize) -> usize {
        self.maker_deg[v] as usize
    }

    #[inline]
    pub fn breaker_degree(&self, v: usize) -> usize {
        self.breaker_deg[v] as usize
    }

    pub fn claims(&self, side: Side) -> usize {
        self.claims[side.slot()]
    }

    pub fn move_count(&self, side: Side) -> usize {
        self.moves[side.slot()]
    }

    pub fn free_count(&self) -> usize {
        self.owner.len() - self.claims[0] - self.claims[1]
    }

    pub fn free_elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Owner::Free)
            .map(|(i, _)| ElementId(i as u32))
    }

    pub fn owned_by(&self, side: Side) -> impl Iterator<Item = ElementId> + '_ {
        let want = Owner::from(side);
        self.owner
            .iter()
            .enumerate()
            .filter(move |(_, o)| **o == want)
            .map(|(i, _)| ElementId(i as u32))
    }

    /// Claims a single free element for `side`.
    pub fn apply_claim(&mut self, side: Side, e: ElementId) -> Result<()> {
        let i = e.index();
        if i >= self.owner.len() {
            return Err(Error::OutOfRange(i, self.owner.len()));
        }
        if self.owner[i] != Owner::Free {
            return Err(Error::DoubleClaim(i));
        }
        self.owner[i] = side.into();
        self.claims[side.slot()] += 1;
        if self.board.is_edge_board() {
            let (u, v) = self.board.endpoints(e);
            let deg = match side {
                Side::Maker => &mut self.maker_deg,
                Side::Breaker => &mut self.breaker_deg,
            };
            deg[u] += 1;
            deg[v] += 1;
        }
        Ok(())
    }

    /// Applies a whole turn and bumps the mover's move counter.
    pub fn apply_move(&mut self, side: Side, elements: &[ElementId]) -> Result<()> {
        for &e in elements {
            self.apply_claim(side, e)?;
        }
        self.moves[side.slot()] += 1;
        Ok(())
    }

    /// Degrees of `M` and `B` recomputed from ownership.
    pub fn recomputed_degrees(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.board.vertex_count().unwrap_or(0);
        let mut dm = vec![0; n];
        let mut db = vec![0; n];
        if self.board.is_edge_board() {
            for (i, o) in self.owner.iter().enumerate() {
                let (u, v) = self.board.endpoints(ElementId(i as u32));
                match o {
                    Owner::Maker => {
                        dm[u] += 1;
                        dm[v] += 1;
                    }
                    Owner::Breaker => {
                        db[u] += 1;
                        db[v] += 1;
                    }
                    Owner::Free => {}
                }
            }
        }
        (dm, db)
    }

    pub fn degree_caches_consistent(&self) -> bool {
        let (dm, db) = self.recomputed_degrees();
        dm == self.maker_deg && db == self.breaker_deg
    }

    /// Edges of the Maker graph as vertex pairs (edge boards only).
    pub fn maker_edges(&self) -> Vec<(usize, usize)> {
        self.side_edges(Side::Maker)
    }

    pub fn side_edges(&self, side: Side) -> Vec<(usize, usize)> {
        if !self.board.is_edge_board() {
            return Vec::new();
        }
        self.owned_by(side).map(|e| self.board.endpoints(e)).collect()
    }
}

/// What a strategy wants to do on its turn.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Decision {
    pub claims: Vec<ElementId>,
    pub note: String,
    pub forfeit: Option<String>,
}

impl Decision {
    pub fn claim(claims: Vec<ElementId>) -> Decision {
        Decision { claims, ..Decision::default() }
    }

    pub fn noted(claims: Vec<ElementId>, note: impl Into<String>) -> Decision {
        Decision { claims, note: note.into(), forfeit: None }
    }

    pub fn pass() -> Decision {
        Decision::default()
    }

    pub fn forfeit(reason: impl Into<String>) -> Decision {
        Decision { forfeit: Some(reason.into()), ..Decision::default() }
    }
}

/// Move-selection contract. `choose` sees the current state and the
/// opponent's previous move and returns at most `budget` free elements.
pub trait Strategy {
    fn name(&self) -> String;
    fn side(&self) -> Side;
    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], budget: usize) -> Decision;

    /// Maker strategies with an implicit winning family report completion here.
    fn completed(&self, _state: &GameState) -> bool {
        false
    }

    /// Realized parameters echoed into the transcript header.
    fn params(&self) -> Value {
        Value::Null
    }

    /// Post-game report stored in the transcript footer.
    fn report(&self) -> Value {
        Value::Null
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    MakerWin,
    Undecided,
    BreakerWin,
}

/// How a playout decides that Maker has won.
pub enum WinRule<'a> {
    /// No winning family: play to exhaustion or the move cap.
    Never,
    /// Explicit winning sets.
    Hypergraph(&'a Hypergraph),
    /// Ask the Maker strategy (`Strategy::completed`).
    MakerDeclared,
    /// Arbitrary predicate over the state.
    Predicate(&'a dyn Fn(&GameState) -> GameStatus),
}

/// `MakerWin` iff some winning set is fully Maker-owned; `BreakerWin` iff
/// the board is exhausted without that.
pub fn winner_check(state: &GameState, family: &Hypergraph) -> Result<GameStatus> {
    if family.board_size() != state.board_size() {
        return Err(Error::BoardMismatch { expected: state.board_size(), actual: family.board_size() });
    }
    let won = family
        .sets()
        .iter()
        .any(|set| set.iter().all(|&e| state.owner(e) == Owner::Maker));
    Ok(if won {
        GameStatus::MakerWin
    } else if state.free_count() == 0 {
        GameStatus::BreakerWin
    } else {
        GameStatus::Undecided
    })
}

/// Static description of a playout, copied into the transcript header.
#[derive(Debug, Clone)]
pub struct GameSetup {
    pub kind: String,
    pub bias: Bias,
    pub first: Side,
    pub move_cap: usize,
    pub seed: u64,
    pub params: Value,
}

impl GameSetup {
    pub fn new(kind: &str, bias: Bias, first: Side, seed: u64) -> GameSetup {
        GameSetup { kind: kind.to_string(), bias, first, move_cap: usize::MAX, seed, params: Value::Null }
    }

    pub fn with_cap(mut self, cap: usize) -> GameSetup {
        self.move_cap = cap;
        self
    }

    pub fn with_params(mut self, params: Value) -> GameSetup {
        self.params = params;
        self
    }
}

fn status_of(rule: &WinRule<'_>, state: &GameState, maker: &dyn Strategy) -> GameStatus {
    match rule {
        WinRule::Never => GameStatus::Undecided,
        WinRule::Hypergraph(h) => winner_check(state, h).unwrap_or(GameStatus::Undecided),
        WinRule::MakerDeclared => {
            if maker.completed(state) {
                GameStatus::MakerWin
            } else {
                GameStatus::Undecided
            }
        }
        WinRule::Predicate(f) => f(state),
    }
}

fn validate(state: &GameState, claims: &[ElementId], bias: usize) -> std::result::Result<(), String> {
    if claims.len() > bias {
        return Err(format!("claimed {} elements with bias {bias}", claims.len()));
    }
    for (i, e) in claims.iter().enumerate() {
        if e.index() >= state.board_size() {
            return Err(format!("element {e} out of range"));
        }
        if !state.is_free(*e) {
            return Err(format!("element {e} is not free"));
        }
        if claims[..i].contains(e) {
            return Err(format!("element {e} claimed twice in one move"));
        }
    }
    Ok(())
}

/// Plays one game from the empty board to completion and returns its transcript.
pub fn run_game(
    board: Arc<Board>,
    setup: &GameSetup,
    maker: &mut dyn Strategy,
    breaker: &mut dyn Strategy,
    rule: &WinRule<'_>,
) -> (Transcript, GameState) {
    let mut state = GameState::new(Arc::clone(&board));
    let mut moves: Vec<MoveRecord> = Vec::new();
    let mut last: [Vec<ElementId>; 2] = [Vec::new(), Vec::new()];
    let mut turn = setup.first;

    let outcome = loop {
        if moves.len() >= setup.move_cap {
            break Outcome::MoveCap;
        }
        if state.free_count() == 0 {
            break Outcome::Exhausted;
        }
        let bias = setup.bias.of(turn);
        let budget = bias.min(state.free_count());
        let opp = last[turn.other().slot()].clone();
        let decision = match turn {
            Side::Maker => maker.choose(&state, &opp, budget),
            Side::Breaker => breaker.choose(&state, &opp, budget),
        };
        if let Some(reason) = decision.forfeit {
            break Outcome::Forfeit { side: turn, reason };
        }
        if let Err(why) = validate(&state, &decision.claims, bias) {
            break Outcome::Forfeit { side: turn, reason: format!("illegal move: {why}") };
        }
        state
            .apply_move(turn, &decision.claims)
            .expect("validated move must apply");
        debug_assert!(state.degree_caches_consistent());
        moves.push(MoveRecord { player: turn, elements: decision.claims.clone(), note: decision.note });
        last[turn.slot()] = decision.claims;

        match status_of(rule, &state, maker) {
            GameStatus::MakerWin => break Outcome::MakerWin { move_index: moves.len() - 1 },
            GameStatus::BreakerWin => break Outcome::BreakerWin,
            GameStatus::Undecided => {}
        }
        turn = turn.other();
    };

    let mut params = serde_json::Map::new();
    params.insert("setup".into(), setup.params.clone());
    params.insert("maker".into(), maker.params());
    params.insert("breaker".into(), breaker.params());
    let mut report = serde_json::Map::new();
    report.insert("maker".into(), maker.report());
    report.insert("breaker".into(), breaker.report());

    let transcript = Transcript {
        format_version: FORMAT_VERSION,
        kind: setup.kind.clone(),
        seed: setup.seed,
        bias: setup.bias,
        first_mover: setup.first,
        board: board.spec().clone(),
        maker: maker.name(),
        breaker: breaker.name(),
        params: Value::Object(params),
        moves,
        outcome,
        report: Value::Object(report),
    };
    (transcript, state)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct LowestFree(Side);
    impl Strategy for LowestFree {
        fn name(&self) -> String {
            "lowest".into()
        }
        fn side(&self) -> Side {
            self.0
        }
        fn choose(&mut self, s: &GameState, _: &[ElementId], budget: usize) -> Decision {
            Decision::claim(s.free_elements().take(budget).collect())
        }
    }

    struct Cheater;
    impl Strategy for Cheater {
        fn name(&self) -> String {
            "cheater".into()
        }
        fn side(&self) -> Side {
            Side::Maker
        }
        fn choose(&mut self, _: &GameState, _: &[ElementId], _: usize) -> Decision {
            Decision::claim(vec![ElementId(0)])
        }
    }

    #[test]
    fn apply_claim_updates_degrees_and_rejects_double_claims() {
        let b = Arc::new(Board::complete(3).unwrap());
        let mut s = GameState::new(b.clone());
        let e = b.edge(0, 1).unwrap();
        s.apply_claim(Side::Maker, e).unwrap();
        assert_eq!(s.owner(e), Owner::Maker);
        assert_eq!(s.maker_degree(0), 1);
        assert_eq!(s.maker_degree(1), 1);
        assert_eq!(s.maker_degree(2), 0);
        assert_eq!(s.apply_claim(Side::Breaker, e), Err(Error::DoubleClaim(e.index())));
        assert!(s.degree_caches_consistent());
    }

    #[test]
    fn one_element_board_exhausts() {
        let b = Arc::new(Board::elements(1).unwrap());
        let setup = GameSetup::new("t", Bias::new(1, 1).unwrap(), Side::Breaker, 0);
        let (t, s) = run_game(b, &setup, &mut LowestFree(Side::Maker), &mut LowestFree(Side::Breaker), &WinRule::Never);
        assert_eq!(s.owner(ElementId(0)), Owner::Breaker);
        assert_eq!(t.outcome, Outcome::Exhausted);
    }

    #[test]
    fn pair_set_is_breaker_win_either_order() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        for first in [Side::Maker, Side::Breaker] {
            let b = Arc::new(Board::elements(2).unwrap());
            let setup = GameSetup::new("t", Bias::new(1, 1).unwrap(), first, 0);
            let (t, _) = run_game(b, &setup, &mut LowestFree(Side::Maker), &mut LowestFree(Side::Breaker), &WinRule::Hypergraph(&h));
            assert_eq!(t.outcome, Outcome::BreakerWin);
        }
    }

    #[test]
    fn illegal_move_is_charged_to_the_mover() {
        let b = Arc::new(Board::elements(3).unwrap());
        let setup = GameSetup::new("t", Bias::new(1, 1).unwrap(), Side::Breaker, 0);
        let (t, _) = run_game(b, &setup, &mut Cheater, &mut LowestFree(Side::Breaker), &WinRule::Never);
        match t.outcome {
            Outcome::Forfeit { side, .. } => assert_eq!(side, Side::Maker),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn winner_check_examples() {
        let b = Arc::new(Board::elements(2).unwrap());
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let mut s = GameState::new(b.clone());
        s.apply_claim(Side::Maker, ElementId(0)).unwrap();
        s.apply_claim(Side::Maker, ElementId(1)).unwrap();
        assert_eq!(winner_check(&s, &h).unwrap(), GameStatus::MakerWin);

        let mut s = GameState::new(b.clone());
        s.apply_claim(Side::Breaker, ElementId(0)).unwrap();
        assert_eq!(winner_check(&s, &h).unwrap(), GameStatus::Undecided);
        s.apply_claim(Side::Maker, ElementId(1)).unwrap();
        assert_eq!(winner_check(&s, &h).unwrap(), GameStatus::BreakerWin);

        let empty = Hypergraph::new(2, vec![]).unwrap();
        let mut s = GameState::new(b.clone());
        s.apply_claim(Side::Maker, ElementId(0)).unwrap();
        s.apply_claim(Side::Maker, ElementId(1)).unwrap();
        assert_eq!(winner_check(&s, &empty).unwrap(), GameStatus::BreakerWin);

        let wrong = Hypergraph::new(3, vec![]).unwrap();
        assert!(winner_check(&s, &wrong).is_err());
    }

    #[test]
    fn bias_parsing() {
        assert_eq!("2:3".parse::<Bias>().unwrap(), Bias { p: 2, q: 3 });
        assert!("0:1".parse::<Bias>().is_err());
        assert!("12".parse::<Bias>().is_err());
    }
}
