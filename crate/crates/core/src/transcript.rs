//! Replayable game records and their JSON-lines encoding.
//!
//! A transcript file holds one game: a `header` line, one `move` line per
//! turn and a closing `footer` line. Every line carries a `record` tag; the
//! header carries `format_version`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::board::{Board, BoardSpec, ElementId};
use crate::error::{Error, Result};
use crate::game::{Bias, GameState, Side};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    MakerWin { move_index: usize },
    BreakerWin,
    Forfeit { side: Side, reason: String },
    Exhausted,
    MoveCap,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::MakerWin { .. } => "maker_win",
            Outcome::BreakerWin => "breaker_win",
            Outcome::Forfeit { .. } => "forfeit",
            Outcome::Exhausted => "exhausted",
            Outcome::MoveCap => "move_cap",
        }
    }

    pub fn is_maker_win(&self) -> bool {
        matches!(self, Outcome::MakerWin { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: Side,
    pub elements: Vec<ElementId>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub format_version: u32,
    pub kind: String,
    pub seed: u64,
    pub bias: Bias,
    pub first_mover: Side,
    pub board: BoardSpec,
    pub maker: String,
    pub breaker: String,
    pub params: Value,
    pub moves: Vec<MoveRecord>,
    pub outcome: Outcome,
    pub report: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case", deny_unknown_fields)]
enum Line {
    Header {
        format_version: u32,
        kind: String,
        seed: u64,
        bias: Bias,
        first_mover: Side,
        board: BoardSpec,
        maker: String,
        breaker: String,
        #[serde(default)]
        params: Value,
    },
    Move {
        index: usize,
        player: Side,
        elements: Vec<ElementId>,
        #[serde(default)]
        note: String,
    },
    Footer {
        outcome: Outcome,
        moves: usize,
        #[serde(default)]
        report: Value,
    },
}

impl Transcript {
    pub fn maker_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.player == Side::Maker).count()
    }

    pub fn breaker_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.player == Side::Breaker).count()
    }

    pub fn claims_by(&self, side: Side) -> usize {
        self.moves.iter().filter(|m| m.player == side).map(|m| m.elements.len()).sum()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Line::Header {
            format_version: self.format_version,
            kind: self.kind.clone(),
            seed: self.seed,
            bias: self.bias,
            first_mover: self.first_mover,
            board: self.board.clone(),
            maker: self.maker.clone(),
            breaker: self.breaker.clone(),
            params: self.params.clone(),
        };
        push_line(&mut out, &header);
        for (index, m) in self.moves.iter().enumerate() {
            let line = Line::Move { index, player: m.player, elements: m.elements.clone(), note: m.note.clone() };
            push_line(&mut out, &line);
        }
        let footer = Line::Footer { outcome: self.outcome.clone(), moves: self.moves.len(), report: self.report.clone() };
        push_line(&mut out, &footer);
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Transcript> {
        let mut header: Option<Transcript> = None;
        let mut footer_seen = false;
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            last_line = lineno;
            if raw.trim().is_empty() {
                continue;
            }
            if footer_seen {
                return Err(Error::Parse { line: lineno, msg: "content after footer".into() });
            }
            let line: Line = serde_json::from_str(raw).map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
            match (line, header.as_mut()) {
                (Line::Header { format_version, kind, seed, bias, first_mover, board, maker, breaker, params }, None) => {
                    if format_version != FORMAT_VERSION {
                        return Err(Error::Parse { line: lineno, msg: format!("unsupported format_version {format_version}") });
                    }
                    header = Some(Transcript {
                        format_version,
                        kind,
                        seed,
                        bias,
                        first_mover,
                        board,
                        maker,
                        breaker,
                        params,
                        moves: Vec::new(),
                        outcome: Outcome::Exhausted,
                        report: Value::Null,
                    });
                }
                (Line::Header { .. }, Some(_)) => {
                    return Err(Error::Parse { line: lineno, msg: "duplicate header".into() })
                }
                (_, None) => return Err(Error::Parse { line: lineno, msg: "missing header".into() }),
                (Line::Move { index, player, elements, note }, Some(t)) => {
                    if index != t.moves.len() {
                        return Err(Error::Parse { line: lineno, msg: format!("move index {index}, expected {}", t.moves.len()) });
                    }
                    t.moves.push(MoveRecord { player, elements, note });
                }
                (Line::Footer { outcome, moves, report }, Some(t)) => {
                    if moves != t.moves.len() {
                        return Err(Error::Parse { line: lineno, msg: format!("footer counts {moves} moves, found {}", t.moves.len()) });
                    }
                    t.outcome = outcome;
                    t.report = report;
                    footer_seen = true;
                }
            }
        }
        if !footer_seen {
            return Err(Error::Parse { line: last_line, msg: "missing footer".into() });
        }
        header.ok_or(Error::Parse { line: 0, msg: "empty transcript".into() })
    }
}

fn push_line<T: Serialize>(out: &mut String, v: &T) {
    out.push_str(&serde_json::to_string(v).expect("transcript lines serialize"));
    out.push('\n');
}

/// First problem found while replaying a transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayError {
    pub move_index: usize,
    pub message: String,
}

/// Replays the moves from the empty board, checking turn order, bias and
/// that every claimed element is free. Moves shorter than the bias are
/// accepted (passes and exhausted boards).
pub fn replay(t: &Transcript) -> std::result::Result<GameState, ReplayError> {
    replay_with(t, |_, _, _| Ok(()))
}

/// Replay with a hook invoked after every applied move.
pub fn replay_with<F>(t: &Transcript, mut hook: F) -> std::result::Result<GameState, ReplayError>
where
    F: FnMut(usize, &MoveRecord, &GameState) -> std::result::Result<(), String>,
{
    let board = Board::from_spec(&t.board).map_err(|e| ReplayError { move_index: 0, message: e.to_string() })?;
    let mut state = GameState::new(Arc::new(board));
    let mut expected = t.first_mover;
    for (i, m) in t.moves.iter().enumerate() {
        let fail = |message: String| ReplayError { move_index: i, message };
        if m.player != expected {
            return Err(fail(format!("expected {expected} to move")));
        }
        if m.elements.len() > t.bias.of(m.player) {
            return Err(fail(format!("{} claims exceed bias {}", m.elements.len(), t.bias.of(m.player))));
        }
        state.apply_move(m.player, &m.elements).map_err(|e| fail(e.to_string()))?;
        if !state.degree_caches_consistent() {
            return Err(fail("degree cache mismatch".into()));
        }
        hook(i, m, &state).map_err(fail)?;
        expected = expected.other();
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        Transcript {
            format_version: FORMAT_VERSION,
            kind: "demo".into(),
            seed: 9,
            bias: Bias { p: 1, q: 2 },
            first_mover: Side::Breaker,
            board: BoardSpec::Complete { n: 4 },
            maker: "m".into(),
            breaker: "b".into(),
            params: serde_json::json!({"x": 1}),
            moves: vec![
                MoveRecord { player: Side::Breaker, elements: vec![ElementId(0), ElementId(1)], note: String::new() },
                MoveRecord { player: Side::Maker, elements: vec![ElementId(5)], note: "hello".into() },
            ],
            outcome: Outcome::Exhausted,
            report: Value::Null,
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let t = sample();
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().next().unwrap().contains("\"format_version\":1"));
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), t);
    }

    #[test]
    fn corrupt_line_reports_its_number() {
        let text = sample().to_jsonl().replace("\"player\":\"maker\"", "\"player\":\"nobody\"");
        match Transcript::from_jsonl(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn replay_flags_duplicate_claims() {
        let mut t = sample();
        t.moves[1].elements = vec![ElementId(1)];
        let err = replay(&t).unwrap_err();
        assert_eq!(err.move_index, 1);
        let ok = replay(&sample()).unwrap();
        assert_eq!(ok.claims(Side::Breaker), 2);
    }
}
