//! Interactive play: a person takes the Breaker side from a terminal.

use std::fs;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use crate::board::{Board, ElementId};
use crate::error::Result;
use crate::game::{Decision, GameState, Side, Strategy};
use crate::transcript::Transcript;

use super::config::ExperimentConfig;
use super::runner::{play_prepared, prepare, write_atomic};

/// Breaker driven by lines of text. Each line lists up to `q` claims,
/// separated by commas: vertex pairs `u v` on graph boards, element ids
/// otherwise. An empty line (or end of input) passes.
pub struct HumanBreaker<'a> {
    input: &'a mut dyn BufRead,
    output: &'a mut dyn Write,
    round: usize,
}

impl<'a> HumanBreaker<'a> {
    pub fn new(input: &'a mut dyn BufRead, output: &'a mut dyn Write) -> HumanBreaker<'a> {
        HumanBreaker { input, output, round: 0 }
    }

    fn summary(&mut self, state: &GameState, maker_last: &[ElementId]) {
        let board = state.board();
        let show = |e: &ElementId| {
            if board.is_edge_board() {
                let (u, v) = board.endpoints(*e);
                format!("{u} {v}")
            } else {
                e.to_string()
            }
        };
        let last: Vec<String> = maker_last.iter().map(show).collect();
        let _ = writeln!(
            self.output,
            "round {}: Maker {} / Breaker {} / free {}; Maker played [{}]",
            self.round,
            state.claims(Side::Maker),
            state.claims(Side::Breaker),
            state.free_count(),
            last.join(", ")
        );
    }
}

/// Parses one line of claims against the board; `Err` explains the problem.
pub fn parse_claims(line: &str, state: &GameState, budget: usize) -> std::result::Result<Vec<ElementId>, String> {
    let board = state.board();
    let mut out: Vec<ElementId> = Vec::new();
    for part in line.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<usize> = part
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| format!("`{t}` is not a number")))
            .collect::<std::result::Result<_, _>>()?;
        let e = element_of(board, &nums).ok_or_else(|| format!("`{part}` is not an element of this board"))?;
        if !state.is_free(e) {
            return Err(format!("`{part}` is already claimed"));
        }
        if out.contains(&e) {
            return Err(format!("`{part}` listed twice"));
        }
        out.push(e);
    }
    if out.len() > budget {
        return Err(format!("at most {budget} claims per turn"));
    }
    Ok(out)
}

fn element_of(board: &Board, nums: &[usize]) -> Option<ElementId> {
    match (board.is_edge_board(), nums) {
        (true, &[u, v]) if u != v && u.max(v) < board.vertex_count().unwrap_or(0) => board.edge(u, v),
        (false, &[e]) if e < board.size() => Some(ElementId(e as u32)),
        _ => None,
    }
}

impl Strategy for HumanBreaker<'_> {
    fn name(&self) -> String {
        "human".into()
    }

    fn side(&self) -> Side {
        Side::Breaker
    }

    fn choose(&mut self, state: &GameState, opponent_last: &[ElementId], budget: usize) -> Decision {
        self.round += 1;
        self.summary(state, opponent_last);
        loop {
            let _ = write!(self.output, "breaker ({budget} max)> ");
            let _ = self.output.flush();
            let mut line = String::new();
            match self.input.read_line(&mut line) {
                Ok(0) | Err(_) => return Decision::pass(),
                Ok(_) => {}
            }
            match parse_claims(&line, state, budget) {
                Ok(claims) => return Decision::claim(claims),
                Err(why) => {
                    let _ = writeln!(self.output, "illegal move: {why}; try again");
                }
            }
        }
    }
}

/// Plays the config's first Maker on its first seed against the person at
/// `input`, then saves the session as an ordinary transcript.
pub fn play_session(cfg: &ExperimentConfig, input: &mut dyn BufRead, output: &mut dyn Write) -> Result<(Transcript, PathBuf)> {
    cfg.validate()?;
    let seed = cfg.seed_values()[0];
    let maker = cfg.maker_names().into_iter().next().unwrap_or_default();
    let mut prepared = prepare(cfg, &maker, seed)?;
    let (t, _) = {
        let mut human = HumanBreaker::new(input, output);
        play_prepared(cfg, &mut prepared, &mut human, seed)?
    };
    let _ = writeln!(output, "game over: {}", t.outcome.label());
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let path = dir.join(format!("{}__{}__human__s{seed}.jsonl", cfg.kind.label(), maker.replace(|c: char| !c.is_ascii_alphanumeric() && c != '_' && c != '-', "_")));
    write_atomic(&path, t.to_jsonl().as_bytes())?;
    let _ = writeln!(output, "transcript saved to {}", path.display());
    Ok((t, path))
}
