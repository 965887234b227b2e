//! Finite boards with an explicit family of winning sets.
//!
//! Text format: the first non-comment line holds the board size, every
//! further line one winning set as space-separated element ids. Lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use crate::board::ElementId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    board_size: usize,
    sets: Vec<Vec<ElementId>>,
}

impl Hypergraph {
    /// Builds a family; empty winning sets are rejected.
    pub fn new(board_size: usize, sets: Vec<Vec<usize>>) -> Result<Hypergraph> {
        Hypergraph::build(board_size, sets, false)
    }

    /// Like [`Hypergraph::new`] but keeps empty sets (an instant Maker win).
    pub fn with_empty_sets(board_size: usize, sets: Vec<Vec<usize>>) -> Result<Hypergraph> {
        Hypergraph::build(board_size, sets, true)
    }

    fn build(board_size: usize, sets: Vec<Vec<usize>>, allow_empty: bool) -> Result<Hypergraph> {
        let mut out = Vec::with_capacity(sets.len());
        for mut s in sets {
            if s.is_empty() && !allow_empty {
                return Err(Error::InvalidBoard("empty winning set".into()));
            }
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&e| e >= board_size) {
                return Err(Error::OutOfRange(bad, board_size));
            }
            out.push(s.into_iter().map(ElementId::from).collect());
        }
        Ok(Hypergraph { board_size, sets: out })
    }

    pub fn board_size(&self) -> usize {
        self.board_size
    }

    pub fn sets(&self) -> &[Vec<ElementId>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn parse(text: &str) -> Result<Hypergraph> {
        let mut size: Option<usize> = None;
        let mut sets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: std::result::Result<Vec<usize>, _> =
                line.split_whitespace().map(str::parse::<usize>).collect();
            let nums = nums.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            match size {
                None => {
                    if nums.len() != 1 {
                        return Err(Error::Parse { line: i + 1, msg: "expected the board size".into() });
                    }
                    size = Some(nums[0]);
                }
                Some(n) => {
                    if let Some(&bad) = nums.iter().find(|&&e| e >= n) {
                        return Err(Error::Parse { line: i + 1, msg: format!("element {bad} >= board size {n}") });
                    }
                    sets.push(nums);
                }
            }
        }
        let size = size.ok_or(Error::Parse { line: 0, msg: "missing board size".into() })?;
        Hypergraph::new(size, sets)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.board_size);
        for set in &self.sets {
            let ids: Vec<String> = set.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
        s
    }
}
