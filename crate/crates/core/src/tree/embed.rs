//! Partial embeddings of a tree into the board's vertex set.

use crate::game::GameState;

use super::TreeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexStatus {
    New,
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEmbedding {
    f: Vec<Option<usize>>,
    inv: Vec<Option<usize>>,
    size: usize,
}

impl PartialEmbedding {
    pub fn new(tree_n: usize, board_n: usize) -> PartialEmbedding {
        PartialEmbedding { f: vec![None; tree_n], inv: vec![None; board_n], size: 0 }
    }

    pub fn map(&self) -> &[Option<usize>] {
        &self.f
    }

    pub fn image(&self, x: usize) -> Option<usize> {
        self.f[x]
    }

    pub fn preimage(&self, v: usize) -> Option<usize> {
        self.inv[v]
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn is_total(&self) -> bool {
        self.size == self.f.len()
    }

    pub fn is_embedded(&self, x: usize) -> bool {
        self.f[x].is_some()
    }

    pub fn is_taken(&self, v: usize) -> bool {
        self.inv[v].is_some()
    }

    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.inv.len()).filter(|&v| self.inv[v].is_none())
    }

    pub fn embed(&mut self, x: usize, v: usize) -> Result<(), String> {
        if let Some(w) = self.f[x] {
            return Err(format!("tree vertex {x} already sits on {w}"));
        }
        if let Some(y) = self.inv[v] {
            return Err(format!("board vertex {v} already holds {y}"));
        }
        self.f[x] = Some(v);
        self.inv[v] = Some(x);
        self.size += 1;
        Ok(())
    }

    pub fn status(&self, tree: &TreeSpec, x: usize) -> VertexStatus {
        if self.f[x].is_none() {
            VertexStatus::New
        } else if tree.neighbors(x).iter().all(|&y| self.f[y].is_some()) {
            VertexStatus::Closed
        } else {
            VertexStatus::Open
        }
    }

    /// Tree-neighbours of `x` that are not yet embedded.
    pub fn new_neighbors<'a>(&'a self, tree: &'a TreeSpec, x: usize) -> impl Iterator<Item = usize> + 'a {
        tree.neighbors(x).iter().copied().filter(move |&y| self.f[y].is_none())
    }

    /// First violated invariant, if any: injectivity, or a tree edge
    /// between embedded vertices that Maker does not own.
    pub fn violation(&self, tree: &TreeSpec, state: &GameState) -> Option<String> {
        let mut count = 0;
        for (x, img) in self.f.iter().enumerate() {
            if let Some(v) = *img {
                count += 1;
                if self.inv[v] != Some(x) {
                    return Some(format!("board vertex {v} is not held by {x}"));
                }
            }
        }
        if count != self.size {
            return Some("size counter out of sync".into());
        }
        tree.edges().iter().find_map(|&(x, y)| match (self.f[x], self.f[y]) {
            (Some(u), Some(v)) if !state.is_maker_edge(u, v) => {
                Some(format!("tree edge {x}-{y} maps to {u}-{v}, which Maker does not own"))
            }
            _ => None,
        })
    }
}
