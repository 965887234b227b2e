//! Boards and element identifiers.
//!
//! Edge boards number their elements lexicographically over vertex pairs
//! `(u, v)` with `u < v`: for `K_n` the pair `(u, v)` has index
//! `u*n - u*(u+1)/2 + (v - u - 1)`. Other graph boards list their edges in
//! the same lexicographic order, restricted to the pairs that exist.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ElementId {
    fn from(i: usize) -> Self {
        ElementId(i as u32)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Portable description of a board, stored in transcript headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoardSpec {
    /// Edge set of the complete graph on `n` vertices.
    Complete { n: usize },
    /// Edge set of `K_{r,r}`; part A is `0..r`, part B is `r..2r`.
    Bipartite { r: usize },
    /// Edge set of an arbitrary simple graph.
    Graph { n: usize, edges: Vec<(usize, usize)> },
    /// Abstract elements without vertex structure.
    Elements { size: usize },
}

const NO_EDGE: u32 = u32::MAX;

/// An immutable board: the element set `X` and, for edge boards, the
/// endpoint structure of each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    spec: BoardSpec,
    size: usize,
    vertices: Option<usize>,
    endpoints: Vec<(u32, u32)>,
    matrix: Vec<u32>,
}

/// Index of the pair `(u, v)`, `u < v`, in the lexicographic order of `K_n`.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

impl Board {
    pub fn from_spec(spec: &BoardSpec) -> Result<Board> {
        match spec {
            BoardSpec::Complete { n } => Board::complete(*n),
            BoardSpec::Bipartite { r } => Board::bipartite(*r),
            BoardSpec::Graph { n, edges } => Board::graph(*n, edges),
            BoardSpec::Elements { size } => Board::elements(*size),
        }
    }

    pub fn complete(n: usize) -> Result<Board> {
        if n < 2 {
            return Err(Error::InvalidBoard(format!("K_{n} has no edges")));
        }
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Ok(Board::build(BoardSpec::Complete { n }, n, &edges))
    }

    pub fn bipartite(r: usize) -> Result<Board> {
        if r < 1 {
            return Err(Error::InvalidBoard("K_{0,0} has no edges".into()));
        }
        let edges: Vec<(usize, usize)> =
            (0..r).flat_map(|a| (0..r).map(move |b| (a, r + b))).collect();
        Ok(Board::build(BoardSpec::Bipartite { r }, 2 * r, &edges))
    }

    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Board> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidBoard(format!("bad edge ({u}, {v}) on {n} vertices")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::InvalidBoard("duplicate edge".into()));
        }
        if norm.is_empty() {
            return Err(Error::InvalidBoard("graph board without edges".into()));
        }
        Ok(Board::build(BoardSpec::Graph { n, edges: norm.clone() }, n, &norm))
    }

    pub fn elements(size: usize) -> Result<Board> {
        if size == 0 {
            return Err(Error::InvalidBoard("empty board".into()));
        }
        Ok(Board {
            spec: BoardSpec::Elements { size },
            size,
            vertices: None,
            endpoints: Vec::new(),
            matrix: Vec::new(),
        })
    }

    fn build(spec: BoardSpec, n: usize, edges: &[(usize, usize)]) -> Board {
        let mut matrix = vec![NO_EDGE; n * n];
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            matrix[u * n + v] = i as u32;
            matrix[v * n + u] = i as u32;
            endpoints.push((u as u32, v as u32));
        }
        Board { spec, size: edges.len(), vertices: Some(n), endpoints, matrix }
    }

    pub fn spec(&self) -> &BoardSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.vertices
    }

    pub fn is_edge_board(&self) -> bool {
        self.vertices.is_some()
    }

    /// Element joining `u` and `v`, if the board has one.
    #[inline]
    pub fn edge(&self, u: usize, v: usize) -> Option<ElementId> {
        let n = self.vertices?;
        if u >= n || v >= n {
            return None;
        }
        let id = self.matrix[u * n + v];
        (id != NO_EDGE).then_some(ElementId(id))
    }

    #[inline]
    pub fn endpoints(&self, e: ElementId) -> (usize, usize) {
        let (u, v) = self.endpoints[e.index()];
        (u as usize, v as usize)
    }

    pub fn elements_iter(&self) -> impl Iterator<Item = ElementId> {
        (0..self.size as u32).map(ElementId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_board_sizes() {
        assert_eq!(Board::complete(3).unwrap().size(), 3);
        assert_eq!(Board::complete(4).unwrap().size(), 6);
        assert!(Board::complete(1).is_err());
    }

    #[test]
    fn lexicographic_encoding_matches_formula() {
        for n in 2..12 {
            let b = Board::complete(n).unwrap();
            let mut expect = 0;
            for u in 0..n {
                for v in u + 1..n {
                    assert_eq!(b.edge(u, v), Some(ElementId(expect)));
                    assert_eq!(b.edge(v, u), Some(ElementId(expect)));
                    assert_eq!(pair_index(n, u, v), expect as usize);
                    assert_eq!(b.endpoints(ElementId(expect)), (u, v));
                    expect += 1;
                }
            }
        }
    }

    #[test]
    fn bipartite_has_no_inner_edges() {
        let b = Board::bipartite(3).unwrap();
        assert_eq!(b.size(), 9);
        assert!(b.edge(0, 1).is_none());
        assert!(b.edge(3, 4).is_none());
        assert!(b.edge(0, 3).is_some());
    }

    #[test]
    fn graph_board_rejects_loops_and_duplicates() {
        assert!(Board::graph(3, &[(0, 0)]).is_err());
        assert!(Board::graph(3, &[(0, 1), (1, 0)]).is_err());
        let b = Board::graph(4, &[(2, 3), (0, 1)]).unwrap();
        assert_eq!(b.edge(0, 1), Some(ElementId(0)));
        assert_eq!(b.edge(2, 3), Some(ElementId(1)));
        assert_eq!(b.edge(0, 2), None);
    }
}
