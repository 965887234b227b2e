//! Trees: validation, text edge lists, Prüfer decoding and the shape
//! families used by experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSpec {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeSpec {
    /// Validates that `edges` span a tree on `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<TreeSpec> {
        if n == 0 {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!("{} edges on {n} vertices", edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
            norm.push((u.min(v), u.max(v)));
        }
        // connected + n-1 edges => acyclic
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidTree("not connected".into()));
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        norm.sort_unstable();
        Ok(TreeSpec { n, adj, edges: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.degree(v) == 1).collect()
    }

    /// Text format: `n` on the first line, then `n-1` lines `u v`.
    pub fn parse(text: &str) -> Result<TreeSpec> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
            let nums = nums.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            match (n, nums.as_slice()) {
                (None, [k]) => n = Some(*k),
                (Some(_), [u, v]) => edges.push((*u, *v)),
                _ => return Err(Error::Parse { line: i + 1, msg: "unexpected token count".into() }),
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "missing vertex count".into() })?;
        TreeSpec::from_edges(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Decodes a Prüfer sequence of length `n - 2`.
    pub fn from_prufer(seq: &[usize]) -> Result<TreeSpec> {
        let n = seq.len() + 2;
        if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidTree(format!("Prüfer entry {bad} >= {n}")));
        }
        let mut degree = vec![1usize; n];
        for &x in seq {
            degree[x] += 1;
        }
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
            (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
        let mut edges = Vec::with_capacity(n - 1);
        for &x in seq {
            let std::cmp::Reverse(leaf) = heap.pop().expect("a leaf always exists");
            edges.push((leaf, x));
            degree[x] -= 1;
            if degree[x] == 1 {
                heap.push(std::cmp::Reverse(x));
            }
        }
        let std::cmp::Reverse(u) = heap.pop().expect("two vertices remain");
        let std::cmp::Reverse(v) = heap.pop().expect("two vertices remain");
        edges.push((u, v));
        TreeSpec::from_edges(n, &edges)
    }

    pub fn random_prufer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TreeSpec> {
        match n {
            0 => Err(Error::InvalidTree("no vertices".into())),
            1 => TreeSpec::from_edges(1, &[]),
            _ => {
                let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
                TreeSpec::from_prufer(&seq)
            }
        }
    }

    /// Random recursive tree whose degrees never exceed `max_degree`
    /// (at least 2), with vertex labels shuffled.
    pub fn random_bounded<R: Rng + ?Sized>(n: usize, max_degree: usize, rng: &mut R) -> Result<TreeSpec> {
        if max_degree < 2 && n > 2 {
            return Err(Error::InvalidTree("max degree below 2".into()));
        }
        let mut label: Vec<usize> = (0..n).collect();
        label.shuffle(rng);
        let mut deg = vec![0usize; n];
        let mut open: Vec<usize> = vec![0];
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for v in 1..n {
            let idx = rng.gen_range(0..open.len());
            let u = open[idx];
            edges.push((label[u], label[v]));
            deg[u] += 1;
            deg[v] += 1;
            if deg[u] >= max_degree {
                open.swap_remove(idx);
            }
            open.push(v);
        }
        TreeSpec::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<TreeSpec> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        TreeSpec::from_edges(n, &edges)
    }

    pub fn star(n: usize) -> Result<TreeSpec> {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        TreeSpec::from_edges(n, &edges)
    }

    /// Centre 0 with `legs` paths of `leg_len` edges each.
    pub fn spider(legs: usize, leg_len: usize) -> Result<TreeSpec> {
        let mut edges = Vec::new();
        let mut next = 1;
        for _ in 0..legs {
            let mut prev = 0;
            for _ in 0..leg_len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        TreeSpec::from_edges(next, &edges)
    }

    /// Spine `0..spine` with one pendant leaf per spine vertex.
    pub fn caterpillar(spine: usize) -> Result<TreeSpec> {
        let mut edges: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
        for v in 0..spine {
            edges.push((v, spine + v));
        }
        TreeSpec::from_edges(2 * spine, &edges)
    }

    /// Path `0..support` where every path vertex carries `leaves_each` leaves.
    pub fn broom(support: usize, leaves_each: usize) -> Result<TreeSpec> {
        let mut edges: Vec<_> = (1..support).map(|v| (v - 1, v)).collect();
        let mut next = support;
        for v in 0..support {
            for _ in 0..leaves_each {
                edges.push((v, next));
                next += 1;
            }
        }
        TreeSpec::from_edges(next, &edges)
    }

    /// Two adjacent centres with `leaves_each` leaves apiece.
    pub fn double_star(leaves_each: usize) -> Result<TreeSpec> {
        let mut edges = vec![(0, 1)];
        let mut next = 2;
        for c in 0..2 {
            for _ in 0..leaves_each {
                edges.push((c, next));
                next += 1;
            }
        }
        TreeSpec::from_edges(next, &edges)
    }

    /// "H" shape: centres 0 and 1 joined by an edge, each carrying two legs
    /// of `leg_len` edges, so the tree has four long bare paths.
    pub fn h_tree(leg_len: usize) -> Result<TreeSpec> {
        let mut edges = vec![(0, 1)];
        let mut next = 2;
        for c in 0..2 {
            for _ in 0..2 {
                let mut prev = c;
                for _ in 0..leg_len {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
            }
        }
        TreeSpec::from_edges(next, &edges)
    }

    /// Two long bare paths: hubs 0, 1 and 2 (each with two pendant leaves)
    /// joined hub-to-hub by paths of `bar_len` edges.
    pub fn twin_bar(bar_len: usize) -> Result<TreeSpec> {
        let mut edges = Vec::new();
        let mut next = 3;
        for (a, b) in [(0, 1), (1, 2)] {
            let mut prev = a;
            for _ in 0..bar_len.saturating_sub(1) {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, b));
        }
        for hub in [0, 2] {
            for _ in 0..2 {
                edges.push((hub, next));
                next += 1;
            }
        }
        TreeSpec::from_edges(next, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn rejects_cycles_and_forests() {
        assert!(TreeSpec::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(TreeSpec::from_edges(4, &[(0, 1), (2, 3), (0, 1)]).is_err());
        assert!(TreeSpec::from_edges(4, &[(0, 1), (1, 0), (2, 3)]).is_err());
    }

    #[test]
    fn prufer_known_sequence() {
        // [3,3,3,4] on 6 vertices: 0,1,2 hang off 3; 3-4; 4-5
        let t = TreeSpec::from_prufer(&[3, 3, 3, 4]).unwrap();
        assert_eq!(t.edges(), &[(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn shapes_have_expected_sizes() {
        assert_eq!(TreeSpec::spider(200, 5).unwrap().n(), 1001);
        assert_eq!(TreeSpec::h_tree(10).unwrap().n(), 42);
        assert_eq!(TreeSpec::caterpillar(50).unwrap().n(), 100);
        let tb = TreeSpec::twin_bar(10).unwrap();
        assert_eq!(tb.n(), 3 + 18 + 4);
        assert_eq!(tb.max_degree(), 3);
    }

    #[test]
    fn bounded_generator_respects_degree() {
        let mut rng = stream_rng(3, 0);
        for n in [2, 3, 10, 80] {
            let t = TreeSpec::random_bounded(n, 4, &mut rng).unwrap();
            assert_eq!(t.n(), n);
            assert!(t.max_degree() <= 4);
        }
    }

    #[test]
    fn text_round_trip() {
        let t = TreeSpec::spider(3, 2).unwrap();
        assert_eq!(TreeSpec::parse(&t.to_text()).unwrap(), t);
    }
}
