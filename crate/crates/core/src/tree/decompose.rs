//! Removing the interiors of long bare paths.

use serde::Serialize;

use super::TreeSpec;

/// A maximal bare path `a - interior... - b` of `len` edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarePath {
    pub a: usize,
    pub b: usize,
    /// Interior vertices in order from `a` to `b`.
    pub interior: Vec<usize>,
}

impl BarePath {
    pub fn length(&self) -> usize {
        self.interior.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Vertices kept in the forest `F`, ascending.
    pub forest_vertices: Vec<usize>,
    pub forest_edges: Vec<(usize, usize)>,
    pub paths: Vec<BarePath>,
}

impl Decomposition {
    /// Edge set of `F` plus all removed paths, sorted; equals the tree's.
    pub fn reassembled_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = self.forest_edges.clone();
        for p in &self.paths {
            let mut walk = vec![p.a];
            walk.extend_from_slice(&p.interior);
            walk.push(p.b);
            for w in walk.windows(2) {
                edges.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        edges.sort_unstable();
        edges
    }
}

/// All inclusion-maximal bare paths: walks between vertices of degree
/// other than 2 through degree-2 vertices. Each is reported once, with
/// `a < b`.
pub fn maximal_bare_paths(t: &TreeSpec) -> Vec<BarePath> {
    let n = t.n();
    let mut out = Vec::new();
    for a in (0..n).filter(|&v| t.degree(v) != 2) {
        for &first in t.neighbors(a) {
            let (mut prev, mut cur) = (a, first);
            let mut interior = Vec::new();
            while t.degree(cur) == 2 {
                interior.push(cur);
                let nb = t.neighbors(cur);
                let next = if nb[0] == prev { nb[1] } else { nb[0] };
                prev = cur;
                cur = next;
            }
            if a < cur {
                out.push(BarePath { a, b: cur, interior });
            }
        }
    }
    out.sort_by_key(|p| (p.a, p.b, p.interior.first().copied()));
    out
}

/// `F` = `T` minus the interiors of every maximal bare path with at least
/// `threshold` edges.
pub fn bare_decomposition(t: &TreeSpec, threshold: f64) -> Decomposition {
    let paths: Vec<BarePath> =
        maximal_bare_paths(t).into_iter().filter(|p| p.length() as f64 >= threshold && p.length() >= 2).collect();
    let mut removed = vec![false; t.n()];
    for p in &paths {
        for &v in &p.interior {
            removed[v] = true;
        }
    }
    let forest_edges: Vec<(usize, usize)> = t
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| !removed[u] && !removed[v])
        .collect();
    Decomposition { forest_vertices: (0..t.n()).filter(|&v| !removed[v]).collect(), forest_edges, paths }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_collapses_to_endpoints() {
        let d = bare_decomposition(&TreeSpec::path(10).unwrap(), 3.0);
        assert_eq!(d.forest_vertices, vec![0, 9]);
        assert!(d.forest_edges.is_empty());
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].length(), 9);
        assert_eq!(d.paths[0].interior, (1..9).collect::<Vec<_>>());
    }

    #[test]
    fn star_and_caterpillar_are_untouched() {
        for t in [TreeSpec::star(10).unwrap(), TreeSpec::caterpillar(50).unwrap()] {
            let d = bare_decomposition(&t, 3.0);
            assert!(d.paths.is_empty());
            assert_eq!(d.forest_vertices.len(), t.n());
            assert_eq!(d.forest_edges, t.edges().to_vec());
        }
    }

    #[test]
    fn h_tree_has_four_paths_and_reassembles() {
        let t = TreeSpec::h_tree(8).unwrap();
        let d = bare_decomposition(&t, 3.0);
        assert_eq!(d.paths.len(), 4);
        assert_eq!(d.forest_edges, vec![(0, 1)]);
        assert_eq!(d.reassembled_edges(), t.edges().to_vec());
    }
}
