//! Graph-level ground truth: tree copies, matchings, Hamilton
//! connectivity, the expansion condition and the triangle invariant.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tree::TreeSpec;

/// True iff `f` is injective and maps every tree edge onto an edge of `host`.
/// Fails when `f` is not defined on every tree vertex.
pub fn verify_tree_copy(tree: &TreeSpec, host: &Graph, f: &[Option<usize>]) -> Result<bool> {
    if f.len() != tree.n() || f.iter().any(Option::is_none) {
        return Err(Error::Precondition("embedding is not total".into()));
    }
    let img: Vec<usize> = f.iter().map(|x| x.unwrap()).collect();
    let mut seen = vec![false; host.vertex_count()];
    for &v in &img {
        if v >= host.vertex_count() || seen[v] {
            return Ok(false);
        }
        seen[v] = true;
    }
    Ok(tree.edges().iter().all(|&(x, y)| host.has_edge(img[x], img[y])))
}

/// Maximum matching of a bipartite graph with parts `0..left` and
/// `0..right`; `adj[a]` lists the right-side neighbours of `a`. Returns
/// `mate[a]` for every left vertex.
pub fn maximum_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut mate_l: Vec<Option<usize>> = vec![None; left];
    let mut mate_r: Vec<Option<usize>> = vec![None; right];
    for a in 0..left {
        let mut visited = vec![false; right];
        augment(a, adj, &mut mate_l, &mut mate_r, &mut visited);
    }
    mate_l
}

fn augment(
    a: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [Option<usize>],
    mate_r: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &b in &adj[a] {
        if visited[b] {
            continue;
        }
        visited[b] = true;
        let free = match mate_r[b] {
            None => true,
            Some(a2) => augment(a2, adj, mate_l, mate_r, visited),
        };
        if free {
            mate_l[a] = Some(b);
            mate_r[b] = Some(a);
            return true;
        }
    }
    false
}

/// A perfect matching of the balanced bipartite graph, if one exists.
pub fn perfect_matching_oracle(r: usize, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = maximum_matching(r, r, adj);
    m.into_iter().collect()
}

pub const HAMILTON_VERTEX_CAP: usize = 12;

/// For each start vertex, the set of end vertices reachable by a Hamilton
/// path, as bitmasks. `None` above `cap` vertices.
pub fn hamilton_endpoints(g: &Graph, cap: usize) -> Option<Vec<u32>> {
    let n = g.vertex_count();
    if n > cap || n > 20 {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let nb: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect();
    let full = (1u32 << n) - 1;
    let mut result = vec![0u32; n];
    let mut dp = vec![0u32; 1 << n];
    for s in 0..n {
        dp.iter_mut().for_each(|x| *x = 0);
        dp[1 << s] = 1 << s;
        for mask in 0..=full {
            let ends = dp[mask as usize];
            if ends == 0 {
                continue;
            }
            let mut e = ends;
            while e != 0 {
                let v = e.trailing_zeros() as usize;
                e &= e - 1;
                let mut ext = nb[v] & !mask;
                while ext != 0 {
                    let w = ext.trailing_zeros();
                    ext &= ext - 1;
                    dp[(mask | (1 << w)) as usize] |= 1 << w;
                }
            }
        }
        result[s] = dp[full as usize];
    }
    Some(result)
}

/// True iff every pair of distinct vertices is joined by a Hamilton path;
/// `None` (inconclusive) above the vertex cap.
pub fn hamilton_connected_oracle(g: &Graph, cap: usize) -> Option<bool> {
    let n = g.vertex_count();
    let ends = hamilton_endpoints(g, cap)?;
    Some((0..n).all(|s| (0..n).all(|t| t == s || ends[s] & (1 << t) != 0)))
}

/// A Hamilton path of `g` from `a` to `b` (small graphs only).
pub fn hamilton_path_between(g: &Graph, a: usize, b: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n > 20 {
        return None;
    }
    if n == 1 {
        return (a == b).then(|| vec![a]);
    }
    let full = (1u32 << n) - 1;
    // dp[mask] = end vertices of paths from a covering mask
    let mut dp = vec![0u32; 1 << n];
    dp[1 << a] = 1 << a;
    for mask in 0..=full {
        let mut e = dp[mask as usize];
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            for &w in g.neighbors(v) {
                if mask & (1 << w) == 0 {
                    dp[(mask | (1 << w)) as usize] |= 1 << w;
                }
            }
        }
    }
    if dp[full as usize] & (1 << b) == 0 {
        return None;
    }
    let mut path = vec![b];
    let mut mask = full;
    let mut cur = b;
    while mask != (1 << a) {
        let prev_mask = mask & !(1 << cur);
        let prev = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&u| prev_mask & (1 << u) != 0 && dp[prev_mask as usize] & (1 << u) != 0)?;
        path.push(prev);
        mask = prev_mask;
        cur = prev;
    }
    path.reverse();
    Some(path)
}

/// Whether `path` is a Hamilton path of `g` from `a` to `b`.
pub fn is_hamilton_path(g: &Graph, path: &[usize], a: usize, b: usize) -> bool {
    let n = g.vertex_count();
    if path.len() != n || path.first() != Some(&a) || path.last() != Some(&b) {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in path {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    path.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct HamconReport {
    pub holds: bool,
    pub expansion_holds: bool,
    pub connectivity_holds: bool,
    /// `D = ln ln k`
    pub d: f64,
    /// `k / ln k`
    pub small_bound: f64,
    pub expansion_regime: Regime,
    pub connectivity_regime: Regime,
    pub samples: usize,
    /// `D < 1`: expansion is implied by non-emptiness of neighbourhoods.
    pub degenerate: bool,
}

pub const HAMCON_EXACT_CAP: u64 = 2_000_000;

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn external_neighbourhood(nb: &[u64], set: u64) -> u32 {
    let mut acc = 0u64;
    let mut s = set;
    while s != 0 {
        let v = s.trailing_zeros() as usize;
        s &= s - 1;
        acc |= nb[v];
    }
    (acc & !set).count_ones()
}

/// Both conditions of the expansion criterion with `D = ln ln k`, evaluated
/// literally on the `k = |V(G)|` vertices of `g`. Small instances are
/// enumerated; larger ones draw `samples` random sets per condition.
pub fn hamcon_condition_check<R: Rng + ?Sized>(g: &Graph, samples: usize, rng: &mut R) -> HamconReport {
    let k = g.vertex_count();
    let lnk = (k.max(1) as f64).ln();
    let d = if k >= 2 { lnk.ln() } else { 0.0 };
    let small_bound = if k >= 2 { k as f64 / lnk } else { 0.0 };
    let max_small = small_bound.floor() as usize;
    let pair_size = small_bound.ceil().max(1.0) as usize;

    let mut report = HamconReport {
        holds: false,
        expansion_holds: true,
        connectivity_holds: true,
        d,
        small_bound,
        expansion_regime: Regime::Exact,
        connectivity_regime: Regime::Exact,
        samples: 0,
        degenerate: d < 1.0,
    };
    if k == 0 {
        report.holds = true;
        return report;
    }
    let big = k > 64;
    let nb: Vec<u64> = if big {
        Vec::new()
    } else {
        (0..k).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u))).collect()
    };

    // expansion: |N(S)| >= D|S| for all 1 <= |S| <= k/ln k
    let exp_count: f64 = (1..=max_small.min(k)).map(|s| binom(k, s)).sum();
    let expands = |set: &[usize]| -> bool {
        let size = if big {
            let mut inside = vec![false; k];
            set.iter().for_each(|&v| inside[v] = true);
            let mut outside = vec![false; k];
            for &v in set {
                for &u in g.neighbors(v) {
                    if !inside[u] {
                        outside[u] = true;
                    }
                }
            }
            outside.iter().filter(|&&x| x).count()
        } else {
            external_neighbourhood(&nb, set.iter().fold(0u64, |m, &v| m | (1 << v))) as usize
        };
        size as f64 >= d * set.len() as f64
    };
    if exp_count <= HAMCON_EXACT_CAP as f64 && !big {
        'outer: for s in 1..=max_small.min(k) {
            let mut comb: Vec<usize> = (0..s).collect();
            loop {
                if !expands(&comb) {
                    report.expansion_holds = false;
                    break 'outer;
                }
                if !next_combination(&mut comb, k) {
                    break;
                }
            }
        }
    } else {
        report.expansion_regime = Regime::Sampled;
        for _ in 0..samples {
            let s = rng.gen_range(1..=max_small.clamp(1, k));
            let set = sample(rng, k, s).into_vec();
            report.samples += 1;
            if !expands(&set) {
                report.expansion_holds = false;
                break;
            }
        }
        // single vertices are cheap and the most common failure
        if report.expansion_holds && max_small >= 1 {
            report.expansion_holds = (0..k).all(|v| expands(&[v]));
        }
    }

    // connectivity: an edge between any disjoint A, B of size >= k/ln k;
    // by monotonicity it suffices to test |A| = |B| = ceil(k/ln k).
    if 2 * pair_size <= k {
        let pair_count = binom(k, pair_size) * binom(k - pair_size, pair_size);
        let has_edge_between = |a: &[usize], b: &[usize]| a.iter().any(|&x| b.iter().any(|&y| g.has_edge(x, y)));
        if pair_count <= HAMCON_EXACT_CAP as f64 && !big {
            // the complement of A's closed neighbourhood must not hold a B
            let mut comb: Vec<usize> = (0..pair_size).collect();
            loop {
                let amask = comb.iter().fold(0u64, |m, &v| m | (1 << v));
                let reach = comb.iter().fold(amask, |m, &v| m | nb[v]);
                let avoid = (k as u32) - reach.count_ones();
                if avoid as usize >= pair_size {
                    report.connectivity_holds = false;
                    break;
                }
                if !next_combination(&mut comb, k) {
                    break;
                }
            }
        } else {
            report.connectivity_regime = Regime::Sampled;
            for _ in 0..samples {
                let both = sample(rng, k, 2 * pair_size).into_vec();
                report.samples += 1;
                if !has_edge_between(&both[..pair_size], &both[pair_size..]) {
                    report.connectivity_holds = false;
                    break;
                }
            }
        }
    }
    report.holds = report.expansion_holds && report.connectivity_holds;
    report
}

/// Advances `comb` to the next `comb.len()`-subset of `0..n` in
/// lexicographic order; false when exhausted.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True iff every triangle of `g` has a vertex of degree at least 3.
pub fn triangle_invariant_check(g: &Graph) -> bool {
    let n = g.vertex_count();
    for u in 0..n {
        for &v in g.neighbors(u) {
            if v <= u {
                continue;
            }
            for &w in g.neighbors(v) {
                if w <= v || !g.has_edge(u, w) {
                    continue;
                }
                if g.degree(u) < 3 && g.degree(v) < 3 && g.degree(w) < 3 {
                    return false;
                }
            }
        }
    }
    true
}

/// A spanning set of vertex-disjoint triangles, if `g` has one.
pub fn triangle_factor(g: &Graph) -> Option<Vec<[usize; 3]>> {
    let n = g.vertex_count();
    if n % 3 != 0 {
        return None;
    }
    fn rec(g: &Graph, used: &mut Vec<bool>, acc: &mut Vec<[usize; 3]>) -> bool {
        let Some(u) = used.iter().position(|&x| !x) else {
            return true;
        };
        used[u] = true;
        let nbrs: Vec<usize> = g.neighbors(u).iter().copied().filter(|&v| !used[v]).collect();
        for (i, &v) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if g.has_edge(v, w) {
                    used[v] = true;
                    used[w] = true;
                    acc.push([u, v, w]);
                    if rec(g, used, acc) {
                        return true;
                    }
                    acc.pop();
                    used[v] = false;
                    used[w] = false;
                }
            }
        }
        used[u] = false;
        false
    }
    let mut used = vec![false; n];
    let mut acc = Vec::new();
    rec(g, &mut used, &mut acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    #[test]
    fn tree_copy_identity_and_missing_edge() {
        let t = TreeSpec::path(4).unwrap();
        let host = Graph::from_edges(4, t.edges());
        let f: Vec<Option<usize>> = (0..4).map(Some).collect();
        assert!(verify_tree_copy(&t, &host, &f).unwrap());
        let short = Graph::from_edges(4, &[(0, 1), (1, 2)]);
        assert!(!verify_tree_copy(&t, &short, &f).unwrap());
        assert!(verify_tree_copy(&t, &host, &[Some(0), None, Some(2), Some(3)]).is_err());
        let dup = vec![Some(0), Some(1), Some(0), Some(3)];
        assert!(!verify_tree_copy(&t, &Graph::complete(4), &dup).unwrap());
    }

    #[test]
    fn matching_examples() {
        let k22 = vec![vec![0, 1], vec![0, 1]];
        assert_eq!(perfect_matching_oracle(2, &k22).map(|m| m.len()), Some(2));
        let star = vec![vec![0, 1, 2], vec![], vec![]];
        assert!(perfect_matching_oracle(3, &star).is_none());
    }

    #[test]
    fn hamilton_connectivity_small_cases() {
        assert_eq!(hamilton_connected_oracle(&Graph::complete(4), 12), Some(true));
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(hamilton_connected_oracle(&path, 12), Some(false));
        // in C_5 a Hamilton path between u and w exists iff they are adjacent
        let c5 = cycle(5);
        let ends = hamilton_endpoints(&c5, 12).unwrap();
        assert_eq!(ends[0], 0b10010);
        assert_eq!(hamilton_connected_oracle(&c5, 12), Some(false));
        assert_eq!(hamilton_connected_oracle(&Graph::complete(13), 12), None);
    }

    #[test]
    fn hamilton_path_reconstruction() {
        let g = Graph::complete(6);
        let p = hamilton_path_between(&g, 2, 5).unwrap();
        assert!(is_hamilton_path(&g, &p, 2, 5));
        assert!(hamilton_path_between(&cycle(5), 0, 2).is_none());
    }

    #[test]
    fn hamcon_condition_examples() {
        let mut rng = stream_rng(1, 7);
        assert!(hamcon_condition_check(&Graph::complete(10), 100, &mut rng).holds);
        let mut g = Graph::complete(10);
        let mut iso = Graph::new(10);
        for (u, v) in g.edges() {
            if u != 9 && v != 9 {
                iso.add_edge(u, v);
            }
        }
        assert!(!hamcon_condition_check(&iso, 100, &mut rng).holds);
        // K_k minus a perfect matching
        g = Graph::new(10);
        for u in 0..10 {
            for v in u + 1..10 {
                if !(u % 2 == 0 && v == u + 1) {
                    g.add_edge(u, v);
                }
            }
        }
        let r = hamcon_condition_check(&g, 100, &mut rng);
        assert!(r.holds);
        assert_eq!(r.expansion_regime, Regime::Exact);
    }

    #[test]
    fn triangle_checks() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(!triangle_invariant_check(&tri));
        let pendant = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert!(triangle_invariant_check(&pendant));
        assert_eq!(triangle_factor(&tri).unwrap().len(), 1);
        assert!(triangle_factor(&cycle(6)).is_none());
    }
}
