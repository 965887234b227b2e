//! Degree census and the Case I / Case II split.

use serde::Serialize;

use crate::error::{Error, Result};

use super::TreeSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCensus {
    pub n: usize,
    /// Leaves; also the leaf set `L`.
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    pub d_gt2: Vec<usize>,
    /// Vertices adjacent to some leaf, ascending.
    pub leaf_neighbors: Vec<usize>,
}

impl DegreeCensus {
    pub fn leaves(&self) -> &[usize] {
        &self.d1
    }

    /// `|D_>2| <= |D_1| - 2`.
    pub fn lemma_holds(&self) -> bool {
        self.d_gt2.len() + 2 <= self.d1.len()
    }
}

/// Splits the vertices by degree. Fails on a single vertex, where the
/// leaf inequality is meaningless.
pub fn degree_census(t: &TreeSpec) -> Result<DegreeCensus> {
    let n = t.n();
    if n < 2 {
        return Err(Error::InvalidTree("census needs at least two vertices".into()));
    }
    let (mut d1, mut d2, mut d_gt2) = (Vec::new(), Vec::new(), Vec::new());
    let mut is_support = vec![false; n];
    for v in 0..n {
        match t.degree(v) {
            1 => {
                d1.push(v);
                is_support[t.neighbors(v)[0]] = true;
            }
            2 => d2.push(v),
            _ => d_gt2.push(v),
        }
    }
    let census = DegreeCensus {
        n,
        d1,
        d2,
        d_gt2,
        leaf_neighbors: (0..n).filter(|&v| is_support[v]).collect(),
    };
    assert!(census.lemma_holds(), "leaf inequality fails on a validated tree");
    Ok(census)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeCase {
    CaseI,
    CaseII,
}

/// `n^(2/3)`, computed through the cube root so perfect cubes are exact.
pub fn leaf_split(n: usize) -> f64 {
    let c = (n as f64).cbrt();
    c * c
}

pub fn classify(census: &DegreeCensus) -> TreeCase {
    if census.leaf_neighbors.len() as f64 >= leaf_split(census.n) {
        TreeCase::CaseI
    } else {
        TreeCase::CaseII
    }
}

pub fn classify_case(t: &TreeSpec) -> Result<TreeCase> {
    Ok(classify(&degree_census(t)?))
}

/// `⌈n^(2/3)⌉` leaves with pairwise distinct neighbours: the lowest leaf of
/// each support vertex, supports taken in increasing id order.
pub fn select_independent_leaves(t: &TreeSpec, census: &DegreeCensus) -> Result<Vec<usize>> {
    if classify(census) != TreeCase::CaseI {
        return Err(Error::Precondition(format!(
            "{} leaf neighbours is below n^(2/3) = {:.2}",
            census.leaf_neighbors.len(),
            leaf_split(census.n)
        )));
    }
    let want = leaf_split(census.n).ceil() as usize;
    let mut lowest = vec![usize::MAX; t.n()];
    for &l in &census.d1 {
        let s = t.neighbors(l)[0];
        lowest[s] = lowest[s].min(l);
    }
    Ok(census.leaf_neighbors.iter().take(want).map(|&s| lowest[s]).collect())
}
