//! Random partition of the free vertices into path interiors, resampled
//! until every part sees few host edges.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionConfig {
    pub coeff: f64,
    pub exponent: f64,
    pub retries: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { coeff: 10.0, exponent: -0.05, retries: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionGuards {
    /// Every `k_i >= k^0.2`.
    pub sizes: bool,
    /// Host maximum degree `<= k^0.95`.
    pub host_degree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
    pub attempts: usize,
    /// Per part: max degree of the host restricted to the part plus its endpoints.
    pub max_degrees: Vec<usize>,
    pub bounds: Vec<f64>,
    pub guards: PartitionGuards,
}

/// `10 k_i k^-0.05` with the configured constants.
pub fn part_degree_bound(cfg: &PartitionConfig, k_i: usize, k: usize) -> f64 {
    cfg.coeff * k_i as f64 * (k as f64).powf(cfg.exponent)
}

fn induced_max_degree(host: &Graph, part: &[usize], ends: (usize, usize)) -> usize {
    let mut verts: Vec<usize> = part.to_vec();
    verts.push(ends.0);
    verts.push(ends.1);
    verts.sort_unstable();
    verts.dedup();
    let mut inside = vec![false; host.vertex_count()];
    for &v in &verts {
        inside[v] = true;
    }
    verts.iter().map(|&v| host.neighbors(v).iter().filter(|&&w| inside[w]).count()).max().unwrap_or(0)
}

/// Splits `available` into parts of the given `sizes` (shuffle and cut).
/// Part `i` together with `endpoints[i]` must induce a subgraph of `host`
/// of maximum degree at most `10 k_i k^-0.05`, where `k = |available|`.
pub fn random_partition<R: Rng + ?Sized>(
    available: &[usize],
    endpoints: &[(usize, usize)],
    sizes: &[usize],
    host: &Graph,
    cfg: &PartitionConfig,
    rng: &mut R,
) -> Result<Partition> {
    let k = available.len();
    if sizes.len() != endpoints.len() || sizes.iter().sum::<usize>() != k {
        return Err(Error::Precondition(format!("part sizes sum to {}, expected {k}", sizes.iter().sum::<usize>())));
    }
    let kf = k as f64;
    let guards = PartitionGuards {
        sizes: sizes.iter().all(|&s| s as f64 >= kf.powf(0.2)),
        host_degree: host.max_degree() as f64 <= kf.powf(0.95),
    };
    let bounds: Vec<f64> = sizes.iter().map(|&s| part_degree_bound(cfg, s, k)).collect();
    let mut pool = available.to_vec();
    pool.sort_unstable();
    let tries = if sizes.len() <= 1 { 1 } else { cfg.retries.max(1) };
    for attempt in 1..=tries {
        if sizes.len() > 1 {
            pool.shuffle(rng);
        }
        let mut parts = Vec::with_capacity(sizes.len());
        let mut at = 0;
        for &s in sizes {
            let mut p = pool[at..at + s].to_vec();
            p.sort_unstable();
            parts.push(p);
            at += s;
        }
        let max_degrees: Vec<usize> =
            parts.iter().zip(endpoints).map(|(p, &ends)| induced_max_degree(host, p, ends)).collect();
        if max_degrees.iter().zip(&bounds).all(|(&d, &b)| d as f64 <= b) {
            return Ok(Partition { parts, attempts: attempt, max_degrees, bounds, guards });
        }
    }
    Err(Error::PartitionFailed(tries))
}
