//! Deterministic generators for k-connected test graphs.
//!
//! `random_k_connected` draws from a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed + attempt)`. Pairs `(u, v)` with `u < v` are
//! visited in lexicographic order and each becomes an edge iff the next
//! `f64` sample is below `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connectivity::vertex_connectivity_at_least;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Rejections before `random_k_connected` gives up.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    Complete { n: usize },
    Cycle { n: usize },
    Circulant { n: usize, offsets: Vec<usize> },
    Hypercube { d: usize },
    Random { n: usize, p: f64, k: usize, seed: u64 },
}

impl GenSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GenSpec::Complete { n } => complete(*n),
            GenSpec::Cycle { n } => cycle(*n),
            GenSpec::Circulant { n, offsets } => circulant(*n, offsets),
            GenSpec::Hypercube { d } => hypercube(*d),
            GenSpec::Random { n, p, k, seed } => random_k_connected(*n, *p, *k, *seed).map(|r| r.graph),
        }
    }
}

pub fn complete(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))))
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return invalid(format!("a cycle needs at least 3 vertices, got {n}"));
    }
    Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n)))
}

/// Vertex `u` is joined to `u ± o (mod n)` for every offset `o`.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph> {
    if offsets.is_empty() {
        return invalid("circulant graph needs at least one offset");
    }
    let mut sorted = offsets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != offsets.len() {
        return invalid("circulant offsets must be distinct");
    }
    if let Some(&o) = sorted.iter().find(|&&o| o == 0 || 2 * o > n) {
        return invalid(format!("circulant offset {o} is outside 1..={}", n / 2));
    }
    let mut edges = std::collections::BTreeSet::new();
    for u in 0..n {
        for &o in &sorted {
            let v = (u + o) % n;
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, edges)
}

/// Vertices are bit patterns of length `d`; edges join patterns at Hamming
/// distance one.
pub fn hypercube(d: usize) -> Result<Graph> {
    if d == 0 || d > 20 {
        return invalid(format!("hypercube dimension must be in 1..=20, got {d}"));
    }
    let n = 1usize << d;
    Graph::from_edges(
        n,
        (0..n).flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v)),
    )
}

#[derive(Clone, Debug)]
pub struct RandomGraph {
    pub graph: Graph,
    /// 1-based attempt that succeeded.
    pub attempts: usize,
}

/// Rejection-samples `G(n, p)` until the draw is k-connected.
pub fn random_k_connected(n: usize, p: f64, k: usize, seed: u64) -> Result<RandomGraph> {
    if !(p > 0.0 && p <= 1.0) {
        return invalid(format!("edge probability must be in (0, 1], got {p}"));
    }
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if n < k + 1 {
        return invalid(format!("a {k}-connected graph needs at least {} vertices, got {n}", k + 1));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::from_edges(n, edges)?;
        if vertex_connectivity_at_least(&graph, k).holds() {
            return Ok(RandomGraph { graph, attempts: attempt + 1 });
        }
    }
    Err(Error::Generation(format!(
        "no {k}-connected graph on {n} vertices after {MAX_ATTEMPTS} draws at p = {p}; try a larger p"
    )))
}
