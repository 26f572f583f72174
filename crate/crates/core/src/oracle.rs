//! Independent ground truth: a partition verifier, an exhaustive
//! partitioner, and exact vertex connectivity by subset enumeration.
//!
//! Nothing here touches the engine. The searches work on bitmasks over the
//! raw adjacency of [`Graph`], so they share no code path with the solver
//! beyond the graph type.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::config::Problem;
use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::solver::Partition;

/// Largest graph [`brute_force_partition`] accepts.
pub const PARTITION_GUARD: usize = 14;
/// Largest graph [`brute_force_connectivity`] accepts.
pub const CONNECTIVITY_GUARD: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ViolationCode {
    Disjoint,
    Cover,
    Size,
    Connected,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyViolation {
    pub code: ViolationCode,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<VerifyViolation>,
}

impl VerifyReport {
    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

/// Checks a claimed partition without trusting anything about it.
pub fn verify_partition(problem: &Problem, partition: &Partition) -> VerifyReport {
    verify_targets(problem.graph(), problem.terminals(), problem.sizes(), partition)
}

/// [`verify_partition`] on raw targets; also accepts a single terminal.
pub fn verify_targets(g: &Graph, terminals: &[Vertex], sizes: &[usize], partition: &Partition) -> VerifyReport {
    let k = terminals.len();
    let mut violations = Vec::new();
    let mut push = |code, detail: String| violations.push(VerifyViolation { code, detail });

    if partition.parts.len() != k {
        push(
            ViolationCode::Size,
            format!("{} parts given, {} expected", partition.parts.len(), k),
        );
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for (i, part) in partition.parts.iter().enumerate() {
        for v in part.iter() {
            if v >= g.n() {
                push(ViolationCode::Cover, format!("part {i} holds {v}, outside 0..{}", g.n()));
                continue;
            }
            match owner[v] {
                Some(j) => push(ViolationCode::Disjoint, format!("vertex {v} is in parts {j} and {i}")),
                None => owner[v] = Some(i),
            }
        }
    }
    for (i, part) in partition.parts.iter().enumerate().take(k) {
        if part.len() != sizes[i] {
            push(
                ViolationCode::Size,
                format!("part {i} has {} vertices, expected {}", part.len(), sizes[i]),
            );
        }
        let t = terminals[i];
        if !part.contains(t) {
            push(ViolationCode::Terminal, format!("part {i} misses terminal {t}"));
        }
        if !part_connected(g, part) {
            push(ViolationCode::Connected, format!("part {i} is not connected"));
        }
    }
    if sizes.iter().sum::<usize>() == g.n() {
        if let Some(v) = (0..g.n()).find(|&v| owner[v].is_none()) {
            push(ViolationCode::Cover, format!("vertex {v} is in no part"));
        }
    }
    VerifyReport { ok: violations.is_empty(), violations }
}

fn bit(v: usize) -> u128 {
    1u128 << v
}

fn neighbor_mask(g: &Graph, v: usize) -> u128 {
    g.adj(v).iter().fold(0, |m, &w| m | bit(w))
}

/// Flood fill inside `mask`. The empty set is not connected.
fn mask_connected(g: &Graph, mask: u128) -> bool {
    if mask == 0 {
        return false;
    }
    let start = mask.trailing_zeros() as usize;
    let mut reached = bit(start);
    let mut frontier = reached;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = neighbor_mask(g, v) & mask & !reached;
        reached |= fresh;
        frontier |= fresh;
    }
    reached == mask
}

fn part_connected(g: &Graph, part: &VertexSet) -> bool {
    let Some(start) = part.first() else { return false };
    let mut reached = VertexSet::singleton(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in g.adj(v) {
            if part.contains(w) && reached.insert(w) {
                stack.push(w);
            }
        }
    }
    reached.len() == part.len()
}

/// Exhaustive search for a partition meeting the problem's contract.
///
/// Parts are built in index order. For each part every connected vertex set
/// of the target size that contains its terminal and avoids all other
/// terminals and earlier parts is tried in turn.
pub fn brute_force_partition(problem: &Problem) -> Result<Option<Partition>> {
    let g = problem.graph();
    if g.n() > PARTITION_GUARD {
        return invalid(format!(
            "exhaustive partition is limited to {PARTITION_GUARD} vertices, got {}",
            g.n()
        ));
    }
    let terminals: u128 = problem.terminals().iter().fold(0, |m, &t| m | bit(t));
    let mut chosen = Vec::new();
    let found = assign(problem, 0, 0, terminals, &mut chosen);
    Ok(found.then(|| Partition {
        parts: chosen
            .iter()
            .map(|&m: &u128| (0..g.n()).filter(|&v| m & bit(v) != 0).collect())
            .collect(),
    }))
}

fn assign(problem: &Problem, i: usize, used: u128, terminals: u128, chosen: &mut Vec<u128>) -> bool {
    if i == problem.k() {
        return true;
    }
    let g = problem.graph();
    let t = problem.terminals()[i];
    let forbidden = used | (terminals & !bit(t));
    for set in connected_sets(g, t, problem.sizes()[i], forbidden) {
        chosen.push(set);
        if assign(problem, i + 1, used | set, terminals, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// All connected vertex sets of exactly `size` vertices containing `root`
/// and avoiding `forbidden`, grown one frontier vertex at a time.
fn connected_sets(g: &Graph, root: usize, size: usize, forbidden: u128) -> Vec<u128> {
    let mut layer: HashSet<u128> = HashSet::from([bit(root)]);
    for _ in 1..size {
        let mut next = HashSet::new();
        for &set in &layer {
            let mut frontier = 0u128;
            let mut rest = set;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                frontier |= neighbor_mask(g, v);
            }
            frontier &= !set & !forbidden;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                next.insert(set | bit(v));
            }
        }
        layer = next;
    }
    let mut out: Vec<u128> = layer.into_iter().collect();
    out.sort_unstable();
    out
}

/// Exact vertex connectivity: the fewest vertices whose removal leaves a
/// disconnected graph, or `n − 1` when no such set exists.
pub fn brute_force_connectivity(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > CONNECTIVITY_GUARD {
        return invalid(format!(
            "exhaustive connectivity is limited to {CONNECTIVITY_GUARD} vertices, got {n}"
        ));
    }
    if n <= 1 {
        return Ok(0);
    }
    let all: u128 = (1u128 << n) - 1;
    for size in 0..n.saturating_sub(1) {
        for removed in subsets_of_size(n, size) {
            if !mask_connected(g, all & !removed) {
                return Ok(size);
            }
        }
    }
    Ok(n - 1)
}

fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u128> {
    (0u128..(1u128 << n)).filter(move |m| m.count_ones() as usize == size)
}
