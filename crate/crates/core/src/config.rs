//! Configurations: disjoint connected parts, the free set, and one cascade per
//! non-growing part, together with the derived reservoirs, ranks, potential
//! vector and bridges.
//!
//! Part indices are 0-based. The part currently being grown (`grow`) plays
//! the distinguished role; every other part carries a cascade. A vertex's
//! rank is a positive integer, or undefined.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{contract, invalid, Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// A graph with `k ≥ 2` distinct terminals and positive target sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    graph: Graph,
    terminals: Vec<Vertex>,
    sizes: Vec<usize>,
}

impl Problem {
    pub fn new(graph: Graph, terminals: Vec<Vertex>, sizes: Vec<usize>) -> Result<Self> {
        if terminals.len() < 2 {
            return invalid(format!("need at least 2 terminals, got {}", terminals.len()));
        }
        check_targets(&graph, &terminals, &sizes)?;
        Ok(Problem { graph, terminals, sizes })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn terminals(&self) -> &[Vertex] {
        &self.terminals
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Terminal/size checks shared with the single-part path of the CLI.
pub fn check_targets(graph: &Graph, terminals: &[Vertex], sizes: &[usize]) -> Result<()> {
    if terminals.len() != sizes.len() {
        return invalid(format!(
            "{} terminals but {} sizes",
            terminals.len(),
            sizes.len()
        ));
    }
    if terminals.is_empty() {
        return invalid("no terminals given");
    }
    for &t in terminals {
        graph.check_vertex(t)?;
    }
    let distinct: VertexSet = terminals.iter().copied().collect();
    if distinct.len() != terminals.len() {
        return invalid("terminals are not distinct");
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return invalid(format!("size of part {i} is zero"));
    }
    let total: usize = sizes.iter().sum();
    if total > graph.n() {
        return invalid(format!("sizes sum to {total} but the graph has {} vertices", graph.n()));
    }
    Ok(())
}

/// Rank of a cascade vertex.
pub type Rank = u32;

/// Ranks of the cascade vertices, plus the reservoir of each cascade vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankTable {
    ranks: BTreeMap<Vertex, Option<Rank>>,
    reservoirs: BTreeMap<Vertex, VertexSet>,
}

impl RankTable {
    /// `None` both for undefined ranks and for non-cascade vertices.
    pub fn rank(&self, v: Vertex) -> Option<Rank> {
        self.ranks.get(&v).copied().flatten()
    }

    pub fn is_cascade_vertex(&self, v: Vertex) -> bool {
        self.ranks.contains_key(&v)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vertex, Option<Rank>)> + '_ {
        self.ranks.iter().map(|(&v, &r)| (v, r))
    }

    /// Defined ranks only.
    pub fn defined(&self) -> BTreeMap<Vertex, Rank> {
        self.ranks.iter().filter_map(|(&v, &r)| r.map(|r| (v, r))).collect()
    }

    pub fn reservoir(&self, w: Vertex) -> Option<&VertexSet> {
        self.reservoirs.get(&w)
    }

    pub fn max_rank(&self) -> Rank {
        self.ranks.values().flatten().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// `(ρ₁, ρ₂, …)`, compared lexicographically with implicit trailing zeros.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PotentialVector(pub Vec<usize>);

impl PotentialVector {
    /// `ρ_r` for 1-based `r`; zero past the end.
    pub fn rho(&self, r: Rank) -> usize {
        r.checked_sub(1)
            .and_then(|i| self.0.get(i as usize))
            .copied()
            .unwrap_or(0)
    }

    /// Whether `ρ₁..ρ_len` agree (zero padded).
    pub fn prefix_eq(&self, other: &PotentialVector, len: Rank) -> bool {
        (1..=len).all(|r| self.rho(r) == other.rho(r))
    }
}

pub fn compare_potential(p: &PotentialVector, q: &PotentialVector) -> Ordering {
    let len = p.0.len().max(q.0.len());
    (0..len)
        .map(|i| {
            let a = p.0.get(i).copied().unwrap_or(0);
            let b = q.0.get(i).copied().unwrap_or(0);
            a.cmp(&b)
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl PartialEq for PotentialVector {
    fn eq(&self, other: &Self) -> bool {
        compare_potential(self, other).is_eq()
    }
}

impl Eq for PotentialVector {}

impl PartialOrd for PotentialVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PotentialVector {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_potential(self, other)
    }
}

/// An edge from the free set into at least one reservoir.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bridge {
    /// Endpoint in the free set.
    pub a: Vertex,
    /// Endpoint inside a reservoir.
    pub b: Vertex,
    /// Cascade vertices whose reservoir contains `b`, ascending.
    pub owners: Vec<Vertex>,
    pub rank: Rank,
}

/// An edge that lets `b` join part `part`'s cascade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CascadeEdge {
    pub a: Vertex,
    pub b: Vertex,
    pub part: usize,
}

/// Why a configuration is not valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UndefinedRank { part: usize, vertex: Vertex },
    NotIncreasing { part: usize, position: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Configuration<'g> {
    graph: &'g Graph,
    terminals: Vec<Vertex>,
    parts: Vec<VertexSet>,
    cascades: Vec<Vec<Vertex>>,
    grow: usize,
    owner: Vec<Option<usize>>,
}

impl<'g> Configuration<'g> {
    /// Configuration with all cascades null.
    pub fn new(
        graph: &'g Graph,
        terminals: Vec<Vertex>,
        parts: Vec<VertexSet>,
        grow: usize,
    ) -> Result<Self> {
        let k = terminals.len();
        if parts.len() != k {
            return invalid(format!("{} parts for {} terminals", parts.len(), k));
        }
        if k < 2 {
            return invalid("a configuration needs at least 2 parts");
        }
        if grow >= k {
            return invalid(format!("part index {grow} out of range 0..{k}"));
        }
        let mut owner = vec![None; graph.n()];
        for (i, part) in parts.iter().enumerate() {
            graph.check_set(part)?;
            graph.check_vertex(terminals[i])?;
            if !part.contains(terminals[i]) {
                return invalid(format!("part {i} does not contain its terminal {}", terminals[i]));
            }
            if !graph.is_connected_unchecked(part) {
                return invalid(format!("part {i} is not connected"));
            }
            for v in part.iter() {
                if let Some(j) = owner[v] {
                    return invalid(format!("vertex {v} lies in parts {j} and {i}"));
                }
                owner[v] = Some(i);
            }
        }
        Ok(Configuration {
            graph,
            terminals,
            parts,
            cascades: vec![Vec::new(); k],
            grow,
            owner,
        })
    }

    /// Replaces the cascade of part `i`, checking that it is a cascade.
    pub fn with_cascade(mut self, i: usize, cascade: Vec<Vertex>) -> Result<Self> {
        self.set_cascade(i, cascade)?;
        Ok(self)
    }

    pub fn set_cascade(&mut self, i: usize, cascade: Vec<Vertex>) -> Result<()> {
        if i >= self.k() || i == self.grow {
            return invalid(format!("part {i} cannot carry a cascade"));
        }
        let distinct: VertexSet = cascade.iter().copied().collect();
        if distinct.len() != cascade.len() {
            return invalid(format!("cascade of part {i} repeats a vertex"));
        }
        for &w in &cascade {
            if !self.parts[i].contains(w) {
                return invalid(format!("cascade vertex {w} is not in part {i}"));
            }
            if w == self.terminals[i] {
                return invalid(format!("cascade of part {i} contains its terminal {w}"));
            }
        }
        for pair in cascade.windows(2) {
            if self.reservoir_unchecked(i, pair[0]).contains(pair[1]) {
                return invalid(format!(
                    "cascade of part {i}: {} lies in the reservoir of {}",
                    pair[1], pair[0]
                ));
            }
        }
        self.cascades[i] = cascade;
        Ok(())
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn grow(&self) -> usize {
        self.grow
    }

    pub fn terminals(&self) -> &[Vertex] {
        &self.terminals
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &VertexSet {
        &self.parts[i]
    }

    pub fn cascade(&self, i: usize) -> &[Vertex] {
        &self.cascades[i]
    }

    pub fn cascades(&self) -> &[Vec<Vertex>] {
        &self.cascades
    }

    pub fn into_parts(self) -> Vec<VertexSet> {
        self.parts
    }

    /// Index of the part containing `v`.
    pub fn part_of(&self, v: Vertex) -> Option<usize> {
        self.owner.get(v).copied().flatten()
    }

    /// The free set `S`.
    pub fn free(&self) -> VertexSet {
        (0..self.graph.n()).filter(|&v| self.owner[v].is_none()).collect()
    }

    pub fn is_free(&self, v: Vertex) -> bool {
        self.owner[v].is_none()
    }

    pub fn cascade_vertices(&self) -> impl Iterator<Item = (usize, Vertex)> + '_ {
        self.cascades
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |&w| (i, w)))
    }

    /// Vertices of part `i` other than `v` still joined to the terminal of
    /// part `i` once `v` is deleted.
    pub fn reservoir(&self, i: usize, v: Vertex) -> Result<VertexSet> {
        if i >= self.k() {
            return invalid(format!("part index {i} out of range 0..{}", self.k()));
        }
        if !self.parts[i].contains(v) {
            return invalid(format!("vertex {v} is not in part {i}"));
        }
        Ok(self.reservoir_unchecked(i, v))
    }

    pub(crate) fn reservoir_unchecked(&self, i: usize, v: Vertex) -> VertexSet {
        let t = self.terminals[i];
        if v == t {
            return VertexSet::new();
        }
        let mut inside = self.parts[i].mask(self.graph.n());
        inside[v] = false;
        let mut seen = vec![false; self.graph.n()];
        self.graph.reach(t, &inside, &mut seen)
    }

    /// Least-fixpoint ranks. Rank 1: a neighbour in the grown part. Rank
    /// `r ≥ 2`: a neighbour in the reservoir of a rank `r − 1` cascade vertex
    /// of a different part.
    pub fn compute_ranks(&self) -> RankTable {
        let mut table = RankTable::default();
        for (i, w) in self.cascade_vertices() {
            table.ranks.insert(w, None);
            table.reservoirs.insert(w, self.reservoir_unchecked(i, w));
        }
        let grow = self.grow;
        let mut frontier: Vec<(usize, Vertex)> = Vec::new();
        for (i, w) in self.cascade_vertices() {
            if self.graph.adj(w).iter().any(|&x| self.owner[x] == Some(grow)) {
                table.ranks.insert(w, Some(1));
                frontier.push((i, w));
            }
        }
        let mut r: Rank = 1;
        while !frontier.is_empty() {
            r += 1;
            let mut next = Vec::new();
            for (i, w) in self.cascade_vertices() {
                if table.ranks[&w].is_some() {
                    continue;
                }
                let hit = frontier.iter().any(|&(j, prev)| {
                    j != i && {
                        let res = &table.reservoirs[&prev];
                        self.graph.adj(w).iter().any(|&x| res.contains(x))
                    }
                });
                if hit {
                    next.push((i, w));
                }
            }
            for &(_, w) in &next {
                table.ranks.insert(w, Some(r));
            }
            frontier = next;
        }
        table
    }

    /// All ranks defined and strictly increasing along every cascade.
    pub fn validity(&self, ranks: &RankTable) -> ValidityReport {
        let mut violations = Vec::new();
        for (i, cascade) in self.cascades.iter().enumerate() {
            let mut prev: Option<Rank> = None;
            for (pos, &w) in cascade.iter().enumerate() {
                match ranks.rank(w) {
                    None => violations.push(Violation::UndefinedRank { part: i, vertex: w }),
                    Some(r) => {
                        if prev.is_some_and(|p| r <= p) {
                            violations.push(Violation::NotIncreasing { part: i, position: pos });
                        }
                        prev = Some(r);
                    }
                }
            }
        }
        ValidityReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validity(&self.compute_ranks()).is_valid()
    }

    /// `ρ_r` is the size of the union of the reservoirs of rank-`r` cascade
    /// vertices.
    pub fn potential(&self, ranks: &RankTable) -> Result<PotentialVector> {
        let report = self.validity(ranks);
        if !report.is_valid() {
            return contract(format!(
                "potential of an invalid configuration: {:?}",
                report.violations
            ));
        }
        Ok(self.potential_unchecked(ranks))
    }

    pub(crate) fn potential_unchecked(&self, ranks: &RankTable) -> PotentialVector {
        let top = ranks.max_rank() as usize;
        let mut covered = vec![VertexSet::new(); top];
        for (w, r) in ranks.entries() {
            if let Some(r) = r {
                covered[r as usize - 1].extend(&ranks.reservoirs[&w]);
            }
        }
        PotentialVector(covered.iter().map(VertexSet::len).collect())
    }

    /// Bridges sorted by `(rank, a, b)`.
    pub fn find_bridges(&self, ranks: &RankTable) -> Vec<Bridge> {
        let mut out = Vec::new();
        for a in self.free().iter() {
            for &b in self.graph.adj(a) {
                let Some(i) = self.owner[b] else { continue };
                let mut owners = Vec::new();
                let mut rank: Option<Rank> = None;
                for &w in &self.cascades[i] {
                    if ranks.reservoirs.get(&w).is_some_and(|res| res.contains(b)) {
                        owners.push(w);
                        if let Some(r) = ranks.rank(w) {
                            rank = Some(rank.map_or(r, |m| m.min(r)));
                        }
                    }
                }
                if let (false, Some(rank)) = (owners.is_empty(), rank) {
                    owners.sort_unstable();
                    out.push(Bridge { a, b, owners, rank });
                }
            }
        }
        out.sort_by_key(|br| (br.rank, br.a, br.b));
        out
    }

    /// Whether `v` lies in the reservoir of some cascade vertex.
    pub(crate) fn in_reservoir(&self, ranks: &RankTable, v: Vertex) -> bool {
        self.owner[v].is_some_and(|i| {
            self.cascades[i]
                .iter()
                .any(|w| ranks.reservoirs.get(w).is_some_and(|res| res.contains(v)))
        })
    }

    /// Smallest `(part, b, a)` such that `a` is in the grown part or in a
    /// reservoir of another part, and `b ≠` terminal of `part` is in no
    /// reservoir and is not the last entry of `part`'s cascade.
    pub fn find_cascade_edge(&self, ranks: &RankTable) -> Option<CascadeEdge> {
        for i in (0..self.k()).filter(|&i| i != self.grow) {
            let last = self.cascades[i].last().copied();
            for b in self.parts[i].iter() {
                if b == self.terminals[i] || Some(b) == last || self.in_reservoir(ranks, b) {
                    continue;
                }
                let qualifies = |a: Vertex| match self.owner[a] {
                    Some(j) if j == self.grow => true,
                    Some(j) if j != i => self.in_reservoir(ranks, a),
                    _ => false,
                };
                if let Some(&a) = self.graph.adj(b).iter().find(|&&a| qualifies(a)) {
                    return Some(CascadeEdge { a, b, part: i });
                }
            }
        }
        None
    }

    /// Truncates every cascade at its first entry that has undefined rank or
    /// fails to exceed its predecessor's rank, until the configuration is
    /// valid.
    pub fn prune_undefined(&self) -> Configuration<'g> {
        let mut cfg = self.clone();
        loop {
            let ranks = cfg.compute_ranks();
            let mut changed = false;
            for cascade in cfg.cascades.iter_mut() {
                let mut prev: Option<Rank> = None;
                let cut = cascade.iter().position(|&w| match ranks.rank(w) {
                    None => true,
                    Some(r) => {
                        let bad = prev.is_some_and(|p| r <= p);
                        prev = Some(r);
                        bad
                    }
                });
                if let Some(pos) = cut {
                    cascade.truncate(pos);
                    changed = true;
                }
            }
            if !changed {
                return cfg;
            }
        }
    }

    /// Moves `v` between parts or to/from the free set. `None` means free.
    pub(crate) fn relocate(&mut self, v: Vertex, to: Option<usize>) {
        if let Some(from) = self.owner[v] {
            self.parts[from].remove(v);
        }
        if let Some(to) = to {
            self.parts[to].insert(v);
        }
        self.owner[v] = to;
    }

    pub(crate) fn cascade_mut(&mut self, i: usize) -> &mut Vec<Vertex> {
        &mut self.cascades[i]
    }

    pub(crate) fn clear_cascades(&mut self) {
        for c in &mut self.cascades {
            c.clear();
        }
    }

    /// Checks every structural invariant the engine relies on.
    pub fn check_invariants(&self, ranks: &RankTable) -> std::result::Result<(), String> {
        let n = self.graph.n();
        let mut seen = vec![None; n];
        for (i, part) in self.parts.iter().enumerate() {
            if !part.contains(self.terminals[i]) {
                return Err(format!("part {i} lost its terminal"));
            }
            if !self.graph.is_connected_unchecked(part) {
                return Err(format!("part {i} is not connected"));
            }
            for v in part.iter() {
                if seen[v].is_some() {
                    return Err(format!("vertex {v} is in two parts"));
                }
                seen[v] = Some(i);
            }
        }
        if seen != self.owner {
            return Err("owner index is out of sync with parts".into());
        }
        if self.free().is_empty() {
            return Err("free set is empty".into());
        }
        if !self.cascades[self.grow].is_empty() {
            return Err("the grown part carries a cascade".into());
        }
        for (i, cascade) in self.cascades.iter().enumerate() {
            for (j, &w) in cascade.iter().enumerate() {
                if !self.parts[i].contains(w) || w == self.terminals[i] {
                    return Err(format!("cascade entry {w} of part {i} is misplaced"));
                }
                let res = self.reservoir_unchecked(i, w);
                if !res.contains(self.terminals[i]) {
                    return Err(format!("terminal of part {i} is outside R({w})"));
                }
                if let Some(&before) = cascade[..j].iter().find(|&&x| !res.contains(x)) {
                    return Err(format!(
                        "cascade of part {i}: earlier entry {before} is outside R({w})"
                    ));
                }
            }
        }
        let report = self.validity(ranks);
        if !report.is_valid() {
            return Err(format!("configuration is not valid: {:?}", report.violations));
        }
        Ok(())
    }

    pub(crate) fn internal(&self, message: impl Into<String>) -> Error {
        Error::Internal { message: message.into(), dump: self.dump() }
    }

    /// Human-readable state dump for diagnostics.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph: {:?}", self.graph);
        let _ = writeln!(s, "grow: {}", self.grow);
        for (i, part) in self.parts.iter().enumerate() {
            let _ = writeln!(
                s,
                "part {i}: terminal {} vertices {:?} cascade {:?}",
                self.terminals[i], part, self.cascades[i]
            );
        }
        let _ = writeln!(s, "free: {:?}", self.free());
        s
    }
}

impl fmt::Debug for Configuration<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Configuration")
            .field("grow", &self.grow)
            .field("terminals", &self.terminals)
            .field("parts", &self.parts)
            .field("cascades", &self.cascades)
            .finish()
    }
}
