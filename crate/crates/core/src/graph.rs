//! Simple undirected graphs on dense vertex ids and the connectivity
//! primitives the rest of the crate is built on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Vertex identifier. Vertices are always `0..n`.
pub type Vertex = usize;

/// A set of vertices, iterated in ascending order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(v: Vertex) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        self.0.remove(&v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.first().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn extend(&mut self, other: &VertexSet) {
        self.0.extend(other.iter());
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// Membership mask of length `n`.
    pub(crate) fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter() {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(vs: [Vertex; N]) -> Self {
        vs.into_iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Simple undirected graph on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints. Edges may be given in either orientation.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge [{u},{v}] has an endpoint outside 0..{n}"));
            }
            if u == v {
                return invalid(format!("edge [{u},{v}] is a self-loop"));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return invalid(format!("edge [{},{}] is duplicated", u.min(v), u.max(v)));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &seen {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj, m: seen.len() })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// Sorted neighbour slice. Panics on an out-of-range vertex; use
    /// [`Graph::neighbors`] at trust boundaries.
    pub fn adj(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn vertices(&self) -> VertexSet {
        (0..self.n()).collect()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            invalid(format!("vertex {v} is outside 0..{}", self.n()))
        }
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<()> {
        s.iter().try_for_each(|v| self.check_vertex(v))
    }

    pub fn neighbors(&self, v: Vertex) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.adj[v].iter().copied().collect())
    }

    /// Components of the subgraph induced on `s`, ordered by their minimum
    /// vertex.
    pub fn induced_components(&self, s: &VertexSet) -> Result<Vec<VertexSet>> {
        self.check_set(s)?;
        Ok(self.components_within(&s.mask(self.n())))
    }

    pub(crate) fn components_within(&self, inside: &[bool]) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if !inside[start] || seen[start] {
                continue;
            }
            out.push(self.reach(start, inside, &mut seen));
        }
        out
    }

    /// Vertices reachable from `start` inside the mask. Marks them in `seen`.
    pub(crate) fn reach(&self, start: Vertex, inside: &[bool], seen: &mut [bool]) -> VertexSet {
        let mut comp = VertexSet::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            comp.insert(u);
            for &w in &self.adj[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp
    }

    /// `∅` is not connected; a singleton is.
    pub fn is_connected(&self, s: &VertexSet) -> Result<bool> {
        self.check_set(s)?;
        Ok(self.is_connected_unchecked(s))
    }

    pub(crate) fn is_connected_unchecked(&self, s: &VertexSet) -> bool {
        let Some(start) = s.first() else {
            return false;
        };
        let inside = s.mask(self.n());
        let mut seen = vec![false; self.n()];
        self.reach(start, &inside, &mut seen).len() == s.len()
    }

    /// Whether removing `v` disconnects the connected set `s`.
    pub fn separates(&self, s: &VertexSet, v: Vertex) -> Result<bool> {
        self.check_set(s)?;
        if !s.contains(v) {
            return invalid(format!("vertex {v} is not in the set {s:?}"));
        }
        Ok(self.separates_unchecked(s, v))
    }

    pub(crate) fn separates_unchecked(&self, s: &VertexSet, v: Vertex) -> bool {
        let mut rest = s.clone();
        rest.remove(v);
        !rest.is_empty() && !self.is_connected_unchecked(&rest)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// A vertex cut together with two sides it separates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutWitness {
    pub cut: VertexSet,
    pub side_a: VertexSet,
    pub side_b: VertexSet,
}

impl CutWitness {
    /// Checks the witness against `g` with a fresh component search.
    /// Returns a description of the first problem found.
    pub fn check(&self, g: &Graph) -> std::result::Result<(), String> {
        for s in [&self.cut, &self.side_a, &self.side_b] {
            g.check_set(s).map_err(|e| e.to_string())?;
        }
        if self.side_a.is_empty() || self.side_b.is_empty() {
            return Err("a side of the witness is empty".into());
        }
        if !self.cut.is_disjoint(&self.side_a)
            || !self.cut.is_disjoint(&self.side_b)
            || !self.side_a.is_disjoint(&self.side_b)
        {
            return Err("cut and sides are not pairwise disjoint".into());
        }
        let mut outside_cut = vec![true; g.n()];
        for c in self.cut.iter() {
            outside_cut[c] = false;
        }
        let mut seen = vec![false; g.n()];
        let reach = g.reach(self.side_a.first().unwrap(), &outside_cut, &mut seen);
        if let Some(b) = self.side_b.iter().find(|&b| reach.contains(b)) {
            return Err(format!("vertex {b} of side B is reachable from side A"));
        }
        for (u, v) in g.edges() {
            let crosses = (self.side_a.contains(u) && self.side_b.contains(v))
                || (self.side_a.contains(v) && self.side_b.contains(u));
            if crosses {
                return Err(format!("edge [{u},{v}] joins the two sides"));
            }
        }
        Ok(())
    }
}
