//! Exact k-connectivity test via Menger's theorem.
//!
//! A graph on at least `k + 1` vertices is k-connected iff its minimum degree
//! is at least `k` and every nonadjacent pair is joined by `k` internally
//! vertex-disjoint paths. Path counts come from unit vertex-capacity max flow
//! on the split graph, and a failing pair yields its minimum vertex cut.

use std::collections::VecDeque;

use crate::graph::{CutWitness, Graph, Vertex, VertexSet};

/// Outcome of [`vertex_connectivity_at_least`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connectivity {
    KConnected,
    /// `n ≤ k`: too few vertices for k-connectivity; no cut exists.
    TooFewVertices { n: usize, k: usize },
    /// A vertex cut with fewer than `k` vertices.
    Separated(CutWitness),
}

impl Connectivity {
    pub fn holds(&self) -> bool {
        matches!(self, Connectivity::KConnected)
    }
}

pub fn vertex_connectivity_at_least(g: &Graph, k: usize) -> Connectivity {
    let n = g.n();
    if n <= k {
        return Connectivity::TooFewVertices { n, k };
    }
    if k == 0 {
        return Connectivity::KConnected;
    }
    if let Some(v) = (0..n).find(|&v| g.degree(v) < k) {
        let cut: VertexSet = g.adj(v).iter().copied().collect();
        let side_a = VertexSet::singleton(v);
        let side_b = (0..n).filter(|&u| u != v && !cut.contains(u)).collect();
        return Connectivity::Separated(CutWitness { cut, side_a, side_b });
    }
    let mut net = SplitNetwork::new(g, k);
    for s in 0..n {
        for t in (s + 1)..n {
            if g.has_edge(s, t) {
                continue;
            }
            if net.max_paths(s, t) < k {
                return Connectivity::Separated(net.min_cut(g, s));
            }
        }
    }
    Connectivity::KConnected
}

#[derive(Clone, Copy)]
struct Arc {
    to: usize,
    cap: usize,
    rev: usize,
}

/// Vertex v becomes `2v` (in) and `2v + 1` (out), joined by a unit arc.
struct SplitNetwork {
    arcs: Vec<Vec<Arc>>,
    original: Vec<Vec<usize>>,
    limit: usize,
}

impl SplitNetwork {
    fn new(g: &Graph, limit: usize) -> Self {
        let mut arcs: Vec<Vec<Arc>> = vec![Vec::new(); 2 * g.n()];
        let add = |arcs: &mut Vec<Vec<Arc>>, from: usize, to: usize, cap: usize| {
            let rf = arcs[to].len();
            let rt = arcs[from].len();
            arcs[from].push(Arc { to, cap, rev: rf });
            arcs[to].push(Arc { to: from, cap: 0, rev: rt });
        };
        for v in 0..g.n() {
            add(&mut arcs, 2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            add(&mut arcs, 2 * u + 1, 2 * v, limit);
            add(&mut arcs, 2 * v + 1, 2 * u, limit);
        }
        let original = arcs.iter().map(|list| list.iter().map(|a| a.cap).collect()).collect();
        SplitNetwork { arcs, original, limit }
    }

    fn reset(&mut self) {
        for (list, caps) in self.arcs.iter_mut().zip(&self.original) {
            for (arc, &cap) in list.iter_mut().zip(caps) {
                arc.cap = cap;
            }
        }
    }

    /// Internally disjoint s–t paths, counted up to the limit.
    fn max_paths(&mut self, s: Vertex, t: Vertex) -> usize {
        self.reset();
        let source = 2 * s + 1;
        let sink = 2 * t;
        let mut flow = 0;
        while flow < self.limit {
            let mut pred: Vec<Option<(usize, usize)>> = vec![None; self.arcs.len()];
            let mut queue = VecDeque::from([source]);
            let mut found = false;
            while let Some(x) = queue.pop_front() {
                for (idx, arc) in self.arcs[x].iter().enumerate() {
                    if arc.cap > 0 && arc.to != source && pred[arc.to].is_none() {
                        pred[arc.to] = Some((x, idx));
                        if arc.to == sink {
                            found = true;
                            break;
                        }
                        queue.push_back(arc.to);
                    }
                }
                if found {
                    break;
                }
            }
            if !found {
                break;
            }
            let mut y = sink;
            while let Some((x, idx)) = pred[y] {
                let rev = self.arcs[x][idx].rev;
                self.arcs[x][idx].cap -= 1;
                self.arcs[y][rev].cap += 1;
                y = x;
                if y == source {
                    break;
                }
            }
            flow += 1;
        }
        flow
    }

    /// Minimum cut read off the residual network left by `max_paths`.
    fn min_cut(&self, g: &Graph, s: Vertex) -> CutWitness {
        let source = 2 * s + 1;
        let mut reached = vec![false; self.arcs.len()];
        reached[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for arc in &self.arcs[x] {
                if arc.cap > 0 && !reached[arc.to] {
                    reached[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        let cut: VertexSet = (0..g.n())
            .filter(|&v| v != s && reached[2 * v] && !reached[2 * v + 1])
            .collect();
        let mut outside = vec![true; g.n()];
        for c in cut.iter() {
            outside[c] = false;
        }
        let mut seen = vec![false; g.n()];
        let side_a = g.reach(s, &outside, &mut seen);
        let side_b = (0..g.n()).filter(|&v| outside[v] && !side_a.contains(v)).collect();
        CutWitness { cut, side_a, side_b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn complete_graph_is_n_minus_one_connected() {
        assert!(vertex_connectivity_at_least(&complete(4), 3).holds());
        assert_eq!(
            vertex_connectivity_at_least(&complete(4), 4),
            Connectivity::TooFewVertices { n: 4, k: 4 }
        );
    }

    #[test]
    fn path_has_articulation_cut() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        match vertex_connectivity_at_least(&g, 2) {
            Connectivity::Separated(w) => {
                assert_eq!(w.cut, VertexSet::from([1]));
                w.check(&g).unwrap();
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn flow_cut_on_two_glued_cliques() {
        // K4 on {0,1,2,3} and K4 on {2,3,4,5}: min degree 3, so the cut {2,3}
        // has to come out of the flow network.
        let g = Graph::from_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap();
        assert!(vertex_connectivity_at_least(&g, 2).holds());
        match vertex_connectivity_at_least(&g, 3) {
            Connectivity::Separated(w) => {
                assert_eq!(w.cut, VertexSet::from([2, 3]));
                w.check(&g).unwrap();
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn disconnected_graph_has_empty_cut() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        match vertex_connectivity_at_least(&g, 1) {
            Connectivity::Separated(w) => {
                assert!(w.cut.is_empty());
                w.check(&g).unwrap();
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }
}
