//! The augmentation step, the driver that repeats it until every part hits
//! its target size, and the cut certificate produced when the engine runs
//! out of moves.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::{compare_potential, Configuration, PotentialVector, Problem, RankTable};
use crate::error::{contract, invalid, Result};
use crate::graph::{CutWitness, VertexSet};
use crate::moves::{apply, free_neighbor_of_grown, select_move, Applied, MoveKind, Selection};
use crate::trace::{Comparison, TraceEvent, TraceSink};

/// Parts meeting every target size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<VertexSet>,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Move budget per augmentation; `None` means `10·n³`.
    pub budget: Option<usize>,
}

impl SolveOptions {
    pub fn budget_for(&self, n: usize) -> usize {
        self.budget.unwrap_or_else(|| 10 * n.pow(3)).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveFailure {
    NotKConnected(CutWitness),
    ProgressStall { augmentation: usize, steps: usize, tail: Vec<TraceEvent> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Augmentation {
    Grown(Vec<VertexSet>),
    NotKConnected(CutWitness),
    Stalled { steps: usize, tail: Vec<TraceEvent> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: std::result::Result<Partition, SolveFailure>,
    pub move_counts: BTreeMap<MoveKind, usize>,
    pub steps: usize,
    pub augmentations: usize,
}

const TAIL_LEN: usize = 32;

/// Grows part `grow` by one vertex, keeping every other size.
///
/// Starts from null cascades and applies selected moves until a terminal
/// move fires, the engine certifies a small cut, or the budget runs out.
/// Emitted events carry `augmentation = 0`.
pub fn augment_once(
    problem: &Problem,
    parts: &[VertexSet],
    grow: usize,
    options: &SolveOptions,
    sink: &mut dyn TraceSink,
) -> Result<Augmentation> {
    let g = problem.graph();
    if grow >= problem.k() {
        return invalid(format!("part index {grow} out of range 0..{}", problem.k()));
    }
    let mut cfg = Configuration::new(g, problem.terminals().to_vec(), parts.to_vec(), grow)?;
    if cfg.free().is_empty() {
        return contract("no free vertex left to grow into");
    }
    let budget = options.budget_for(g.n());
    let mut tail: VecDeque<TraceEvent> = VecDeque::with_capacity(TAIL_LEN);
    for step in 0..budget {
        let ranks = cfg.compute_ranks();
        cfg.check_invariants(&ranks).map_err(|m| cfg.internal(m))?;
        let before = cfg.potential_unchecked(&ranks);
        let mv = match select_move(&cfg, &ranks)? {
            Selection::Cut(witness) => return Ok(Augmentation::NotKConnected(witness)),
            Selection::Move(mv) => mv,
        };
        let applied = apply(&cfg, &ranks, &mv)?;
        let (after, sizes, min_bridge, valid) = match &applied {
            Applied::Continue(next) => {
                let r = next.compute_ranks();
                (
                    next.potential_unchecked(&r),
                    next.parts().iter().map(VertexSet::len).collect(),
                    next.find_bridges(&r).first().map(|b| b.rank),
                    next.validity(&r).is_valid(),
                )
            }
            Applied::Augmented(parts) => (
                PotentialVector::default(),
                parts.iter().map(VertexSet::len).collect(),
                None,
                true,
            ),
        };
        let event = TraceEvent {
            augmentation: 0,
            bridge: mv.bridge().cloned(),
            comparison: Comparison::from(compare_potential(&after, &before)),
            grow,
            kind: mv.kind(),
            min_bridge_rank_after: min_bridge,
            part_sizes: sizes,
            potential_after: after,
            potential_before: before,
            rank: mv.rank(),
            step,
            valid_after: valid,
        };
        if tail.len() == TAIL_LEN {
            tail.pop_front();
        }
        tail.push_back(event.clone());
        sink.emit(event);
        match applied {
            Applied::Continue(next) => cfg = next,
            Applied::Augmented(parts) => return Ok(Augmentation::Grown(parts)),
        }
    }
    Ok(Augmentation::Stalled { steps: budget, tail: tail.into() })
}

/// Runs augmentations from the terminal singletons until every part has its
/// target size, always growing the smallest-index deficient part.
pub fn solve(problem: &Problem, options: &SolveOptions, sink: &mut dyn TraceSink) -> Result<SolveReport> {
    let mut parts: Vec<VertexSet> =
        problem.terminals().iter().map(|&t| VertexSet::singleton(t)).collect();
    let mut counter = Counting { inner: sink, augmentation: 0, counts: BTreeMap::new(), steps: 0 };
    let outcome = loop {
        let Some(grow) = (0..problem.k()).find(|&i| parts[i].len() < problem.sizes()[i]) else {
            break Ok(Partition { parts });
        };
        match augment_once(problem, &parts, grow, options, &mut counter)? {
            Augmentation::Grown(next) => parts = next,
            Augmentation::NotKConnected(w) => break Err(SolveFailure::NotKConnected(w)),
            Augmentation::Stalled { steps, tail } => {
                break Err(SolveFailure::ProgressStall {
                    augmentation: counter.augmentation,
                    steps,
                    tail: tail
                        .into_iter()
                        .map(|mut e| {
                            e.augmentation = counter.augmentation;
                            e
                        })
                        .collect(),
                })
            }
        }
        counter.augmentation += 1;
    };
    Ok(SolveReport {
        outcome,
        move_counts: counter.counts,
        steps: counter.steps,
        augmentations: counter.augmentation,
    })
}

/// Stamps the augmentation index and tallies moves on the way to the sink.
struct Counting<'a> {
    inner: &'a mut dyn TraceSink,
    augmentation: usize,
    counts: BTreeMap<MoveKind, usize>,
    steps: usize,
}

impl TraceSink for Counting<'_> {
    fn emit(&mut self, mut event: TraceEvent) {
        event.augmentation = self.augmentation;
        *self.counts.entry(event.kind).or_default() += 1;
        self.steps += 1;
        self.inner.emit(event);
    }
}

/// Cut formed by the last entry of every non-null cascade and the terminal
/// of every part with a null cascade, separating the grown part and all
/// reservoirs from the free set.
pub fn certify_cut(cfg: &Configuration<'_>, ranks: &RankTable) -> Result<CutWitness> {
    if !cfg.validity(ranks).is_valid() {
        return contract("certify_cut needs a valid configuration");
    }
    if free_neighbor_of_grown(cfg).is_some() {
        return contract("the grown part still touches the free set");
    }
    if !cfg.find_bridges(ranks).is_empty() {
        return contract("a bridge is still available");
    }
    if cfg.find_cascade_edge(ranks).is_some() {
        return contract("a cascade edge is still available");
    }
    let g = cfg.graph();
    let mut cut = VertexSet::new();
    for i in (0..cfg.k()).filter(|&i| i != cfg.grow()) {
        cut.insert(cfg.cascade(i).last().copied().unwrap_or(cfg.terminals()[i]));
    }
    let mut side_a = cfg.part(cfg.grow()).clone();
    for (_, w) in cfg.cascade_vertices() {
        if let Some(res) = ranks.reservoir(w) {
            side_a.extend(res);
        }
    }
    let side_a = side_a.difference(&cut);
    let side_b = g.vertices().difference(&cut).difference(&side_a);
    let witness = CutWitness { cut, side_a, side_b };
    if witness.cut.len() != cfg.k() - 1 {
        return Err(cfg.internal(format!("cut {:?} does not have k − 1 vertices", witness.cut)));
    }
    witness
        .check(g)
        .map_err(|m| cfg.internal(format!("cut certificate does not separate: {m}")))?;
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::fixtures::chain_graph;
    use crate::graph::Graph;
    use crate::trace::NoTrace;

    fn c4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    #[test]
    fn augment_cycle() {
        let g = c4();
        let p = Problem::new(g, vec![0, 2], vec![2, 1]).unwrap();
        let parts = vec![VertexSet::from([0]), VertexSet::from([2])];
        let out = augment_once(&p, &parts, 0, &SolveOptions::default(), &mut NoTrace).unwrap();
        let Augmentation::Grown(parts) = out else { panic!("{out:?}") };
        assert_eq!(parts[1], VertexSet::from([2]));
        assert!(parts[0] == VertexSet::from([0, 1]) || parts[0] == VertexSet::from([0, 3]));
    }

    #[test]
    fn augment_rejects_bad_index() {
        let g = Graph::from_edges(5, (0..5).flat_map(|u| ((u + 1)..5).map(move |v| (u, v)))).unwrap();
        let p = Problem::new(g, vec![0, 1, 2], vec![1, 1, 1]).unwrap();
        let parts = vec![VertexSet::from([0]), VertexSet::from([1]), VertexSet::from([2])];
        assert!(matches!(
            augment_once(&p, &parts, 3, &SolveOptions::default(), &mut NoTrace),
            Err(crate::Error::InvalidInput(_))
        ));
    }

    #[test]
    fn augment_chain_problem() {
        let g = chain_graph();
        let p = Problem::new(g, vec![0, 1, 3], vec![2, 2, 2]).unwrap();
        let parts = vec![VertexSet::from([0]), VertexSet::from([1, 2]), VertexSet::from([3, 4])];
        let mut trace: Vec<TraceEvent> = Vec::new();
        let out = augment_once(&p, &parts, 0, &SolveOptions::default(), &mut trace).unwrap();
        assert_eq!(
            out,
            Augmentation::Grown(vec![
                VertexSet::from([0, 2]),
                VertexSet::from([1, 5]),
                VertexSet::from([3, 4])
            ])
        );
        let kinds: Vec<_> = trace.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![MoveKind::CascadeAppend, MoveKind::BridgeRankOne]);
    }

    #[test]
    fn solve_small_instances() {
        let p = Problem::new(c4(), vec![0, 2], vec![2, 2]).unwrap();
        let report = solve(&p, &SolveOptions::default(), &mut NoTrace).unwrap();
        let parts = report.outcome.unwrap().parts;
        assert!(parts == vec![VertexSet::from([0, 1]), VertexSet::from([2, 3])]
            || parts == vec![VertexSet::from([0, 3]), VertexSet::from([1, 2])]);
        assert_eq!(report.augmentations, 2);

        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let p = Problem::new(k4, vec![0, 1], vec![1, 3]).unwrap();
        let parts = solve(&p, &SolveOptions::default(), &mut NoTrace).unwrap().outcome.unwrap().parts;
        assert_eq!(parts, vec![VertexSet::from([0]), VertexSet::from([1, 2, 3])]);
    }

    #[test]
    fn two_triangles_give_a_one_vertex_cut() {
        // Triangles {0,1,2} and {2,3,4} share 2.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let p = Problem::new(g.clone(), vec![0, 1], vec![2, 3]).unwrap();
        let report = solve(&p, &SolveOptions::default(), &mut NoTrace).unwrap();
        match report.outcome {
            Err(SolveFailure::NotKConnected(w)) => {
                assert_eq!(w.cut.len(), 1);
                w.check(&g).unwrap();
            }
            other => panic!("expected a cut, got {other:?}"),
        }
    }

    #[test]
    fn tiny_budget_stalls() {
        let g = chain_graph();
        let p = Problem::new(g, vec![0, 1, 3], vec![2, 2, 2]).unwrap();
        let parts = vec![VertexSet::from([0]), VertexSet::from([1, 2]), VertexSet::from([3, 4])];
        let out = augment_once(&p, &parts, 0, &SolveOptions { budget: Some(1) }, &mut NoTrace).unwrap();
        let Augmentation::Stalled { steps, tail } = out else { panic!("{out:?}") };
        assert_eq!(steps, 1);
        assert_eq!(tail.len(), 1);
        assert_eq!(tail[0].kind, MoveKind::CascadeAppend);
    }
}
