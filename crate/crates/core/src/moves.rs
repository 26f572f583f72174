//! State transitions of the augmentation engine and the policy that picks
//! the next one.
//!
//! Every transition re-checks its precondition, rebuilds the configuration,
//! prunes cascade entries whose rank broke, and then asserts the progress
//! fact it is responsible for. A failed assertion is reported as
//! [`Error::Internal`] with a dump of the state it started from.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::config::{
    compare_potential, Bridge, CascadeEdge, Configuration, PotentialVector, Rank, RankTable,
};
use crate::error::{contract, Error, Result};
use crate::graph::{CutWitness, Vertex, VertexSet};
use crate::solver::certify_cut;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    GrowDirect,
    CascadeAppend,
    CascadeTruncateAppend,
    BridgeSeparating,
    BridgeRankOne,
    BridgeHigher,
}

impl MoveKind {
    pub const ALL: [MoveKind; 6] = [
        MoveKind::GrowDirect,
        MoveKind::CascadeAppend,
        MoveKind::CascadeTruncateAppend,
        MoveKind::BridgeSeparating,
        MoveKind::BridgeRankOne,
        MoveKind::BridgeHigher,
    ];

    /// Moves that finish an augmentation.
    pub fn is_terminal(self) -> bool {
        matches!(self, MoveKind::GrowDirect | MoveKind::BridgeRankOne)
    }

    pub fn is_cascade(self) -> bool {
        matches!(self, MoveKind::CascadeAppend | MoveKind::CascadeTruncateAppend)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// The grown part takes the free neighbour `a` directly.
    GrowDirect { a: Vertex },
    /// `b` is appended to the cascade of `part` with rank `rank`.
    CascadeAppend { part: usize, a: Vertex, b: Vertex, rank: Rank },
    /// The cascade of `part` keeps its first `keep` entries, then takes `b`.
    CascadeTruncateAppend { part: usize, a: Vertex, b: Vertex, keep: usize, rank: Rank },
    /// `w` separates its part: `u` leaves for the free set and `a` joins.
    BridgeSeparating { bridge: Bridge, part: usize, w: Vertex, u: Vertex },
    /// `w` moves into the grown part and `a` replaces it.
    BridgeRankOne { bridge: Bridge, part: usize, w: Vertex },
    /// `w` leaves for the free set and `a` replaces it.
    BridgeHigher { bridge: Bridge, part: usize, w: Vertex },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::GrowDirect { .. } => MoveKind::GrowDirect,
            Move::CascadeAppend { .. } => MoveKind::CascadeAppend,
            Move::CascadeTruncateAppend { .. } => MoveKind::CascadeTruncateAppend,
            Move::BridgeSeparating { .. } => MoveKind::BridgeSeparating,
            Move::BridgeRankOne { .. } => MoveKind::BridgeRankOne,
            Move::BridgeHigher { .. } => MoveKind::BridgeHigher,
        }
    }

    pub fn rank(&self) -> Option<Rank> {
        match self {
            Move::GrowDirect { .. } => None,
            Move::CascadeAppend { rank, .. } | Move::CascadeTruncateAppend { rank, .. } => {
                Some(*rank)
            }
            Move::BridgeSeparating { bridge, .. }
            | Move::BridgeRankOne { bridge, .. }
            | Move::BridgeHigher { bridge, .. } => Some(bridge.rank),
        }
    }

    pub fn bridge(&self) -> Option<&Bridge> {
        match self {
            Move::BridgeSeparating { bridge, .. }
            | Move::BridgeRankOne { bridge, .. }
            | Move::BridgeHigher { bridge, .. } => Some(bridge),
            _ => None,
        }
    }
}

/// What [`select_move`] found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    Move(Move),
    Cut(CutWitness),
}

/// Result of applying a move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Applied<'g> {
    Continue(Configuration<'g>),
    /// The grown part gained one vertex; all other sizes are unchanged.
    Augmented(Vec<VertexSet>),
}

/// Smallest free vertex adjacent to the grown part.
pub fn free_neighbor_of_grown(cfg: &Configuration<'_>) -> Option<Vertex> {
    let g = cfg.graph();
    cfg.free()
        .iter()
        .find(|&a| g.adj(a).iter().any(|&x| cfg.part_of(x) == Some(cfg.grow())))
}

/// Priority: direct growth, then the minimal-rank bridge, then a cascade
/// extension, and otherwise the terminal cut.
pub fn select_move(cfg: &Configuration<'_>, ranks: &RankTable) -> Result<Selection> {
    if let Some(a) = free_neighbor_of_grown(cfg) {
        return Ok(Selection::Move(Move::GrowDirect { a }));
    }
    if let Some(bridge) = cfg.find_bridges(ranks).into_iter().next() {
        return bridge_move(cfg, ranks, bridge).map(Selection::Move);
    }
    if let Some(edge) = cfg.find_cascade_edge(ranks) {
        return plan_cascade_move(cfg, ranks, edge).map(Selection::Move);
    }
    certify_cut(cfg, ranks).map(Selection::Cut)
}

/// The cascade vertex of minimal rank owning the bridge, and its part.
fn bridge_owner(cfg: &Configuration<'_>, ranks: &RankTable, bridge: &Bridge) -> Result<(usize, Vertex)> {
    let w = bridge
        .owners
        .iter()
        .copied()
        .find(|&w| ranks.rank(w) == Some(bridge.rank))
        .ok_or_else(|| Error::Contract(format!("bridge {bridge:?} has no owner of its rank")))?;
    let part = cfg
        .part_of(w)
        .ok_or_else(|| Error::Contract(format!("bridge owner {w} is not in a part")))?;
    Ok((part, w))
}

fn bridge_move(cfg: &Configuration<'_>, ranks: &RankTable, bridge: Bridge) -> Result<Move> {
    let (part, w) = bridge_owner(cfg, ranks, &bridge)?;
    let g = cfg.graph();
    if g.separates_unchecked(cfg.part(part), w) {
        let u = nonseparating_outside(cfg, ranks, part, w)?;
        Ok(Move::BridgeSeparating { bridge, part, w, u })
    } else if bridge.rank == 1 {
        Ok(Move::BridgeRankOne { bridge, part, w })
    } else {
        Ok(Move::BridgeHigher { bridge, part, w })
    }
}

/// Smallest vertex of `part ∖ R(w) ∖ {w}` whose removal keeps the part
/// connected.
fn nonseparating_outside(
    cfg: &Configuration<'_>,
    ranks: &RankTable,
    part: usize,
    w: Vertex,
) -> Result<Vertex> {
    let g = cfg.graph();
    let vertices = cfg.part(part);
    let res = ranks.reservoir(w).cloned().unwrap_or_default();
    vertices
        .iter()
        .filter(|&v| v != w && !res.contains(v))
        .find(|&v| !g.separates_unchecked(vertices, v))
        .ok_or_else(|| {
            cfg.internal(format!(
                "no nonseparating vertex of part {part} outside R({w}) ∪ {{{w}}}"
            ))
        })
}

/// Rank `b` receives on joining the cascade of `part`.
fn incoming_rank(cfg: &Configuration<'_>, ranks: &RankTable, part: usize, b: Vertex) -> Option<Rank> {
    let g = cfg.graph();
    if g.adj(b).iter().any(|&x| cfg.part_of(x) == Some(cfg.grow())) {
        return Some(1);
    }
    cfg.cascade_vertices()
        .filter(|&(j, _)| j != part)
        .filter_map(|(_, w)| {
            let r = ranks.rank(w)?;
            let res = ranks.reservoir(w)?;
            g.adj(b).iter().any(|&x| res.contains(x)).then_some(r + 1)
        })
        .min()
}

fn check_cascade_edge(cfg: &Configuration<'_>, ranks: &RankTable, edge: CascadeEdge) -> Result<()> {
    let CascadeEdge { a, b, part } = edge;
    let g = cfg.graph();
    if part >= cfg.k() || part == cfg.grow() {
        return contract(format!("part {part} cannot take a cascade move"));
    }
    if !g.has_edge(a, b) {
        return contract(format!("[{a},{b}] is not an edge"));
    }
    if !cfg.part(part).contains(b) || b == cfg.terminals()[part] {
        return contract(format!("{b} is not a non-terminal vertex of part {part}"));
    }
    if cfg.in_reservoir(ranks, b) || cfg.cascade(part).last() == Some(&b) {
        return contract(format!("{b} is in a reservoir or ends the cascade of part {part}"));
    }
    let a_ok = match cfg.part_of(a) {
        Some(j) if j == cfg.grow() => true,
        Some(j) if j != part => cfg.in_reservoir(ranks, a),
        _ => false,
    };
    if !a_ok {
        return contract(format!("{a} is neither in the grown part nor in another part's reservoir"));
    }
    Ok(())
}

/// Decides between appending `b` and truncating first.
pub fn plan_cascade_move(cfg: &Configuration<'_>, ranks: &RankTable, edge: CascadeEdge) -> Result<Move> {
    check_cascade_edge(cfg, ranks, edge)?;
    let CascadeEdge { a, b, part } = edge;
    let rank = incoming_rank(cfg, ranks, part, b)
        .ok_or_else(|| cfg.internal(format!("{b} has no rank despite edge [{a},{b}]")))?;
    let cascade = cfg.cascade(part);
    let keep = cascade
        .iter()
        .take_while(|&&w| ranks.rank(w).is_some_and(|r| r < rank))
        .count();
    Ok(if keep == cascade.len() {
        Move::CascadeAppend { part, a, b, rank }
    } else {
        Move::CascadeTruncateAppend { part, a, b, keep, rank }
    })
}

/// Extends (after truncating, if needed) the cascade of `edge.part` by `b`.
pub fn apply_cascade_move<'g>(
    cfg: &Configuration<'g>,
    ranks: &RankTable,
    edge: CascadeEdge,
) -> Result<Configuration<'g>> {
    let mv = plan_cascade_move(cfg, ranks, edge)?;
    let (part, b, keep, rank) = match mv {
        Move::CascadeAppend { part, b, rank, .. } => (part, b, cfg.cascade(part).len(), rank),
        Move::CascadeTruncateAppend { part, b, keep, rank, .. } => (part, b, keep, rank),
        _ => unreachable!(),
    };
    let mut cascade = cfg.cascade(part)[..keep].to_vec();
    cascade.push(b);
    let mut next = cfg.clone();
    next.set_cascade(part, cascade)
        .map_err(|e| cfg.internal(format!("cascade extension by {b} broke the cascade: {e}")))?;
    let next = next.prune_undefined();
    let after = next.compute_ranks();
    if after.rank(b) != Some(rank) {
        return Err(cfg.internal(format!(
            "{b} joined with rank {:?}, expected {rank}",
            after.rank(b)
        )));
    }
    check_progress(cfg, ranks, &next, &after, rank, true)?;
    Ok(next)
}

fn check_current_bridge(cfg: &Configuration<'_>, ranks: &RankTable, bridge: &Bridge) -> Result<()> {
    let bridges = cfg.find_bridges(ranks);
    if !bridges.contains(bridge) {
        return contract(format!("{bridge:?} is not a bridge of this configuration"));
    }
    if bridges[0].rank != bridge.rank {
        return contract(format!(
            "bridge rank {} is not minimal ({} exists)",
            bridge.rank, bridges[0].rank
        ));
    }
    Ok(())
}

/// `w` separates its part: trade a nonseparating vertex beyond `w` for `a`.
pub fn apply_bridge_separating<'g>(
    cfg: &Configuration<'g>,
    ranks: &RankTable,
    bridge: &Bridge,
) -> Result<Configuration<'g>> {
    check_current_bridge(cfg, ranks, bridge)?;
    let (part, w) = bridge_owner(cfg, ranks, bridge)?;
    if !cfg.graph().separates_unchecked(cfg.part(part), w) {
        return contract(format!("{w} does not separate part {part}"));
    }
    let u = nonseparating_outside(cfg, ranks, part, w)?;
    let res_w = ranks.reservoir(w).cloned().unwrap_or_default();

    let mut next = cfg.clone();
    next.relocate(u, None);
    next.relocate(bridge.a, Some(part));
    next.cascade_mut(part).retain(|&x| x == w || res_w.contains(x));
    let next = next.prune_undefined();
    let after = next.compute_ranks();

    if !next.cascade(part).contains(&w) {
        return Err(cfg.internal(format!("{w} dropped out of the cascade of part {part}")));
    }
    if !after.reservoir(w).is_some_and(|r| r.contains(bridge.a)) {
        return Err(cfg.internal(format!("{} did not enter R({w})", bridge.a)));
    }
    check_progress(cfg, ranks, &next, &after, bridge.rank, true)?;
    Ok(next)
}

/// Rank-1 bridge with nonseparating owner: the grown part takes `w`.
pub fn apply_bridge_rank_one(
    cfg: &Configuration<'_>,
    ranks: &RankTable,
    bridge: &Bridge,
) -> Result<Vec<VertexSet>> {
    check_current_bridge(cfg, ranks, bridge)?;
    if bridge.rank != 1 {
        return contract(format!("bridge rank is {}, not 1", bridge.rank));
    }
    let (part, w) = bridge_owner(cfg, ranks, bridge)?;
    let g = cfg.graph();
    if g.separates_unchecked(cfg.part(part), w) {
        return contract(format!("{w} separates part {part}"));
    }
    if !g.adj(w).iter().any(|&x| cfg.part_of(x) == Some(cfg.grow())) {
        return contract(format!("{w} has no neighbour in the grown part"));
    }
    let mut next = cfg.clone();
    next.relocate(w, Some(cfg.grow()));
    next.relocate(bridge.a, Some(part));
    next.clear_cascades();
    let parts = next.into_parts();
    check_augmented(cfg, &parts)?;
    Ok(parts)
}

/// Higher-rank bridge with nonseparating owner: `w` leaves for the free set
/// and becomes the endpoint of a lower-rank bridge.
pub fn apply_bridge_higher<'g>(
    cfg: &Configuration<'g>,
    ranks: &RankTable,
    bridge: &Bridge,
) -> Result<Configuration<'g>> {
    check_current_bridge(cfg, ranks, bridge)?;
    if bridge.rank < 2 {
        return contract("bridge rank must be at least 2");
    }
    let (part, w) = bridge_owner(cfg, ranks, bridge)?;
    if cfg.graph().separates_unchecked(cfg.part(part), w) {
        return contract(format!("{w} separates part {part}"));
    }
    let mut next = cfg.clone();
    next.relocate(w, None);
    next.relocate(bridge.a, Some(part));
    let pos = cfg.cascade(part).iter().position(|&x| x == w).unwrap();
    next.cascade_mut(part).truncate(pos);
    let next = next.prune_undefined();
    let after = next.compute_ranks();
    check_progress(cfg, ranks, &next, &after, bridge.rank, false)?;
    let lower = next.find_bridges(&after).first().map(|b| b.rank);
    if !lower.is_some_and(|r| r < bridge.rank) {
        return Err(cfg.internal(format!(
            "no bridge below rank {} after moving {w} out (minimum now {lower:?})",
            bridge.rank
        )));
    }
    Ok(next)
}

/// The grown part absorbs the free vertex `a`.
pub fn apply_grow_direct(cfg: &Configuration<'_>, a: Vertex) -> Result<Vec<VertexSet>> {
    if !cfg.is_free(a)
        || !cfg.graph().adj(a).iter().any(|&x| cfg.part_of(x) == Some(cfg.grow()))
    {
        return contract(format!("{a} is not a free neighbour of the grown part"));
    }
    let mut next = cfg.clone();
    next.relocate(a, Some(cfg.grow()));
    next.clear_cascades();
    let parts = next.into_parts();
    check_augmented(cfg, &parts)?;
    Ok(parts)
}

pub fn apply<'g>(cfg: &Configuration<'g>, ranks: &RankTable, mv: &Move) -> Result<Applied<'g>> {
    match mv {
        Move::GrowDirect { a } => apply_grow_direct(cfg, *a).map(Applied::Augmented),
        Move::CascadeAppend { part, a, b, .. } | Move::CascadeTruncateAppend { part, a, b, .. } => {
            let edge = CascadeEdge { a: *a, b: *b, part: *part };
            let planned = plan_cascade_move(cfg, ranks, edge)?;
            if planned != *mv {
                return contract(format!("move {mv:?} does not match the plan {planned:?}"));
            }
            apply_cascade_move(cfg, ranks, edge).map(Applied::Continue)
        }
        Move::BridgeSeparating { bridge, .. } => {
            apply_bridge_separating(cfg, ranks, bridge).map(Applied::Continue)
        }
        Move::BridgeRankOne { bridge, .. } => {
            apply_bridge_rank_one(cfg, ranks, bridge).map(Applied::Augmented)
        }
        Move::BridgeHigher { bridge, .. } => {
            apply_bridge_higher(cfg, ranks, bridge).map(Applied::Continue)
        }
    }
}

/// Asserts the new state is sound and `ρ₁..ρ_{r−1}` did not move. With
/// `strict`, also asserts `ρ_r` grew (hence a lexicographic increase).
fn check_progress(
    before_cfg: &Configuration<'_>,
    before_ranks: &RankTable,
    next: &Configuration<'_>,
    after_ranks: &RankTable,
    rank: Rank,
    strict: bool,
) -> Result<()> {
    next.check_invariants(after_ranks)
        .map_err(|m| before_cfg.internal(format!("move produced a bad state: {m}\n{}", next.dump())))?;
    let before = before_cfg.potential_unchecked(before_ranks);
    let after = next.potential_unchecked(after_ranks);
    if !before.prefix_eq(&after, rank - 1) {
        return Err(before_cfg.internal(format!(
            "potential prefix below rank {rank} changed: {:?} -> {:?}",
            before.0, after.0
        )));
    }
    if strict && after.rho(rank) <= before.rho(rank) {
        return Err(before_cfg.internal(format!(
            "ρ_{rank} did not grow: {:?} -> {:?}",
            before.0, after.0
        )));
    }
    if strict && compare_potential(&after, &before) != Ordering::Greater {
        return Err(before_cfg.internal("potential did not increase".to_string()));
    }
    Ok(())
}

fn check_augmented(cfg: &Configuration<'_>, parts: &[VertexSet]) -> Result<()> {
    let g = cfg.graph();
    for (i, part) in parts.iter().enumerate() {
        let expected = cfg.part(i).len() + usize::from(i == cfg.grow());
        if part.len() != expected {
            return Err(cfg.internal(format!("part {i} has {} vertices, expected {expected}", part.len())));
        }
        if !part.contains(cfg.terminals()[i]) || !g.is_connected_unchecked(part) {
            return Err(cfg.internal(format!("part {i} lost its terminal or connectivity: {part:?}")));
        }
    }
    let mut seen = VertexSet::new();
    for part in parts {
        if !seen.is_disjoint(part) {
            return Err(cfg.internal("augmented parts overlap"));
        }
        seen.extend(part);
    }
    Ok(())
}

/// Potential of a configuration in one call.
pub fn potential_of(cfg: &Configuration<'_>) -> PotentialVector {
    cfg.potential_unchecked(&cfg.compute_ranks())
}
