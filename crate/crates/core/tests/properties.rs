use kpart::config::Configuration;
use kpart::io::{emit_graph, emit_trace_event, parse_graph, parse_trace_event};
use kpart::trace::Comparison;
use kpart::{Bridge, Graph, MoveKind, PotentialVector, TraceEvent, VertexSet};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.45), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

/// Parts grown by random BFS from random terminals, plus random cascades,
/// pruned to a valid configuration. At least one vertex stays free.
fn random_configuration(g: &Graph, seed: u64) -> Option<Configuration<'_>> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=3usize.min(n));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let terminals = order[..k].to_vec();
    let mut owner = vec![None; n];
    let mut parts: Vec<VertexSet> = terminals.iter().map(|&t| VertexSet::singleton(t)).collect();
    for (i, &t) in terminals.iter().enumerate() {
        owner[t] = Some(i);
    }
    for _ in 0..rng.gen_range(0..=n) {
        let i = rng.gen_range(0..k);
        let frontier: Vec<usize> = parts[i]
            .iter()
            .flat_map(|v| g.adj(v).iter().copied())
            .filter(|&u| owner[u].is_none())
            .collect();
        if let Some(&u) = frontier.choose(&mut rng) {
            owner[u] = Some(i);
            parts[i].insert(u);
        }
    }
    if owner.iter().all(Option::is_some) {
        return None;
    }
    let grow = rng.gen_range(0..k);
    let mut cfg = Configuration::new(g, terminals.clone(), parts.clone(), grow).ok()?;
    for i in (0..k).filter(|&i| i != grow) {
        let mut cascade: Vec<usize> = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let candidates: Vec<usize> = parts[i]
                .iter()
                .filter(|&w| w != terminals[i] && !cascade.contains(&w))
                .filter(|&w| cascade.last().is_none_or(|&l| !cfg.reservoir(i, l).unwrap().contains(w)))
                .collect();
            match candidates.choose(&mut rng) {
                Some(&w) => cascade.push(w),
                None => break,
            }
        }
        cfg.set_cascade(i, cascade).unwrap();
    }
    Some(cfg.prune_undefined())
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::from_edges(g.n(), g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn separates_matches_component_count(g in graph_strategy(8), mask in any::<u16>(), pick in any::<usize>()) {
        let s: VertexSet = (0..g.n()).filter(|v| mask >> v & 1 == 1).collect();
        prop_assume!(!s.is_empty());
        let v = s.to_vec()[pick % s.len()];
        let mut rest = s.clone();
        rest.remove(v);
        let split = g.induced_components(&rest).unwrap().len() >= 2;
        prop_assert_eq!(g.separates(&s, v).unwrap(), split);
    }

    #[test]
    fn prune_is_idempotent_and_valid(g in graph_strategy(9), seed in any::<u64>()) {
        if let Some(cfg) = random_configuration(&g, seed) {
            prop_assert!(cfg.is_valid());
            prop_assert!(cfg.prune_undefined() == cfg);
            cfg.check_invariants(&cfg.compute_ranks()).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn extra_edge_never_raises_a_rank(g in graph_strategy(9), seed in any::<u64>(), pick in any::<usize>()) {
        let Some(cfg) = random_configuration(&g, seed) else { return Ok(()) };
        // Only edges that leave every reservoir unchanged: not inside one
        // non-grown part.
        let n = g.n();
        let same_part = |u: usize, v: usize| {
            matches!((cfg.part_of(u), cfg.part_of(v)), (Some(i), Some(j)) if i == j && i != cfg.grow())
        };
        let extra: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v) && !same_part(u, v))
            .collect();
        prop_assume!(!extra.is_empty());
        let (u, v) = extra[pick % extra.len()];
        let h = Graph::from_edges(n, g.edges().chain([(u, v)])).unwrap();
        let mut denser = Configuration::new(&h, cfg.terminals().to_vec(), cfg.parts().to_vec(), cfg.grow()).unwrap();
        for i in (0..cfg.k()).filter(|&i| i != cfg.grow()) {
            denser.set_cascade(i, cfg.cascade(i).to_vec()).unwrap();
        }
        let before = cfg.compute_ranks();
        let after = denser.compute_ranks();
        for (w, r) in before.entries() {
            if let Some(r) = r {
                let s = after.rank(w);
                prop_assert!(s.is_some_and(|s| s <= r), "vertex {} rank {} became {:?}", w, r, s);
            }
        }
    }

    #[test]
    fn potential_is_label_invariant(g in graph_strategy(9), seed in any::<u64>(), shuffle_seed in any::<u64>()) {
        let Some(cfg) = random_configuration(&g, seed) else { return Ok(()) };
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let h = relabel(&g, &perm);
        let map = |s: &VertexSet| s.iter().map(|v| perm[v]).collect::<VertexSet>();
        let mut image = Configuration::new(
            &h,
            cfg.terminals().iter().map(|&t| perm[t]).collect(),
            cfg.parts().iter().map(map).collect(),
            cfg.grow(),
        )
        .unwrap();
        for i in (0..cfg.k()).filter(|&i| i != cfg.grow()) {
            image.set_cascade(i, cfg.cascade(i).iter().map(|&w| perm[w]).collect()).unwrap();
        }
        let p = cfg.potential(&cfg.compute_ranks()).unwrap();
        let q = image.potential(&image.compute_ranks()).unwrap();
        prop_assert_eq!(p.0, q.0);
    }

    #[test]
    fn bridges_match_exhaustive_scan(g in graph_strategy(9), seed in any::<u64>()) {
        let Some(cfg) = random_configuration(&g, seed) else { return Ok(()) };
        let ranks = cfg.compute_ranks();
        let mut expected = Vec::new();
        for a in 0..g.n() {
            for b in 0..g.n() {
                if !g.has_edge(a, b) || !cfg.is_free(a) {
                    continue;
                }
                let Some(i) = cfg.part_of(b) else { continue };
                let mut owners: Vec<usize> = cfg
                    .cascade(i)
                    .iter()
                    .copied()
                    .filter(|&w| cfg.reservoir(i, w).unwrap().contains(b))
                    .collect();
                if owners.is_empty() {
                    continue;
                }
                owners.sort_unstable();
                let rank = owners.iter().map(|&w| ranks.rank(w).unwrap()).min().unwrap();
                expected.push(Bridge { a, b, owners, rank });
            }
        }
        expected.sort_by_key(|br| (br.rank, br.a, br.b));
        prop_assert_eq!(cfg.find_bridges(&ranks), expected);
    }

    #[test]
    fn graph_text_round_trips(g in graph_strategy(12)) {
        let text = emit_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(emit_graph(&back), text);
    }

    #[test]
    fn trace_lines_round_trip(
        step in 0usize..1000,
        aug in 0usize..100,
        kind_idx in 0usize..MoveKind::ALL.len(),
        before in proptest::collection::vec(0usize..20, 0..5),
        after in proptest::collection::vec(0usize..20, 0..5),
        sizes in proptest::collection::vec(1usize..20, 2..5),
        rank in proptest::option::of(1u32..5),
    ) {
        let event = TraceEvent {
            augmentation: aug,
            bridge: rank.map(|r| Bridge { a: 1, b: 2, owners: vec![3], rank: r }),
            comparison: Comparison::from(PotentialVector(after.clone()).cmp(&PotentialVector(before.clone()))),
            grow: 0,
            kind: MoveKind::ALL[kind_idx],
            min_bridge_rank_after: rank,
            part_sizes: sizes,
            potential_after: PotentialVector(after),
            potential_before: PotentialVector(before),
            rank,
            step,
            valid_after: true,
        };
        let line = emit_trace_event(&event);
        prop_assert!(!line.contains('\n'));
        let back = parse_trace_event(&line).unwrap();
        prop_assert_eq!(emit_trace_event(&back), line);
    }
}
