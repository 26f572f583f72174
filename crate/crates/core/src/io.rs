//! JSON documents, JSONL trace lines and DOT rendering.
//!
//! Emitted JSON is canonical: keys sorted, vertex lists ascending, no
//! insignificant whitespace. Unknown keys are rejected on input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{check_targets, Configuration, Problem};
use crate::error::{invalid, Error, Result};
use crate::graph::{CutWitness, Graph, Vertex, VertexSet};
use crate::solver::Partition;
use crate::trace::TraceEvent;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub edges: Vec<[Vertex; 2]>,
    pub n: usize,
}

impl GraphDocument {
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphDocument { edges: g.edges().map(|(u, v)| [u, v]).collect(), n: g.n() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_path: Option<PathBuf>,
    pub sizes: Vec<usize>,
    pub terminals: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDocument {
    pub parts: Vec<Vec<Vertex>>,
}

/// A problem as read from disk, before the `k ≥ 2` requirement of
/// [`Problem`] is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInput {
    pub graph: Graph,
    pub terminals: Vec<Vertex>,
    pub sizes: Vec<usize>,
}

impl ProblemInput {
    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn into_problem(self) -> Result<Problem> {
        Problem::new(self.graph, self.terminals, self.sizes)
    }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed {what} document: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents always serialize")
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    from_json::<GraphDocument>(text, "graph")?.to_graph()
}

pub fn emit_graph(g: &Graph) -> String {
    to_json(&GraphDocument::from_graph(g))
}

/// Parses a problem; a relative `graph_path` is resolved against `base`.
pub fn parse_problem(text: &str, base: Option<&Path>) -> Result<ProblemInput> {
    let doc: ProblemDocument = from_json(text, "problem")?;
    let graph = match (doc.graph, doc.graph_path) {
        (Some(g), None) => g.to_graph()?,
        (None, Some(path)) => {
            let path = match base {
                Some(base) if path.is_relative() => base.join(path),
                _ => path,
            };
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::InvalidInput(format!("cannot read graph file {}: {e}", path.display()))
            })?;
            parse_graph(&text)?
        }
        (Some(_), Some(_)) => return invalid("problem has both graph and graph_path"),
        (None, None) => return invalid("problem has neither graph nor graph_path"),
    };
    check_targets(&graph, &doc.terminals, &doc.sizes)?;
    Ok(ProblemInput { graph, terminals: doc.terminals, sizes: doc.sizes })
}

pub fn emit_problem(problem: &Problem) -> String {
    to_json(&ProblemDocument {
        graph: Some(GraphDocument::from_graph(problem.graph())),
        graph_path: None,
        sizes: problem.sizes().to_vec(),
        terminals: problem.terminals().to_vec(),
    })
}

/// Repeated vertices inside one part are rejected; overlap between parts is
/// left for the verifier to report.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let doc: PartitionDocument = from_json(text, "partition")?;
    let mut parts = Vec::with_capacity(doc.parts.len());
    for (i, list) in doc.parts.iter().enumerate() {
        let set: VertexSet = list.iter().copied().collect();
        if set.len() != list.len() {
            return invalid(format!("part {i} lists a vertex twice"));
        }
        parts.push(set);
    }
    Ok(Partition { parts })
}

pub fn emit_partition(partition: &Partition) -> String {
    to_json(&PartitionDocument { parts: partition.parts.iter().map(VertexSet::to_vec).collect() })
}

pub fn emit_witness(witness: &CutWitness) -> String {
    to_json(witness)
}

pub fn emit_trace_event(event: &TraceEvent) -> String {
    to_json(event)
}

pub fn parse_trace_event(line: &str) -> Result<TraceEvent> {
    from_json(line, "trace event")
}

const PALETTE: [(&str, &str); 8] = [
    ("#1f77b4", "#c6dbef"),
    ("#d62728", "#fcbba1"),
    ("#2ca02c", "#c7e9c0"),
    ("#9467bd", "#dadaeb"),
    ("#ff7f0e", "#fdd0a2"),
    ("#8c564b", "#e7cbb6"),
    ("#e377c2", "#fbd4ec"),
    ("#17becf", "#c2eef3"),
];

fn colors(i: usize) -> (&'static str, &'static str) {
    PALETTE[i % PALETTE.len()]
}

/// Renders a partition: one fill colour per part, terminals double-circled.
pub fn emit_dot_partition(g: &Graph, terminals: &[Vertex], partition: &Partition) -> String {
    let owner = owners(g.n(), &partition.parts);
    let mut s = String::from("graph partition {\n  node [style=filled, fillcolor=white];\n");
    for (v, part) in owner.iter().enumerate() {
        let mut attrs = Vec::new();
        if let &Some(i) = part {
            attrs.push(format!("fillcolor=\"{}\"", colors(i).1));
        }
        if terminals.contains(&v) {
            attrs.push("shape=doublecircle".into());
        }
        let _ = writeln!(s, "  {v} [{}];", attrs.join(", "));
    }
    for (u, v) in g.edges() {
        match (owner[u], owner[v]) {
            (Some(i), Some(j)) if i == j => {
                let _ = writeln!(s, "  {u} -- {v} [color=\"{}\", penwidth=2];", colors(i).0);
            }
            _ => {
                let _ = writeln!(s, "  {u} -- {v} [color=gray];");
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Renders an engine configuration. Part members get a light tint,
/// reservoir vertices the full part colour, cascade vertices are boxes
/// labelled with their cascade position and rank, and bridges are drawn
/// bold and dashed.
pub fn emit_dot_configuration(cfg: &Configuration<'_>) -> String {
    let g = cfg.graph();
    let ranks = cfg.compute_ranks();
    let mut in_reservoir = vec![false; g.n()];
    for (_, w) in cfg.cascade_vertices() {
        if let Some(res) = ranks.reservoir(w) {
            for v in res.iter() {
                in_reservoir[v] = true;
            }
        }
    }
    let mut position = vec![None; g.n()];
    for cascade in cfg.cascades() {
        for (j, &w) in cascade.iter().enumerate() {
            position[w] = Some(j + 1);
        }
    }
    let mut s = String::from("graph configuration {\n  node [style=filled, fillcolor=white];\n");
    for v in 0..g.n() {
        let mut attrs = Vec::new();
        let mut label = v.to_string();
        if let Some(i) = cfg.part_of(v) {
            let (strong, light) = colors(i);
            let fill = if in_reservoir[v] || i == cfg.grow() { strong } else { light };
            attrs.push(format!("fillcolor=\"{fill}\""));
        }
        if let Some(j) = position[v] {
            let rank = ranks.rank(v).map_or("?".to_string(), |r| r.to_string());
            label = format!("{v}\\nw{j} r{rank}");
            attrs.push("shape=box".into());
        }
        if cfg.terminals().contains(&v) {
            attrs.push("shape=doublecircle".into());
        }
        attrs.insert(0, format!("label=\"{label}\""));
        let _ = writeln!(s, "  {v} [{}];", attrs.join(", "));
    }
    let bridges = cfg.find_bridges(&ranks);
    for (u, v) in g.edges() {
        let bridge = bridges.iter().find(|b| (b.a, b.b) == (u, v) || (b.a, b.b) == (v, u));
        if let Some(b) = bridge {
            let _ = writeln!(s, "  {u} -- {v} [style=\"bold,dashed\", color=black, label=\"rank {}\"];", b.rank);
            continue;
        }
        match (cfg.part_of(u), cfg.part_of(v)) {
            (Some(i), Some(j)) if i == j => {
                let _ = writeln!(s, "  {u} -- {v} [color=\"{}\", penwidth=2];", colors(i).0);
            }
            _ => {
                let _ = writeln!(s, "  {u} -- {v} [color=gray];");
            }
        }
    }
    s.push_str("}\n");
    s
}

fn owners(n: usize, parts: &[VertexSet]) -> Vec<Option<usize>> {
    let mut owner = vec![None; n];
    for (i, part) in parts.iter().enumerate() {
        for v in part.iter().filter(|&v| v < n) {
            owner[v] = Some(i);
        }
    }
    owner
}
