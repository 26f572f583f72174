//! Connected k-partitions of k-connected graphs.
//!
//! Given a k-connected graph, k distinct terminals and k positive sizes, the
//! solver finds disjoint connected parts of exactly those sizes, each holding
//! its terminal. It grows one part by one vertex at a time. Each step runs a
//! local-improvement engine over cascades of separating vertices, their
//! reservoirs and ranks, guided by a lexicographic potential. When the
//! engine runs out of moves it returns a vertex cut of size `k − 1`, which
//! shows the input was not k-connected.
//!
//! The [`oracle`] module holds exhaustive checkers that share no code with
//! the engine.

pub mod config;
pub mod connectivity;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod moves;
pub mod oracle;
pub mod solver;
pub mod trace;

pub use config::{compare_potential, Bridge, Configuration, PotentialVector, Problem, Rank, RankTable};
pub use connectivity::{vertex_connectivity_at_least, Connectivity};
pub use error::{Error, Result};
pub use graph::{CutWitness, Graph, Vertex, VertexSet};
pub use moves::{Move, MoveKind};
pub use oracle::{brute_force_connectivity, brute_force_partition, verify_partition, verify_targets, VerifyReport};
pub use solver::{augment_once, solve, Augmentation, Partition, SolveFailure, SolveOptions, SolveReport};
pub use trace::{NoTrace, TraceEvent, TraceSink};
