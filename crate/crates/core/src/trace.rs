//! Per-move trace records and the sinks that receive them.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{Bridge, PotentialVector, Rank};
use crate::moves::MoveKind;

/// How `potential_after` compares with `potential_before`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for Comparison {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }
}

/// One applied move. Fields are declared in key order so the JSON form is
/// canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEvent {
    pub augmentation: usize,
    pub bridge: Option<Bridge>,
    pub comparison: Comparison,
    pub grow: usize,
    pub kind: MoveKind,
    pub min_bridge_rank_after: Option<Rank>,
    pub part_sizes: Vec<usize>,
    /// Empty after a terminal move: cascades are reset.
    pub potential_after: PotentialVector,
    pub potential_before: PotentialVector,
    pub rank: Option<Rank>,
    pub step: usize,
    pub valid_after: bool,
}

pub trait TraceSink {
    fn emit(&mut self, event: TraceEvent);
}

/// Discards every event.
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn emit(&mut self, _: TraceEvent) {}
}

impl TraceSink for Vec<TraceEvent> {
    fn emit(&mut self, event: TraceEvent) {
        self.push(event);
    }
}

/// Writes one JSON object per line. The first write error is kept and
/// later events are dropped.
pub struct JsonLines<W: Write> {
    out: W,
    error: Option<std::io::Error>,
}

impl<W: Write> JsonLines<W> {
    pub fn new(out: W) -> Self {
        JsonLines { out, error: None }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> TraceSink for JsonLines<W> {
    fn emit(&mut self, event: TraceEvent) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = writeln!(self.out, "{}", crate::io::emit_trace_event(&event)) {
            self.error = Some(e);
        }
    }
}
