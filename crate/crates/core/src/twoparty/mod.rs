//! The vertex-partition two-party model: each party sees its own side's
//! internal edges plus the cut, and everything else must be sent.

mod cycles;
mod diamonds;
mod limitation;
mod reduction;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::{id_bits, BitString};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};

pub use cycles::cycle_listing_protocol;
pub use diamonds::diamond_listing_protocol;
pub use limitation::{limitation_bound_report, LimitationReport, Target};
pub use reduction::{congest_reduction, ReductionResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alice,
    Bob,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alice => Side::Bob,
            Side::Bob => Side::Alice,
        }
    }
}

/// One party's input: its vertices, and its internal plus cut edges.
#[derive(Clone, Debug)]
pub struct PartyView {
    pub side: Side,
    pub n: usize,
    pub own: VertexSubset,
    /// `(u, v)` with `u < v`.
    pub known_edges: BTreeSet<(usize, usize)>,
}

impl PartyView {
    pub fn new(g: &Graph, alice: &VertexSubset, side: Side) -> Self {
        let on_alice: Vec<bool> = (0..g.n()).map(|v| alice.contains(v)).collect();
        let mine = |v: usize| on_alice[v] == (side == Side::Alice);
        let own = VertexSubset::from_unchecked((0..g.n()).filter(|&v| mine(v)));
        let known_edges = g.edges().filter(|&(u, v)| mine(u) || mine(v)).collect();
        PartyView { side, n: g.n(), own, known_edges }
    }

    pub fn owns(&self, v: usize) -> bool {
        self.own.contains(v)
    }

    /// Own-side vertices with at least one cut edge.
    pub fn boundary(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.cut_edges().map(|(mine, _)| mine).collect::<BTreeSet<_>>().into_iter().collect();
        b.sort_unstable();
        b
    }

    /// Cut edges as `(own endpoint, other endpoint)`.
    pub fn cut_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.known_edges.iter().filter_map(|&(u, v)| match (self.owns(u), self.owns(v)) {
            (true, false) => Some((u, v)),
            (false, true) => Some((v, u)),
            _ => None,
        })
    }

    pub fn internal_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.known_edges.iter().copied().filter(|&(u, v)| self.owns(u) && self.owns(v))
    }

    /// The graph of known edges plus `extra`.
    pub fn graph_with(&self, extra: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(self.n);
        for &(u, v) in self.known_edges.iter().chain(extra) {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn from(side: Side) -> Self {
        match side {
            Side::Alice => Direction::AliceToBob,
            Side::Bob => Direction::BobToAlice,
        }
    }

    pub fn receiver(self) -> Side {
        match self {
            Direction::AliceToBob => Side::Bob,
            Direction::BobToAlice => Side::Alice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Counted against the protocol's bit bound.
    Payload,
    /// Length headers and cut-edge addressing, reported separately.
    Framing,
    /// Per-round "still running" flags in the reduction.
    Control,
    /// The final answer bit.
    Answer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub direction: Direction,
    pub kind: EntryKind,
    pub bits: BitString,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    #[serde(skip)]
    pub entries: Vec<TranscriptEntry>,
    pub bits_a_to_b: u64,
    pub bits_b_to_a: u64,
    pub framing_a_to_b: u64,
    pub framing_b_to_a: u64,
    pub control_bits: u64,
    pub answer_bits: u64,
}

impl Transcript {
    pub fn push(&mut self, round: usize, direction: Direction, kind: EntryKind, bits: BitString) {
        let len = bits.len() as u64;
        match (kind, direction) {
            (EntryKind::Payload, Direction::AliceToBob) => self.bits_a_to_b += len,
            (EntryKind::Payload, Direction::BobToAlice) => self.bits_b_to_a += len,
            (EntryKind::Framing, Direction::AliceToBob) => self.framing_a_to_b += len,
            (EntryKind::Framing, Direction::BobToAlice) => self.framing_b_to_a += len,
            (EntryKind::Control, _) => self.control_bits += len,
            (EntryKind::Answer, _) => self.answer_bits += len,
        }
        self.entries.push(TranscriptEntry { round, direction, kind, bits });
    }

    pub fn payload_bits(&self) -> u64 {
        self.bits_a_to_b + self.bits_b_to_a
    }

    pub fn framing_bits(&self) -> u64 {
        self.framing_a_to_b + self.framing_b_to_a
    }

    /// Entries addressed to `side`, in order.
    pub fn inbox(&self, side: Side) -> Vec<TranscriptEntry> {
        self.entries.iter().filter(|e| e.direction.receiver() == side).cloned().collect()
    }

    /// Recomputes the counters from the entries.
    pub fn counters_consistent(&self) -> bool {
        let mut fresh = Transcript::default();
        for e in &self.entries {
            fresh.push(e.round, e.direction, e.kind, e.bits.clone());
        }
        fresh.entries.clear();
        let mut me = self.clone();
        me.entries.clear();
        fresh == me
    }
}

/// Sends an edge batch: a `2L`-bit count as framing, then `2L` bits per edge as payload.
pub(crate) fn send_edges(t: &mut Transcript, from: Side, n: usize, edges: &[(usize, usize)]) {
    let l = id_bits(n);
    let dir = Direction::from(from);
    t.push(0, dir, EntryKind::Framing, BitString::from_uint(2 * l, edges.len() as u64));
    let mut payload = BitString::new();
    for &(u, v) in edges {
        payload.push_uint(u as u64, l);
        payload.push_uint(v as u64, l);
    }
    t.push(0, dir, EntryKind::Payload, payload);
}

/// Reads batches back from a party's inbox, in order. Each batch is a framing
/// entry followed by a payload entry.
pub(crate) struct InboxReader {
    entries: std::vec::IntoIter<TranscriptEntry>,
    n: usize,
}

impl InboxReader {
    pub(crate) fn new(entries: Vec<TranscriptEntry>, n: usize) -> Self {
        InboxReader { entries: entries.into_iter(), n }
    }

    fn next_of(&mut self, kind: EntryKind) -> Result<BitString> {
        match self.entries.next() {
            Some(e) if e.kind == kind => Ok(e.bits),
            other => Err(Error::protocol(format!("expected {kind:?} entry, got {other:?}"))),
        }
    }

    pub(crate) fn edges(&mut self) -> Result<Vec<(usize, usize)>> {
        let l = id_bits(self.n);
        let count = self.next_of(EntryKind::Framing)?.read_uint(0, 2 * l)? as usize;
        let payload = self.next_of(EntryKind::Payload)?;
        if payload.len() != count * 2 * l {
            return Err(Error::protocol("edge batch length disagrees with its header"));
        }
        (0..count)
            .map(|i| {
                let u = payload.read_uint(2 * l * i, l)? as usize;
                let v = payload.read_uint(2 * l * i + l, l)? as usize;
                if u >= self.n || v >= self.n || u == v {
                    return Err(Error::protocol(format!("bad edge ({u}, {v}) on the wire")));
                }
                Ok((u.min(v), u.max(v)))
            })
            .collect()
    }

    pub(crate) fn raw(&mut self) -> Result<BitString> {
        self.next_of(EntryKind::Payload)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitBound {
    pub formula: String,
    pub bound: u64,
    pub measured: u64,
    pub holds: bool,
    pub slack: i128,
}

impl BitBound {
    fn new(formula: String, bound: u64, measured: u64) -> Self {
        BitBound { formula, bound, measured, holds: measured <= bound, slack: bound as i128 - measured as i128 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ListingResult {
    pub a_list: BTreeSet<VertexSubset>,
    pub b_list: BTreeSet<VertexSubset>,
    pub transcript: Transcript,
    pub bound: BitBound,
    /// Extra protocol facts (mode, heavy count, ...).
    pub notes: Vec<String>,
}

impl ListingResult {
    pub fn union(&self) -> BTreeSet<VertexSubset> {
        self.a_list.union(&self.b_list).cloned().collect()
    }
}
