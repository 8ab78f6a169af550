//! A round-synchronous CONGEST simulator with per-edge bandwidth enforcement.
//!
//! Messages sent in round `r` are delivered at the start of round `r + 1`.
//! Node steps within a round run in parallel; results are merged in node-id
//! order, so runs are deterministic.

mod naive_c4;
mod programs;
mod staged;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{id_bits, BitString};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};

pub use naive_c4::{naive_c4_program, NaiveC4};
pub use programs::{CausalityProbe, Flood, OutputOne, Silent};
pub use staged::{Received, StagedLogic, StagedProgram, StagedState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub bandwidth_bits: usize,
    pub max_rounds: usize,
    pub seed: u64,
}

pub const DEFAULT_MAX_ROUNDS: usize = 100_000;

impl SimConfig {
    /// Bandwidth of one edge encoding, `2 * ceil(log2 n)` bits.
    pub fn for_graph(g: &Graph) -> Self {
        SimConfig { bandwidth_bits: 2 * id_bits(g.n()), max_rounds: DEFAULT_MAX_ROUNDS, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bandwidth_bits == 0 {
            return Err(Error::input("bandwidth must be at least one bit"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub src: usize,
    pub dst: usize,
    pub payload: BitString,
}

/// Messages a node queues during one step.
#[derive(Default)]
pub struct Outbox {
    msgs: Vec<(usize, BitString)>,
}

impl Outbox {
    pub fn send(&mut self, dst: usize, payload: BitString) {
        self.msgs.push((dst, payload));
    }

    pub fn broadcast(&mut self, neighbors: &[usize], payload: &BitString) {
        for &w in neighbors {
            self.msgs.push((w, payload.clone()));
        }
    }
}

/// What a node knows about itself and the network.
pub struct NodeContext<'g> {
    pub id: usize,
    pub n: usize,
    pub neighbors: &'g [usize],
    pub bandwidth_bits: usize,
    pub rng: ChaCha8Rng,
}

impl NodeContext<'_> {
    pub fn id_bits(&self) -> usize {
        id_bits(self.n)
    }

    pub fn neighbor_index(&self, w: usize) -> Option<usize> {
        self.neighbors.binary_search(&w).ok()
    }
}

/// A per-node state machine.
///
/// `step` sees the messages delivered this round and may queue at most one
/// message per incident edge. Returning `Some(bit)` fixes the node's output;
/// a node keeps being stepped until every node has an output.
pub trait NodeProgram: Sync {
    type State: Send;

    fn name(&self) -> String;

    fn init(&self, ctx: &mut NodeContext) -> Self::State;

    fn step(
        &self,
        state: &mut Self::State,
        ctx: &mut NodeContext,
        round: usize,
        inbox: &[Message],
        out: &mut Outbox,
    ) -> Option<bool>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub program: String,
    pub n: usize,
    pub bandwidth_bits: usize,
    /// Rounds executed, including the round in which the last node decided.
    pub rounds_used: usize,
    /// Last round in which any message was sent.
    pub message_rounds: usize,
    pub per_round_cut_bits: Vec<u64>,
    pub total_cut_bits: u64,
    pub total_bits: u64,
    pub total_messages: u64,
    pub node_outputs: Vec<Option<bool>>,
    pub timed_out: bool,
}

impl RunStats {
    /// Network decision: yes iff some node output 1.
    pub fn decision(&self) -> bool {
        self.node_outputs.contains(&Some(true))
    }
}

/// A set of nodes simulated together. The whole-network run uses one host;
/// the two-party reduction gives Alice and Bob one each.
pub struct Host<'g, P: NodeProgram> {
    g: &'g Graph,
    prog: &'g P,
    cfg: SimConfig,
    members: Vec<usize>,
    /// Position of each vertex in `members`, `usize::MAX` if hosted elsewhere.
    slot: Vec<usize>,
    ctxs: Vec<NodeContext<'g>>,
    states: Vec<P::State>,
    outputs: Vec<Option<bool>>,
}

impl<'g, P: NodeProgram> Host<'g, P> {
    pub fn new(g: &'g Graph, prog: &'g P, cfg: &SimConfig, members: &VertexSubset) -> Result<Self> {
        cfg.validate()?;
        let members = members.members().to_vec();
        let mut slot = vec![usize::MAX; g.n()];
        for (i, &v) in members.iter().enumerate() {
            if v >= g.n() {
                return Err(Error::input(format!("hosted vertex {v} out of range")));
            }
            slot[v] = i;
        }
        let mut ctxs: Vec<NodeContext<'g>> = members
            .iter()
            .map(|&v| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(v as u64);
                NodeContext { id: v, n: g.n(), neighbors: g.neighbors(v), bandwidth_bits: cfg.bandwidth_bits, rng }
            })
            .collect();
        let states = ctxs.iter_mut().map(|c| prog.init(c)).collect();
        let outputs = vec![None; members.len()];
        Ok(Host { g, prog, cfg: cfg.clone(), members, slot, ctxs, states, outputs })
    }

    pub fn hosts(&self, v: usize) -> bool {
        self.slot.get(v).is_some_and(|&s| s != usize::MAX)
    }

    pub fn all_decided(&self) -> bool {
        self.outputs.iter().all(Option::is_some)
    }

    pub fn outputs(&self) -> impl Iterator<Item = (usize, Option<bool>)> + '_ {
        self.members.iter().copied().zip(self.outputs.iter().copied())
    }

    pub fn into_states(self) -> Vec<(usize, P::State)> {
        self.members.into_iter().zip(self.states).collect()
    }

    /// Runs one round for every hosted node. `incoming` must hold exactly the
    /// messages addressed to hosted nodes that were sent last round.
    /// Returns every message sent, sorted by `(src, dst)`.
    pub fn step_round(&mut self, round: usize, incoming: Vec<Message>) -> Result<Vec<Message>> {
        let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); self.members.len()];
        for m in incoming {
            if !self.hosts(m.dst) {
                return Err(Error::Internal(format!("message for {} delivered to the wrong host", m.dst)));
            }
            inboxes[self.slot[m.dst]].push(m);
        }
        for inbox in &mut inboxes {
            inbox.sort_by_key(|m| m.src);
        }
        let prog = self.prog;
        let results: Vec<(Option<bool>, Outbox)> = self
            .states
            .par_iter_mut()
            .zip(self.ctxs.par_iter_mut())
            .zip(inboxes.par_iter())
            .map(|((state, ctx), inbox)| {
                let mut out = Outbox::default();
                let decided = prog.step(state, ctx, round, inbox, &mut out);
                (decided, out)
            })
            .collect();

        let mut sent = Vec::new();
        for (i, (decided, out)) in results.into_iter().enumerate() {
            let src = self.members[i];
            if let Some(bit) = decided {
                match self.outputs[i] {
                    Some(prev) if prev != bit => {
                        return Err(Error::protocol(format!(
                            "round {round}: node {src} changed its output from {prev} to {bit}"
                        )))
                    }
                    _ => self.outputs[i] = Some(bit),
                }
            }
            let mut msgs = out.msgs;
            msgs.sort_by_key(|(dst, _)| *dst);
            for w in msgs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::protocol(format!(
                        "round {round}: node {src} sent two messages on edge ({src}, {})",
                        w[0].0
                    )));
                }
            }
            for (dst, payload) in msgs {
                if dst >= self.g.n() || !self.g.has_edge(src, dst) {
                    return Err(Error::protocol(format!("round {round}: node {src} sent to non-neighbour {dst}")));
                }
                if payload.len() > self.cfg.bandwidth_bits {
                    return Err(Error::protocol(format!(
                        "round {round}: edge ({src}, {dst}) carries {} bits, bandwidth is {}",
                        payload.len(),
                        self.cfg.bandwidth_bits
                    )));
                }
                sent.push(Message { src, dst, payload });
            }
        }
        Ok(sent)
    }
}

/// Runs `prog` on every node of `g`. With `alice` given, bits crossing
/// between `alice` and its complement are accounted per round.
pub fn run<P: NodeProgram>(g: &Graph, prog: &P, cfg: &SimConfig, alice: Option<&VertexSubset>) -> Result<RunStats> {
    Ok(run_full(g, prog, cfg, alice)?.0)
}

/// Like [`run`], also returning each node's final state, indexed by vertex.
pub fn run_full<P: NodeProgram>(
    g: &Graph,
    prog: &P,
    cfg: &SimConfig,
    alice: Option<&VertexSubset>,
) -> Result<(RunStats, Vec<P::State>)> {
    let everyone = VertexSubset::from_unchecked(0..g.n());
    let mut host = Host::new(g, prog, cfg, &everyone)?;
    let on_alice: Vec<bool> = match alice {
        Some(a) => (0..g.n()).map(|v| a.contains(v)).collect(),
        None => vec![false; g.n()],
    };
    let mut stats = RunStats {
        program: prog.name(),
        n: g.n(),
        bandwidth_bits: cfg.bandwidth_bits,
        rounds_used: 0,
        message_rounds: 0,
        per_round_cut_bits: Vec::new(),
        total_cut_bits: 0,
        total_bits: 0,
        total_messages: 0,
        node_outputs: Vec::new(),
        timed_out: false,
    };
    let mut inflight = Vec::new();
    for round in 1..=cfg.max_rounds {
        let sent = host.step_round(round, std::mem::take(&mut inflight))?;
        let mut cut_bits = 0u64;
        for m in &sent {
            let bits = m.payload.len() as u64;
            stats.total_bits += bits;
            if alice.is_some() && on_alice[m.src] != on_alice[m.dst] {
                cut_bits += bits;
            }
        }
        if !sent.is_empty() {
            stats.message_rounds = round;
        }
        stats.total_messages += sent.len() as u64;
        stats.per_round_cut_bits.push(cut_bits);
        stats.total_cut_bits += cut_bits;
        stats.rounds_used = round;
        inflight = sent;
        if host.all_decided() {
            break;
        }
    }
    stats.timed_out = !host.all_decided();
    stats.node_outputs = host.outputs().map(|(_, o)| o).collect();
    let states = host.into_states().into_iter().map(|(_, s)| s).collect();
    Ok((stats, states))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutBoundCheck {
    pub holds: bool,
    pub measured: u64,
    /// `rounds_used * 2 * cut_size * bandwidth_bits`.
    pub bound: u64,
    pub slack: u64,
}

/// Per round, each cut edge carries at most one message per direction.
pub fn cut_traffic_bound_check(stats: &RunStats, cut_size: usize, cfg: &SimConfig) -> CutBoundCheck {
    let bound = stats.rounds_used as u64 * 2 * cut_size as u64 * cfg.bandwidth_bits as u64;
    CutBoundCheck {
        holds: stats.total_cut_bits <= bound,
        measured: stats.total_cut_bits,
        bound,
        slack: bound.saturating_sub(stats.total_cut_bits),
    }
}
