//! Two parties simulating a CONGEST run on a family instance.
//!
//! Alice hosts `va`, Bob hosts `vb`. Every round each party writes the
//! messages its nodes put on cut edges into the transcript, and the other
//! party decodes them from those bits alone. Per message the framing is a
//! presence bit, the cut-edge index and the payload length; a zero bit ends
//! the round's batch. Each party also sends one control bit per round saying
//! whether all its nodes have decided. At the end Bob sends one answer bit.

use serde::{Deserialize, Serialize};

use super::{BitBound, Direction, EntryKind, Side, Transcript};
use crate::bits::BitString;
use crate::congest::{cut_traffic_bound_check, run, CutBoundCheck, Host, Message, NodeProgram, SimConfig};
use crate::error::{Error, Result};
use crate::families::{FamilyInstance, Predicate};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionResult {
    pub program: String,
    pub family: String,
    /// Alice's answer: 1 when no node on either side detected the pattern.
    pub disj_answer: u8,
    pub expected_disj: u8,
    /// Whether any node output 1.
    pub decision: bool,
    /// The predicate evaluated directly on the graph.
    pub oracle: bool,
    /// `decision == oracle` and `disj_answer == expected_disj`.
    pub valid: bool,
    pub mismatch: Option<String>,
    pub rounds: usize,
    pub timed_out: bool,
    /// Cut bits measured by a plain simulator run with the same partition.
    pub simulator_cut_bits: u64,
    pub transcript: Transcript,
    pub cut_bound: CutBoundCheck,
    /// `transcript payload == simulator_cut_bits`.
    pub payload_matches_simulator: BitBound,
}

/// Wire width of a cut-edge index.
fn index_bits(cut: usize) -> usize {
    (usize::BITS - cut.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Wire width of a payload length in `0..=bandwidth`.
fn length_bits(bandwidth: usize) -> usize {
    (usize::BITS - bandwidth.leading_zeros()).max(1) as usize
}

struct Wire<'a> {
    cut: &'a [(usize, usize)],
    idx_bits: usize,
    len_bits: usize,
}

impl Wire<'_> {
    /// Splits `sent` into the cut messages (encoded) and those staying local.
    fn encode(&self, from: Side, sent: Vec<Message>) -> Result<(BitString, BitString, Vec<Message>)> {
        let mut framing = BitString::new();
        let mut payload = BitString::new();
        let mut local = Vec::new();
        for m in sent {
            let key = match from {
                Side::Alice => (m.src, m.dst),
                Side::Bob => (m.dst, m.src),
            };
            match self.cut.binary_search(&key) {
                Ok(i) => {
                    framing.push(true);
                    framing.push_uint(i as u64, self.idx_bits);
                    framing.push_uint(m.payload.len() as u64, self.len_bits);
                    payload.extend(&m.payload);
                }
                Err(_) => local.push(m),
            }
        }
        framing.push(false);
        Ok((framing, payload, local))
    }

    fn decode(&self, to: Side, framing: &BitString, payload: &BitString) -> Result<Vec<Message>> {
        let mut out = Vec::new();
        let (mut f, mut p) = (0, 0);
        loop {
            if f >= framing.len() {
                return Err(Error::protocol("framing batch is not terminated"));
            }
            if !framing.get(f) {
                break;
            }
            let i = framing.read_uint(f + 1, self.idx_bits)? as usize;
            let len = framing.read_uint(f + 1 + self.idx_bits, self.len_bits)? as usize;
            f += 1 + self.idx_bits + self.len_bits;
            let &(a, b) = self.cut.get(i).ok_or_else(|| Error::protocol(format!("cut index {i} out of range")))?;
            if p + len > payload.len() {
                return Err(Error::protocol("payload shorter than its framing claims"));
            }
            let bits = BitString::from_bools(payload.as_slice()[p..p + len].to_vec());
            p += len;
            let (src, dst) = match to {
                Side::Bob => (a, b),
                Side::Alice => (b, a),
            };
            out.push(Message { src, dst, payload: bits });
        }
        if p != payload.len() {
            return Err(Error::protocol("payload longer than its framing claims"));
        }
        Ok(out)
    }
}

pub fn congest_reduction<P: NodeProgram>(
    inst: &FamilyInstance,
    prog: &P,
    cfg: &SimConfig,
    oracle: &Predicate,
) -> Result<ReductionResult> {
    let g = &inst.graph;
    let wire =
        Wire { cut: &inst.cut_edges, idx_bits: index_bits(inst.cut_size()), len_bits: length_bits(cfg.bandwidth_bits) };
    let mut alice = Host::new(g, prog, cfg, &inst.va)?;
    let mut bob = Host::new(g, prog, cfg, &inst.vb)?;
    let mut t = Transcript::default();
    let (mut to_alice, mut to_bob) = (Vec::new(), Vec::new());
    let mut rounds = 0;
    let mut finished = false;
    for round in 1..=cfg.max_rounds {
        rounds = round;
        let a_sent = alice.step_round(round, std::mem::take(&mut to_alice))?;
        let b_sent = bob.step_round(round, std::mem::take(&mut to_bob))?;
        let (af, ap, a_local) = wire.encode(Side::Alice, a_sent)?;
        let (bf, bp, b_local) = wire.encode(Side::Bob, b_sent)?;
        t.push(round, Direction::AliceToBob, EntryKind::Framing, af.clone());
        t.push(round, Direction::AliceToBob, EntryKind::Payload, ap.clone());
        t.push(round, Direction::BobToAlice, EntryKind::Framing, bf.clone());
        t.push(round, Direction::BobToAlice, EntryKind::Payload, bp.clone());
        let (a_done, b_done) = (alice.all_decided(), bob.all_decided());
        t.push(round, Direction::AliceToBob, EntryKind::Control, BitString::from_bools(vec![a_done]));
        t.push(round, Direction::BobToAlice, EntryKind::Control, BitString::from_bools(vec![b_done]));
        to_alice = a_local;
        to_alice.extend(wire.decode(Side::Alice, &bf, &bp)?);
        to_bob = b_local;
        to_bob.extend(wire.decode(Side::Bob, &af, &ap)?);
        if a_done && b_done {
            finished = true;
            break;
        }
    }
    let bob_bit = bob.outputs().any(|(_, o)| o == Some(true));
    t.push(rounds, Direction::BobToAlice, EntryKind::Answer, BitString::from_bools(vec![bob_bit]));
    let decision = bob_bit || alice.outputs().any(|(_, o)| o == Some(true));
    let disj_answer = u8::from(!decision);

    let expected_disj = crate::graph::disj(&inst.inputs.x, &inst.inputs.y)?;
    let oracle_holds = oracle.witness(inst)?.is_some();
    let stats = run(g, prog, cfg, Some(&inst.va))?;
    let mut mismatch = Vec::new();
    if decision != oracle_holds {
        mismatch.push(format!("program decided {decision}, predicate oracle says {oracle_holds}"));
    }
    if disj_answer != expected_disj {
        mismatch.push(format!("disj answer {disj_answer}, expected {expected_disj}"));
    }
    if !finished {
        mismatch.push(format!("not every node decided within {} rounds", cfg.max_rounds));
    }
    let payload_matches_simulator =
        BitBound::new("payload == simulator cut bits".into(), stats.total_cut_bits, t.payload_bits());
    let cut_bound = cut_traffic_bound_check(&stats, inst.cut_size(), cfg);
    Ok(ReductionResult {
        program: prog.name(),
        family: inst.tag.name(),
        disj_answer,
        expected_disj,
        decision,
        oracle: oracle_holds,
        valid: mismatch.is_empty(),
        mismatch: (!mismatch.is_empty()).then(|| mismatch.join("; ")),
        rounds,
        timed_out: !finished,
        simulator_cut_bits: stats.total_cut_bits,
        transcript: t,
        cut_bound,
        payload_matches_simulator,
    })
}
