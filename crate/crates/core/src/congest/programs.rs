//! Small reference programs used to exercise the engine.

use super::{Message, NodeContext, NodeProgram, Outbox};
use crate::bits::BitString;

/// Every node outputs 1 in round 1 without sending anything.
pub struct OutputOne;

impl NodeProgram for OutputOne {
    type State = ();

    fn name(&self) -> String {
        "output-one".into()
    }

    fn init(&self, _: &mut NodeContext) {}

    fn step(&self, _: &mut (), _: &mut NodeContext, _: usize, _: &[Message], _: &mut Outbox) -> Option<bool> {
        Some(true)
    }
}

/// Every node outputs 0 in round 1 without sending anything.
pub struct Silent;

impl NodeProgram for Silent {
    type State = ();

    fn name(&self) -> String {
        "silent".into()
    }

    fn init(&self, _: &mut NodeContext) {}

    fn step(&self, _: &mut (), _: &mut NodeContext, _: usize, _: &[Message], _: &mut Outbox) -> Option<bool> {
        Some(false)
    }
}

/// A one-bit token spreads from `source`; each node outputs 1 once it holds
/// the token and forwards it to the neighbours it did not hear it from.
pub struct Flood {
    pub source: usize,
}

impl NodeProgram for Flood {
    /// Round in which the token arrived.
    type State = Option<usize>;

    fn name(&self) -> String {
        format!("flood(source={})", self.source)
    }

    fn init(&self, _: &mut NodeContext) -> Option<usize> {
        None
    }

    fn step(
        &self,
        state: &mut Option<usize>,
        ctx: &mut NodeContext,
        round: usize,
        inbox: &[Message],
        out: &mut Outbox,
    ) -> Option<bool> {
        if state.is_none() && (ctx.id == self.source || !inbox.is_empty()) {
            *state = Some(round);
            let token = BitString::from_bools(vec![true]);
            for &w in ctx.neighbors {
                if inbox.iter().all(|m| m.src != w) {
                    out.send(w, token.clone());
                }
            }
        }
        state.map(|_| true)
    }
}

/// Flood that carries the sender's hop count, so every receiver can check
/// that a message sent in round `r` shows up in round `r + 1` and no earlier.
pub struct CausalityProbe {
    pub source: usize,
}

#[derive(Clone, Debug, Default)]
pub struct ProbeState {
    pub hops: Option<usize>,
    pub heard_at: Option<usize>,
    pub violations: usize,
}

impl NodeProgram for CausalityProbe {
    type State = ProbeState;

    fn name(&self) -> String {
        format!("causality-probe(source={})", self.source)
    }

    fn init(&self, _: &mut NodeContext) -> ProbeState {
        ProbeState::default()
    }

    fn step(
        &self,
        state: &mut ProbeState,
        ctx: &mut NodeContext,
        round: usize,
        inbox: &[Message],
        out: &mut Outbox,
    ) -> Option<bool> {
        for m in inbox {
            let sender_hops = m.payload.read_uint(0, ctx.id_bits()).unwrap_or(u64::MAX) as usize;
            // the sender learned in round sender_hops + 1 and sent right away
            if round != sender_hops + 2 {
                state.violations += 1;
            }
        }
        if state.hops.is_none() && (ctx.id == self.source || !inbox.is_empty()) {
            let hops = if ctx.id == self.source {
                0
            } else {
                inbox.iter().map(|m| m.payload.read_uint(0, ctx.id_bits()).unwrap() as usize).min().unwrap() + 1
            };
            state.hops = Some(hops);
            state.heard_at = Some(round);
            let payload = BitString::from_uint(ctx.id_bits(), hops as u64);
            for &w in ctx.neighbors {
                if inbox.iter().all(|m| m.src != w) {
                    out.send(w, payload.clone());
                }
            }
        }
        state.hops.map(|_| state.violations == 0)
    }
}
