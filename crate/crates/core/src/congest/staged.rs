//! Stage-by-stage streaming of integer lists between neighbours.
//!
//! In every stage a node sends each neighbour a stream: a `2 * id_bits(n)`-bit
//! item count followed by the items, one item per message. Streams are sent on
//! every edge even when empty. A node computes its stage-`s` streams only after
//! every neighbour's streams for all earlier stages have fully arrived.

use std::collections::VecDeque;

use super::{Message, NodeContext, NodeProgram, Outbox};
use crate::bits::BitString;

/// Streams received so far: `items[stage][neighbour position]`.
#[derive(Clone, Debug, Default)]
pub struct Received {
    pub items: Vec<Vec<Vec<u64>>>,
}

impl Received {
    pub fn stage(&self, s: usize) -> &[Vec<u64>] {
        &self.items[s]
    }

    pub fn from_neighbor(&self, s: usize, pos: usize) -> &[u64] {
        &self.items[s][pos]
    }
}

pub trait StagedLogic: Sync {
    type Local: Send;

    fn name(&self) -> String;

    fn stages(&self) -> usize;

    /// Bit width of one item in stage `s`; must fit the bandwidth.
    fn item_bits(&self, stage: usize, ctx: &NodeContext) -> usize;

    fn init(&self, ctx: &NodeContext) -> Self::Local;

    /// Items for each neighbour (by position in `ctx.neighbors`) in `stage`.
    /// `received` holds complete streams for all earlier stages.
    fn emit(&self, local: &mut Self::Local, ctx: &NodeContext, stage: usize, received: &Received) -> Vec<Vec<u64>>;

    /// Called once every stage has been fully received; returns the node's output.
    fn finish(&self, local: &mut Self::Local, ctx: &NodeContext, received: &Received) -> bool;
}

pub struct StagedProgram<L>(pub L);

/// Parser for one incoming edge.
#[derive(Clone, Debug, Default)]
struct Incoming {
    stage: usize,
    remaining: Option<u64>,
}

pub struct StagedState<L> {
    pub local: L,
    pub received: Received,
    incoming: Vec<Incoming>,
    queues: Vec<VecDeque<BitString>>,
    next_stage: usize,
    output: Option<bool>,
    pub protocol_errors: Vec<String>,
}

fn header_bits(ctx: &NodeContext) -> usize {
    2 * ctx.id_bits()
}

impl<L: StagedLogic> StagedProgram<L> {
    fn stage_received(&self, st: &StagedState<L::Local>, s: usize) -> bool {
        st.incoming.iter().all(|inc| inc.stage > s)
    }
}

impl<L: StagedLogic> NodeProgram for StagedProgram<L> {
    type State = StagedState<L::Local>;

    fn name(&self) -> String {
        self.0.name()
    }

    fn init(&self, ctx: &mut NodeContext) -> Self::State {
        let d = ctx.neighbors.len();
        StagedState {
            local: self.0.init(ctx),
            received: Received { items: vec![vec![Vec::new(); d]; self.0.stages()] },
            incoming: vec![Incoming::default(); d],
            queues: vec![VecDeque::new(); d],
            next_stage: 0,
            output: None,
            protocol_errors: Vec::new(),
        }
    }

    fn step(
        &self,
        st: &mut Self::State,
        ctx: &mut NodeContext,
        _round: usize,
        inbox: &[Message],
        out: &mut Outbox,
    ) -> Option<bool> {
        let stages = self.0.stages();
        for m in inbox {
            let pos = ctx.neighbor_index(m.src).expect("message from a neighbour");
            let inc = &mut st.incoming[pos];
            if inc.stage >= stages {
                st.protocol_errors.push(format!("extra message from {}", m.src));
                continue;
            }
            match inc.remaining {
                None => {
                    let k = m.payload.read_uint(0, header_bits(ctx)).unwrap_or(0);
                    inc.remaining = Some(k);
                }
                Some(_) => {
                    let w = self.0.item_bits(inc.stage, ctx);
                    let item = m.payload.read_uint(0, w).unwrap_or(0);
                    st.received.items[inc.stage][pos].push(item);
                    *inc.remaining.as_mut().unwrap() -= 1;
                }
            }
            if inc.remaining == Some(0) {
                inc.stage += 1;
                inc.remaining = None;
            }
        }

        let own_sent = st.queues.iter().all(VecDeque::is_empty);
        if own_sent && st.next_stage < stages && (st.next_stage == 0 || self.stage_received(st, st.next_stage - 1)) {
            let s = st.next_stage;
            let lists = self.0.emit(&mut st.local, ctx, s, &st.received);
            assert_eq!(lists.len(), ctx.neighbors.len(), "one list per neighbour");
            let w = self.0.item_bits(s, ctx);
            let hb = header_bits(ctx);
            for (q, items) in st.queues.iter_mut().zip(lists) {
                if hb < 64 && items.len() as u64 >= 1u64 << hb {
                    st.protocol_errors.push(format!("stream of {} items overflows the header", items.len()));
                }
                q.push_back(BitString::from_uint(hb, items.len() as u64));
                for it in items {
                    q.push_back(BitString::from_uint(w, it));
                }
            }
            st.next_stage += 1;
        }
        for (q, &w) in st.queues.iter_mut().zip(ctx.neighbors) {
            if let Some(msg) = q.pop_front() {
                out.send(w, msg);
            }
        }
        if st.output.is_none() && stages > 0 && self.stage_received(st, stages - 1) && st.next_stage == stages {
            st.output = Some(self.0.finish(&mut st.local, ctx, &st.received));
        }
        if stages == 0 && st.output.is_none() {
            st.output = Some(self.0.finish(&mut st.local, ctx, &st.received));
        }
        st.output
    }
}
