//! Induced `C_k` listing for `k <= 7` in `O(n |cut| log n)` bits.
//!
//! Each party sends the internal edges touching its boundary. A cycle with
//! at least `ceil(k/2)` of its vertices on Alice's side has at most three on
//! Bob's, and every pair among those touches Bob's boundary, so Alice learns
//! every edge that decides whether the set is an induced cycle.

use std::collections::BTreeSet;

use super::{send_edges, BitBound, InboxReader, ListingResult, PartyView, Side, Transcript};
use crate::bits::id_bits;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::search::list_induced_cycles;

fn boundary_edges(view: &PartyView) -> Vec<(usize, usize)> {
    let boundary: BTreeSet<usize> = view.boundary().into_iter().collect();
    view.internal_edges().filter(|(u, v)| boundary.contains(u) || boundary.contains(v)).collect()
}

/// Lists induced `k`-cycles in the party's sandbox graph and keeps those it is
/// responsible for: Alice takes `>= ceil(k/2)` own vertices, Bob the rest.
fn party_list(view: &PartyView, inbox: Vec<super::TranscriptEntry>, k: usize) -> Result<BTreeSet<VertexSubset>> {
    let received = InboxReader::new(inbox, view.n).edges()?;
    let sandbox = view.graph_with(&received)?;
    let alice_share = k.div_ceil(2);
    let found = list_induced_cycles(&sandbox, k)?;
    Ok(found
        .into_iter()
        .filter(|c| {
            let own = c.iter().filter(|&v| view.owns(v)).count();
            match view.side {
                Side::Alice => own >= alice_share,
                Side::Bob => k - own < alice_share,
            }
        })
        .collect())
}

pub fn cycle_listing_protocol(g: &Graph, alice: &VertexSubset, k: usize) -> Result<ListingResult> {
    if k < 3 {
        return Err(Error::input(format!("cycle length must be at least 3, got {k}")));
    }
    if k > 7 {
        return Err(Error::Unsupported(format!(
            "cycle listing protocol needs k <= 7 (k = {k}): a cycle may then have four or more vertices on the minority side"
        )));
    }
    let a_view = PartyView::new(g, alice, Side::Alice);
    let b_view = PartyView::new(g, alice, Side::Bob);
    let mut t = Transcript::default();
    send_edges(&mut t, Side::Bob, g.n(), &boundary_edges(&b_view));
    send_edges(&mut t, Side::Alice, g.n(), &boundary_edges(&a_view));

    let a_list = party_list(&a_view, t.inbox(Side::Alice), k)?;
    let b_list = party_list(&b_view, t.inbox(Side::Bob), k)?;
    let cut = a_view.cut_edges().count() as u64;
    let l = id_bits(g.n()) as u64;
    let bound = BitBound::new(format!("4 * {l} * {} * {cut}", g.n()), 4 * l * g.n() as u64 * cut, t.payload_bits());
    Ok(ListingResult { a_list, b_list, transcript: t, bound, notes: vec![format!("k={k}")] })
}
