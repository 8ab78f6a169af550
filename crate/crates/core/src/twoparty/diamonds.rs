//! Induced diamond listing in `O(sqrt(n) |cut| log n)` bits.
//!
//! A boundary vertex `v` of Alice's is heavy when `deg_B(v) > deg_A(v)/sqrt(n)`.
//! Heavy vertices ship their Alice-side edges to Bob; for every light vertex
//! Bob ships the edges inside its Bob-side neighbourhood to Alice.
//!
//! Diamonds with three or more vertices on one side are listed by that side.
//! A 2-2 diamond `{a1, a2, b1, b2}` misses at most one of its four cut edges,
//! so some `a` sees both `b`s. If that `a` is light, Alice learns the status of
//! `b1 b2`; otherwise a heavy `a` exists and Bob learns the status of `a1 a2`.

use std::collections::BTreeSet;

use super::{send_edges, BitBound, Direction, EntryKind, InboxReader, ListingResult, PartyView, Side, Transcript};
use crate::bits::{id_bits, BitString};
use crate::error::Result;
use crate::graph::{Graph, VertexSubset};
use crate::search::list_induced_diamonds;

/// `deg_B^2 * n > deg_A^2`, the squared form of `deg_B > deg_A / sqrt(n)`.
fn is_heavy(deg_a: usize, deg_b: usize, n: usize) -> bool {
    (deg_b as u128).pow(2) * n as u128 > (deg_a as u128).pow(2)
}

pub fn diamond_listing_protocol(g: &Graph, alice: &VertexSubset) -> Result<ListingResult> {
    let n = g.n();
    let a_view = PartyView::new(g, alice, Side::Alice);
    let b_view = PartyView::new(g, alice, Side::Bob);
    let cut = a_view.cut_edges().count();
    let mut t = Transcript::default();
    let mut notes = Vec::new();

    // cut >= n^{3/2}: Alice's whole edge set fits the budget
    let shortcut = (cut as u128).pow(2) >= (n as u128).pow(3) && cut > 0;
    let (a_list, b_list);
    if shortcut {
        notes.push("mode=shortcut".into());
        let all_a: Vec<(usize, usize)> = a_view.internal_edges().collect();
        send_edges(&mut t, Side::Alice, n, &all_a);
        a_list = alice_list(&a_view, t.inbox(Side::Alice), false)?;
        b_list = bob_list(&b_view, t.inbox(Side::Bob), true)?;
    } else {
        notes.push("mode=heavy-light".into());
        // Alice: heavy bitmap over her boundary, then heavy vertices' edges
        let boundary = a_view.boundary();
        let heavy = heavy_set(&a_view, n);
        let bitmap = BitString::from_bools(boundary.iter().map(|v| heavy.contains(v)).collect());
        t.push(0, Direction::AliceToBob, EntryKind::Payload, bitmap);
        let heavy_edges: Vec<(usize, usize)> =
            a_view.internal_edges().filter(|(u, v)| heavy.contains(u) || heavy.contains(v)).collect();
        send_edges(&mut t, Side::Alice, n, &heavy_edges);
        notes.push(format!("heavy={}", heavy.len()));

        // Bob: edges inside N_B(v) for every light boundary vertex v
        let (bitmap, bob_heavy) = {
            let mut r = InboxReader::new(t.inbox(Side::Bob), n);
            let bitmap = r.raw()?;
            let bob_boundary = alice_boundary_seen_by_bob(&b_view);
            let heavy: BTreeSet<usize> =
                bob_boundary.iter().zip(bitmap.as_slice()).filter(|(_, h)| **h).map(|(v, _)| *v).collect();
            (bitmap, heavy)
        };
        debug_assert_eq!(bitmap.len(), boundary.len());
        let squares = light_squares(&b_view, &bob_heavy);
        send_edges(&mut t, Side::Bob, n, &squares);

        a_list = alice_list(&a_view, t.inbox(Side::Alice), true)?;
        b_list = bob_list(&b_view, t.inbox(Side::Bob), false)?;
    }
    let l = id_bits(n) as u64;
    let root = (n as f64).sqrt();
    // 12 * L * sqrt(n) * cut, compared exactly: measured <= B iff measured^2 <= 144 L^2 n cut^2
    let measured = t.payload_bits();
    let exact_ok = (measured as u128).pow(2) <= 144 * (l as u128).pow(2) * n as u128 * (cut as u128).pow(2);
    let bound_value = (12.0 * l as f64 * root * cut as f64).floor() as u64;
    let mut bound = BitBound::new(format!("12 * {l} * sqrt({n}) * {cut}"), bound_value, measured);
    bound.holds = exact_ok;
    Ok(ListingResult { a_list, b_list, transcript: t, bound, notes })
}

fn heavy_set(view: &PartyView, n: usize) -> BTreeSet<usize> {
    let mut deg_a = vec![0usize; n];
    let mut deg_b = vec![0usize; n];
    for (u, v) in view.internal_edges() {
        deg_a[u] += 1;
        deg_a[v] += 1;
    }
    for (mine, _) in view.cut_edges() {
        deg_b[mine] += 1;
    }
    view.boundary().into_iter().filter(|&v| is_heavy(deg_a[v], deg_b[v], n)).collect()
}

/// Alice's boundary as Bob sees it: the Alice endpoints of the cut, ascending.
fn alice_boundary_seen_by_bob(view: &PartyView) -> Vec<usize> {
    view.cut_edges().map(|(_, other)| other).collect::<BTreeSet<_>>().into_iter().collect()
}

fn light_squares(view: &PartyView, heavy: &BTreeSet<usize>) -> Vec<(usize, usize)> {
    let mut nb: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (b, a) in view.cut_edges() {
        nb.entry(a).or_default().push(b);
    }
    let mut out = BTreeSet::new();
    for (a, bs) in &nb {
        if heavy.contains(a) {
            continue;
        }
        for (i, &b1) in bs.iter().enumerate() {
            for &b2 in &bs[i + 1..] {
                let e = (b1.min(b2), b1.max(b2));
                if view.known_edges.contains(&e) {
                    out.insert(e);
                }
            }
        }
    }
    out.into_iter().collect()
}

fn side_count(s: &VertexSubset, view: &PartyView) -> usize {
    s.iter().filter(|&v| view.owns(v)).count()
}

/// Alice's share: diamonds with three or more of her vertices, and 2-2
/// diamonds whose Bob pair lies inside `N_B(a)` for a light vertex `a`.
fn alice_list(
    view: &PartyView,
    inbox: Vec<super::TranscriptEntry>,
    heavy_light: bool,
) -> Result<BTreeSet<VertexSubset>> {
    let n = view.n;
    let squares = if heavy_light { InboxReader::new(inbox, n).edges()? } else { Vec::new() };
    let sandbox = view.graph_with(&squares)?;
    let heavy = heavy_set(view, n);
    let mut certified: BTreeSet<(usize, usize)> = BTreeSet::new();
    if heavy_light {
        let mut nb: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (a, b) in view.cut_edges() {
            nb.entry(a).or_default().push(b);
        }
        for (a, bs) in &nb {
            if heavy.contains(a) {
                continue;
            }
            for (i, &b1) in bs.iter().enumerate() {
                for &b2 in &bs[i + 1..] {
                    certified.insert((b1.min(b2), b1.max(b2)));
                }
            }
        }
    }
    Ok(list_induced_diamonds(&sandbox)?
        .into_iter()
        .filter(|s| match side_count(s, view) {
            3 | 4 => true,
            2 => {
                let bs: Vec<usize> = s.iter().filter(|&v| !view.owns(v)).collect();
                certified.contains(&(bs[0], bs[1]))
            }
            _ => false,
        })
        .collect())
}

/// Bob's share: diamonds with three or more of his vertices, and 2-2 diamonds
/// with a heavy Alice vertex. In shortcut mode he knows the whole graph.
fn bob_list(view: &PartyView, inbox: Vec<super::TranscriptEntry>, knows_all: bool) -> Result<BTreeSet<VertexSubset>> {
    let n = view.n;
    let mut r = InboxReader::new(inbox, n);
    let heavy: BTreeSet<usize>;
    let extra;
    if knows_all {
        extra = r.edges()?;
        heavy = BTreeSet::new();
    } else {
        let bitmap = r.raw()?;
        heavy = alice_boundary_seen_by_bob(view)
            .into_iter()
            .zip(bitmap.as_slice())
            .filter(|(_, h)| **h)
            .map(|(v, _)| v)
            .collect();
        extra = r.edges()?;
    }
    let sandbox = view.graph_with(&extra)?;
    Ok(list_induced_diamonds(&sandbox)?
        .into_iter()
        .filter(|s| {
            knows_all
                || match side_count(s, view) {
                    3 | 4 => true,
                    2 => s.iter().any(|v| heavy.contains(&v)),
                    _ => false,
                }
        })
        .collect())
}
