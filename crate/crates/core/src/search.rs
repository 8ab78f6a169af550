//! Exact listing of induced cycles and induced diamonds.
//!
//! Each listing has a pruned entry point and a naive one that enumerates every
//! vertex subset. The naive versions exist to cross-check the pruned ones.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::graph::{is_induced_cycle, Graph, VertexSubset};

pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;
pub const WORK_BUDGET_ENV: &str = "INDUCED_WORK_BUDGET";

/// The global work budget, overridable through `INDUCED_WORK_BUDGET`.
pub fn work_budget() -> u64 {
    std::env::var(WORK_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(DEFAULT_WORK_BUDGET)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn check_estimate(what: &str, estimate: u128, budget: u64) -> Result<()> {
    if estimate > budget as u128 {
        return Err(Error::Budget { what: what.into(), estimate, budget });
    }
    Ok(())
}

pub fn list_induced_cycles(g: &Graph, k: usize) -> Result<BTreeSet<VertexSubset>> {
    list_induced_cycles_with_budget(g, k, work_budget())
}

/// Pruned search: grows chordless paths from each start vertex.
///
/// The start is the minimum vertex of the cycle and the second vertex is
/// smaller than the last one, so each cycle is produced exactly once.
pub fn list_induced_cycles_with_budget(g: &Graph, k: usize, budget: u64) -> Result<BTreeSet<VertexSubset>> {
    let found = std::sync::Mutex::new(BTreeSet::new());
    cycle_search(g, k, budget, |c| {
        found.lock().unwrap().insert(VertexSubset::from_unchecked(c.iter().copied()));
        true
    })?;
    Ok(found.into_inner().unwrap())
}

/// Stops at the first induced `C_k`.
pub fn has_induced_cycle(g: &Graph, k: usize) -> Result<bool> {
    let hit = AtomicBool::new(false);
    cycle_search(g, k, work_budget(), |_| {
        hit.store(true, Ordering::Relaxed);
        false
    })?;
    Ok(hit.into_inner())
}

/// Returns one induced `C_k` in cycle order, if any.
pub fn find_induced_cycle(g: &Graph, k: usize) -> Result<Option<Vec<usize>>> {
    let first = std::sync::Mutex::new(None::<Vec<usize>>);
    cycle_search(g, k, work_budget(), |c| {
        let mut slot = first.lock().unwrap();
        if slot.as_ref().is_none_or(|f| c < f.as_slice()) {
            *slot = Some(c.to_vec());
        }
        false
    })?;
    Ok(first.into_inner().unwrap())
}

struct Search<'a, F> {
    g: &'a Graph,
    k: usize,
    budget: u64,
    work: &'a AtomicU64,
    stop: &'a AtomicBool,
    emit: &'a F,
}

fn cycle_search<F>(g: &Graph, k: usize, budget: u64, emit: F) -> Result<()>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    if k < 3 {
        return Err(Error::input(format!("cycle length must be at least 3, got {k}")));
    }
    let work = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let ctx = Search { g, k, budget, work: &work, stop: &stop, emit: &emit };
    let n = g.n();
    if k > n {
        return Ok(());
    }
    (0..n).into_par_iter().try_for_each(|s| ctx.search_from(s))?;
    Ok(())
}

impl<F> Search<'_, F>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    fn tick(&self) -> Result<()> {
        let w = self.work.fetch_add(1, Ordering::Relaxed) + 1;
        if w > self.budget {
            return Err(Error::Budget {
                what: format!("pruned induced C_{} search", self.k),
                estimate: w as u128,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn search_from(&self, s: usize) -> Result<()> {
        if self.stop.load(Ordering::Relaxed) {
            return Ok(());
        }
        let g = self.g;
        let mut allowed = Bitset::full(g.n());
        allowed.clear_below(s + 1);
        // distances to s inside G[{v >= s}]; a lower bound on any closing path
        let dist = restricted_distances(g, s);
        let mut path = vec![s];
        let blocked = Bitset::new(g.n());
        self.extend(&mut path, &allowed, &blocked, &dist)
    }

    fn extend(&self, path: &mut Vec<usize>, allowed: &Bitset, blocked: &Bitset, dist: &[usize]) -> Result<()> {
        if self.stop.load(Ordering::Relaxed) {
            return Ok(());
        }
        self.tick()?;
        let g = self.g;
        let t = path.len();
        let last = path[t - 1];
        let v0 = path[0];
        let mut cand = g.neighbor_set(last).clone();
        cand.intersect_with(allowed);
        cand.difference_with(blocked);
        if t == self.k - 1 {
            cand.intersect_with(g.neighbor_set(v0));
            let v1 = path[1];
            for w in cand.iter().filter(|&w| w > v1) {
                path.push(w);
                let keep_going = (self.emit)(path);
                path.pop();
                if !keep_going {
                    self.stop.store(true, Ordering::Relaxed);
                    return Ok(());
                }
            }
            return Ok(());
        }
        if t >= 2 {
            cand.difference_with(g.neighbor_set(v0));
        }
        // blocked for the child: closed neighbourhood of `last`, except that
        // v0 stays reachable through its own exception at the final step
        let mut child_blocked = blocked.clone();
        if t >= 2 {
            child_blocked.union_with(g.neighbor_set(last));
            child_blocked.insert(last);
        } else {
            child_blocked.insert(v0);
        }
        for w in cand.iter() {
            // after w, k - t - 1 more vertices, then the closing edge
            if dist[w] > self.k - t {
                continue;
            }
            path.push(w);
            let r = self.extend(path, allowed, &child_blocked, dist);
            path.pop();
            r?;
        }
        Ok(())
    }
}

fn restricted_distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if v > s && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Naive oracle: checks every `k`-subset.
pub fn list_induced_cycles_naive(g: &Graph, k: usize) -> Result<BTreeSet<VertexSubset>> {
    if k < 3 {
        return Err(Error::input(format!("cycle length must be at least 3, got {k}")));
    }
    check_estimate(&format!("naive {k}-subset enumeration"), binomial(g.n() as u128, k as u128), work_budget())?;
    let mut out = BTreeSet::new();
    for_each_subset(g.n(), k, |s| {
        let sub = VertexSubset::from_unchecked(s.iter().copied());
        if is_induced_cycle(g, &sub, k).unwrap() {
            out.insert(sub);
        }
    });
    Ok(out)
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All triangles, via common-neighbour intersection.
pub fn list_triangles(g: &Graph) -> BTreeSet<VertexSubset> {
    let mut out = BTreeSet::new();
    for (u, v) in g.edges() {
        let mut common = g.neighbor_set(u).clone();
        common.intersect_with(g.neighbor_set(v));
        common.clear_below(v + 1);
        for w in common.iter() {
            out.insert(VertexSubset::from_unchecked([u, v, w]));
        }
    }
    out
}

pub fn list_induced_diamonds(g: &Graph) -> Result<BTreeSet<VertexSubset>> {
    list_induced_diamonds_with_budget(g, work_budget())
}

/// Every induced diamond has exactly one chord `uv`, whose endpoints are the
/// two degree-3 vertices. So: for each edge, pair up non-adjacent common
/// neighbours.
pub fn list_induced_diamonds_with_budget(g: &Graph, budget: u64) -> Result<BTreeSet<VertexSubset>> {
    let commons: Vec<(usize, usize, Vec<usize>)> = g
        .edges()
        .map(|(u, v)| {
            let mut c = g.neighbor_set(u).clone();
            c.intersect_with(g.neighbor_set(v));
            (u, v, c.iter().collect())
        })
        .collect();
    let estimate: u128 = commons.iter().map(|(_, _, c)| binomial(c.len() as u128, 2) + 1).sum();
    check_estimate("pruned diamond listing", estimate, budget)?;
    let mut out = BTreeSet::new();
    for (u, v, c) in &commons {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                if !g.has_edge(a, b) {
                    out.insert(VertexSubset::from_unchecked([*u, *v, a, b]));
                }
            }
        }
    }
    Ok(out)
}

/// Naive oracle: checks every 4-subset.
pub fn list_induced_diamonds_naive(g: &Graph) -> Result<BTreeSet<VertexSubset>> {
    check_estimate("naive 4-subset enumeration", binomial(g.n() as u128, 4), work_budget())?;
    let mut out = BTreeSet::new();
    for_each_subset(g.n(), 4, |s| {
        let mut e = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                e += g.has_edge(s[i], s[j]) as usize;
            }
        }
        if e == 5 {
            out.insert(VertexSubset::from_unchecked(s.iter().copied()));
        }
    });
    Ok(out)
}
