//! Desk-scale edge decomposition `E = E_m + E_s`.
//!
//! Vertices of residual degree below the threshold are peeled and keep their
//! residual edges as `E_{s,v}`; the connected components of what survives are
//! the clusters of the level. Edges that would push an `E_{s,v}` over its cap,
//! or that cross a low-conductance sweep cut when splitting is enabled, are
//! deferred to the next level. Mixing time is not certified; each cluster
//! carries an advisory spectral estimate instead.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Fraction;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    pub delta: Fraction,
    /// Cluster members need internal degree `>= max(2, ceil(n^delta / divisor))`.
    pub min_degree_divisor: u32,
    /// Defaults to `max(1, ceil(log2 n))`.
    pub max_levels: Option<usize>,
    /// Split a component along its best sweep cut when that cut's
    /// conductance is below this. Zero disables splitting.
    pub split_conductance: f64,
    /// Clusters larger than this get no spectral estimate.
    pub advisory_max_size: usize,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams {
            delta: Fraction::new(5, 6),
            min_degree_divisor: 4,
            max_levels: None,
            split_conductance: 0.0,
            advisory_max_size: 600,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Advisory {
    /// Second smallest eigenvalue of the normalized Laplacian.
    pub lambda2: f64,
    /// Conductance of the best Fiedler sweep cut (an upper bound).
    pub sweep_conductance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub level: usize,
    pub index: usize,
    pub leader: usize,
    pub members: Vec<usize>,
    /// `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub advisory: Option<Advisory>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeClass {
    Cluster(usize),
    /// Sparse edge owned by the given endpoint.
    Sparse(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub delta: Fraction,
    pub min_degree: usize,
    /// `n^delta * max(1, log2 n)`.
    pub es_cap: f64,
    pub max_levels: usize,
    pub clusters: Vec<Cluster>,
    /// `es[v]` lists the other endpoints of `E_{s,v}`, sorted.
    pub es: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub ok: bool,
    pub violations: Vec<String>,
    pub clusters: usize,
    pub levels: usize,
    pub em_edges: usize,
    pub es_edges: usize,
    pub max_es_load: usize,
    pub es_cap: f64,
    /// Smallest cluster-internal degree over all members, if any cluster exists.
    pub min_cluster_degree: Option<usize>,
    pub min_degree_threshold: usize,
}

pub fn min_degree_threshold(n: usize, delta: Fraction, divisor: u32) -> usize {
    delta.ceil_power_div(n, divisor as usize).max(2)
}

fn es_cap(n: usize, delta: Fraction) -> f64 {
    let log = if n > 1 { (n as f64).log2() } else { 1.0 };
    delta.power(n) * log.max(1.0)
}

fn default_levels(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

pub fn expander_decompose(g: &Graph, params: &DecompositionParams) -> Result<Decomposition> {
    let delta = params.delta;
    if delta.num == 0 || delta.num > delta.den {
        return Err(Error::input(format!("delta must lie in (0, 1], got {delta}")));
    }
    if params.min_degree_divisor == 0 {
        return Err(Error::input("min degree divisor must be positive"));
    }
    if !(0.0..1.0).contains(&params.split_conductance) {
        return Err(Error::input("split conductance must lie in [0, 1)"));
    }
    let n = g.n();
    let thr = min_degree_threshold(n, delta, params.min_degree_divisor);
    let cap = es_cap(n, delta);
    let cap_int = cap.floor() as usize;
    let max_levels = params.max_levels.unwrap_or_else(|| default_levels(n)).max(1);

    let mut es: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut remaining: BTreeSet<(usize, usize)> = g.edges().collect();
    let mut clusters = Vec::new();
    for level in 1..=max_levels {
        if remaining.is_empty() {
            break;
        }
        let mut deferred = BTreeSet::new();
        let comps = loop {
            peel(n, &mut remaining, thr, cap_int, &mut es, &mut deferred);
            let comps = components(n, &remaining);
            if params.split_conductance <= 0.0 {
                break comps;
            }
            let mut split = false;
            for comp in &comps {
                if let Some(cut) = low_conductance_cut(comp, &remaining, params) {
                    for e in cut {
                        remaining.remove(&e);
                        deferred.insert(e);
                    }
                    split = true;
                }
            }
            if !split {
                break comps;
            }
        };
        for (index, members) in comps.into_iter().enumerate() {
            let set: BTreeSet<usize> = members.iter().copied().collect();
            let edges: Vec<(usize, usize)> = remaining.iter().copied().filter(|(u, _)| set.contains(u)).collect();
            let advisory = advisory(&members, &edges, params.advisory_max_size);
            clusters.push(Cluster { level, index, leader: members[0], members, edges, advisory });
        }
        remaining = deferred;
    }
    // Out of levels: whatever is left becomes sparse, on the lighter endpoint.
    for (u, v) in remaining {
        let owner = if es[v].len() < es[u].len() { v } else { u };
        es[owner].push(if owner == u { v } else { u });
    }
    for list in &mut es {
        list.sort_unstable();
    }
    Ok(Decomposition { n, delta, min_degree: thr, es_cap: cap, max_levels, clusters, es })
}

/// Peels vertices of residual degree `< thr`, moving their residual edges
/// into `E_s` up to `cap` per vertex and deferring the rest.
fn peel(
    n: usize,
    remaining: &mut BTreeSet<(usize, usize)>,
    thr: usize,
    cap: usize,
    es: &mut [Vec<usize>],
    deferred: &mut BTreeSet<(usize, usize)>,
) {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in remaining.iter() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| !adj[v].is_empty() && adj[v].len() < thr).collect();
    while let Some(v) = queue.pop_front() {
        if adj[v].is_empty() {
            continue;
        }
        for w in std::mem::take(&mut adj[v]) {
            let e = norm(v, w);
            remaining.remove(&e);
            if es[v].len() < cap {
                es[v].push(w);
            } else {
                deferred.insert(e);
            }
            adj[w].remove(&v);
            if adj[w].len() + 1 == thr {
                queue.push_back(w);
            }
        }
    }
}

/// Connected components of the vertices touched by `edges`, each sorted,
/// ordered by smallest member.
fn components(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in &adj[comp[i]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Fiedler vector of the normalized Laplacian and the best sweep cut along it.
/// Returns `(lambda2, conductance, side)` where `side` is the smaller-volume prefix.
fn fiedler_sweep(members: &[usize], edges: &[(usize, usize)]) -> Option<(f64, f64, Vec<usize>)> {
    let k = members.len();
    if k < 2 {
        return None;
    }
    let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut deg = vec![0.0f64; k];
    let mut lap = DMatrix::<f64>::zeros(k, k);
    for &(u, v) in edges {
        let (i, j) = (pos[&u], pos[&v]);
        deg[i] += 1.0;
        deg[j] += 1.0;
        lap[(i, j)] = -1.0;
        lap[(j, i)] = -1.0;
    }
    if deg.contains(&0.0) {
        return None;
    }
    for i in 0..k {
        for j in 0..k {
            lap[(i, j)] /= (deg[i] * deg[j]).sqrt();
        }
        lap[(i, i)] = 1.0;
    }
    let eig = lap.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let (l2, col) = (eig.eigenvalues[order[1]], order[1]);
    let f: Vec<f64> = (0..k).map(|i| eig.eigenvectors[(i, col)] / deg[i].sqrt()).collect();
    let mut sweep: Vec<usize> = (0..k).collect();
    sweep.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));

    let adj: Vec<Vec<usize>> = {
        let mut adj = vec![Vec::new(); k];
        for &(u, v) in edges {
            adj[pos[&u]].push(pos[&v]);
            adj[pos[&v]].push(pos[&u]);
        }
        adj
    };
    let total: f64 = deg.iter().sum();
    let mut inside = vec![false; k];
    let (mut vol, mut cut) = (0.0, 0.0);
    let mut best = (f64::INFINITY, 0usize);
    for (t, &i) in sweep.iter().enumerate().take(k - 1) {
        inside[i] = true;
        vol += deg[i];
        for &j in &adj[i] {
            cut += if inside[j] { -1.0 } else { 1.0 };
        }
        let phi = cut / vol.min(total - vol);
        if phi < best.0 {
            best = (phi, t + 1);
        }
    }
    let mut side: Vec<usize> = sweep[..best.1].iter().map(|&i| members[i]).collect();
    side.sort_unstable();
    Some((l2.max(0.0), best.0, side))
}

fn advisory(members: &[usize], edges: &[(usize, usize)], max_size: usize) -> Option<Advisory> {
    if members.len() > max_size {
        return None;
    }
    fiedler_sweep(members, edges).map(|(lambda2, sweep_conductance, _)| Advisory { lambda2, sweep_conductance })
}

fn low_conductance_cut(
    members: &[usize],
    remaining: &BTreeSet<(usize, usize)>,
    params: &DecompositionParams,
) -> Option<Vec<(usize, usize)>> {
    if members.len() > params.advisory_max_size {
        return None;
    }
    let set: BTreeSet<usize> = members.iter().copied().collect();
    let edges: Vec<(usize, usize)> = remaining.iter().copied().filter(|(u, _)| set.contains(u)).collect();
    let (_, phi, side) = fiedler_sweep(members, &edges)?;
    if phi >= params.split_conductance {
        return None;
    }
    let side: BTreeSet<usize> = side.into_iter().collect();
    Some(edges.into_iter().filter(|(u, v)| side.contains(u) != side.contains(v)).collect())
}

impl Decomposition {
    /// Builds a decomposition from explicit clusters, given per level as edge
    /// lists. Every other edge becomes sparse, owned by its lighter endpoint.
    pub fn from_clusters(g: &Graph, delta: Fraction, levels: Vec<Vec<Vec<(usize, usize)>>>) -> Result<Self> {
        let n = g.n();
        let mut used = BTreeSet::new();
        let mut clusters = Vec::new();
        for (li, level) in levels.into_iter().enumerate() {
            for (index, edges) in level.into_iter().enumerate() {
                let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| norm(u, v)).collect();
                edges.sort_unstable();
                edges.dedup();
                if edges.is_empty() {
                    return Err(Error::input("a cluster needs at least one edge"));
                }
                for &(u, v) in &edges {
                    if u >= n || v >= n || !g.has_edge(u, v) {
                        return Err(Error::input(format!("cluster edge ({u}, {v}) is not in the graph")));
                    }
                    if !used.insert((u, v)) {
                        return Err(Error::input(format!("edge ({u}, {v}) is in two clusters")));
                    }
                }
                let members: Vec<usize> =
                    edges.iter().flat_map(|&(u, v)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
                let advisory = advisory(&members, &edges, 600);
                clusters.push(Cluster { level: li + 1, index, leader: members[0], members, edges, advisory });
            }
        }
        let mut es: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in g.edges().filter(|e| !used.contains(e)) {
            let owner = if es[v].len() < es[u].len() { v } else { u };
            es[owner].push(if owner == u { v } else { u });
        }
        for list in &mut es {
            list.sort_unstable();
        }
        let max_levels = clusters.iter().map(|c| c.level).max().unwrap_or(0).max(default_levels(n));
        Ok(Decomposition {
            n,
            delta,
            min_degree: min_degree_threshold(n, delta, 4),
            es_cap: es_cap(n, delta),
            max_levels,
            clusters,
            es,
        })
    }

    /// No clusters: every edge is sparse.
    pub fn all_sparse(g: &Graph, delta: Fraction) -> Result<Self> {
        Decomposition::from_clusters(g, delta, Vec::new())
    }

    pub fn levels(&self) -> usize {
        self.clusters.iter().map(|c| c.level).max().unwrap_or(0)
    }

    pub fn classes(&self) -> BTreeMap<(usize, usize), EdgeClass> {
        let mut out = BTreeMap::new();
        for (id, c) in self.clusters.iter().enumerate() {
            for &e in &c.edges {
                out.insert(e, EdgeClass::Cluster(id));
            }
        }
        for (v, list) in self.es.iter().enumerate() {
            for &w in list {
                out.insert(norm(v, w), EdgeClass::Sparse(v));
            }
        }
        out
    }

    pub fn es_edge_count(&self) -> usize {
        self.es.iter().map(Vec::len).sum()
    }

    pub fn em_edge_count(&self) -> usize {
        self.clusters.iter().map(|c| c.edges.len()).sum()
    }
}

/// Checks the decomposition against `g`: exact edge partition, vertex-disjoint
/// clusters per level, the `E_{s,v}` cap, and the cluster min degree.
pub fn check_decomposition(g: &Graph, dec: &Decomposition) -> DecompositionCheck {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in &dec.clusters {
        for &e in &c.edges {
            *seen.entry(e).or_default() += 1;
        }
    }
    for (v, list) in dec.es.iter().enumerate() {
        for &w in list {
            *seen.entry(norm(v, w)).or_default() += 1;
        }
    }
    for (&(u, v), &k) in &seen {
        if !g.has_edge(u, v) {
            violations.push(format!("({u}, {v}) is classified but not in the graph"));
        } else if k > 1 {
            violations.push(format!("({u}, {v}) is classified {k} times"));
        }
    }
    for (u, v) in g.edges() {
        if !seen.contains_key(&(u, v)) {
            violations.push(format!("({u}, {v}) is in neither E_m nor E_s"));
        }
    }

    let mut by_level: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut min_cluster_degree: Option<usize> = None;
    for (id, c) in dec.clusters.iter().enumerate() {
        let touched: BTreeSet<usize> = c.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        if touched.iter().copied().ne(c.members.iter().copied()) {
            violations.push(format!("cluster {id}: members differ from the endpoints of its edges"));
        }
        let level = by_level.entry(c.level).or_default();
        for &v in &c.members {
            if let Some(other) = level.insert(v, id) {
                violations.push(format!("level {}: vertex {v} is in clusters {other} and {id}", c.level));
            }
        }
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &(u, v) in &c.edges {
            *deg.entry(u).or_default() += 1;
            *deg.entry(v).or_default() += 1;
        }
        for (&v, &d) in &deg {
            if d < dec.min_degree {
                violations.push(format!("cluster {id}: member {v} has internal degree {d} < {}", dec.min_degree));
            }
            min_cluster_degree = Some(min_cluster_degree.map_or(d, |m| m.min(d)));
        }
    }
    if dec.levels() > dec.max_levels {
        violations.push(format!("{} levels exceed the limit {}", dec.levels(), dec.max_levels));
    }
    let max_es_load = dec.es.iter().map(Vec::len).max().unwrap_or(0);
    for (v, list) in dec.es.iter().enumerate() {
        if list.len() as f64 > dec.es_cap {
            violations.push(format!("|E_s,{v}| = {} exceeds the cap {:.2}", list.len(), dec.es_cap));
        }
    }
    DecompositionCheck {
        ok: violations.is_empty(),
        violations,
        clusters: dec.clusters.len(),
        levels: dec.levels(),
        em_edges: dec.em_edge_count(),
        es_edges: dec.es_edge_count(),
        max_es_load,
        es_cap: dec.es_cap,
        min_cluster_degree,
        min_degree_threshold: dec.min_degree,
    }
}
