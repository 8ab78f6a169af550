//! The three listing phases as staged node programs, plus the cluster-local
//! listing that stands in for the clique simulation inside a cluster.
//!
//! Each node starts out knowing only what the decomposition tells it about
//! itself: the clusters it belongs to and the class of each incident edge.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::decompose::{Decomposition, EdgeClass};
use super::Fraction;
use crate::bits::id_bits;
use crate::congest::{run_full, NodeContext, Received, RunStats, SimConfig, StagedLogic, StagedProgram, StagedState};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::search::list_induced_diamonds;

#[derive(Clone, Debug)]
struct NodeInfo {
    clusters: Vec<usize>,
    /// Cluster of the edge to each neighbour, `None` for sparse edges.
    nbr_cluster: Vec<Option<usize>>,
}

fn node_infos(g: &Graph, dec: &Decomposition) -> Vec<NodeInfo> {
    let classes = dec.classes();
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (id, c) in dec.clusters.iter().enumerate() {
        for &v in &c.members {
            member_of[v].push(id);
        }
    }
    (0..g.n())
        .map(|v| NodeInfo {
            clusters: member_of[v].clone(),
            nbr_cluster: g
                .neighbors(v)
                .iter()
                .map(|&w| match classes.get(&(v.min(w), v.max(w))) {
                    Some(EdgeClass::Cluster(id)) => Some(*id),
                    _ => None,
                })
                .collect(),
        })
        .collect()
}

fn cluster_bits(dec: &Decomposition) -> usize {
    id_bits(dec.clusters.len().max(2))
}

fn check_widths(g: &Graph, dec: &Decomposition, cfg: &SimConfig) -> Result<()> {
    let need = cluster_bits(dec) + id_bits(g.n());
    if need > cfg.bandwidth_bits {
        return Err(Error::Unsupported(format!(
            "{} clusters need {need}-bit items, bandwidth is {}",
            dec.clusters.len(),
            cfg.bandwidth_bits
        )));
    }
    Ok(())
}

fn es_neighbors(info: &NodeInfo, ctx: &NodeContext) -> Vec<usize> {
    ctx.neighbors.iter().zip(&info.nbr_cluster).filter(|(_, c)| c.is_none()).map(|(&w, _)| w).collect()
}

/// Cluster id -> this node's neighbours in that cluster, from the membership stage.
fn neighbor_clusters(ctx: &NodeContext, lists: &[Vec<u64>]) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&w, list) in ctx.neighbors.iter().zip(lists) {
        for &c in list {
            out.entry(c as usize).or_default().push(w);
        }
    }
    out
}

fn as_items(list: &[usize]) -> Vec<u64> {
    list.iter().map(|&x| x as u64).collect()
}

fn diamond(vs: [usize; 4]) -> VertexSubset {
    VertexSubset::from_unchecked(vs)
}

fn collect_errors<L>(states: &[StagedState<L>], local_errors: impl Fn(&L) -> &[String]) -> Result<()> {
    let errs: Vec<String> =
        states.iter().flat_map(|s| s.protocol_errors.iter().chain(local_errors(&s.local)).cloned()).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::protocol(errs.join("; ")))
    }
}

fn finished(stats: &RunStats, phase: &str) -> Result<()> {
    if stats.timed_out {
        return Err(Error::protocol(format!("{phase} phase did not finish within {} rounds", stats.rounds_used)));
    }
    Ok(())
}

// ---------------------------------------------------------------- sparse

struct SparseLogic<'a> {
    infos: &'a [NodeInfo],
}

#[derive(Default)]
struct SparseLocal {
    es: Vec<usize>,
    found: BTreeSet<VertexSubset>,
}

impl StagedLogic for SparseLogic<'_> {
    type Local = SparseLocal;

    fn name(&self) -> String {
        "diamond-sparse".into()
    }

    fn stages(&self) -> usize {
        1
    }

    fn item_bits(&self, _: usize, ctx: &NodeContext) -> usize {
        ctx.id_bits()
    }

    fn init(&self, ctx: &NodeContext) -> SparseLocal {
        SparseLocal { es: es_neighbors(&self.infos[ctx.id], ctx), found: BTreeSet::new() }
    }

    fn emit(&self, local: &mut SparseLocal, ctx: &NodeContext, _: usize, _: &Received) -> Vec<Vec<u64>> {
        vec![as_items(&local.es); ctx.neighbors.len()]
    }

    /// Lists the all-sparse diamonds in which this node `a` is one of the two
    /// degree-2 vertices: `v`, `c` adjacent, both adjacent to `a` and to `b`,
    /// and `b` not adjacent to `a`.
    fn finish(&self, local: &mut SparseLocal, ctx: &NodeContext, received: &Received) -> bool {
        let lists: Vec<Vec<usize>> =
            received.stage(0).iter().map(|l| l.iter().map(|&x| x as usize).collect()).collect();
        let es_of = |w: usize| &lists[ctx.neighbor_index(w).expect("sparse neighbour")];
        let a = ctx.id;
        for (i, &v) in local.es.iter().enumerate() {
            let sv = es_of(v);
            for &c in &local.es[i + 1..] {
                if sv.binary_search(&c).is_err() {
                    continue;
                }
                let sc = es_of(c);
                for &b in sv {
                    if b != a && sc.binary_search(&b).is_ok() && ctx.neighbors.binary_search(&b).is_err() {
                        local.found.insert(diamond([a, v, c, b]));
                    }
                }
            }
        }
        !local.found.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PhaseRun {
    pub diamonds: BTreeSet<VertexSubset>,
    pub stats: RunStats,
}

/// Every node streams its sparse incident edges to all neighbours; induced
/// diamonds made of sparse edges only are then listed locally.
pub fn sparse_phase(g: &Graph, dec: &Decomposition, cfg: &SimConfig) -> Result<PhaseRun> {
    let infos = node_infos(g, dec);
    let prog = StagedProgram(SparseLogic { infos: &infos });
    let (stats, states) = run_full(g, &prog, cfg, None)?;
    collect_errors(&states, |_| &[])?;
    finished(&stats, "sparse")?;
    let diamonds = states.into_iter().flat_map(|s| s.local.found).collect();
    Ok(PhaseRun { diamonds, stats })
}

// ---------------------------------------------------------------- heavy

struct HeavyLogic<'a> {
    infos: &'a [NodeInfo],
    epsilon: Fraction,
    cluster_bits: usize,
}

#[derive(Default)]
struct HeavyLocal {
    heavy_for: Vec<usize>,
    /// `(cluster, sender, w)`: the sender's edge to `w`, gathered for `cluster`.
    gathered: Vec<(usize, usize, usize)>,
    errors: Vec<String>,
}

impl StagedLogic for HeavyLogic<'_> {
    type Local = HeavyLocal;

    fn name(&self) -> String {
        "diamond-heavy".into()
    }

    fn stages(&self) -> usize {
        2
    }

    fn item_bits(&self, stage: usize, ctx: &NodeContext) -> usize {
        match stage {
            0 => self.cluster_bits,
            _ => self.cluster_bits + ctx.id_bits(),
        }
    }

    fn init(&self, _: &NodeContext) -> HeavyLocal {
        HeavyLocal::default()
    }

    fn emit(&self, local: &mut HeavyLocal, ctx: &NodeContext, stage: usize, received: &Received) -> Vec<Vec<u64>> {
        let info = &self.infos[ctx.id];
        let d = ctx.neighbors.len();
        if stage == 0 {
            return vec![as_items(&info.clusters); d];
        }
        // N(v) is cut into |N(v) & C| batches, one per C-neighbour in ascending id order.
        let l = ctx.id_bits();
        let mut out = vec![Vec::new(); d];
        for (c, members) in neighbor_clusters(ctx, received.stage(0)) {
            if info.clusters.contains(&c) || !self.epsilon.exceeded_by(members.len(), ctx.n) {
                continue;
            }
            local.heavy_for.push(c);
            let size = d.div_ceil(members.len());
            for (chunk, &dst) in ctx.neighbors.chunks(size).zip(&members) {
                let pos = ctx.neighbor_index(dst).expect("cluster neighbour");
                out[pos].extend(chunk.iter().map(|&w| ((c as u64) << l) | w as u64));
            }
        }
        out
    }

    fn finish(&self, local: &mut HeavyLocal, ctx: &NodeContext, received: &Received) -> bool {
        let info = &self.infos[ctx.id];
        let l = ctx.id_bits();
        for (&v, items) in ctx.neighbors.iter().zip(received.stage(1)) {
            for &it in items {
                let (c, w) = ((it >> l) as usize, (it & ((1 << l) - 1)) as usize);
                if !info.clusters.contains(&c) {
                    local.errors.push(format!("node {} got a batch for cluster {c} it is not in", ctx.id));
                }
                local.gathered.push((c, v, w));
            }
        }
        !local.gathered.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct HeavyRun {
    pub run: PhaseRun,
    /// Number of `(v, C)` with `v` C-heavy.
    pub heavy_pairs: usize,
    /// Largest number of edges one node gathered for one cluster.
    pub max_gathered: usize,
    /// `n^{2 - epsilon}`.
    pub gather_cap: f64,
}

/// What a cluster jointly knows: every edge at a member, plus edges gathered
/// from heavy outsiders. A pair's status is known when an endpoint is a member
/// or a heavy sender.
struct ClusterKnowledge {
    members: BTreeSet<usize>,
    heavy: BTreeSet<usize>,
    gathered: BTreeSet<(usize, usize)>,
}

/// Lists induced diamonds with a cluster edge whose six pairs the cluster
/// knows. The clique simulation that would do this inside the cluster is
/// charged, not executed.
fn cluster_listing(g: &Graph, dec: &Decomposition, know: &[ClusterKnowledge]) -> Result<Vec<BTreeSet<VertexSubset>>> {
    know.par_iter()
        .enumerate()
        .map(|(id, k)| {
            let cluster_edges: BTreeSet<(usize, usize)> = dec.clusters[id].edges.iter().copied().collect();
            let mut local = Graph::empty(g.n());
            for &u in &k.members {
                for &w in g.neighbors(u) {
                    local.add_edge(u, w)?;
                }
            }
            for &(u, w) in &k.gathered {
                local.add_edge(u, w)?;
            }
            let known = |x: usize| k.members.contains(&x) || k.heavy.contains(&x);
            Ok(list_induced_diamonds(&local)?
                .into_iter()
                .filter(|s| {
                    let m = s.members();
                    let pairs = (0..4).flat_map(|i| (i + 1..4).map(move |j| (m[i], m[j])));
                    let mut has_cluster_edge = false;
                    for (x, y) in pairs {
                        if !known(x) && !known(y) {
                            return false;
                        }
                        has_cluster_edge |= cluster_edges.contains(&(x, y));
                    }
                    has_cluster_edge
                })
                .collect())
        })
        .collect()
}

/// Heavy outsiders ship their neighbourhoods into each cluster; the cluster
/// then lists the diamonds with a cluster edge and a heavy vertex.
pub fn heavy_phase(g: &Graph, dec: &Decomposition, epsilon: Fraction, cfg: &SimConfig) -> Result<HeavyRun> {
    check_widths(g, dec, cfg)?;
    let infos = node_infos(g, dec);
    let prog = StagedProgram(HeavyLogic { infos: &infos, epsilon, cluster_bits: cluster_bits(dec) });
    let (stats, states) = run_full(g, &prog, cfg, None)?;
    collect_errors(&states, |l| &l.errors)?;
    finished(&stats, "heavy")?;

    let mut know: Vec<ClusterKnowledge> = dec
        .clusters
        .iter()
        .map(|c| ClusterKnowledge {
            members: c.members.iter().copied().collect(),
            heavy: BTreeSet::new(),
            gathered: BTreeSet::new(),
        })
        .collect();
    let mut per_node: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut heavy_pairs = 0;
    for (node, st) in states.iter().enumerate() {
        heavy_pairs += st.local.heavy_for.len();
        for &(c, v, w) in &st.local.gathered {
            *per_node.entry((node, c)).or_default() += 1;
            know[c].heavy.insert(v);
            know[c].gathered.insert((v.min(w), v.max(w)));
        }
    }
    let lists = cluster_listing(g, dec, &know)?;
    let diamonds = lists
        .into_iter()
        .zip(&know)
        .flat_map(|(list, k)| list.into_iter().filter(|s| s.iter().any(|v| k.heavy.contains(&v))))
        .collect();
    Ok(HeavyRun {
        run: PhaseRun { diamonds, stats },
        heavy_pairs,
        max_gathered: per_node.values().copied().max().unwrap_or(0),
        gather_cap: (g.n() as f64).powf(2.0 - epsilon.value()),
    })
}

// ---------------------------------------------------------------- light

struct LightLogic<'a> {
    infos: &'a [NodeInfo],
    epsilon: Fraction,
    cluster_bits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Wedge {
    /// Evaluated at the light vertex adjacent to both cluster vertices.
    Open,
    /// Evaluated at one of the two non-adjacent outsiders.
    Closed,
}

#[derive(Default)]
struct LightLocal {
    heavy_for: Vec<usize>,
    /// Light clusters: cluster -> this node's neighbours in it.
    light: BTreeMap<usize, Vec<usize>>,
    /// Query targets `c2`, per neighbour position `c1`.
    queries: Vec<Vec<usize>>,
    candidates: BTreeSet<(Wedge, VertexSubset, usize, usize)>,
    max_query_list: usize,
    l1: BTreeSet<VertexSubset>,
    l2: BTreeSet<VertexSubset>,
    errors: Vec<String>,
}

impl LightLogic<'_> {
    fn plan_queries(&self, local: &mut LightLocal, ctx: &NodeContext, received: &Received) {
        let me = ctx.id;
        let l = ctx.id_bits();
        let info = &self.infos[me];
        let lists: Vec<BTreeMap<usize, Vec<usize>>> = received
            .stage(2)
            .iter()
            .map(|items| {
                let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &it in items {
                    m.entry((it >> l) as usize).or_default().push((it & ((1 << l) - 1)) as usize);
                }
                m
            })
            .collect();
        let es_lists: Vec<Vec<usize>> =
            received.stage(1).iter().map(|l| l.iter().map(|&x| x as usize).collect()).collect();
        let pos = |w: usize| ctx.neighbor_index(w).expect("neighbour");

        let mut per_target: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
        for (&c, mc) in &local.light {
            // open wedge at me = u: v a light neighbour, c1 in N(u) & N(v), c2 in N(u) \ N(v)
            for (p, &v) in ctx.neighbors.iter().enumerate() {
                let Some(lv) = lists[p].get(&c) else { continue };
                for &c1 in mc.iter().filter(|x| lv.binary_search(x).is_ok()) {
                    for &c2 in mc.iter().filter(|x| lv.binary_search(x).is_err()) {
                        local.candidates.insert((Wedge::Open, diamond([me, v, c1, c2]), c1, c2));
                        per_target.entry((c, c1)).or_default().insert(c2);
                    }
                }
            }
            // closed wedge at me = v: u not adjacent, all four cluster-side edges sparse
            let es_c: Vec<usize> = mc.iter().copied().filter(|&x| info.nbr_cluster[pos(x)].is_none()).collect();
            for (i, &c1) in es_c.iter().enumerate() {
                let s1 = &es_lists[pos(c1)];
                for &c2 in &es_c[i + 1..] {
                    let s2 = &es_lists[pos(c2)];
                    for &u in s1 {
                        if u != me && s2.binary_search(&u).is_ok() && ctx.neighbors.binary_search(&u).is_err() {
                            local.candidates.insert((Wedge::Closed, diamond([u, me, c1, c2]), c1, c2));
                            per_target.entry((c, c1)).or_default().insert(c2);
                        }
                    }
                }
            }
        }
        local.queries = vec![Vec::new(); ctx.neighbors.len()];
        let mut merged: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for ((c, c1), targets) in per_target {
            local.max_query_list = local.max_query_list.max(targets.len());
            if self.epsilon.exceeded_by(targets.len(), ctx.n) {
                local.errors.push(format!(
                    "node {me}: {} queries to {c1} for cluster {c} exceed n^{}",
                    targets.len(),
                    self.epsilon
                ));
            }
            merged.entry(c1).or_default().extend(targets);
        }
        for (c1, targets) in merged {
            local.queries[pos(c1)] = targets.into_iter().collect();
        }
    }
}

impl StagedLogic for LightLogic<'_> {
    type Local = LightLocal;

    fn name(&self) -> String {
        "diamond-light".into()
    }

    fn stages(&self) -> usize {
        5
    }

    fn item_bits(&self, stage: usize, ctx: &NodeContext) -> usize {
        match stage {
            0 => self.cluster_bits,
            1 | 3 => ctx.id_bits(),
            2 => self.cluster_bits + ctx.id_bits(),
            _ => 1,
        }
    }

    fn init(&self, _: &NodeContext) -> LightLocal {
        LightLocal::default()
    }

    fn emit(&self, local: &mut LightLocal, ctx: &NodeContext, stage: usize, received: &Received) -> Vec<Vec<u64>> {
        let info = &self.infos[ctx.id];
        let d = ctx.neighbors.len();
        match stage {
            // cluster memberships
            0 => vec![as_items(&info.clusters); d],
            // sparse incident edges
            1 => vec![as_items(&es_neighbors(info, ctx)); d],
            // N(u) & C for every cluster C this node is light for
            2 => {
                let l = ctx.id_bits();
                let mut items = Vec::new();
                for (c, members) in neighbor_clusters(ctx, received.stage(0)) {
                    if info.clusters.contains(&c) {
                        continue;
                    }
                    if self.epsilon.exceeded_by(members.len(), ctx.n) {
                        local.heavy_for.push(c);
                        continue;
                    }
                    items.extend(members.iter().map(|&w| ((c as u64) << l) | w as u64));
                    local.light.insert(c, members);
                }
                vec![items; d]
            }
            3 => {
                self.plan_queries(local, ctx, received);
                local.queries.iter().map(|q| as_items(q)).collect()
            }
            // answer each query {me, c2} with one bit
            _ => received
                .stage(3)
                .iter()
                .map(|q| q.iter().map(|&c2| u64::from(ctx.neighbors.binary_search(&(c2 as usize)).is_ok())).collect())
                .collect(),
        }
    }

    fn finish(&self, local: &mut LightLocal, ctx: &NodeContext, received: &Received) -> bool {
        let mut yes = BTreeSet::new();
        for ((&c1, asked), answers) in ctx.neighbors.iter().zip(&local.queries).zip(received.stage(4)) {
            if asked.len() != answers.len() {
                local.errors.push(format!("node {}: {} answers for {} queries", ctx.id, answers.len(), asked.len()));
                continue;
            }
            for (&c2, &bit) in asked.iter().zip(answers) {
                if bit == 1 {
                    yes.insert((c1, c2));
                }
            }
        }
        for (kind, s, c1, c2) in std::mem::take(&mut local.candidates) {
            if yes.contains(&(c1, c2)) {
                match kind {
                    Wedge::Open => local.l1.insert(s),
                    Wedge::Closed => local.l2.insert(s),
                };
            }
        }
        !(local.l1.is_empty() && local.l2.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct LightRun {
    pub run: PhaseRun,
    /// Open-wedge diamonds, found at the light vertex adjacent to both cluster vertices.
    pub open: BTreeSet<VertexSubset>,
    /// Closed-wedge diamonds, found at a light vertex whose cluster-side edges are sparse.
    pub closed: BTreeSet<VertexSubset>,
    /// Diamonds with three or more cluster members and no heavy vertex.
    pub interior: BTreeSet<VertexSubset>,
    pub max_query_list: usize,
    /// `n^epsilon`.
    pub query_cap: f64,
}

/// Light outsiders publish their cluster neighbourhoods; wedges through them
/// are closed by asking a cluster vertex about the remaining cluster pair.
/// Diamonds with at least three cluster members are listed inside the cluster.
pub fn light_phase(g: &Graph, dec: &Decomposition, epsilon: Fraction, cfg: &SimConfig) -> Result<LightRun> {
    check_widths(g, dec, cfg)?;
    let infos = node_infos(g, dec);
    let prog = StagedProgram(LightLogic { infos: &infos, epsilon, cluster_bits: cluster_bits(dec) });
    let (stats, states) = run_full(g, &prog, cfg, None)?;
    collect_errors(&states, |l| &l.errors)?;
    finished(&stats, "light")?;

    let mut heavy: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); dec.clusters.len()];
    let (mut open, mut closed) = (BTreeSet::new(), BTreeSet::new());
    let mut max_query_list = 0;
    for (v, st) in states.into_iter().enumerate() {
        for &c in &st.local.heavy_for {
            heavy[c].insert(v);
        }
        max_query_list = max_query_list.max(st.local.max_query_list);
        open.extend(st.local.l1);
        closed.extend(st.local.l2);
    }
    let know: Vec<ClusterKnowledge> = dec
        .clusters
        .iter()
        .map(|c| ClusterKnowledge {
            members: c.members.iter().copied().collect(),
            heavy: BTreeSet::new(),
            gathered: BTreeSet::new(),
        })
        .collect();
    let interior: BTreeSet<VertexSubset> = cluster_listing(g, dec, &know)?
        .into_iter()
        .zip(&heavy)
        .flat_map(|(list, h)| list.into_iter().filter(|s| !s.iter().any(|v| h.contains(&v))))
        .collect();
    let diamonds = open.iter().chain(&closed).chain(&interior).cloned().collect();
    Ok(LightRun {
        run: PhaseRun { diamonds, stats },
        open,
        closed,
        interior,
        max_query_list,
        query_cap: epsilon.power(g.n()),
    })
}
