//! Distributed induced diamond listing on top of an edge decomposition.
//!
//! Sparse diamonds are found by exchanging sparse edges. Diamonds with a
//! cluster edge are split by whether they contain a vertex with many
//! neighbours in that cluster (heavy) or not (light).

mod decompose;
mod fraction;
mod phases;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::congest::{RunStats, SimConfig};
use crate::error::Result;
use crate::graph::{is_induced_diamond, Graph, VertexSubset};
use crate::search::list_induced_diamonds;

pub use decompose::{
    check_decomposition, expander_decompose, min_degree_threshold, Advisory, Cluster, Decomposition,
    DecompositionCheck, DecompositionParams, EdgeClass,
};
pub use fraction::Fraction;
pub use phases::{heavy_phase, light_phase, sparse_phase, HeavyRun, LightRun, PhaseRun};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListingParams {
    pub epsilon: Fraction,
    pub decomposition: DecompositionParams,
}

impl Default for ListingParams {
    fn default() -> Self {
        ListingParams { epsilon: Fraction::new(1, 2), decomposition: DecompositionParams::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub rounds: usize,
    pub message_rounds: usize,
    pub messages: u64,
    pub bits: u64,
    pub diamonds: usize,
}

impl PhaseSummary {
    fn new(stats: &RunStats, diamonds: usize) -> Self {
        PhaseSummary {
            rounds: stats.rounds_used,
            message_rounds: stats.message_rounds,
            messages: stats.total_messages,
            bits: stats.total_bits,
            diamonds,
        }
    }
}

/// Charged cost of simulating `t` clique rounds inside the clusters of one
/// level: `n^{2-delta-epsilon} + t * n^{2-2 delta}` with `t = ceil(sqrt n)`.
/// Clusters of a level run side by side, levels one after another.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationCharge {
    pub formula: String,
    pub t: usize,
    pub per_level: f64,
    pub levels: usize,
    pub total: f64,
}

pub fn simulation_charge(n: usize, delta: Fraction, epsilon: Fraction, levels: usize) -> SimulationCharge {
    let nf = n as f64;
    let t = (nf.sqrt()).ceil() as usize;
    let per_level = nf.powf(2.0 - delta.value() - epsilon.value()) + t as f64 * nf.powf(2.0 - 2.0 * delta.value());
    SimulationCharge {
        formula: format!("n^(2-{delta}-{epsilon}) + {t} * n^(2-2*{delta})"),
        t,
        per_level,
        levels,
        total: per_level * levels as f64,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedDiamond {
    pub vertices: VertexSubset,
    /// Subset of `sparse`, `heavy`, `light:open`, `light:closed`, `light:interior`.
    pub tags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondListingStats {
    pub n: usize,
    pub m: usize,
    pub delta: Fraction,
    pub epsilon: Fraction,
    pub decomposition: DecompositionCheck,
    pub sparse: PhaseSummary,
    pub heavy: PhaseSummary,
    pub light: PhaseSummary,
    pub light_open: usize,
    pub light_closed: usize,
    pub light_interior: usize,
    pub heavy_pairs: usize,
    /// Rounds actually simulated, all phases back to back.
    pub measured_rounds: usize,
    /// Cluster-internal simulation rounds, charged by formula.
    pub simulation: SimulationCharge,
    pub max_gathered_per_node: usize,
    pub gather_cap: f64,
    pub max_query_list: usize,
    pub query_cap: f64,
    pub caps_ok: bool,
    pub listed: usize,
    pub tagged: Vec<TaggedDiamond>,
}

/// Runs the three phases on a given decomposition.
pub fn list_with_decomposition(
    g: &Graph,
    dec: &Decomposition,
    epsilon: Fraction,
    cfg: &SimConfig,
) -> Result<(BTreeSet<VertexSubset>, DiamondListingStats)> {
    let sparse = sparse_phase(g, dec, cfg)?;
    let heavy = heavy_phase(g, dec, epsilon, cfg)?;
    let light = light_phase(g, dec, epsilon, cfg)?;

    let mut tags: BTreeMap<VertexSubset, Vec<String>> = BTreeMap::new();
    let sets: [(&str, &BTreeSet<VertexSubset>); 5] = [
        ("sparse", &sparse.diamonds),
        ("heavy", &heavy.run.diamonds),
        ("light:open", &light.open),
        ("light:closed", &light.closed),
        ("light:interior", &light.interior),
    ];
    for (tag, set) in sets {
        for s in set {
            tags.entry(s.clone()).or_default().push(tag.to_string());
        }
    }
    let all: BTreeSet<VertexSubset> = tags.keys().cloned().collect();
    let caps_ok = heavy.max_gathered as f64 <= heavy.gather_cap && light.max_query_list as f64 <= light.query_cap;
    let measured_rounds = sparse.stats.rounds_used + heavy.run.stats.rounds_used + light.run.stats.rounds_used;
    let stats = DiamondListingStats {
        n: g.n(),
        m: g.edge_count(),
        delta: dec.delta,
        epsilon,
        decomposition: check_decomposition(g, dec),
        sparse: PhaseSummary::new(&sparse.stats, sparse.diamonds.len()),
        heavy: PhaseSummary::new(&heavy.run.stats, heavy.run.diamonds.len()),
        light: PhaseSummary::new(&light.run.stats, light.run.diamonds.len()),
        light_open: light.open.len(),
        light_closed: light.closed.len(),
        light_interior: light.interior.len(),
        heavy_pairs: heavy.heavy_pairs,
        measured_rounds,
        simulation: simulation_charge(g.n(), dec.delta, epsilon, dec.levels()),
        max_gathered_per_node: heavy.max_gathered,
        gather_cap: heavy.gather_cap,
        max_query_list: light.max_query_list,
        query_cap: light.query_cap,
        caps_ok,
        listed: all.len(),
        tagged: tags.into_iter().map(|(vertices, tags)| TaggedDiamond { vertices, tags }).collect(),
    };
    Ok((all, stats))
}

/// Decomposes `g` and lists its induced diamonds with the default bandwidth.
pub fn list_induced_diamonds_congest(
    g: &Graph,
    params: &ListingParams,
) -> Result<(BTreeSet<VertexSubset>, DiamondListingStats)> {
    let dec = expander_decompose(g, &params.decomposition)?;
    list_with_decomposition(g, &dec, params.epsilon, &SimConfig::for_graph(g))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub oracle: usize,
    pub listed: usize,
    pub uncovered: Vec<VertexSubset>,
    /// Listed sets that are not induced diamonds.
    pub spurious: Vec<VertexSubset>,
    /// Diamonds per combination of phase tags.
    pub by_tags: BTreeMap<String, usize>,
    pub ok: bool,
}

/// Compares a run against the brute-force listing.
pub fn coverage_report(g: &Graph, stats: &DiamondListingStats) -> Result<CoverageReport> {
    let oracle = list_induced_diamonds(g)?;
    let listed: BTreeSet<&VertexSubset> = stats.tagged.iter().map(|t| &t.vertices).collect();
    let uncovered: Vec<VertexSubset> = oracle.iter().filter(|s| !listed.contains(s)).cloned().collect();
    let mut spurious = Vec::new();
    for t in &stats.tagged {
        if !is_induced_diamond(g, &t.vertices)? {
            spurious.push(t.vertices.clone());
        }
    }
    let mut by_tags: BTreeMap<String, usize> = BTreeMap::new();
    for t in &stats.tagged {
        *by_tags.entry(t.tags.join("+")).or_default() += 1;
    }
    Ok(CoverageReport {
        oracle: oracle.len(),
        listed: listed.len(),
        ok: uncovered.is_empty() && spurious.is_empty(),
        uncovered,
        spurious,
        by_tags,
    })
}
