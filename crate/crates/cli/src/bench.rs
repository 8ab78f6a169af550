use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use induced_core::congest::{cut_traffic_bound_check, naive_c4_program, run, SimConfig};
use induced_core::diamond_listing::{list_induced_diamonds_congest, DecompositionParams, Fraction, ListingParams};
use induced_core::families::SCHEMA_VERSION;
use induced_core::graph::{Graph, VertexSubset};
use induced_core::search::{list_induced_cycles, list_induced_diamonds};
use induced_core::twoparty::{cycle_listing_protocol, diamond_listing_protocol};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    CycleProtocol,
    DiamondProtocol,
    DiamondListing,
    NaiveC4,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    /// Graph sizes to sweep.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    pub n: Vec<usize>,
    /// Edge probability of the random graphs.
    #[arg(long, default_value_t = 0.15)]
    pub density: f64,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    /// Cycle length for the cycle protocol.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value = "5/6")]
    pub delta: Fraction,
    #[arg(long, default_value = "1/2")]
    pub epsilon: Fraction,
    /// CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    schema_version: u32,
    target: String,
    n: usize,
    m: usize,
    params: String,
    seed: u64,
    cut_edges: Option<usize>,
    rounds: Option<usize>,
    cut_bits: Option<u64>,
    payload_bits: Option<u64>,
    bound: Option<f64>,
    ratio: Option<f64>,
    charged_rounds: Option<f64>,
    listed: usize,
    oracle_ms: f64,
    ok: bool,
}

/// A uniformly random half of the vertices, sorted.
fn split(n: usize, seed: u64) -> VertexSubset {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
    let mut half = ids[..n / 2].to_vec();
    half.sort_unstable();
    VertexSubset::from_unchecked(half)
}

fn row(a: &BenchArgs, g: &Graph, seed: u64) -> Result<Row> {
    let va = split(g.n(), seed);
    let cut = g.edges().filter(|&(u, v)| va.contains(u) != va.contains(v)).count();
    let mut r = Row {
        schema_version: SCHEMA_VERSION,
        target: serde_json::to_value(a.target)?.as_str().unwrap_or_default().to_string(),
        n: g.n(),
        m: g.edge_count(),
        params: format!("density={}", a.density),
        seed,
        cut_edges: Some(cut),
        rounds: None,
        cut_bits: None,
        payload_bits: None,
        bound: None,
        ratio: None,
        charged_rounds: None,
        listed: 0,
        oracle_ms: 0.0,
        ok: true,
    };
    match a.target {
        Target::CycleProtocol => {
            let res = cycle_listing_protocol(g, &va, a.k)?;
            let t = Instant::now();
            let oracle = list_induced_cycles(g, a.k)?;
            r.oracle_ms = t.elapsed().as_secs_f64() * 1e3;
            r.params += &format!(";k={}", a.k);
            r.listed = oracle.len();
            r.payload_bits = Some(res.transcript.payload_bits());
            r.bound = Some(res.bound.bound as f64);
            r.ok = res.bound.holds && res.union() == oracle;
        }
        Target::DiamondProtocol => {
            let res = diamond_listing_protocol(g, &va)?;
            let t = Instant::now();
            let oracle = list_induced_diamonds(g)?;
            r.oracle_ms = t.elapsed().as_secs_f64() * 1e3;
            r.listed = oracle.len();
            r.payload_bits = Some(res.transcript.payload_bits());
            r.bound = Some(res.bound.bound as f64);
            r.ok = res.bound.holds && res.union() == oracle;
        }
        Target::DiamondListing => {
            let params = ListingParams {
                epsilon: a.epsilon,
                decomposition: DecompositionParams { delta: a.delta, ..Default::default() },
            };
            let (found, stats) = list_induced_diamonds_congest(g, &params)?;
            let t = Instant::now();
            let oracle = list_induced_diamonds(g)?;
            r.oracle_ms = t.elapsed().as_secs_f64() * 1e3;
            r.params += &format!(";delta={};epsilon={}", a.delta, a.epsilon);
            r.cut_edges = None;
            r.listed = found.len();
            r.rounds = Some(stats.measured_rounds);
            r.payload_bits = Some(stats.sparse.bits + stats.heavy.bits + stats.light.bits);
            r.charged_rounds = Some(stats.simulation.total);
            r.ok = stats.caps_ok && found == oracle;
        }
        Target::NaiveC4 => {
            let cfg = SimConfig::for_graph(g);
            let stats = run(g, &naive_c4_program(), &cfg, Some(&va))?;
            let check = cut_traffic_bound_check(&stats, cut, &cfg);
            let t = Instant::now();
            let truth = !list_induced_cycles(g, 4)?.is_empty();
            r.oracle_ms = t.elapsed().as_secs_f64() * 1e3;
            r.rounds = Some(stats.rounds_used);
            r.cut_bits = Some(stats.total_cut_bits);
            r.bound = Some(check.bound as f64);
            r.ok = check.holds && stats.decision() == truth;
        }
    }
    let measured = r.payload_bits.or(r.cut_bits);
    if let (Some(m), Some(b)) = (measured, r.bound) {
        r.ratio = Some(if b > 0.0 { m as f64 / b } else { 0.0 });
    }
    Ok(r)
}

pub fn bench(a: &BenchArgs) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match &a.out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    // rows come out in parameter order: n, then seed
    for &n in &a.n {
        for &seed in &a.seeds {
            let g = Graph::gnp(n, a.density, seed);
            w.serialize(row(a, &g, seed)?)?;
        }
    }
    w.flush()?;
    Ok(())
}
