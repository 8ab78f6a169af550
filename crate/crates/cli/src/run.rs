use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use induced_core::congest::{
    cut_traffic_bound_check, naive_c4_program, run, Flood, OutputOne, Silent, SimConfig, DEFAULT_MAX_ROUNDS,
};
use induced_core::diamond_listing::{
    coverage_report, list_induced_diamonds_congest, DecompositionParams, Fraction, ListingParams,
};
use induced_core::graph::Graph;
use induced_core::id_bits;
use induced_core::search::{list_induced_cycles, list_induced_diamonds};
use induced_core::twoparty::{cycle_listing_protocol, diamond_listing_protocol};
use induced_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::output::{envelope, read_graph, read_partition, write_json};
use crate::CheckFailed;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Program {
    /// Detects induced 4-cycles by exchanging neighbour lists.
    NaiveC4,
    /// Every node outputs 1 immediately.
    OutputOne,
    /// Every node outputs 0 immediately.
    Silent,
    /// A one-bit token spreads from --source.
    Flood,
}

#[derive(Args, Debug, Serialize)]
pub struct CongestArgs {
    /// Graph in the `n m` / `u v` text format.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub program: Program,
    /// Flood source.
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Bits per edge per round (default 2*ceil(log2 n)).
    #[arg(long)]
    pub bandwidth: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: usize,
    /// meta.json whose partition is used for cut accounting.
    #[arg(long)]
    pub cut: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

pub fn congest(a: &CongestArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let cfg =
        SimConfig { bandwidth_bits: a.bandwidth.unwrap_or(2 * id_bits(g.n())), max_rounds: a.max_rounds, seed: a.seed };
    let alice = a.cut.as_ref().map(|p| read_partition(p, &g)).transpose()?;
    if matches!(a.program, Program::Flood) && a.source >= g.n() {
        bail!(Error::Input(format!("flood source {} is not a vertex", a.source)));
    }
    let stats = match a.program {
        Program::NaiveC4 => run(&g, &naive_c4_program(), &cfg, alice.as_ref())?,
        Program::OutputOne => run(&g, &OutputOne, &cfg, alice.as_ref())?,
        Program::Silent => run(&g, &Silent, &cfg, alice.as_ref())?,
        Program::Flood => run(&g, &Flood { source: a.source }, &cfg, alice.as_ref())?,
    };
    let mut body = json!({ "decision": stats.decision(), "config": cfg });
    if let Some(va) = &alice {
        let cut = g.edges().filter(|&(u, v)| va.contains(u) != va.contains(v)).count();
        body["cut_edges"] = json!(cut);
        body["cut_bound"] = json!(cut_traffic_bound_check(&stats, cut, &cfg));
    }
    let ok = !stats.timed_out;
    body["stats"] = json!(stats);
    write_json(a.stats_out.as_deref(), &envelope("run-congest", a, ok, body)?)?;
    if !ok {
        bail!(CheckFailed(format!("no decision within {} rounds", a.max_rounds)));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum ProtocolKind {
    Cycles(usize),
    Diamond,
}

fn parse_protocol(s: &str) -> std::result::Result<ProtocolKind, String> {
    if s == "diamond" {
        return Ok(ProtocolKind::Diamond);
    }
    match s.strip_prefix("cycles:").map(str::parse) {
        Some(Ok(k)) => Ok(ProtocolKind::Cycles(k)),
        _ => Err(format!("expected cycles:<k> or diamond, got {s:?}")),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// meta.json giving Alice's side.
    #[arg(long)]
    pub partition: PathBuf,
    /// `cycles:<k>` for 3 <= k <= 7, or `diamond`.
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: ProtocolKind,
    /// Also compare the union of both lists with the brute-force listing.
    #[arg(long)]
    pub check_oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn protocol(a: &ProtocolArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let va = read_partition(&a.partition, &g)?;
    let res = match a.protocol {
        ProtocolKind::Cycles(k) => cycle_listing_protocol(&g, &va, k)?,
        ProtocolKind::Diamond => diamond_listing_protocol(&g, &va)?,
    };
    let mut problems = Vec::new();
    if !res.bound.holds {
        problems.push(format!("payload {} exceeds {} = {}", res.bound.measured, res.bound.formula, res.bound.bound));
    }
    let mut body = json!({
        "a_list": res.a_list,
        "b_list": res.b_list,
        "listed": res.a_list.len() + res.b_list.len(),
        "payload_bits": res.transcript.payload_bits(),
        "framing_bits": res.transcript.framing_bits(),
        "transcript": res.transcript,
        "bound": res.bound,
        "notes": res.notes,
    });
    if a.check_oracle {
        let oracle = match a.protocol {
            ProtocolKind::Cycles(k) => list_induced_cycles(&g, k)?,
            ProtocolKind::Diamond => list_induced_diamonds(&g)?,
        };
        let matches = oracle == res.union();
        if !matches {
            problems.push(format!("union of lists ({}) differs from oracle ({})", res.union().len(), oracle.len()));
        }
        body["oracle"] = json!({ "count": oracle.len(), "matches": matches });
    }
    write_json(a.out.as_deref(), &envelope("run-protocol", a, problems.is_empty(), body)?)?;
    if !problems.is_empty() {
        bail!(CheckFailed(problems.join("; ")));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct ListingArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Cluster degree exponent.
    #[arg(long, default_value = "5/6")]
    pub delta: Fraction,
    /// Heavy/light threshold exponent.
    #[arg(long, default_value = "1/2")]
    pub epsilon: Fraction,
    /// Split components along sweep cuts below this conductance (0 disables).
    #[arg(long, default_value_t = 0.0)]
    pub split_conductance: f64,
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
    /// Compare with the brute-force listing and report per-phase coverage.
    #[arg(long)]
    pub check_oracle: bool,
}

pub fn listing(a: &ListingArgs) -> Result<()> {
    let g: Graph = read_graph(&a.graph)?;
    let params = ListingParams {
        epsilon: a.epsilon,
        decomposition: DecompositionParams {
            delta: a.delta,
            split_conductance: a.split_conductance,
            ..Default::default()
        },
    };
    let (found, stats) = list_induced_diamonds_congest(&g, &params)?;
    let mut problems = Vec::new();
    if !stats.decomposition.ok {
        problems.push(format!("decomposition violations: {:?}", stats.decomposition.violations));
    }
    if !stats.caps_ok {
        problems.push("gather or query cap exceeded".to_string());
    }
    let mut body = json!({ "listed": found.len(), "stats": stats });
    if a.check_oracle {
        let cov = coverage_report(&g, &stats)?;
        if !cov.ok {
            problems.push(format!("{} uncovered, {} spurious", cov.uncovered.len(), cov.spurious.len()));
        }
        body["coverage"] = json!(cov);
    }
    write_json(a.stats_out.as_deref(), &envelope("run-diamond-listing", a, problems.is_empty(), body)?)?;
    if !problems.is_empty() {
        bail!(CheckFailed(problems.join("; ")));
    }
    Ok(())
}
