use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use induced_core::bits::BitString;
use induced_core::families::{
    build_diamond_fixture_with, verify_family_conditions, BundleMeta, DropLowestCutEdge, FamilyBuilder, FamilyInstance,
    FamilySpec, FamilyTag, InputPair, QuadruplePolicy, VerifyOptions,
};
use induced_core::graph::{diameter, disj, Diameter};
use induced_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{envelope, write_json};
use crate::CheckFailed;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    C4,
    Subdivided,
    C8l,
    Diamond,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    ConflictFree,
    Unfiltered,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    /// Family to build.
    #[arg(value_enum, required_unless_present = "bundle")]
    pub family: Option<Kind>,
    /// Block size; for the diamond family the number of A vertices (a square).
    #[arg(long, required_unless_present = "bundle")]
    pub n: Option<usize>,
    /// Cycle length for the subdivided family (5 and up).
    #[arg(long)]
    pub k: Option<usize>,
    /// Sub-block size for the C_8l family.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Padding for the C_8l family (0..=7).
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// Leave out the c_A/c_B hub vertices of the C_8l family.
    #[arg(long)]
    pub no_hubs: bool,
    /// Fixture seed(s) for the diamond family; required there.
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<u64>,
    /// How diamond quadruples are picked from the good pairs.
    #[arg(long, value_enum, default_value = "conflict-free")]
    pub policy: Policy,
    /// Take the family from an existing bundle directory instead.
    #[arg(long, conflicts_with = "family")]
    pub bundle: Option<PathBuf>,
}

impl FamilyArgs {
    /// One builder per requested seed (a single one for deterministic families).
    fn specs(&self) -> Result<Vec<FamilySpec>> {
        if let Some(dir) = &self.bundle {
            let meta =
                BundleMeta::read(&dir.join("meta.json")).with_context(|| format!("reading {}", dir.display()))?;
            return Ok(vec![spec_from_tag(&meta.tag)?]);
        }
        let n = self.n.expect("clap enforces --n");
        let spec = match self.family.expect("clap enforces family") {
            Kind::C4 => FamilySpec::C4 { n },
            Kind::Subdivided => {
                let k = self.k.ok_or_else(|| Error::Input("the subdivided family needs --k".into()))?;
                FamilySpec::Subdivided { n, k }
            }
            Kind::C8l => FamilySpec::C8l { n, ell: self.ell, m: self.m, hubs: !self.no_hubs },
            Kind::Diamond => {
                if self.seed.is_empty() {
                    return Err(Error::Input("the diamond family needs --seed".into()).into());
                }
                let policy = match self.policy {
                    Policy::ConflictFree => QuadruplePolicy::ConflictFree,
                    Policy::Unfiltered => QuadruplePolicy::Unfiltered,
                };
                return self
                    .seed
                    .iter()
                    .map(|&s| Ok(FamilySpec::Diamond { fixture: Arc::new(build_diamond_fixture_with(n, s, policy)?) }))
                    .collect();
            }
        };
        Ok(vec![spec])
    }
}

fn spec_from_tag(tag: &FamilyTag) -> Result<FamilySpec> {
    Ok(match *tag {
        FamilyTag::C4 { n } => FamilySpec::C4 { n },
        FamilyTag::Subdivided { n, k } => FamilySpec::Subdivided { n, k },
        FamilyTag::C8l { n, ell, m, hubs } => FamilySpec::C8l { n, ell, m, hubs },
        FamilyTag::Diamond { n, requested_seed, policy, .. } => {
            FamilySpec::Diamond { fixture: Arc::new(build_diamond_fixture_with(n, requested_seed, policy)?) }
        }
    })
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Alice's input as 0/1 characters, bit 0 first (default all zero).
    #[arg(long)]
    pub x: Option<String>,
    /// Bob's input as 0/1 characters, bit 0 first (default all zero).
    #[arg(long)]
    pub y: Option<String>,
    /// Draw both inputs uniformly from this seed instead.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub input_seed: Option<u64>,
    /// Bundle directory to write.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_input(s: Option<&str>, k: usize) -> Result<BitString> {
    match s {
        None => Ok(BitString::zeros(k)),
        Some(s) => Ok(BitString::parse_binary(s)?),
    }
}

pub fn gen(a: &GenArgs) -> Result<()> {
    if a.family.bundle.is_some() {
        bail!(Error::Input("gen-family builds from flags; --bundle is for verify-family".into()));
    }
    if a.family.seed.len() > 1 {
        bail!(Error::Input("gen-family takes a single --seed".into()));
    }
    let spec = a.family.specs()?.remove(0);
    let k = spec.input_len();
    let inputs = match a.input_seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut draw = || BitString::from_bools((0..k).map(|_| rng.gen_bool(0.5)).collect());
            let x = draw();
            InputPair::new(x, draw())?
        }
        None => InputPair::new(parse_input(a.x.as_deref(), k)?, parse_input(a.y.as_deref(), k)?)?,
    };
    let inst = spec.build(&inputs)?;
    inst.write_bundle(&a.out)?;
    let mut body = summary(&inst)?;
    if let FamilySpec::Diamond { fixture } = &spec {
        body["good_pairs"] = json!(fixture.good_pairs.len());
        body["good_pair_ratio"] = json!(fixture.good_pair_ratio());
        body["fixture_seed"] = json!(fixture.seed);
    }
    write_json(None, &envelope("gen-family", a, true, body)?)
}

fn summary(inst: &FamilyInstance) -> Result<serde_json::Value> {
    let diam = match diameter(&inst.graph) {
        Diameter::Finite(d) => json!(d),
        Diameter::Infinite => json!(null),
    };
    Ok(json!({
        "family": inst.tag.name(),
        "vertices": inst.n(),
        "edges": inst.graph.edge_count(),
        "cut_edges": inst.cut_size(),
        "input_len": inst.inputs.k(),
        "disj": disj(&inst.inputs.x, &inst.inputs.y)?,
        "diameter": diam,
    }))
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Remove the lowest cut edge (a matching edge) from every member.
    DropMatchingEdge,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Sweep every input pair when the input length is at most this.
    #[arg(long, default_value_t = 10)]
    pub exhaustive_max_k: usize,
    /// Random pairs on top of the designed ones when sampling.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    /// Negative control: verify a deliberately broken builder.
    #[arg(long, value_enum)]
    pub corrupt: Option<Corruption>,
    /// Report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let opts = VerifyOptions { exhaustive_max_k: a.exhaustive_max_k, samples: a.samples, seed: a.sample_seed };
    let mut reports = Vec::new();
    let mut ratios = Vec::new();
    for spec in a.family.specs()? {
        if let FamilySpec::Diamond { fixture } = &spec {
            ratios.push(json!({"seed": fixture.seed, "good_pair_ratio": fixture.good_pair_ratio()}));
        }
        let r = match a.corrupt {
            Some(Corruption::DropMatchingEdge) => verify_family_conditions(&DropLowestCutEdge(spec), &opts)?,
            None => verify_family_conditions(&spec, &opts)?,
        };
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.passed);
    // the resolved family names stand in for the flags, so a bundle and the
    // flags it was built from give the same report
    let params = json!({
        "families": reports.iter().map(|r| r.family.clone()).collect::<Vec<_>>(),
        "exhaustive_max_k": a.exhaustive_max_k,
        "samples": a.samples,
        "sample_seed": a.sample_seed,
        "corrupt": a.corrupt,
    });
    let mut body = json!({ "reports": reports });
    if !ratios.is_empty() {
        body["good_pair_ratios"] = json!(ratios);
    }
    write_json(a.out.as_deref(), &envelope("verify-family", &params, ok, body)?)?;
    if !ok {
        let first = reports.iter().flat_map(|r| r.counterexamples.iter().map(move |c| (r, c))).next();
        let msg = match first {
            Some((r, c)) => format!(
                "{}: {} failed at x={} y={} (disj {}, witness {:?}): {}",
                r.family, c.condition, c.x, c.y, c.disj, c.witness, c.detail
            ),
            None => "verification failed".into(),
        };
        bail!(CheckFailed(msg));
    }
    Ok(())
}
