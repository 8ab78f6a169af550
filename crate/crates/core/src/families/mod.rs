//! Lower-bound graph families `G_{x,y}` and their verifiers.

mod c4;
mod c8l;
mod diamond;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};

pub use c4::{build_c4_family, build_ck_subdivided_family};
pub use c8l::{
    build_c8l_family, build_c8l_family_with, check_block_counts, cut_size_c8l, make_code_assignment, BlockCountReport,
    CodeAssignment,
};
pub use diamond::{
    build_diamond_family, build_diamond_fixture, build_diamond_fixture_with, has_22_diamond, list_22_diamonds,
    DiamondFixture, Quadruple, QuadruplePolicy,
};
pub use verify::{
    sampled_pairs, verify_family_conditions, ConditionOutcome, Counterexample, DropLowestCutEdge, FamilyBuilder,
    FamilySpec, Predicate, VerifyOptions, VerifyReport,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Position of the one-based bit `x_{ij}` (bit number `i + (j-1)n`) in a zero-based string.
pub fn bit_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!((1..=n).contains(&i) && (1..=n).contains(&j));
    (i - 1) + (j - 1) * n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputPair {
    pub x: BitString,
    pub y: BitString,
}

impl InputPair {
    pub fn new(x: BitString, y: BitString) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::input(format!("input length mismatch: {} vs {}", x.len(), y.len())));
        }
        Ok(InputPair { x, y })
    }

    pub fn zeros(k: usize) -> Self {
        InputPair { x: BitString::zeros(k), y: BitString::zeros(k) }
    }

    pub fn k(&self) -> usize {
        self.x.len()
    }

    fn expect_len(&self, k: usize, what: &str) -> Result<()> {
        if self.x.len() != k || self.y.len() != k {
            return Err(Error::input(format!(
                "{what} needs inputs of length {k}, got {} and {}",
                self.x.len(),
                self.y.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    C4 { n: usize },
    Subdivided { n: usize, k: usize },
    C8l { n: usize, ell: usize, m: usize, hubs: bool },
    Diamond { n: usize, seed: u64, requested_seed: u64, policy: QuadruplePolicy },
}

impl FamilyTag {
    pub fn name(&self) -> String {
        match self {
            FamilyTag::C4 { n } => format!("c4(n={n})"),
            FamilyTag::Subdivided { n, k } => format!("subdivided(n={n},k={k})"),
            FamilyTag::C8l { n, ell, m, hubs } => format!("c8l(n={n},ell={ell},m={m},hubs={hubs})"),
            FamilyTag::Diamond { n, seed, policy, .. } => {
                format!("diamond(n={n},seed={seed},policy={policy:?})")
            }
        }
    }
}

/// One graph of a family together with its fixed bipartition.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub graph: Graph,
    pub va: VertexSubset,
    pub vb: VertexSubset,
    /// Cut edges as `(alice, bob)` pairs, sorted.
    pub cut_edges: Vec<(usize, usize)>,
    pub labels: Vec<String>,
    /// Named vertex groups (blocks, sub-blocks, code sets).
    pub groups: BTreeMap<String, Vec<usize>>,
    pub tag: FamilyTag,
    pub inputs: InputPair,
}

impl FamilyInstance {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn cut_size(&self) -> usize {
        self.cut_edges.len()
    }

    pub fn in_a(&self, v: usize) -> bool {
        self.va.contains(v)
    }

    pub fn group(&self, name: &str) -> &[usize] {
        self.groups.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Edges with both endpoints on Alice's side.
    pub fn alice_edges(&self) -> BTreeSet<(usize, usize)> {
        self.graph.edges().filter(|&(u, v)| self.in_a(u) && self.in_a(v)).collect()
    }

    pub fn bob_edges(&self) -> BTreeSet<(usize, usize)> {
        self.graph.edges().filter(|&(u, v)| !self.in_a(u) && !self.in_a(v)).collect()
    }

    pub fn meta(&self) -> BundleMeta {
        BundleMeta {
            schema_version: SCHEMA_VERSION,
            tag: self.tag.clone(),
            n_vertices: self.n(),
            k: self.inputs.k(),
            va: self.va.members().to_vec(),
            vb: self.vb.members().to_vec(),
            cut_edges: self.cut_edges.clone(),
            labels: self.labels.clone(),
            groups: self.groups.clone(),
        }
    }

    /// Writes `graph.txt`, `meta.json` and `inputs.json` into `dir`.
    pub fn write_bundle(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("graph.txt"), self.graph.to_text())?;
        std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&self.meta())? + "\n")?;
        let inputs = BundleInputs {
            schema_version: SCHEMA_VERSION,
            k: self.inputs.k(),
            x: self.inputs.x.to_hex(),
            y: self.inputs.y.to_hex(),
        };
        std::fs::write(dir.join("inputs.json"), serde_json::to_string_pretty(&inputs)? + "\n")?;
        Ok(())
    }

    pub fn read_bundle(dir: &Path) -> Result<Self> {
        let graph = Graph::read_text(std::io::BufReader::new(std::fs::File::open(dir.join("graph.txt"))?))?;
        let meta = BundleMeta::read(&dir.join("meta.json"))?;
        let inputs: BundleInputs = serde_json::from_str(&std::fs::read_to_string(dir.join("inputs.json"))?)?;
        let pair =
            InputPair::new(BitString::from_hex(&inputs.x, inputs.k)?, BitString::from_hex(&inputs.y, inputs.k)?)?;
        FamilyInstance::from_parts(graph, meta, pair)
    }

    pub fn from_parts(graph: Graph, meta: BundleMeta, inputs: InputPair) -> Result<Self> {
        if meta.n_vertices != graph.n() {
            return Err(Error::input("meta.json vertex count disagrees with graph.txt"));
        }
        let va = VertexSubset::from_sorted(&graph, meta.va)?;
        let vb = VertexSubset::from_sorted(&graph, meta.vb)?;
        let cut = cut_between(&graph, &va, &vb)?;
        if cut != meta.cut_edges {
            return Err(Error::input("meta.json cut edges disagree with graph and partition"));
        }
        Ok(FamilyInstance {
            graph,
            va,
            vb,
            cut_edges: cut,
            labels: meta.labels,
            groups: meta.groups,
            tag: meta.tag,
            inputs,
        })
    }
}

/// Contents of `meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub schema_version: u32,
    pub tag: FamilyTag,
    pub n_vertices: usize,
    pub k: usize,
    pub va: Vec<usize>,
    pub vb: Vec<usize>,
    pub cut_edges: Vec<(usize, usize)>,
    pub labels: Vec<String>,
    pub groups: BTreeMap<String, Vec<usize>>,
}

impl BundleMeta {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BundleInputs {
    schema_version: u32,
    k: usize,
    x: String,
    y: String,
}

/// Cut edges as `(alice, bob)` pairs, after checking that the sides partition the vertices.
pub fn cut_between(g: &Graph, va: &VertexSubset, vb: &VertexSubset) -> Result<Vec<(usize, usize)>> {
    if va.len() + vb.len() != g.n() || va.iter().any(|v| vb.contains(v)) {
        return Err(Error::input("va and vb do not partition the vertex set"));
    }
    let mut cut: Vec<(usize, usize)> = g
        .edges()
        .filter_map(|(u, v)| match (va.contains(u), va.contains(v)) {
            (true, false) => Some((u, v)),
            (false, true) => Some((v, u)),
            _ => None,
        })
        .collect();
    cut.sort_unstable();
    Ok(cut)
}

/// Incremental construction shared by the builders.
pub(crate) struct Draft {
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
    alice: Vec<bool>,
    groups: BTreeMap<String, Vec<usize>>,
}

impl Draft {
    pub(crate) fn new() -> Self {
        Draft { edges: Vec::new(), labels: Vec::new(), alice: Vec::new(), groups: BTreeMap::new() }
    }

    pub(crate) fn vertex(&mut self, label: String, alice: bool, groups: &[&str]) -> usize {
        let id = self.labels.len();
        self.labels.push(label);
        self.alice.push(alice);
        for g in groups {
            self.groups.entry((*g).to_string()).or_default().push(id);
        }
        id
    }

    pub(crate) fn group(&mut self, name: String, members: Vec<usize>) {
        self.groups.insert(name, members);
    }

    pub(crate) fn edge(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
    }

    pub(crate) fn n(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn is_alice(&self, v: usize) -> bool {
        self.alice[v]
    }

    /// Replaces edge `{a, b}` (with `a` on Alice's side) by a path through `q`
    /// new vertices. The first `ceil(q/2)` new vertices join Alice's side, so
    /// the path still crosses the cut exactly once.
    pub(crate) fn subdivide(&mut self, a: usize, b: usize, q: usize, prefix: &str) -> Result<()> {
        let pos = self
            .edges
            .iter()
            .position(|&e| e == (a, b) || e == (b, a))
            .ok_or_else(|| Error::Internal(format!("no edge ({a}, {b}) to subdivide")))?;
        if q == 0 {
            return Ok(());
        }
        self.edges.swap_remove(pos);
        let mut prev = a;
        for t in 0..q {
            let alice = t < q.div_ceil(2);
            let p = self.vertex(format!("{prefix}:{}", t + 1), alice, &["pad"]);
            self.edge(prev, p);
            prev = p;
        }
        self.edge(prev, b);
        Ok(())
    }

    pub(crate) fn finish(self, tag: FamilyTag, inputs: InputPair) -> Result<FamilyInstance> {
        let n = self.labels.len();
        let graph = Graph::from_edges(n, self.edges)?;
        let va = VertexSubset::from_unchecked((0..n).filter(|&v| self.alice[v]));
        let vb = VertexSubset::from_unchecked((0..n).filter(|&v| !self.alice[v]));
        let cut_edges = cut_between(&graph, &va, &vb)?;
        Ok(FamilyInstance { graph, va, vb, cut_edges, labels: self.labels, groups: self.groups, tag, inputs })
    }
}
