//! Checks the four lower-bound-family conditions over many input pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_c4_family, build_c8l_family_with, build_ck_subdivided_family, build_diamond_family, list_22_diamonds,
    DiamondFixture, FamilyInstance, InputPair, SCHEMA_VERSION,
};
use crate::bits::BitString;
use crate::error::Result;
use crate::graph::disj;
use crate::search::find_induced_cycle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    InducedCycle(usize),
    Diamond22,
}

impl Predicate {
    /// Evaluates the predicate, returning a witness vertex set when it holds.
    pub fn witness(&self, inst: &FamilyInstance) -> Result<Option<Vec<usize>>> {
        match *self {
            Predicate::InducedCycle(k) => find_induced_cycle(&inst.graph, k),
            Predicate::Diamond22 => Ok(list_22_diamonds(inst)?.into_iter().next().map(|s| s.members().to_vec())),
        }
    }
}

/// Anything that maps an input pair to a family member.
pub trait FamilyBuilder: Sync {
    fn name(&self) -> String;
    fn input_len(&self) -> usize;
    fn build(&self, inputs: &InputPair) -> Result<FamilyInstance>;
    fn predicate(&self) -> Predicate;
}

#[derive(Clone, Debug)]
pub enum FamilySpec {
    C4 { n: usize },
    Subdivided { n: usize, k: usize },
    C8l { n: usize, ell: usize, m: usize, hubs: bool },
    Diamond { fixture: Arc<DiamondFixture> },
}

impl FamilyBuilder for FamilySpec {
    fn name(&self) -> String {
        match self {
            FamilySpec::C4 { n } => format!("c4(n={n})"),
            FamilySpec::Subdivided { n, k } => format!("subdivided(n={n},k={k})"),
            FamilySpec::C8l { n, ell, m, hubs } => format!("c8l(n={n},ell={ell},m={m},hubs={hubs})"),
            FamilySpec::Diamond { fixture } => {
                format!("diamond(n={},seed={},policy={:?})", fixture.n, fixture.seed, fixture.policy)
            }
        }
    }

    fn input_len(&self) -> usize {
        match self {
            FamilySpec::C4 { n } | FamilySpec::Subdivided { n, .. } | FamilySpec::C8l { n, .. } => n * n,
            FamilySpec::Diamond { fixture } => fixture.quadruples.len(),
        }
    }

    fn build(&self, inputs: &InputPair) -> Result<FamilyInstance> {
        match self {
            FamilySpec::C4 { n } => build_c4_family(*n, inputs),
            FamilySpec::Subdivided { n, k } => build_ck_subdivided_family(*n, *k, inputs),
            FamilySpec::C8l { n, ell, m, hubs } => build_c8l_family_with(*n, *ell, *m, *hubs, inputs),
            FamilySpec::Diamond { fixture } => build_diamond_family(fixture, inputs),
        }
    }

    fn predicate(&self) -> Predicate {
        match self {
            FamilySpec::C4 { .. } => Predicate::InducedCycle(4),
            FamilySpec::Subdivided { k, .. } => Predicate::InducedCycle(*k),
            FamilySpec::C8l { ell, m, .. } => Predicate::InducedCycle(8 * ell + m),
            FamilySpec::Diamond { .. } => Predicate::Diamond22,
        }
    }
}

/// Mutation wrapper: removes the lowest cut edge from every member.
pub struct DropLowestCutEdge<B>(pub B);

impl<B: FamilyBuilder> FamilyBuilder for DropLowestCutEdge<B> {
    fn name(&self) -> String {
        format!("{}+drop-lowest-cut-edge", self.0.name())
    }

    fn input_len(&self) -> usize {
        self.0.input_len()
    }

    fn build(&self, inputs: &InputPair) -> Result<FamilyInstance> {
        let mut inst = self.0.build(inputs)?;
        if let Some(&(a, b)) = inst.cut_edges.first() {
            inst.graph.remove_edge(a, b);
            inst.cut_edges.remove(0);
        }
        Ok(inst)
    }

    fn predicate(&self) -> Predicate {
        self.0.predicate()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Sweep every pair when `K` is at most this.
    pub exhaustive_max_k: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exhaustive_max_k: 10, samples: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub name: String,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub condition: String,
    pub x: String,
    pub y: String,
    pub disj: u8,
    pub predicate: bool,
    pub witness: Option<Vec<usize>>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub family: String,
    pub input_len: usize,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    pub predicate_true: usize,
    pub conditions: Vec<ConditionOutcome>,
    /// First few failures, verbatim.
    pub counterexamples: Vec<Counterexample>,
    pub passed: bool,
}

const MAX_COUNTEREXAMPLES: usize = 16;
const CONDITIONS: [&str; 4] = [
    "vertex set and cut edges fixed",
    "alice edges depend only on x",
    "bob edges depend only on y",
    "predicate iff disj = 0",
];

struct PairOutcome {
    failures: [Option<String>; 4],
    disj: u8,
    predicate: bool,
    witness: Option<Vec<usize>>,
}

/// Builds each pair's instance and checks the four conditions against
/// `(0, 0)`, `(x, 0)` and `(0, y)` reference instances.
pub fn verify_family_conditions<B: FamilyBuilder + ?Sized>(builder: &B, opts: &VerifyOptions) -> Result<VerifyReport> {
    let k = builder.input_len();
    let exhaustive = k <= opts.exhaustive_max_k;
    let pairs = if exhaustive { all_pairs(k) } else { sampled_pairs(k, opts.samples, opts.seed) };
    let zero = BitString::zeros(k);
    let reference = builder.build(&InputPair::zeros(k))?;

    let xs: BTreeSet<&BitString> = pairs.iter().map(|p| &p.x).collect();
    let ys: BTreeSet<&BitString> = pairs.iter().map(|p| &p.y).collect();
    let alice_ref: BTreeMap<&BitString, BTreeSet<(usize, usize)>> = xs
        .into_par_iter()
        .map(|x| Ok((x, builder.build(&InputPair::new(x.clone(), zero.clone())?)?.alice_edges())))
        .collect::<Result<_>>()?;
    let bob_ref: BTreeMap<&BitString, BTreeSet<(usize, usize)>> = ys
        .into_par_iter()
        .map(|y| Ok((y, builder.build(&InputPair::new(zero.clone(), y.clone())?)?.bob_edges())))
        .collect::<Result<_>>()?;

    let predicate = builder.predicate();
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|p| {
            let inst = builder.build(p)?;
            let mut failures: [Option<String>; 4] = Default::default();
            if inst.n() != reference.n() || inst.va != reference.va || inst.cut_edges != reference.cut_edges {
                failures[0] = Some("vertex set, partition or cut differs from the (0,0) instance".into());
            }
            if inst.alice_edges() != alice_ref[&p.x] {
                failures[1] = Some("alice-internal edges differ from the (x,0) instance".into());
            }
            if inst.bob_edges() != bob_ref[&p.y] {
                failures[2] = Some("bob-internal edges differ from the (0,y) instance".into());
            }
            let d = disj(&p.x, &p.y)?;
            let witness = predicate.witness(&inst)?;
            let holds = witness.is_some();
            if holds != (d == 0) {
                failures[3] = Some(format!("predicate {holds} but disj {d}"));
            }
            Ok(PairOutcome { failures, disj: d, predicate: holds, witness })
        })
        .collect::<Result<_>>()?;

    let mut conditions: Vec<ConditionOutcome> =
        CONDITIONS.iter().map(|c| ConditionOutcome { name: c.to_string(), failures: 0 }).collect();
    let mut counterexamples = Vec::new();
    for (p, o) in pairs.iter().zip(&outcomes) {
        for (c, f) in o.failures.iter().enumerate() {
            if let Some(detail) = f {
                conditions[c].failures += 1;
                if counterexamples.len() < MAX_COUNTEREXAMPLES {
                    counterexamples.push(Counterexample {
                        condition: CONDITIONS[c].into(),
                        x: p.x.to_string(),
                        y: p.y.to_string(),
                        disj: o.disj,
                        predicate: o.predicate,
                        witness: o.witness.clone(),
                        detail: detail.clone(),
                    });
                }
            }
        }
    }
    let passed = conditions.iter().all(|c| c.failures == 0);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        family: builder.name(),
        input_len: k,
        exhaustive,
        pairs_checked: pairs.len(),
        predicate_true: outcomes.iter().filter(|o| o.predicate).count(),
        conditions,
        counterexamples,
        passed,
    })
}

fn all_pairs(k: usize) -> Vec<InputPair> {
    let count = 1u64 << k;
    let strings: Vec<BitString> = (0..count).map(|v| BitString::from_uint(k, v)).collect();
    let mut out = Vec::with_capacity(strings.len() * strings.len());
    for x in &strings {
        for y in &strings {
            out.push(InputPair { x: x.clone(), y: y.clone() });
        }
    }
    out
}

/// Designed pairs first (zero, every single shared index, complements), then
/// random pairs rotating between uniform, disjoint and single-overlap draws.
pub fn sampled_pairs(k: usize, samples: usize, seed: u64) -> Vec<InputPair> {
    let mut out = vec![InputPair::zeros(k)];
    for i in 0..k {
        let b = BitString::with_ones(k, &[i]).unwrap();
        out.push(InputPair { x: b.clone(), y: b });
    }
    if k > 0 {
        let half: Vec<usize> = (0..k).step_by(2).collect();
        let x = BitString::with_ones(k, &half).unwrap();
        let y = BitString::from_bools(x.as_slice().iter().map(|b| !b).collect());
        out.push(InputPair { x: x.clone(), y: y.clone() });
        out.push(InputPair { x: y, y: x });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..samples {
        let x = BitString::from_bools((0..k).map(|_| rng.gen_bool(0.5)).collect());
        let mut y = BitString::from_bools((0..k).map(|_| rng.gen_bool(0.5)).collect());
        match t % 3 {
            0 => {}
            _ => {
                for i in 0..k {
                    if x.get(i) {
                        y.set(i, false);
                    }
                }
                if t % 3 == 2 && k > 0 {
                    let i = sample(&mut rng, k, 1).index(0);
                    y.set(i, true);
                    let mut x = x;
                    x.set(i, true);
                    out.push(InputPair { x, y });
                    continue;
                }
            }
        }
        out.push(InputPair { x, y });
    }
    out
}
