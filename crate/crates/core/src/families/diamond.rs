//! The randomized induced-diamond family.
//!
//! `A` and `B` are split into `sqrt(n)` blocks of `sqrt(n)` vertices; every
//! block pair `(A_i, B_j)` is joined by a uniformly random perfect matching,
//! and each `a` in `A` has a private neighbour in `B'`.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Draft, FamilyInstance, FamilyTag, InputPair};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSubset};
use crate::search::list_induced_diamonds;

/// Fixtures with fewer good pairs than this fraction of `n^2` are rejected
/// and the next seed is tried.
const MIN_GOOD_PAIR_RATIO: f64 = 0.01;
const MAX_SEED_RETRIES: u64 = 64;

/// How quadruples are selected from the good pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadruplePolicy {
    /// Keep a good pair only if neither of its `(a, b1)` edges is used by an
    /// earlier quadruple. Without this, two quadruples sharing `a` and `b1`
    /// can combine into a 2-2 diamond for disjoint inputs.
    #[default]
    ConflictFree,
    /// Keep every good pair with exactly one endpoint in `A*`.
    Unfiltered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub a1: usize,
    pub a2: usize,
    pub b1: usize,
    pub b2: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiamondFixture {
    pub n: usize,
    /// Seed that produced this fixture (after any retries).
    pub seed: u64,
    pub requested_seed: u64,
    pub policy: QuadruplePolicy,
    #[serde(skip, default = "empty_graph")]
    pub graph: Graph,
    /// Unordered `A` pairs with exactly one common neighbour, as `(a, a')`, `a < a'`.
    pub good_pairs: Vec<(usize, usize)>,
    pub astar: Vec<usize>,
    pub quadruples: Vec<Quadruple>,
}

fn empty_graph() -> Graph {
    Graph::empty(0)
}

impl DiamondFixture {
    pub fn root(&self) -> usize {
        self.n.isqrt()
    }

    pub fn good_pair_ratio(&self) -> f64 {
        self.good_pairs.len() as f64 / (self.n * self.n) as f64
    }

    pub fn a_vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn b_vertices(&self) -> std::ops::Range<usize> {
        self.n..2 * self.n
    }

    pub fn b_prime_vertices(&self) -> std::ops::Range<usize> {
        2 * self.n..3 * self.n
    }

    pub fn is_a(&self, v: usize) -> bool {
        v < self.n
    }
}

pub fn build_diamond_fixture(n: usize, seed: u64) -> Result<DiamondFixture> {
    build_diamond_fixture_with(n, seed, QuadruplePolicy::default())
}

/// Ids: `a_i^j = (i-1)sqrt(n) + (j-1)`, `b_i^j = n + (i-1)sqrt(n) + (j-1)`,
/// `b'_t = 2n + t - 1`; `a_i^j` is matched to `b'_{j+(i-1)sqrt(n)}`.
pub fn build_diamond_fixture_with(n: usize, seed: u64, policy: QuadruplePolicy) -> Result<DiamondFixture> {
    let r = n.isqrt();
    if n < 4 || r * r != n {
        return Err(Error::input(format!("diamond family needs a perfect square n >= 4, got {n}")));
    }
    let mut last = None;
    for attempt in 0..MAX_SEED_RETRIES {
        let s = seed.wrapping_add(attempt);
        let fix = fixture_for_seed(n, s, seed, policy)?;
        if fix.good_pair_ratio() >= MIN_GOOD_PAIR_RATIO {
            return Ok(fix);
        }
        last = Some(fix.good_pairs.len());
    }
    Err(Error::Internal(format!(
        "no seed in {seed}..{} gave enough good pairs (last: {:?})",
        seed.wrapping_add(MAX_SEED_RETRIES),
        last
    )))
}

fn fixture_for_seed(n: usize, seed: u64, requested_seed: u64, policy: QuadruplePolicy) -> Result<DiamondFixture> {
    let r = n.isqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * r + n);
    for a in 0..n {
        edges.push((a, 2 * n + a));
    }
    for i in 0..r {
        for j in 0..r {
            let mut perm: Vec<usize> = (0..r).collect();
            perm.shuffle(&mut rng);
            for (t, &p) in perm.iter().enumerate() {
                edges.push((i * r + t, n + j * r + p));
            }
        }
    }
    let graph = Graph::from_edges(3 * n, edges)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut astar = order[..n / 2].to_vec();
    astar.sort_unstable();
    let in_astar: HashSet<usize> = astar.iter().copied().collect();

    let mut good_pairs = Vec::new();
    let mut quadruples = Vec::new();
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    for a in 0..n {
        for a2 in a + 1..n {
            if graph.neighbor_set(a).intersection_count(graph.neighbor_set(a2)) != 1 {
                continue;
            }
            good_pairs.push((a, a2));
            if in_astar.contains(&a) == in_astar.contains(&a2) {
                continue;
            }
            let mut common = graph.neighbor_set(a).clone();
            common.intersect_with(graph.neighbor_set(a2));
            let b1 = common.iter().next().unwrap();
            if policy == QuadruplePolicy::ConflictFree {
                if used.contains(&(a, b1)) || used.contains(&(a2, b1)) {
                    continue;
                }
                used.insert((a, b1));
                used.insert((a2, b1));
            }
            quadruples.push(Quadruple { a1: a, a2, b1, b2: 2 * n + a });
        }
    }
    Ok(DiamondFixture { n, seed, requested_seed, policy, graph, good_pairs, astar, quadruples })
}

/// Adds `a_{k,1} a_{k,2}` for `x_k = 1` and `b_{k,1} b_{k,2}` for `y_k = 1`.
pub fn build_diamond_family(fix: &DiamondFixture, inputs: &InputPair) -> Result<FamilyInstance> {
    inputs.expect_len(fix.quadruples.len(), "this diamond fixture")?;
    let (n, r) = (fix.n, fix.root());
    let mut d = Draft::new();
    for i in 1..=r {
        for j in 1..=r {
            d.vertex(format!("a_{i}^{j}"), true, &["A"]);
        }
    }
    for i in 1..=r {
        for j in 1..=r {
            d.vertex(format!("b_{i}^{j}"), false, &["B"]);
        }
    }
    for t in 1..=n {
        d.vertex(format!("b'_{t}"), false, &["B'"]);
    }
    for (u, v) in fix.graph.edges() {
        d.edge(u, v);
    }
    for (k, q) in fix.quadruples.iter().enumerate() {
        if inputs.x.get(k) {
            d.edge(q.a1, q.a2);
        }
        if inputs.y.get(k) {
            d.edge(q.b1, q.b2);
        }
    }
    let tag = FamilyTag::Diamond { n, seed: fix.seed, requested_seed: fix.requested_seed, policy: fix.policy };
    d.finish(tag, inputs.clone())
}

/// Induced diamonds with exactly two vertices on each side.
pub fn list_22_diamonds(inst: &FamilyInstance) -> Result<BTreeSet<VertexSubset>> {
    Ok(list_induced_diamonds(&inst.graph)?
        .into_iter()
        .filter(|s| s.iter().filter(|&v| inst.in_a(v)).count() == 2)
        .collect())
}

pub fn has_22_diamond(inst: &FamilyInstance) -> Result<bool> {
    Ok(!list_22_diamonds(inst)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::graph::is_induced_diamond;

    #[test]
    fn fixture_shape() {
        let fix = build_diamond_fixture(4, 7).unwrap();
        assert_eq!(fix.graph.n(), 12);
        let ab = fix.graph.edges().filter(|&(u, v)| u < 4 && (4..8).contains(&v)).count();
        let abp = fix.graph.edges().filter(|&(u, v)| u < 4 && v >= 8).count();
        assert_eq!((ab, abp), (8, 4));
        assert!(build_diamond_fixture(5, 0).is_err());
    }

    #[test]
    fn good_pairs_are_exact() {
        let fix = build_diamond_fixture(16, 3).unwrap();
        let g = &fix.graph;
        for a in 0..16 {
            for a2 in a + 1..16 {
                let common = (0..g.n()).filter(|&w| g.has_edge(a, w) && g.has_edge(a2, w)).count();
                assert_eq!(common == 1, fix.good_pairs.contains(&(a, a2)));
            }
        }
        let astar: HashSet<usize> = fix.astar.iter().copied().collect();
        assert_eq!(astar.len(), 8);
        for q in &fix.quadruples {
            assert!(fix.good_pairs.contains(&(q.a1, q.a2)));
            assert!(g.has_edge(q.a1, q.b1) && g.has_edge(q.a2, q.b1));
            assert!(g.has_edge(q.a1, q.b2) && q.b2 >= 32);
            assert_ne!(astar.contains(&q.a1), astar.contains(&q.a2));
        }
    }

    #[test]
    fn determinism() {
        let a = build_diamond_fixture(16, 11).unwrap();
        let b = build_diamond_fixture(16, 11).unwrap();
        assert_eq!(a.graph.to_text(), b.graph.to_text());
        assert_eq!(a.quadruples, b.quadruples);
    }

    #[test]
    fn planted_diamonds() {
        let fix = build_diamond_fixture(4, 1).unwrap();
        let k = fix.quadruples.len();
        assert!(k > 0);
        let zero = build_diamond_family(&fix, &InputPair::zeros(k)).unwrap();
        assert_eq!(zero.graph.to_text(), fix.graph.to_text());
        assert_eq!(zero.cut_size(), 8 + 4);
        assert!(!has_22_diamond(&zero).unwrap());
        for t in 0..k {
            let b = BitString::with_ones(k, &[t]).unwrap();
            let inst = build_diamond_family(&fix, &InputPair::new(b.clone(), b).unwrap()).unwrap();
            let q = fix.quadruples[t];
            let s = VertexSubset::from_unchecked([q.a1, q.a2, q.b1, q.b2]);
            assert!(is_induced_diamond(&inst.graph, &s).unwrap());
            assert!(has_22_diamond(&inst).unwrap());
        }
    }

    /// Two unfiltered quadruples sharing `a` and `b1` create a 2-2 diamond from
    /// disjoint inputs; the conflict-free policy never admits such a pair.
    #[test]
    fn unfiltered_policy_breaks_disjointness() {
        let mut witnessed = false;
        for seed in 0..20 {
            let fix = build_diamond_fixture_with(16, seed, QuadruplePolicy::Unfiltered).unwrap();
            let qs = &fix.quadruples;
            'outer: for (k, p) in qs.iter().enumerate() {
                for (k2, q) in qs.iter().enumerate() {
                    if k == k2 || p.b1 != q.b1 || !(q.a1 == p.a1 || q.a1 == p.a2) {
                        continue;
                    }
                    let len = qs.len();
                    let x = BitString::with_ones(len, &[k]).unwrap();
                    let y = BitString::with_ones(len, &[k2]).unwrap();
                    let inst = build_diamond_family(&fix, &InputPair::new(x, y).unwrap()).unwrap();
                    assert!(has_22_diamond(&inst).unwrap());
                    witnessed = true;
                    break 'outer;
                }
            }
            let free = build_diamond_fixture_with(16, seed, QuadruplePolicy::ConflictFree).unwrap();
            let mut seen = HashSet::new();
            for q in &free.quadruples {
                assert!(seen.insert((q.a1, q.b1)) && seen.insert((q.a2, q.b1)));
            }
        }
        assert!(witnessed);
    }
}
