//! The induced `C_{8l}` family: sub-blocks of `l` vertices tied to shared code
//! vertices through an injection into `l`-subsets, plus the two hub vertices
//! that bring the diameter down to 3.

use serde::{Deserialize, Serialize};

use super::{bit_index, Draft, FamilyInstance, FamilyTag, InputPair};
use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::search::binomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeAssignment {
    pub n: usize,
    pub ell: usize,
    pub alphabet: usize,
    /// `codes[i]` is the one-based code of sub-block `i+1`, sorted ascending.
    pub codes: Vec<Vec<usize>>,
}

/// Smallest `a` with `a >= l * n^(1/l)`, in exact integer arithmetic.
fn alphabet_size(n: usize, ell: usize) -> usize {
    let target = (ell as u128).saturating_pow(ell as u32).saturating_mul(n as u128);
    let mut a = 1usize;
    while (a as u128).saturating_pow(ell as u32) < target {
        a += 1;
    }
    a
}

/// The `rank`-th `l`-subset of the naturals in colexicographic order, zero-based elements.
fn colex_unrank(mut rank: u128, ell: usize) -> Vec<usize> {
    let mut out = vec![0; ell];
    for slot in (0..ell).rev() {
        let k = slot as u128 + 1;
        let mut c = slot;
        while binomial(c as u128 + 1, k) <= rank {
            c += 1;
        }
        rank -= binomial(c as u128, k);
        out[slot] = c;
    }
    out
}

pub fn make_code_assignment(n: usize, ell: usize) -> Result<CodeAssignment> {
    if ell == 0 {
        return Err(Error::input("code length must be at least 1"));
    }
    let alphabet = alphabet_size(n, ell);
    if binomial(alphabet as u128, ell as u128) < n as u128 {
        return Err(Error::Internal(format!("C({alphabet}, {ell}) < {n}: code assignment infeasible")));
    }
    let codes = (0..n).map(|i| colex_unrank(i as u128, ell).into_iter().map(|c| c + 1).collect()).collect();
    Ok(CodeAssignment { n, ell, alphabet, codes })
}

/// Cut size of every hubbed `C_{8l}` instance: both code matchings plus the hub edge.
pub fn cut_size_c8l(n: usize, ell: usize, _m: usize) -> Result<usize> {
    Ok(2 * make_code_assignment(n, ell)?.alphabet + 1)
}

/// Builds the family member for `(x, y)`, including the two hubs.
pub fn build_c8l_family(n: usize, ell: usize, m: usize, inputs: &InputPair) -> Result<FamilyInstance> {
    build_c8l_family_with(n, ell, m, true, inputs)
}

/// Builds the family member for `(x, y)`.
///
/// The hubs `c_A` (adjacent to all of Alice's side) and `c_B` (all of Bob's
/// side, plus `c_A`) bring the diameter down to 3, but they also close induced
/// `8l`-cycles through one side only, for example
/// `c_B u_B^2 u_A^2 a1^2 a1^1 a2^1 l_A^1 l_B^1` when only `x_{1,1}` is set.
/// With `hubs = false` the graph is the plain construction, for which the
/// cycle predicate encodes set disjointness.
///
/// Vertex ids: `a1^{i,j} = (i-1)l + (j-1)`, then `A2`, `B1`, `B2` at offsets
/// `nl`, `2nl`, `3nl`; then `U_A`, `L_A`, `U_B`, `L_B` (each `alphabet` long),
/// `c_A`, `c_B` when present, and finally padding vertices.
///
/// With `m > 0`, each `U_A U_B` matching edge gets `floor(m/2)` inserted vertices
/// and each `L_A L_B` edge `ceil(m/2)`, so for `l = 1` the target cycle has length `8 + m`.
pub fn build_c8l_family_with(n: usize, ell: usize, m: usize, hubs: bool, inputs: &InputPair) -> Result<FamilyInstance> {
    if n < 2 || ell < 1 {
        return Err(Error::input(format!("need n >= 2 and ell >= 1, got n={n}, ell={ell}")));
    }
    if m > 7 {
        return Err(Error::input(format!("padding m must be in 0..=7, got {m}")));
    }
    inputs.expect_len(n * n, "the C_8l family")?;
    let code = make_code_assignment(n, ell)?;
    let alpha = code.alphabet;
    let mut d = Draft::new();

    let blocks = [("a1", "A1", true), ("a2", "A2", true), ("b1", "B1", false), ("b2", "B2", false)];
    for (name, group, alice) in blocks {
        for i in 1..=n {
            let sub = format!("{group}^{i}");
            for j in 1..=ell {
                d.vertex(format!("{name}^{{{i},{j}}}"), alice, &[group, sub.as_str()]);
            }
        }
    }
    let codes = [("u_A", "U_A", true), ("l_A", "L_A", true), ("u_B", "U_B", false), ("l_B", "L_B", false)];
    for (name, group, alice) in codes {
        for t in 1..=alpha {
            d.vertex(format!("{name}^{t}"), alice, &[group]);
        }
    }
    let block_vertex = |b: usize, i: usize, j: usize| b * n * ell + (i - 1) * ell + (j - 1);
    let code_vertex = |c: usize, t: usize| 4 * n * ell + c * alpha + (t - 1);

    for t in 1..=alpha {
        d.edge(code_vertex(0, t), code_vertex(2, t));
        d.edge(code_vertex(1, t), code_vertex(3, t));
    }
    // block b is wired to code set b: A1-U_A, A2-L_A, B1-U_B, B2-L_B
    for (b, block) in blocks.iter().enumerate() {
        for i in 1..=n {
            for (j, &k) in code.codes[i - 1].iter().enumerate() {
                d.edge(block_vertex(b, i, j + 1), code_vertex(b, k));
            }
            let members = code.codes[i - 1].iter().map(|&k| code_vertex(b, k)).collect();
            d.group(format!("Code({}^{i})", block.1), members);
        }
    }
    let joined: &[usize] = if ell >= 2 { &[0, 1, 2, 3] } else { &[0, 3] };
    for &b in joined {
        for i in 1..=n {
            for i2 in i + 1..=n {
                for j in 1..=ell {
                    for j2 in 1..=ell {
                        d.edge(block_vertex(b, i, j), block_vertex(b, i2, j2));
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            if inputs.x.get(bit_index(n, i, j)) {
                for k in 1..ell {
                    d.edge(block_vertex(0, i, k + 1), block_vertex(1, j, k));
                }
                d.edge(block_vertex(0, i, 1), block_vertex(1, j, ell));
            }
            if inputs.y.get(bit_index(n, i, j)) {
                for k in 1..=ell {
                    d.edge(block_vertex(2, i, k), block_vertex(3, j, k));
                }
            }
        }
    }

    if hubs {
        let before_hubs = d.n();
        let ca = d.vertex("c_A".into(), true, &["c_A"]);
        let cb = d.vertex("c_B".into(), false, &["c_B"]);
        for v in 0..before_hubs {
            d.edge(if d.is_alice(v) { ca } else { cb }, v);
        }
        d.edge(ca, cb);
    }

    for t in 1..=alpha {
        d.subdivide(code_vertex(0, t), code_vertex(2, t), m / 2, &format!("p_U^{t}"))?;
        d.subdivide(code_vertex(1, t), code_vertex(3, t), m.div_ceil(2), &format!("p_L^{t}"))?;
    }
    d.finish(FamilyTag::C8l { n, ell, m, hubs }, inputs.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCountReport {
    pub ell: usize,
    /// Number of cycle vertices in each of the eight blocks.
    pub counts: Vec<(String, usize)>,
    pub violations: Vec<String>,
}

impl BlockCountReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that an induced `8l`-cycle has exactly `l` vertices in every block,
/// avoids both hubs, and that its code vertices are the code of a single
/// sub-block on each of the four block/code pairs.
pub fn check_block_counts(inst: &FamilyInstance, cycle: &VertexSubset) -> Result<BlockCountReport> {
    let (n, ell) = match inst.tag {
        FamilyTag::C8l { n, ell, m: 0, .. } => (n, ell),
        _ => return Err(Error::input("block counts apply to unpadded C_8l instances only")),
    };
    let mut violations = Vec::new();
    let mut counts = Vec::new();
    for block in ["A1", "A2", "B1", "B2", "U_A", "L_A", "U_B", "L_B"] {
        let c = inst.group(block).iter().filter(|&&v| cycle.contains(v)).count();
        if c > ell {
            violations.push(format!("{block}: {c} cycle vertices exceeds {ell}"));
        } else if c != ell {
            violations.push(format!("{block}: {c} cycle vertices, expected {ell}"));
        }
        counts.push((block.to_string(), c));
    }
    for hub in ["c_A", "c_B"] {
        if inst.group(hub).iter().any(|&v| cycle.contains(v)) {
            violations.push(format!("cycle uses {hub}"));
        }
    }
    for (block, code_set) in [("A1", "U_A"), ("A2", "L_A"), ("B1", "U_B"), ("B2", "L_B")] {
        let subs: Vec<usize> =
            (1..=n).filter(|i| inst.group(&format!("{block}^{i}")).iter().any(|&v| cycle.contains(v))).collect();
        if subs.len() != 1 {
            violations.push(format!("{block}: cycle touches sub-blocks {subs:?}, expected exactly one"));
            continue;
        }
        let expected = inst.group(&format!("Code({block}^{})", subs[0]));
        let mut actual: Vec<usize> = inst.group(code_set).iter().copied().filter(|&v| cycle.contains(v)).collect();
        actual.sort_unstable();
        let mut expected = expected.to_vec();
        expected.sort_unstable();
        if actual != expected {
            violations.push(format!("{code_set} part of the cycle is not Code({block}^{})", subs[0]));
        }
    }
    Ok(BlockCountReport { ell, counts, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::graph::{diameter, Diameter};
    use crate::search::{find_induced_cycle, has_induced_cycle, list_induced_cycles};

    fn colex_oracle(alphabet: usize, ell: usize) -> Vec<Vec<usize>> {
        // all subsets, ordered by their elements read from the largest down
        let mut all: Vec<Vec<usize>> = (0u32..1 << alphabet)
            .filter(|m| m.count_ones() as usize == ell)
            .map(|m| (1..=alphabet).filter(|&i| m >> (i - 1) & 1 == 1).collect())
            .collect();
        all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        all
    }

    #[test]
    fn code_assignments() {
        let c = make_code_assignment(4, 1).unwrap();
        assert_eq!(c.alphabet, 4);
        assert_eq!(c.codes, vec![vec![1], vec![2], vec![3], vec![4]]);
        let c = make_code_assignment(4, 2).unwrap();
        assert_eq!(c.alphabet, 4);
        assert_eq!(c.codes, colex_oracle(4, 2)[..4].to_vec());
        let c = make_code_assignment(8, 3).unwrap();
        assert_eq!(c.alphabet, 6);
        assert!(binomial(6, 3) >= 8);
        for (n, ell) in [(16, 2), (10, 3), (30, 2), (50, 4)] {
            let c = make_code_assignment(n, ell).unwrap();
            let oracle = colex_oracle(c.alphabet, ell);
            assert_eq!(c.codes, oracle[..n].to_vec(), "n={n} ell={ell}");
            // alphabet is the ceiling of l * n^(1/l)
            let real = ell as f64 * (n as f64).powf(1.0 / ell as f64);
            assert!((c.alphabet as f64) >= real - 1e-9 && (c.alphabet as f64) < real + 1.0);
        }
    }

    fn shared(n: usize, i: usize, j: usize) -> InputPair {
        let b = BitString::with_ones(n * n, &[bit_index(n, i, j)]).unwrap();
        InputPair::new(b.clone(), b).unwrap()
    }

    fn plain(n: usize, ell: usize, m: usize, inputs: &InputPair) -> FamilyInstance {
        build_c8l_family_with(n, ell, m, false, inputs).unwrap()
    }

    #[test]
    fn ell_one_examples() {
        let inst = plain(2, 1, 0, &shared(2, 1, 1));
        assert!(has_induced_cycle(&inst.graph, 8).unwrap());
        let x = BitString::parse_binary("1000").unwrap();
        let y = BitString::parse_binary("0100").unwrap();
        let disjoint = InputPair::new(x, y).unwrap();
        assert!(!has_induced_cycle(&plain(2, 1, 0, &disjoint).graph, 8).unwrap());
        // the hubs close a cycle through Alice's side alone
        let hubbed = build_c8l_family(2, 1, 0, &disjoint).unwrap();
        let c = find_induced_cycle(&hubbed.graph, 8).unwrap().unwrap();
        assert!(c.iter().any(|&v| hubbed.labels[v] == "c_B"));
        let zero = build_c8l_family(2, 1, 0, &InputPair::zeros(4)).unwrap();
        assert_eq!(diameter(&zero.graph), Diameter::Finite(3));
        assert_eq!(zero.cut_size(), 5);
        assert_eq!(cut_size_c8l(2, 1, 0).unwrap(), 5);
        assert_eq!(cut_size_c8l(16, 2, 0).unwrap(), 17);
    }

    #[test]
    fn padding_lengthens_the_cycle() {
        for m in 0..=7 {
            let hubbed = build_c8l_family(2, 1, m, &shared(2, 2, 1)).unwrap();
            assert_eq!(hubbed.cut_size(), cut_size_c8l(2, 1, m).unwrap());
            let inst = plain(2, 1, m, &shared(2, 2, 1));
            assert_eq!(inst.cut_size(), cut_size_c8l(2, 1, m).unwrap() - 1);
            assert!(has_induced_cycle(&inst.graph, 8 + m).unwrap(), "m={m}");
            let empty = plain(2, 1, m, &InputPair::zeros(4));
            assert!(!has_induced_cycle(&empty.graph, 8 + m).unwrap(), "m={m}");
        }
    }

    #[test]
    fn block_counts_on_planted_cycles() {
        let inst = plain(2, 1, 0, &shared(2, 2, 1));
        let cycles = list_induced_cycles(&inst.graph, 8).unwrap();
        assert_eq!(cycles.len(), 1);
        let rep = check_block_counts(&inst, cycles.iter().next().unwrap()).unwrap();
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(check_block_counts(&build_c8l_family(2, 1, 1, &shared(2, 2, 1)).unwrap(), &VertexSubset::default())
            .is_err());
    }

    /// For l = 2 the complete joins inside A1 and A2, together with codes that
    /// share an element, let a 16-cycle cross Alice's side without any x-edge.
    #[test]
    fn ell_two_admits_cycles_without_shared_index() {
        for n in [2, 3, 4] {
            let y = BitString::with_ones(n * n, &[bit_index(n, 2, 2)]).unwrap();
            let inst = plain(n, 2, 0, &InputPair::new(BitString::zeros(n * n), y).unwrap());
            let c = find_induced_cycle(&inst.graph, 16).unwrap().expect("cycle");
            let rep = check_block_counts(&inst, &VertexSubset::from_unchecked(c)).unwrap();
            // every block count is right; the sub-block structure is not
            assert!(rep.counts.iter().all(|(_, k)| *k == 2));
            assert!(rep.violations.iter().any(|v| v.contains("sub-blocks")));
        }
    }
}
