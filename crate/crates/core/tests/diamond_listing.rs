use std::collections::BTreeSet;

use induced_core::bits::BitString;
use induced_core::congest::SimConfig;
use induced_core::diamond_listing::*;
use induced_core::families::{build_diamond_family, build_diamond_fixture, list_22_diamonds, InputPair};
use induced_core::graph::{is_induced_diamond, Graph, VertexSubset};
use induced_core::search::{list_induced_diamonds, list_triangles};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_matches_oracle(g: &Graph, params: &ListingParams) -> DiamondListingStats {
    let (found, stats) = list_induced_diamonds_congest(g, params).unwrap();
    let oracle = list_induced_diamonds(g).unwrap();
    let cov = coverage_report(g, &stats).unwrap();
    assert!(cov.ok, "uncovered {:?} spurious {:?}", cov.uncovered, cov.spurious);
    assert_eq!(found, oracle);
    assert!(stats.decomposition.ok, "{:?}", stats.decomposition.violations);
    assert!(stats.caps_ok);
    stats
}

fn with_delta(delta: Fraction, split: f64) -> ListingParams {
    ListingParams {
        epsilon: Fraction::new(1, 2),
        decomposition: DecompositionParams { delta, split_conductance: split, ..Default::default() },
    }
}

#[test]
fn random_graphs_match_oracle() {
    let mut seen_heavy = false;
    let mut seen_cluster = false;
    for (i, &(n, p)) in [(48, 0.2), (96, 0.1), (128, 0.2), (96, 0.03), (64, 0.3)].iter().enumerate() {
        let g = Graph::gnp(n, p, 40 + i as u64);
        let stats = assert_matches_oracle(&g, &ListingParams::default());
        seen_heavy |= stats.heavy.diamonds > 0;
        seen_cluster |= stats.decomposition.clusters > 0;
    }
    assert!(seen_cluster);
    let _ = seen_heavy;
}

/// Dense blocks plus outsiders, each attached to a few members of one block
/// and sparsely to each other.
fn planted(blocks: usize, size: usize, outsiders: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = blocks * size + outsiders;
    let mut g = Graph::empty(n);
    for b in 0..blocks {
        for i in 0..size {
            for j in i + 1..size {
                if rng.gen_bool(0.75) {
                    g.add_edge(b * size + i, b * size + j).unwrap();
                }
            }
        }
    }
    for o in blocks * size..n {
        let b = rng.gen_range(0..blocks);
        let mut members: Vec<usize> = (b * size..(b + 1) * size).collect();
        members.shuffle(&mut rng);
        for &c in &members[..rng.gen_range(1..=10)] {
            g.add_edge(o, c).unwrap();
        }
        for o2 in o + 1..n {
            if rng.gen_bool(0.08) {
                g.add_edge(o, o2).unwrap();
            }
        }
    }
    g
}

#[test]
fn planted_clusters_exercise_every_phase() {
    let mut tags = BTreeSet::new();
    for seed in 0..3 {
        let g = planted(3, 20, 40, seed);
        for eps in [Fraction::new(1, 3), Fraction::new(1, 2)] {
            let params = ListingParams { epsilon: eps, ..Default::default() };
            let stats = assert_matches_oracle(&g, &params);
            for t in &stats.tagged {
                tags.extend(t.tags.iter().cloned());
            }
        }
    }
    for tag in ["sparse", "heavy", "light:open", "light:closed", "light:interior"] {
        assert!(tags.contains(tag), "no diamond tagged {tag}: {tags:?}");
    }
}

#[test]
fn two_level_decomposition() {
    // two 30-cliques joined by a union of 12 random perfect matchings
    let mut g = Graph::empty(60);
    for base in [0, 30] {
        for i in 0..30 {
            for j in i + 1..30 {
                g.add_edge(base + i, base + j).unwrap();
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..12 {
        let mut perm: Vec<usize> = (30..60).collect();
        perm.shuffle(&mut rng);
        for (i, &j) in perm.iter().enumerate() {
            g.add_edge(i, j).unwrap();
        }
    }
    let params = with_delta(Fraction::new(5, 6), 0.3);
    let stats = assert_matches_oracle(&g, &params);
    assert_eq!(stats.decomposition.levels, 2);
    assert_eq!(stats.simulation.levels, 2);
}

#[test]
fn triangle_free_lists_nothing() {
    let g = Graph::gnp(60, 0.08, 3);
    let mut h = Graph::empty(60);
    // bipartite halves are triangle-free
    for (u, v) in g.edges() {
        if (u < 30) != (v < 30) {
            h.add_edge(u, v).unwrap();
        }
    }
    assert!(list_triangles(&h).is_empty());
    let (found, _) = list_induced_diamonds_congest(&h, &ListingParams::default()).unwrap();
    assert!(found.is_empty());
}

#[test]
fn all_sparse_decomposition() {
    let g = Graph::gnp(50, 0.25, 8);
    let dec = Decomposition::all_sparse(&g, Fraction::new(5, 6)).unwrap();
    let sparse = sparse_phase(&g, &dec, &SimConfig::for_graph(&g)).unwrap();
    assert_eq!(sparse.diamonds, list_induced_diamonds(&g).unwrap());
    let (found, stats) = list_with_decomposition(&g, &dec, Fraction::new(1, 2), &SimConfig::for_graph(&g)).unwrap();
    assert_eq!(found, list_induced_diamonds(&g).unwrap());
    assert_eq!(stats.heavy.diamonds + stats.light.diamonds, 0);
    assert_eq!(stats.simulation.total, 0.0);
}

#[test]
fn sparse_phase_filters_to_sparse_diamonds() {
    let g = Graph::gnp(96, 0.1, 5);
    let dec =
        expander_decompose(&g, &DecompositionParams { delta: Fraction::new(1, 2), ..Default::default() }).unwrap();
    assert!(!dec.clusters.is_empty());
    let classes = dec.classes();
    let sparse = sparse_phase(&g, &dec, &SimConfig::for_graph(&g)).unwrap();
    let want: BTreeSet<VertexSubset> = list_induced_diamonds(&g)
        .unwrap()
        .into_iter()
        .filter(|s| {
            let m = s.members();
            (0..4)
                .flat_map(|i| (i + 1..4).map(move |j| (m[i], m[j])))
                .all(|e| !g.has_edge(e.0, e.1) || matches!(classes[&e], EdgeClass::Sparse(_)))
        })
        .collect();
    assert_eq!(sparse.diamonds, want);
    let es_max = (0..g.n())
        .map(|v| {
            g.neighbors(v).iter().filter(|&&w| matches!(classes[&(v.min(w), v.max(w))], EdgeClass::Sparse(_))).count()
        })
        .max()
        .unwrap();
    // header plus one item per message, then one round for delivery
    assert!(sparse.stats.rounds_used <= es_max + 3, "{} > {}", sparse.stats.rounds_used, es_max + 3);
}

/// A clique cluster with one outside vertex adjacent to most of it.
#[test]
fn external_heavy_hub() {
    let k = 12;
    let hub = k;
    let mut g = Graph::complete(k);
    let mut g2 = Graph::empty(k + 3);
    for (u, v) in g.edges() {
        g2.add_edge(u, v).unwrap();
    }
    g = g2;
    for c in 0..k - 1 {
        g.add_edge(hub, c).unwrap();
    }
    // two light outsiders hanging off the hub and the cluster
    g.add_edge(k + 1, hub).unwrap();
    g.add_edge(k + 1, 0).unwrap();
    g.add_edge(k + 2, 1).unwrap();
    g.add_edge(k + 2, 2).unwrap();
    let clique: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let dec = Decomposition::from_clusters(&g, Fraction::new(5, 6), vec![vec![clique.clone()]]).unwrap();
    let cfg = SimConfig::for_graph(&g);
    let heavy = heavy_phase(&g, &dec, Fraction::new(1, 2), &cfg).unwrap();
    assert_eq!(heavy.heavy_pairs, 1);
    let cluster: BTreeSet<(usize, usize)> = clique.into_iter().collect();
    let want: BTreeSet<VertexSubset> = list_induced_diamonds(&g)
        .unwrap()
        .into_iter()
        .filter(|s| {
            s.contains(hub) && {
                let m = s.members();
                (0..4).flat_map(|i| (i + 1..4).map(move |j| (m[i], m[j]))).any(|e| cluster.contains(&e))
            }
        })
        .collect();
    assert!(!want.is_empty());
    assert_eq!(heavy.run.diamonds, want);
    assert!(heavy.max_gathered as f64 <= heavy.gather_cap);
    let (found, stats) = list_with_decomposition(&g, &dec, Fraction::new(1, 2), &cfg).unwrap();
    assert_eq!(found, list_induced_diamonds(&g).unwrap());
    assert!(coverage_report(&g, &stats).unwrap().ok);
}

#[test]
fn no_heavy_nodes_means_empty_heavy_phase() {
    let g = Graph::gnp(40, 0.1, 2);
    let dec = Decomposition::all_sparse(&g, Fraction::new(5, 6)).unwrap();
    let heavy = heavy_phase(&g, &dec, Fraction::new(1, 2), &SimConfig::for_graph(&g)).unwrap();
    assert!(heavy.run.diamonds.is_empty());
    assert_eq!(heavy.heavy_pairs, 0);
}

/// Cluster triangle c1 c2 c3; outsiders u, v adjacent to each other and to
/// c1, c2 but not c3.
#[test]
fn six_vertex_light_instance() {
    let (c1, c2, c3, u, v, w) = (0, 1, 2, 3, 4, 5);
    let g = Graph::from_edges(6, [(c1, c2), (c1, c3), (c2, c3), (u, v), (u, c1), (u, c2), (v, c1), (v, c2), (w, c3)])
        .unwrap();
    let dec =
        Decomposition::from_clusters(&g, Fraction::new(5, 6), vec![vec![vec![(c1, c2), (c1, c3), (c2, c3)]]]).unwrap();
    let light = light_phase(&g, &dec, Fraction::new(1, 2), &SimConfig::for_graph(&g)).unwrap();
    let want: BTreeSet<VertexSubset> = list_induced_diamonds(&g)
        .unwrap()
        .into_iter()
        .filter(|s| {
            let m = s.members();
            [(c1, c2), (c1, c3), (c2, c3)].iter().any(|&(a, b)| m.contains(&a) && m.contains(&b))
        })
        .collect();
    assert_eq!(light.run.diamonds, want);
    assert!(light.run.diamonds.contains(&VertexSubset::from_unchecked([c1, c2, u, c3])));
    assert!(light.max_query_list as f64 <= light.query_cap);
}

#[test]
fn planted_family_diamond_is_listed() {
    for seed in 0..2 {
        let fix = build_diamond_fixture(16, seed).unwrap();
        let q = fix.quadruples.len();
        let one = BitString::with_ones(q, &[q / 2]).unwrap();
        let inst = build_diamond_family(&fix, &InputPair::new(one.clone(), one).unwrap()).unwrap();
        let (found, _) = list_induced_diamonds_congest(&inst.graph, &ListingParams::default()).unwrap();
        let planted = list_22_diamonds(&inst).unwrap();
        assert!(!planted.is_empty());
        assert!(planted.is_subset(&found));
        assert_eq!(found, list_induced_diamonds(&inst.graph).unwrap());
    }
}

#[test]
fn simulation_charge_identity() {
    let c = simulation_charge(64, Fraction::new(5, 6), Fraction::new(1, 2), 2);
    let n = 64f64;
    let expect = n.powf(2.0 - 5.0 / 6.0 - 0.5) + 8.0 * n.powf(2.0 - 10.0 / 6.0);
    assert!((c.per_level - expect).abs() < 1e-9);
    assert_eq!(c.total, 2.0 * c.per_level);
}

#[test]
fn repeat_runs_are_identical() {
    let g = Graph::gnp(64, 0.15, 11);
    let a = serde_json::to_string(&list_induced_diamonds_congest(&g, &ListingParams::default()).unwrap().1).unwrap();
    let b = serde_json::to_string(&list_induced_diamonds_congest(&g, &ListingParams::default()).unwrap().1).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn phases_emit_only_diamonds_and_cover_all(n in 10usize..40, p in 0.05f64..0.5, seed in 0u64..10_000, d in 1u32..6) {
        let g = Graph::gnp(n, p, seed);
        let params = with_delta(Fraction::new(d, 6), if seed % 2 == 0 { 0.2 } else { 0.0 });
        let (found, stats) = list_induced_diamonds_congest(&g, &params).unwrap();
        for s in &found {
            prop_assert!(is_induced_diamond(&g, s).unwrap());
        }
        prop_assert_eq!(found, list_induced_diamonds(&g).unwrap());
        prop_assert!(stats.caps_ok);
    }
}
