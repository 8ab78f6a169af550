use induced_core::bits::BitString;
use induced_core::congest::*;
use induced_core::families::{bit_index, build_c4_family, InputPair};
use induced_core::graph::{bfs_distances, Graph, VertexSubset};
use induced_core::search::list_induced_cycles;
use induced_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

#[test]
fn output_one_takes_one_round() {
    let g = gnp(20, 0.2, 1);
    let stats = run(&g, &OutputOne, &SimConfig::for_graph(&g), None).unwrap();
    assert_eq!(stats.rounds_used, 1);
    assert!(stats.node_outputs.iter().all(|o| *o == Some(true)));
    assert!(!stats.timed_out);
}

#[test]
fn flood_on_eight_cycle() {
    let g = Graph::cycle(8);
    let stats = run(&g, &Flood { source: 0 }, &SimConfig::for_graph(&g), None).unwrap();
    assert_eq!(stats.message_rounds, 4);
    assert_eq!(stats.rounds_used, 5);
}

#[test]
fn causality_probe_sees_one_round_delay() {
    for seed in 0..5 {
        let g = gnp(30, 0.15, seed);
        let (stats, states) = run_full(&g, &CausalityProbe { source: 0 }, &SimConfig::for_graph(&g), None).unwrap();
        let dist = bfs_distances(&g, 0);
        for (v, st) in states.iter().enumerate() {
            assert_eq!(st.violations, 0);
            assert_eq!(st.heard_at, dist[v].map(|d| d + 1));
        }
        if dist.iter().all(Option::is_some) {
            assert!(stats.node_outputs.iter().all(|o| *o == Some(true)));
        } else {
            assert!(stats.timed_out);
        }
    }
}

struct Misbehave(u8);

impl NodeProgram for Misbehave {
    type State = ();
    fn name(&self) -> String {
        "misbehave".into()
    }
    fn init(&self, _: &mut NodeContext) {}
    fn step(&self, _: &mut (), ctx: &mut NodeContext, _: usize, _: &[Message], out: &mut Outbox) -> Option<bool> {
        if ctx.id == 0 {
            match self.0 {
                0 => out.send(1, BitString::zeros(ctx.bandwidth_bits + 1)),
                1 => out.send(2, BitString::zeros(1)),
                _ => {
                    out.send(1, BitString::zeros(1));
                    out.send(1, BitString::zeros(1));
                }
            }
        }
        None
    }
}

#[test]
fn protocol_violations_are_errors() {
    let g = Graph::path(3);
    let cfg = SimConfig::for_graph(&g);
    for (mode, needle) in [(0, "bandwidth"), (1, "non-neighbour"), (2, "two messages")] {
        match run(&g, &Misbehave(mode), &cfg, None) {
            Err(Error::Protocol(msg)) => assert!(msg.contains(needle), "{msg}"),
            other => panic!("expected protocol error, got {other:?}"),
        }
    }
}

#[test]
fn timeout_is_reported() {
    let g = Graph::path(6);
    let cfg = SimConfig { max_rounds: 3, ..SimConfig::for_graph(&g) };
    let stats = run(&g, &Flood { source: 0 }, &cfg, None).unwrap();
    assert!(stats.timed_out);
    assert_eq!(stats.rounds_used, 3);
    assert_eq!(stats.node_outputs[5], None);
}

#[test]
fn silent_program_sends_nothing() {
    let inst = build_c4_family(3, &InputPair::zeros(9)).unwrap();
    let cfg = SimConfig::for_graph(&inst.graph);
    let stats = run(&inst.graph, &Silent, &cfg, Some(&inst.va)).unwrap();
    assert_eq!(stats.total_cut_bits, 0);
    assert!(cut_traffic_bound_check(&stats, inst.cut_size(), &cfg).holds);
}

#[test]
fn naive_c4_on_small_graphs() {
    let c4 = Graph::cycle(4);
    let stats = run(&c4, &naive_c4_program(), &SimConfig::for_graph(&c4), None).unwrap();
    assert!(stats.decision());
    assert!(stats.rounds_used <= 4 * 4);
    let k4 = Graph::complete(4);
    let stats = run(&k4, &naive_c4_program(), &SimConfig::for_graph(&k4), None).unwrap();
    assert!(stats.node_outputs.iter().all(|o| *o == Some(false)));
}

#[test]
fn naive_c4_on_the_family() {
    let n = 3;
    let b = BitString::with_ones(9, &[bit_index(n, 3, 1)]).unwrap();
    for (pair, expect) in [
        (InputPair::new(b.clone(), b.clone()).unwrap(), true),
        (InputPair::new(b, BitString::with_ones(9, &[bit_index(n, 1, 3)]).unwrap()).unwrap(), false),
    ] {
        let inst = build_c4_family(n, &pair).unwrap();
        let cfg = SimConfig::for_graph(&inst.graph);
        let stats = run(&inst.graph, &naive_c4_program(), &cfg, Some(&inst.va)).unwrap();
        assert_eq!(stats.decision(), expect);
        assert_eq!(!list_induced_cycles(&inst.graph, 4).unwrap().is_empty(), expect);
        let check = cut_traffic_bound_check(&stats, inst.cut_size(), &cfg);
        assert!(check.holds && check.measured > 0, "{check:?}");
    }
}

#[test]
fn runs_are_deterministic() {
    let g = gnp(40, 0.2, 9);
    let va = VertexSubset::from_unchecked(0..20);
    let cfg = SimConfig { seed: 5, ..SimConfig::for_graph(&g) };
    let a = run(&g, &naive_c4_program(), &cfg, Some(&va)).unwrap();
    let b = run(&g, &naive_c4_program(), &cfg, Some(&va)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.total_cut_bits, a.per_round_cut_bits.iter().sum::<u64>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn naive_c4_matches_oracle_per_node(n in 4usize..14, p in 0.1f64..0.7, seed in any::<u64>()) {
        let g = gnp(n, p, seed);
        let stats = run(&g, &naive_c4_program(), &SimConfig::for_graph(&g), None).unwrap();
        let cycles = list_induced_cycles(&g, 4).unwrap();
        for v in 0..n {
            let on = cycles.iter().any(|c| c.contains(v));
            prop_assert_eq!(stats.node_outputs[v], Some(on));
        }
    }
}
