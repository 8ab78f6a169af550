//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! criterion deviates from its expected outcome.
//!
//! Criteria 2 and 3 are expected to FAIL. For odd k the subdivided family
//! has an induced C_k that depends on x alone, and the ell=2 half of
//! criterion 3 admits 16-cycles for disjoint inputs. The suite checks that
//! they still fail, so a change in either direction is noticed.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use induced_core::bits::BitString;
use induced_core::congest::{naive_c4_program, SimConfig};
use induced_core::diamond_listing::{
    coverage_report, list_induced_diamonds_congest, list_with_decomposition, Decomposition, Fraction, ListingParams,
};
use induced_core::families::{
    build_c4_family, build_c8l_family_with, build_ck_subdivided_family, build_diamond_family, build_diamond_fixture,
    check_block_counts, sampled_pairs, verify_family_conditions, FamilyBuilder, FamilySpec, InputPair, Predicate,
    VerifyOptions, VerifyReport,
};
use induced_core::graph::{diameter, disj, Diameter, Graph, VertexSubset};
use induced_core::search::{find_induced_cycle, list_induced_cycles, list_induced_diamonds, list_triangles};
use induced_core::twoparty::{congest_reduction, cycle_listing_protocol, diamond_listing_protocol};
use induced_core::{id_bits, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const C1_LIMIT: Duration = Duration::from_secs(5);
const C2_LIMIT: Duration = Duration::from_secs(30);
const C11_LIMIT: Duration = Duration::from_secs(600);
const GOOD_PAIR_FLOOR: f64 = 0.05;

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    summary: String,
    /// Deterministic part of the result, compared byte for byte on reruns.
    report: Value,
}

fn random_input(k: usize, rng: &mut ChaCha8Rng) -> BitString {
    BitString::from_bools((0..k).map(|_| rng.gen_bool(0.5)).collect())
}

fn random_split(n: usize, seed: u64) -> VertexSubset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VertexSubset::from_unchecked((0..n).filter(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
}

fn cut_size(g: &Graph, va: &VertexSubset) -> usize {
    g.edges().filter(|&(u, v)| va.contains(u) != va.contains(v)).count()
}

fn verify_summary(r: &VerifyReport) -> Value {
    json!({
        "family": r.family,
        "pairs": r.pairs_checked,
        "exhaustive": r.exhaustive,
        "predicate_true": r.predicate_true,
        "failures": r.conditions.iter().map(|c| (c.name.clone(), c.failures)).collect::<Vec<_>>(),
        "passed": r.passed,
    })
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let small = verify_family_conditions(
        &FamilySpec::C4 { n: 2 },
        &VerifyOptions { exhaustive_max_k: 4, samples: 0, seed: 1 },
    )?;
    let took = start.elapsed();
    let spot = verify_family_conditions(
        &FamilySpec::C4 { n: 3 },
        &VerifyOptions { exhaustive_max_k: 0, samples: 288, seed: 1 },
    )?;
    let pass = small.passed
        && small.exhaustive
        && small.pairs_checked == 256
        && took < C1_LIMIT
        && spot.passed
        && spot.pairs_checked == 300;
    Ok(Outcome {
        pass,
        summary: format!(
            "C4 family iff: n=2 {} pairs exhaustive in {:.2}s (limit 5s), n=3 {} sampled pairs incl. all 9 single-shared; zero exceptions required",
            small.pairs_checked,
            took.as_secs_f64(),
            spot.pairs_checked
        ),
        report: json!([verify_summary(&small), verify_summary(&spot)]),
    })
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let mut reports = Vec::new();
    for k in 5..=7 {
        reports.push(verify_family_conditions(&FamilySpec::Subdivided { n: 2, k }, &VerifyOptions::default())?);
    }
    let took = start.elapsed();
    let pass = took < C2_LIMIT && reports.iter().all(|r| r.passed && r.exhaustive && r.pairs_checked == 256);
    let per_k: Vec<String> = reports
        .iter()
        .zip(5..)
        .map(|(r, k)| {
            let iff = r.conditions.iter().find(|c| c.name.starts_with("predicate")).map_or(0, |c| c.failures);
            match r.counterexamples.first() {
                Some(c) => format!("k={k} {iff} exceptions (first x={} y={} disj={})", c.x, c.y, c.disj),
                None => format!("k={k} ok"),
            }
        })
        .collect();
    Ok(Outcome {
        pass,
        summary: format!(
            "subdivided family iff at n=2, 256 pairs per k in {:.2}s (limit 30s): {}",
            took.as_secs_f64(),
            per_k.join("; ")
        ),
        report: Value::Array(reports.iter().map(verify_summary).collect()),
    })
}

fn criterion_3() -> Result<Outcome> {
    let one = verify_family_conditions(
        &FamilySpec::C8l { n: 2, ell: 1, m: 0, hubs: false },
        &VerifyOptions { exhaustive_max_k: 4, samples: 0, seed: 3 },
    )?;

    let spec = FamilySpec::C8l { n: 2, ell: 2, m: 0, hubs: false };
    let pairs = sampled_pairs(spec.input_len(), 50, 3);
    let (mut iff_failures, mut found, mut block_failures, mut over_ell) = (0, 0, 0, 0);
    let mut first_bad = None;
    for p in &pairs {
        let inst = spec.build(p)?;
        let cycle = find_induced_cycle(&inst.graph, 16)?;
        let d = disj(&p.x, &p.y)?;
        if cycle.is_some() != (d == 0) {
            iff_failures += 1;
            if first_bad.is_none() {
                first_bad = Some(format!("x={} y={} disj={d}", p.x, p.y));
            }
        }
        if let Some(c) = cycle {
            found += 1;
            let rep = check_block_counts(&inst, &VertexSubset::from_unchecked(c))?;
            if !rep.ok() {
                block_failures += 1;
            }
            if rep.counts.iter().any(|(_, c)| *c > 2) {
                over_ell += 1;
            }
        }
    }
    let ell1 = one.passed && one.pairs_checked == 256;
    let ell2 = iff_failures == 0 && block_failures == 0 && over_ell == 0;
    Ok(Outcome {
        pass: ell1 && ell2,
        summary: format!(
            "C8l family: ell=1 n=2 {} pairs {}; ell=2 n=2 {} pairs, {} iff exceptions, {} of {} cycles fail block counts, {} exceed ell{}",
            one.pairs_checked,
            if ell1 { "ok" } else { "FAILED" },
            pairs.len(),
            iff_failures,
            block_failures,
            found,
            over_ell,
            first_bad.map(|s| format!(" (first: {s})")).unwrap_or_default()
        ),
        report: json!({
            "ell1": verify_summary(&one),
            "ell2": {"pairs": pairs.len(), "iff_failures": iff_failures, "cycles": found,
                     "block_failures": block_failures, "over_ell": over_ell},
        }),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in [2, 4, 8] {
        for ell in [1, 2] {
            let k = n * n;
            let mut inputs = vec![
                InputPair::zeros(k),
                InputPair::new(BitString::from_bools(vec![true; k]), BitString::from_bools(vec![true; k]))?,
            ];
            for _ in 0..3 {
                inputs.push(InputPair::new(random_input(k, &mut rng), random_input(k, &mut rng))?);
            }
            for p in &inputs {
                let inst = build_c8l_family_with(n, ell, 0, true, p)?;
                checked += 1;
                let d = diameter(&inst.graph);
                if d != Diameter::Finite(3) {
                    bad.push(format!("n={n} ell={ell}: {d:?}"));
                }
            }
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        summary: format!(
            "hubbed C8l instances (n in 2,4,8; ell in 1,2; 5 inputs each): {checked} checked, {} not diameter 3",
            bad.len()
        ),
        report: json!({"checked": checked, "bad": bad}),
    })
}

/// Smallest `a` with `a^ell >= n * ell^ell`, i.e. `ceil(ell * n^(1/ell))`.
fn alphabet(n: usize, ell: u32) -> usize {
    let target = n as u128 * (ell as u128).pow(ell);
    (1..).find(|&a: &u128| a.pow(ell) >= target).unwrap() as usize
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut check = |what: String, got: usize, want: usize| {
        checked += 1;
        if got != want {
            bad.push(format!("{what}: {got} != {want}"));
        }
    };
    for n in [2, 3, 4] {
        let k = n * n;
        for p in [InputPair::zeros(k), InputPair::new(random_input(k, &mut rng), random_input(k, &mut rng))?] {
            check(format!("c4 n={n}"), build_c4_family(n, &p)?.cut_size(), 2 * n);
            for c in 5..=7 {
                check(format!("subdivided n={n} k={c}"), build_ck_subdivided_family(n, c, &p)?.cut_size(), 2 * n);
            }
        }
    }
    for n in [2, 4, 8] {
        for ell in [1, 2] {
            for m in [0, 1] {
                let k = n * n;
                let p = InputPair::new(random_input(k, &mut rng), random_input(k, &mut rng))?;
                let got = build_c8l_family_with(n, ell, m, true, &p)?.cut_size();
                check(format!("c8l n={n} ell={ell} m={m}"), got, 2 * alphabet(n, ell as u32) + 1);
            }
        }
    }
    for n in [4, 16, 64] {
        let root = (n as f64).sqrt() as usize;
        for seed in 0..2 {
            let fix = build_diamond_fixture(n, seed)?;
            let q = fix.quadruples.len();
            let p = InputPair::new(random_input(q, &mut rng), random_input(q, &mut rng))?;
            check(format!("diamond n={n} seed={seed}"), build_diamond_family(&fix, &p)?.cut_size(), root * n + n);
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        summary: format!("cut sizes exact across {checked} instances ({} mismatches)", bad.len()),
        report: json!({"checked": checked, "bad": bad}),
    })
}

fn criterion_6() -> Result<Outcome> {
    let mut reports = Vec::new();
    for n in [4, 16] {
        for seed in 0..3 {
            let fix = Arc::new(build_diamond_fixture(n, seed)?);
            let spec = FamilySpec::Diamond { fixture: fix };
            reports.push(verify_family_conditions(&spec, &VerifyOptions { exhaustive_max_k: 10, samples: 500, seed })?);
        }
    }
    let pairs: usize = reports.iter().map(|r| r.pairs_checked).sum();
    Ok(Outcome {
        pass: reports.iter().all(|r| r.passed),
        summary: format!(
            "diamond family 2-2 diamond iff at n=4,16 x 3 seeds: {pairs} pairs, {} of 6 fixtures exhaustive, {} failing",
            reports.iter().filter(|r| r.exhaustive).count(),
            reports.iter().filter(|r| !r.passed).count()
        ),
        report: Value::Array(reports.iter().map(verify_summary).collect()),
    })
}

fn criterion_7() -> Result<Outcome> {
    let mut means = Vec::new();
    for n in [16, 64, 144] {
        let mut sum = 0.0;
        for seed in 0..5 {
            sum += build_diamond_fixture(n, seed)?.good_pair_ratio();
        }
        means.push((n, sum / 5.0));
    }
    Ok(Outcome {
        pass: means.iter().all(|&(_, m)| m >= GOOD_PAIR_FLOOR),
        summary: format!(
            "mean good pairs / n^2 over 5 seeds (floor 0.05): {}",
            means.iter().map(|(n, m)| format!("n={n} {m:.4}")).collect::<Vec<_>>().join(", ")
        ),
        report: json!(means),
    })
}

fn random_graphs(sizes: &[usize], densities: &[f64], count: usize, seed: u64) -> Vec<Graph> {
    (0..count)
        .map(|i| {
            Graph::gnp(sizes[(i / densities.len()) % sizes.len()], densities[i % densities.len()], seed + i as u64)
        })
        .collect()
}

fn criterion_8() -> Result<Outcome> {
    let (mut runs, mut mismatches, mut over) = (0, 0, 0);
    let mut min_slack = i128::MAX;
    for (i, g) in random_graphs(&[30, 45, 60], &[0.05, 0.15, 0.3], 30, 800).iter().enumerate() {
        let va = random_split(g.n(), 900 + i as u64);
        for k in 4..=7 {
            let res = cycle_listing_protocol(g, &va, k)?;
            runs += 1;
            if res.union() != list_induced_cycles(g, k)? || !res.a_list.is_disjoint(&res.b_list) {
                mismatches += 1;
            }
            let bound = 4 * id_bits(g.n()) as u64 * g.n() as u64 * cut_size(g, &va) as u64;
            if res.transcript.payload_bits() > bound || !res.bound.holds {
                over += 1;
            }
            min_slack = min_slack.min(bound as i128 - res.transcript.payload_bits() as i128);
        }
    }
    Ok(Outcome {
        pass: mismatches == 0 && over == 0,
        summary: format!(
            "cycle protocol on 30 random graphs x k=4..7: {runs} runs, {mismatches} list mismatches, {over} over 4*L*n*cut (min slack {min_slack})"
        ),
        report: json!({"runs": runs, "mismatches": mismatches, "over": over, "min_slack": min_slack}),
    })
}

fn criterion_9() -> Result<Outcome> {
    let mut cases: Vec<(Graph, VertexSubset)> = random_graphs(&[24, 40, 64], &[0.05, 0.15, 0.3], 30, 1900)
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let va = random_split(g.n(), 2000 + i as u64);
            (g, va)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..5 {
        let fix = build_diamond_fixture(16, seed)?;
        let q = fix.quadruples.len();
        let inst = build_diamond_family(&fix, &InputPair::new(random_input(q, &mut rng), random_input(q, &mut rng))?)?;
        cases.push((inst.graph, inst.va));
    }
    let (mut mismatches, mut over) = (0, 0);
    let mut modes = BTreeSet::new();
    for (g, va) in &cases {
        let res = diamond_listing_protocol(g, va)?;
        if res.union() != list_induced_diamonds(g)? {
            mismatches += 1;
        }
        // payload <= 12 L sqrt(n) cut, compared on squares
        let l = id_bits(g.n()) as u128;
        let cut = cut_size(g, va) as u128;
        let payload = res.transcript.payload_bits() as u128;
        if payload * payload > 144 * l * l * g.n() as u128 * cut * cut || !res.bound.holds {
            over += 1;
        }
        modes.extend(res.notes.iter().filter(|s| s.starts_with("mode=")).cloned());
    }
    Ok(Outcome {
        pass: mismatches == 0 && over == 0,
        summary: format!(
            "diamond protocol on 30 random graphs + 5 family instances: {} mismatches, {} over 12*L*sqrt(n)*cut, modes seen {:?}",
            mismatches, over, modes
        ),
        report: json!({"cases": cases.len(), "mismatches": mismatches, "over": over, "modes": modes}),
    })
}

fn criterion_10() -> Result<Outcome> {
    let prog = naive_c4_program();
    let (mut wrong, mut payload_diff, mut over) = (0, 0, 0);
    let mut min_slack = u64::MAX;
    for x in 0u64..16 {
        for y in 0u64..16 {
            let inputs = InputPair::new(BitString::from_uint(4, x), BitString::from_uint(4, y))?;
            let inst = build_c4_family(2, &inputs)?;
            let cfg = SimConfig::for_graph(&inst.graph);
            let r = congest_reduction(&inst, &prog, &cfg, &Predicate::InducedCycle(4))?;
            if r.disj_answer != disj(&inputs.x, &inputs.y)? {
                wrong += 1;
            }
            if r.transcript.payload_bits() != r.simulator_cut_bits {
                payload_diff += 1;
            }
            if !r.cut_bound.holds {
                over += 1;
            }
            min_slack = min_slack.min(r.cut_bound.slack);
        }
    }
    Ok(Outcome {
        pass: wrong == 0 && payload_diff == 0 && over == 0,
        summary: format!(
            "reduction around the naive C4 program, n=2, 256 pairs: {wrong} wrong answers, {payload_diff} payload/simulator differences, {over} over rounds*2*cut*B (min slack {min_slack})"
        ),
        report: json!({"wrong": wrong, "payload_diff": payload_diff, "over": over, "min_slack": min_slack}),
    })
}

fn criterion_11() -> Result<Outcome> {
    let start = Instant::now();
    let mut graphs: Vec<(String, Graph)> = random_graphs(&[48, 96, 128], &[0.03, 0.1, 0.2], 20, 1100)
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("random{i}"), g))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..5 {
        let fix = build_diamond_fixture(16, seed)?;
        let q = fix.quadruples.len();
        let shared = rng.gen_range(0..q);
        let mut x = random_input(q, &mut rng);
        let mut y = random_input(q, &mut rng);
        x.set(shared, true);
        y.set(shared, true);
        graphs.push((format!("family{seed}"), build_diamond_family(&fix, &InputPair::new(x, y)?)?.graph));
    }
    let g = Graph::gnp(80, 0.15, 1111);
    let bipartite = Graph::from_edges(80, g.edges().filter(|&(u, v)| (u < 40) != (v < 40)))?;
    assert!(list_triangles(&bipartite).is_empty());
    graphs.push(("triangle-free".into(), bipartite));

    let params = ListingParams::default();
    let mut rows = Vec::new();
    let (mut failures, mut caps, mut uncovered) = (0, 0, 0);
    let mut tags = BTreeSet::new();
    for (name, g) in &graphs {
        let (found, stats) = list_induced_diamonds_congest(g, &params)?;
        let cov = coverage_report(g, &stats)?;
        let ok = found == list_induced_diamonds(g)? && cov.ok && stats.decomposition.ok;
        failures += usize::from(!ok);
        caps += usize::from(!stats.caps_ok);
        uncovered += cov.uncovered.len();
        tags.extend(cov.by_tags.keys().cloned());
        rows.push(json!({"graph": name, "diamonds": cov.oracle, "by_tags": cov.by_tags, "ok": ok,
                         "caps_ok": stats.caps_ok, "rounds": stats.measured_rounds,
                         "max_gathered": stats.max_gathered_per_node, "max_query_list": stats.max_query_list}));
    }

    // forced all-sparse decomposition
    let g = Graph::gnp(96, 0.2, 1112);
    let dec = Decomposition::all_sparse(&g, Fraction::new(5, 6))?;
    let (found, stats) = list_with_decomposition(&g, &dec, params.epsilon, &SimConfig::for_graph(&g))?;
    let cov = coverage_report(&g, &stats)?;
    let ok = found == list_induced_diamonds(&g)? && cov.ok && stats.heavy.diamonds + stats.light.diamonds == 0;
    failures += usize::from(!ok);
    caps += usize::from(!stats.caps_ok);
    uncovered += cov.uncovered.len();
    rows.push(json!({"graph": "all-sparse", "diamonds": cov.oracle, "by_tags": cov.by_tags, "ok": ok}));

    let took = start.elapsed();
    Ok(Outcome {
        pass: failures == 0 && caps == 0 && uncovered == 0 && took < C11_LIMIT,
        summary: format!(
            "diamond listing on {} graphs: {failures} oracle mismatches, {uncovered} uncovered, {caps} cap violations, tags {:?}, {:.1}s (limit 600s)",
            rows.len(),
            tags,
            took.as_secs_f64()
        ),
        report: Value::Array(rows),
    })
}

fn criterion_12(first: &[(usize, &Value)]) -> Result<Outcome> {
    let mut differing = Vec::new();
    for &(id, report) in first {
        let again = match id {
            1 => criterion_1()?,
            6 => criterion_6()?,
            11 => criterion_11()?,
            _ => unreachable!(),
        };
        if serde_json::to_string(report)? != serde_json::to_string(&again.report)? {
            differing.push(id);
        }
    }
    Ok(Outcome {
        pass: differing.is_empty(),
        summary: format!(
            "reran criteria 1, 6, 11 with the same seeds: {} reports differ {:?}",
            differing.len(),
            differing
        ),
        report: json!(differing),
    })
}

fn main() {
    let expected_fail: BTreeSet<usize> = [2, 3].into();
    let criteria: Vec<(usize, Criterion)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut outcomes = Vec::new();
    for (id, f) in criteria {
        let out = f().unwrap_or_else(|e| Outcome { pass: false, summary: format!("error: {e}"), report: Value::Null });
        outcomes.push((id, out));
    }
    let again: Vec<(usize, &Value)> =
        outcomes.iter().filter(|(id, _)| [1, 6, 11].contains(id)).map(|(id, o)| (*id, &o.report)).collect();
    let twelve = criterion_12(&again).unwrap_or_else(|e| Outcome {
        pass: false,
        summary: format!("error: {e}"),
        report: Value::Null,
    });
    outcomes.push((12, twelve));

    let mut unexpected = 0;
    println!();
    for (id, o) in &outcomes {
        let want = !expected_fail.contains(id);
        let status = match (o.pass, want) {
            (true, true) => "PASS",
            (false, false) => "FAIL (expected)",
            (true, false) => "PASS (unexpected)",
            (false, true) => "FAIL",
        };
        unexpected += usize::from(o.pass != want);
        println!("criterion {id:>2}: {status:<17} {}", o.summary);
    }
    println!();
    if unexpected > 0 {
        println!("acceptance: {unexpected} criteria deviate from the expected outcome");
        std::process::exit(1);
    }
    println!("acceptance: all criteria match the expected outcome ({} expected failures)", expected_fail.len());
}
