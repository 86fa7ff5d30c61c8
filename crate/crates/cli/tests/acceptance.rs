//! One test per acceptance criterion. Each prints a single
//! `criterion N (name): PASS|FAIL ...` line and panics on failure.
//!
//! Run with `cargo test -p mbfkit-cli --test acceptance`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mbfkit::algebra::{
    BoolValue, BoolVector, DistanceMap, MaxMin, MinPlus, NodeId, PathSet, Semimodule, Semiring,
    WidestMap,
};
use mbfkit::apps::{buy_at_bulk, kmedian, kmedian_tree_dp, BinaryTree, Cable, Demand};
use mbfkit::engine::{instances, mbf_run, mbf_run_filter_at_end};
use mbfkit::frt::{
    build_frt_tree_on, le_algorithm, reconstruct_path, stretch_report, EmbeddingConfig,
    EmbeddingContext, FrtTree, RandomOrder,
};
use mbfkit::graph::{generate, oracles, AdjacencyOperator, WeightedGraph};
use mbfkit::hopset::{log2n, HopsetStrategy};
use mbfkit::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Prints the verdict outside the test harness's capture and fails the test
/// on `FAIL`.
fn verdict(id: usize, name: &str, start: Instant, failure: Option<String>, detail: String) {
    let secs = start.elapsed().as_secs_f64();
    let line = match &failure {
        None => format!("criterion {id} ({name}): PASS {detail} [{secs:.1}s]\n"),
        Some(why) => format!("criterion {id} ({name}): FAIL {why} {detail} [{secs:.1}s]\n"),
    };
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    if let Some(why) = failure {
        panic!("criterion {id} failed: {why}");
    }
}

fn random_graph(r: &mut ChaCha8Rng, lo: usize, hi: usize) -> WeightedGraph {
    let n = r.gen_range(lo..=hi);
    let extra = r.gen_range(0..=n);
    generate::random_connected(n, extra, n as u32, r)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------- laws

fn check(ok: bool, law: &str, fails: &mut Vec<String>) {
    if !ok && fails.len() < 5 {
        fails.push(law.to_string());
    }
}

fn semiring_laws<S: Semiring>(a: &S, b: &S, c: &S, commutative: bool, fails: &mut Vec<String>) {
    check(
        a.oplus(b).oplus(c) == a.oplus(&b.oplus(c)),
        "oplus associative",
        fails,
    );
    check(a.oplus(b) == b.oplus(a), "oplus commutative", fails);
    check(a.oplus(&S::zero()) == *a, "zero neutral", fails);
    check(
        a.odot(b).odot(c) == a.odot(&b.odot(c)),
        "odot associative",
        fails,
    );
    check(
        a.odot(&S::one()) == *a && S::one().odot(a) == *a,
        "one neutral",
        fails,
    );
    check(
        a.odot(&b.oplus(c)) == a.odot(b).oplus(&a.odot(c)),
        "left distributive",
        fails,
    );
    check(
        b.oplus(c).odot(a) == b.odot(a).oplus(&c.odot(a)),
        "right distributive",
        fails,
    );
    check(
        a.odot(&S::zero()) == S::zero() && S::zero().odot(a) == S::zero(),
        "zero annihilates",
        fails,
    );
    if commutative {
        check(a.odot(b) == b.odot(a), "odot commutative", fails);
    }
}

fn module_laws<S: Semiring, M: Semimodule<S>>(
    s: &S,
    t: &S,
    x: &M,
    y: &M,
    z: &M,
    fails: &mut Vec<String>,
) {
    check(
        x.merge(y).merge(z) == x.merge(&y.merge(z)),
        "merge associative",
        fails,
    );
    check(x.merge(y) == y.merge(x), "merge commutative", fails);
    check(x.merge(&M::bottom()) == *x, "bottom neutral", fails);
    check(x.scale(&S::one()) == *x, "one acts trivially", fails);
    check(x.scale(&S::zero()) == M::bottom(), "zero preserving", fails);
    check(M::bottom().scale(s) == M::bottom(), "bottom absorbs", fails);
    check(
        x.merge(y).scale(s) == x.scale(s).merge(&y.scale(s)),
        "scale over merge",
        fails,
    );
    check(
        x.scale(&s.oplus(t)) == x.scale(s).merge(&x.scale(t)),
        "oplus over scale",
        fails,
    );
    check(
        x.scale(&s.odot(t)) == x.scale(t).scale(s),
        "compatible",
        fails,
    );
}

fn minplus(r: &mut ChaCha8Rng) -> MinPlus {
    if r.gen_bool(0.2) {
        MinPlus::INF
    } else {
        MinPlus(r.gen_range(0..60) as f64)
    }
}

fn maxmin(r: &mut ChaCha8Rng) -> MaxMin {
    if r.gen_bool(0.2) {
        MaxMin(f64::INFINITY)
    } else {
        MaxMin(r.gen_range(0..60) as f64)
    }
}

fn pathset(r: &mut ChaCha8Rng) -> PathSet {
    let items: Vec<(Vec<NodeId>, f64)> = (0..r.gen_range(0..5))
        .map(|_| {
            let p = (0..r.gen_range(1..4)).map(|_| r.gen_range(0..4)).collect();
            (p, r.gen_range(0..20) as f64)
        })
        .collect();
    let s = PathSet::from_paths(items);
    if r.gen_bool(0.2) {
        s.oplus(&PathSet::one())
    } else {
        s
    }
}

fn distance_map(r: &mut ChaCha8Rng) -> DistanceMap {
    DistanceMap::from_pairs(
        (0..r.gen_range(0..6))
            .map(|_| (r.gen_range(0..8), r.gen_range(0..60) as f64))
            .collect(),
    )
}

fn widest_map(r: &mut ChaCha8Rng) -> WidestMap {
    WidestMap::from_pairs(
        (0..r.gen_range(0..6))
            .map(|_| (r.gen_range(0..8), r.gen_range(1..60) as f64))
            .collect(),
    )
}

fn bool_vector(r: &mut ChaCha8Rng) -> BoolVector {
    BoolVector::from_nodes((0..r.gen_range(0..6)).map(|_| r.gen_range(0..8)).collect())
}

#[test]
fn criterion_01_algebra_laws() {
    let start = Instant::now();
    const CHECKS: u64 = 10_000;
    let mut fails = Vec::new();
    let mut r = rng::stream(1, "laws", 0);
    for _ in 0..CHECKS {
        let (a, b, c) = (minplus(&mut r), minplus(&mut r), minplus(&mut r));
        semiring_laws(&a, &b, &c, true, &mut fails);
        let (a, b, c) = (maxmin(&mut r), maxmin(&mut r), maxmin(&mut r));
        semiring_laws(&a, &b, &c, true, &mut fails);
        let (a, b, c) = (BoolValue(r.gen()), BoolValue(r.gen()), BoolValue(r.gen()));
        semiring_laws(&a, &b, &c, true, &mut fails);
        let (a, b, c) = (pathset(&mut r), pathset(&mut r), pathset(&mut r));
        semiring_laws(&a, &b, &c, false, &mut fails);

        let (s, t) = (minplus(&mut r), minplus(&mut r));
        let (x, y, z) = (
            distance_map(&mut r),
            distance_map(&mut r),
            distance_map(&mut r),
        );
        module_laws(&s, &t, &x, &y, &z, &mut fails);
        let (s, t) = (maxmin(&mut r), maxmin(&mut r));
        let (x, y, z) = (widest_map(&mut r), widest_map(&mut r), widest_map(&mut r));
        module_laws(&s, &t, &x, &y, &z, &mut fails);
        let (s, t) = (BoolValue(r.gen()), BoolValue(r.gen()));
        let (x, y, z) = (
            bool_vector(&mut r),
            bool_vector(&mut r),
            bool_vector(&mut r),
        );
        module_laws(&s, &t, &x, &y, &z, &mut fails);
        let (s, t) = (pathset(&mut r), pathset(&mut r));
        let (x, y, z) = (pathset(&mut r), pathset(&mut r), pathset(&mut r));
        module_laws(&s, &t, &x, &y, &z, &mut fails);
    }
    let failure = (!fails.is_empty()).then(|| fails.join(", "));
    verdict(
        1,
        "algebra laws",
        start,
        failure,
        format!("{CHECKS} checks per structure, 4 semirings, 4 semimodules"),
    );
}

// ------------------------------------------------------- equivalence

#[test]
fn criterion_02_filter_every_step_equals_filter_at_end() {
    let start = Instant::now();
    let mut failure = None;
    let mut runs = 0;
    for i in 0..100u64 {
        let mut r = rng::stream(2, "equivalence", i);
        let g = random_graph(&mut r, 8, 32);
        let n = g.n();
        let a = AdjacencyOperator::new(&g);
        let mut nodes: Vec<NodeId> = (0..n).collect();
        nodes.shuffle(&mut r);
        let sources = nodes[..r.gen_range(1..n)].to_vec();
        nodes.shuffle(&mut r);
        let order = RandomOrder::from_permutation(&nodes, 1.0, 0);
        let bound = r.gen_range(1..=2 * n) as f64;
        let algs = [
            instances::apsp(n),
            instances::kssp(n, 3).unwrap(),
            instances::source_detection(n, &sources, bound, 2, None).unwrap(),
            le_algorithm(n, &order, None),
        ];
        for alg in &algs {
            runs += 1;
            let every = mbf_run(alg, a).unwrap();
            let end = mbf_run_filter_at_end(alg, a).unwrap();
            if every.state != end.state && failure.is_none() {
                failure = Some(format!("{} differs on graph {i}", alg.name));
            }
        }
    }
    verdict(
        2,
        "framework equivalence",
        start,
        failure,
        format!("{runs} runs on 100 graphs"),
    );
}

// ----------------------------------------------------- oracle checks

/// Widest `v`–`s` path width by thresholding: the largest edge weight `t`
/// such that `v` and `s` are connected using edges of weight at least `t`.
fn widest_by_threshold(g: &WeightedGraph, s: NodeId) -> Vec<f64> {
    let n = g.n();
    let mut width = vec![0.0; n];
    width[s] = f64::INFINITY;
    let mut ts: Vec<f64> = (0..n)
        .flat_map(|v| g.neighbors(v).iter().map(|&(_, w)| w))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for &t in &ts {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &(w, wt) in g.neighbors(v) {
                if wt >= t && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        for v in 0..n {
            if seen[v] && v != s {
                width[v] = t;
            }
        }
    }
    width
}

fn ksdp_by_enumeration(
    g: &WeightedGraph,
    v: NodeId,
    s: NodeId,
    k: usize,
    distinct: bool,
    h: usize,
) -> PathSet {
    let all = oracles::enumerate_paths(g, v, h).unwrap();
    let mut ending: Vec<(f64, Vec<NodeId>)> = all
        .iter()
        .filter(|(p, _)| p.last() == Some(&s))
        .map(|(p, w)| (w, p.clone()))
        .collect();
    ending.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    if distinct {
        ending.dedup_by(|b, a| a.0 == b.0);
    }
    PathSet::from_paths(ending.into_iter().take(k).map(|(w, p)| (p, w)))
}

#[test]
fn criterion_03_instances_match_oracles() {
    let start = Instant::now();
    let mut fails: Vec<String> = Vec::new();
    let mut note = |ok: bool, what: String| {
        if !ok && fails.len() < 5 {
            fails.push(what);
        }
    };
    for i in 0..30u64 {
        let mut r = rng::stream(3, "distances", i);
        let g = random_graph(&mut r, 8, 32);
        let n = g.n();
        let a = AdjacencyOperator::new(&g);
        let exact = oracles::all_pairs_dijkstra(&g);
        let apsp = mbf_run(&instances::apsp(n), a).unwrap();
        note(
            (0..n).all(|v| (0..n).all(|w| apsp.state[v].get(w) == exact[v][w])),
            format!("apsp graph {i}"),
        );
        let s = r.gen_range(0..n);
        let sssp = mbf_run(&instances::sssp(n, s).unwrap(), a).unwrap();
        note(
            (0..n).all(|v| sssp.state[v].entries() == [(s, exact[v][s])]),
            format!("sssp graph {i}"),
        );
        let mut sources: Vec<NodeId> = (0..n).collect();
        sources.shuffle(&mut r);
        sources.truncate(r.gen_range(1..=n));
        let mssp = mbf_run(&instances::mssp(n, &sources).unwrap(), a).unwrap();
        note(
            (0..n).all(|v| {
                mssp.state[v].len() == sources.len()
                    && sources.iter().all(|&s| mssp.state[v].get(s) == exact[v][s])
            }),
            format!("mssp graph {i}"),
        );
    }
    for i in 0..20u64 {
        let mut r = rng::stream(3, "widest", i);
        let g = random_graph(&mut r, 6, 20);
        let n = g.n();
        let a = AdjacencyOperator::new(&g);
        let apwp = mbf_run(&instances::apwp(n), a).unwrap();
        for s in 0..n {
            let width = widest_by_threshold(&g, s);
            note(
                (0..n).all(|v| apwp.state[v].get(s) == width[v]),
                format!("apwp graph {i} source {s}"),
            );
        }
        let s = r.gen_range(0..n);
        let sswp = mbf_run(&instances::sswp(n, s).unwrap(), a).unwrap();
        let width = widest_by_threshold(&g, s);
        note(
            (0..n).all(|v| sswp.state[v].get(s) == width[v]),
            format!("sswp graph {i}"),
        );
    }
    for i in 0..15u64 {
        let mut r = rng::stream(3, "paths", i);
        let g = random_graph(&mut r, 3, 8);
        let n = g.n();
        let a = AdjacencyOperator::new(&g);
        let s = r.gen_range(0..n);
        for k in 1..=3 {
            for h in 1..=5 {
                for distinct in [false, true] {
                    let out =
                        mbf_run(&instances::ksdp(n, s, k, distinct, Some(h)).unwrap(), a).unwrap();
                    note(
                        (0..n)
                            .all(|v| out.state[v] == ksdp_by_enumeration(&g, v, s, k, distinct, h)),
                        format!(
                            "k{}sdp graph {i} k {k} h {h}",
                            if distinct { "d" } else { "" }
                        ),
                    );
                }
            }
        }
    }
    for i in 0..20u64 {
        let mut r = rng::stream(3, "bfs", i);
        let g = random_graph(&mut r, 6, 32);
        let n = g.n();
        for h in [0, 1, 2, 3, 6, n] {
            let out = mbf_run(&instances::connectivity(n, h), AdjacencyOperator::new(&g)).unwrap();
            note(
                (0..n).all(|v| out.state[v].nodes() == oracles::bfs_within(&g, v, h)),
                format!("connectivity graph {i} h {h}"),
            );
        }
    }
    let failure = (!fails.is_empty()).then(|| fails.join(", "));
    verdict(
        3,
        "oracle equivalence",
        start,
        failure,
        "apsp/sssp/mssp, sswp/apwp, ksdp/kdsdp, connectivity".into(),
    );
}

// ------------------------------------------------------ H structure

/// Parents of a lexicographic `(distance, hops)` shortest-path tree.
fn min_hop_parents(g: &WeightedGraph, s: NodeId) -> Vec<usize> {
    let n = g.n();
    let mut key = vec![(f64::INFINITY, usize::MAX); n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    key[s] = (0.0, 0);
    for _ in 0..n {
        let Some(v) = (0..n)
            .filter(|&v| !done[v] && key[v].0.is_finite())
            .min_by(|&a, &b| key[a].0.total_cmp(&key[b].0).then(key[a].1.cmp(&key[b].1)))
        else {
            break;
        };
        done[v] = true;
        for &(w, wt) in g.neighbors(v) {
            let cand = (key[v].0 + wt, key[v].1 + 1);
            if cand.0 < key[w].0 || (cand.0 == key[w].0 && cand.1 < key[w].1) {
                key[w] = cand;
                parent[w] = v;
            }
        }
    }
    parent
}

fn unimodal(levels: &[u32]) -> bool {
    let mut descending = false;
    for w in levels.windows(2) {
        if w[1] < w[0] {
            descending = true;
        } else if w[1] > w[0] && descending {
            return false;
        }
    }
    true
}

#[test]
fn criterion_04_h_structure() {
    let start = Instant::now();
    let mut failure = None;
    let mut detail = Vec::new();
    for n in [32usize, 64, 128] {
        let (mut monotone, mut short) = (0, 0);
        for seed in 0..50u64 {
            let mut r = rng::stream(4, "h-structure", seed + 1000 * n as u64);
            let g = generate::standard_instance(n, &mut r);
            let cfg = EmbeddingConfig {
                hopset: HopsetStrategy::Identity,
                ..EmbeddingConfig::default().with_seed(seed)
            };
            let ctx = EmbeddingContext::new(&g, &cfg).unwrap();
            let h = ctx.h.materialize_h().unwrap();
            let lv = &ctx.h.levels;
            let ok = (0..n).all(|s| {
                let parent = min_hop_parents(&h, s);
                (0..n).all(|t| {
                    let mut path = vec![t];
                    while *path.last().unwrap() != s {
                        path.push(parent[*path.last().unwrap()]);
                    }
                    let levels: Vec<u32> =
                        path.windows(2).map(|e| lv.edge_level(e[0], e[1])).collect();
                    let floor = lv.edge_level(s, t);
                    levels.iter().all(|&l| l >= floor) && unimodal(&levels)
                })
            });
            monotone += ok as usize;
            let spd = oracles::shortest_path_diameter(&h).unwrap();
            short += (spd <= 4 * (2 * ctx.h.lambda() as usize + 1) * log2n(n)) as usize;
        }
        detail.push(format!(
            "n={n}: monotone {monotone}/50, spd bound {short}/50"
        ));
        if (monotone < 49 || short < 48) && failure.is_none() {
            failure = Some(format!("n={n} below threshold"));
        }
    }
    verdict(4, "H structure", start, failure, detail.join("; "));
}

// --------------------------------------------------------- sandwich

#[test]
fn criterion_05_sandwich() {
    let start = Instant::now();
    let mut failure = None;
    let mut pairs = 0usize;
    let mut instances_run = 0;
    for (si, strategy) in [HopsetStrategy::Identity, HopsetStrategy::ClusterShortcut]
        .into_iter()
        .enumerate()
    {
        for eps_hat in [0.125, 0.3, 1.0] {
            for seed in 0..8u64 {
                let mut r = rng::stream(5, "sandwich", seed + 100 * si as u64);
                let g = random_graph(&mut r, 16, 64);
                let n = g.n();
                let cfg = EmbeddingConfig {
                    eps_hat: Some(eps_hat),
                    hopset: strategy,
                    ..EmbeddingConfig::default().with_seed(seed)
                };
                let ctx = EmbeddingContext::new(&g, &cfg).unwrap();
                let out = ctx.h.oracle_run(&instances::apsp(n)).unwrap();
                let bound = (1.0 + eps_hat).powi(ctx.h.lambda() as i32 + 1)
                    * (1.0 + ctx.h.aug.eps_hopset.unwrap_or(0.0));
                let exact = oracles::all_pairs_dijkstra(&g);
                instances_run += 1;
                for v in 0..n {
                    for w in 0..n {
                        pairs += 1;
                        let (dh, dg) = (out.state[v].get(w), exact[v][w]);
                        let ok = dg <= dh * (1.0 + 1e-9) && dh <= bound * dg * (1.0 + 1e-9);
                        if !ok && failure.is_none() {
                            failure = Some(format!(
                                "pair {v} {w}: dist_G {dg}, dist_H {dh}, bound {bound}"
                            ));
                        }
                    }
                }
            }
        }
    }
    verdict(
        5,
        "sandwich bound",
        start,
        failure,
        format!("{pairs} pairs on {instances_run} instances"),
    );
}

// ------------------------------------------------ oracle vs explicit

#[test]
fn criterion_06_oracle_matches_explicit_h() {
    let start = Instant::now();
    let mut failure = None;
    for i in 0..50u64 {
        let mut r = rng::stream(6, "explicit", i);
        let g = random_graph(&mut r, 4, 48);
        let n = g.n();
        // ε̂ = 1/2 keeps every product and sum exact for integer weights.
        let cfg = EmbeddingConfig {
            eps_hat: Some(0.5),
            hopset: HopsetStrategy::Identity,
            ..EmbeddingConfig::default().with_seed(i)
        };
        let ctx = EmbeddingContext::new(&g, &cfg).unwrap();
        let h = ctx.h.materialize_h().unwrap();
        let a = AdjacencyOperator::new(&h);
        for alg in [instances::apsp(n), ctx.le_algorithm(None)] {
            let via_oracle = ctx.h.oracle_run(&alg).unwrap();
            let direct = mbf_run(&alg, a).unwrap();
            if via_oracle.state != direct.state && failure.is_none() {
                failure = Some(format!("{} differs on graph {i} (n={n})", alg.name));
            }
        }
    }
    verdict(
        6,
        "oracle vs explicit H",
        start,
        failure,
        "LE lists and APSP on 50 graphs".into(),
    );
}

// -------------------------------------------------------- LE lists

#[test]
fn criterion_07_le_list_lengths() {
    let start = Instant::now();
    let n = 1024;
    let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let mut failure = None;
    let (mut lo, mut hi, mut longest) = (f64::INFINITY, 0.0f64, 0usize);
    for seed in 0..20u64 {
        let mut r = rng::stream(7, "le-lengths", seed);
        let g = generate::standard_instance(n, &mut r);
        let ctx = EmbeddingContext::new(&g, &EmbeddingConfig::default().with_seed(seed)).unwrap();
        let lists = ctx.le_lists(None).unwrap();
        let mean = lists.iter().map(|l| l.len()).sum::<usize>() as f64 / n as f64;
        let max = lists.iter().map(|l| l.len()).max().unwrap();
        lo = lo.min(mean);
        hi = hi.max(mean);
        longest = longest.max(max);
        let ok = (0.5 * harmonic..=3.0 * harmonic).contains(&mean) && max as f64 <= 10.0 * harmonic;
        if !ok && failure.is_none() {
            failure = Some(format!("seed {seed}: mean {mean:.2}, max {max}"));
        }
    }
    let detail = format!("H_n={harmonic:.2}, means in [{lo:.2}, {hi:.2}], max {longest}");
    verdict(7, "LE list lengths", start, failure, detail);
}

// -------------------------------------------------------------- FRT

#[test]
fn criterion_08_frt_correctness() {
    let start = Instant::now();
    let n = 128;
    let mut r = rng::stream(8, "frt", 0);
    let g = generate::standard_instance(n, &mut r);
    let mut failure = None;
    let mut trees = Vec::new();
    let mut lists_checked = 0;
    for seed in 0..100u64 {
        let cfg = EmbeddingConfig::default().with_seed(seed);
        let ctx = EmbeddingContext::new(&g, &cfg).unwrap();
        let lists = ctx.le_lists(None).unwrap();
        for l in &lists {
            lists_checked += 1;
            if let Err(e) = l.validate(&ctx.order) {
                failure.get_or_insert(format!("seed {seed} node {}: {e}", l.node));
            }
        }
        trees.push(ctx.tree(&lists).unwrap());
    }
    let report = stretch_report(&g, &trees).unwrap();
    let bound = 16.0 * (n as f64).ln();
    let within = report.fraction_within(bound);
    if report.domination_violations > 0 {
        failure.get_or_insert(format!(
            "{} domination violations",
            report.domination_violations
        ));
    }
    if within < 0.95 {
        failure.get_or_insert(format!("only {:.3} of pairs within {bound:.1}", within));
    }
    let detail = format!(
        "{} pairs, 0 domination violations, {lists_checked} lists valid, {:.3} within 16 ln n, max mean stretch {:.2}",
        report.pairs, within, report.max_mean_ratio
    );
    verdict(8, "FRT correctness", start, failure, detail);
}

#[test]
fn criterion_09_path_reconstruction() {
    let start = Instant::now();
    let mut failure = None;
    let mut edges = 0;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut r = rng::stream(9, "reconstruct", seed);
        let g = random_graph(&mut r, 8, 64);
        let hopset = if seed % 2 == 0 {
            HopsetStrategy::Identity
        } else {
            HopsetStrategy::ClusterShortcut
        };
        let cfg = EmbeddingConfig {
            hopset,
            ..EmbeddingConfig::default().with_seed(seed)
        };
        let ctx = EmbeddingContext::new(&g, &cfg).unwrap();
        let (lists, trace) = ctx.le_lists_traced().unwrap();
        let tree = ctx.tree(&lists).unwrap();
        for (id, x) in tree.nodes.iter().enumerate() {
            let Some(p) = x.parent else { continue };
            edges += 1;
            let walk = match reconstruct_path(&tree, id, &trace, &ctx.h.aug) {
                Ok(w) => w,
                Err(e) => {
                    failure.get_or_insert(format!("tree {seed} edge {id}: {e}"));
                    continue;
                }
            };
            let ends =
                walk.first() == Some(&x.center) && walk.last() == Some(&tree.nodes[p].center);
            match oracles::walk_weight(&g, &walk) {
                Some(w) if ends && w <= 3.0 * x.weight * (1.0 + 1e-12) => {
                    worst = worst.max(w / x.weight)
                }
                Some(w) => {
                    failure.get_or_insert(format!(
                        "tree {seed} edge {id}: weight {w} vs {}",
                        x.weight
                    ));
                }
                None => {
                    failure.get_or_insert(format!("tree {seed} edge {id}: not a walk"));
                }
            }
        }
    }
    let detail = format!("{edges} tree edges, worst walk/edge ratio {worst:.3}");
    verdict(9, "path reconstruction", start, failure, detail);
}

// ------------------------------------------------------- k-median

fn subsets_up_to(items: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let more: Vec<Vec<NodeId>> = out
            .iter()
            .filter(|s| s.len() < k)
            .map(|s| {
                let mut t = s.clone();
                t.push(x);
                t
            })
            .collect();
        out.extend(more);
    }
    out.retain(|s| !s.is_empty());
    out
}

fn tree_objective(t: &FrtTree, weights: &[f64], f: &[NodeId]) -> f64 {
    t.leaves()
        .iter()
        .map(|&v| {
            weights[v]
                * f.iter()
                    .map(|&x| t.tree_distance(v, x).unwrap())
                    .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

fn graph_optimum(g: &WeightedGraph, k: usize) -> f64 {
    let d = oracles::all_pairs_dijkstra(g);
    let all: Vec<NodeId> = (0..g.n()).collect();
    subsets_up_to(&all, k)
        .iter()
        .map(|f| {
            (0..g.n())
                .map(|v| f.iter().map(|&x| d[v][x]).fold(f64::INFINITY, f64::min))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_10_kmedian() {
    let start = Instant::now();
    let mut failure = None;
    for i in 0..500u64 {
        let mut r = rng::stream(10, "tree-dp", i);
        let g = random_graph(&mut r, 2, 10);
        let n = g.n();
        let ctx = EmbeddingContext::new(&g, &EmbeddingConfig::default().with_seed(i)).unwrap();
        let mut leaves: Vec<NodeId> = (0..n).collect();
        leaves.shuffle(&mut r);
        leaves.truncate(r.gen_range(1..=n));
        leaves.sort_unstable();
        let lists = ctx.le_lists(Some(&leaves)).unwrap();
        let tree = build_frt_tree_on(&lists, &leaves, &ctx.order, ctx.w_min, ctx.w_max).unwrap();
        let weights: Vec<f64> = (0..n).map(|_| r.gen_range(0..5) as f64).collect();
        let mut allowed = leaves.clone();
        allowed.shuffle(&mut r);
        allowed.truncate(r.gen_range(1..=leaves.len()));
        let k = r.gen_range(1..=3);
        let sol = kmedian_tree_dp(&BinaryTree::from_frt(&tree), &weights, &allowed, k).unwrap();
        let best = subsets_up_to(&allowed, k)
            .iter()
            .map(|f| tree_objective(&tree, &weights, f))
            .fold(f64::INFINITY, f64::min);
        let valid = sol.facilities.len() <= k && sol.facilities.iter().all(|f| allowed.contains(f));
        if (!valid
            || !close(sol.objective, best)
            || !close(tree_objective(&tree, &weights, &sol.facilities), best))
            && failure.is_none()
        {
            failure = Some(format!(
                "tree instance {i}: dp {} vs optimum {best}",
                sol.objective
            ));
        }
    }
    let mut worst = 0.0f64;
    let mut configs = 0;
    for i in 0..6u64 {
        let mut r = rng::stream(10, "pipeline", i);
        let g = random_graph(&mut r, 6, 12);
        for k in 1..=3 {
            configs += 1;
            let opt = graph_optimum(&g, k);
            let mean = (0..20u64)
                .map(|s| {
                    kmedian(&g, k, &EmbeddingConfig::default().with_seed(s))
                        .unwrap()
                        .objective
                })
                .sum::<f64>()
                / 20.0;
            worst = worst.max(mean / opt);
            if mean > 8.0 * ((k + 1) as f64).ln() * opt && failure.is_none() {
                failure = Some(format!("graph {i} k {k}: mean {mean} vs optimum {opt}"));
            }
        }
    }
    let detail = format!("500 tree instances exact; {configs} pipeline configs x 20 seeds, worst mean/OPT {worst:.3}");
    verdict(10, "k-median", start, failure, detail);
}

// ---------------------------------------------------- buy-at-bulk

#[test]
fn criterion_11_buy_at_bulk() {
    let start = Instant::now();
    let mut failure = None;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let mut r = rng::stream(11, "bab", i);
        let g = random_graph(&mut r, 2, 64);
        let n = g.n();
        let demands: Vec<Demand> = (0..r.gen_range(0..=20))
            .map(|_| Demand {
                s: r.gen_range(0..n),
                t: r.gen_range(0..n),
                amount: r.gen_range(1..=10) as f64,
            })
            .collect();
        let cables: Vec<Cable> = (0..r.gen_range(1..=4))
            .map(|_| Cable {
                capacity: r.gen_range(1..=8) as f64,
                cost: r.gen_range(1..=10) as f64,
            })
            .collect();
        let hopset = if i % 2 == 0 {
            HopsetStrategy::Identity
        } else {
            HopsetStrategy::ClusterShortcut
        };
        let cfg = EmbeddingConfig {
            hopset,
            ..EmbeddingConfig::default().with_seed(i)
        };
        let sol = buy_at_bulk(&g, &demands, &cables, &cfg).unwrap();
        let mut flow: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        let mut ok = sol.routes.len() == demands.len();
        for (d, route) in demands.iter().zip(&sol.routes) {
            ok &= route.first() == Some(&d.s) && route.last() == Some(&d.t);
            ok &= oracles::walk_weight(&g, route).is_some();
            for e in route.windows(2) {
                *flow.entry((e[0].min(e[1]), e[0].max(e[1]))).or_default() += d.amount;
            }
        }
        ok &= flow
            .iter()
            .all(|(&(u, v), &f)| sol.capacity(&cables, u, v) >= f);
        ok &= sol.cost <= 3.0 * sol.tree_cost * (1.0 + 1e-12);
        if sol.tree_cost > 0.0 {
            worst = worst.max(sol.cost / sol.tree_cost);
        }
        if !ok && failure.is_none() {
            failure = Some(format!("instance {i} infeasible or too expensive"));
        }
    }
    verdict(
        11,
        "buy-at-bulk",
        start,
        failure,
        format!("200 instances, worst cost/tree cost {worst:.3}"),
    );
}

// ---------------------------------------------------- determinism

fn sample_graph() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample128.txt")
}

fn cli(args: &[String], threads: usize) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mbfkit"))
        .env_remove("MBFKIT_THREADS")
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .unwrap();
    (out.status.code(), out.stdout)
}

#[test]
fn criterion_12_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let g = sample_graph().to_str().unwrap().to_string();
    let demands = dir.path().join("demands.txt");
    std::fs::write(&demands, "0 5 3\n10 100 2.5\n42 7 1\n").unwrap();
    let cables = dir.path().join("cables.txt");
    std::fs::write(&cables, "1 1\n10 4\n100 20\n").unwrap();
    let commands: Vec<Vec<String>> = [
        "embed --seed 5 --samples 3 --stats",
        "embed --seed 5 --format json",
        "metric --seed 2",
        "lelists --seed 9",
        "lelists --seed 9 --hopset shortcut",
        "kmedian --k 4 --seed 3",
        "solve --algo apsp",
        "solve --algo ksdp --k 2 --source 3 --hops 4",
        "solve --algo widest --source 1",
        "solve --algo connectivity --hops 2",
    ]
    .iter()
    .map(|c| {
        let mut v: Vec<String> = c.split(' ').map(String::from).collect();
        v.extend(["--input".into(), g.clone()]);
        v
    })
    .chain(std::iter::once(
        [
            "bab",
            "--input",
            &g,
            "--demands",
            demands.to_str().unwrap(),
            "--cables",
            cables.to_str().unwrap(),
            "--seed",
            "4",
        ]
        .map(String::from)
        .to_vec(),
    ))
    .collect();
    let mut failure = None;
    for args in &commands {
        let base = cli(args, 1);
        if base.0 != Some(0) {
            failure.get_or_insert(format!("`{}` exited with {:?}", args.join(" "), base.0));
            continue;
        }
        for threads in [1, 2, 4] {
            if cli(args, threads) != base {
                failure.get_or_insert(format!(
                    "`{}` differs with --threads {threads}",
                    args.join(" ")
                ));
            }
        }
    }
    verdict(
        12,
        "determinism",
        start,
        failure,
        format!("{} commands x 4 runs", commands.len()),
    );
}
