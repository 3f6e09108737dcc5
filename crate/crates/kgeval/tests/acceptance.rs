//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Tolerances are pinned
//! in the assertions below.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kgeval::config::{EvalConfig, GraphParams};
use kgeval::graph::{build_entity_relation_graph, EdgeKind, EntityGraph, Group, Triplet};
use kgeval::harness::{
    pearson, sensitivity_run, spearman, CorrOutcome, Metric, SensitivityMode,
};
use kgeval::oracle::{
    brute_force_best_partition, brute_force_reachability, GoldenCase, MAX_PARTITION_NODES,
};
use kgeval::providers::{
    EmbeddingSimilarity, HashEmbedder, ProviderSet, SimilarityProvider, TableSimilarityProvider,
};
use kgeval::scoring::{
    louvain_partition, modularity_of, multi_hop_score, score_graph, Traversal,
};

const GOLDEN_JSON: &str = include_str!("fixtures/golden_cases.json");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden_cases() -> Vec<GoldenCase> {
    GoldenCase::load_all(GOLDEN_JSON).unwrap()
}

fn golden_graph(case: &GoldenCase) -> (EntityGraph, EvalConfig) {
    let cfg = EvalConfig {
        tau: case.tau,
        delta: case.delta,
        seed: case.seed,
        resolution: case.resolution,
        ..EvalConfig::default()
    };
    let provider = case.similarity_provider();
    let g = build_entity_relation_graph(
        &case.input_triplets().unwrap(),
        &case.context_triplets().unwrap(),
        &provider,
        &cfg.graph_params(),
    )
    .unwrap();
    (g, cfg)
}

/// Random lowercase label; alphabetic so ids never collide with relation
/// ordinals.
fn random_label(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let n: u32 = rng.gen_range(0..26u32.pow(3));
    let chars: String = [n / 676 % 26, n / 26 % 26, n % 26]
        .iter()
        .map(|&c| char::from(b'a' + c as u8))
        .collect();
    format!("{prefix}{chars}")
}

fn random_triplets(rng: &mut ChaCha8Rng, pool: &[String], count: usize) -> Vec<Triplet> {
    (0..count)
        .map(|_| {
            let h = pool[rng.gen_range(0..pool.len())].clone();
            let t = pool[rng.gen_range(0..pool.len())].clone();
            let r = random_label(rng, "rel ");
            Triplet::new(h, r, t).unwrap()
        })
        .collect()
}

/// Random similarity table covering all cross-group pairs.
fn random_table(
    rng: &mut ChaCha8Rng,
    t_in: &[Triplet],
    t_ctx: &[Triplet],
) -> TableSimilarityProvider {
    let mut entries = Vec::new();
    let labels = |ts: &[Triplet]| -> Vec<String> {
        let mut v: Vec<String> = Vec::new();
        for t in ts {
            for l in [&t.head, &t.tail] {
                if !v.contains(l) {
                    v.push(l.clone());
                }
            }
        }
        v
    };
    for a in labels(t_in) {
        for b in labels(t_ctx) {
            if a != b {
                entries.push((a.clone(), b.clone(), (rng.gen_range(0..=100) as f64) / 100.0));
            }
        }
    }
    TableSimilarityProvider::from_owned(entries, 0.0)
}

#[test]
fn criterion_1_graph_construction_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..500 {
        // Shared labels across groups exercise the identical-pair rule.
        let shared: Vec<String> = (0..3).map(|_| random_label(&mut rng, "shared ")).collect();
        let mut pool_in: Vec<String> = (0..6).map(|_| random_label(&mut rng, "in ")).collect();
        let mut pool_ctx: Vec<String> = (0..6).map(|_| random_label(&mut rng, "ctx ")).collect();
        pool_in.extend(shared.iter().cloned());
        pool_ctx.extend(shared.iter().cloned());

        let n_in = rng.gen_range(0..=6);
        let n_ctx = rng.gen_range(0..=6);
        let t_in = random_triplets(&mut rng, &pool_in, n_in);
        let t_ctx = random_triplets(&mut rng, &pool_ctx, n_ctx);
        let tau = [0.3, 0.5, 0.7, 0.9][rng.gen_range(0..4)];
        let provider = random_table(&mut rng, &t_in, &t_ctx);
        let params = GraphParams {
            tau,
            ..GraphParams::default()
        };
        let g = build_entity_relation_graph(&t_in, &t_ctx, &provider, &params).unwrap();

        // Law 1: structural edge count.
        let structural = g.edges().iter().filter(|e| e.kind == EdgeKind::Structural).count();
        assert_eq!(structural, 2 * (t_in.len() + t_ctx.len()), "round {round}");

        // Law 2: SIMILAR set equals the brute-force threshold scan.
        let in_labels = g.entity_labels(Group::Input);
        let ctx_labels = g.entity_labels(Group::Context);
        assert!(in_labels.len() <= 20 && ctx_labels.len() <= 20);
        let mut expected = std::collections::BTreeSet::new();
        if !in_labels.is_empty() && !ctx_labels.is_empty() {
            let matrix = provider.similarity_matrix(&in_labels, &ctx_labels).unwrap();
            for a in &in_labels {
                for b in &ctx_labels {
                    if matrix.get(a, b).unwrap() >= tau {
                        expected.insert((format!("{a}_in"), format!("{b}_ctx")));
                    }
                }
            }
        }
        let actual: std::collections::BTreeSet<(String, String)> = g
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Similar)
            .map(|e| (e.source.to_string(), e.target.to_string()))
            .collect();
        assert_eq!(actual, expected, "round {round}");

        // Law 3: cost complements weight on SIMILAR edges.
        for e in g.edges().iter().filter(|e| e.kind == EdgeKind::Similar) {
            assert!((e.cost + e.weight - 1.0).abs() < 1e-9, "round {round}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10s");
    println!("[PASS] criterion 1: graph-construction laws on 500 randomized sets ({elapsed:?})");
}

#[test]
fn criterion_2_dijkstra_matches_path_oracle() {
    let mut cases = 0;

    // The hand-derived split case: same graph, two budgets, 0.5 vs 1.0.
    let table = TableSimilarityProvider::new(vec![(("A", "Ap"), 0.9)], 0.0);
    let g = build_entity_relation_graph(
        &[Triplet::new("A", "r1", "B").unwrap()],
        &[Triplet::new("Ap", "r2", "C").unwrap()],
        &table,
        &GraphParams::default(),
    )
    .unwrap();
    for (delta, want) in [(0.5, 1.0), (0.25, 0.5)] {
        let scorer = multi_hop_score(&g, delta, Traversal::Bidirectional).unwrap();
        let oracle = brute_force_reachability(&g, delta).unwrap();
        assert_eq!(scorer.score, want);
        assert_eq!(scorer.score, oracle.score);
        assert_eq!(scorer.counted_nodes, oracle.counted_nodes);
        cases += 1;
    }

    // Golden fixtures within the oracle's cap.
    for case in golden_cases() {
        let (g, cfg) = golden_graph(&case);
        if g.node_count() > 12 {
            continue;
        }
        let scorer = multi_hop_score(&g, cfg.delta, Traversal::Bidirectional).unwrap();
        let oracle = brute_force_reachability(&g, cfg.delta).unwrap();
        assert_eq!(scorer.score, oracle.score, "{}", case.name);
        assert_eq!(scorer.counted_nodes, oracle.counted_nodes, "{}", case.name);
        cases += 1;
    }

    // Randomized small graphs (up to 12 nodes: 2 triplets per side).
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    while cases < 60 {
        let shared: Vec<String> = (0..2).map(|_| random_label(&mut rng, "s ")).collect();
        let mut pool: Vec<String> = (0..4).map(|_| random_label(&mut rng, "p ")).collect();
        pool.extend(shared);
        let n_in = rng.gen_range(1..=2);
        let n_ctx = rng.gen_range(1..=2);
        let t_in = random_triplets(&mut rng, &pool, n_in);
        let t_ctx = random_triplets(&mut rng, &pool, n_ctx);
        let provider = random_table(&mut rng, &t_in, &t_ctx);
        let tau = [0.5, 0.7][rng.gen_range(0..2)];
        let params = GraphParams {
            tau,
            ..GraphParams::default()
        };
        let g = build_entity_relation_graph(&t_in, &t_ctx, &provider, &params).unwrap();
        if g.node_count() > 12 {
            continue;
        }
        let delta = (rng.gen_range(0..=20) as f64) / 20.0;
        let scorer = multi_hop_score(&g, delta, Traversal::Bidirectional).unwrap();
        let oracle = brute_force_reachability(&g, delta).unwrap();
        assert_eq!(scorer.score, oracle.score, "case {cases}, delta {delta}");
        assert_eq!(scorer.counted_nodes, oracle.counted_nodes, "case {cases}");
        cases += 1;
    }
    assert!(cases >= 50);
    println!("[PASS] criterion 2: Dijkstra scorer matches the exhaustive-path oracle on {cases} graphs <= 12 nodes");
}

#[test]
fn criterion_3_monotonicity_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let deltas = [0.0, 0.1, 0.25, 0.5, 0.8, 1.5];
    let taus = [0.2, 0.4, 0.6, 0.8, 1.0];
    for round in 0..200 {
        let shared: Vec<String> = (0..2).map(|_| random_label(&mut rng, "s ")).collect();
        let mut pool: Vec<String> = (0..5).map(|_| random_label(&mut rng, "p ")).collect();
        pool.extend(shared);
        let n_in = rng.gen_range(1..=4);
        let n_ctx = rng.gen_range(1..=4);
        let t_in = random_triplets(&mut rng, &pool, n_in);
        let t_ctx = random_triplets(&mut rng, &pool, n_ctx);
        let provider = random_table(&mut rng, &t_in, &t_ctx);

        // Non-decreasing in delta at fixed tau.
        let params = GraphParams {
            tau: 0.6,
            ..GraphParams::default()
        };
        let g = build_entity_relation_graph(&t_in, &t_ctx, &provider, &params).unwrap();
        let mut last = -1.0;
        for delta in deltas {
            let s = multi_hop_score(&g, delta, Traversal::Bidirectional).unwrap().score;
            assert!(s >= last, "round {round}: delta monotonicity violated");
            last = s;
        }

        // Non-increasing in tau at fixed delta.
        let mut last = 2.0;
        for tau in taus {
            let params = GraphParams {
                tau,
                ..GraphParams::default()
            };
            let g = build_entity_relation_graph(&t_in, &t_ctx, &provider, &params).unwrap();
            let s = multi_hop_score(&g, 0.5, Traversal::Bidirectional).unwrap().score;
            assert!(s <= last, "round {round}: tau monotonicity violated");
            last = s;
        }
    }
    println!("[PASS] criterion 3: multi-hop monotone in delta and tau across 200 random graphs, zero violations");
}

#[test]
fn criterion_4_identity_and_disjoint_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let cfg = EvalConfig::default();
    let exact = EmbeddingSimilarity::new(HashEmbedder::new("acceptance-model"));
    for round in 0..25 {
        // Identity: multi_hop((X, X)) = 1.0 under an exact-match provider.
        let pool: Vec<String> = (0..4).map(|_| random_label(&mut rng, "x ")).collect();
        let n_x = rng.gen_range(1..=4);
        let x = random_triplets(&mut rng, &pool, n_x);
        let g = build_entity_relation_graph(&x, &x, &exact, &cfg.graph_params()).unwrap();
        for delta in [0.0, 0.5] {
            let mh = multi_hop_score(&g, delta, Traversal::Bidirectional).unwrap();
            assert_eq!(mh.score, 1.0, "round {round}: identity must score 1.0");
        }

        // Disjoint: similarity-free pairs score 0.0 everywhere.
        let pool_b: Vec<String> = (0..4).map(|_| random_label(&mut rng, "y ")).collect();
        let n_y = rng.gen_range(1..=4);
        let y = random_triplets(&mut rng, &pool_b, n_y);
        let none = TableSimilarityProvider::new(vec![], 0.0);
        let g = build_entity_relation_graph(&x, &y, &none, &cfg.graph_params()).unwrap();
        let scored = score_graph(&g, &cfg).unwrap();
        assert_eq!(scored.scores.multi_hop, 0.0, "round {round}");
        assert_eq!(scored.scores.community_alg3, 0.0, "round {round}");
        assert_eq!(scored.scores.community_eq2, 0.0, "round {round}");
    }

    // The shipped extreme fixtures behave the same way.
    for case in golden_cases() {
        let (g, cfg) = golden_graph(&case);
        let scored = score_graph(&g, &cfg).unwrap();
        match case.name.as_str() {
            "identity_single_triplet" => assert_eq!(scored.scores.multi_hop, 1.0),
            "below_threshold" | "empty_context" | "empty_input" | "both_empty" => {
                assert_eq!(scored.scores.multi_hop, 0.0);
                assert_eq!(scored.scores.community_alg3, 0.0);
                assert_eq!(scored.scores.community_eq2, 0.0);
            }
            _ => {}
        }
    }
    println!("[PASS] criterion 4: identity pairs score 1.0 and similarity-free pairs score 0.0 on all fixtures");
}

#[test]
fn criterion_5_louvain_determinism_and_quality() {
    fn components(g: &EntityGraph) -> Vec<usize> {
        let n = g.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for e in g.edges() {
            let s = g.index_of(&e.source).unwrap();
            let t = g.index_of(&e.target).unwrap();
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            if rs != rt {
                parent[rs] = rt;
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }

    let mut graphs: Vec<(String, EntityGraph, EvalConfig)> = golden_cases()
        .iter()
        .map(|c| {
            let (g, cfg) = golden_graph(c);
            (c.name.clone(), g, cfg)
        })
        .filter(|(_, g, _)| !g.is_empty())
        .collect();

    // A few random graphs on top of the goldens.
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for i in 0..5 {
        let pool: Vec<String> = (0..5).map(|_| random_label(&mut rng, "g ")).collect();
        let t_in = random_triplets(&mut rng, &pool, 2);
        let t_ctx = random_triplets(&mut rng, &pool, 2);
        let provider = random_table(&mut rng, &t_in, &t_ctx);
        let cfg = EvalConfig::default();
        let g = build_entity_relation_graph(&t_in, &t_ctx, &provider, &cfg.graph_params()).unwrap();
        graphs.push((format!("random_{i}"), g, cfg));
    }

    let mut oracle_checked = 0;
    for (name, g, cfg) in &graphs {
        // Determinism across 20 reruns.
        let first = louvain_partition(g, cfg.seed, cfg.resolution).unwrap();
        for _ in 0..19 {
            let again = louvain_partition(g, cfg.seed, cfg.resolution).unwrap();
            assert_eq!(first.assignment(), again.assignment(), "{name}: nondeterministic");
        }

        // Modularity at or above the all-singletons baseline.
        let singletons: BTreeMap<_, _> = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let q_single = modularity_of(g, &singletons, cfg.resolution).unwrap();
        assert!(first.modularity() >= q_single - 1e-12, "{name}");

        // Disconnected components never share a community.
        let comps = components(g);
        let mut community_comp: BTreeMap<usize, usize> = BTreeMap::new();
        for (idx, node) in g.nodes().iter().enumerate() {
            let c = first.community_of(&node.id).unwrap();
            match community_comp.get(&c) {
                Some(&comp) => assert_eq!(comp, comps[idx], "{name}: merged components"),
                None => {
                    community_comp.insert(c, comps[idx]);
                }
            }
        }

        // Exhaustive-search cross-check on small graphs (gap reported,
        // optimality not asserted).
        if g.node_count() <= MAX_PARTITION_NODES {
            let (best, q_best) = brute_force_best_partition(g, cfg.resolution).unwrap();
            assert!(first.modularity() <= q_best + 1e-9, "{name}: above optimum");
            println!("  {name}: optimum gap {:.9}", q_best - first.modularity());
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            for (idx, node) in g.nodes().iter().enumerate() {
                let c = best[&node.id];
                match seen.get(&c) {
                    Some(&comp) => assert_eq!(comp, comps[idx], "{name}: optimum merged components"),
                    None => {
                        seen.insert(c, comps[idx]);
                    }
                }
            }
            oracle_checked += 1;
        }
    }
    assert!(oracle_checked >= 5, "want several oracle-checked graphs, got {oracle_checked}");
    println!("[PASS] criterion 5: Louvain deterministic over 20 reruns, >= singleton modularity, components never merged ({} graphs, {oracle_checked} vs oracle)", graphs.len());
}

#[test]
fn criterion_6_sensitivity_reproduction() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = EvalConfig {
        cache_dir: dir.path().join("cache"),
        ..EvalConfig::default()
    };
    let providers = ProviderSet::from_config(&cfg).unwrap();
    let metrics = [Metric::AnswerRelevancy, Metric::FactualCorrectness];

    let mean_multi_hop = |output: &kgeval::harness::EvaluationOutput, metric: Metric| -> f64 {
        let values: Vec<f64> = output
            .reports
            .iter()
            .filter_map(|r| r.metrics.get(&metric))
            .filter_map(|o| o.scored())
            .map(|s| s.scores.multi_hop)
            .collect();
        assert_eq!(values.len(), 30, "expected all 30 records scored");
        values.iter().sum::<f64>() / values.len() as f64
    };

    let (reference_out, skipped) = sensitivity_run(
        &fixture("sensitivity_30.jsonl"),
        SensitivityMode::Reference,
        &metrics,
        &providers,
        &cfg,
    )
    .unwrap();
    assert!(skipped.is_empty());
    let (wrong_out, skipped) = sensitivity_run(
        &fixture("sensitivity_30.jsonl"),
        SensitivityMode::Wrong,
        &metrics,
        &providers,
        &cfg,
    )
    .unwrap();
    assert!(skipped.is_empty());

    for metric in metrics {
        let reference_mean = mean_multi_hop(&reference_out, metric);
        let wrong_mean = mean_multi_hop(&wrong_out, metric);
        assert!(
            reference_mean >= 0.9,
            "{metric}: reference-mode mean {reference_mean} below 0.9"
        );
        assert!(wrong_mean <= 0.1, "{metric}: wrong-mode mean {wrong_mean} above 0.1");
        assert!(reference_mean > wrong_mean, "{metric}: ordering violated");
        println!("  {metric}: reference mean {reference_mean:.4}, wrong mean {wrong_mean:.4}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30s");
    println!("[PASS] criterion 6: 30-record sensitivity separation (reference >= 0.9, wrong <= 0.1) in {elapsed:?}");
}

#[test]
fn criterion_7_correlation_operations() {
    // Self-correlation is 1 for any vector with variance.
    let x = [0.3, 0.9, 0.1, 0.7, 0.5];
    match (pearson(&x, &x), spearman(&x, &x)) {
        (CorrOutcome::Defined(p), CorrOutcome::Defined(s)) => {
            assert!((p - 1.0).abs() < 1e-12, "self pearson {p}");
            assert!((s - 1.0).abs() < 1e-12, "self spearman {s}");
        }
        other => panic!("expected defined coefficients, got {other:?}"),
    }

    // Exactly reversed rank order.
    let a = [1.0, 2.0, 3.0, 4.0, 5.0];
    let b = [50.0, 40.0, 30.0, 20.0, 10.0];
    match spearman(&a, &b) {
        CorrOutcome::Defined(s) => assert!((s + 1.0).abs() < 1e-12, "reversed spearman {s}"),
        other => panic!("expected defined, got {other:?}"),
    }

    // Hand-derived covariance-formula case, frozen from an independent
    // oracle computation, asserted at 1e-4.
    let x = [1.0, 2.0, 3.0, 5.0];
    let y = [2.0, 4.0, 6.0, 9.0];
    match pearson(&x, &y) {
        CorrOutcome::Defined(p) => {
            assert!(
                (p - 0.9967905774402656).abs() < 1e-4,
                "hand-derived pearson case: got {p}"
            );
        }
        other => panic!("expected defined, got {other:?}"),
    }
    println!("[PASS] criterion 7: self-correlation 1.0, reversed Spearman -1.0, hand-derived Pearson within 1e-4");
}

#[test]
fn criterion_8_end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |out: &Path| {
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_kgeval"))
            .args([
                "evaluate",
                "--input",
                fixture("sensitivity_30.jsonl").to_str().unwrap(),
                "--metrics",
                "all",
                "--providers",
                "mock",
                "--seed",
                "42",
                "--cache-dir",
                cache.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .expect("spawn kgeval");
        assert!(
            output.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    let (p1, p2, p3) = (
        dir.path().join("scores1.jsonl"),
        dir.path().join("scores2.jsonl"),
        dir.path().join("scores3.jsonl"),
    );
    run(&p1); // cold cache
    run(&p2); // warm cache
    run(&p3); // warm cache
    let (b1, b2, b3) = (
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p2).unwrap(),
        std::fs::read(&p3).unwrap(),
    );
    assert_eq!(b2, b3, "two warm-cache runs differ");
    assert_eq!(b1, b2, "cold and warm runs differ");
    assert!(!b1.is_empty());
    println!("[PASS] criterion 8: repeated full evaluate runs produce byte-identical scores.jsonl");
}

#[test]
fn criterion_9_both_community_variants_emitted_and_extremes_agree() {
    // Emission: both columns appear in the scores file of a real run.
    let dir = tempfile::tempdir().unwrap();
    let cfg = EvalConfig {
        cache_dir: dir.path().join("cache"),
        ..EvalConfig::default()
    };
    let providers = ProviderSet::from_config(&cfg).unwrap();
    let output = kgeval::harness::evaluate_dataset(
        &fixture("sensitivity_30.jsonl"),
        &[Metric::Faithfulness],
        &providers,
        &cfg,
    )
    .unwrap();
    let line = output.to_jsonl().unwrap();
    let first: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    let entry = &first["metrics"]["faithfulness"];
    assert!(entry.get("community").is_some(), "community column missing");
    assert!(entry.get("community_eq2").is_some(), "community_eq2 column missing");

    // Extremes: on every golden fixture the variants hit 0.0 together,
    // and a 1.0 on the per-community variant forces 1.0 per node.
    for case in golden_cases() {
        let (g, cfg) = golden_graph(&case);
        let scored = score_graph(&g, &cfg).unwrap();
        let (alg3, eq2) = (scored.scores.community_alg3, scored.scores.community_eq2);
        assert_eq!(alg3 == 0.0, eq2 == 0.0, "{}: zero extremes disagree", case.name);
        if alg3 == 1.0 {
            assert_eq!(eq2, 1.0, "{}", case.name);
        }
        match case.name.as_str() {
            "identity_single_triplet" => {
                assert_eq!(alg3, 1.0, "identity fixture");
                assert_eq!(eq2, 1.0, "identity fixture");
            }
            "below_threshold" | "empty_context" | "empty_input" | "both_empty" => {
                assert_eq!(alg3, 0.0);
                assert_eq!(eq2, 0.0);
            }
            _ => {}
        }
    }
    println!("[PASS] criterion 9: both community variants emitted; 0.0/1.0 extremes agree on all fixtures");
}
