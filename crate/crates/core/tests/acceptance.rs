//! Acceptance gate. Each test covers one numbered criterion end to end and
//! prints a `criterion N: PASS` line (visible with `--nocapture`).

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qmbs::bigraph::{BipartiteGraph, Objective, SizeTarget, VertexSubset};
use qmbs::circuit::QubitLayout;
use qmbs::grover::{search_max, success_probability, SearchOptions};
use qmbs::oracle::{build_plan, build_plan_with_fallback, build_ubic};
use qmbs::sim::{oracle_flip_table, run_basis_tracked, run_dense, sample, Engine};

const OBJECTIVES: [Objective; 3] = [Objective::Edges, Objective::Vertices, Objective::Balanced];

/// The worked 2x2 example graph: edges (1,1), (2,1), (2,2).
fn demo() -> BipartiteGraph {
    BipartiteGraph::new(2, 2, [(1, 1), (2, 1), (2, 2)]).unwrap()
}

/// Benchmark dataset shapes, (vertices, edges).
const TABLE_SHAPES: [(u32, u32); 10] =
    [(6, 3), (6, 6), (7, 6), (7, 11), (8, 5), (8, 14), (9, 4), (9, 18), (10, 7), (10, 23)];

/// Seeded instance of dataset shape `idx`, split `ceil(n/2)` by
/// `floor(n/2)`.
fn dataset(idx: usize) -> BipartiteGraph {
    let (n, m) = TABLE_SHAPES[idx];
    let left = n.div_ceil(2);
    BipartiteGraph::synthetic(left, n - left, m as usize, 1000 + idx as u64).unwrap()
}

/// Every size target the layout can express for the objective.
fn all_targets(g: &BipartiteGraph, objective: Objective) -> Vec<SizeTarget> {
    let flags = QubitLayout::new(g, objective).flag_count();
    (1..=flags)
        .flat_map(|k| [SizeTarget::Exact(k), SizeTarget::AtLeast(k)])
        .collect()
}

#[test]
fn criterion_1_oracle_exhaustive_correctness() {
    let start = Instant::now();
    let mut graphs = vec![demo()];
    let shapes: Vec<(u32, u32)> = (1..=5)
        .flat_map(|l| (1..=5).map(move |r| (l, r)))
        .filter(|(l, r)| l + r <= 6)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for i in 0..50 {
        let (l, r) = shapes[i % shapes.len()];
        let m = rng.gen_range(0..=(l * r) as usize);
        graphs.push(BipartiteGraph::synthetic(l, r, m, 10_000 + i as u64).unwrap());
    }

    let mut plans = 0u32;
    for g in &graphs {
        let n = g.vertex_count();
        assert!(n <= 6);
        for objective in OBJECTIVES {
            for target in all_targets(g, objective) {
                let solutions = g.count_bicliques(objective, target);
                let plan =
                    build_plan_with_fallback(g, objective, target, solutions, 1).unwrap();
                // The replay errors out unless every scratch wire returns
                // to 0 and the vertex register is untouched.
                let table = oracle_flip_table(&plan)
                    .expect("oracle must restore aux wires on every basis state");
                for label in 0..1u32 << n {
                    let c = VertexSubset::from_bits(label, n);
                    assert_eq!(
                        table[label as usize],
                        g.satisfies(c, objective, target),
                        "graph {}x{} m={} {objective} {target} label {label:0n$b}",
                        g.left_count(),
                        g.right_count(),
                        g.edge_count(),
                        n = n as usize,
                    );
                }
                plans += 1;
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 1: PASS — {plans} oracle plans over {} graphs match the classical \
         predicate on every basis state with aux wires restored ({elapsed:?})",
        graphs.len(),
    );
}

#[test]
fn criterion_2_engine_equivalence() {
    // Every graph on the shapes whose plans stay within 20 wires, with
    // every edge subset.
    let mut graphs = Vec::new();
    for (l, r) in [(1u32, 1u32), (1, 2), (2, 1)] {
        let pairs: Vec<(u32, u32)> =
            (1..=l).flat_map(|i| (1..=r).map(move |j| (i, j))).collect();
        for mask in 0..1u32 << pairs.len() {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            graphs.push(BipartiteGraph::new(l, r, edges).unwrap());
        }
    }

    let mut cases = Vec::new();
    for g in &graphs {
        for objective in OBJECTIVES {
            for target in all_targets(g, objective) {
                for iterations in 0..3usize {
                    cases.push((g.clone(), objective, target, iterations));
                }
            }
        }
    }

    let worst = cases
        .par_iter()
        .map(|(g, objective, target, iterations)| {
            let solutions = g.count_bicliques(*objective, *target);
            let mut plan =
                build_plan_with_fallback(g, *objective, *target, solutions, *iterations)
                    .unwrap();
            plan.iterations = *iterations;
            assert!(plan.total_qubits() <= 20, "case outside the stated universe");
            let dense = run_dense(&plan).unwrap();
            let tracked = run_basis_tracked(&plan).unwrap();
            assert_eq!(dense.snapshots.len(), tracked.snapshots.len());
            dense
                .snapshots
                .iter()
                .zip(&tracked.snapshots)
                .map(|(d, t)| d.max_abs_diff(t))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    assert!(worst <= 1e-10, "largest engine disagreement {worst}");
    println!(
        "criterion 2: PASS — dense and basis-tracked distributions agree to 1e-10 \
         across {} plans (worst gap {worst:.2e})",
        cases.len(),
    );
}

#[test]
fn criterion_3_demo_distribution_reproduction() {
    let g = demo();

    // One round at k=1 concentrates the three single-edge bicliques. The
    // authoritative expectation is the closed form sin^2((2T+1) asin
    // sqrt(M/N)), which is exactly 243/256 here.
    let m1 = g.count_bicliques(Objective::Edges, SizeTarget::Exact(1));
    assert_eq!(m1, 3);
    let plan = build_plan(&g, Objective::Edges, SizeTarget::Exact(1), m1).unwrap();
    assert_eq!(plan.iterations, 1);
    let run = run_basis_tracked(&plan).unwrap();
    let p1 = run.final_distribution().mass_on(&[0b1010, 0b0101, 0b0110]);
    assert!((p1 - 243.0 / 256.0).abs() < 1e-6);
    assert!((p1 - success_probability(16, 3, 1)).abs() < 1e-12);

    // Two rounds at k=2: 25/32 after the first, 121/128 after the second.
    let m2 = g.count_bicliques(Objective::Edges, SizeTarget::Exact(2));
    assert_eq!(m2, 2);
    let plan = build_plan(&g, Objective::Edges, SizeTarget::Exact(2), m2).unwrap();
    assert_eq!(plan.iterations, 2);
    let run2 = run_basis_tracked(&plan).unwrap();
    let pair = [0b0111, 0b1110];
    let p2a = run2.snapshots[1].mass_on(&pair);
    let p2b = run2.snapshots[2].mass_on(&pair);
    assert!((p2a - 25.0 / 32.0).abs() < 1e-6);
    assert!((p2b - 121.0 / 128.0).abs() < 1e-6);
    assert!((p2a - success_probability(16, 2, 1)).abs() < 1e-12);
    assert!((p2b - success_probability(16, 2, 2)).abs() < 1e-12);

    // k=3 has no solutions; two fallback rounds leave the distribution
    // exactly uniform.
    let plan = build_plan_with_fallback(&g, Objective::Edges, SizeTarget::Exact(3), 0, 2).unwrap();
    let run3 = run_basis_tracked(&plan).unwrap();
    assert_eq!(run3.iterations(), 2);
    for label in 0..16 {
        assert!((run3.final_distribution().prob(label) - 1.0 / 16.0).abs() < 1e-9);
    }

    // Consistency check, not a target: published empirical error rates for
    // these settings (4.87%, 21.59%, 5.53% at 20000 shots) sit inside the
    // 3-sigma sampling band of the exact failure probabilities.
    let published: [(f64, f64); 3] =
        [(13.0 / 256.0, 0.0487), (7.0 / 32.0, 0.2159), (7.0 / 128.0, 0.0553)];
    for (exact, empirical) in published {
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
        let gap = (empirical - exact) / sigma;
        assert!(gap.abs() <= 3.0, "empirical {empirical} vs exact {exact}: {gap:.2} sigma");
    }

    println!(
        "criterion 3: PASS — demo distributions hit the closed-form values \
         243/256, 25/32, 121/128 (to 1e-6) and stay uniform without solutions; \
         published empirical rates lie within 3 sigma",
    );
}

#[test]
fn criterion_4_sampled_error_rates() {
    let g = demo();
    let m1 = g.count_bicliques(Objective::Edges, SizeTarget::Exact(1));
    let plan1 = build_plan(&g, Objective::Edges, SizeTarget::Exact(1), m1).unwrap();
    let run1 = run_basis_tracked(&plan1).unwrap();
    let m2 = g.count_bicliques(Objective::Edges, SizeTarget::Exact(2));
    let plan2 = build_plan(&g, Objective::Edges, SizeTarget::Exact(2), m2).unwrap();
    let run2 = run_basis_tracked(&plan2).unwrap();

    let singles: &[u32] = &[0b1010, 0b0101, 0b0110];
    let pair: &[u32] = &[0b0111, 0b1110];
    let settings: [(&str, &qmbs::sim::VertexDistribution, &[u32], f64); 3] = [
        ("k=1 after one round", &run1.snapshots[1], singles, 13.0 / 256.0),
        ("k=2 after one round", &run2.snapshots[1], pair, 7.0 / 32.0),
        ("k=2 after two rounds", &run2.snapshots[2], pair, 7.0 / 128.0),
    ];

    for (name, dist, labels, exact_failure) in settings {
        let mut within = 0;
        for seed in 0..10u64 {
            let hist = sample(dist, 20_000, seed);
            let hits: u64 = labels.iter().map(|&l| hist.counts[l as usize]).sum();
            let failure = 1.0 - hits as f64 / 20_000.0;
            if (failure - exact_failure).abs() <= 0.01 {
                within += 1;
            }
        }
        assert!(within >= 9, "{name}: only {within}/10 seeds within one percentage point");
    }
    println!(
        "criterion 4: PASS — sampled error rates at 20000 shots stay within \
         1 percentage point of the exact rates in at least 9 of 10 seeds for \
         all three settings",
    );
}

#[test]
fn criterion_5_end_to_end_optimality() {
    let start = Instant::now();
    let mut runs = 0u32;
    for (idx, &shape) in TABLE_SHAPES.iter().enumerate() {
        let g = dataset(idx);
        let (_, best) = g.brute_force_max(Objective::Edges).unwrap();
        for seed in 0..10u64 {
            let opts = SearchOptions {
                engine: Engine::Tracked,
                seed,
                repeats: 3,
                fallback_iterations: 0,
            };
            let r = search_max(&g, Objective::Edges, &opts).unwrap();
            assert_eq!(
                r.size, best,
                "dataset {shape:?} seed {seed}: got {} expected {best}",
                r.size,
            );
            if let Some(c) = r.subset {
                assert_eq!(g.biclique_size(c, Objective::Edges), Some(r.size));
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(runs, 100);
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 5: PASS — maximum edge search matched brute force on 100/100 \
         seeded runs over 10 datasets ({elapsed:?})",
    );
}

#[test]
fn criterion_6_variant_correctness() {
    let mut vertex_runs = 0u32;
    let mut balanced_runs = 0u32;
    for (idx, &shape) in TABLE_SHAPES.iter().enumerate() {
        let g = dataset(idx);
        let (_, best_v) = g.brute_force_max(Objective::Vertices).unwrap();
        let (_, best_b) = g.brute_force_max(Objective::Balanced).unwrap();
        for seed in 0..20u64 {
            let opts = SearchOptions {
                engine: Engine::Tracked,
                seed,
                repeats: 3,
                fallback_iterations: 0,
            };
            let rv = search_max(&g, Objective::Vertices, &opts).unwrap();
            assert_eq!(rv.size, best_v, "vertices, dataset {shape:?} seed {seed}");
            vertex_runs += 1;

            let rb = search_max(&g, Objective::Balanced, &opts).unwrap();
            assert_eq!(rb.size, best_b, "balanced, dataset {shape:?} seed {seed}");
            if let Some(c) = rb.subset {
                let (l, r) = g.side_sizes(c);
                assert_eq!(l, r, "balanced witness must have equal sides");
                assert_eq!(l + r, rb.size);
            }
            balanced_runs += 1;
        }
    }
    assert_eq!((vertex_runs, balanced_runs), (200, 200));
    println!(
        "criterion 6: PASS — vertex and balanced searches matched brute force on \
         200 runs each, and every balanced witness has equal sides",
    );
}

#[test]
fn criterion_7_count_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for case in 0..20 {
        let l = rng.gen_range(1..=5u32);
        let r = rng.gen_range(1..=5u32);
        let m = rng.gen_range(0..=(l * r) as usize);
        let g = BipartiteGraph::synthetic(l, r, m, 500 + case as u64).unwrap();
        let n = l + r;
        let pairs = l * r;

        let layout = QubitLayout::new(&g, Objective::Edges);
        let ubic = build_ubic(&g, &layout);
        assert_eq!(ubic.len() as u32, m as u32 + 2 * pairs + 1, "{l}x{r} m={m}");

        for objective in OBJECTIVES {
            let layout = QubitLayout::new(&g, objective);
            let flags = match objective {
                Objective::Edges => pairs,
                _ => n,
            };
            let expected =
                n + 2 * pairs + 1 + l * (l + 3) / 2 + r * (r + 3) / 2 + flags + 1;
            assert_eq!(layout.total_qubits() as u32, expected, "{l}x{r} {objective}");
        }
    }
    println!(
        "criterion 7: PASS — biclique-check gate counts equal m + 2|L||R| + 1 and \
         layout widths equal the summation formula on 20 random shapes",
    );
}

#[test]
fn criterion_8_error_bound_on_probes() {
    let mut checked = 0u32;
    for (idx, &shape) in TABLE_SHAPES.iter().enumerate() {
        let g = dataset(idx);
        let space = 1u64 << g.vertex_count();
        // Probe metadata is seed-independent because feasibility comes from
        // exact counts; confirm on two seeds from the criterion-5 set.
        let trace = |seed: u64| -> Vec<(SizeTarget, u64, usize)> {
            let opts = SearchOptions {
                engine: Engine::Tracked,
                seed,
                repeats: 3,
                fallback_iterations: 0,
            };
            search_max(&g, Objective::Edges, &opts)
                .unwrap()
                .probes
                .iter()
                .map(|p| (p.target, p.solutions, p.iterations))
                .collect()
        };
        let probes = trace(0);
        assert_eq!(probes, trace(9), "probe schedule must not depend on the seed");

        for (target, solutions, iterations) in probes {
            if solutions >= 1 && iterations >= 1 {
                let failure = 1.0 - success_probability(space, solutions, iterations);
                let t = iterations as f64;
                let bound = std::f64::consts::PI.powi(2) / (4.0 * t).powi(2);
                assert!(
                    failure <= bound + 1e-12,
                    "dataset {shape:?} probe {target}: failure {failure} > bound {bound}",
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    println!(
        "criterion 8: PASS — {checked} feasible probes with T >= 1 all satisfy the \
         pi^2/(4T)^2 failure bound",
    );
}

/// Cross-validates the full 28-wire demo plan on the dense engine. Needs
/// about 4.3 GiB for the statevector and several minutes of single-thread
/// gate sweeps, so it is opt-in.
#[test]
#[ignore = "needs ~4.3 GiB and several minutes; run with --ignored"]
fn dense_engine_matches_tracked_on_the_full_demo_plan() {
    use qmbs::sim::run_dense_with_cap;
    let g = demo();
    let m = g.count_bicliques(Objective::Edges, SizeTarget::Exact(1));
    let plan = build_plan(&g, Objective::Edges, SizeTarget::Exact(1), m).unwrap();
    assert_eq!(plan.total_qubits(), 28);
    let dense = run_dense_with_cap(&plan, 28).unwrap();
    let tracked = run_basis_tracked(&plan).unwrap();
    for (d, t) in dense.snapshots.iter().zip(&tracked.snapshots) {
        assert!(d.max_abs_diff(t) <= 1e-10);
    }
}
