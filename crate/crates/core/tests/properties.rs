//! Cross-module invariants checked against independent oracles: brute-force
//! coupling enumeration, Floyd-Warshall, explicit pseudoinverses, and
//! closed-form identities on random graphs.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riccimesh_core::curvature::{
    edge_orc, full_report, node_orc, random_walk_measure, wasserstein1, LocalMeasure,
};
use riccimesh_core::diagnostics::{effective_resistance, total_effective_resistance};
use riccimesh_core::graph::MeshGraph;
use riccimesh_core::rewiring::{
    borf, digl, fosr, piorf, sdrf, Action, RewireConfig,
};
use riccimesh_testkit as oracle;

fn hop_metric(g: &MeshGraph) -> impl Fn(usize, usize) -> Option<f64> + '_ {
    let all = oracle::floyd_warshall(g);
    move |p, q| all[p][q].map(|d| d as f64)
}

// ---------------------------------------------------------------------------
// graph-core
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn bfs_matches_floyd_warshall(
        n in 2usize..=12,
        raw_edges in proptest::collection::vec((0usize..12, 0usize..12), 0..30),
        source in 0usize..12,
        radius in 0usize..14,
    ) {
        let edges: Vec<(usize, usize)> = raw_edges
            .into_iter()
            .filter(|&(u, v)| u < n && v < n && u != v)
            .collect();
        let g = MeshGraph::with_topology(n, &edges).unwrap();
        let source = source % n;
        let bfs = g.bounded_bfs_distances(source, radius).unwrap();
        let fw = oracle::floyd_warshall(&g);
        for v in 0..n {
            match fw[source][v] {
                Some(d) if d <= radius => prop_assert_eq!(bfs.get(&v), Some(&d)),
                _ => prop_assert!(!bfs.contains_key(&v)),
            }
        }
    }

    #[test]
    fn edges_are_canonical_and_add_is_monotone(
        n in 2usize..=10,
        raw_edges in proptest::collection::vec((0usize..10, 0usize..10), 0..25),
        extra in proptest::collection::vec((0usize..10, 0usize..10), 0..8),
    ) {
        let edges: Vec<(usize, usize)> = raw_edges
            .into_iter()
            .filter(|&(u, v)| u < n && v < n)
            .collect();
        let g = MeshGraph::with_topology(n, &edges).unwrap();
        prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.edges().iter().all(|&(u, v)| u < v && v < n));

        let extra: Vec<(usize, usize)> = extra
            .into_iter()
            .filter(|&(u, v)| u < n && v < n)
            .collect();
        let bigger = g.add_edges(&extra).unwrap();
        for e in g.edges() {
            prop_assert!(bigger.edges().contains(e));
        }
        // idempotence
        let again = bigger.add_edges(&extra).unwrap();
        prop_assert_eq!(again.edges(), bigger.edges());
    }
}

// ---------------------------------------------------------------------------
// transport / curvature
// ---------------------------------------------------------------------------

#[test]
fn w1_matches_vertex_enumeration_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5718);
    for trial in 0..300 {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=4);
        let supply = oracle::random_rational_masses(&mut rng, m);
        let demand = oracle::random_rational_masses(&mut rng, n);
        let cost: Vec<f64> = (0..m * n)
            .map(|_| rng.random_range(0..40) as f64 / 8.0)
            .collect();
        let mu = LocalMeasure::new((0..m).collect(), supply.clone()).unwrap();
        let nu = LocalMeasure::new((100..100 + n).collect(), demand.clone()).unwrap();
        let exact = wasserstein1(&mu, &nu, |p, q| Some(cost[p * n + (q - 100)])).unwrap();
        let brute = oracle::w1_vertex_enumeration(&supply, &demand, &cost);
        assert!(
            (exact - brute).abs() < 1e-9,
            "trial {trial}: simplex {exact} vs enumeration {brute}"
        );
    }
}

#[test]
fn w1_is_a_metric_on_shared_supports() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..120 {
        let g = oracle::random_connected_graph(trial, 8, 4);
        let metric = hop_metric(&g);
        let mut measures = Vec::new();
        for _ in 0..3 {
            let size = rng.random_range(1..=4usize);
            let mut support: Vec<usize> = Vec::new();
            while support.len() < size {
                let v = rng.random_range(0..8);
                if !support.contains(&v) {
                    support.push(v);
                }
            }
            let mass = oracle::random_rational_masses(&mut rng, size);
            measures.push(LocalMeasure::new(support, mass).unwrap());
        }
        let d = |a: &LocalMeasure, b: &LocalMeasure| wasserstein1(a, b, &metric).unwrap();
        let (a, b, c) = (&measures[0], &measures[1], &measures[2]);
        assert!(d(a, a).abs() < 1e-9);
        assert!((d(a, b) - d(b, a)).abs() < 1e-9);
        assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-9, "triangle inequality");
        assert!(d(a, b) >= -1e-12);
    }
}

#[test]
fn unweighted_curvature_stays_in_bounds() {
    // 1,000 random connected graphs with up to 30 nodes
    for seed in 0..1_000u64 {
        let n = 2 + (seed as usize * 7) % 29;
        let extra = (seed as usize * 13) % (n + 3);
        let g = oracle::random_connected_graph(seed, n, extra);
        let report = full_report(&g, false).unwrap();
        for (k, &kappa) in report.kappa().iter().enumerate() {
            assert!(
                (-2.0 - 1e-12..=1.0 + 1e-12).contains(&kappa),
                "seed {seed}, edge {:?}: kappa {kappa}",
                report.edges()[k]
            );
        }
    }
}

#[test]
fn node_curvature_is_the_incident_mean() {
    for seed in 0..50u64 {
        let g = oracle::random_connected_graph(seed, 12, 6);
        let report = full_report(&g, false).unwrap();
        for i in 0..g.node_count() {
            let direct = node_orc(&g, i, false).unwrap();
            let mean_of_edges: f64 = g
                .neighbors(i)
                .iter()
                .map(|&j| edge_orc(&g, (i, j), false).unwrap())
                .sum::<f64>()
                / g.degree(i) as f64;
            assert!((direct - mean_of_edges).abs() <= 1e-12);
            assert!((report.gamma_of(i).unwrap() - direct).abs() <= 1e-12);
        }
    }
}

#[test]
fn edge_orc_symmetry_exact() {
    for seed in 0..40u64 {
        let g = oracle::random_connected_graph(seed, 10, 5);
        for &(u, v) in g.edges() {
            assert_eq!(
                edge_orc(&g, (u, v), false).unwrap(),
                edge_orc(&g, (v, u), false).unwrap()
            );
        }
    }
}

#[test]
fn walk_measures_are_valid_probabilities() {
    for seed in 0..40u64 {
        let g = oracle::random_connected_graph(seed, 15, 6);
        for i in 0..g.node_count() {
            let m = random_walk_measure(&g, i).unwrap();
            let total: f64 = m.mass().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(!m.support().contains(&i), "walk is non-lazy");
        }
    }
}

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

#[test]
fn rayleigh_monotonicity_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    let mut seed = 0u64;
    while tested < 100 {
        seed += 1;
        let n = rng.random_range(4..=40usize);
        let extra = rng.random_range(0..n);
        let g = oracle::random_connected_graph(seed, n, extra);
        let non_edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        if non_edges.is_empty() {
            continue;
        }
        let pick = non_edges[rng.random_range(0..non_edges.len())];
        let before = total_effective_resistance(&g).unwrap();
        let after = total_effective_resistance(&g.add_edges(&[pick]).unwrap()).unwrap();
        assert!(
            after <= before + 1e-9,
            "seed {seed}: adding {pick:?} raised total resistance {before} -> {after}"
        );
        tested += 1;
    }
}

#[test]
fn effective_resistance_is_a_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for seed in 0..60u64 {
        let n = rng.random_range(3..=20usize);
        let g = oracle::random_connected_graph(seed, n, rng.random_range(0..n));
        let triple: Vec<usize> = (0..3).map(|_| rng.random_range(0..n)).collect();
        let (a, b, c) = (triple[0], triple[1], triple[2]);
        let r = |x, y| effective_resistance(&g, x, y).unwrap();
        assert!(r(a, b) >= -1e-12);
        assert!((r(a, b) - r(b, a)).abs() < 1e-9);
        assert!(r(a, c) <= r(a, b) + r(b, c) + 1e-9);
    }
}

#[test]
fn tree_resistance_equals_hop_distance() {
    for seed in 0..30u64 {
        let n = 2 + (seed as usize * 11) % 49;
        let g = oracle::random_tree(seed, n);
        let fw = oracle::floyd_warshall(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        for _ in 0..10 {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            let r = effective_resistance(&g, u, v).unwrap();
            let hops = fw[u][v].unwrap() as f64;
            assert!(
                (r - hops).abs() < 1e-8,
                "seed {seed}: tree resistance {r} vs hops {hops}"
            );
        }
    }
}

#[test]
fn trace_identity_matches_pairwise_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..25u64 {
        let n = rng.random_range(3..=60usize);
        let g = oracle::random_connected_graph(seed, n, rng.random_range(0..n));
        let total = total_effective_resistance(&g).unwrap();
        // pairwise sum over the explicit pseudoinverse
        let r = oracle::resistance_oracle(&g);
        let mut pairwise = 0.0;
        for u in 0..n {
            for v in u + 1..n {
                pairwise += r[(u, v)];
            }
        }
        let rel = (total - pairwise).abs() / pairwise.max(1e-30);
        assert!(rel < 1e-6, "seed {seed}: trace route {total} vs pairwise {pairwise}");
        // the per-pair production path agrees with the oracle matrix
        for _ in 0..15 {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            let direct = effective_resistance(&g, u, v).unwrap();
            assert!((direct - r[(u, v)]).abs() < 1e-8);
        }
    }
}

// ---------------------------------------------------------------------------
// rewiring
// ---------------------------------------------------------------------------

#[test]
fn additive_methods_preserve_mesh_edges() {
    for seed in 0..15u64 {
        let g = oracle::random_connected_graph(seed, 14, 6);
        let mut results = vec![
            piorf(&g, &RewireConfig::piorf(0.2)).unwrap(),
            digl(&g, 0.1, 0.05).unwrap(),
            sdrf(&g, 3).unwrap(),
            fosr(&g, 5, 3).unwrap(),
        ];
        results.push(borf(&g, 2, 2, 0, None).unwrap());
        for r in &results {
            for e in g.edges() {
                assert!(
                    r.graph.edges().contains(e),
                    "seed {seed}: mesh edge {e:?} lost"
                );
            }
        }
    }
}

#[test]
fn piorf_addition_budget_is_respected() {
    for seed in 0..20u64 {
        let n = 6 + (seed as usize) % 30;
        let g = oracle::random_connected_graph(seed, n, seed as usize % 9);
        for delta in [0.1, 0.25, 0.5] {
            let budget = (delta * n as f64).floor() as usize;
            if budget == 0 {
                continue;
            }
            let r = piorf(&g, &RewireConfig::piorf(delta)).unwrap();
            assert!(
                r.added.len() <= budget,
                "seed {seed}, delta {delta}: {} added, budget {budget}",
                r.added.len()
            );
            assert_eq!(r.stats.curvature_passes, 1);
        }
    }
}

#[test]
fn piorf_edit_algebra_holds_for_all_actions() {
    for seed in 0..12u64 {
        let g = oracle::random_connected_graph(seed, 16, 10);
        for action in [Action::Add, Action::Remove, Action::Both] {
            let mut cfg = RewireConfig::piorf(0.2);
            cfg.action = action;
            let r = piorf(&g, &cfg).unwrap();
            let mut expected: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .copied()
                .filter(|e| !r.removed.contains(e))
                .collect();
            for &(s, t, _) in &r.added {
                let key = (s.min(t), s.max(t));
                if !expected.contains(&key) {
                    expected.push(key);
                }
            }
            expected.sort_unstable();
            assert_eq!(r.graph.edges(), expected.as_slice());
        }
    }
}
