mod common;

use std::collections::BTreeMap;

use graph_measures::analysis::{
    fractional_ranks, gaussian_filter_winner, lda_importance, leaderboard, leadership_map,
    DataPoint, FilterConfig, LabelSet, Subset,
};
use graph_measures::bench::{evaluate_with, BenchConfig, EvalRecord, Features, GRID_POINTS};
use graph_measures::clustering::{
    cluster_best_trial, kernel_kmeans_single, ClusterInit, Criterion, InitStrategy,
    DEFAULT_MAX_ITER,
};
use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::lfr::{generate_lfr, sample_lfr_config, tau_from_tilde, tilde_tau};
use graph_measures::measures::{build_measure, BuildOptions, Family, MeasureId};
use graph_measures::scoring::{ari, modularity};
use proptest::prelude::*;

/// ARI from explicit pair counting.
fn pair_count_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            both += (sa && sb) as u8 as f64;
            only_a += sa as u8 as f64;
            only_b += sb as u8 as f64;
            total += 1.0;
        }
    }
    let expected = only_a * only_b / total;
    let max = 0.5 * (only_a + only_b);
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

fn permuted(labels: &[usize], perm: &[usize]) -> Vec<usize> {
    labels.iter().map(|&l| perm[l]).collect()
}

fn forest_kernel(g: &Graph) -> nalgebra::DMatrix<f64> {
    let m = derive_matrices(g).unwrap();
    build_measure(MeasureId::plain(Family::For), 0.5, &m, BuildOptions::default())
        .unwrap()
        .values
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ari_matches_pair_counting(
        (a, b) in (2usize..14).prop_flat_map(|n| (common::labeling(n, 4), common::labeling(n, 4)))
    ) {
        let fast = ari(&a, &b).unwrap();
        prop_assert!((fast - pair_count_ari(&a, &b)).abs() < 1e-12);
        prop_assert!((fast - ari(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ari_is_one_on_itself_and_relabeling_invariant(
        a in common::labeling(12, 5),
        b in common::labeling(12, 5),
        perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        if a.iter().any(|&l| l != a[0]) {
            prop_assert!((ari(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        }
        let base = ari(&a, &b).unwrap();
        prop_assert!((ari(&permuted(&a, &perm), &b).unwrap() - base).abs() < 1e-12);
        prop_assert!((ari(&a, &permuted(&b, &perm)).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn modularity_is_relabeling_invariant(
        g in common::connected_graph(4, 15),
        perm in Just((0..3).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let labels = g.labels().to_vec();
        let q = modularity(&g, &labels).unwrap();
        prop_assert!((modularity(&g, &permuted(&labels, &perm)).unwrap() - q).abs() < 1e-12);
        let mut share = vec![0.0; g.num_communities()];
        for u in 0..g.n() {
            share[labels[u]] += g.degree(u) as f64 / (2.0 * g.edges().len() as f64);
        }
        prop_assert!((share.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_transform_round_trips(t in 0.0f64..0.999) {
        prop_assert!((tilde_tau(tau_from_tilde(t)) - t).abs() < 1e-12);
    }

    #[test]
    fn fractional_ranks_preserve_rank_sum(scores in prop::collection::vec(prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]), 25)) {
        let ranks = fractional_ranks(&scores);
        prop_assert!((ranks.iter().sum::<f64>() - 325.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn inertia_never_increases(g in common::connected_graph(6, 25), seed in any::<u64>(), k in 2usize..4) {
        let kernel = forest_kernel(&g);
        for strategy in InitStrategy::ALL {
            let r = kernel_kmeans_single(&kernel, k, ClusterInit { strategy, seed }, DEFAULT_MAX_ITER).unwrap();
            for w in r.inertia_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-10, "{strategy:?}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn best_trial_is_reproducible(g in common::connected_graph(6, 20), seed in any::<u64>()) {
        let kernel = forest_kernel(&g);
        let k = g.num_communities();
        let a = cluster_best_trial(&kernel, k, &g, Criterion::Inertia, seed).unwrap();
        let b = cluster_best_trial(&kernel, k, &g, Criterion::Inertia, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let perm: Vec<usize> = (0..k).rev().collect();
        prop_assert!((ari(&a.labels, &permuted(&a.labels, &perm)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filter_winner_survives_power_of_two_rescaling(
        pts in prop::collection::vec(((0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0), prop::collection::vec(0.0f64..1.0, 4)), 3..30),
        at in (0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0),
        exp in -6i32..6,
    ) {
        let labels = LabelSet::new(&[
            MeasureId::plain(Family::SCCT),
            MeasureId::plain(Family::For),
            MeasureId::plain(Family::RSP),
        ]);
        let config = FilterConfig::new(0.8).unwrap();
        let data: Vec<DataPoint> = pts
            .iter()
            .enumerate()
            .map(|(i, ((x, y, z), s))| DataPoint { graph_id: format!("g{i}"), point: [*x, *y, *z], scores: s.clone() })
            .collect();
        let c = 2f64.powi(exp);
        let scaled: Vec<DataPoint> = data
            .iter()
            .map(|p| DataPoint { scores: p.scores.iter().map(|s| s * c).collect(), ..p.clone() })
            .collect();
        let point = [at.0, at.1, at.2];
        let a = gaussian_filter_winner(point, &data, &labels, &config);
        let b = gaussian_filter_winner(point, &scaled, &labels, &config);
        prop_assert_eq!(a.winner, b.winner);
        prop_assert_eq!(a.support, b.support);
    }

    #[test]
    fn leadership_map_ignores_record_order(
        (data, shuffled) in prop::collection::vec(((0.1f64..3.0, 1.0f64..10.0, -0.3f64..0.9), prop::collection::vec(0.0f64..1.0, 3)), 4..25)
            .prop_map(|pts| {
                pts.into_iter()
                    .enumerate()
                    .map(|(i, ((x, y, z), s))| DataPoint { graph_id: format!("g{i:03}"), point: [x, y, z], scores: s })
                    .collect::<Vec<_>>()
            })
            .prop_flat_map(|data| (Just(data.clone()), Just(data).prop_shuffle()))
    ) {
        let labels = LabelSet::new(&[MeasureId::plain(Family::SCCT), MeasureId::plain(Family::For)]);
        let config = FilterConfig::new(0.6).unwrap();
        let a = leadership_map(&data, &labels, 6, &config).unwrap();
        let b = leadership_map(&shuffled, &labels, 6, &config).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lda_variance_ratios_are_a_decreasing_distribution(
        rows in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0, -1.0f64..1.0, 0usize..3), 12..60)
    ) {
        let features: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0, r.1, r.2]).collect();
        let labels: Vec<usize> = rows.iter().enumerate().map(|(i, r)| if i < 6 { i % 3 } else { r.3 }).collect();
        let lda = lda_importance(&features, &labels).unwrap();
        let evr = &lda.explained_variance_ratio;
        prop_assert!((evr.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        for w in evr.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        prop_assert!(evr.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn leaderboard_ranks_sum_per_graph(
        table in prop::collection::vec(prop::collection::vec(prop::sample::select(vec![0.0, 0.3, 0.7, 1.0]), 25), 1..8)
    ) {
        let measures = MeasureId::all();
        let mut records = Vec::new();
        let mut features = BTreeMap::new();
        for (g, row) in table.iter().enumerate() {
            let id = format!("g{g}");
            for (m, &a) in measures.iter().zip(row) {
                records.push(EvalRecord {
                    graph_id: id.clone(),
                    measure: *m,
                    best_x: 0.0,
                    best_ari: a,
                    per_x_ari: [a; GRID_POINTS],
                    failures: 0,
                    criterion: Criterion::Inertia,
                });
            }
            features.insert(id, Features { n: 10, tau1: 2.0, tau2: 1.5, log_avg_degree: 1.0, gt_modularity: 0.3 });
        }
        let rows = leaderboard(&records, &features, Subset::All).unwrap();
        prop_assert_eq!(rows.len(), 25);
        let rank_total: f64 = rows.iter().map(|r| r.mean_rank).sum();
        prop_assert!((rank_total - 325.0).abs() < 1e-9);
        for r in &rows {
            prop_assert!((1.0..=25.0).contains(&r.mean_rank));
            prop_assert!((0.0..=100.0).contains(&r.wins_pct));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn eval_record_is_consistent_with_its_grid(g in common::connected_graph(6, 14), seed in any::<u64>()) {
        let m = derive_matrices(&g).unwrap();
        let config = BenchConfig { base_seed: seed, ..BenchConfig::default() };
        let r = evaluate_with(&g, &m, "g", MeasureId::plain(Family::For), &config);
        prop_assert!((-1.0..=1.0).contains(&r.best_ari));
        prop_assert!((0.0..=1.0).contains(&r.best_x));
        let max = r.per_x_ari.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(r.best_ari, max);
        // Any coarser sub-grid can only do worse.
        let coarse = r.per_x_ari.iter().step_by(3).copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(coarse <= r.best_ari);
    }

    #[test]
    fn accepted_lfr_graphs_meet_tolerances(seed in any::<u64>()) {
        let config = sample_lfr_config(30..=120, seed);
        if let Ok(generated) = generate_lfr(&config) {
            let g = &generated.graph;
            prop_assert!(g.is_connected());
            prop_assert_eq!(g.n(), config.params.n);
            prop_assert!((g.mixing() - config.params.mu).abs() <= 0.05 + 1e-12);
            prop_assert!(derive_matrices(g).is_ok());
        }
    }
}
