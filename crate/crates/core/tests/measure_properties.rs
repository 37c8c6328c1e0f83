mod common;

use graph_measures::graph::derive_matrices;
use graph_measures::linalg::{self, Spectrum};
use graph_measures::measures::{
    build_measure, commute_time_kernel, distance_to_kernel, kernel_adjacency, kernel_laplacian,
    map_param, markov_raw, BuildOptions, Family, MeasureId, RspIntermediate,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

const XS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn plain_kernels_are_symmetric_and_finite(g in common::connected_graph(2, 7)) {
        let m = derive_matrices(&g).unwrap();
        for family in Family::ALL {
            for x in XS {
                // Katz at the top of the grid and DF at huge t may be rejected;
                // anything that builds must be clean.
                if let Ok(k) = build_measure(MeasureId::plain(family), x, &m, BuildOptions::default()) {
                    prop_assert!(linalg::all_finite(&k.values), "{family:?} x={x}");
                    let asym = (&k.values - k.values.transpose()).amax();
                    prop_assert!(asym < 1e-8, "{family:?} x={x} asymmetry {asym}");
                }
            }
        }
    }

    #[test]
    fn katz_matches_truncated_series(g in common::connected_graph(2, 10), frac in 0.05f64..0.9) {
        let m = derive_matrices(&g).unwrap();
        let alpha = frac / m.spectral_radius;
        let k = kernel_adjacency(Family::Katz, alpha, &m).unwrap();
        let n = g.n();
        let mut term = DMatrix::<f64>::identity(n, n);
        let mut sum = term.clone();
        for _ in 1..200 {
            term = &term * &m.adjacency * alpha;
            sum += &term;
        }
        let scale = linalg::max_abs(&sum).max(1.0);
        prop_assert!((&k - &sum).amax() / scale < 1e-6);
    }

    #[test]
    fn stochastic_kernels_have_known_row_sums(g in common::connected_graph(2, 15), x in 0.01f64..0.99) {
        let m = derive_matrices(&g).unwrap();
        let t = x / (1.0 - x);
        let heat = kernel_laplacian(Family::Heat, t, &m).unwrap();
        let forest = kernel_laplacian(Family::For, t, &m).unwrap();
        let ppr = markov_raw(Family::PPR, x, &m).unwrap();
        let hpr = markov_raw(Family::HPR, t, &m).unwrap();
        for i in 0..g.n() {
            prop_assert!((heat.row(i).sum() - 1.0).abs() < 1e-8);
            prop_assert!((forest.row(i).sum() - 1.0).abs() < 1e-8);
            prop_assert!((ppr.row(i).sum() - 1.0 / (1.0 - x)).abs() < 1e-8 * (1.0 / (1.0 - x)));
            prop_assert!((hpr.row(i).sum() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn expm_routes_agree(g in common::connected_graph(2, 30), t in 0.01f64..3.0) {
        let m = derive_matrices(&g).unwrap();
        let a = &m.adjacency * t;
        let pade = linalg::expm(&a);
        let spectral = Spectrum::of(&a).apply(f64::exp);
        let scale = linalg::max_abs(&spectral).max(1.0);
        prop_assert!((&pade - &spectral).amax() / scale < 1e-8);
    }

    #[test]
    fn distance_to_kernel_has_zero_row_sums(g in common::connected_graph(2, 15)) {
        let m = derive_matrices(&g).unwrap();
        let k = distance_to_kernel(&m.shortest_paths);
        for i in 0..g.n() {
            prop_assert!(k.row(i).sum().abs() < 1e-8);
        }
    }

    #[test]
    fn commute_time_on_trees_is_scaled_hop_count(g in common::tree(2, 8)) {
        let m = derive_matrices(&g).unwrap();
        let ct = commute_time_kernel(&m);
        let expected = &m.shortest_paths * m.volume;
        prop_assert!((&ct.distance - &expected).amax() < 1e-8);
    }

    #[test]
    fn rsp_and_fe_distances_are_dissimilarities(g in common::connected_graph(2, 10)) {
        let m = derive_matrices(&g).unwrap();
        for x in XS {
            let beta = map_param(MeasureId::plain(Family::RSP), x, &m).value;
            let Ok(rsp) = RspIntermediate::new(beta, &m) else { continue };
            for d in [rsp.rsp_distance(), rsp.fe_distance()] {
                if !linalg::all_finite(&d) {
                    continue;
                }
                let scale = linalg::max_abs(&d).max(1.0);
                prop_assert!((&d - d.transpose()).amax() / scale < 1e-8, "beta={beta}");
                for i in 0..g.n() {
                    prop_assert!(d[(i, i)].abs() < 1e-8);
                    for j in 0..g.n() {
                        prop_assert!(d[(i, j)] >= -1e-8 * scale, "beta={beta} d={}", d[(i, j)]);
                    }
                }
            }
        }
    }
}
