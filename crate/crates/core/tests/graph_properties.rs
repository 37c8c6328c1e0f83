mod common;

use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::linalg::Spectrum;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bfs_distances_match_floyd_warshall(g in common::connected_graph(2, 7)) {
        let m = derive_matrices(&g).unwrap();
        let fw = common::floyd_warshall(&g);
        for i in 0..g.n() {
            for j in 0..g.n() {
                prop_assert_eq!(m.shortest_paths[(i, j)], fw[i][j]);
            }
        }
    }

    #[test]
    fn distance_matrix_is_a_metric(g in common::connected_graph(2, 12)) {
        let c = derive_matrices(&g).unwrap().shortest_paths;
        let n = g.n();
        for i in 0..n {
            prop_assert_eq!(c[(i, i)], 0.0);
            for j in 0..n {
                prop_assert_eq!(c[(i, j)], c[(j, i)]);
                if i != j {
                    prop_assert!(c[(i, j)] >= 1.0);
                }
                for k in 0..n {
                    prop_assert!(c[(i, j)] <= c[(i, k)] + c[(k, j)]);
                }
            }
        }
    }

    #[test]
    fn laplacian_and_markov_row_sums(g in common::connected_graph(2, 20)) {
        let m = derive_matrices(&g).unwrap();
        for i in 0..g.n() {
            prop_assert!(m.laplacian.row(i).sum().abs() < 1e-12);
            prop_assert!((m.markov.row(i).sum() - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(m.volume, 2.0 * g.edges().len() as f64);
    }

    #[test]
    fn spectral_radius_matches_eigendecomposition(g in common::connected_graph(2, 20)) {
        let m = derive_matrices(&g).unwrap();
        prop_assert!(m.spectral_radius > 0.0);
        let exact = Spectrum::of(&m.adjacency).max_abs();
        prop_assert!((m.spectral_radius - exact).abs() < 1e-8,
            "power iteration {} vs eigen {}", m.spectral_radius, exact);
    }

    #[test]
    fn normalized_laplacian_is_symmetric_with_bounded_spectrum(g in common::connected_graph(2, 20)) {
        let m = derive_matrices(&g).unwrap();
        let l = &m.normalized_laplacian;
        prop_assert!((l - l.transpose()).amax() < 1e-12);
        for &v in Spectrum::of(l).values.iter() {
            prop_assert!((-1e-8..=2.0 + 1e-8).contains(&v), "eigenvalue {v}");
        }
    }

    #[test]
    fn text_format_round_trips(g in common::connected_graph(2, 15)) {
        let text = g.to_text();
        let back = Graph::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.labels(), g.labels());
    }
}
