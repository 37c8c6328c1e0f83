//! Kernel k-means on two 4-cliques joined by a bridge, one run per
//! initialization strategy and then the best of 18 trials.

use graph_measures::clustering::{
    cluster_best_trial, kernel_kmeans_single, ClusterInit, Criterion, InitStrategy,
    DEFAULT_MAX_ITER,
};
use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::measures::{build_measure, BuildOptions, Family, MeasureId};
use graph_measures::scoring::ari;

fn main() -> graph_measures::Result<()> {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.push((3, 4));
    let graph = Graph::new(8, edges, vec![0, 0, 0, 0, 1, 1, 1, 1])?;
    let m = derive_matrices(&graph)?;
    let kernel = build_measure(MeasureId::plain(Family::For), 0.5, &m, BuildOptions::default())?.values;

    for strategy in InitStrategy::ALL {
        let r = kernel_kmeans_single(&kernel, 2, ClusterInit { strategy, seed: 11 }, DEFAULT_MAX_ITER)?;
        println!(
            "{strategy:?}: labels {:?}, inertia {:.4}, {} iterations",
            r.labels, r.inertia, r.iterations
        );
    }
    let best = cluster_best_trial(&kernel, 2, &graph, Criterion::Inertia, 11)?;
    println!(
        "best of 18: {:?}, ARI {:.3}, modularity {:.4}",
        best.labels,
        ari(graph.labels(), &best.labels)?,
        best.modularity.unwrap_or(f64::NAN)
    );
    Ok(())
}
