#![allow(dead_code)]

use std::collections::BTreeSet;

use graph_measures::graph::Graph;
use proptest::prelude::*;

/// Random connected graph: a random recursive tree plus extra edges.
pub fn connected_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<u32>(), n - 1),
                prop::collection::vec((0..n, 0..n), 0..=2 * n),
                1..=n.min(3),
            )
        })
        .prop_map(|(n, parents, extra, k)| {
            let mut edges = BTreeSet::new();
            for (i, p) in parents.into_iter().enumerate() {
                let child = i + 1;
                let parent = p as usize % child;
                edges.insert((parent, child));
            }
            for (u, v) in extra {
                if u != v {
                    edges.insert((u.min(v), u.max(v)));
                }
            }
            let labels = (0..n).map(|i| i % k).collect();
            Graph::new(n, edges.into_iter().collect(), labels).unwrap()
        })
}

/// Random labeled tree on `n` nodes.
pub fn tree(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<u32>(), n - 1)))
        .prop_map(|(n, parents)| {
            let edges = parents
                .into_iter()
                .enumerate()
                .map(|(i, p)| (p as usize % (i + 1), i + 1))
                .collect();
            Graph::new(n, edges, vec![0; n]).unwrap()
        })
}

/// Labeling of `n` items using exactly the labels `0..k` for some `k`.
pub fn labeling(n: usize, max_k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..max_k, n).prop_map(|raw| {
        let mut seen = Vec::new();
        raw.into_iter()
            .map(|l| match seen.iter().position(|&s| s == l) {
                Some(p) => p,
                None => {
                    seen.push(l);
                    seen.len() - 1
                }
            })
            .collect()
    })
}

pub fn floyd_warshall(graph: &Graph) -> Vec<Vec<f64>> {
    let n = graph.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v) in graph.edges() {
        d[u][v] = 1.0;
        d[v][u] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}
