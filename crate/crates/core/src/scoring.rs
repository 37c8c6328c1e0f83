//! Partition quality: adjusted Rand index and Newman modularity.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Hubert-Arabie adjusted Rand index over the contingency table.
///
/// Returns 1.0 when the denominator vanishes (both partitions are a single
/// cluster, or both are all singletons).
pub fn ari(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let n = y_true.len() as u64;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&a, &b) in y_true.iter().zip(y_pred) {
        *table.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| choose2(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| choose2(c)).sum();
    let total = choose2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// `Q = sum_c (e_c / m - (d_c / 2m)^2)`.
pub fn modularity(graph: &Graph, labels: &[usize]) -> Result<f64> {
    if labels.len() != graph.n() {
        return Err(Error::LengthMismatch(graph.n(), labels.len()));
    }
    let m = graph.edges().len();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let clusters = labels.iter().max().map_or(0, |v| v + 1);
    let mut internal = vec![0usize; clusters];
    let mut degree = vec![0usize; clusters];
    for &(u, v) in graph.edges() {
        if labels[u] == labels[v] {
            internal[labels[u]] += 1;
        }
    }
    for (u, &l) in labels.iter().enumerate() {
        degree[l] += graph.degree(u);
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| e as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ari_examples() {
        assert_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_abs_diff_eq!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ari(&[0, 1, 2, 3], &[0, 0, 0, 0]).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(ari(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert!(matches!(ari(&[0, 1], &[0]), Err(Error::LengthMismatch(2, 1))));
    }

    /// `1/2m sum_ij (A_ij - d_i d_j / 2m) [c_i = c_j]`
    fn pairwise_modularity(g: &Graph, labels: &[usize]) -> f64 {
        let n = g.n();
        let two_m = 2.0 * g.edges().len() as f64;
        let mut adj = vec![vec![0.0; n]; n];
        for &(u, v) in g.edges() {
            adj[u][v] = 1.0;
            adj[v][u] = 1.0;
        }
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += adj[i][j] - (g.degree(i) * g.degree(j)) as f64 / two_m;
                }
            }
        }
        q / two_m
    }

    #[test]
    fn modularity_examples() {
        let two_edges = Graph::new(4, vec![(0, 1), (2, 3)], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(modularity(&two_edges, &[0, 0, 0, 0]).unwrap(), 0.0);
        assert_eq!(modularity(&two_edges, &[0, 0, 1, 1]).unwrap(), 0.5);

        let cliques = Graph::new(
            6,
            vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)],
            vec![0, 0, 0, 1, 1, 1],
        )
        .unwrap();
        // m = 7, e_c = 3 and d_c = 7 per clique.
        let q = modularity(&cliques, cliques.labels()).unwrap();
        assert_abs_diff_eq!(q, 6.0 / 7.0 - 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(q, pairwise_modularity(&cliques, cliques.labels()), epsilon = 1e-12);

        let empty = Graph::new(2, vec![], vec![0, 0]).unwrap();
        assert!(matches!(modularity(&empty, &[0, 0]), Err(Error::NoEdges)));
    }
}
