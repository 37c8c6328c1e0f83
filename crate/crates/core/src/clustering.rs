//! Kernel k-means with three initialization strategies and best-of-trials
//! selection.
//!
//! Squared distance from node `i` to the centroid of cluster `c` in the
//! feature space implied by `K`:
//!
//! ```text
//! d2(i, c) = K_ii - 2/|c| sum_{j in c} K_ij + 1/|c|^2 sum_{j,l in c} K_jl
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scoring;
use crate::seed;

pub const DEFAULT_MAX_ITER: usize = 100;
pub const TRIALS_PER_STRATEGY: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitStrategy {
    RandomDataPoints,
    KMeansPlusPlus,
    RandomPartition,
}

impl InitStrategy {
    pub const ALL: [InitStrategy; 3] = [
        InitStrategy::RandomDataPoints,
        InitStrategy::KMeansPlusPlus,
        InitStrategy::RandomPartition,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterInit {
    pub strategy: InitStrategy,
    pub seed: u64,
}

/// How the best of several trials is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Inertia,
    Modularity,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Inertia => "inertia",
            Criterion::Modularity => "modularity",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inertia" => Ok(Criterion::Inertia),
            "modularity" => Ok(Criterion::Modularity),
            _ => Err(Error::InvalidParams(format!("unknown criterion `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    /// Sum of `d2(i, cluster(i))` at termination.
    pub inertia: f64,
    /// Modularity of `labels` on the source graph, when one was supplied.
    pub modularity: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Number of times an empty cluster was reseeded.
    pub reseeds: usize,
    /// Inertia of every labeling visited, in order.
    pub inertia_history: Vec<f64>,
}

/// Per-cluster sums needed by the kernel-space distance.
struct ClusterSums {
    k: usize,
    sizes: Vec<usize>,
    /// `row_sums[c * n + i] = sum_{j in c} K_ij`
    row_sums: Vec<f64>,
    /// `sum_{j,l in c} K_jl`
    intra: Vec<f64>,
}

impl ClusterSums {
    fn new(kernel: &DMatrix<f64>, labels: &[usize], k: usize) -> Self {
        let n = labels.len();
        let mut sizes = vec![0usize; k];
        let mut row_sums = vec![0.0; k * n];
        for (j, &c) in labels.iter().enumerate() {
            sizes[c] += 1;
            let dst = &mut row_sums[c * n..(c + 1) * n];
            for (d, v) in dst.iter_mut().zip(kernel.column(j).iter()) {
                *d += v;
            }
        }
        let mut intra = vec![0.0; k];
        for (j, &c) in labels.iter().enumerate() {
            intra[c] += row_sums[c * n + j];
        }
        ClusterSums {
            k,
            sizes,
            row_sums,
            intra,
        }
    }

    /// `d2(i, c)`; infinite for an empty cluster.
    fn dist(&self, kernel: &DMatrix<f64>, i: usize, c: usize) -> f64 {
        let size = self.sizes[c];
        if size == 0 {
            return f64::INFINITY;
        }
        let n = kernel.nrows();
        let s = size as f64;
        kernel[(i, i)] - 2.0 * self.row_sums[c * n + i] / s + self.intra[c] / (s * s)
    }
}

fn inertia_of(kernel: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let sums = ClusterSums::new(kernel, labels, k);
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sums.dist(kernel, i, c))
        .sum()
}

/// Moves the points farthest from their own centroids into the empty
/// clusters, one per cluster, never emptying a donor cluster.
fn reseed_empty(kernel: &DMatrix<f64>, labels: &mut [usize], k: usize) -> usize {
    let sums = ClusterSums::new(kernel, labels, k);
    let empty: Vec<usize> = (0..k).filter(|&c| sums.sizes[c] == 0).collect();
    if empty.is_empty() {
        return 0;
    }
    let mut order: Vec<(f64, usize)> = (0..labels.len())
        .map(|i| (sums.dist(kernel, i, labels[i]), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut sizes = sums.sizes.clone();
    let mut targets = empty.into_iter();
    let mut reseeds = 0;
    let Some(mut target) = targets.next() else {
        return 0;
    };
    for (_, i) in order {
        if sizes[labels[i]] <= 1 {
            continue;
        }
        sizes[labels[i]] -= 1;
        labels[i] = target;
        sizes[target] = 1;
        reseeds += 1;
        match targets.next() {
            Some(t) => target = t,
            None => break,
        }
    }
    reseeds
}

fn seed_distance(kernel: &DMatrix<f64>, i: usize, s: usize) -> f64 {
    kernel[(i, i)] - 2.0 * kernel[(i, s)] + kernel[(s, s)]
}

fn assign_to_seeds(kernel: &DMatrix<f64>, seeds: &[usize]) -> Vec<usize> {
    let n = kernel.nrows();
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, &s) in seeds.iter().enumerate() {
                let d = seed_distance(kernel, i, s);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect();
    for (c, &s) in seeds.iter().enumerate() {
        labels[s] = c;
    }
    labels
}

/// Initial labels for one trial. Deterministic in `seed`.
pub fn init_assignment(
    strategy: InitStrategy,
    kernel: &DMatrix<f64>,
    k: usize,
    seed: u64,
) -> Vec<usize> {
    let n = kernel.nrows();
    let mut rng = seed::rng(seed);
    match strategy {
        InitStrategy::RandomDataPoints => {
            let seeds = rand::seq::index::sample(&mut rng, n, k).into_vec();
            assign_to_seeds(kernel, &seeds)
        }
        InitStrategy::KMeansPlusPlus => {
            let mut seeds = vec![rng.random_range(0..n)];
            let mut nearest: Vec<f64> = (0..n).map(|i| seed_distance(kernel, i, seeds[0])).collect();
            while seeds.len() < k {
                let weights: Vec<f64> = nearest
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| if seeds.contains(&i) { 0.0 } else { d.max(0.0) })
                    .collect();
                let next = match WeightedIndex::new(&weights) {
                    Ok(dist) => dist.sample(&mut rng),
                    Err(_) => {
                        // All remaining points coincide with a seed.
                        let free: Vec<usize> = (0..n).filter(|i| !seeds.contains(i)).collect();
                        free[rng.random_range(0..free.len())]
                    }
                };
                seeds.push(next);
                for (i, d) in nearest.iter_mut().enumerate() {
                    *d = d.min(seed_distance(kernel, i, next));
                }
            }
            assign_to_seeds(kernel, &seeds)
        }
        InitStrategy::RandomPartition => {
            let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            loop {
                let mut sizes = vec![0usize; k];
                for &l in &labels {
                    sizes[l] += 1;
                }
                let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                    break;
                };
                let donors: Vec<usize> = (0..n).filter(|&i| sizes[labels[i]] > 1).collect();
                let pick = donors[rng.random_range(0..donors.len())];
                labels[pick] = empty;
            }
            labels
        }
    }
}

/// One kernel k-means run from the given initialization.
pub fn kernel_kmeans_single(
    kernel: &DMatrix<f64>,
    k: usize,
    init: ClusterInit,
    max_iter: usize,
) -> Result<ClusteringResult> {
    let n = kernel.nrows();
    if kernel.ncols() != n {
        return Err(Error::InvalidParams("kernel must be square".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }

    let mut labels = init_assignment(init.strategy, kernel, k, init.seed);
    let mut reseeds = reseed_empty(kernel, &mut labels, k);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        let sums = ClusterSums::new(kernel, &labels, k);
        history.push(
            labels
                .iter()
                .enumerate()
                .map(|(i, &c)| sums.dist(kernel, i, c))
                .sum(),
        );
        iterations += 1;
        let mut next: Vec<usize> = labels
            .iter()
            .enumerate()
            .map(|(i, &current)| {
                let mut best = current;
                let mut best_d = sums.dist(kernel, i, current);
                for c in 0..sums.k {
                    let d = sums.dist(kernel, i, c);
                    if d < best_d {
                        best_d = d;
                        best = c;
                    }
                }
                best
            })
            .collect();
        reseeds += reseed_empty(kernel, &mut next, k);
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }

    let inertia = inertia_of(kernel, &labels, k);
    if !converged {
        history.push(inertia);
    }
    Ok(ClusteringResult {
        labels,
        inertia,
        modularity: None,
        iterations,
        converged,
        reseeds,
        inertia_history: history,
    })
}

/// Index of the winning trial; ties go to the lower index.
pub fn select_trial(results: &[ClusteringResult], criterion: Criterion) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => match criterion {
                Criterion::Inertia => r.inertia < results[b].inertia,
                Criterion::Modularity => {
                    r.modularity.unwrap_or(f64::NEG_INFINITY)
                        > results[b].modularity.unwrap_or(f64::NEG_INFINITY)
                }
            },
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Seed of trial `trial` under a task seed.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    seed::mix(base_seed, trial as u64)
}

/// Runs 6 trials per initialization strategy and returns the best one.
pub fn cluster_best_trial(
    kernel: &DMatrix<f64>,
    k: usize,
    graph: &Graph,
    criterion: Criterion,
    base_seed: u64,
) -> Result<ClusteringResult> {
    let mut results = Vec::with_capacity(3 * TRIALS_PER_STRATEGY);
    for (s, strategy) in InitStrategy::ALL.into_iter().enumerate() {
        for t in 0..TRIALS_PER_STRATEGY {
            let trial = s * TRIALS_PER_STRATEGY + t;
            let init = ClusterInit {
                strategy,
                seed: trial_seed(base_seed, trial),
            };
            let mut r = kernel_kmeans_single(kernel, k, init, DEFAULT_MAX_ITER)?;
            r.modularity = scoring::modularity(graph, &r.labels).ok();
            results.push(r);
        }
    }
    let best = select_trial(&results, criterion).expect("at least one trial");
    Ok(results.swap_remove(best))
}
