//! Undirected unweighted graphs with planted communities, plus every matrix
//! the measure families are built from.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::Spectrum;

/// Simple undirected graph with a ground-truth community per node.
///
/// Edge order is preserved exactly as given so that the text format
/// round-trips byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
    communities: usize,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph. Edges are normalized to `u < v`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != n {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} nodes",
                labels.len(),
                n
            )));
        }
        let communities = labels.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; communities];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::InvalidGraph(format!("community {missing} is empty")));
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut neighbors = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", e.0, e.1)));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
            normalized.push(e);
        }
        Ok(Graph {
            n,
            edges: normalized,
            labels,
            communities,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of ground-truth communities `k`.
    pub fn num_communities(&self) -> usize {
        self.communities
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors[u].len()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.neighbors[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// True iff one BFS from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    /// Fraction of edges whose endpoints lie in different communities.
    pub fn mixing(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        let cross = self
            .edges
            .iter()
            .filter(|(u, v)| self.labels[*u] != self.labels[*v])
            .count();
        cross as f64 / self.edges.len() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.communities);
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out.push_str("labels");
        for l in &self.labels {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let (n, k) = parse_pair(header)?;
        let mut edges = Vec::new();
        let mut labels = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("labels") {
                let parsed = rest
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                labels = Some(parsed);
                break;
            }
            let (u, v) = parse_pair(line)?;
            if u >= v {
                return Err(Error::Parse(format!("edge line `{line}` must have u < v")));
            }
            edges.push((u, v));
        }
        let labels = labels.ok_or_else(|| Error::Parse("missing labels trailer".into()))?;
        let graph = Graph::new(n, edges, labels)?;
        if graph.communities != k {
            return Err(Error::Parse(format!(
                "header declares {k} communities, labels use {}",
                graph.communities
            )));
        }
        Ok(graph)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("expected two integers in `{line}`")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("`{line}`: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens in `{line}`")));
    }
    Ok((a, b))
}

/// Matrices derived from a connected graph.
///
/// Eigendecompositions and the commute-time matrices are computed lazily
/// and cached, so one instance can serve every measure built on the graph.
#[derive(Debug)]
pub struct DerivedMatrices {
    /// `A`
    pub adjacency: DMatrix<f64>,
    /// Diagonal of `D`.
    pub degrees: DVector<f64>,
    /// `L = D - A`
    pub laplacian: DMatrix<f64>,
    /// `P = D^-1 A`
    pub markov: DMatrix<f64>,
    /// `D^-1/2 L D^-1/2`
    pub normalized_laplacian: DMatrix<f64>,
    /// Hop-count distance matrix `C`.
    pub shortest_paths: DMatrix<f64>,
    /// Sum of all entries of `A`.
    pub volume: f64,
    /// Spectral radius of `A`.
    pub spectral_radius: f64,
    adjacency_spectrum: OnceLock<Spectrum>,
    laplacian_spectrum: OnceLock<Spectrum>,
    normalized_spectrum: OnceLock<Spectrum>,
    pub(crate) ct_pinv: OnceLock<DMatrix<f64>>,
    pub(crate) cct: OnceLock<DMatrix<f64>>,
}

impl DerivedMatrices {
    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn degree_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.degrees)
    }

    pub fn adjacency_spectrum(&self) -> &Spectrum {
        self.adjacency_spectrum
            .get_or_init(|| Spectrum::of(&self.adjacency))
    }

    pub fn laplacian_spectrum(&self) -> &Spectrum {
        self.laplacian_spectrum
            .get_or_init(|| Spectrum::of(&self.laplacian))
    }

    pub fn normalized_laplacian_spectrum(&self) -> &Spectrum {
        self.normalized_spectrum
            .get_or_init(|| Spectrum::of(&self.normalized_laplacian))
    }
}

/// Builds every derived matrix. Requires a connected graph with `n >= 2`.
pub fn derive_matrices(graph: &Graph) -> Result<DerivedMatrices> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::InvalidGraph("need at least two nodes".into()));
    }
    if let Some(u) = (0..n).find(|&u| graph.degree(u) == 0) {
        return Err(Error::ZeroDegreeNode(u));
    }

    let mut shortest_paths = DMatrix::zeros(n, n);
    for s in 0..n {
        for (t, d) in graph.bfs(s).into_iter().enumerate() {
            shortest_paths[(s, t)] = d.ok_or(Error::DisconnectedGraph)? as f64;
        }
    }

    let mut adjacency = DMatrix::zeros(n, n);
    for &(u, v) in graph.edges() {
        adjacency[(u, v)] = 1.0;
        adjacency[(v, u)] = 1.0;
    }
    let degrees = DVector::from_fn(n, |i, _| graph.degree(i) as f64);
    let laplacian = DMatrix::from_diagonal(&degrees) - &adjacency;
    let markov = DMatrix::from_fn(n, n, |i, j| adjacency[(i, j)] / degrees[i]);
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let normalized_laplacian =
        DMatrix::from_fn(n, n, |i, j| laplacian[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    let volume = adjacency.sum();
    let spectral_radius = spectral_radius(&adjacency);

    Ok(DerivedMatrices {
        adjacency,
        degrees,
        laplacian,
        markov,
        normalized_laplacian,
        shortest_paths,
        volume,
        spectral_radius,
        adjacency_spectrum: OnceLock::new(),
        laplacian_spectrum: OnceLock::new(),
        normalized_spectrum: OnceLock::new(),
        ct_pinv: OnceLock::new(),
        cct: OnceLock::new(),
    })
}

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 20_000;

/// Spectral radius of a symmetric nonnegative matrix.
///
/// Power iteration on `A + I` from the all-ones vector; the shift keeps the
/// Perron root strictly dominant on bipartite graphs. Falls back to a full
/// eigendecomposition if the iteration cap is hit.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let shifted = a + DMatrix::<f64>::identity(n, n);
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut theta = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &shifted * &v;
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        if (next - theta).abs() <= POWER_TOL * next.abs() {
            return next - 1.0;
        }
        theta = next;
    }
    log::debug!("power iteration hit its cap; using eigendecomposition");
    Spectrum::of(a).max_abs()
}
