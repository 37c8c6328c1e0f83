//! Grid sweep of every measure over a graph dataset, scored by ARI against
//! the planted communities.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{self, Criterion};
use crate::error::{Error, Result};
use crate::graph::{derive_matrices, DerivedMatrices, Graph};
use crate::lfr::{LfrMetadata, LfrParams};
use crate::measures::{build_measure, BuildOptions, MeasureId, Variant};
use crate::scoring;
use crate::seed;

pub const GRID_POINTS: usize = 16;

/// `x_i = i / 15` for `i = 0..15`.
pub fn grid() -> [f64; GRID_POINTS] {
    std::array::from_fn(|i| i as f64 / (GRID_POINTS - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub n: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub log_avg_degree: f64,
    pub gt_modularity: f64,
}

impl Features {
    /// `(tau1, avg_degree, modularity)`, the space the leadership filter
    /// works in.
    pub fn reduced(&self) -> [f64; 3] {
        [self.tau1, self.log_avg_degree.exp(), self.gt_modularity]
    }

    /// All five features as a vector, in CSV column order.
    pub fn full(&self) -> [f64; 5] {
        [
            self.n as f64,
            self.tau1,
            self.tau2,
            self.log_avg_degree,
            self.gt_modularity,
        ]
    }
}

pub const FEATURE_NAMES: [&str; 5] = ["n", "tau1", "tau2", "log_avg_degree", "gt_modularity"];

pub fn compute_features(graph: &Graph, params: &LfrParams) -> Result<Features> {
    Ok(Features {
        n: graph.n(),
        tau1: params.tau1,
        tau2: params.tau2,
        log_avg_degree: graph.mean_degree().ln(),
        gt_modularity: scoring::modularity(graph, graph.labels())?,
    })
}

#[derive(Debug, Clone)]
pub struct GraphRecord {
    pub graph_id: String,
    pub params: LfrParams,
    pub features: Features,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub graph_id: String,
    pub measure: MeasureId,
    pub best_x: f64,
    pub best_ari: f64,
    pub per_x_ari: [f64; GRID_POINTS],
    pub failures: usize,
    pub criterion: Criterion,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BenchConfig {
    pub criterion: Criterion,
    pub base_seed: u64,
    pub options: BuildOptions,
}

/// Seed for one (graph, measure, grid point) task.
pub fn task_seed(base_seed: u64, graph_id: &str, measure: MeasureId, grid_index: usize) -> u64 {
    let s = seed::mix(base_seed, seed::hash_str(graph_id));
    let s = seed::mix(s, measure.index() as u64);
    seed::mix(s, grid_index as u64)
}

/// First index of the maximum.
fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Sweeps the grid for one measure on a graph whose matrices are already
/// derived. Failed kernel builds score 0.
pub fn evaluate_with(
    graph: &Graph,
    matrices: &DerivedMatrices,
    graph_id: &str,
    measure: MeasureId,
    config: &BenchConfig,
) -> EvalRecord {
    let k = graph.num_communities();
    let mut per_x_ari = [0.0; GRID_POINTS];
    let mut failures = 0;
    for (i, x) in grid().into_iter().enumerate() {
        let score = build_measure(measure, x, matrices, config.options).and_then(|kernel| {
            let seed = task_seed(config.base_seed, graph_id, measure, i);
            let r = clustering::cluster_best_trial(&kernel.values, k, graph, config.criterion, seed)?;
            scoring::ari(graph.labels(), &r.labels)
        });
        match score {
            Ok(a) => per_x_ari[i] = a,
            Err(e) => {
                log::debug!("{graph_id} {measure} x={x}: {e}");
                failures += 1;
            }
        }
    }
    let best = first_argmax(&per_x_ari);
    EvalRecord {
        graph_id: graph_id.to_string(),
        measure,
        best_x: grid()[best],
        best_ari: per_x_ari[best],
        per_x_ari,
        failures,
        criterion: config.criterion,
    }
}

pub fn evaluate_measure(
    graph: &Graph,
    graph_id: &str,
    measure: MeasureId,
    config: &BenchConfig,
) -> Result<EvalRecord> {
    let matrices = derive_matrices(graph)?;
    Ok(evaluate_with(graph, &matrices, graph_id, measure, config))
}

fn results_header() -> Vec<String> {
    let mut h: Vec<String> = ["graph_id", "measure", "variant", "best_x", "best_ari"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((0..GRID_POINTS).map(|i| format!("ari_{i}")));
    h.push("failures".into());
    h.push("criterion".into());
    h
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("expected a number, got `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
}

fn check_header(found: &csv::StringRecord, expected: &[String], path: &Path) -> Result<()> {
    if found.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Schema(format!(
            "{}: expected header `{}`",
            path.display(),
            expected.join(",")
        )));
    }
    Ok(())
}

/// Writes `contents` to a sibling temp file, then renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn sort_records(records: &mut [EvalRecord]) {
    records.sort_by(|a, b| a.graph_id.cmp(&b.graph_id).then(a.measure.cmp(&b.measure)));
}

pub fn write_results(path: &Path, records: &[EvalRecord]) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(results_header())?;
    for r in &sorted {
        let mut row = vec![
            r.graph_id.clone(),
            r.measure.family().name().to_string(),
            r.measure.variant().name().to_string(),
            r.best_x.to_string(),
            r.best_ari.to_string(),
        ];
        row.extend(r.per_x_ari.iter().map(f64::to_string));
        row.push(r.failures.to_string());
        row.push(r.criterion.to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

pub fn read_results(path: &Path) -> Result<Vec<EvalRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(rdr.headers()?, &results_header(), path)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let family = row[1].parse()?;
        let variant: Variant = row[2].parse()?;
        let mut per_x_ari = [0.0; GRID_POINTS];
        for (i, a) in per_x_ari.iter_mut().enumerate() {
            *a = parse_f64(&row[5 + i])?;
        }
        out.push(EvalRecord {
            graph_id: row[0].to_string(),
            measure: MeasureId::new(family, variant)?,
            best_x: parse_f64(&row[3])?,
            best_ari: parse_f64(&row[4])?,
            per_x_ari,
            failures: parse_usize(&row[5 + GRID_POINTS])?,
            criterion: row[6 + GRID_POINTS].parse()?,
        });
    }
    Ok(out)
}

fn features_header() -> Vec<String> {
    std::iter::once("graph_id")
        .chain(FEATURE_NAMES)
        .map(str::to_string)
        .collect()
}

pub fn write_features(path: &Path, dataset: &[GraphRecord]) -> Result<()> {
    let mut sorted: Vec<&GraphRecord> = dataset.iter().collect();
    sorted.sort_by(|a, b| a.graph_id.cmp(&b.graph_id));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(features_header())?;
    for r in sorted {
        let f = &r.features;
        w.write_record([
            r.graph_id.clone(),
            f.n.to_string(),
            f.tau1.to_string(),
            f.tau2.to_string(),
            f.log_avg_degree.to_string(),
            f.gt_modularity.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, &bytes)
}

/// Features keyed by graph id.
pub fn read_features(path: &Path) -> Result<BTreeMap<String, Features>> {
    let mut rdr = csv::Reader::from_path(path)?;
    check_header(rdr.headers()?, &features_header(), path)?;
    let mut out = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        out.insert(
            row[0].to_string(),
            Features {
                n: parse_usize(&row[1])?,
                tau1: parse_f64(&row[2])?,
                tau2: parse_f64(&row[3])?,
                log_avg_degree: parse_f64(&row[4])?,
                gt_modularity: parse_f64(&row[5])?,
            },
        );
    }
    Ok(out)
}

/// Graph file for id `id` inside a dataset directory.
pub fn graph_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.graph"))
}

/// Metadata sidecar for id `id`.
pub fn metadata_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

/// Loads every `<id>.graph` with its `<id>.json` sidecar, sorted by id.
pub fn load_dataset(dir: &Path) -> Result<Vec<GraphRecord>> {
    let mut ids: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "graph").then(|| p.file_stem()?.to_str().map(str::to_string))?
        })
        .collect();
    ids.sort();
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let path = graph_path(dir, &id);
        let graph = Graph::read(&path)?;
        let meta: LfrMetadata = serde_json::from_str(&fs::read_to_string(metadata_path(dir, &id))?)?;
        out.push(GraphRecord {
            features: compute_features(&graph, &meta.params)?,
            params: meta.params,
            graph_id: id,
            path,
        });
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct BenchOutcome {
    /// Records for the requested (graph, measure) pairs, sorted.
    pub records: Vec<EvalRecord>,
    pub computed: usize,
    pub skipped: usize,
    /// Per-graph failures that prevented evaluation.
    pub errors: Vec<(String, String)>,
}

/// Evaluates every (graph, measure) pair on a pool of `workers` threads.
///
/// With a store path, records already present there are reused, and the
/// store is rewritten after each graph.
pub fn run_benchmark(
    dataset: &[GraphRecord],
    measures: &[MeasureId],
    config: &BenchConfig,
    workers: usize,
    store: Option<&Path>,
) -> Result<BenchOutcome> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;

    let mut stored: Vec<EvalRecord> = match store {
        Some(p) if p.exists() => read_results(p)?,
        _ => Vec::new(),
    };
    let mut measures = measures.to_vec();
    measures.sort();
    measures.dedup();
    let mut graphs: Vec<&GraphRecord> = dataset.iter().collect();
    graphs.sort_by(|a, b| a.graph_id.cmp(&b.graph_id));

    let mut outcome = BenchOutcome::default();
    for rec in graphs {
        let done = |m: &MeasureId| {
            stored
                .iter()
                .any(|r| r.graph_id == rec.graph_id && r.measure == *m && r.criterion == config.criterion)
        };
        let todo: Vec<MeasureId> = measures.iter().copied().filter(|m| !done(m)).collect();
        outcome.skipped += measures.len() - todo.len();
        if todo.is_empty() {
            continue;
        }
        let prepared = Graph::read(&rec.path).and_then(|g| {
            let m = derive_matrices(&g)?;
            Ok((g, m))
        });
        let (graph, matrices) = match prepared {
            Ok(p) => p,
            Err(e) => {
                log::warn!("{}: {e}", rec.graph_id);
                outcome.errors.push((rec.graph_id.clone(), e.to_string()));
                continue;
            }
        };
        let fresh: Vec<EvalRecord> = pool.install(|| {
            todo.par_iter()
                .map(|&m| evaluate_with(&graph, &matrices, &rec.graph_id, m, config))
                .collect()
        });
        outcome.computed += fresh.len();
        stored.extend(fresh);
        if let Some(p) = store {
            write_results(p, &stored)?;
        }
    }

    outcome.records = stored
        .into_iter()
        .filter(|r| {
            r.criterion == config.criterion
                && measures.contains(&r.measure)
                && dataset.iter().any(|g| g.graph_id == r.graph_id)
        })
        .collect();
    sort_records(&mut outcome.records);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Family;

    pub(crate) fn two_cliques() -> Graph {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((3, 4));
        Graph::new(8, edges, vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn grid_has_endpoints() {
        let g = grid();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[15], 1.0);
        assert_eq!(g[5], 1.0 / 3.0);
    }

    #[test]
    fn forest_recovers_cliques() {
        let g = two_cliques();
        for criterion in [Criterion::Inertia, Criterion::Modularity] {
            let config = BenchConfig {
                criterion,
                ..Default::default()
            };
            let r = evaluate_measure(&g, "g", MeasureId::plain(Family::For), &config).unwrap();
            assert_eq!(r.best_ari, 1.0);
            assert_eq!(r.per_x_ari.len(), GRID_POINTS);
            assert_eq!(r.best_ari, r.per_x_ari.iter().cloned().fold(f64::MIN, f64::max));
        }
    }

    #[test]
    fn argmax_takes_first() {
        assert_eq!(first_argmax(&[0.3; 16]), 0);
        assert_eq!(first_argmax(&[0.1, 0.5, 0.5, 0.2]), 1);
        assert_eq!(first_argmax(&[0.0; 16]), 0);
    }

    #[test]
    fn task_seeds_differ_by_component() {
        let m = MeasureId::plain(Family::Katz);
        let base = task_seed(1, "g", m, 0);
        assert_ne!(base, task_seed(2, "g", m, 0));
        assert_ne!(base, task_seed(1, "h", m, 0));
        assert_ne!(base, task_seed(1, "g", MeasureId::log(Family::Katz), 0));
        assert_ne!(base, task_seed(1, "g", m, 1));
    }

    #[test]
    fn features_of_triangle() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)], vec![0, 0, 0]).unwrap();
        let f = compute_features(&g, &LfrParams::new(10, 2.0, 3.0, 0.1, 2.0)).unwrap();
        assert_eq!(f.gt_modularity, 0.0);
        assert_eq!(f.log_avg_degree, 2f64.ln());
        assert!((f.reduced()[1] - 2.0).abs() < 1e-12);
        assert_eq!(f.n, 3);
    }

    #[test]
    fn results_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut per_x_ari = [0.25; GRID_POINTS];
        per_x_ari[3] = 1.0 / 3.0;
        let rec = EvalRecord {
            graph_id: "g1".into(),
            measure: MeasureId::log(Family::Comm),
            best_x: 0.2,
            best_ari: 1.0 / 3.0,
            per_x_ari,
            failures: 2,
            criterion: Criterion::Modularity,
        };
        write_results(&path, std::slice::from_ref(&rec)).unwrap();
        assert_eq!(read_results(&path).unwrap(), vec![rec]);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("graph_id,measure,variant,best_x,best_ari,ari_0,"));
        assert!(text.contains("g1,Comm,log,"));
    }

    #[test]
    fn bad_header_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_results(&path), Err(Error::Schema(_))));
    }
}
