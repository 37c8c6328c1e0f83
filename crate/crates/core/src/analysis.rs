//! Leaderboards, LDA feature importance and Gaussian-smoothed leadership
//! zones over benchmark results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bench::{EvalRecord, Features};
use crate::error::{Error, Result};
use crate::measures::MeasureId;

pub const DEFAULT_SIGMA: f64 = 0.6;
pub const DEFAULT_RESOLUTION: usize = 20;
pub const MIN_SUPPORT: usize = 3;
pub const LDA_RIDGE: f64 = 1e-6;
pub const REDUCED_FEATURES: [&str; 3] = ["tau1", "avg_degree", "modularity"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    /// Ground-truth modularity `>= 0`.
    Associative,
    Dissociative,
    All,
}

impl Subset {
    pub fn contains(self, gt_modularity: f64) -> bool {
        match self {
            Subset::Associative => gt_modularity >= 0.0,
            Subset::Dissociative => gt_modularity < 0.0,
            Subset::All => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subset::Associative => "associative",
            Subset::Dissociative => "dissociative",
            Subset::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardRow {
    pub measure: MeasureId,
    pub mean_rank: f64,
    pub wins_pct: f64,
    pub mean_ari: f64,
}

/// Average ranks, 1 = best, for scores sorted descending.
pub fn fractional_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Groups records by graph; every graph must carry the same measure set.
fn by_graph(records: &[EvalRecord]) -> Result<(Vec<MeasureId>, BTreeMap<&str, Vec<f64>>)> {
    let measures: Vec<MeasureId> = records
        .iter()
        .map(|r| r.measure)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut table: BTreeMap<&str, Vec<Option<f64>>> = BTreeMap::new();
    for r in records {
        let row = table
            .entry(r.graph_id.as_str())
            .or_insert_with(|| vec![None; measures.len()]);
        let j = measures.binary_search(&r.measure).expect("measure collected above");
        row[j] = Some(r.best_ari);
    }
    let mut out = BTreeMap::new();
    for (g, row) in table {
        let mut full = Vec::with_capacity(row.len());
        for (j, v) in row.into_iter().enumerate() {
            full.push(v.ok_or_else(|| Error::MissingMeasure {
                graph: g.to_string(),
                measure: measures[j].to_string(),
            })?);
        }
        out.insert(g, full);
    }
    Ok((measures, out))
}

fn features_of<'a>(features: &'a BTreeMap<String, Features>, graph: &str) -> Result<&'a Features> {
    features
        .get(graph)
        .ok_or_else(|| Error::Schema(format!("no features for graph `{graph}`")))
}

/// Rank, win share and mean ARI per measure over the graphs in `subset`.
/// Rows are sorted by mean rank, then catalog order. An empty subset gives
/// no rows.
pub fn leaderboard(
    records: &[EvalRecord],
    features: &BTreeMap<String, Features>,
    subset: Subset,
) -> Result<Vec<LeaderboardRow>> {
    let (measures, table) = by_graph(records)?;
    let mut rank_sum = vec![0.0; measures.len()];
    let mut wins = vec![0usize; measures.len()];
    let mut ari_sum = vec![0.0; measures.len()];
    let mut graphs = 0usize;
    for (g, aris) in &table {
        if !subset.contains(features_of(features, g)?.gt_modularity) {
            continue;
        }
        graphs += 1;
        let best = aris.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (j, r) in fractional_ranks(aris).into_iter().enumerate() {
            rank_sum[j] += r;
            ari_sum[j] += aris[j];
            if aris[j] == best {
                wins[j] += 1;
            }
        }
    }
    if graphs == 0 {
        return Ok(Vec::new());
    }
    let g = graphs as f64;
    let mut rows: Vec<LeaderboardRow> = measures
        .iter()
        .enumerate()
        .map(|(j, &measure)| LeaderboardRow {
            measure,
            mean_rank: rank_sum[j] / g,
            wins_pct: 100.0 * wins[j] as f64 / g,
            mean_ari: ari_sum[j] / g,
        })
        .collect();
    rows.sort_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank).then(a.measure.cmp(&b.measure)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaResult {
    /// Unit-norm discriminant directions in standardized feature space,
    /// strongest first.
    pub component_directions: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// `|w|` per feature, per component.
    pub feature_contributions: Vec<Vec<f64>>,
}

/// Fisher LDA on standardized features. Keeps `min(classes - 1, d)`
/// components.
pub fn lda_importance(features: &[Vec<f64>], labels: &[usize]) -> Result<LdaResult> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch(features.len(), labels.len()));
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = features[0].len();
    if d == 0 || features.iter().any(|f| f.len() != d) {
        return Err(Error::InvalidParams("feature vectors must share a nonzero length".into()));
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    if classes.len() < 2 {
        return Err(Error::DegenerateClasses("need at least two classes".into()));
    }
    if let Some((l, _)) = classes.iter().find(|(_, m)| m.len() < 2) {
        return Err(Error::DegenerateClasses(format!("class {l} has fewer than two samples")));
    }

    let n = features.len();
    let x = DMatrix::from_fn(n, d, |i, j| features[i][j]);
    let mut z = x.clone();
    for j in 0..d {
        let col = x.column(j);
        let mean = col.mean();
        let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let scale = if std > 0.0 { std } else { 1.0 };
        for i in 0..n {
            z[(i, j)] = (x[(i, j)] - mean) / scale;
        }
    }

    let overall = DVector::from_fn(d, |j, _| z.column(j).mean());
    let mut sw = DMatrix::<f64>::zeros(d, d);
    let mut sb = DMatrix::<f64>::zeros(d, d);
    for members in classes.values() {
        let mut mean = DVector::<f64>::zeros(d);
        for &i in members {
            mean += z.row(i).transpose();
        }
        mean /= members.len() as f64;
        for &i in members {
            let dev = z.row(i).transpose() - &mean;
            sw += &dev * dev.transpose();
        }
        let shift = &mean - &overall;
        sb += (members.len() as f64) * &shift * shift.transpose();
    }
    sw += DMatrix::identity(d, d) * LDA_RIDGE;

    // S_w = L L^T; the whitened problem L^-1 S_b L^-T v = lambda v is
    // symmetric, and w = L^-T v.
    let chol = sw
        .cholesky()
        .ok_or_else(|| Error::DegenerateClasses("within-class scatter is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix(f64::INFINITY))?;
    let mut whitened = &l_inv * sb * l_inv.transpose();
    whitened = (&whitened + whitened.transpose()) * 0.5;
    let eig = whitened.symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let keep = (classes.len() - 1).min(d);
    let eigenvalues: Vec<f64> = order[..keep].iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_variance_ratio = if total > 0.0 {
        eigenvalues.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / keep as f64; keep]
    };
    let mut component_directions = Vec::with_capacity(keep);
    for &k in &order[..keep] {
        let w = l_inv.transpose() * eig.eigenvectors.column(k);
        let w = w.normalize();
        // Sign convention: largest-magnitude weight is positive.
        let pivot = w.iter().cloned().fold(0.0, |acc: f64, v| if v.abs() > acc.abs() { v } else { acc });
        let w = if pivot < 0.0 { -w } else { w };
        component_directions.push(w.iter().cloned().collect::<Vec<f64>>());
    }
    let feature_contributions = component_directions
        .iter()
        .map(|w| w.iter().map(|v| v.abs()).collect())
        .collect();
    Ok(LdaResult {
        component_directions,
        eigenvalues,
        explained_variance_ratio,
        feature_contributions,
    })
}

/// Winner class of one graph, or of one filter cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Two or more measures reach ARI 1.
    Several,
    Measure(MeasureId),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Several => f.write_str("several"),
            Label::Measure(m) => m.fmt(f),
        }
    }
}

/// Smoothing setup. The neighbourhood cutoff is `3 sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub sigma: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { sigma: DEFAULT_SIGMA }
    }
}

impl FilterConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
        }
        Ok(FilterConfig { sigma })
    }

    pub fn cutoff(&self) -> f64 {
        3.0 * self.sigma
    }

    /// `exp(-dist^2 / 2 sigma^2)`
    pub fn weight(&self, dist: f64) -> f64 {
        (-dist * dist / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// Label columns for smoothing: `several` first, then measures in the
/// given priority order. Position in this list is the tie-break order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    pub labels: Vec<Label>,
}

impl LabelSet {
    /// `priority` is typically the global leaderboard order.
    pub fn new(priority: &[MeasureId]) -> Self {
        let mut labels = vec![Label::Several];
        labels.extend(priority.iter().map(|&m| Label::Measure(m)));
        LabelSet { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// One graph in the filter's input: position in feature space and a score
/// per label column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub graph_id: String,
    pub point: [f64; 3],
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadershipCell {
    pub point: [f64; 3],
    pub winner: Option<Label>,
    pub smoothed_ari: Vec<f64>,
    pub support: usize,
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Weighted mean score per label over points within the cutoff; no winner
/// with fewer than three such points. Ties go to the earlier label.
pub fn gaussian_filter_winner(
    point: [f64; 3],
    data: &[DataPoint],
    labels: &LabelSet,
    config: &FilterConfig,
) -> LeadershipCell {
    let mut num = vec![0.0; labels.len()];
    let mut den = 0.0;
    let mut support = 0;
    for p in data {
        let dist = distance(&point, &p.point);
        if dist >= config.cutoff() {
            continue;
        }
        support += 1;
        let w = config.weight(dist);
        den += w;
        for (acc, s) in num.iter_mut().zip(&p.scores) {
            *acc += w * s;
        }
    }
    if support < MIN_SUPPORT {
        return LeadershipCell {
            point,
            winner: None,
            smoothed_ari: vec![0.0; labels.len()],
            support,
        };
    }
    let smoothed: Vec<f64> = num.iter().map(|v| v / den).collect();
    let mut best = 0;
    for (j, &v) in smoothed.iter().enumerate() {
        if v > smoothed[best] {
            best = j;
        }
    }
    LeadershipCell {
        point,
        winner: Some(labels.labels[best]),
        smoothed_ari: smoothed,
        support,
    }
}

/// Per-graph score rows: measure ARIs plus the `several` column (1 when at
/// least two measures reach ARI 1, else 0). Sorted by graph id.
pub fn label_scores(
    records: &[EvalRecord],
    labels: &LabelSet,
) -> Result<BTreeMap<String, Vec<f64>>> {
    let (measures, table) = by_graph(records)?;
    let mut out = BTreeMap::new();
    for (g, aris) in table {
        let perfect = aris.iter().filter(|&&a| a == 1.0).count();
        let row = labels
            .labels
            .iter()
            .map(|l| match l {
                Label::Several => Ok(if perfect >= 2 { 1.0 } else { 0.0 }),
                Label::Measure(m) => measures
                    .binary_search(m)
                    .map(|j| aris[j])
                    .map_err(|_| Error::MissingMeasure {
                        graph: g.to_string(),
                        measure: m.to_string(),
                    }),
            })
            .collect::<Result<Vec<f64>>>()?;
        out.insert(g.to_string(), row);
    }
    Ok(out)
}

/// Per-graph winner: `several` when two or more measures reach ARI 1,
/// otherwise the best measure with ties broken by label order.
pub fn graph_winners(records: &[EvalRecord], labels: &LabelSet) -> Result<BTreeMap<String, Label>> {
    let scores = label_scores(records, labels)?;
    Ok(scores
        .into_iter()
        .map(|(g, row)| {
            let winner = if row[0] == 1.0 {
                Label::Several
            } else {
                let mut best = 1;
                for j in 1..row.len() {
                    if row[j] > row[best] {
                        best = j;
                    }
                }
                labels.labels[best]
            };
            (g, winner)
        })
        .collect())
}

/// Builds filter inputs from results and features in raw units.
pub fn data_points(
    records: &[EvalRecord],
    features: &BTreeMap<String, Features>,
    labels: &LabelSet,
) -> Result<Vec<DataPoint>> {
    label_scores(records, labels)?
        .into_iter()
        .map(|(g, scores)| {
            Ok(DataPoint {
                point: features_of(features, &g)?.reduced(),
                graph_id: g,
                scores,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadershipMap {
    pub resolution: usize,
    /// Per-feature divisor applied before filtering.
    pub scales: [f64; 3],
    /// Normalized bounding box, `(min, max)` per feature.
    pub bounds: [(f64, f64); 3],
    /// Cells in `i` (tau1) major, `k` (modularity) minor order.
    pub cells: Vec<LeadershipCell>,
    /// Filter winners evaluated at the data points themselves.
    pub win_counts: BTreeMap<Label, usize>,
    /// Face-connected regions of grid cells sharing a winner.
    pub components: BTreeMap<Label, usize>,
}

impl LeadershipMap {
    pub fn cell(&self, i: usize, j: usize, k: usize) -> &LeadershipCell {
        &self.cells[(i * self.resolution + j) * self.resolution + k]
    }

    /// Cell centre in raw feature units.
    pub fn raw_point(&self, cell: &LeadershipCell) -> [f64; 3] {
        std::array::from_fn(|a| cell.point[a] * self.scales[a])
    }

    pub fn total_components(&self) -> usize {
        self.components.values().sum()
    }
}

fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn axis(lo: f64, hi: f64, resolution: usize, i: usize) -> f64 {
    if resolution == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * i as f64 / (resolution - 1) as f64
    }
}

fn count_components(cells: &[LeadershipCell], r: usize) -> BTreeMap<Label, usize> {
    let idx = |i: usize, j: usize, k: usize| (i * r + j) * r + k;
    let mut seen = vec![false; cells.len()];
    let mut out = BTreeMap::new();
    for start in 0..cells.len() {
        let Some(label) = cells[start].winner else {
            continue;
        };
        if seen[start] {
            continue;
        }
        *out.entry(label).or_insert(0) += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            let (i, j, k) = (c / (r * r), (c / r) % r, c % r);
            let mut push = |i: usize, j: usize, k: usize| {
                let nb = idx(i, j, k);
                if !seen[nb] && cells[nb].winner == Some(label) {
                    seen[nb] = true;
                    stack.push(nb);
                }
            };
            if i > 0 {
                push(i - 1, j, k);
            }
            if i + 1 < r {
                push(i + 1, j, k);
            }
            if j > 0 {
                push(i, j - 1, k);
            }
            if j + 1 < r {
                push(i, j + 1, k);
            }
            if k > 0 {
                push(i, j, k - 1);
            }
            if k + 1 < r {
                push(i, j, k + 1);
            }
        }
    }
    out
}

/// Normalizes each feature by its standard deviation and evaluates the
/// filter on a `resolution^3` grid spanning the data's bounding box.
pub fn leadership_map(
    data: &[DataPoint],
    labels: &LabelSet,
    resolution: usize,
    config: &FilterConfig,
) -> Result<LeadershipMap> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if resolution == 0 {
        return Err(Error::InvalidParams("grid resolution must be positive".into()));
    }
    let mut sorted: Vec<&DataPoint> = data.iter().collect();
    sorted.sort_by(|a, b| a.graph_id.cmp(&b.graph_id));

    let scales: [f64; 3] = std::array::from_fn(|a| {
        let s = population_std(sorted.iter().map(|p| p.point[a]));
        if s > 0.0 {
            s
        } else {
            1.0
        }
    });
    let normalized: Vec<DataPoint> = sorted
        .iter()
        .map(|p| DataPoint {
            graph_id: p.graph_id.clone(),
            point: std::array::from_fn(|a| p.point[a] / scales[a]),
            scores: p.scores.clone(),
        })
        .collect();
    let bounds: [(f64, f64); 3] = std::array::from_fn(|a| {
        normalized.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.point[a]), hi.max(p.point[a]))
        })
    });

    let r = resolution;
    let mut cells = Vec::with_capacity(r * r * r);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let point = [
                    axis(bounds[0].0, bounds[0].1, r, i),
                    axis(bounds[1].0, bounds[1].1, r, j),
                    axis(bounds[2].0, bounds[2].1, r, k),
                ];
                cells.push(gaussian_filter_winner(point, &normalized, labels, config));
            }
        }
    }

    let mut win_counts = BTreeMap::new();
    for p in &normalized {
        if let Some(w) = gaussian_filter_winner(p.point, &normalized, labels, config).winner {
            *win_counts.entry(w).or_insert(0) += 1;
        }
    }
    let components = count_components(&cells, r);
    Ok(LeadershipMap {
        resolution: r,
        scales,
        bounds,
        cells,
        win_counts,
        components,
    })
}

/// Total winner regions for each sigma; fewer regions means smoother zones.
pub fn sigma_diagnostics(
    data: &[DataPoint],
    labels: &LabelSet,
    resolution: usize,
    sigmas: &[f64],
) -> Result<Vec<(f64, usize)>> {
    sigmas
        .iter()
        .map(|&s| {
            let map = leadership_map(data, labels, resolution, &FilterConfig::new(s)?)?;
            Ok((s, map.total_components()))
        })
        .collect()
}
