//! `gm` command line: `generate`, `bench`, `analyze`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, FilterConfig, Label, LabelSet, Subset};
use crate::bench::{self, BenchConfig, FEATURE_NAMES};
use crate::clustering::Criterion;
use crate::error::{Error, Result};
use crate::lfr;
use crate::measures::{BuildOptions, MeasureId, SigmoidSign};
use crate::seed;

/// Generated configs tried per requested graph before giving up.
const CONFIGS_PER_GRAPH: usize = 50;

#[derive(Debug, Parser)]
#[command(name = "gm", version, about = "Graph measure benchmark toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample LFR configs and write accepted graphs with metadata.
    Generate(GenerateArgs),
    /// Sweep measures over a graph directory and score with ARI.
    Bench(BenchArgs),
    /// Leaderboards, LDA or leadership zones from benchmark results.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, clap::Args, Serialize)]
pub struct GenerateArgs {
    /// Number of accepted graphs to write.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Global seed; GM_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 11)]
    pub n_min: usize,
    #[arg(long, default_value_t = 1499)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    Inertia,
    Modularity,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Inertia => Criterion::Inertia,
            CriterionArg::Modularity => Criterion::Modularity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Negative,
    Positive,
}

impl From<SignArg> for SigmoidSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Negative => SigmoidSign::Negative,
            SignArg::Positive => SigmoidSign::Positive,
        }
    }
}

#[derive(Debug, clap::Args, Serialize)]
pub struct BenchArgs {
    /// Directory of `<id>.graph` files with `<id>.json` sidecars.
    #[arg(long)]
    pub graphs: PathBuf,
    /// `all` or a comma-separated list such as `SCCT,RSP,logComm`.
    #[arg(long, default_value = "all")]
    pub measures: String,
    #[arg(long, value_enum, default_value_t = CriterionArg::Inertia)]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    /// Results CSV; existing records are reused.
    #[arg(long)]
    pub out: PathBuf,
    /// Features CSV; defaults to `features.csv` next to `--out`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sign inside the SCT/SCCT sigmoid.
    #[arg(long, value_enum, default_value_t = SignArg::Positive)]
    pub sigmoid_sign: SignArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Leaderboard,
    Lda,
    Zones,
}

fn positive_sigma(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    FilterConfig::new(v).map(|c| c.sigma).map_err(|e| e.to_string())
}

#[derive(Debug, clap::Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, default_value_t = analysis::DEFAULT_SIGMA, value_parser = positive_sigma, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = analysis::DEFAULT_RESOLUTION, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub resolution: usize,
    /// Also write PNG slices of the zones.
    #[arg(long)]
    pub plots: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Seed from GM_SEED when set, else the flag.
fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("GM_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("GM_SEED is not an integer: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct RunConfig<'a, A> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    args: &'a A,
}

fn write_run_config<A: Serialize>(path: &Path, command: &str, seed: u64, args: &A) -> Result<()> {
    write_json(
        path,
        &RunConfig {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            args,
        },
    )
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<usize> {
    let seed = resolve_seed(args.seed)?;
    if args.n_min < 10 || args.n_min > args.n_max {
        return Err(Error::InvalidParams(format!(
            "need 10 <= n_min <= n_max, got {}..={}",
            args.n_min, args.n_max
        )));
    }
    fs::create_dir_all(&args.out)?;
    let count = args.count as usize;
    let mut failures = csv::Writer::from_writer(Vec::new());
    failures.write_record(["config", "n", "tau1", "tau2", "mu", "avg_degree", "seed", "reason"])?;
    let mut accepted = 0;
    let mut tried = 0;
    while accepted < count && tried < count * CONFIGS_PER_GRAPH {
        let config = lfr::sample_lfr_config(args.n_min..=args.n_max, seed::mix(seed, tried as u64));
        match lfr::generate_lfr(&config) {
            Ok(g) => {
                let id = format!("g{accepted:05}");
                g.graph.write(&bench::graph_path(&args.out, &id))?;
                write_json(&bench::metadata_path(&args.out, &id), &g.metadata)?;
                accepted += 1;
            }
            Err(Error::GenerationFailed { reason, .. }) => {
                let p = &config.params;
                failures.write_record([
                    tried.to_string(),
                    p.n.to_string(),
                    p.tau1.to_string(),
                    p.tau2.to_string(),
                    p.mu.to_string(),
                    p.avg_degree.to_string(),
                    config.seed.to_string(),
                    reason,
                ])?;
            }
            Err(e) => return Err(e),
        }
        tried += 1;
    }
    let bytes = failures.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    fs::write(args.out.join("failures.csv"), bytes)?;
    write_run_config(&args.out.join("run_config.json"), "generate", seed, args)?;
    eprintln!("accepted {accepted} of {tried} sampled configs");
    if accepted == 0 {
        return Err(Error::GenerationFailed {
            attempts: tried,
            reason: "no config produced an accepted graph".into(),
        });
    }
    Ok(accepted)
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().unwrap_or(Path::new(".")).join(name)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<bench::BenchOutcome> {
    let seed = resolve_seed(args.seed)?;
    let measures = MeasureId::parse_list(&args.measures)?;
    let dataset = bench::load_dataset(&args.graphs)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let features = args
        .features
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "features.csv"));
    bench::write_features(&features, &dataset)?;
    let config = BenchConfig {
        criterion: args.criterion.into(),
        base_seed: seed,
        options: BuildOptions {
            sigmoid_sign: args.sigmoid_sign.into(),
        },
    };
    let outcome = bench::run_benchmark(&dataset, &measures, &config, args.workers as usize, Some(&args.out))?;
    write_run_config(&sibling(&args.out, "bench_run_config.json"), "bench", seed, args)?;
    eprintln!(
        "computed {} records, skipped {} existing",
        outcome.computed, outcome.skipped
    );
    for (g, e) in &outcome.errors {
        eprintln!("error: {g}: {e}");
    }
    Ok(outcome)
}

fn write_leaderboard(path: &Path, rows: &[analysis::LeaderboardRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["measure", "mean_rank", "wins_pct", "mean_ari"])?;
    for r in rows {
        w.write_record([
            r.measure.to_string(),
            r.mean_rank.to_string(),
            r.wins_pct.to_string(),
            r.mean_ari.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Measures ordered by the all-graphs leaderboard; the filter's tie order.
fn priority(records: &[bench::EvalRecord], features: &BTreeMap<String, bench::Features>) -> Result<Vec<MeasureId>> {
    Ok(analysis::leaderboard(records, features, Subset::All)?
        .into_iter()
        .map(|r| r.measure)
        .collect())
}

fn check_consistent(records: &[bench::EvalRecord], features: &BTreeMap<String, bench::Features>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(r) = records.iter().find(|r| !features.contains_key(&r.graph_id)) {
        return Err(Error::Schema(format!("graph `{}` has results but no features", r.graph_id)));
    }
    Ok(())
}

fn analyze_lda(
    records: &[bench::EvalRecord],
    features: &BTreeMap<String, bench::Features>,
    out: &Path,
) -> Result<()> {
    let labels = LabelSet::new(&priority(records, features)?);
    let winners = analysis::graph_winners(records, &labels)?;
    let mut class_sizes: BTreeMap<Label, usize> = BTreeMap::new();
    for w in winners.values() {
        *class_sizes.entry(*w).or_default() += 1;
    }
    let kept: Vec<Label> = class_sizes.iter().filter(|(_, &c)| c >= 2).map(|(l, _)| *l).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (g, w) in &winners {
        if let Ok(class) = kept.binary_search(w) {
            x.push(features[g].full().to_vec());
            y.push(class);
        }
    }
    let result = analysis::lda_importance(&x, &y)?;

    let mut w = csv::Writer::from_path(out.join("lda.csv"))?;
    let mut header = vec!["component".to_string(), "explained_variance_ratio".to_string()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for (c, (ratio, contrib)) in result
        .explained_variance_ratio
        .iter()
        .zip(&result.feature_contributions)
        .enumerate()
    {
        let mut row = vec![c.to_string(), ratio.to_string()];
        row.extend(contrib.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut report = String::new();
    report.push_str(&format!("samples: {}\nclasses: {}\n", x.len(), kept.len()));
    for (l, c) in &class_sizes {
        let note = if *c < 2 { " (dropped)" } else { "" };
        report.push_str(&format!("  {l}: {c}{note}\n"));
    }
    for (c, (ratio, dir)) in result
        .explained_variance_ratio
        .iter()
        .zip(&result.component_directions)
        .enumerate()
    {
        report.push_str(&format!("component {c}: explained {ratio:.4}\n"));
        for (name, v) in FEATURE_NAMES.iter().zip(dir) {
            report.push_str(&format!("  {name:>16} {v:+.4}\n"));
        }
    }
    fs::write(out.join("lda_report.txt"), report)?;
    Ok(())
}

const PALETTE: [[u8; 3]; 12] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
    [0, 0, 0],
    [255, 215, 0],
];

fn colour(labels: &LabelSet, winner: Option<Label>) -> [u8; 3] {
    match winner.and_then(|w| labels.labels.iter().position(|l| *l == w)) {
        Some(i) => PALETTE[i % PALETTE.len()],
        None => [255, 255, 255],
    }
}

fn write_slices(map: &analysis::LeadershipMap, labels: &LabelSet, out: &Path) -> Result<()> {
    const CELL: u32 = 12;
    let r = map.resolution;
    let dir = out.join("slices");
    fs::create_dir_all(&dir)?;
    let mut picks: Vec<usize> = vec![0, r / 4, r / 2, (3 * r) / 4, r - 1];
    picks.dedup();
    for (axis, name) in analysis::REDUCED_FEATURES.iter().enumerate() {
        for &s in &picks {
            let side = r as u32 * CELL;
            let img = image::RgbImage::from_fn(side, side, |px, py| {
                let a = (px / CELL) as usize;
                // Image rows grow downward; flip so the second axis rises.
                let b = r - 1 - (py / CELL) as usize;
                let cell = match axis {
                    0 => map.cell(s, a, b),
                    1 => map.cell(a, s, b),
                    _ => map.cell(a, b, s),
                };
                image::Rgb(colour(labels, cell.winner))
            });
            img.save(dir.join(format!("{name}_{s:02}.png")))
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
    }
    let mut legend = csv::Writer::from_path(dir.join("legend.csv"))?;
    legend.write_record(["label", "rgb"])?;
    for (i, l) in labels.labels.iter().enumerate() {
        let [r, g, b] = PALETTE[i % PALETTE.len()];
        legend.write_record([l.to_string(), format!("#{r:02x}{g:02x}{b:02x}")])?;
    }
    legend.flush()?;
    Ok(())
}

fn analyze_zones(
    records: &[bench::EvalRecord],
    features: &BTreeMap<String, bench::Features>,
    args: &AnalyzeArgs,
) -> Result<()> {
    let labels = LabelSet::new(&priority(records, features)?);
    let data = analysis::data_points(records, features, &labels)?;
    let config = FilterConfig::new(args.sigma)?;
    let map = analysis::leadership_map(&data, &labels, args.resolution, &config)?;

    let mut w = csv::Writer::from_path(args.out.join("zones.csv"))?;
    w.write_record(["tau1", "avg_degree", "modularity", "winner", "support"])?;
    for cell in &map.cells {
        let p = map.raw_point(cell);
        w.write_record([
            p[0].to_string(),
            p[1].to_string(),
            p[2].to_string(),
            cell.winner.map_or("none".to_string(), |l| l.to_string()),
            cell.support.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(args.out.join("zone_wins.csv"))?;
    w.write_record(["label", "wins", "components"])?;
    for l in &labels.labels {
        let wins = map.win_counts.get(l).copied().unwrap_or(0);
        let comps = map.components.get(l).copied().unwrap_or(0);
        if wins > 0 || comps > 0 {
            w.write_record([l.to_string(), wins.to_string(), comps.to_string()])?;
        }
    }
    w.flush()?;

    let sigmas: Vec<f64> = (1..=10).map(|i| i as f64 * 0.2).collect();
    let diag = analysis::sigma_diagnostics(&data, &labels, args.resolution, &sigmas)?;
    let mut w = csv::Writer::from_path(args.out.join("sigma_diagnostics.csv"))?;
    w.write_record(["sigma", "components"])?;
    for (s, c) in diag {
        w.write_record([s.to_string(), c.to_string()])?;
    }
    w.flush()?;

    if args.plots {
        write_slices(&map, &labels, &args.out)?;
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let records = bench::read_results(&args.results)?;
    let features = bench::read_features(&args.features)?;
    check_consistent(&records, &features)?;
    fs::create_dir_all(&args.out)?;
    match args.mode {
        Mode::Leaderboard => {
            for subset in [Subset::Associative, Subset::Dissociative, Subset::All] {
                let rows = analysis::leaderboard(&records, &features, subset)?;
                write_leaderboard(&args.out.join(format!("leaderboard_{}.csv", subset.name())), &rows)?;
            }
        }
        Mode::Lda => analyze_lda(&records, &features, &args.out)?,
        Mode::Zones => analyze_zones(&records, &features, args)?,
    }
    write_run_config(&args.out.join("run_config.json"), "analyze", 0, args)?;
    Ok(())
}

/// Parses arguments, runs the command, and maps errors to exit code 1.
/// Usage errors exit with 2 from inside clap.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a).map(|_| ()),
        Command::Bench(a) => cmd_bench(a).map(|_| ()),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(1)
        }
    }
}
