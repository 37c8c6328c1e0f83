//! Runs the parameter sweep for a few measures over a handful of generated
//! graphs and prints the best ARI and best grid point per pair.

use graph_measures::bench::{self, BenchConfig, GraphRecord};
use graph_measures::lfr::{generate_lfr, sample_lfr_config};
use graph_measures::measures::MeasureId;

fn main() -> graph_measures::Result<()> {
    let dir = std::env::temp_dir().join("gm-benchmark-example");
    std::fs::create_dir_all(&dir)?;
    let mut dataset = Vec::new();
    let mut seed = 0;
    while dataset.len() < 4 {
        let config = sample_lfr_config(20..=60, seed);
        seed += 1;
        let Ok(g) = generate_lfr(&config) else { continue };
        let graph_id = format!("g{:05}", dataset.len());
        let path = bench::graph_path(&dir, &graph_id);
        g.graph.write(&path)?;
        dataset.push(GraphRecord {
            features: bench::compute_features(&g.graph, &g.metadata.params)?,
            params: g.metadata.params,
            graph_id,
            path,
        });
    }

    let measures = MeasureId::parse_list("SCCT,RSP,For,logComm")?;
    let outcome = bench::run_benchmark(&dataset, &measures, &BenchConfig::default(), 2, None)?;
    for r in &outcome.records {
        println!(
            "{} {:>8} best ARI {:.3} at x={:.3} ({} failed builds)",
            r.graph_id,
            r.measure.to_string(),
            r.best_ari,
            r.best_x,
            r.failures
        );
    }
    Ok(())
}
