//! Generates LFR graphs: one from explicit parameters and a few from the
//! sampled configuration space, with the realized mixing and degree.

use graph_measures::lfr::{config_from_params, generate_lfr, sample_lfr_config, LfrParams};
use graph_measures::scoring::modularity;

fn main() -> graph_measures::Result<()> {
    let params = LfrParams::new(200, 2.5, 1.5, 0.2, 10.0);
    let g = generate_lfr(&config_from_params(params, 42))?;
    println!(
        "explicit: n={} communities={} mixing={:.3} mean degree={:.2} attempts={} Q={:.3}",
        g.graph.n(),
        g.metadata.communities,
        g.metadata.realized_mixing,
        g.metadata.realized_mean_degree,
        g.metadata.attempts,
        modularity(&g.graph, g.graph.labels())?
    );

    for seed in 0..8 {
        let config = sample_lfr_config(11..=200, seed);
        let p = config.params;
        match generate_lfr(&config) {
            Ok(g) => println!(
                "seed {seed}: n={} tau1={:.2} tau2={:.2} mu={:.2} -> mixing {:.3}, {} communities",
                p.n, p.tau1, p.tau2, p.mu, g.metadata.realized_mixing, g.metadata.communities
            ),
            Err(e) => println!("seed {seed}: n={} mu={:.2} rejected: {e}", p.n, p.mu),
        }
    }
    Ok(())
}
