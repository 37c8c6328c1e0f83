//! Builds every measure in the catalog on a small graph at the middle of the
//! parameter grid and prints a corner of each kernel.

use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::measures::{build_measure, map_param, BuildOptions, MeasureId};

fn main() -> graph_measures::Result<()> {
    // A 6-cycle with one chord.
    let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)];
    let graph = Graph::new(6, edges, vec![0, 0, 0, 1, 1, 1])?;
    let m = derive_matrices(&graph)?;
    println!("spectral radius {:.4}, volume {}", m.spectral_radius, m.volume);

    for id in MeasureId::all() {
        let param = map_param(id, 0.5, &m);
        match build_measure(id, 0.5, &m, BuildOptions::default()) {
            Ok(k) => println!(
                "{:>9} {:?}={:<8.4} K00={:>9.4} K01={:>9.4} K03={:>9.4}",
                id.to_string(),
                param.kind,
                param.value,
                k.values[(0, 0)],
                k.values[(0, 1)],
                k.values[(0, 3)]
            ),
            Err(e) => println!("{:>9} failed: {e}", id.to_string()),
        }
    }
    Ok(())
}
