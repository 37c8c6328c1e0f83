//! Randomized shortest path and free energy distances on a path graph as the
//! inverse temperature grows: RSP tends to the hop count, FE approaches it
//! from above at rate 1/beta.

use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::measures::RspIntermediate;

fn main() -> graph_measures::Result<()> {
    let n = 4;
    let graph = Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect(), vec![0; n])?;
    let m = derive_matrices(&graph)?;
    println!("beta      RSP(0,3)   FE(0,3)    hops");
    for beta in [0.01, 0.1, 1.0, 5.0, 20.0, 100.0] {
        let rsp = RspIntermediate::new(beta, &m)?;
        println!(
            "{beta:<8} {:<10.5} {:<10.5} {}",
            rsp.rsp_distance()[(0, 3)],
            rsp.fe_distance()[(0, 3)],
            m.shortest_paths[(0, 3)]
        );
    }
    Ok(())
}
