//! Commute-time distances from the Laplacian pseudoinverse, compared with
//! hop counts. On a tree they agree up to the graph volume; a cycle shortens
//! them.

use graph_measures::graph::{derive_matrices, Graph};
use graph_measures::measures::commute_time_kernel;

fn show(name: &str, graph: &Graph) -> graph_measures::Result<()> {
    let m = derive_matrices(graph)?;
    let ct = commute_time_kernel(&m);
    println!("{name} (volume {}):", m.volume);
    for i in 0..graph.n() {
        let row: Vec<String> = (0..graph.n())
            .map(|j| format!("{:6.2}/{}", ct.distance[(i, j)] / m.volume, m.shortest_paths[(i, j)]))
            .collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}

fn main() -> graph_measures::Result<()> {
    println!("resistance / hops");
    show("star", &Graph::new(4, vec![(0, 1), (0, 2), (0, 3)], vec![0; 4])?)?;
    show("4-cycle", &Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], vec![0; 4])?)?;
    Ok(())
}
