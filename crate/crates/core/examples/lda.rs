//! Feature importance by linear discriminant analysis: the winning class is
//! driven by modularity, so the first discriminant loads on it.

use graph_measures::analysis::lda_importance;
use graph_measures::bench::FEATURE_NAMES;
use rand::Rng;

fn main() -> graph_measures::Result<()> {
    let mut rng = graph_measures::seed::rng(9);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..300 {
        let row: Vec<f64> = vec![
            rng.random_range(11.0..1500.0),
            rng.random_range(1.0..4.0),
            rng.random_range(1.0..2.0),
            rng.random_range(0.5..4.0),
            rng.random_range(-0.4..0.9),
        ];
        labels.push(if row[4] < 0.0 { 0 } else if row[4] < 0.4 { 1 } else { 2 });
        features.push(row);
    }
    let lda = lda_importance(&features, &labels)?;
    for (c, ratio) in lda.explained_variance_ratio.iter().enumerate() {
        println!("component {c}: {:.1}% of discriminant variance", 100.0 * ratio);
        for (name, w) in FEATURE_NAMES.iter().zip(&lda.feature_contributions[c]) {
            println!("  {name:>15} {w:+.3}");
        }
    }
    Ok(())
}
