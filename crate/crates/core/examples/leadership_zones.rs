//! Leadership zones: Gaussian-smoothed winners over the (tau1, mean degree,
//! modularity) space for two measures that each lead on one side of a
//! modularity threshold.

use graph_measures::analysis::{leadership_map, DataPoint, FilterConfig, LabelSet};
use graph_measures::measures::{Family, MeasureId};
use rand::Rng;

fn main() -> graph_measures::Result<()> {
    let a = MeasureId::plain(Family::SCCT);
    let b = MeasureId::plain(Family::RSP);
    let labels = LabelSet::new(&[a, b]);
    let mut rng = graph_measures::seed::rng(4);
    let data: Vec<DataPoint> = (0..300)
        .map(|i| {
            let q: f64 = rng.random_range(-0.4..0.8);
            let (sa, sb) = if q < 0.2 { (0.9, 0.5) } else { (0.5, 0.9) };
            DataPoint {
                graph_id: format!("g{i:05}"),
                point: [rng.random_range(1.0..4.0), rng.random_range(2.0..40.0), q],
                scores: vec![0.0, sa, sb],
            }
        })
        .collect();

    let map = leadership_map(&data, &labels, 10, &FilterConfig::default())?;
    for (label, wins) in &map.win_counts {
        let regions = map.components.get(label).copied().unwrap_or(0);
        println!("{label}: leads at {wins} graphs, {regions} region(s)");
    }
    println!("slice at middle tau1 and degree, by modularity:");
    for k in 0..map.resolution {
        let cell = map.cell(5, 5, k);
        let raw = map.raw_point(cell);
        let winner = cell.winner.map_or("none".to_string(), |w| w.to_string());
        println!("  Q={:+.3} support {:3} -> {winner}", raw[2], cell.support);
    }
    Ok(())
}
