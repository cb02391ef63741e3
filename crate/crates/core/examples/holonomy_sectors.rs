//! Splits box counts of a loxodromic pair by holonomy sector.

use spectra_census::census::{census_box, equal_sectors, CensusOptions};
use spectra_census::reps::load_representation;

fn main() {
    let rep = load_representation(&serde_json::json!({
        "builder": "schottky_pair", "stretch": 3.0, "separation": 2.5,
        "field": "complex", "twist": 0.7, "twist_b": 2.1
    }))
    .unwrap();
    let edges = equal_sectors(6);
    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.5).collect();
    let out = census_box(&rep, &[1.0], &[1.0], &grid, 10, Some(&edges), &CensusOptions::default()).unwrap();
    let rows = out.holonomy.unwrap();
    for i in (0..out.series.trusted_len()).step_by(4) {
        println!("T = {:>5.1}  total {:>4}  sectors {:?}", grid[i], out.series.counts[i], rows[i][0].counts);
    }
}
