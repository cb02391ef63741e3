//! Critical exponent of each factor, estimated from Cartan counts, next to
//! the exact rate of a word-length toy model.

use spectra_census::census::{CensusOptions, WordMetric};
use spectra_census::fitting::factor_critical_exponent;
use spectra_census::reps::load_representation;

fn main() {
    let rep = load_representation(&serde_json::json!({
        "rank": 2,
        "factors": [
            {"builder": "schottky_pair", "stretch": 3.0, "stretch_b": 5.0, "separation": 3.0},
            {"builder": "schottky_pair", "stretch": 5.0, "stretch_b": 3.0, "separation": 3.0}
        ]
    }))
    .unwrap();
    let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.25).collect();
    let opts = CensusOptions::default();
    for i in 0..2 {
        let fit = factor_critical_exponent(&rep, i, &grid, 11, &opts).unwrap();
        println!("factor {}: delta {:.4} on {:?}", i + 1, fit.delta_hat, fit.window);
    }
    let toy = WordMetric::uniform(2, 1.0);
    let grid: Vec<f64> = (1..=12).map(|i| i as f64).collect();
    let fit = factor_critical_exponent(&toy, 0, &grid, 12, &opts).unwrap();
    println!("word metric: delta {:.4} (exact {:.4})", fit.delta_hat, 3f64.ln());
}
