//! Counts classes whose Jordan vector falls in a box moving along a
//! direction, and compares the rate with the factor exponents.

use spectra_census::census::CensusOptions;
use spectra_census::cli::correlate;
use spectra_census::fitting::DEFAULT_BOUND_TOL;
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
    let grid: Vec<f64> = (1..=160).map(|i| i as f64 * 0.25).collect();
    let out = correlate(&rep, None, Some(vec![1.0, 1.0]), &grid, 11, None, DEFAULT_BOUND_TOL, &CensusOptions::default())
        .unwrap();
    println!("direction {:?}", out.direction);
    println!("box rate {:.4}", out.fit.delta_hat);
    for (i, f) in out.factor_fits.iter().enumerate() {
        println!("factor {} exponent {:.4}", i + 1, f.delta_hat);
    }
    println!(
        "slack to min bound {:.4}, to mean bound {:.4}",
        out.bounds.slack_min, out.bounds.slack_mean
    );
}
