//! Growth indicator along a direction from shrinking tubes and cones.

use spectra_census::census::CensusOptions;
use spectra_census::fitting::{growth_indicator_ladder, LadderOptions, LadderSource};
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
    let v = [0.68, 0.73f64];
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let v = [v[0] / n, v[1] / n];
    let grid: Vec<f64> = (1..=160).map(|i| i as f64 * 0.25).collect();
    let opts = LadderOptions {
        census: CensusOptions::default(),
        window: None,
    };
    for source in LadderSource::ALL {
        let l = growth_indicator_ladder(&rep, &v, &[2.0, 1.0, 0.5], &grid, 11, source, &opts).unwrap();
        let rungs: Vec<String> = l.delta_hats.iter().map(|d| format!("{d:.4}")).collect();
        println!("{:>12}: {} -> {:.4}", source.as_str(), rungs.join(" "), l.extrapolated);
    }
}
