//! Log-ratio of element counts to class counts in a tube.

use spectra_census::census::{census_cartan, census_jordan, CensusOptions};
use spectra_census::fitting::jordan_cartan_ratio;
use spectra_census::regions::{normalize, RegionFamily, TubeSpec};
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
    let tube = RegionFamily::Tube(TubeSpec::new(normalize(&[0.6815, 0.7318]).unwrap(), 1.0, None).unwrap());
    let grid: Vec<f64> = (1..=160).map(|i| i as f64 * 0.25).collect();
    let opts = CensusOptions::default();
    let c = census_cartan(&rep, &tube, &grid, 11, &opts).unwrap().series;
    let j = census_jordan(&rep, &tube, &grid, 11, false, &opts).unwrap().series;
    let r = jordan_cartan_ratio(&c, &j, None).unwrap();
    println!(
        "log(N_cartan/N_jordan) ~ {:.4}·T + {:.4}  (R² {:.3}, {} points)",
        r.slope, r.intercept, r.r_squared, r.n_points
    );
}
