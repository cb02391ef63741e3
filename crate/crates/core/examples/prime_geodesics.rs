//! Counts primitive closed geodesics of a Schottky surface and fits the
//! growth `N(T) ~ C·e^{δT}/T`.

use spectra_census::census::{census_jordan, CensusOptions};
use spectra_census::fitting::{default_window, fit_growth};
use spectra_census::regions::RegionFamily;
use spectra_census::reps::{schottky_pair, SchottkyParams};

fn main() {
    let rep = schottky_pair(&SchottkyParams::real(3.0, 2.5)).unwrap();
    let grid: Vec<f64> = (1..=120).map(|i| i as f64 * 0.25).collect();
    let out = census_jordan(&rep, &RegionFamily::Ball, &grid, 12, true, &CensusOptions::default()).unwrap();
    let s = out.series;
    println!("trusted up to T = {:.2} (c_min = {:.4})", s.t_trust, s.c_min_hat);
    for i in (0..s.trusted_len()).step_by(8) {
        println!("T = {:>6.2}  N = {}", s.t_grid[i], s.counts[i]);
    }
    let fit = fit_growth(&s, Some(default_window(&s)), Some(1.0)).unwrap();
    println!("delta = {:.4} over {:?} ({} points)", fit.delta_hat, fit.window, fit.n_points);
}
