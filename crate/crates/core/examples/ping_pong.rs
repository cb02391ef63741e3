//! Ping-pong validation of Schottky pairs, passing and failing.

use spectra_census::algebra::DEFAULT_TOL;
use spectra_census::reps::{schottky_pair, validate_all, SchottkyParams};

fn main() {
    for (stretch, separation) in [(4.0, 3.0), (3.0, 2.5), (2.0, 1.0), (1.2, 0.1)] {
        let params = SchottkyParams::real(stretch, separation);
        match schottky_pair(&params) {
            Ok(rep) => {
                let reports = validate_all(&rep, DEFAULT_TOL).unwrap();
                println!("stretch {stretch}, separation {separation}: margin {:.4} rad", reports[0].margin);
            }
            Err(e) => println!("stretch {stretch}, separation {separation}: rejected ({e})"),
        }
    }
}
