//! Jordan and Cartan projections of a few matrices, and the power law
//! `ℓ(gⁿ) = n·ℓ(g)` surviving entries far beyond `f64` range.

use num_complex::Complex64;
use spectra_census::algebra::{Field, RenormMatrix, DEFAULT_TOL};

fn main() {
    let g = RenormMatrix::from_real([[2.0, 1.0], [1.0, 1.0]]);
    let h = RenormMatrix::from_complex(
        [
            Complex64::from_polar(3.0, 0.4),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0 / 3.0, -0.4),
        ],
        Field::Complex,
    );
    for (name, m) in [("fibonacci", &g), ("twisted", &h)] {
        let lox = m.loxodata(DEFAULT_TOL).unwrap();
        println!(
            "{name:>10}: jordan {:.6}  cartan {:.6}  holonomy {:?}",
            lox.jordan,
            m.cartan_length(),
            lox.holonomy_angle
        );
    }
    let l = g.jordan_length(DEFAULT_TOL).unwrap();
    for n in [10u32, 1000, 100_000] {
        let p = g.pow(n);
        println!(
            "n = {n:>6}: jordan/n = {:.12} (expect {l:.12}), log2 scale {}",
            p.jordan_length(DEFAULT_TOL).unwrap() / n as f64,
            p.exp2()
        );
    }
}
