#![allow(dead_code)]

//! Independent oracles shared by the integration tests. Nothing here calls
//! the enumeration or renormalization code it is used to check.

use std::collections::BTreeSet;

use num_complex::Complex64;
use spectra_census::reps::{load_representation, Representation};

/// Every word of length `n` over `2k` letter codes, reduced or not.
pub fn all_words(k: usize, n: usize) -> Vec<Vec<u8>> {
    let a = 2 * k as u64;
    let total = a.pow(n as u32);
    (0..total)
        .map(|mut x| {
            let mut w = vec![0u8; n];
            for slot in w.iter_mut().rev() {
                *slot = (x % a) as u8;
                x /= a;
            }
            w
        })
        .collect()
}

pub fn is_reduced(w: &[u8]) -> bool {
    w.windows(2).all(|p| p[0] ^ 1 != p[1])
}

pub fn is_cyclically_reduced(w: &[u8]) -> bool {
    is_reduced(w) && (w.len() <= 1 || w[w.len() - 1] ^ 1 != w[0])
}

pub fn min_rotation(w: &[u8]) -> Vec<u8> {
    (0..w.len())
        .map(|i| [&w[i..], &w[..i]].concat())
        .min()
        .unwrap_or_default()
}

/// Conjugacy classes with cyclically reduced length exactly `n`, by
/// generating every word and deduplicating least rotations.
pub fn brute_force_classes(k: usize, n: usize) -> BTreeSet<Vec<u8>> {
    all_words(k, n)
        .into_iter()
        .filter(|w| is_cyclically_reduced(w))
        .map(|w| min_rotation(&w))
        .collect()
}

pub fn smallest_period(w: &[u8]) -> usize {
    (1..=w.len())
        .find(|&p| w.len() % p == 0 && (0..w.len()).all(|i| w[i] == w[i % p]))
        .unwrap()
}

pub type M2 = [Complex64; 4];

pub fn mat_mul(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub fn mat_inv(a: &M2) -> M2 {
    let det = a[0] * a[3] - a[1] * a[2];
    [a[3] / det, -a[1] / det, -a[2] / det, a[0] / det]
}

/// Plain product of generator matrices, with no rescaling.
pub fn naive_product(gens: &[M2], w: &[u8]) -> M2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = [one, zero, zero, one];
    for &c in w {
        let g = gens[(c / 2) as usize];
        let m = if c % 2 == 1 { mat_inv(&g) } else { g };
        acc = mat_mul(&acc, &m);
    }
    acc
}

/// `2·log|λ_max|` from the characteristic polynomial.
pub fn naive_jordan(m: &M2) -> f64 {
    let tr = m[0] + m[3];
    let disc = (tr * tr - 4.0).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    2.0 * l1.norm().max(l2.norm()).ln()
}

/// `2·log σ₁` from the singular values of `m`.
pub fn naive_cartan(m: &M2) -> f64 {
    let f2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let det = (m[0] * m[3] - m[1] * m[2]).norm();
    let s1 = ((f2 + (f2 * f2 - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
    2.0 * s1.ln()
}

/// Generator matrices of each factor, read back from the representation.
pub fn generators(rep: &Representation) -> Vec<Vec<M2>> {
    rep.factors()
        .iter()
        .map(|f| f.generators().iter().map(|g| g.true_entries()).collect())
        .collect()
}

/// Two real pairs with stretches 3 and 5, roles of the generators swapped
/// between the factors, separation 3.
pub fn swapped_pair() -> Representation {
    load_representation(&serde_json::json!({
        "rank": 2,
        "factors": [
            {"builder": "schottky_pair", "stretch": 3.0, "stretch_b": 5.0, "separation": 3.0},
            {"builder": "schottky_pair", "stretch": 5.0, "stretch_b": 3.0, "separation": 3.0}
        ]
    }))
    .unwrap()
}

/// A pair joined with its own conjugate.
pub fn self_joining() -> Representation {
    load_representation(&serde_json::json!({
        "rank": 2,
        "factors": [
            {"builder": "schottky_pair", "stretch": 4.0, "separation": 3.0},
            {"builder": "schottky_pair", "stretch": 4.0, "separation": 3.0,
             "conjugate_by": [[2.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]}
        ]
    }))
    .unwrap()
}

pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}
