mod common;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use spectra_census::algebra::{RenormMatrix, DEFAULT_TOL};
use spectra_census::group::{Letter, Word};
use spectra_census::reps::load_representation;

use common::{generators, naive_cartan, naive_jordan, naive_product, swapped_pair};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn big_ln(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(64);
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn fibonacci_powers_match_big_integers() {
    let g = RenormMatrix::from_real([[2.0, 1.0], [1.0, 1.0]]);
    for n in [1u32, 7, 30, 100, 500, 2000] {
        // [[2,1],[1,1]]^n = [[F(2n+1), F(2n)], [F(2n), F(2n-1)]]
        let (mut a, mut b) = (BigUint::zero(), BigUint::one());
        for _ in 0..2 * n - 1 {
            let c = &a + &b;
            a = b;
            b = c;
        }
        let (f_lo, f_mid) = (a, b);
        let f_hi = &f_lo + &f_mid;
        let frob = &f_hi * &f_hi + BigUint::from(2u8) * &f_mid * &f_mid + &f_lo * &f_lo;
        let p = g.pow(n);
        assert!(rel(p.log_frobenius_sq(), big_ln(&frob)) < 1e-12, "n={n}");
        let trace = &f_hi + &f_lo;
        let lambda = 2.0 * big_ln(&trace);
        if n >= 30 {
            assert!(rel(p.jordan_length(DEFAULT_TOL).unwrap(), lambda) < 1e-12, "n={n}");
            assert!(rel(p.cartan_length(), big_ln(&frob)) < 1e-12, "n={n}");
        }
    }
}

type Q2 = [BigRational; 4];

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn q_mul(a: &Q2, b: &Q2) -> Q2 {
    [
        &a[0] * &b[0] + &a[1] * &b[2],
        &a[0] * &b[1] + &a[1] * &b[3],
        &a[2] * &b[0] + &a[3] * &b[2],
        &a[2] * &b[1] + &a[3] * &b[3],
    ]
}

fn q_inv(a: &Q2) -> Q2 {
    [a[3].clone(), -a[1].clone(), -a[2].clone(), a[0].clone()]
}

fn q_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

#[test]
fn thirty_letter_products_match_rationals() {
    let a: Q2 = [q(3, 1), q(0, 1), q(0, 1), q(1, 3)];
    let h: Q2 = [q(5, 4), q(3, 4), q(3, 4), q(5, 4)];
    let b = q_mul(&q_mul(&h, &a), &q_inv(&h));
    let doc_entry = |m: &Q2| m.iter().map(|x| json!([q_f64(x), 0.0])).collect::<Vec<_>>();
    let rep = load_representation(&json!({
        "rank": 2,
        "factors": [{"field": "real", "generators": [doc_entry(&a), doc_entry(&b)]}]
    }))
    .unwrap();
    let gens = [a, b];
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..40 {
        let mut codes: Vec<u8> = Vec::new();
        while codes.len() < 30 {
            let c = rng.gen_range(0..4u8);
            if codes.last().is_some_and(|&p| p ^ 1 == c) || (codes.len() == 29 && codes[0] ^ 1 == c) {
                continue;
            }
            codes.push(c);
        }
        let mut exact: Q2 = [q(1, 1), q(0, 1), q(0, 1), q(1, 1)];
        for &c in &codes {
            let g = &gens[(c / 2) as usize];
            exact = q_mul(&exact, &if c % 2 == 1 { q_inv(g) } else { g.clone() });
        }
        let tr = q_f64(&(&exact[0] + &exact[3]).abs());
        let jordan = 2.0 * ((tr + (tr * tr - 4.0).sqrt()) / 2.0).ln();
        let frob: BigRational = exact.iter().map(|x| x * x).sum();
        let cartan = (q_f64(&frob) / 2.0).acosh();

        let w = Word::new(codes.iter().map(|&c| Letter::from_code(c)).collect()).unwrap();
        let lam = rep.lambda_vector_of_word(&w).unwrap();
        let mu = rep.mu_vector(&w);
        assert!(rel(lam.coords[0], jordan) < 1e-9, "{w}: {} vs {jordan}", lam.coords[0]);
        assert!(rel(mu.coords[0], cartan) < 1e-9, "{w}: {} vs {cartan}", mu.coords[0]);
    }
}

#[test]
fn short_words_match_plain_float_products() {
    let twisted = load_representation(&json!({
        "builder": "schottky_pair", "stretch": 3.0, "separation": 2.5,
        "field": "complex", "twist": 0.7, "twist_b": 2.1
    }))
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for rep in [swapped_pair(), twisted] {
        let gens = generators(&rep);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let mut codes: Vec<u8> = Vec::new();
            while codes.len() < n {
                let c = rng.gen_range(0..4u8);
                if codes.last().is_some_and(|&p| p ^ 1 == c) || (codes.len() + 1 == n && n > 1 && codes[0] ^ 1 == c) {
                    continue;
                }
                codes.push(c);
            }
            let w = Word::new(codes.iter().map(|&c| Letter::from_code(c)).collect()).unwrap();
            let lam = rep.lambda_vector_of_word(&w).unwrap();
            let mu = rep.mu_vector(&w);
            for (i, g) in gens.iter().enumerate() {
                let m = naive_product(g, &codes);
                assert!(rel(lam.coords[i], naive_jordan(&m)) < 1e-9);
                assert!(rel(mu.coords[i], naive_cartan(&m)) < 1e-9);
            }
        }
    }
}
