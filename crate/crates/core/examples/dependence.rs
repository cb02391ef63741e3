//! Detects when two factors have proportional length spectra.

use spectra_census::reps::{detect_dependence, load_representation, DEPENDENCE_TOL};

fn main() {
    let pair = |conj: Option<serde_json::Value>| {
        let mut f = serde_json::json!({"builder": "schottky_pair", "stretch": 4.0, "separation": 3.0});
        if let Some(c) = conj {
            f["conjugate_by"] = c;
        }
        f
    };
    let joined = serde_json::json!({
        "rank": 2,
        "factors": [pair(None), pair(Some(serde_json::json!([[2.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])))]
    });
    let independent = serde_json::json!({
        "rank": 2,
        "factors": [pair(None), {"builder": "schottky_pair", "stretch": 3.0, "stretch_b": 5.0, "separation": 3.0}]
    });
    for (name, doc) in [("self-joining", joined), ("independent", independent)] {
        let rep = load_representation(&doc).unwrap();
        let d = detect_dependence(&rep, 8, DEPENDENCE_TOL).unwrap();
        println!(
            "{name:>13}: rank {} singular values {:?} stretch range [{:.4}, {:.4}]",
            d.rank,
            d.singular_values,
            d.stretch_min.unwrap(),
            d.stretch_max.unwrap()
        );
    }
}
