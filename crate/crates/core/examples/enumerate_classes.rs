//! Reduced words and conjugacy classes of the free group of rank 2.

use spectra_census::group::{
    cyclically_reduced_count, enumerate_conjugacy_classes, enumerate_reduced_words, reduced_word_count,
};

fn main() {
    let k = 2;
    let max_len = 6;
    let mut words = vec![0u64; max_len + 1];
    for w in enumerate_reduced_words(k, max_len, u64::MAX).unwrap() {
        words[w.len()] += 1;
    }
    let mut classes = vec![0u64; max_len + 1];
    let mut primitive = vec![0u64; max_len + 1];
    for c in enumerate_conjugacy_classes(k, max_len, u64::MAX).unwrap() {
        classes[c.len()] += 1;
        if c.is_primitive() {
            primitive[c.len()] += 1;
        }
    }
    println!(" n  words  (formula)  cyc.reduced  classes  primitive");
    for n in 1..=max_len {
        println!(
            "{n:>2} {:>6} {:>10} {:>12} {:>8} {:>10}",
            words[n],
            reduced_word_count(k, n),
            cyclically_reduced_count(k, n),
            classes[n],
            primitive[n]
        );
    }
    let sample: Vec<String> = enumerate_conjugacy_classes(k, 3, u64::MAX)
        .unwrap()
        .map(|c| c.word().to_string())
        .collect();
    println!("classes up to length 3: {}", sample.join(" "));
}
