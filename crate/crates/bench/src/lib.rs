//! Seeded inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "kid", "scream", "voic", "chat", "racist", "crash", "lag", "server", "token", "game", "fun", "room", "updat",
    "bug", "player", "avatar", "friend", "mute", "report", "ban",
];

/// `n` token lists of 3..=40 stemmed-looking words.
pub fn token_docs(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(3..=40);
            (0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())].to_string()).collect()
        })
        .collect()
}

/// `n` points in `dims` dimensions around `centers` random centres.
pub fn clustered_points(n: usize, dims: usize, centers: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..centers).map(|_| (0..dims).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
    (0..n)
        .map(|i| means[i % centers].iter().map(|m| m + rng.random_range(-0.5..0.5)).collect())
        .collect()
}

/// Inflected English words for the stemmer.
pub fn inflected_words(n: usize, seed: u64) -> Vec<String> {
    const STEMS: &[&str] = &["connect", "relat", "generous", "hope", "troubl", "happi", "adjust", "formal", "electr"];
    const SUFFIXES: &[&str] = &["", "s", "ed", "ing", "ational", "ness", "ization", "fulness", "ively", "ement"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| format!("{}{}", STEMS[rng.random_range(0..STEMS.len())], SUFFIXES[rng.random_range(0..SUFFIXES.len())]))
        .collect()
}
