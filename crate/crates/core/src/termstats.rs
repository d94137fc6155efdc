//! Bag-of-words n-gram counts and TF-IDF term importance.
//!
//! Both operate on stem sequences, one per document. N-grams never span two
//! documents. TF-IDF uses the smoothed idf `ln((1 + N) / (1 + df)) + 1` with
//! raw within-document counts, aggregated over the corpus by summation (or
//! maximum).

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramCount {
    pub gram: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramTable {
    pub n: usize,
    /// Descending count, ties ascending by gram.
    pub entries: Vec<GramCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfTable {
    /// Descending score, ties ascending by term.
    pub entries: Vec<TermScore>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Max,
}

/// Counts every n-gram of the corpus (no truncation).
pub fn count_ngrams<D: AsRef<[S]> + Sync, S: AsRef<str>>(docs: &[D], n: usize) -> HashMap<String, usize> {
    use rayon::prelude::*;
    assert!((1..=3).contains(&n), "n must be 1, 2 or 3");
    docs.par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, usize>, doc| {
            for window in doc.as_ref().windows(n) {
                let gram = window.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
                *acc.entry(gram).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        })
}

pub fn ngram_counts<D: AsRef<[S]> + Sync, S: AsRef<str>>(docs: &[D], n: usize, top_k: usize) -> NgramTable {
    let mut entries: Vec<GramCount> = count_ngrams(docs, n)
        .into_iter()
        .map(|(gram, count)| GramCount { gram, count })
        .collect();
    entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.gram.cmp(&b.gram)));
    entries.truncate(top_k);
    NgramTable { n, entries }
}

/// Smoothed inverse document frequency.
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Document frequency of every term.
pub fn document_frequencies<'a, D: AsRef<[S]>, S: AsRef<str> + 'a>(docs: &'a [D]) -> HashMap<&'a str, usize> {
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    df
}

/// Corpus-level TF-IDF score of every term.
pub fn tfidf_all<D: AsRef<[S]>, S: AsRef<str>>(docs: &[D], aggregation: Aggregation) -> HashMap<String, f64> {
    let df = document_frequencies(docs);
    let n_docs = docs.len();
    // Sum of tf * idf over documents is idf * (total tf), and the max is
    // idf * (max tf); aggregating integer counts keeps equal terms bit-equal.
    let mut tf_agg: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for t in doc.as_ref() {
            *tf.entry(t.as_ref()).or_default() += 1;
        }
        for (t, count) in tf {
            let slot = tf_agg.entry(t).or_insert(0);
            match aggregation {
                Aggregation::Sum => *slot += count,
                Aggregation::Max => *slot = (*slot).max(count),
            }
        }
    }
    tf_agg
        .into_iter()
        .map(|(t, tf)| (t.to_string(), tf as f64 * smoothed_idf(n_docs, df[t])))
        .collect()
}

fn rank_scores(scores: HashMap<String, f64>, top_k: usize) -> Vec<TermScore> {
    let mut entries: Vec<TermScore> = scores
        .into_iter()
        .map(|(term, score)| TermScore { term, score })
        .collect();
    entries.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.term.cmp(&b.term))
    });
    entries.truncate(top_k);
    entries
}

pub fn tfidf_scores<D: AsRef<[S]>, S: AsRef<str>>(docs: &[D], top_k: usize, aggregation: Aggregation) -> TfidfTable {
    TfidfTable {
        entries: rank_scores(tfidf_all(docs, aggregation), top_k),
    }
}
