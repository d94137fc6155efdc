use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

/// Sparse weights over a shared vocabulary, ascending by index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl SparseVector {
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let (indices, weights) = pairs.into_iter().unzip();
        SparseVector { indices, weights }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.weights[i] * other.weights[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtfidfOutput {
    pub vocabulary: Vec<String>,
    pub vectors: Vec<SparseVector>,
    pub keywords: Vec<Vec<TermWeight>>,
}

/// Top `top_k` entries of `vector`, descending weight, ties ascending by term.
pub(crate) fn top_terms(vector: impl Iterator<Item = (usize, f64)>, vocabulary: &[String], top_k: usize) -> Vec<TermWeight> {
    let mut terms: Vec<(usize, f64)> = vector.filter(|&(_, w)| w > 0.0).collect();
    terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| vocabulary[a.0].cmp(&vocabulary[b.0])));
    terms
        .into_iter()
        .take(top_k)
        .map(|(i, weight)| TermWeight {
            term: vocabulary[i].clone(),
            weight,
        })
        .collect()
}

/// Class-based TF-IDF over the clusters of `assignment`.
///
/// Each cluster's documents are concatenated into one class document. With
/// `tf(t, c)` the count of `t` in class `c`, `f(t)` its count over all
/// classes and `A` the mean class length in tokens, the weight is
/// `tf(t, c) * ln(1 + A / f(t))`. Noise documents are ignored.
pub fn ctfidf_keywords<D: AsRef<[String]> + Sync>(docs: &[D], assignment: &ClusterAssignment, top_k: usize) -> CtfidfOutput {
    assert_eq!(docs.len(), assignment.labels.len(), "one label per document");
    let k = assignment.k;
    let class_counts: Vec<HashMap<&str, usize>> = (0..k)
        .into_par_iter()
        .map(|c| {
            let mut tf: HashMap<&str, usize> = HashMap::new();
            for (doc, &label) in docs.iter().zip(&assignment.labels) {
                if label == c as i32 {
                    for t in doc.as_ref() {
                        *tf.entry(t.as_str()).or_default() += 1;
                    }
                }
            }
            tf
        })
        .collect();

    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &class_counts {
        for (&t, &n) in tf {
            *totals.entry(t).or_default() += n;
        }
    }
    let vocabulary: Vec<String> = totals.keys().map(|t| t.to_string()).collect();
    let index: HashMap<&str, usize> = totals.keys().enumerate().map(|(i, &t)| (t, i)).collect();
    let total_tokens: usize = totals.values().sum();
    let mean_class_len = if k == 0 { 0.0 } else { total_tokens as f64 / k as f64 };

    let vectors: Vec<SparseVector> = class_counts
        .iter()
        .map(|tf| {
            SparseVector::from_pairs(
                tf.iter()
                    .map(|(&t, &n)| {
                        let f = totals[t] as f64;
                        (index[t], n as f64 * (1.0 + mean_class_len / f).ln())
                    })
                    .collect(),
            )
        })
        .collect();
    let keywords = vectors.iter().map(|v| top_terms(v.iter(), &vocabulary, top_k)).collect();
    CtfidfOutput {
        vocabulary,
        vectors,
        keywords,
    }
}
