//! Tokenization, stopword removal and stemming.

pub mod porter;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::filter::{length_bucket, word_count, LengthBucket};
use crate::ingest::Review;

pub use porter::stem;

const BUNDLED_STOPWORDS: &str = include_str!("../../assets/stopwords.txt");

/// Lowercase, NFC-normalized tokens split on non-alphanumeric boundaries.
pub fn tokenize(text: &str) -> Vec<String> {
    let normalized: String = text.nfc().collect();
    normalized
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// The frozen 127-word English list shipped with the crate.
    pub fn english() -> Self {
        Stoplist::from_words(BUNDLED_STOPWORDS.lines().map(str::trim).filter(|w| !w.is_empty()))
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stoplist {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for Stoplist {
    fn default() -> Self {
        Stoplist::english()
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedDocument {
    pub review_id: String,
    pub tokens: Vec<String>,
    /// Parallel to `tokens`.
    pub stems: Vec<String>,
    pub bucket: LengthBucket,
    pub created_at: i64,
}

impl CleanedDocument {
    /// True when every token was a stopword.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn preprocess(review: &Review, stoplist: &Stoplist) -> CleanedDocument {
    let tokens = remove_stopwords(tokenize(&review.text), stoplist);
    let stems = tokens.iter().map(|t| stem(t)).collect();
    CleanedDocument {
        review_id: review.review_id.clone(),
        tokens,
        stems,
        bucket: length_bucket(word_count(&review.text)),
        created_at: review.created_at,
    }
}

/// Order-preserving, document-parallel [`preprocess`].
pub fn preprocess_all(reviews: &[Review], stoplist: &Stoplist) -> Vec<CleanedDocument> {
    use rayon::prelude::*;
    reviews.par_iter().map(|r| preprocess(r, stoplist)).collect()
}
