use std::collections::{HashMap, HashSet};

use super::{Classifier, SentimentError, SentimentLabel, SentimentRecord};
use crate::textprep::tokenize;

const BUNDLED_LEXICON: &str = include_str!("../../assets/lexicon.tsv");

pub const DEFAULT_NEGATORS: [&str; 3] = ["not", "never", "no"];

/// Signed word polarities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    polarity: HashMap<String, i32>,
}

impl Lexicon {
    /// The frozen lexicon shipped with the crate (word TAB +1/-1).
    pub fn bundled() -> Self {
        Lexicon::parse(BUNDLED_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn parse(body: &str) -> Result<Self, String> {
        let mut polarity = HashMap::new();
        for (i, line) in body.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, value) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected word<TAB>polarity", i + 1))?;
            let value: i32 = value
                .trim()
                .parse()
                .map_err(|e| format!("line {}: {e}", i + 1))?;
            polarity.insert(word.to_lowercase(), value);
        }
        Ok(Lexicon { polarity })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, i32)>) -> Self {
        Lexicon {
            polarity: pairs.into_iter().map(|(w, p)| (w.to_string(), p)).collect(),
        }
    }

    pub fn polarity(&self, word: &str) -> Option<i32> {
        self.polarity.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }
}

/// Lexicon-sum baseline with negation flipping.
///
/// A polarity word preceded within `negation_window` tokens by a negator
/// contributes with its sign flipped. Scores at or beyond `threshold` in
/// either direction are polar; anything in between is Neutral.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    lexicon: Lexicon,
    negators: HashSet<String>,
    pub negation_window: usize,
    pub threshold: f64,
    id: String,
}

impl LexiconClassifier {
    pub fn new(lexicon: Lexicon) -> Self {
        LexiconClassifier {
            lexicon,
            negators: DEFAULT_NEGATORS.iter().map(|s| s.to_string()).collect(),
            negation_window: 2,
            threshold: 1.0,
            id: "builtin-lexicon-v1".into(),
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn score(&self, text: &str) -> i32 {
        let tokens = tokenize(text);
        tokens
            .iter()
            .enumerate()
            .filter_map(|(i, tok)| {
                let p = self.lexicon.polarity(tok)?;
                let start = i.saturating_sub(self.negation_window);
                let negated = tokens[start..i].iter().any(|t| self.negators.contains(t));
                Some(if negated { -p } else { p })
            })
            .sum()
    }

    pub fn label_for(&self, score: i32) -> SentimentLabel {
        let s = f64::from(score);
        if s >= self.threshold {
            SentimentLabel::Positive
        } else if s <= -self.threshold {
            SentimentLabel::Negative
        } else {
            SentimentLabel::Neutral
        }
    }
}

impl Default for LexiconClassifier {
    fn default() -> Self {
        LexiconClassifier::new(Lexicon::bundled())
    }
}

impl Classifier for LexiconClassifier {
    fn id(&self) -> &str {
        &self.id
    }

    fn classify(&self, review_id: &str, text: &str) -> Result<SentimentRecord, SentimentError> {
        if text.trim().is_empty() {
            return Err(SentimentError::EmptyText(review_id.to_string()));
        }
        let score = self.score(text);
        Ok(SentimentRecord {
            review_id: review_id.to_string(),
            label: self.label_for(score),
            confidence: (f64::from(score.abs()) / 5.0).min(1.0),
            classifier_id: self.id.clone(),
        })
    }
}
