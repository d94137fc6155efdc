//! Three-class sentiment: classification, evaluation and trends.

mod evaluate;
mod external;
mod lexicon;
mod trend;

pub use evaluate::{evaluate, parse_gold, ClassMetrics, EvaluationReport, GoldLabel};
pub use external::{classify_external, ExternalClassifier, LabelResponse, TextRequest};
pub use lexicon::{Lexicon, LexiconClassifier, DEFAULT_NEGATORS};
pub use trend::{sentiment_series, Granularity, TimedLabel, TrendBucket, TrendSeries};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::AdapterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Neutral,
        SentimentLabel::Negative,
    ];

    /// +1, 0 or -1.
    pub fn value(self) -> i32 {
        match self {
            SentimentLabel::Positive => 1,
            SentimentLabel::Neutral => 0,
            SentimentLabel::Negative => -1,
        }
    }

    /// Row/column index in confusion matrices.
    pub fn index(self) -> usize {
        match self {
            SentimentLabel::Positive => 0,
            SentimentLabel::Neutral => 1,
            SentimentLabel::Negative => 2,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SentimentLabel::Positive => SentimentLabel::Negative,
            SentimentLabel::Neutral => SentimentLabel::Neutral,
            SentimentLabel::Negative => SentimentLabel::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Negative => "negative",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = SentimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(SentimentLabel::Positive),
            "neutral" => Ok(SentimentLabel::Neutral),
            "negative" => Ok(SentimentLabel::Negative),
            _ => Err(SentimentError::UnknownLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentRecord {
    pub review_id: String,
    pub label: SentimentLabel,
    /// In `[0, 1]`.
    pub confidence: f64,
    pub classifier_id: String,
}

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("cannot classify empty text (review {0})")]
    EmptyText(String),
    #[error("unknown sentiment label {0:?}")]
    UnknownLabel(String),
    #[error("classifier error: {source}")]
    Adapter {
        #[from]
        source: AdapterError,
    },
    #[error("evaluation input error: missing predictions for {missing:?}, duplicate ids {duplicates:?}")]
    Evaluation {
        missing: Vec<String>,
        duplicates: Vec<String>,
    },
    #[error("gold file line {line}: {message}")]
    Gold { line: usize, message: String },
}

/// Anything that labels review text.
pub trait Classifier: Sync {
    fn id(&self) -> &str;

    fn classify(&self, review_id: &str, text: &str) -> Result<SentimentRecord, SentimentError>;

    /// Labels `(review_id, text)` pairs in order.
    fn classify_all(&self, items: &[(String, String)]) -> Result<Vec<SentimentRecord>, SentimentError> {
        use rayon::prelude::*;
        items
            .par_iter()
            .map(|(id, text)| self.classify(id, text))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
}

impl LabelDistribution {
    pub fn from_records(records: &[SentimentRecord]) -> Self {
        let mut d = LabelDistribution::default();
        for r in records {
            match r.label {
                SentimentLabel::Positive => d.positive += 1,
                SentimentLabel::Neutral => d.neutral += 1,
                SentimentLabel::Negative => d.negative += 1,
            }
        }
        d
    }

    pub fn total(&self) -> usize {
        self.positive + self.neutral + self.negative
    }
}
