//! Stage wiring, configuration and the artifacts each stage leaves behind.
//!
//! Every artifact records the hash of the corpus snapshot it was derived from
//! and the hash of the stage configuration that produced it, so a report can
//! refuse to combine stale or mismatched stages.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::adapter::{AdapterConfig, AdapterError};
use crate::filter::{filter_corpus, FilterConfig, FilterStats};
use crate::ingest::Review;
use crate::sentiment::{
    sentiment_series, Classifier, ExternalClassifier, Granularity, LabelDistribution, LexiconClassifier,
    SentimentError, SentimentLabel, SentimentRecord, TimedLabel, TrendSeries,
};
use crate::termstats::{ngram_counts, tfidf_scores, Aggregation, NgramTable, TfidfTable};
use crate::textprep::{preprocess_all, CleanedDocument, Stoplist};
use crate::topics::{fit_topics, TopicConfig, TopicError, TopicOutput};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("inconsistent stage outputs: {0}")]
    Consistency(String),
    #[error(transparent)]
    Sentiment(#[from] SentimentError),
    #[error(transparent)]
    Topics(#[from] TopicError),
}

/// Sha256 hex digest of a value's JSON form.
pub fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Identity of a corpus snapshot: ids, timestamps and texts in load order.
pub fn corpus_hash(reviews: &[Review]) -> String {
    let mut h = Sha256::new();
    for r in reviews {
        h.update(r.review_id.as_bytes());
        h.update([0]);
        h.update(r.created_at.to_le_bytes());
        h.update(r.text.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub app_id: String,
    /// Base URL template with `{app_id}`; unset uses the storefront default.
    pub base_url: Option<String>,
    pub page_size: u32,
    /// Storefront language filter sent with each request.
    pub language: String,
    /// ISO code kept when loading the corpus; empty keeps every language.
    pub corpus_language: String,
    pub min_delay_ms: u64,
    pub max_attempts: u32,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            app_id: String::new(),
            base_url: None,
            page_size: 100,
            language: "english".into(),
            corpus_language: "en".into(),
            min_delay_ms: 1000,
            max_attempts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SentimentConfig {
    /// `builtin` or `external:<endpoint>`.
    pub classifier: String,
    pub threshold: f64,
    pub granularity: Granularity,
    pub batch_size: usize,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        SentimentConfig {
            classifier: "builtin".into(),
            threshold: 1.0,
            granularity: Granularity::Year,
            batch_size: 64,
            max_in_flight: 4,
            timeout_secs: 30,
        }
    }
}

impl SentimentConfig {
    pub fn classifier(&self) -> Result<Box<dyn Classifier>, PipelineError> {
        if self.classifier == "builtin" {
            return Ok(Box::new(LexiconClassifier::default().with_threshold(self.threshold)));
        }
        let endpoint = self.classifier.strip_prefix("external:").ok_or_else(|| {
            PipelineError::Config(format!(
                "classifier must be \"builtin\" or \"external:<endpoint>\", got {:?}",
                self.classifier
            ))
        })?;
        let mut config = AdapterConfig::new(endpoint.parse().map_err(|e: AdapterError| PipelineError::Config(e.to_string()))?);
        config.batch_size = self.batch_size.max(1);
        config.max_in_flight = self.max_in_flight.max(1);
        config.timeout = Duration::from_secs(self.timeout_secs.max(1));
        Ok(Box::new(ExternalClassifier::new(config)))
    }
}

/// Which sentiment-labelled documents a stage analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    Positive,
    Neutral,
    #[default]
    Negative,
}

impl Subset {
    pub fn admits(self, label: SentimentLabel) -> bool {
        match self {
            Subset::All => true,
            Subset::Positive => label == SentimentLabel::Positive,
            Subset::Neutral => label == SentimentLabel::Neutral,
            Subset::Negative => label == SentimentLabel::Negative,
        }
    }

    pub fn size_in(self, d: &LabelDistribution) -> usize {
        match self {
            Subset::All => d.total(),
            Subset::Positive => d.positive,
            Subset::Neutral => d.neutral,
            Subset::Negative => d.negative,
        }
    }
}

impl std::str::FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Subset::All),
            "positive" => Ok(Subset::Positive),
            "neutral" => Ok(Subset::Neutral),
            "negative" => Ok(Subset::Negative),
            _ => Err(format!("unknown subset {s:?} (all, positive, neutral, negative)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TermsConfig {
    pub subset: Subset,
    pub ngram_top_k: usize,
    pub tfidf_top_k: usize,
    pub aggregation: Aggregation,
}

impl Default for TermsConfig {
    fn default() -> Self {
        TermsConfig {
            subset: Subset::Negative,
            ngram_top_k: 10,
            tfidf_top_k: 20,
            aggregation: Aggregation::Sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TopicsConfig {
    pub subset: Subset,
    #[serde(flatten)]
    pub model: TopicConfig,
}

/// Every pipeline-affecting parameter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub ingest: IngestConfig,
    pub filter: FilterConfig,
    pub sentiment: SentimentConfig,
    pub terms: TermsConfig,
    pub topics: TopicsConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.filter.validate().map_err(PipelineError::Config)?;
        if !(1..=100).contains(&self.ingest.page_size) {
            return Err(PipelineError::Config(format!("page_size must be in 1..=100, got {}", self.ingest.page_size)));
        }
        if self.terms.ngram_top_k == 0 || self.terms.tfidf_top_k == 0 {
            return Err(PipelineError::Config("term table sizes must be positive".into()));
        }
        self.topics.model.hdbscan_params().validate()?;
        Ok(())
    }

    pub fn hash(&self) -> String {
        hash_json(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterArtifact {
    pub corpus_hash: String,
    pub config_hash: String,
    pub total: usize,
    pub stats: FilterStats,
    /// Ids of the non-spam mid-length reviews that go on to analysis.
    pub kept_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepArtifact {
    pub corpus_hash: String,
    pub config_hash: String,
    pub documents: Vec<CleanedDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentArtifact {
    pub corpus_hash: String,
    pub config_hash: String,
    pub classifier_id: String,
    pub records: Vec<SentimentRecord>,
    pub distribution: LabelDistribution,
    pub trend: TrendSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermsArtifact {
    pub corpus_hash: String,
    pub config_hash: String,
    pub subset: Subset,
    pub documents: usize,
    /// n = 1, 2, 3.
    pub ngrams: Vec<NgramTable>,
    pub tfidf: TfidfTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicsArtifact {
    pub corpus_hash: String,
    pub config_hash: String,
    pub subset: Subset,
    pub output: TopicOutput,
}

pub fn run_filter(reviews: &[Review], config: &FilterConfig) -> (FilterArtifact, Vec<Review>) {
    let outcome = filter_corpus(reviews, config);
    let artifact = FilterArtifact {
        corpus_hash: corpus_hash(reviews),
        config_hash: hash_json(config),
        total: reviews.len(),
        stats: outcome.stats,
        kept_ids: outcome.kept.iter().map(|r| r.review_id.clone()).collect(),
    };
    (artifact, outcome.kept)
}

/// The reviews a filter artifact kept, in corpus order.
pub fn kept_reviews(reviews: &[Review], filter: &FilterArtifact) -> Result<Vec<Review>, PipelineError> {
    let hash = corpus_hash(reviews);
    if hash != filter.corpus_hash {
        return Err(PipelineError::Consistency(format!(
            "filter output belongs to corpus {} but the corpus hashes to {hash}",
            filter.corpus_hash
        )));
    }
    let by_id: HashMap<&str, &Review> = reviews.iter().map(|r| (r.review_id.as_str(), r)).collect();
    filter
        .kept_ids
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .map(|r| (*r).clone())
                .ok_or_else(|| PipelineError::Consistency(format!("kept review {id} missing from corpus")))
        })
        .collect()
}

pub fn run_prep(kept: &[Review], filter: &FilterArtifact) -> PrepArtifact {
    PrepArtifact {
        corpus_hash: filter.corpus_hash.clone(),
        config_hash: hash_json(&"stoplist:english;stemmer:porter"),
        documents: preprocess_all(kept, &Stoplist::english()),
    }
}

pub fn run_sentiment(
    kept: &[Review],
    filter: &FilterArtifact,
    config: &SentimentConfig,
    classifier: &dyn Classifier,
) -> Result<SentimentArtifact, PipelineError> {
    let items: Vec<(String, String)> = kept.iter().map(|r| (r.review_id.clone(), r.text.clone())).collect();
    let records = classifier.classify_all(&items)?;
    let timed: Vec<TimedLabel> = kept
        .iter()
        .zip(&records)
        .map(|(r, s)| TimedLabel {
            created_at: r.created_at,
            label: s.label,
        })
        .collect();
    Ok(SentimentArtifact {
        corpus_hash: filter.corpus_hash.clone(),
        config_hash: hash_json(config),
        classifier_id: classifier.id().to_string(),
        distribution: LabelDistribution::from_records(&records),
        trend: sentiment_series(&timed, config.granularity),
        records,
    })
}

fn check_same_corpus(a: &str, a_name: &str, b: &str, b_name: &str) -> Result<(), PipelineError> {
    if a != b {
        return Err(PipelineError::Consistency(format!(
            "{a_name} output is from corpus {a} but {b_name} output is from corpus {b}"
        )));
    }
    Ok(())
}

/// Prepared documents whose sentiment label falls in `subset`.
pub fn subset_documents(
    prep: &PrepArtifact,
    sentiment: &SentimentArtifact,
    subset: Subset,
) -> Result<Vec<CleanedDocument>, PipelineError> {
    check_same_corpus(&prep.corpus_hash, "prep", &sentiment.corpus_hash, "sentiment")?;
    if prep.documents.len() != sentiment.records.len() {
        return Err(PipelineError::Consistency(format!(
            "prep has {} documents but sentiment has {} records",
            prep.documents.len(),
            sentiment.records.len()
        )));
    }
    let labels: HashMap<&str, SentimentLabel> =
        sentiment.records.iter().map(|r| (r.review_id.as_str(), r.label)).collect();
    prep.documents
        .iter()
        .map(|d| match labels.get(d.review_id.as_str()) {
            Some(&l) => Ok(subset.admits(l).then(|| d.clone())),
            None => Err(PipelineError::Consistency(format!("no sentiment record for review {}", d.review_id))),
        })
        .filter_map(Result::transpose)
        .collect()
}

pub fn run_terms(
    prep: &PrepArtifact,
    sentiment: &SentimentArtifact,
    config: &TermsConfig,
) -> Result<TermsArtifact, PipelineError> {
    let docs = subset_documents(prep, sentiment, config.subset)?;
    let stems: Vec<&[String]> = docs.iter().map(|d| d.stems.as_slice()).collect();
    Ok(TermsArtifact {
        corpus_hash: prep.corpus_hash.clone(),
        config_hash: hash_json(config),
        subset: config.subset,
        documents: docs.len(),
        ngrams: (1..=3).map(|n| ngram_counts(&stems, n, config.ngram_top_k)).collect(),
        tfidf: tfidf_scores(&stems, config.tfidf_top_k, config.aggregation),
    })
}

pub fn run_topics(
    prep: &PrepArtifact,
    sentiment: &SentimentArtifact,
    config: &TopicsConfig,
) -> Result<TopicsArtifact, PipelineError> {
    let docs = subset_documents(prep, sentiment, config.subset)?;
    let output = fit_topics(&docs, &config.model)?;
    Ok(TopicsArtifact {
        corpus_hash: prep.corpus_hash.clone(),
        config_hash: hash_json(config),
        subset: config.subset,
        output,
    })
}

/// All stage outputs for one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutputs {
    pub filter: FilterArtifact,
    pub prep: PrepArtifact,
    pub sentiment: SentimentArtifact,
    pub terms: TermsArtifact,
    pub topics: Option<TopicsArtifact>,
}

/// Runs filter through topics in memory.
pub fn run_pipeline(reviews: &[Review], config: &PipelineConfig, with_topics: bool) -> Result<PipelineOutputs, PipelineError> {
    config.validate()?;
    let classifier = config.sentiment.classifier()?;
    let (filter, kept) = run_filter(reviews, &config.filter);
    let prep = run_prep(&kept, &filter);
    let sentiment = run_sentiment(&kept, &filter, &config.sentiment, classifier.as_ref())?;
    let terms = run_terms(&prep, &sentiment, &config.terms)?;
    let topics = if with_topics {
        Some(run_topics(&prep, &sentiment, &config.topics)?)
    } else {
        None
    };
    Ok(PipelineOutputs {
        filter,
        prep,
        sentiment,
        terms,
        topics,
    })
}
