//! The monitoring report: one versioned JSON document assembled from the
//! stage artifacts.
//!
//! Floats are rounded to six significant digits when the report is built, so
//! serializing and parsing a report gives back the identical value and two
//! runs over the same corpus produce byte-identical files.

use chrono::DateTime;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::pipeline::{hash_json, PipelineConfig, PipelineOutputs, Subset};
use crate::sentiment::{LabelDistribution, TrendSeries};
use crate::termstats::{NgramTable, TfidfTable};
use crate::topics::{merge_topics, SimilarityMatrix, ThemeError, ThemeReport, ThemeSpec, TopicHierarchy, TopicModel};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("inconsistent stage outputs: {0}")]
    Consistency(String),
    #[error(transparent)]
    Theme(#[from] ThemeError),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub spam_removed: usize,
    pub short: usize,
    pub mid: usize,
    pub long: usize,
    /// Non-spam mid-length reviews.
    pub analyzed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSection {
    pub classifier_id: String,
    pub distribution: LabelDistribution,
    pub trend: TrendSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermsSection {
    pub subset: Subset,
    pub documents: usize,
    pub ngrams: Vec<NgramTable>,
    pub tfidf: TfidfTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicsSection {
    pub subset: Subset,
    pub documents: usize,
    pub model: TopicModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<SimilarityMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<TopicHierarchy>,
    pub reducer_id: String,
    pub explained_variance_ratio: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub corpus_hash: String,
    /// Earliest and latest analyzed review (UTC, RFC 3339).
    pub corpus_start: Option<String>,
    pub corpus_end: Option<String>,
    pub classifier_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedder_id: Option<String>,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub schema_version: String,
    pub corpus: CorpusSummary,
    pub sentiment: SentimentSection,
    pub terms: TermsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topics: Option<TopicsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub themes: Option<ThemeReport>,
    pub provenance: Provenance,
}

/// Rounds `x` to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig6(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn timestamp(ts: i64) -> Option<String> {
    DateTime::from_timestamp(ts, 0).map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
}

fn mismatch(what: &str, a_name: &str, a: usize, b_name: &str, b: usize) -> ReportError {
    ReportError::Consistency(format!("{what}: {a_name} = {a} but {b_name} = {b}"))
}

impl MonitorReport {
    /// Assembles and checks a report.
    pub fn build(
        outputs: &PipelineOutputs,
        config: &PipelineConfig,
        themes: Option<&ThemeSpec>,
    ) -> Result<MonitorReport, ReportError> {
        let PipelineOutputs {
            filter,
            prep,
            sentiment,
            terms,
            topics,
        } = outputs;
        let corpus = &filter.corpus_hash;
        let mut stages = vec![
            ("prep", &prep.corpus_hash),
            ("sentiment", &sentiment.corpus_hash),
            ("terms", &terms.corpus_hash),
        ];
        if let Some(t) = topics {
            stages.push(("topics", &t.corpus_hash));
        }
        for (name, hash) in stages {
            if hash != corpus {
                return Err(ReportError::Consistency(format!(
                    "{name} output is from corpus {hash} but filter output is from corpus {corpus}"
                )));
            }
        }
        let mut hashes = vec![
            ("filter", &filter.config_hash, hash_json(&config.filter)),
            ("sentiment", &sentiment.config_hash, hash_json(&config.sentiment)),
            ("terms", &terms.config_hash, hash_json(&config.terms)),
        ];
        if let Some(t) = topics {
            hashes.push(("topics", &t.config_hash, hash_json(&config.topics)));
        }
        for (name, recorded, expected) in hashes {
            if *recorded != expected {
                return Err(ReportError::Consistency(format!(
                    "{name} output was produced with config hash {recorded} but the current config hashes to {expected}"
                )));
            }
        }

        let stats = filter.stats;
        if stats.total() != filter.total {
            return Err(mismatch("filter", "bucket sum", stats.total(), "total", filter.total));
        }
        let analyzed = filter.kept_ids.len();
        if analyzed != stats.mid {
            return Err(mismatch("filter", "kept", analyzed, "mid", stats.mid));
        }
        if prep.documents.len() != analyzed {
            return Err(mismatch("prep", "documents", prep.documents.len(), "analyzed", analyzed));
        }
        if sentiment.distribution.total() != analyzed {
            return Err(mismatch("sentiment", "label distribution", sentiment.distribution.total(), "analyzed", analyzed));
        }
        let expected_terms = terms.subset.size_in(&sentiment.distribution);
        if terms.documents != expected_terms {
            return Err(mismatch("terms", "documents", terms.documents, "subset size", expected_terms));
        }

        let topics_section = match topics {
            None => None,
            Some(t) => {
                let model = &t.output.model;
                let expected = t.subset.size_in(&sentiment.distribution);
                if model.assignment.len() != expected {
                    return Err(mismatch("topics", "documents", model.assignment.len(), "subset size", expected));
                }
                let clustered: usize = model.topic_sizes.iter().sum();
                if clustered + model.noise_count() != model.assignment.len() {
                    return Err(mismatch(
                        "topics",
                        "clustered + noise",
                        clustered + model.noise_count(),
                        "documents",
                        model.assignment.len(),
                    ));
                }
                Some(TopicsSection {
                    subset: t.subset,
                    documents: model.assignment.len(),
                    model: model.clone(),
                    similarity: t.output.similarity.clone(),
                    hierarchy: t.output.hierarchy.clone(),
                    reducer_id: t.output.reducer_id.clone(),
                    explained_variance_ratio: t.output.explained_variance_ratio.clone(),
                })
            }
        };
        let theme_report = match (themes, &topics_section) {
            (Some(spec), Some(t)) => Some(merge_topics(&t.model, spec)?),
            (Some(_), None) => {
                return Err(ReportError::Consistency("themes given but the topics stage did not run".into()))
            }
            (None, _) => None,
        };

        let times = || prep.documents.iter().map(|d| d.created_at);
        let report = MonitorReport {
            schema_version: SCHEMA_VERSION.into(),
            corpus: CorpusSummary {
                total: filter.total,
                spam_removed: stats.spam_removed,
                short: stats.short,
                mid: stats.mid,
                long: stats.long,
                analyzed,
            },
            sentiment: SentimentSection {
                classifier_id: sentiment.classifier_id.clone(),
                distribution: sentiment.distribution,
                trend: sentiment.trend.clone(),
            },
            terms: TermsSection {
                subset: terms.subset,
                documents: terms.documents,
                ngrams: terms.ngrams.clone(),
                tfidf: terms.tfidf.clone(),
            },
            provenance: Provenance {
                config_hash: config.hash(),
                corpus_hash: corpus.clone(),
                corpus_start: times().min().and_then(timestamp),
                corpus_end: times().max().and_then(timestamp),
                classifier_id: sentiment.classifier_id.clone(),
                embedder_id: topics.as_ref().map(|t| t.output.embedder_id.clone()),
                generator: concat!("revmon ", env!("CARGO_PKG_VERSION")).into(),
            },
            topics: topics_section,
            themes: theme_report,
        };
        report.rounded()
    }

    /// Copy with every float rounded to six significant digits.
    pub fn rounded(&self) -> Result<MonitorReport, ReportError> {
        let mut v = serde_json::to_value(self)?;
        round_value(&mut v);
        Ok(serde_json::from_value(v)?)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<MonitorReport, ReportError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Assembles a report; see [`MonitorReport::build`].
pub fn build_report(
    outputs: &PipelineOutputs,
    config: &PipelineConfig,
    themes: Option<&ThemeSpec>,
) -> Result<MonitorReport, ReportError> {
    MonitorReport::build(outputs, config, themes)
}
