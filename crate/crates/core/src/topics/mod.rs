//! Topic modeling: embed, reduce, density-cluster, then describe clusters by
//! class-based TF-IDF keywords.
//!
//! [`fit_topics`] runs the whole chain on cleaned documents. The pieces are
//! public so callers can swap any stage (an external embedder or reducer,
//! a precomputed assignment).

mod ctfidf;
mod embed;
mod hdbscan;
mod reduce;
mod similarity;
mod themes;

pub use ctfidf::{ctfidf_keywords, CtfidfOutput, SparseVector, TermWeight};
pub use embed::{embed_builtin, embed_external, EmbeddingMatrix, BUILTIN_EMBEDDER_ID};
pub use hdbscan::{cluster_hdbscan, core_distances, mutual_reachability_mst, ClusterAssignment, HdbscanParams, MstEdge};
pub use reduce::{reduce_external, reduce_pca, ReducedMatrix};
pub use similarity::{topic_hierarchy, topic_similarity, MergeStep, SimilarityMatrix, TopicHierarchy};
pub use themes::{merge_topics, Theme, ThemeError, ThemeReport, ThemeSpec, ThemeSummary};

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapter::{AdapterConfig, AdapterError};
use crate::textprep::CleanedDocument;

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("invalid topic input: {0}")]
    Input(String),
    #[error("reduction failed: {0}")]
    Reduction(String),
    #[error(transparent)]
    Adapter(#[from] AdapterError),
    #[error(transparent)]
    Theme(#[from] ThemeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    /// Review id of each clustered document, aligned with `assignment.labels`.
    pub review_ids: Vec<String>,
    pub assignment: ClusterAssignment,
    pub topic_sizes: Vec<usize>,
    /// Top keywords per topic, descending weight.
    pub topic_keywords: Vec<Vec<TermWeight>>,
    /// Term list indexed by the sparse c-TF-IDF vectors.
    pub vocabulary: Vec<String>,
    pub ctfidf_vectors: Vec<SparseVector>,
}

impl TopicModel {
    pub fn k(&self) -> usize {
        self.assignment.k
    }

    pub fn noise_count(&self) -> usize {
        self.assignment.noise_count()
    }

    /// Assembles a model from an assignment over `docs`.
    pub fn from_assignment(docs: &[CleanedDocument], assignment: ClusterAssignment, top_k: usize) -> Self {
        let stems: Vec<&[String]> = docs.iter().map(|d| d.stems.as_slice()).collect();
        let out = ctfidf_keywords(&stems, &assignment, top_k);
        TopicModel {
            review_ids: docs.iter().map(|d| d.review_id.clone()).collect(),
            topic_sizes: assignment.cluster_sizes(),
            assignment,
            topic_keywords: out.keywords,
            vocabulary: out.vocabulary,
            ctfidf_vectors: out.vectors,
        }
    }
}

/// `builtin` or `external:<endpoint>`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EmbedderChoice {
    #[default]
    Builtin,
    External(String),
}

impl FromStr for EmbedderChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "builtin" | BUILTIN_EMBEDDER_ID => Ok(EmbedderChoice::Builtin),
            _ => match s.strip_prefix("external:") {
                Some(ep) if !ep.trim().is_empty() => Ok(EmbedderChoice::External(ep.to_string())),
                _ => Err(format!("embedder must be \"builtin\" or \"external:<endpoint>\", got {s:?}")),
            },
        }
    }
}

impl TryFrom<String> for EmbedderChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<EmbedderChoice> for String {
    fn from(c: EmbedderChoice) -> String {
        match c {
            EmbedderChoice::Builtin => "builtin".into(),
            EmbedderChoice::External(ep) => format!("external:{ep}"),
        }
    }
}

/// `pca`, `none` (cluster the embeddings directly) or `external:<endpoint>`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ReducerChoice {
    #[default]
    Pca,
    None,
    External(String),
}

impl FromStr for ReducerChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pca" => Ok(ReducerChoice::Pca),
            "none" => Ok(ReducerChoice::None),
            _ => match s.strip_prefix("external:") {
                Some(ep) if !ep.trim().is_empty() => Ok(ReducerChoice::External(ep.to_string())),
                _ => Err(format!("reducer must be \"pca\", \"none\" or \"external:<endpoint>\", got {s:?}")),
            },
        }
    }
}

impl TryFrom<String> for ReducerChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ReducerChoice> for String {
    fn from(c: ReducerChoice) -> String {
        match c {
            ReducerChoice::Pca => "pca".into(),
            ReducerChoice::None => "none".into(),
            ReducerChoice::External(ep) => format!("external:{ep}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopicConfig {
    pub embedder: EmbedderChoice,
    /// Truncated SVD rank for the builtin embedder; 0 keeps raw TF-IDF vectors.
    pub lsa_dim: usize,
    pub reducer: ReducerChoice,
    pub target_dim: usize,
    pub min_cluster_size: usize,
    /// Defaults to `min_cluster_size`.
    pub min_samples: Option<usize>,
    pub top_k: usize,
    pub seed: u64,
}

impl Default for TopicConfig {
    fn default() -> Self {
        TopicConfig {
            embedder: EmbedderChoice::Builtin,
            lsa_dim: 64,
            reducer: ReducerChoice::Pca,
            target_dim: 5,
            min_cluster_size: 15,
            min_samples: None,
            top_k: 10,
            seed: 0,
        }
    }
}

impl TopicConfig {
    pub fn hdbscan_params(&self) -> HdbscanParams {
        HdbscanParams {
            min_cluster_size: self.min_cluster_size,
            min_samples: self.min_samples.unwrap_or(self.min_cluster_size),
        }
    }
}

/// Everything the topic stage produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicOutput {
    pub model: TopicModel,
    pub similarity: Option<SimilarityMatrix>,
    pub hierarchy: Option<TopicHierarchy>,
    pub embedder_id: String,
    pub reducer_id: String,
    pub explained_variance_ratio: Vec<f64>,
}

fn adapter_config(endpoint: &str) -> Result<AdapterConfig, TopicError> {
    Ok(AdapterConfig::new(endpoint.parse()?))
}

/// Runs embed, reduce, cluster and keyword extraction on `docs`.
///
/// Corpora smaller than `min_cluster_size` are not embedded at all; every
/// document is noise and K is 0.
pub fn fit_topics(docs: &[CleanedDocument], config: &TopicConfig) -> Result<TopicOutput, TopicError> {
    let params = config.hdbscan_params();
    params.validate()?;
    let mut embedder_id = match &config.embedder {
        EmbedderChoice::Builtin => BUILTIN_EMBEDDER_ID.to_string(),
        EmbedderChoice::External(ep) => format!("external:{ep}"),
    };
    let mut reducer_id = match &config.reducer {
        ReducerChoice::Pca => "pca".to_string(),
        ReducerChoice::None => "none".to_string(),
        ReducerChoice::External(ep) => format!("external:{ep}"),
    };
    let mut explained = Vec::new();

    let assignment = if docs.len() < params.min_cluster_size {
        ClusterAssignment::all_noise(docs.len())
    } else {
        let embeddings = match &config.embedder {
            EmbedderChoice::Builtin => {
                let stems: Vec<&[String]> = docs.iter().map(|d| d.stems.as_slice()).collect();
                embed_builtin(&stems, config.lsa_dim, config.seed)?
            }
            EmbedderChoice::External(ep) => {
                let items: Vec<(String, String)> =
                    docs.iter().map(|d| (d.review_id.clone(), d.tokens.join(" "))).collect();
                embed_external(&items, &adapter_config(ep)?)?
            }
        };
        embedder_id = embeddings.embedder_id.clone();
        let points = match &config.reducer {
            ReducerChoice::None => embeddings.rows,
            ReducerChoice::Pca => {
                let reduced = reduce_pca(&embeddings, config.target_dim)?;
                explained = reduced.explained_variance_ratio.clone();
                reduced.rows
            }
            ReducerChoice::External(ep) => {
                let ids: Vec<&str> = docs.iter().map(|d| d.review_id.as_str()).collect();
                let reduced = reduce_external(&ids, &embeddings, config.target_dim, &adapter_config(ep)?)?;
                reducer_id = reduced.reducer_id.clone();
                reduced.rows
            }
        };
        cluster_hdbscan(&points, params)?
    };

    let model = TopicModel::from_assignment(docs, assignment, config.top_k);
    let (similarity, hierarchy) = if model.k() >= 2 {
        (
            Some(topic_similarity(&model.ctfidf_vectors)),
            Some(topic_hierarchy(&model.ctfidf_vectors)),
        )
    } else {
        (None, None)
    };
    Ok(TopicOutput {
        model,
        similarity,
        hierarchy,
        embedder_id,
        reducer_id,
        explained_variance_ratio: explained,
    })
}
