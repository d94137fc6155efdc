use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ctfidf::top_terms;
use super::{TermWeight, TopicModel};

const THEME_KEYWORDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theme {
    pub name: String,
    pub member_topics: Vec<usize>,
    /// Filled in from topic sizes; ignored on input.
    #[serde(default)]
    pub review_count: usize,
}

/// Human merge decisions: named groups of disjoint topics.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ThemeSpec {
    #[serde(default)]
    pub themes: Vec<Theme>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThemeError {
    #[error("topic {topic} is assigned to both {first:?} and {second:?}")]
    Overlap {
        topic: usize,
        first: String,
        second: String,
    },
    #[error("theme {theme:?} references unknown topic {topic} (model has {k} topics)")]
    UnknownTopic { theme: String, topic: usize, k: usize },
    #[error("theme names must be non-empty")]
    EmptyName,
}

impl ThemeSpec {
    /// Checks names, topic ids and disjointness against a K-topic model.
    pub fn validate(&self, k: usize) -> Result<(), ThemeError> {
        let mut owner: HashMap<usize, &str> = HashMap::new();
        for theme in &self.themes {
            if theme.name.trim().is_empty() {
                return Err(ThemeError::EmptyName);
            }
            for &topic in &theme.member_topics {
                if topic >= k {
                    return Err(ThemeError::UnknownTopic {
                        theme: theme.name.clone(),
                        topic,
                        k,
                    });
                }
                if let Some(first) = owner.insert(topic, &theme.name) {
                    return Err(ThemeError::Overlap {
                        topic,
                        first: first.to_string(),
                        second: theme.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Validated copy with `review_count` recomputed from `topic_sizes`.
    pub fn with_counts(&self, topic_sizes: &[usize]) -> Result<ThemeSpec, ThemeError> {
        self.validate(topic_sizes.len())?;
        Ok(ThemeSpec {
            themes: self
                .themes
                .iter()
                .map(|t| Theme {
                    name: t.name.clone(),
                    member_topics: t.member_topics.clone(),
                    review_count: t.member_topics.iter().map(|&i| topic_sizes[i]).sum(),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeSummary {
    pub name: String,
    pub member_topics: Vec<usize>,
    pub review_count: usize,
    /// Top terms of the summed member c-TF-IDF vectors.
    pub keywords: Vec<TermWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeReport {
    pub themes: Vec<ThemeSummary>,
    pub unassigned_topics: Vec<usize>,
    /// Documents in unassigned topics.
    pub unassigned_count: usize,
    /// Documents clustered as noise, which never belong to a theme.
    pub noise_count: usize,
}

/// Applies merge decisions to a topic model.
pub fn merge_topics(model: &TopicModel, spec: &ThemeSpec) -> Result<ThemeReport, ThemeError> {
    let spec = spec.with_counts(&model.topic_sizes)?;
    let mut assigned = vec![false; model.k()];
    let themes = spec
        .themes
        .into_iter()
        .map(|t| {
            let mut sum: BTreeMap<usize, f64> = BTreeMap::new();
            for &topic in &t.member_topics {
                assigned[topic] = true;
                for (i, w) in model.ctfidf_vectors[topic].iter() {
                    *sum.entry(i).or_default() += w;
                }
            }
            ThemeSummary {
                keywords: top_terms(sum.into_iter(), &model.vocabulary, THEME_KEYWORDS),
                name: t.name,
                member_topics: t.member_topics,
                review_count: t.review_count,
            }
        })
        .collect();
    let unassigned_topics: Vec<usize> = (0..model.k()).filter(|&i| !assigned[i]).collect();
    Ok(ThemeReport {
        unassigned_count: unassigned_topics.iter().map(|&i| model.topic_sizes[i]).sum(),
        unassigned_topics,
        themes,
        noise_count: model.noise_count(),
    })
}
