use serde::{Deserialize, Serialize};

use super::{Classifier, SentimentError, SentimentLabel, SentimentRecord};
use crate::adapter::{self, AdapterConfig, AdapterError, Keyed};

#[derive(Debug, Clone, Serialize)]
pub struct TextRequest<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

impl Keyed for TextRequest<'_> {
    fn key(&self) -> &str {
        self.id
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct LabelResponse {
    pub id: String,
    pub label: String,
    #[serde(default = "full_confidence")]
    pub confidence: f64,
}

fn full_confidence() -> f64 {
    1.0
}

impl Keyed for LabelResponse {
    fn key(&self) -> &str {
        &self.id
    }
}

/// Labels a batch through an external adapter, preserving input order.
pub fn classify_external(
    items: &[(String, String)],
    config: &AdapterConfig,
    classifier_id: &str,
) -> Result<Vec<SentimentRecord>, SentimentError> {
    let requests: Vec<TextRequest> = items
        .iter()
        .map(|(id, text)| TextRequest { id, text })
        .collect();
    let responses: Vec<LabelResponse> = adapter::call_all(config, &requests)?;
    responses
        .into_iter()
        .map(|r| {
            let label: SentimentLabel = r.label.parse().map_err(|_| {
                AdapterError::protocol(format!("unknown label {:?} for id {:?}", r.label, r.id), &r.label)
            })?;
            if !(0.0..=1.0).contains(&r.confidence) {
                return Err(AdapterError::protocol(
                    format!("confidence {} outside [0, 1] for id {:?}", r.confidence, r.id),
                    r.confidence.to_string(),
                )
                .into());
            }
            Ok(SentimentRecord {
                review_id: r.id,
                label,
                confidence: r.confidence,
                classifier_id: classifier_id.to_string(),
            })
        })
        .collect()
}

/// [`Classifier`] backed by an external adapter.
#[derive(Debug, Clone)]
pub struct ExternalClassifier {
    pub config: AdapterConfig,
    id: String,
}

impl ExternalClassifier {
    pub fn new(config: AdapterConfig) -> Self {
        let id = format!("external:{}", config.endpoint);
        ExternalClassifier { config, id }
    }
}

impl Classifier for ExternalClassifier {
    fn id(&self) -> &str {
        &self.id
    }

    fn classify(&self, review_id: &str, text: &str) -> Result<SentimentRecord, SentimentError> {
        if text.trim().is_empty() {
            return Err(SentimentError::EmptyText(review_id.to_string()));
        }
        let mut records =
            classify_external(&[(review_id.to_string(), text.to_string())], &self.config, &self.id)?;
        Ok(records.remove(0))
    }

    fn classify_all(&self, items: &[(String, String)]) -> Result<Vec<SentimentRecord>, SentimentError> {
        if let Some((id, _)) = items.iter().find(|(_, t)| t.trim().is_empty()) {
            return Err(SentimentError::EmptyText(id.clone()));
        }
        classify_external(items, &self.config, &self.id)
    }
}
