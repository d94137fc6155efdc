use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FieldMap, PageRequest, INITIAL_CURSOR};

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("request failed: {0}")]
    Request(String),
    #[error("fixture error: {0}")]
    Fixture(String),
}

/// Returns the raw response body for one page request.
pub trait Transport {
    fn get(&mut self, request: &PageRequest) -> Result<String, TransportError>;
}

/// Query parameter names used by [`HttpTransport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueryNames {
    pub cursor: String,
    pub page_size: String,
    pub language: String,
    pub order: String,
    pub order_value: String,
    /// Fixed extra parameters appended to every request.
    pub extra: Vec<(String, String)>,
}

impl Default for QueryNames {
    fn default() -> Self {
        QueryNames {
            cursor: "cursor".into(),
            page_size: "num_per_page".into(),
            language: "language".into(),
            order: "filter".into(),
            order_value: "recent".into(),
            extra: vec![("json".into(), "1".into())],
        }
    }
}

/// Live HTTP GET transport.
///
/// `base_url` is a template where `{app_id}` is replaced by the requested app.
pub struct HttpTransport {
    agent: ureq::Agent,
    base_url: String,
    query: QueryNames,
}

pub const DEFAULT_BASE_URL: &str = "https://store.steampowered.com/appreviews/{app_id}";

impl HttpTransport {
    pub fn new(base_url: impl Into<String>, query: QueryNames, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport {
            agent,
            base_url: base_url.into(),
            query,
        }
    }

    pub fn url_for(&self, app_id: &str) -> String {
        self.base_url.replace("{app_id}", app_id)
    }
}

impl Transport for HttpTransport {
    fn get(&mut self, request: &PageRequest) -> Result<String, TransportError> {
        let q = &self.query;
        let mut call = self
            .agent
            .get(&self.url_for(&request.app_id))
            .query(&q.cursor, &request.cursor)
            .query(&q.page_size, request.page_size.to_string())
            .query(&q.language, &request.language)
            .query(&q.order, &q.order_value);
        for (k, v) in &q.extra {
            call = call.query(k, v);
        }
        let mut response = call
            .call()
            .map_err(|e| TransportError::Request(e.to_string()))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Request(e.to_string()))
    }
}

/// Serves numbered page files from a directory.
///
/// Files are ordered by the number embedded in their name (`page_000.json`,
/// `page_001.json`, ...). The first file answers the initial cursor; file
/// `i + 1` answers the cursor returned by file `i`. A request past the last
/// page gets an empty page echoing the request cursor.
pub struct FixtureTransport {
    pages: Vec<(PathBuf, String)>,
    by_cursor: HashMap<String, usize>,
    reviews_field: String,
    cursor_field: String,
}

impl FixtureTransport {
    pub fn open(dir: impl AsRef<Path>, fields: &FieldMap) -> Result<Self, TransportError> {
        let cursor_field = fields.cursor.as_str();
        let dir = dir.as_ref();
        let entries = fs::read_dir(dir)
            .map_err(|e| TransportError::Fixture(format!("{}: {e}", dir.display())))?;
        let mut numbered = Vec::new();
        for entry in entries {
            let path = entry
                .map_err(|e| TransportError::Fixture(e.to_string()))?
                .path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
            let digits: String = stem.chars().filter(char::is_ascii_digit).collect();
            if let Ok(n) = digits.parse::<u64>() {
                numbered.push((n, path));
            }
        }
        numbered.sort();

        let mut pages = Vec::with_capacity(numbered.len());
        let mut by_cursor = HashMap::new();
        by_cursor.insert(INITIAL_CURSOR.to_string(), 0);
        for (i, (_, path)) in numbered.into_iter().enumerate() {
            let body = fs::read_to_string(&path)
                .map_err(|e| TransportError::Fixture(format!("{}: {e}", path.display())))?;
            let next = serde_json::from_str::<serde_json::Value>(&body)
                .ok()
                .and_then(|v| v.get(cursor_field).and_then(|c| c.as_str()).map(String::from));
            if let Some(next) = next {
                by_cursor.entry(next).or_insert(i + 1);
            }
            pages.push((path, body));
        }
        Ok(FixtureTransport {
            pages,
            by_cursor,
            reviews_field: fields.reviews.clone(),
            cursor_field: fields.cursor.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }
}

impl Transport for FixtureTransport {
    fn get(&mut self, request: &PageRequest) -> Result<String, TransportError> {
        let index = *self.by_cursor.get(&request.cursor).ok_or_else(|| {
            TransportError::Fixture(format!("no fixture page for cursor {:?}", request.cursor))
        })?;
        match self.pages.get(index) {
            Some((_, body)) => Ok(body.clone()),
            None => {
                let mut empty = serde_json::Map::new();
                empty.insert(self.reviews_field.clone(), serde_json::Value::Array(Vec::new()));
                empty.insert(self.cursor_field.clone(), request.cursor.clone().into());
                Ok(serde_json::Value::Object(empty).to_string())
            }
        }
    }
}
