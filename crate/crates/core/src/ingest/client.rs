use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::transport::Transport;
use super::{Review, ReviewPage};

/// JSON field names of a review page payload.
///
/// Defaults follow the public storefront review endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMap {
    pub reviews: String,
    pub cursor: String,
    pub id: String,
    pub text: String,
    pub created: String,
    pub voted_up: String,
    pub language: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            reviews: "reviews".into(),
            cursor: "cursor".into(),
            id: "recommendationid".into(),
            text: "review".into(),
            created: "timestamp_created".into(),
            voted_up: "voted_up".into(),
            language: "language".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageRequest {
    pub app_id: String,
    pub cursor: String,
    pub page_size: u32,
    pub language: String,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("cannot decode page: bad or missing field `{field}`")]
    Decode { field: String },
}

impl FetchError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, FetchError::Transport { .. })
    }
}

fn decode_err(field: impl Into<String>) -> FetchError {
    FetchError::Decode {
        field: field.into(),
    }
}

/// Maps the storefront's language names onto ISO-639-1 codes; anything
/// unrecognised (including codes that are already ISO) passes through.
fn iso_language(name: &str) -> String {
    let code = match name {
        "english" => "en",
        "german" => "de",
        "french" => "fr",
        "spanish" | "latam" => "es",
        "russian" => "ru",
        "schinese" | "tchinese" => "zh",
        "japanese" => "ja",
        "koreana" => "ko",
        "portuguese" | "brazilian" => "pt",
        "italian" => "it",
        "polish" => "pl",
        "turkish" => "tr",
        "dutch" => "nl",
        "swedish" => "sv",
        "ukrainian" => "uk",
        other => other,
    };
    code.to_string()
}

/// Parses a page body under `fields`, attributing reviews to `request.app_id`.
pub fn decode_page(
    body: &str,
    fields: &FieldMap,
    request: &PageRequest,
) -> Result<ReviewPage, FetchError> {
    let root: Value = serde_json::from_str(body).map_err(|_| decode_err("<document>"))?;
    let items = root
        .get(&fields.reviews)
        .and_then(Value::as_array)
        .ok_or_else(|| decode_err(&fields.reviews))?;
    let next_cursor = root
        .get(&fields.cursor)
        .and_then(Value::as_str)
        .ok_or_else(|| decode_err(&fields.cursor))?
        .to_string();

    let mut reviews = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let field = |name: &str| format!("{}[{i}].{name}", fields.reviews);
        let review_id = match item.get(&fields.id) {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => return Err(decode_err(field(&fields.id))),
        };
        let text = item
            .get(&fields.text)
            .and_then(Value::as_str)
            .ok_or_else(|| decode_err(field(&fields.text)))?
            .to_string();
        let created_at = item
            .get(&fields.created)
            .and_then(Value::as_i64)
            .filter(|t| *t > 0)
            .ok_or_else(|| decode_err(field(&fields.created)))?;
        let recommended = item
            .get(&fields.voted_up)
            .and_then(Value::as_bool)
            .ok_or_else(|| decode_err(field(&fields.voted_up)))?;
        let language = item
            .get(&fields.language)
            .and_then(Value::as_str)
            .map(iso_language)
            .ok_or_else(|| decode_err(field(&fields.language)))?;
        reviews.push(Review {
            review_id,
            created_at,
            text,
            recommended,
            language,
            source_app_id: request.app_id.clone(),
        });
    }
    Ok(ReviewPage::new(reviews, next_cursor, &request.cursor))
}

/// Rate-limited, retrying page fetcher over a [`Transport`].
pub struct Client {
    transport: Box<dyn Transport>,
    fields: FieldMap,
    min_delay: Duration,
    max_attempts: u32,
    last_request: Option<Instant>,
}

impl Client {
    pub fn new(transport: Box<dyn Transport>, fields: FieldMap) -> Self {
        Client {
            transport,
            fields,
            min_delay: Duration::from_secs(1),
            max_attempts: 3,
            last_request: None,
        }
    }

    /// Minimum spacing between consecutive requests (default one second).
    pub fn with_min_delay(mut self, delay: Duration) -> Self {
        self.min_delay = delay;
        self
    }

    pub fn with_max_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    fn wait_turn(&mut self) {
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < self.min_delay {
                thread::sleep(self.min_delay - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }

    pub fn fetch_page(
        &mut self,
        app_id: &str,
        cursor: &str,
        page_size: u32,
        language: &str,
    ) -> Result<ReviewPage, FetchError> {
        if app_id.is_empty() {
            return Err(FetchError::InvalidRequest("app_id must be non-empty".into()));
        }
        if !(1..=100).contains(&page_size) {
            return Err(FetchError::InvalidRequest(format!(
                "page_size {page_size} outside 1..=100"
            )));
        }
        let request = PageRequest {
            app_id: app_id.to_string(),
            cursor: cursor.to_string(),
            page_size,
            language: language.to_string(),
        };

        let mut attempts = 0;
        loop {
            attempts += 1;
            self.wait_turn();
            match self.transport.get(&request) {
                Ok(body) => return decode_page(&body, &self.fields, &request),
                Err(e) if attempts >= self.max_attempts => {
                    return Err(FetchError::Transport {
                        attempts,
                        message: e.to_string(),
                    })
                }
                Err(e) => log::warn!("page request attempt {attempts} failed: {e}"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TransportError;

    fn request(cursor: &str) -> PageRequest {
        PageRequest {
            app_id: "471710".into(),
            cursor: cursor.into(),
            page_size: 20,
            language: "english".into(),
        }
    }

    fn page_json(ids: &[&str], cursor: &str) -> String {
        let reviews: Vec<Value> = ids
            .iter()
            .map(|id| {
                serde_json::json!({
                    "recommendationid": id,
                    "review": format!("review {id}"),
                    "timestamp_created": 1_600_000_000,
                    "voted_up": true,
                    "language": "english",
                })
            })
            .collect();
        serde_json::json!({ "success": 1, "reviews": reviews, "cursor": cursor }).to_string()
    }

    #[test]
    fn two_reviews_not_exhausted() {
        let page = decode_page(&page_json(&["1", "2"], "AoJ"), &FieldMap::default(), &request("*"))
            .unwrap();
        assert_eq!(page.reviews.len(), 2);
        assert!(!page.exhausted);
        assert_eq!(page.next_cursor, "AoJ");
        assert_eq!(page.reviews[0].source_app_id, "471710");
        assert_eq!(page.reviews[0].language, "en");
    }

    #[test]
    fn empty_page_is_exhausted() {
        let page =
            decode_page(&page_json(&[], "AoJ"), &FieldMap::default(), &request("*")).unwrap();
        assert!(page.exhausted);
    }

    #[test]
    fn repeated_cursor_is_exhausted() {
        let page =
            decode_page(&page_json(&["9"], "AoJ"), &FieldMap::default(), &request("AoJ")).unwrap();
        assert!(page.exhausted);
        assert_eq!(page.reviews.len(), 1);
    }

    #[test]
    fn decode_error_names_field() {
        let body = r#"{"reviews":[{"recommendationid":"1","review":"x","voted_up":true,"language":"english"}],"cursor":"c"}"#;
        let err = decode_page(body, &FieldMap::default(), &request("*")).unwrap_err();
        match err {
            FetchError::Decode { field } => assert_eq!(field, "reviews[0].timestamp_created"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(!FetchError::Decode { field: "x".into() }.is_retryable());
    }

    #[test]
    fn custom_field_map() {
        let fields = FieldMap {
            reviews: "items".into(),
            cursor: "next".into(),
            id: "id".into(),
            text: "body".into(),
            created: "ts".into(),
            voted_up: "up".into(),
            language: "lang".into(),
        };
        let body = r#"{"items":[{"id":7,"body":"hi","ts":5,"up":false,"lang":"en"}],"next":"n1"}"#;
        let page = decode_page(body, &fields, &request("*")).unwrap();
        assert_eq!(page.reviews[0].review_id, "7");
        assert!(!page.reviews[0].recommended);
    }

    struct Failing(u32);
    impl Transport for Failing {
        fn get(&mut self, _: &PageRequest) -> Result<String, TransportError> {
            self.0 += 1;
            Err(TransportError::Request("connection reset".into()))
        }
    }

    #[test]
    fn transport_failure_is_retryable_with_attempts() {
        let mut client = Client::new(Box::new(Failing(0)), FieldMap::default())
            .with_min_delay(Duration::ZERO)
            .with_max_attempts(3);
        let err = client.fetch_page("1", "*", 10, "en").unwrap_err();
        assert!(err.is_retryable());
        assert!(matches!(err, FetchError::Transport { attempts: 3, .. }));
    }

    #[test]
    fn rejects_bad_requests() {
        let mut client = Client::new(Box::new(Failing(0)), FieldMap::default());
        assert!(matches!(
            client.fetch_page("", "*", 10, "en"),
            Err(FetchError::InvalidRequest(_))
        ));
        assert!(matches!(
            client.fetch_page("1", "*", 0, "en"),
            Err(FetchError::InvalidRequest(_))
        ));
        assert!(matches!(
            client.fetch_page("1", "*", 101, "en"),
            Err(FetchError::InvalidRequest(_))
        ));
    }

    #[test]
    fn respects_min_delay() {
        struct Echo;
        impl Transport for Echo {
            fn get(&mut self, r: &PageRequest) -> Result<String, TransportError> {
                Ok(format!(r#"{{"reviews":[],"cursor":"{}"}}"#, r.cursor))
            }
        }
        let mut client =
            Client::new(Box::new(Echo), FieldMap::default()).with_min_delay(Duration::from_millis(40));
        let start = Instant::now();
        client.fetch_page("1", "*", 10, "en").unwrap();
        client.fetch_page("1", "*", 10, "en").unwrap();
        assert!(start.elapsed() >= Duration::from_millis(40));
    }
}
