//! Review ingestion: paginated fetching, an append-only corpus and loading.
//!
//! A [`Client`] pulls [`ReviewPage`]s through a pluggable [`Transport`]
//! (live HTTP or a fixture directory), [`sync_corpus`] loops it until the
//! cursor is exhausted and [`load_corpus`] reads the persisted corpus back in
//! timestamp order.

mod client;
mod store;
mod transport;

pub use client::{decode_page, Client, FetchError, FieldMap, PageRequest};
pub use store::{
    load_corpus, sync_corpus, Checkpoint, CorpusStore, LoadError, LoadOptions, LoadedCorpus,
    StoreError, SyncError, SyncOptions, SyncStats,
};
pub use transport::{FixtureTransport, HttpTransport, QueryNames, Transport, TransportError, DEFAULT_BASE_URL};

use serde::{Deserialize, Serialize};

/// Cursor value that requests the first (most recent) page.
pub const INITIAL_CURSOR: &str = "*";

/// One storefront review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    /// Seconds since the Unix epoch, always positive.
    pub created_at: i64,
    pub text: String,
    pub recommended: bool,
    pub language: String,
    pub source_app_id: String,
}

/// A page of reviews, most recent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewPage {
    pub reviews: Vec<Review>,
    pub next_cursor: String,
    /// True when the page is empty or the cursor did not advance.
    pub exhausted: bool,
}

impl ReviewPage {
    pub fn new(reviews: Vec<Review>, next_cursor: String, request_cursor: &str) -> Self {
        let exhausted = reviews.is_empty() || next_cursor == request_cursor;
        ReviewPage {
            reviews,
            next_cursor,
            exhausted,
        }
    }
}
