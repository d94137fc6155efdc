//! Review monitoring pipeline.
//!
//! Turns a storefront's user reviews into a longitudinal sentiment trend,
//! term frequency / importance tables and density-clustered topics that a
//! researcher can merge into named themes.
//!
//! The stages are independent modules wired together by [`pipeline`]:
//!
//! * [`ingest`] fetches paginated reviews and keeps an append-only corpus.
//! * [`filter`] drops spam and buckets reviews by length.
//! * [`textprep`] tokenizes, removes stopwords and Porter-stems.
//! * [`sentiment`] labels reviews, evaluates classifiers and builds trends.
//! * [`termstats`] ranks n-grams and TF-IDF terms.
//! * [`topics`] embeds, reduces, clusters (HDBSCAN) and extracts c-TF-IDF keywords.
//! * [`report`] assembles everything into a versioned JSON document.

pub mod adapter;
pub mod filter;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod sentiment;
pub mod termstats;
pub mod textprep;
pub mod topics;

pub use filter::{FilterConfig, LengthBucket, SpamReason, SpamVerdict};
pub use ingest::{Review, ReviewPage};
pub use report::MonitorReport;
pub use sentiment::{SentimentLabel, SentimentRecord};
pub use textprep::CleanedDocument;
pub use topics::{ClusterAssignment, ThemeSpec, TopicModel};
