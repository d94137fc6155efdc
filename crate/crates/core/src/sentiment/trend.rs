use std::collections::BTreeMap;

use chrono::{DateTime, Datelike};
use serde::{Deserialize, Serialize};

use super::SentimentLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Year,
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedLabel {
    pub created_at: i64,
    pub label: SentimentLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendBucket {
    /// `YYYY` or `YYYY-MM` (UTC).
    pub period: String,
    /// Mean of +1/0/-1 over the period's reviews.
    pub mean_sentiment: f64,
    pub review_count: usize,
    /// `review_count` divided by the largest count in the series.
    pub normalized_count: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrendSeries {
    pub granularity: Granularity,
    pub buckets: Vec<TrendBucket>,
}

fn period_key(ts: i64, granularity: Granularity) -> (i32, u32) {
    let dt = DateTime::from_timestamp(ts, 0).unwrap_or(DateTime::UNIX_EPOCH);
    match granularity {
        Granularity::Year => (dt.year(), 0),
        Granularity::Month => (dt.year(), dt.month()),
    }
}

/// Per-period mean sentiment, ascending by period; empty periods are omitted.
pub fn sentiment_series(records: &[TimedLabel], granularity: Granularity) -> TrendSeries {
    let mut sums: BTreeMap<(i32, u32), (i64, usize)> = BTreeMap::new();
    for r in records {
        let entry = sums.entry(period_key(r.created_at, granularity)).or_default();
        entry.0 += i64::from(r.label.value());
        entry.1 += 1;
    }
    let max = sums.values().map(|&(_, n)| n).max().unwrap_or(0);
    let buckets = sums
        .into_iter()
        .map(|((year, month), (sum, n))| TrendBucket {
            period: match granularity {
                Granularity::Year => format!("{year:04}"),
                Granularity::Month => format!("{year:04}-{month:02}"),
            },
            mean_sentiment: sum as f64 / n as f64,
            review_count: n,
            normalized_count: n as f64 / max as f64,
        })
        .collect();
    TrendSeries {
        granularity,
        buckets,
    }
}
