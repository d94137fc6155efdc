//! Spam detection and length bucketing.
//!
//! A review is spam when it contains a run of special characters long enough
//! to be ASCII art, or when its words or characters repeat so much that few of
//! them are distinct. The surviving reviews are bucketed by whitespace word
//! count; only the middle bucket is analysed downstream.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ingest::Review;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpamReason {
    AsciiArt,
    RepeatedWords,
    RepeatedChars,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpamVerdict {
    pub is_spam: bool,
    pub reason: SpamReason,
    pub evidence: String,
}

impl SpamVerdict {
    fn clean() -> Self {
        SpamVerdict {
            is_spam: false,
            reason: SpamReason::None,
            evidence: String::new(),
        }
    }

    fn spam(reason: SpamReason, evidence: String) -> Self {
        SpamVerdict {
            is_spam: true,
            reason,
            evidence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthBucket {
    /// At most 5 words.
    Short,
    /// 6 to 50 words.
    Mid,
    /// More than 50 words.
    Long,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub consecutive_special_threshold: usize,
    pub min_tokens_for_ratio: usize,
    pub word_unique_ratio: f64,
    pub char_unique_ratio: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            consecutive_special_threshold: 6,
            min_tokens_for_ratio: 10,
            word_unique_ratio: 0.20,
            char_unique_ratio: 0.10,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.consecutive_special_threshold == 0 || self.min_tokens_for_ratio == 0 {
            return Err("filter thresholds must be positive".into());
        }
        for (name, r) in [
            ("word_unique_ratio", self.word_unique_ratio),
            ("char_unique_ratio", self.char_unique_ratio),
        ] {
            if !(r > 0.0 && r < 1.0) {
                return Err(format!("{name} must lie in (0, 1), got {r}"));
            }
        }
        Ok(())
    }
}

fn is_special(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Longest run of consecutive special characters, with its content.
fn longest_special_run(text: &str) -> (usize, &str) {
    let mut best = (0, "");
    let mut start = None;
    let mut len = 0;
    for (i, c) in text.char_indices() {
        if is_special(c) {
            let s = *start.get_or_insert(i);
            len += 1;
            if len > best.0 {
                best = (len, &text[s..i + c.len_utf8()]);
            }
        } else {
            start = None;
            len = 0;
        }
    }
    best
}

pub fn detect_spam(text: &str, config: &FilterConfig) -> SpamVerdict {
    let (run, evidence) = longest_special_run(text);
    if run >= config.consecutive_special_threshold {
        return SpamVerdict::spam(SpamReason::AsciiArt, evidence.chars().take(32).collect());
    }

    let words: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
    if words.len() >= config.min_tokens_for_ratio {
        let distinct = words.iter().collect::<HashSet<_>>().len();
        let ratio = distinct as f64 / words.len() as f64;
        if ratio < config.word_unique_ratio {
            return SpamVerdict::spam(
                SpamReason::RepeatedWords,
                format!("{distinct}/{} distinct words", words.len()),
            );
        }
        return SpamVerdict::clean();
    }

    // Texts too short for the word rule: a blob of few distinct characters.
    let chars: Vec<char> = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    if chars.len() >= config.min_tokens_for_ratio {
        let distinct = chars.iter().collect::<HashSet<_>>().len();
        let ratio = distinct as f64 / chars.len() as f64;
        if ratio < config.char_unique_ratio {
            return SpamVerdict::spam(
                SpamReason::RepeatedChars,
                format!("{distinct}/{} distinct characters", chars.len()),
            );
        }
    }
    SpamVerdict::clean()
}

pub fn length_bucket(token_count: usize) -> LengthBucket {
    match token_count {
        0..=5 => LengthBucket::Short,
        6..=50 => LengthBucket::Mid,
        _ => LengthBucket::Long,
    }
}

/// Whitespace word count of the raw text.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub spam_removed: usize,
    pub short: usize,
    pub mid: usize,
    pub long: usize,
}

impl FilterStats {
    pub fn total(&self) -> usize {
        self.spam_removed + self.short + self.mid + self.long
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    /// Non-spam mid-length reviews, in input order.
    pub kept: Vec<Review>,
    pub stats: FilterStats,
}

pub fn filter_corpus(reviews: &[Review], config: &FilterConfig) -> FilterOutcome {
    use rayon::prelude::*;

    let verdicts: Vec<Option<LengthBucket>> = reviews
        .par_iter()
        .map(|r| {
            if detect_spam(&r.text, config).is_spam {
                None
            } else {
                Some(length_bucket(word_count(&r.text)))
            }
        })
        .collect();

    let mut stats = FilterStats::default();
    let mut kept = Vec::new();
    for (review, verdict) in reviews.iter().zip(verdicts) {
        match verdict {
            None => stats.spam_removed += 1,
            Some(LengthBucket::Short) => stats.short += 1,
            Some(LengthBucket::Long) => stats.long += 1,
            Some(LengthBucket::Mid) => {
                stats.mid += 1;
                kept.push(review.clone());
            }
        }
    }
    FilterOutcome { kept, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn review(id: &str, text: &str) -> Review {
        Review {
            review_id: id.into(),
            created_at: 1,
            text: text.into(),
            recommended: true,
            language: "en".into(),
            source_app_id: "1".into(),
        }
    }

    fn words(n: usize) -> String {
        (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn ascii_art_block() {
        let v = detect_spam("████████ nice art", &FilterConfig::default());
        assert!(v.is_spam);
        assert_eq!(v.reason, SpamReason::AsciiArt);
        assert_eq!(v.evidence, "████████");
    }

    #[test]
    fn ascii_art_threshold_is_six() {
        let cfg = FilterConfig::default();
        assert!(!detect_spam("look ***** here", &cfg).is_spam);
        assert_eq!(detect_spam("look ****** here", &cfg).reason, SpamReason::AsciiArt);
    }

    #[test]
    fn repeated_words() {
        let v = detect_spam("fun fun fun fun fun fun fun fun fun fun", &FilterConfig::default());
        assert!(v.is_spam);
        assert_eq!(v.reason, SpamReason::RepeatedWords);
    }

    #[test]
    fn repeated_chars_in_short_blob() {
        let v = detect_spam("aaaaaaaaaaaaaaaaaaaaaaaaaaaaaa", &FilterConfig::default());
        assert_eq!(v.reason, SpamReason::RepeatedChars);
        assert!(!detect_spam("gg", &FilterConfig::default()).is_spam);
    }

    #[test]
    fn legitimate_review() {
        let v = detect_spam("Great game but the community is toxic", &FilterConfig::default());
        assert!(!v.is_spam);
        assert_eq!(v.reason, SpamReason::None);
        assert!(v.evidence.is_empty());
    }

    #[test]
    fn ordinary_long_review_not_flagged() {
        let text = "I have played this for three years and the building tools are still \
                    the best part, although the lobby is full of screaming kids and the \
                    moderators never seem to respond to reports about harassment at all";
        assert!(!detect_spam(text, &FilterConfig::default()).is_spam);
    }

    #[test]
    fn bucket_boundaries() {
        assert_eq!(length_bucket(0), LengthBucket::Short);
        assert_eq!(length_bucket(5), LengthBucket::Short);
        assert_eq!(length_bucket(6), LengthBucket::Mid);
        assert_eq!(length_bucket(50), LengthBucket::Mid);
        assert_eq!(length_bucket(51), LengthBucket::Long);
    }

    #[test]
    fn filter_composition() {
        let reviews = vec![
            review("spam", "▓▓▓▓▓▓▓▓▓▓ buy now"),
            review("short", "fun game lol"),
            review("mid", &words(20)),
            review("long", &words(60)),
        ];
        let out = filter_corpus(&reviews, &FilterConfig::default());
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.kept[0].review_id, "mid");
        assert_eq!(
            out.stats,
            FilterStats {
                spam_removed: 1,
                short: 1,
                mid: 1,
                long: 1
            }
        );
    }

    #[test]
    fn filter_empty_and_all_mid() {
        let out = filter_corpus(&[], &FilterConfig::default());
        assert!(out.kept.is_empty());
        assert_eq!(out.stats, FilterStats::default());

        let reviews: Vec<Review> = (0..7).map(|i| review(&i.to_string(), &words(8 + i))).collect();
        let out = filter_corpus(&reviews, &FilterConfig::default());
        assert_eq!(out.kept, reviews);
        assert_eq!(out.stats.mid, 7);
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::default().validate().is_ok());
        let bad = FilterConfig {
            word_unique_ratio: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn stats_partition_input(texts in proptest::collection::vec("[a-z#*█ ]{0,80}", 0..30)) {
            let reviews: Vec<Review> = texts.iter().enumerate().map(|(i, t)| review(&i.to_string(), t)).collect();
            let out = filter_corpus(&reviews, &FilterConfig::default());
            prop_assert_eq!(out.stats.total(), reviews.len());
            prop_assert_eq!(out.kept.len(), out.stats.mid);
        }

        #[test]
        fn lowering_threshold_never_unflags(text in "[a-z#*█! ]{0,60}", t in 2usize..10) {
            let high = FilterConfig { consecutive_special_threshold: t, ..Default::default() };
            let low = FilterConfig { consecutive_special_threshold: t - 1, ..Default::default() };
            if detect_spam(&text, &high).is_spam {
                prop_assert!(detect_spam(&text, &low).is_spam);
            }
        }

        #[test]
        fn buckets_partition_counts(n in 0usize..500) {
            let b = length_bucket(n);
            prop_assert_eq!(b == LengthBucket::Short, n <= 5);
            prop_assert_eq!(b == LengthBucket::Mid, (6..=50).contains(&n));
            prop_assert_eq!(b == LengthBucket::Long, n > 50);
        }
    }
}
