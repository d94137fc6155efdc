use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{SentimentError, SentimentLabel, SentimentRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub review_id: String,
    pub label: SentimentLabel,
}

/// Parses a line-delimited gold file of `{"review_id", "label"}` objects.
pub fn parse_gold(body: &str) -> Result<Vec<GoldLabel>, SentimentError> {
    #[derive(Deserialize)]
    struct Line {
        review_id: String,
        label: String,
    }
    let mut gold = Vec::new();
    for (i, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(line).map_err(|e| SentimentError::Gold {
            line: i + 1,
            message: e.to_string(),
        })?;
        let label = parsed.label.parse().map_err(|_| SentimentError::Gold {
            line: i + 1,
            message: format!("unknown label {:?}", parsed.label),
        })?;
        gold.push(GoldLabel {
            review_id: parsed.review_id,
            label,
        });
    }
    Ok(gold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: SentimentLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of gold items of this class.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Rows are true labels, columns predicted, both in Positive, Neutral, Negative order.
    pub confusion: [[u64; 3]; 3],
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvaluationReport {
    /// Metrics of a confusion matrix; any zero denominator yields 0.0.
    pub fn from_confusion(confusion: [[u64; 3]; 3]) -> Self {
        let total: u64 = confusion.iter().flatten().sum();
        let trace: u64 = (0..3).map(|i| confusion[i][i]).sum();
        let per_class = SentimentLabel::ALL
            .iter()
            .map(|&label| {
                let c = label.index();
                let tp = confusion[c][c];
                let predicted: u64 = (0..3).map(|r| confusion[r][c]).sum();
                let actual: u64 = confusion[c].iter().sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, actual);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics {
                    label,
                    precision,
                    recall,
                    f1,
                    support: actual,
                }
            })
            .collect();
        EvaluationReport {
            confusion,
            accuracy: ratio(trace, total),
            per_class,
        }
    }

    pub fn class(&self, label: SentimentLabel) -> &ClassMetrics {
        &self.per_class[label.index()]
    }

    /// Plain-text table for terminals.
    pub fn render(&self) -> String {
        let mut out = format!("accuracy  {:.4}\n", self.accuracy);
        out.push_str("class       precision  recall  f1      support\n");
        for m in &self.per_class {
            out.push_str(&format!(
                "{:<10}  {:<9.4}  {:<6.4}  {:<6.4}  {}\n",
                m.label.as_str(),
                m.precision,
                m.recall,
                m.f1,
                m.support
            ));
        }
        out
    }
}

/// Compares predictions against gold labels.
///
/// Every gold id needs exactly one prediction; predictions for other ids are
/// ignored.
pub fn evaluate(
    predicted: &[SentimentRecord],
    gold: &[GoldLabel],
) -> Result<EvaluationReport, SentimentError> {
    let mut by_id: HashMap<&str, Vec<SentimentLabel>> = HashMap::new();
    for p in predicted {
        by_id.entry(p.review_id.as_str()).or_default().push(p.label);
    }
    let mut missing = BTreeSet::new();
    let mut duplicates = BTreeSet::new();
    let mut gold_seen = BTreeSet::new();
    let mut confusion = [[0u64; 3]; 3];
    for g in gold {
        if !gold_seen.insert(g.review_id.as_str()) {
            duplicates.insert(g.review_id.clone());
            continue;
        }
        match by_id.get(g.review_id.as_str()).map(Vec::as_slice) {
            None | Some([]) => {
                missing.insert(g.review_id.clone());
            }
            Some([label]) => confusion[g.label.index()][label.index()] += 1,
            Some(_) => {
                duplicates.insert(g.review_id.clone());
            }
        }
    }
    if !missing.is_empty() || !duplicates.is_empty() {
        return Err(SentimentError::Evaluation {
            missing: missing.into_iter().collect(),
            duplicates: duplicates.into_iter().collect(),
        });
    }
    Ok(EvaluationReport::from_confusion(confusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use SentimentLabel::*;

    fn record(id: &str, label: SentimentLabel) -> SentimentRecord {
        SentimentRecord {
            review_id: id.into(),
            label,
            confidence: 1.0,
            classifier_id: "test".into(),
        }
    }

    fn gold(id: &str, label: SentimentLabel) -> GoldLabel {
        GoldLabel {
            review_id: id.into(),
            label,
        }
    }

    #[test]
    fn perfect_predictions() {
        let labels = [Positive, Neutral, Negative, Positive, Negative, Neutral, Positive, Positive, Negative, Neutral];
        let preds: Vec<_> = labels.iter().enumerate().map(|(i, &l)| record(&i.to_string(), l)).collect();
        let golds: Vec<_> = labels.iter().enumerate().map(|(i, &l)| gold(&i.to_string(), l)).collect();
        let report = evaluate(&preds, &golds).unwrap();
        assert_eq!(report.accuracy, 1.0);
        for m in &report.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn hand_computed_matrix() {
        let r = EvaluationReport::from_confusion([[4, 1, 0], [1, 2, 1], [0, 1, 5]]);
        assert!((r.accuracy - 11.0 / 15.0).abs() < 1e-12);
        let pos = r.class(Positive);
        assert!((pos.precision - 0.8).abs() < 1e-12 && (pos.recall - 0.8).abs() < 1e-12);
        let neu = r.class(Neutral);
        assert!((neu.precision - 0.5).abs() < 1e-12 && (neu.f1 - 0.5).abs() < 1e-12);
        let neg = r.class(Negative);
        assert!((neg.precision - 5.0 / 6.0).abs() < 1e-12 && (neg.recall - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn never_predicted_class_scores_zero() {
        let r = EvaluationReport::from_confusion([[5, 0, 1], [2, 0, 2], [1, 0, 4]]);
        let neu = r.class(Neutral);
        assert_eq!(neu.precision, 0.0);
        assert_eq!(neu.recall, 0.0);
        assert_eq!(neu.f1, 0.0);
    }

    #[test]
    fn missing_and_duplicate_predictions() {
        let preds = vec![record("a", Positive), record("b", Neutral), record("b", Negative)];
        let golds = vec![gold("a", Positive), gold("b", Neutral), gold("c", Negative)];
        match evaluate(&preds, &golds) {
            Err(SentimentError::Evaluation { missing, duplicates }) => {
                assert_eq!(missing, vec!["c".to_string()]);
                assert_eq!(duplicates, vec!["b".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gold_file_parsing() {
        let body = "{\"review_id\":\"1\",\"label\":\"positive\"}\n\n{\"review_id\":\"2\",\"label\":\"negative\"}\n";
        assert_eq!(parse_gold(body).unwrap(), vec![gold("1", Positive), gold("2", Negative)]);
        let bad = "{\"review_id\":\"1\",\"label\":\"mixed\"}";
        assert!(matches!(parse_gold(bad), Err(SentimentError::Gold { line: 1, .. })));
    }

    fn label_strategy() -> impl Strategy<Value = SentimentLabel> {
        prop_oneof![Just(Positive), Just(Neutral), Just(Negative)]
    }

    proptest! {
        #[test]
        fn metric_invariants(pairs in proptest::collection::vec((label_strategy(), label_strategy()), 1..60)) {
            let golds: Vec<_> = pairs.iter().enumerate().map(|(i, (t, _))| gold(&i.to_string(), *t)).collect();
            let preds: Vec<_> = pairs.iter().enumerate().map(|(i, (_, p))| record(&i.to_string(), *p)).collect();
            let r = evaluate(&preds, &golds).unwrap();
            let total: u64 = r.confusion.iter().flatten().sum();
            let trace: u64 = (0..3).map(|i| r.confusion[i][i]).sum();
            prop_assert_eq!(r.accuracy, trace as f64 / total as f64);
            for m in &r.per_class {
                for v in [m.precision, m.recall, m.f1] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
                if m.precision > 0.0 && m.recall > 0.0 {
                    prop_assert!(m.f1 >= m.precision.min(m.recall) - 1e-12);
                    prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
                }
            }

            let mut shuffled_preds = preds.clone();
            shuffled_preds.reverse();
            let mut shuffled_gold = golds.clone();
            shuffled_gold.rotate_left(golds.len() / 2);
            prop_assert_eq!(evaluate(&shuffled_preds, &shuffled_gold).unwrap(), r);
        }
    }
}
