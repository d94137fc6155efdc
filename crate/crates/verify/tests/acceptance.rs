//! Acceptance criteria, one test each. Every test writes a single
//! `ACCEPTANCE PASS|FAIL <name>: <detail>` line to stderr (outside the test
//! harness capture) and fails when its criterion does not hold.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revmon_cli::server::{router, AppState};
use revmon_core::filter::{detect_spam, filter_corpus, length_bucket, FilterConfig, LengthBucket};
use revmon_core::pipeline::{run_filter, run_sentiment, SentimentConfig};
use revmon_core::report::MonitorReport;
use revmon_core::sentiment::{EvaluationReport, LexiconClassifier, SentimentLabel};
use revmon_core::termstats::{count_ngrams, ngram_counts, tfidf_all, tfidf_scores, Aggregation};
use revmon_core::textprep::stem;
use revmon_core::topics::{
    cluster_hdbscan, ctfidf_keywords, mutual_reachability_mst, ClusterAssignment, HdbscanParams, Theme, ThemeSpec,
};
use revmon_core::Review;
use tower::ServiceExt;

/// Runs `f`, prints the verdict line and fails the test on error or when the
/// runtime limit is exceeded.
fn criterion(name: &str, limit: Duration, f: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let verdict = match result {
        Ok(detail) if elapsed < limit => Ok(detail),
        Ok(detail) => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
        Err(detail) => Err(detail),
    };
    let (tag, detail) = match &verdict {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    let _ = writeln!(std::io::stderr(), "ACCEPTANCE {tag} {name}: {detail} [{elapsed:.2?}]");
    if let Err(d) = verdict {
        panic!("{name}: {d}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn review(id: String, text: String, created_at: i64) -> Review {
    Review {
        review_id: id,
        created_at,
        text,
        recommended: true,
        language: "en".into(),
        source_app_id: "1".into(),
    }
}

#[test]
fn filter_boundaries() {
    criterion("filter boundaries", Duration::from_secs(1), || {
        let buckets = [5, 6, 50, 51].map(length_bucket);
        ensure!(
            buckets == [LengthBucket::Short, LengthBucket::Mid, LengthBucket::Mid, LengthBucket::Long],
            "bucket(5, 6, 50, 51) = {buckets:?}"
        );
        // The same boundaries through whole reviews.
        let text = |n: usize| (0..n).map(|i| format!("word{i}")).collect::<Vec<_>>().join(" ");
        let reviews: Vec<Review> = [5, 6, 50, 51].iter().map(|&n| review(format!("r{n}"), text(n), 1)).collect();
        let out = filter_corpus(&reviews, &FilterConfig::default());
        let s = out.stats;
        ensure!((s.short, s.mid, s.long, s.spam_removed) == (1, 2, 1, 0), "filter stats {s:?}");

        let config = FilterConfig::default();
        let six = detect_spam("nice game ###### ok", &config);
        let five = detect_spam("nice game ##### ok", &config);
        ensure!(six.is_spam, "6 consecutive special characters not flagged");
        ensure!(!five.is_spam, "5 consecutive special characters flagged: {five:?}");
        Ok("bucket(5)=Short, bucket(6)=Mid, bucket(50)=Mid, bucket(51)=Long; ASCII-art rule fires at 6, not at 5".into())
    });
}

#[test]
fn stemmer_oracle() {
    criterion("stemmer oracle", Duration::from_secs(1), || {
        let vocabulary = include_str!("../../core/tests/fixtures/porter_vocabulary.tsv");
        let pairs: Vec<(&str, &str)> = vocabulary.lines().filter_map(|l| l.split_once('\t')).collect();
        ensure!(pairs.len() >= 500, "vocabulary has only {} words", pairs.len());
        let mismatches: Vec<String> = pairs
            .iter()
            .filter(|(w, s)| stem(w) != *s)
            .map(|(w, s)| format!("{w}->{} (oracle {s})", stem(w)))
            .collect();
        let not_idempotent: Vec<String> = pairs
            .iter()
            .filter_map(|(w, _)| {
                let once = stem(w);
                let twice = stem(&once);
                (twice != once).then(|| format!("{w}->{once}->{twice}"))
            })
            .collect();
        let summary = format!(
            "{}/{} words match the oracle; stem idempotent on {}/{}",
            pairs.len() - mismatches.len(),
            pairs.len(),
            pairs.len() - not_idempotent.len(),
            pairs.len()
        );
        ensure!(mismatches.is_empty(), "{summary}; mismatches: {}", mismatches.join(", "));
        ensure!(
            not_idempotent.is_empty(),
            "{summary}; not idempotent e.g. {}",
            not_idempotent.iter().take(5).cloned().collect::<Vec<_>>().join(", ")
        );
        Ok(summary)
    });
}

#[test]
fn metric_definitions() {
    criterion("metric definitions", Duration::from_secs(1), || {
        let report = EvaluationReport::from_confusion([[4, 1, 0], [1, 2, 1], [0, 1, 5]]);
        ensure!((report.accuracy - 11.0 / 15.0).abs() < 1e-9, "accuracy {}", report.accuracy);
        // Rows are gold, columns predicted.
        //   positive: tp 4, predicted 5, actual 5
        //   neutral:  tp 2, predicted 4, actual 4
        //   negative: tp 5, predicted 6, actual 6
        let hand = [(0.8, 0.8, 0.8), (0.5, 0.5, 0.5), (5.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0)];
        for (label, (p, r, f)) in SentimentLabel::ALL.iter().zip(hand) {
            let m = report.class(*label);
            ensure!(
                (m.precision - p).abs() < 1e-9 && (m.recall - r).abs() < 1e-9 && (m.f1 - f).abs() < 1e-9,
                "{label:?}: got P={} R={} F1={}, want {p} {r} {f}",
                m.precision,
                m.recall,
                m.f1
            );
        }
        // Neutral never predicted.
        let zero = EvaluationReport::from_confusion([[3, 0, 1], [1, 0, 1], [0, 0, 2]]);
        let neutral = zero.class(SentimentLabel::Neutral);
        ensure!(neutral.precision == 0.0 && neutral.f1 == 0.0, "never-predicted class: {neutral:?}");
        let row = zero.render().lines().find(|l| l.starts_with("neutral")).unwrap_or_default().to_string();
        ensure!(row.split_whitespace().nth(1).is_some_and(|p| p.starts_with("0.00")), "rendered row {row:?}");
        Ok("accuracy 11/15; per-class P/R/F1 = hand values; never-predicted class precision 0.00".into())
    });
}

const POSITIVE: [&str; 8] = ["great", "fun", "love", "amazing", "awesome", "wonderful", "excellent", "fantastic"];
const NEGATIVE: [&str; 8] = ["awful", "terrible", "boring", "broken", "buggy", "hate", "horrible", "toxic"];
const FILLER: [&str; 6] = ["the game", "this world", "my evening", "the rooms", "each update", "the lobby"];

#[test]
fn trend_correctness() {
    criterion("trend correctness", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let per_year = 60;
        let mut reviews = Vec::new();
        let mut planted = Vec::new();
        for year in 0..8 {
            let fraction = 0.9 - 0.5 * year as f64 / 7.0;
            let positives = (fraction * per_year as f64).round() as usize;
            planted.push(positives);
            // 2016-07-01 plus whole years of 365.25 days.
            let base = 1_467_331_200 + (year as f64 * 31_557_600.0) as i64;
            for i in 0..per_year {
                let words = if i < positives { &POSITIVE } else { &NEGATIVE };
                let text = format!(
                    "{} was {} and {} all week",
                    FILLER[rng.random_range(0..FILLER.len())],
                    words[rng.random_range(0..words.len())],
                    words[rng.random_range(0..words.len())]
                );
                reviews.push(review(format!("y{year}-{i}"), text, base + rng.random_range(0..86_400 * 90)));
            }
        }
        let (filter, kept) = run_filter(&reviews, &FilterConfig::default());
        ensure!(kept.len() == reviews.len(), "filter dropped {} synthetic reviews", reviews.len() - kept.len());
        let config = SentimentConfig::default();
        let sentiment = run_sentiment(&kept, &filter, &config, &LexiconClassifier::default()).map_err(|e| e.to_string())?;
        let means: Vec<f64> = sentiment.trend.buckets.iter().map(|b| b.mean_sentiment).collect();
        ensure!(means.len() == 8, "{} trend buckets", means.len());
        let decreasing = means.windows(2).all(|w| w[1] < w[0]);
        let shown: Vec<String> = means.iter().map(|m| format!("{m:+.3}")).collect();
        ensure!(decreasing, "series not strictly decreasing: {}", shown.join(" "));
        Ok(format!("positives per year {planted:?} of {per_year}; mean sentiment {}", shown.join(" ")))
    });
}

fn brute_ngrams(docs: &[Vec<String>], n: usize) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for doc in docs {
        if doc.len() >= n {
            for i in 0..=doc.len() - n {
                *counts.entry(doc[i..i + n].join(" ")).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn ranking(scores: &HashMap<String, f64>) -> Vec<String> {
    let mut terms: Vec<(&String, f64)> = scores.iter().map(|(t, &s)| (t, s)).collect();
    terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    terms.into_iter().map(|(t, _)| t.clone()).collect()
}

#[test]
fn term_statistics_oracle() {
    criterion("term statistics oracle", Duration::from_secs(10), || {
        let vocab = ["kid", "scream", "crash", "game", "racist", "lag", "token", "fun", "voic", "chat", "updat", "room"];
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        let docs: Vec<Vec<String>> = (0..200)
            .map(|_| {
                let len = rng.random_range(0..=12);
                (0..len).map(|_| vocab[rng.random_range(0..vocab.len())].to_string()).collect()
            })
            .collect();

        for n in 1..=3 {
            let brute = brute_ngrams(&docs, n);
            let counted = count_ngrams(&docs, n);
            ensure!(counted == brute, "n={n}: count map differs from brute force");
            let mut want: Vec<(String, usize)> = brute.into_iter().collect();
            want.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let table = ngram_counts(&docs, n, want.len());
            let got: Vec<(String, usize)> = table.entries.into_iter().map(|g| (g.gram, g.count)).collect();
            ensure!(got == want, "n={n}: ranked table differs from brute force");
        }

        let n_docs = docs.len() as f64;
        let mut direct: HashMap<String, f64> = HashMap::new();
        for term in vocab {
            let df = docs.iter().filter(|d| d.iter().any(|t| t == term)).count() as f64;
            if df == 0.0 {
                continue;
            }
            let idf = ((1.0 + n_docs) / (1.0 + df)).ln() + 1.0;
            let score = docs.iter().map(|d| d.iter().filter(|t| *t == term).count() as f64 * idf).sum();
            direct.insert(term.to_string(), score);
        }
        let scores = tfidf_all(&docs, Aggregation::Sum);
        ensure!(scores.len() == direct.len(), "{} scored terms, {} expected", scores.len(), direct.len());
        let worst = direct.iter().map(|(t, s)| (scores[t] - s).abs()).fold(0.0, f64::max);
        ensure!(worst <= 1e-9, "TF-IDF differs from the formula by {worst:e}");

        let doubled: Vec<Vec<String>> = docs.iter().chain(docs.iter()).cloned().collect();
        let once = ranking(&scores);
        let twice = ranking(&tfidf_all(&doubled, Aggregation::Sum));
        let table: Vec<String> = tfidf_scores(&docs, vocab.len(), Aggregation::Sum).entries.into_iter().map(|t| t.term).collect();
        ensure!(table == once, "tfidf_scores ranking differs from sorted scores");
        ensure!(once == twice, "duplication changed the TF-IDF ranking:\n  once  {once:?}\n  twice {twice:?}");
        Ok(format!("n-gram tables n=1..3 equal brute force; max TF-IDF error {worst:.1e}; ranking of {} terms unchanged under duplication", once.len()))
    });
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Every labelled tree on `n` nodes via Prüfer sequences; returns the minimum total weight.
fn brute_force_mst(n: usize, weight: impl Fn(usize, usize) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    let total = n.pow((n - 2) as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut sum = 0.0;
        for &s in &seq {
            let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
            sum += weight(leaf, s);
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        sum += weight(rest[0], rest[1]);
        best = best.min(sum);
    }
    best
}

fn blobs_with_noise(seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| {
        // Box-Muller.
        let (u1, u2): (f64, f64) = (rng.random_range(f64::EPSILON..1.0), rng.random());
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let centers = [[0.0, 0.0], [10.0, 0.0]];
    let mut points = Vec::new();
    for c in centers {
        for _ in 0..30 {
            points.push(vec![c[0] + 0.1 * normal(&mut rng), c[1] + 0.1 * normal(&mut rng)]);
        }
    }
    let mut outliers = Vec::new();
    while outliers.len() < 5 {
        let p = vec![rng.random_range(-45.0..55.0), rng.random_range(-50.0..50.0)];
        if centers.iter().all(|c| euclid(c, &p) > 15.0) {
            outliers.push(points.len());
            points.push(p);
        }
    }
    (points, outliers)
}

#[test]
fn hdbscan() {
    criterion("hdbscan", Duration::from_secs(30), || {
        // (a)
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for instance in 0..20 {
            let points: Vec<Vec<f64>> =
                (0..6).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let min_samples = 1 + instance % 5;
            let core: Vec<f64> = points
                .iter()
                .map(|p| {
                    let mut d: Vec<f64> = points.iter().map(|q| euclid(p, q)).collect();
                    d.sort_by(f64::total_cmp);
                    d[min_samples - 1]
                })
                .collect();
            let want = brute_force_mst(6, |a, b| euclid(&points[a], &points[b]).max(core[a]).max(core[b]));
            let got: f64 = mutual_reachability_mst(&points, min_samples).map_err(|e| e.to_string())?.iter().map(|e| e.weight).sum();
            ensure!((got - want).abs() < 1e-9, "(a) instance {instance}: MST weight {got} vs brute force {want}");
        }

        // (b)
        let (points, outliers) = blobs_with_noise(65);
        let params = HdbscanParams::new(10);
        let result = cluster_hdbscan(&points, params).map_err(|e| e.to_string())?;
        ensure!(result.k == 2, "(b) K = {}", result.k);
        let missed: Vec<usize> = outliers.iter().copied().filter(|&i| result.labels[i] != -1).collect();
        ensure!(missed.is_empty(), "(b) outliers {missed:?} not labelled noise");
        let blob_labels: Vec<HashSet<i32>> =
            [0..30, 30..60].map(|r| r.map(|i| result.labels[i]).collect::<HashSet<_>>()).to_vec();

        // (c)
        let rerun = cluster_hdbscan(&points, params).map_err(|e| e.to_string())?;
        let pooled = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| cluster_hdbscan(&points, params))
            .map_err(|e| e.to_string())?;
        ensure!(rerun == result && pooled == result, "(c) reruns differ");
        Ok(format!(
            "(a) 20/20 MST weights equal brute force; (b) K=2, 5/5 outliers noise, {} noise total, blob labels {:?}; (c) reruns identical",
            result.noise_count(),
            blob_labels
        ))
    });
}

#[test]
fn ctfidf() {
    criterion("c-tf-idf", Duration::from_secs(1), || {
        let docs = |raw: &[&[&str]]| -> Vec<Vec<String>> {
            raw.iter().map(|d| d.iter().map(|s| s.to_string()).collect()).collect()
        };
        let two = docs(&[&["racist", "racist", "kid"], &["crash", "kid"]]);
        let assignment = |labels: Vec<i32>| {
            let n = labels.len();
            let k = labels.iter().copied().max().map_or(0, |m| (m + 1) as usize);
            ClusterAssignment {
                labels,
                k,
                probabilities: vec![1.0; n],
            }
        };
        let out = ctfidf_keywords(&two, &assignment(vec![0, 1]), 10);
        let weight = |class: usize, term: &str| {
            let i = out.vocabulary.iter().position(|t| t == term).unwrap();
            out.vectors[class].iter().find(|&(j, _)| j == i).map_or(0.0, |(_, w)| w)
        };
        let racist = weight(0, "racist");
        let kid = weight(0, "kid");
        ensure!((racist - 1.6219).abs() <= 1e-4, "weight(racist, c1) = {racist}");
        ensure!((kid - 0.8109).abs() <= 1e-4, "weight(kid, c1) = {kid}");

        // One class: rank by tf * ln 2.
        let single = docs(&[&["fun", "fun", "game", "lag"], &["fun", "game", "crash", "fun"], &["lag", "fun"]]);
        let out = ctfidf_keywords(&single, &assignment(vec![0, 0, 0]), 10);
        let got: Vec<&str> = out.keywords[0].iter().map(|t| t.term.as_str()).collect();
        let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
        for t in single.iter().flatten() {
            *tf.entry(t.as_str()).or_default() += 1;
        }
        let mut want: Vec<(&str, f64)> = tf.iter().map(|(&t, &c)| (t, c as f64 * 2f64.ln())).collect();
        want.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let want: Vec<&str> = want.into_iter().map(|(t, _)| t).collect();
        ensure!(got == want, "single-class ranking {got:?}, tf·ln 2 ranking {want:?}");
        let fun = out.keywords[0][0].weight;
        Ok(format!(
            "weight(racist,c1)={racist:.4}, weight(kid,c1)={kid:.4}; single-class ranking {got:?} equals tf·ln 2 ranking \
             (weights are tf·ln(1+A/tf), e.g. fun: {fun:.4} vs 5·ln 2 = {:.4})",
            5.0 * 2f64.ln()
        ))
    });
}

#[test]
fn end_to_end_fixture() {
    criterion("end-to-end fixture", Duration::from_secs(60), || {
        let runs = [&[][..], &[][..], &["--threads", "1"][..], &["--threads", "4"][..]];
        let mut bodies = Vec::new();
        for extra in runs {
            let out = tempfile::tempdir().map_err(|e| e.to_string())?;
            let path = common::fixture_report(out.path(), extra);
            bodies.push(fs::read(path).map_err(|e| e.to_string())?);
        }
        ensure!(bodies[1] == bodies[0], "two default runs differ");
        ensure!(bodies[2] == bodies[0], "--threads 1 differs from the default run");
        ensure!(bodies[3] == bodies[0], "--threads 4 differs from the default run");
        let report = MonitorReport::from_json(std::str::from_utf8(&bodies[0]).unwrap()).map_err(|e| e.to_string())?;
        let topics = report.topics.as_ref().ok_or("report has no topics")?;
        ensure!(report.corpus.spam_removed == 18, "{} spam removed, 18 planted", report.corpus.spam_removed);
        ensure!(topics.model.k() == 4, "{} topics, 4 planted negative clusters", topics.model.k());
        Ok(format!(
            "fetch→filter→prep→sentiment→terms→topics→report: {} bytes identical over 2 runs and 1/4 threads; \
             {} reviews, {} spam, {} analyzed, {} negative, K={}",
            bodies[0].len(),
            report.corpus.total,
            report.corpus.spam_removed,
            report.corpus.analyzed,
            report.sentiment.distribution.negative,
            topics.model.k()
        ))
    });
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: String) -> (StatusCode, String) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

#[test]
fn theme_conservation() {
    criterion("theme conservation", Duration::from_secs(60), || {
        let out = tempfile::tempdir().map_err(|e| e.to_string())?;
        let report_path = common::fixture_report(out.path(), &[]);
        let state = AppState::load(&report_path, out.path().join("themes.json")).map_err(|e| e.to_string())?;
        let report = MonitorReport::from_json(&fs::read_to_string(&report_path).unwrap()).map_err(|e| e.to_string())?;
        let sizes = report.topics.as_ref().ok_or("report has no topics")?.model.topic_sizes.clone();
        let k = sizes.len();
        let total: usize = sizes.iter().sum();
        let app = router(Arc::new(state), None);
        let rt = tokio::runtime::Runtime::new().unwrap();

        // Each topic goes to one of k themes or stays unassigned (index k).
        let strategy = proptest::collection::vec(0..=k, k);
        let mut runner = TestRunner::new(ProptestConfig {
            cases: 256,
            ..ProptestConfig::default()
        });
        let outcome = runner.run(&strategy, |slots| {
            let themes: Vec<Theme> = (0..k)
                .filter_map(|t| {
                    let members: Vec<usize> = (0..k).filter(|&topic| slots[topic] == t).collect();
                    (!members.is_empty()).then(|| Theme {
                        name: format!("theme {t}"),
                        member_topics: members,
                        review_count: 0,
                    })
                })
                .collect();
            let spec = serde_json::to_string(&ThemeSpec { themes }).unwrap();
            let (status, body) = rt.block_on(call(&app, "POST", "/api/themes", spec));
            prop_assert_eq!(status, StatusCode::OK, "{}", body);
            let derived: serde_json::Value = serde_json::from_str(&body).unwrap();
            let themed: u64 = derived["themes"].as_array().unwrap().iter().map(|t| t["review_count"].as_u64().unwrap()).sum();
            let unassigned: u64 =
                derived["unassigned_topics"].as_array().unwrap().iter().map(|t| sizes[t.as_u64().unwrap() as usize] as u64).sum();
            prop_assert_eq!(themed + unassigned, total as u64);
            Ok(())
        });
        outcome.map_err(|e| format!("conservation: {e}"))?;

        let overlap = r#"{"themes":[{"name":"Racism","member_topics":[0,1]},{"name":"Kids","member_topics":[1]}]}"#;
        let (status, body) = rt.block_on(call(&app, "POST", "/api/themes", overlap.to_string()));
        ensure!(status == StatusCode::UNPROCESSABLE_ENTITY, "overlap answered {status}: {body}");
        Ok(format!(
            "256 random specs over K={k} (Σ sizes {total}) conserve counts through POST /api/themes; overlap → 422 {body}"
        ))
    });
}
