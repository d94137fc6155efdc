use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::client::{Client, FetchError};
use super::{Review, INITIAL_CURSOR};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("corpus io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corpus {path} line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Append-only line-delimited review corpus.
///
/// Holds the set of persisted ids so appends never duplicate a review. The
/// first seen version of a review wins; later edits with the same id are
/// counted as duplicates.
#[derive(Debug)]
pub struct CorpusStore {
    path: PathBuf,
    ids: HashSet<String>,
}

impl CorpusStore {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let mut ids = HashSet::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io_err(&path))?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(io_err(&path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let review: Review =
                    serde_json::from_str(&line).map_err(|e| StoreError::Malformed {
                        path: path.clone(),
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                ids.insert(review.review_id);
            }
        }
        Ok(CorpusStore { path, ids })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn count(&self) -> usize {
        self.ids.len()
    }

    pub fn contains(&self, review_id: &str) -> bool {
        self.ids.contains(review_id)
    }

    /// Appends unseen reviews; returns `(appended, duplicates)`.
    pub fn append(&mut self, reviews: &[Review]) -> Result<(usize, usize), StoreError> {
        let fresh: Vec<&Review> = {
            let mut seen_here = HashSet::new();
            reviews
                .iter()
                .filter(|r| !self.ids.contains(&r.review_id) && seen_here.insert(&r.review_id))
                .collect()
        };
        let duplicates = reviews.len() - fresh.len();
        if fresh.is_empty() {
            return Ok((0, duplicates));
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io_err(&self.path))?;
        let mut out = BufWriter::new(file);
        for review in &fresh {
            let line = serde_json::to_string(review).expect("review serializes");
            writeln!(out, "{line}").map_err(io_err(&self.path))?;
        }
        out.flush().map_err(io_err(&self.path))?;
        for review in &fresh {
            self.ids.insert(review.review_id.clone());
        }
        Ok((fresh.len(), duplicates))
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        let mut name = self.path.as_os_str().to_owned();
        name.push(".checkpoint");
        PathBuf::from(name)
    }

    pub fn read_checkpoint(&self) -> Result<Option<Checkpoint>, StoreError> {
        let path = self.checkpoint_path();
        match fs::read_to_string(&path) {
            Ok(body) => serde_json::from_str(&body)
                .map(Some)
                .map_err(|e| StoreError::Malformed {
                    path,
                    line: 1,
                    message: e.to_string(),
                }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    fn write_checkpoint(&self, checkpoint: &Checkpoint) -> Result<(), StoreError> {
        let path = self.checkpoint_path();
        let tmp = path.with_extension("checkpoint.tmp");
        let body = serde_json::to_string(checkpoint).expect("checkpoint serializes");
        fs::write(&tmp, body).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    fn clear_checkpoint(&self) -> Result<(), StoreError> {
        let path = self.checkpoint_path();
        match fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(io_err(&path)(e)),
        }
    }
}

/// Cursor reached by an unfinished sync.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub app_id: String,
    pub cursor: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncOptions {
    pub page_size: u32,
    /// Language requested from the storefront.
    pub language: String,
}

impl Default for SyncOptions {
    fn default() -> Self {
        SyncOptions {
            page_size: 100,
            language: "english".into(),
        }
    }
}

/// `fetched == appended + deduped`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SyncStats {
    pub fetched: usize,
    pub appended: usize,
    pub deduped: usize,
    pub pages: usize,
}

#[derive(Debug, Error)]
pub enum SyncError {
    #[error("sync interrupted after {} page(s); resume from cursor {resume_cursor:?}: {source}", stats.pages)]
    Fetch {
        stats: SyncStats,
        resume_cursor: String,
        #[source]
        source: FetchError,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Pulls every page for `app_id` into `store`, newest first.
///
/// Starts from the stored checkpoint when a previous sync of the same app was
/// interrupted. The checkpoint is rewritten after every page and removed once
/// the cursor is exhausted.
pub fn sync_corpus(
    client: &mut Client,
    app_id: &str,
    store: &mut CorpusStore,
    options: &SyncOptions,
) -> Result<SyncStats, SyncError> {
    let mut cursor = match store.read_checkpoint()? {
        Some(cp) if cp.app_id == app_id => {
            log::info!("resuming sync of {app_id} from cursor {:?}", cp.cursor);
            cp.cursor
        }
        _ => INITIAL_CURSOR.to_string(),
    };
    let mut stats = SyncStats::default();
    loop {
        let page = match client.fetch_page(app_id, &cursor, options.page_size, &options.language) {
            Ok(page) => page,
            Err(source) => {
                return Err(SyncError::Fetch {
                    stats,
                    resume_cursor: cursor,
                    source,
                })
            }
        };
        if !page.reviews.is_empty() {
            let (appended, deduped) = store.append(&page.reviews)?;
            stats.pages += 1;
            stats.fetched += page.reviews.len();
            stats.appended += appended;
            stats.deduped += deduped;
        }
        if page.exhausted {
            store.clear_checkpoint()?;
            return Ok(stats);
        }
        cursor = page.next_cursor;
        store.write_checkpoint(&Checkpoint {
            app_id: app_id.to_string(),
            cursor: cursor.clone(),
        })?;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    /// Keep only this language; `None` keeps all.
    pub language: Option<String>,
    /// Inclusive lower bound on `created_at`.
    pub from: Option<i64>,
    /// Inclusive upper bound on `created_at`.
    pub to: Option<i64>,
    /// Skip malformed lines instead of failing.
    pub lenient: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            language: Some("en".into()),
            from: None,
            to: None,
            lenient: false,
        }
    }
}

impl LoadOptions {
    pub fn all() -> Self {
        LoadOptions {
            language: None,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoadedCorpus {
    /// Sorted ascending by `(created_at, review_id)`.
    pub reviews: Vec<Review>,
    pub skipped: usize,
}

pub type LoadError = StoreError;

pub fn load_corpus(path: impl AsRef<Path>, options: &LoadOptions) -> Result<LoadedCorpus, LoadError> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut corpus = LoadedCorpus::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Review>(&line)
            .map_err(|e| e.to_string())
            .and_then(|r| {
                if r.created_at > 0 {
                    Ok(r)
                } else {
                    Err(format!("created_at must be positive, got {}", r.created_at))
                }
            });
        let review = match parsed {
            Ok(r) => r,
            Err(_) if options.lenient => {
                corpus.skipped += 1;
                continue;
            }
            Err(message) => {
                return Err(StoreError::Malformed {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message,
                })
            }
        };
        if let Some(lang) = &options.language {
            if &review.language != lang {
                continue;
            }
        }
        if options.from.is_some_and(|from| review.created_at < from)
            || options.to.is_some_and(|to| review.created_at > to)
        {
            continue;
        }
        corpus.reviews.push(review);
    }
    corpus
        .reviews
        .sort_by(|a, b| (a.created_at, &a.review_id).cmp(&(b.created_at, &b.review_id)));
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn review(id: &str, ts: i64) -> Review {
        Review {
            review_id: id.into(),
            created_at: ts,
            text: format!("text {id}"),
            recommended: true,
            language: "en".into(),
            source_app_id: "1".into(),
        }
    }

    #[test]
    fn append_dedups_within_and_across_batches() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = CorpusStore::open(dir.path().join("c.jsonl")).unwrap();
        assert_eq!(store.append(&[review("a", 1), review("a", 1), review("b", 2)]).unwrap(), (2, 1));
        assert_eq!(store.append(&[review("b", 2), review("c", 3)]).unwrap(), (1, 1));
        assert_eq!(store.count(), 3);
        let reopened = CorpusStore::open(store.path()).unwrap();
        assert_eq!(reopened.count(), 3);
    }

    #[test]
    fn load_sorts_and_filters_inclusive() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = CorpusStore::open(dir.path().join("c.jsonl")).unwrap();
        store
            .append(&[review("e", 50), review("d", 40), review("b", 20), review("a", 20), review("c", 30)])
            .unwrap();
        let all = load_corpus(store.path(), &LoadOptions::default()).unwrap();
        let ids: Vec<_> = all.reviews.iter().map(|r| r.review_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "d", "e"]);

        let opts = LoadOptions {
            from: Some(30),
            to: Some(40),
            ..Default::default()
        };
        let ranged = load_corpus(store.path(), &opts).unwrap();
        assert_eq!(ranged.reviews.len(), 2);

        let none = LoadOptions {
            from: Some(100),
            ..Default::default()
        };
        assert!(load_corpus(store.path(), &none).unwrap().reviews.is_empty());
    }

    #[test]
    fn malformed_line_strict_and_lenient() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let line = |id: &str, ts: i64| serde_json::to_string(&review(id, ts)).unwrap();
        let body = format!("{}\n{}\n{{not json\n{}\n", line("a", 1), line("b", 2), line("c", 3));
        fs::write(&path, body).unwrap();

        match load_corpus(&path, &LoadOptions::default()) {
            Err(StoreError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed error, got {other:?}"),
        }
        let lenient = LoadOptions {
            lenient: true,
            ..Default::default()
        };
        let loaded = load_corpus(&path, &lenient).unwrap();
        assert_eq!(loaded.reviews.len(), 3);
        assert_eq!(loaded.skipped, 1);
    }

    #[test]
    fn language_filter() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = CorpusStore::open(dir.path().join("c.jsonl")).unwrap();
        let mut de = review("x", 5);
        de.language = "de".into();
        store.append(&[review("a", 1), de]).unwrap();
        assert_eq!(load_corpus(store.path(), &LoadOptions::default()).unwrap().reviews.len(), 1);
        assert_eq!(load_corpus(store.path(), &LoadOptions::all()).unwrap().reviews.len(), 2);
    }
}
