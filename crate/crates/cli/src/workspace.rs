use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use revmon_core::pipeline::PipelineConfig;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::UsageError;

/// Writes `bytes` to `path` through a sibling temp file and a rename, so
/// readers see either the old or the new contents.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

/// The output directory and the files the stages exchange through it.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub out: PathBuf,
    pub corpus: PathBuf,
    /// `--config` contents, or defaults.
    pub base_config: PipelineConfig,
}

impl Workspace {
    pub fn new(out: PathBuf, corpus: Option<PathBuf>, config: Option<&Path>) -> anyhow::Result<Self> {
        let base_config = match config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        Ok(Workspace {
            corpus: corpus.unwrap_or_else(|| out.join("corpus.jsonl")),
            out,
            base_config,
        })
    }

    pub fn artifact(&self, stage: &str) -> PathBuf {
        self.out.join(format!("{stage}.json"))
    }

    pub fn has(&self, stage: &str) -> bool {
        self.artifact(stage).exists()
    }

    pub fn write<T: Serialize>(&self, stage: &str, value: &T) -> anyhow::Result<PathBuf> {
        let path = self.artifact(stage);
        let mut body = serde_json::to_vec_pretty(value)?;
        body.push(b'\n');
        write_atomic(&path, &body)?;
        Ok(path)
    }

    /// Reads a stage artifact; a missing one is a usage error naming the
    /// command that produces it.
    pub fn read<T: DeserializeOwned>(&self, stage: &str) -> anyhow::Result<T> {
        let path = self.artifact(stage);
        if !path.exists() {
            return Err(UsageError(format!("no {stage} output at {}; run `revmon {stage}` first", path.display())).into());
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    fn effective_path(&self) -> PathBuf {
        self.out.join("config.json")
    }

    /// The configuration the stages in this directory actually ran with:
    /// the base config, with each stage's section as last recorded.
    pub fn effective_config(&self) -> anyhow::Result<PipelineConfig> {
        let path = self.effective_path();
        if !path.exists() {
            return Ok(self.base_config.clone());
        }
        let text = fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    /// Stores the section a stage just ran with.
    pub fn record_config(&self, update: impl FnOnce(&mut PipelineConfig)) -> anyhow::Result<()> {
        let mut config = self.effective_config()?;
        update(&mut config);
        let mut body = serde_json::to_vec_pretty(&config)?;
        body.push(b'\n');
        write_atomic(&self.effective_path(), &body)
    }
}
