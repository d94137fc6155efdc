//! The `revmon` command line: one subcommand per pipeline stage, each reading
//! and writing JSON artifacts in an output directory, plus a local server for
//! the finished report.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod commands;
pub mod server;
mod workspace;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revmon_core::pipeline::Subset;
use revmon_core::sentiment::Granularity;
use revmon_core::termstats::Aggregation;
use revmon_core::topics::{EmbedderChoice, ReducerChoice};

pub use workspace::{write_atomic, Workspace};

#[derive(Debug, Parser)]
#[command(name = "revmon", version, about = "Storefront review monitoring pipeline")]
pub struct Cli {
    /// Corpus file (JSON lines). Defaults to <out>/corpus.jsonl.
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory holding stage artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = "revmon-out")]
    pub out: PathBuf,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sync reviews from the storefront (or a fixture directory) into the corpus.
    Fetch(FetchArgs),
    /// Drop spam and bucket reviews by length.
    Filter,
    /// Tokenize, remove stopwords and stem the kept reviews.
    Prep(PrepArgs),
    /// Label reviews, build the trend series, optionally evaluate against gold labels.
    Sentiment(SentimentArgs),
    /// N-gram and TF-IDF tables over a sentiment subset.
    Terms(TermsArgs),
    /// Density-clustered topics with c-TF-IDF keywords.
    Topics(TopicsArgs),
    /// Assemble the stage artifacts into the monitoring report.
    Report(ReportArgs),
    /// Serve the report and theme decisions over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Read numbered page files from DIR instead of the network.
    #[arg(long, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub app_id: Option<String>,
    /// Endpoint template containing `{app_id}`.
    #[arg(long, value_name = "URL")]
    pub base_url: Option<String>,
    /// Minimum spacing between requests.
    #[arg(long, value_name = "MS")]
    pub min_delay_ms: Option<u64>,
    #[arg(long)]
    pub page_size: Option<u32>,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// Also print the cleaned documents as JSON lines.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GranularityArg {
    Year,
    Month,
}

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::Year => Granularity::Year,
            GranularityArg::Month => Granularity::Month,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregationArg {
    Sum,
    Max,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Sum => Aggregation::Sum,
            AggregationArg::Max => Aggregation::Max,
        }
    }
}

#[derive(Debug, Args)]
pub struct SentimentArgs {
    /// `builtin` or `external:<endpoint>`.
    #[arg(long, value_parser = parse_classifier)]
    pub classifier: Option<String>,
    /// Lexicon score magnitude needed for a non-neutral label.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub granularity: Option<GranularityArg>,
    /// Gold labels (JSON lines of {"review_id", "label"}); prints accuracy and per-class metrics.
    #[arg(long, value_name = "FILE")]
    pub evaluate: Option<PathBuf>,
    /// Evaluate these predictions (same format as gold) instead of running the classifier.
    #[arg(long, value_name = "FILE", requires = "evaluate")]
    pub predictions: Option<PathBuf>,
}

fn parse_classifier(s: &str) -> Result<String, String> {
    let external = s.strip_prefix("external:").is_some_and(|ep| !ep.trim().is_empty());
    if s == "builtin" || external {
        Ok(s.to_string())
    } else {
        Err(format!("expected \"builtin\" or \"external:<endpoint>\", got {s:?}"))
    }
}

#[derive(Debug, Args)]
pub struct TermsArgs {
    #[arg(long)]
    pub subset: Option<Subset>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    #[arg(long)]
    pub ngram_top_k: Option<usize>,
    #[arg(long)]
    pub tfidf_top_k: Option<usize>,
    /// Write `term,count` / `term,score` CSV tables into DIR.
    #[arg(long, value_name = "DIR")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TopicsArgs {
    #[arg(long)]
    pub subset: Option<Subset>,
    /// `builtin` or `external:<endpoint>`.
    #[arg(long)]
    pub embedder: Option<EmbedderChoice>,
    /// `pca`, `none` or `external:<endpoint>`.
    #[arg(long)]
    pub reducer: Option<ReducerChoice>,
    #[arg(long)]
    pub min_cluster_size: Option<usize>,
    #[arg(long)]
    pub min_samples: Option<usize>,
    /// Truncated SVD rank of the builtin embedder (0 keeps raw TF-IDF).
    #[arg(long)]
    pub lsa_dim: Option<usize>,
    #[arg(long)]
    pub target_dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Theme decisions to merge into the report.
    #[arg(long, value_name = "FILE")]
    pub themes: Option<PathBuf>,
    /// Leave the topics section out even if a topics artifact exists.
    #[arg(long)]
    pub no_topics: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Defaults to <out>/report.json.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Defaults to <out>/themes.json.
    #[arg(long, value_name = "FILE")]
    pub themes: Option<PathBuf>,
    #[arg(long, default_value_t = 8787)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Built workbench assets served at `/`.
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
}

/// A failure caused by how the command was invoked (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                1
            } else {
                2
            }
        }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    match cli.threads {
        Some(0) => Err(UsageError("--threads must be positive".into()).into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(|| commands::dispatch(cli)),
        None => commands::dispatch(cli),
    }
}
