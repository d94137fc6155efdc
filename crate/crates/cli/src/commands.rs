use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use revmon_core::ingest::{
    load_corpus, sync_corpus, Client, CorpusStore, FieldMap, FixtureTransport, HttpTransport, LoadOptions, QueryNames,
    SyncOptions, Transport, DEFAULT_BASE_URL,
};
use revmon_core::pipeline::{
    kept_reviews, run_filter, run_prep, run_sentiment, run_terms, run_topics, FilterArtifact, PipelineOutputs,
    PrepArtifact, SentimentArtifact, TopicsArtifact,
};
use revmon_core::report::MonitorReport;
use revmon_core::sentiment::{evaluate, parse_gold, SentimentRecord};
use revmon_core::topics::ThemeSpec;
use revmon_core::Review;

use crate::server::{self, ServeOptions};
use crate::{
    Cli, Command, FetchArgs, PrepArgs, ReportArgs, SentimentArgs, ServeArgs, TermsArgs, TopicsArgs, UsageError,
    Workspace,
};

pub fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    let ws = Workspace::new(cli.out.clone(), cli.corpus.clone(), cli.config.as_deref())?;
    ws.base_config.validate()?;
    match &cli.command {
        Command::Fetch(args) => fetch(&ws, args),
        Command::Filter => filter(&ws),
        Command::Prep(args) => prep(&ws, args),
        Command::Sentiment(args) => sentiment(&ws, args),
        Command::Terms(args) => terms(&ws, args),
        Command::Topics(args) => topics(&ws, args),
        Command::Report(args) => report(&ws, args),
        Command::Serve(args) => serve(&ws, args),
    }
}

fn fetch(ws: &Workspace, args: &FetchArgs) -> anyhow::Result<()> {
    let mut cfg = ws.base_config.ingest.clone();
    if let Some(id) = &args.app_id {
        cfg.app_id = id.clone();
    }
    if let Some(url) = &args.base_url {
        cfg.base_url = Some(url.clone());
    }
    if let Some(ms) = args.min_delay_ms {
        cfg.min_delay_ms = ms;
    }
    if let Some(n) = args.page_size {
        cfg.page_size = n;
    }
    if cfg.app_id.is_empty() {
        return Err(UsageError("fetch needs an app id (--app-id or ingest.app_id in the config)".into()).into());
    }
    if !(1..=100).contains(&cfg.page_size) {
        return Err(UsageError(format!("--page-size must be in 1..=100, got {}", cfg.page_size)).into());
    }

    let fields = FieldMap::default();
    let transport: Box<dyn Transport> = match &args.fixtures {
        Some(dir) => Box::new(FixtureTransport::open(dir, &fields)?),
        None => Box::new(HttpTransport::new(
            cfg.base_url.as_deref().unwrap_or(DEFAULT_BASE_URL),
            QueryNames::default(),
            Duration::from_secs(30),
        )),
    };
    let mut client = Client::new(transport, fields)
        .with_min_delay(Duration::from_millis(cfg.min_delay_ms))
        .with_max_attempts(cfg.max_attempts);
    if let Some(parent) = ws.corpus.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut store = CorpusStore::open(&ws.corpus)?;
    let options = SyncOptions {
        page_size: cfg.page_size,
        language: cfg.language.clone(),
    };
    let stats = sync_corpus(&mut client, &cfg.app_id, &mut store, &options)?;
    println!(
        "fetched {} reviews over {} pages: {} new, {} already stored; corpus {} holds {}",
        stats.fetched,
        stats.pages,
        stats.appended,
        stats.deduped,
        ws.corpus.display(),
        store.count()
    );
    ws.record_config(|c| c.ingest = cfg)
}

fn load_reviews(ws: &Workspace) -> anyhow::Result<Vec<Review>> {
    if !ws.corpus.exists() {
        return Err(UsageError(format!("no corpus at {}; run `revmon fetch` first", ws.corpus.display())).into());
    }
    let language = &ws.base_config.ingest.corpus_language;
    let options = LoadOptions {
        language: (!language.is_empty()).then(|| language.clone()),
        ..LoadOptions::default()
    };
    let loaded = load_corpus(&ws.corpus, &options)?;
    if loaded.skipped > 0 {
        log::warn!("skipped {} malformed corpus lines", loaded.skipped);
    }
    Ok(loaded.reviews)
}

fn filter(ws: &Workspace) -> anyhow::Result<()> {
    let reviews = load_reviews(ws)?;
    let cfg = ws.base_config.filter.clone();
    let (artifact, _) = run_filter(&reviews, &cfg);
    let s = &artifact.stats;
    println!(
        "{} reviews: {} spam, {} short, {} mid, {} long; {} kept for analysis",
        artifact.total,
        s.spam_removed,
        s.short,
        s.mid,
        s.long,
        artifact.kept_ids.len()
    );
    ws.write("filter", &artifact)?;
    ws.record_config(|c| c.filter = cfg)
}

fn kept(ws: &Workspace) -> anyhow::Result<(Vec<Review>, FilterArtifact)> {
    let filter: FilterArtifact = ws.read("filter")?;
    let reviews = load_reviews(ws)?;
    Ok((kept_reviews(&reviews, &filter)?, filter))
}

fn prep(ws: &Workspace, args: &PrepArgs) -> anyhow::Result<()> {
    let (kept, filter) = kept(ws)?;
    let artifact = run_prep(&kept, &filter);
    let empty = artifact.documents.iter().filter(|d| d.is_empty()).count();
    if args.dump {
        let mut out = io::stdout().lock();
        for doc in &artifact.documents {
            serde_json::to_writer(&mut out, doc)?;
            writeln!(out)?;
        }
    } else {
        println!("{} documents prepared ({empty} empty after stopword removal)", artifact.documents.len());
    }
    ws.write("prep", &artifact)?;
    Ok(())
}

fn read_predictions(path: &Path) -> anyhow::Result<Vec<SentimentRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_gold(&text)?
        .into_iter()
        .map(|g| SentimentRecord {
            review_id: g.review_id,
            label: g.label,
            confidence: 1.0,
            classifier_id: "predictions".into(),
        })
        .collect())
}

fn sentiment(ws: &Workspace, args: &SentimentArgs) -> anyhow::Result<()> {
    let records = match &args.predictions {
        Some(path) => read_predictions(path)?,
        None => {
            let mut cfg = ws.base_config.sentiment.clone();
            if let Some(c) = &args.classifier {
                cfg.classifier = c.clone();
            }
            if let Some(t) = args.threshold {
                cfg.threshold = t;
            }
            if let Some(g) = args.granularity {
                cfg.granularity = g.into();
            }
            let classifier = cfg.classifier()?;
            let (kept, filter) = kept(ws)?;
            let artifact = run_sentiment(&kept, &filter, &cfg, classifier.as_ref())?;
            let d = &artifact.distribution;
            println!(
                "{} reviews labelled by {}: {} positive, {} neutral, {} negative",
                d.total(),
                artifact.classifier_id,
                d.positive,
                d.neutral,
                d.negative
            );
            for b in &artifact.trend.buckets {
                println!("  {:<8} mean {:+.3}  n={}", b.period, b.mean_sentiment, b.review_count);
            }
            ws.write("sentiment", &artifact)?;
            ws.record_config(|c| c.sentiment = cfg)?;
            artifact.records
        }
    };
    if let Some(gold_path) = &args.evaluate {
        let text = fs::read_to_string(gold_path).with_context(|| format!("reading {}", gold_path.display()))?;
        let gold = parse_gold(&text)?;
        print!("{}", evaluate(&records, &gold)?.render());
    }
    Ok(())
}

fn stage_inputs(ws: &Workspace) -> anyhow::Result<(PrepArtifact, SentimentArtifact)> {
    Ok((ws.read("prep")?, ws.read("sentiment")?))
}

fn write_csv(path: &Path, header: [&str; 2], rows: impl Iterator<Item = (String, String)>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for (a, b) in rows {
        w.write_record([a, b])?;
    }
    w.flush()?;
    Ok(())
}

fn terms(ws: &Workspace, args: &TermsArgs) -> anyhow::Result<()> {
    let mut cfg = ws.base_config.terms.clone();
    if let Some(s) = args.subset {
        cfg.subset = s;
    }
    if let Some(a) = args.aggregation {
        cfg.aggregation = a.into();
    }
    if let Some(k) = args.ngram_top_k {
        cfg.ngram_top_k = k;
    }
    if let Some(k) = args.tfidf_top_k {
        cfg.tfidf_top_k = k;
    }
    if cfg.ngram_top_k == 0 || cfg.tfidf_top_k == 0 {
        return Err(UsageError("table sizes must be positive".into()).into());
    }
    let (prep, sentiment) = stage_inputs(ws)?;
    let artifact = run_terms(&prep, &sentiment, &cfg)?;
    println!("{} documents in the {} subset", artifact.documents, format!("{:?}", artifact.subset).to_lowercase());
    for table in &artifact.ngrams {
        let top: Vec<String> = table.entries.iter().take(5).map(|g| format!("{} ({})", g.gram, g.count)).collect();
        println!("  top {}-grams: {}", table.n, top.join(", "));
    }
    let top: Vec<&str> = artifact.tfidf.entries.iter().take(8).map(|t| t.term.as_str()).collect();
    println!("  top tf-idf: {}", top.join(", "));

    if let Some(dir) = &args.csv {
        fs::create_dir_all(dir)?;
        for table in &artifact.ngrams {
            write_csv(
                &dir.join(format!("ngrams_{}.csv", table.n)),
                ["term", "count"],
                table.entries.iter().map(|g| (g.gram.clone(), g.count.to_string())),
            )?;
        }
        write_csv(
            &dir.join("tfidf.csv"),
            ["term", "score"],
            artifact.tfidf.entries.iter().map(|t| (t.term.clone(), t.score.to_string())),
        )?;
    }
    ws.write("terms", &artifact)?;
    ws.record_config(|c| c.terms = cfg)
}

fn topics(ws: &Workspace, args: &TopicsArgs) -> anyhow::Result<()> {
    let mut cfg = ws.base_config.topics.clone();
    if let Some(s) = args.subset {
        cfg.subset = s;
    }
    let m = &mut cfg.model;
    if let Some(e) = &args.embedder {
        m.embedder = e.clone();
    }
    if let Some(r) = &args.reducer {
        m.reducer = r.clone();
    }
    if let Some(n) = args.min_cluster_size {
        m.min_cluster_size = n;
    }
    if args.min_samples.is_some() {
        m.min_samples = args.min_samples;
    }
    if let Some(d) = args.lsa_dim {
        m.lsa_dim = d;
    }
    if let Some(d) = args.target_dim {
        m.target_dim = d;
    }
    if let Some(s) = args.seed {
        m.seed = s;
    }
    m.hdbscan_params().validate().map_err(|e| UsageError(e.to_string()))?;

    let (prep, sentiment) = stage_inputs(ws)?;
    let artifact: TopicsArtifact = run_topics(&prep, &sentiment, &cfg)?;
    let model = &artifact.output.model;
    let docs = model.assignment.len();
    if model.k() == 0 {
        log::warn!(
            "no topics found among {docs} documents (min_cluster_size {}); every document is noise",
            cfg.model.min_cluster_size
        );
    }
    println!("{} topics over {docs} documents, {} noise", model.k(), model.noise_count());
    for (k, (size, keywords)) in model.topic_sizes.iter().zip(&model.topic_keywords).enumerate() {
        let words: Vec<&str> = keywords.iter().take(6).map(|t| t.term.as_str()).collect();
        println!("  topic {k:>2}  n={size:<4} {}", words.join(" "));
    }
    ws.write("topics", &artifact)?;
    ws.record_config(|c| c.topics = cfg)
}

fn read_themes(path: &Path) -> anyhow::Result<ThemeSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing theme spec {}", path.display()))
}

fn report(ws: &Workspace, args: &ReportArgs) -> anyhow::Result<()> {
    let topics = if !args.no_topics && ws.has("topics") {
        Some(ws.read("topics")?)
    } else {
        None
    };
    let outputs = PipelineOutputs {
        filter: ws.read("filter")?,
        prep: ws.read("prep")?,
        sentiment: ws.read("sentiment")?,
        terms: ws.read("terms")?,
        topics,
    };
    let themes = args.themes.as_deref().map(read_themes).transpose()?;
    let config = ws.effective_config()?;
    let report = MonitorReport::build(&outputs, &config, themes.as_ref())?;
    let path = ws.artifact("report");
    crate::write_atomic(&path, report.to_json().as_bytes())?;
    println!(
        "report {} ({} analyzed reviews{})",
        path.display(),
        report.corpus.analyzed,
        report.topics.as_ref().map_or(String::new(), |t| format!(", {} topics", t.model.k()))
    );
    Ok(())
}

fn serve(ws: &Workspace, args: &ServeArgs) -> anyhow::Result<()> {
    let options = ServeOptions {
        report: args.report.clone().unwrap_or_else(|| ws.artifact("report")),
        themes: args.themes.clone().unwrap_or_else(|| ws.artifact("themes")),
        host: args.host.clone(),
        port: args.port,
        assets: args.assets.clone(),
    };
    if !options.report.exists() {
        return Err(UsageError(format!("no report at {}; run `revmon report` first", options.report.display())).into());
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(server::serve(options))
}
