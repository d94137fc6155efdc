#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixtures() -> PathBuf {
    repo().join("fixtures")
}

/// Runs `revmon --config fixtures/revmon.toml --out <out> <args...>`.
pub fn revmon(out: &Path, args: &[&str]) -> i32 {
    let config = fixtures().join("revmon.toml");
    let mut argv = vec![
        "revmon".to_string(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    argv.extend(args.iter().map(|s| s.to_string()));
    revmon_cli::run(argv)
}

/// The full fixture pipeline into `out`; returns the report path.
pub fn fixture_report(out: &Path, extra: &[&str]) -> PathBuf {
    let storefront = fixtures().join("storefront");
    let storefront = storefront.display().to_string();
    let stages: [&[&str]; 7] = [
        &["fetch", "--fixtures", &storefront],
        &["filter"],
        &["prep"],
        &["sentiment"],
        &["terms"],
        &["topics"],
        &["report"],
    ];
    for stage in stages {
        let mut args = extra.to_vec();
        args.extend_from_slice(stage);
        assert_eq!(revmon(out, &args), 0, "revmon {args:?}");
    }
    out.join("report.json")
}
