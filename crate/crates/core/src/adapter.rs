//! Line-delimited JSON protocol for external models.
//!
//! A batch of requests is written one JSON object per line, either to a
//! subprocess's stdin or as the body of an HTTP POST; the response must carry
//! one JSON object per request, each echoing the request `id`. Responses are
//! matched back by id so callers always see input order.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Http(String),
    Command { program: String, args: Vec<String> },
}

impl FromStr for Endpoint {
    type Err = AdapterError;

    /// `http(s)://...` posts to a URL; `exec:<program> [args...]` (or any other
    /// string) runs a subprocess.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with("http://") || s.starts_with("https://") {
            return Ok(Endpoint::Http(s.to_string()));
        }
        let command = s.strip_prefix("exec:").unwrap_or(s);
        let mut parts = command.split_whitespace().map(String::from);
        let program = parts
            .next()
            .ok_or_else(|| AdapterError::Config("empty adapter endpoint".into()))?;
        Ok(Endpoint::Command {
            program,
            args: parts.collect(),
        })
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Http(url) => f.write_str(url),
            Endpoint::Command { program, args } if args.is_empty() => write!(f, "exec:{program}"),
            Endpoint::Command { program, args } => write!(f, "exec:{program} {}", args.join(" ")),
        }
    }
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter configuration: {0}")]
    Config(String),
    #[error("adapter transport: {0}")]
    Transport(String),
    #[error("adapter timed out after {0:?}")]
    Timeout(Duration),
    #[error("adapter protocol violation: {message}")]
    Protocol { message: String, raw: String },
    #[error("adapter returned {got} record(s) for {expected} input(s)")]
    PartialBatch {
        expected: usize,
        got: usize,
        raw: String,
    },
}

impl AdapterError {
    pub fn protocol(message: impl Into<String>, raw: impl Into<String>) -> Self {
        AdapterError::Protocol {
            message: message.into(),
            raw: raw.into(),
        }
    }
}

/// A record carrying the request id it answers.
pub trait Keyed {
    fn key(&self) -> &str;
}

#[derive(Debug, Clone)]
pub struct AdapterConfig {
    pub endpoint: Endpoint,
    /// Per-batch timeout.
    pub timeout: Duration,
    pub batch_size: usize,
    pub max_in_flight: usize,
}

impl AdapterConfig {
    pub fn new(endpoint: Endpoint) -> Self {
        AdapterConfig {
            endpoint,
            timeout: Duration::from_secs(30),
            batch_size: 64,
            max_in_flight: 4,
        }
    }
}

fn encode<Req: Serialize>(requests: &[Req]) -> String {
    let mut body = String::new();
    for r in requests {
        body.push_str(&serde_json::to_string(r).expect("request serializes"));
        body.push('\n');
    }
    body
}

fn exchange(endpoint: &Endpoint, body: String, timeout: Duration) -> Result<String, AdapterError> {
    match endpoint {
        Endpoint::Http(url) => {
            let agent: ureq::Agent = ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .build()
                .into();
            let mut response = agent
                .post(url)
                .header("content-type", "application/x-ndjson")
                .send(body)
                .map_err(|e| match e {
                    ureq::Error::Timeout(_) => AdapterError::Timeout(timeout),
                    other => AdapterError::Transport(other.to_string()),
                })?;
            response
                .body_mut()
                .read_to_string()
                .map_err(|e| AdapterError::Transport(e.to_string()))
        }
        Endpoint::Command { program, args } => run_command(program, args, body, timeout),
    }
}

fn run_command(
    program: &str,
    args: &[String],
    body: String,
    timeout: Duration,
) -> Result<String, AdapterError> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| AdapterError::Transport(format!("cannot start {program}: {e}")))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");

    let writer = thread::spawn(move || {
        // A child that exits early closes the pipe; the read side reports it.
        let _ = stdin.write_all(body.as_bytes());
    });
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut out = String::new();
        let mut err = String::new();
        let read = stdout.read_to_string(&mut out);
        let _ = stderr.read_to_string(&mut err);
        let _ = tx.send(read.map(|_| (out, err)));
    });

    let read = match rx.recv_timeout(timeout) {
        Ok(read) => read,
        Err(_) => {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AdapterError::Timeout(timeout));
        }
    };
    let _ = writer.join();
    let status = child
        .wait()
        .map_err(|e| AdapterError::Transport(e.to_string()))?;
    let (out, err) = read.map_err(|e| AdapterError::Transport(e.to_string()))?;
    if !status.success() {
        return Err(AdapterError::protocol(
            format!("{program} exited with {status}: {}", err.trim()),
            out,
        ));
    }
    Ok(out)
}

fn decode<Resp: DeserializeOwned>(raw: &str) -> Result<Vec<Resp>, AdapterError> {
    raw.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line)
                .map_err(|e| AdapterError::protocol(format!("bad response line: {e}"), line))
        })
        .collect()
}

/// Reorders `responses` to match the ids of `requests`.
fn reassemble<Req: Keyed, Resp: Keyed>(
    requests: &[Req],
    responses: Vec<Resp>,
    raw: &str,
) -> Result<Vec<Resp>, AdapterError> {
    if responses.len() != requests.len() {
        return Err(AdapterError::PartialBatch {
            expected: requests.len(),
            got: responses.len(),
            raw: raw.to_string(),
        });
    }
    let mut by_id: HashMap<String, Resp> = HashMap::with_capacity(responses.len());
    for r in responses {
        let key = r.key().to_string();
        if by_id.insert(key.clone(), r).is_some() {
            return Err(AdapterError::protocol(format!("duplicate response id {key:?}"), raw));
        }
    }
    requests
        .iter()
        .map(|req| {
            by_id.remove(req.key()).ok_or_else(|| {
                AdapterError::protocol(format!("no response for id {:?}", req.key()), raw)
            })
        })
        .collect()
}

/// Sends one batch and returns its responses in request order.
pub fn call_batch<Req, Resp>(
    endpoint: &Endpoint,
    requests: &[Req],
    timeout: Duration,
) -> Result<Vec<Resp>, AdapterError>
where
    Req: Serialize + Keyed,
    Resp: DeserializeOwned + Keyed,
{
    if requests.is_empty() {
        return Ok(Vec::new());
    }
    let raw = exchange(endpoint, encode(requests), timeout)?;
    let responses = decode(&raw)?;
    reassemble(requests, responses, &raw)
}

/// Splits `requests` into batches, runs up to `max_in_flight` at once and
/// concatenates the results in input order.
pub fn call_all<Req, Resp>(config: &AdapterConfig, requests: &[Req]) -> Result<Vec<Resp>, AdapterError>
where
    Req: Serialize + Keyed + Sync,
    Resp: DeserializeOwned + Keyed + Send,
{
    let batch_size = config.batch_size.max(1);
    let batches: Vec<&[Req]> = requests.chunks(batch_size).collect();
    let mut results: Vec<Option<Vec<Resp>>> = Vec::with_capacity(batches.len());
    results.resize_with(batches.len(), || None);

    for (wave_index, wave) in batches.chunks(config.max_in_flight.max(1)).enumerate() {
        let outcomes: Vec<Result<Vec<Resp>, AdapterError>> = thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|batch| scope.spawn(|| call_batch(&config.endpoint, batch, config.timeout)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("adapter worker panicked"))
                .collect()
        });
        for (i, outcome) in outcomes.into_iter().enumerate() {
            results[wave_index * config.max_in_flight.max(1) + i] = Some(outcome?);
        }
    }
    Ok(results.into_iter().flatten().flatten().collect())
}
