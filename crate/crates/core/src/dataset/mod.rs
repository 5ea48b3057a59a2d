//! Comment-level input data and per-article aggregates.
//!
//! The canonical input is a flat comment table, either CSV with header
//! `article_id,user_id,disclosed,timestamp,source` (the last two columns are
//! optional) or JSON lines with the same keys.

mod simulate;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use simulate::{
    comment_total, simulate_dataset, SimulatedDataset, SimulatedUser, SimulationConfig,
    StrategyDistribution,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("zero valid rows ({rejected} rejected)")]
    NoValidRows { rejected: usize },
    #[error("unknown input format `{0}` (expected csv or jsonl)")]
    UnknownFormat(String),
    #[error("invalid simulation setting: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

pub const REQUIRED_COLUMNS: [&str; 3] = ["article_id", "user_id", "disclosed"];

/// One labelled comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub article_id: String,
    pub user_id: String,
    pub disclosed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Per-article totals: `r` comments, of which `s` distinct users disclosed at
/// least once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleAggregate {
    pub article_id: String,
    pub r: u64,
    pub s: u64,
    /// Participating users, sorted.
    pub user_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "jsonl" | "ndjson" => Ok(Self::Jsonl),
            _ => Err(DatasetError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    /// 1-based line number in the input file.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub records: Vec<CommentRecord>,
    pub rejected: Vec<RejectedRow>,
}

/// Accepts `true`/`false`/`1`/`0`, case-insensitively.
pub fn parse_disclosed(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

fn build_record(
    article_id: &str,
    user_id: &str,
    disclosed: &str,
    timestamp: Option<&str>,
    source: Option<&str>,
) -> std::result::Result<CommentRecord, String> {
    let article_id = article_id.trim();
    let user_id = user_id.trim();
    if article_id.is_empty() {
        return Err("empty article_id".into());
    }
    if user_id.is_empty() {
        return Err("empty user_id".into());
    }
    let disclosed = parse_disclosed(disclosed)
        .ok_or_else(|| format!("invalid disclosed value `{disclosed}`"))?;
    let optional = |v: Option<&str>| v.map(str::trim).filter(|v| !v.is_empty()).map(String::from);
    Ok(CommentRecord {
        article_id: article_id.to_string(),
        user_id: user_id.to_string(),
        disclosed,
        timestamp: optional(timestamp),
        source: optional(source),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_csv(path: &Path) -> Result<LoadReport> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(open(path)?);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut required = [0usize; 3];
    for (slot, name) in required.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = column(name).ok_or(DatasetError::MissingColumn(name))?;
    }
    let [article, user, disclosed] = required;
    let (timestamp, source) = (column("timestamp"), column("source"));

    let mut report = LoadReport::default();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i);
        let parsed = match (field(article), field(user), field(disclosed)) {
            (Some(a), Some(u), Some(d)) => {
                build_record(a, u, d, timestamp.and_then(field), source.and_then(field))
            }
            _ => Err("row has too few fields".into()),
        };
        match parsed {
            Ok(record) => report.records.push(record),
            Err(reason) => report.rejected.push(RejectedRow { line, reason }),
        }
    }
    Ok(report)
}

fn json_text(value: Option<&Value>) -> Option<String> {
    match value? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn read_jsonl(path: &Path) -> Result<LoadReport> {
    let reader = BufReader::new(open(path)?);
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Value>(&line)
            .map_err(|e| format!("invalid JSON: {e}"))
            .and_then(|v| {
                let get = |key: &str| json_text(v.get(key));
                let required = |key: &str| get(key).ok_or_else(|| format!("missing key `{key}`"));
                build_record(
                    &required("article_id")?,
                    &required("user_id")?,
                    &required("disclosed")?,
                    get("timestamp").as_deref(),
                    get("source").as_deref(),
                )
            });
        match parsed {
            Ok(record) => report.records.push(record),
            Err(reason) => report.rejected.push(RejectedRow {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(report)
}

/// Reads and validates a comment table. Malformed rows are collected in the
/// report; an input without a single valid row is an error.
pub fn load_records(path: impl AsRef<Path>, format: InputFormat) -> Result<LoadReport> {
    let path = path.as_ref();
    let report = match format {
        InputFormat::Csv => read_csv(path)?,
        InputFormat::Jsonl => read_jsonl(path)?,
    };
    if report.records.is_empty() {
        return Err(DatasetError::NoValidRows {
            rejected: report.rejected.len(),
        });
    }
    Ok(report)
}

/// Per-article comment counts and distinct disclosing users, ordered by
/// article id.
pub fn aggregate_articles(records: &[CommentRecord]) -> Vec<ArticleAggregate> {
    #[derive(Default)]
    struct Acc<'a> {
        r: u64,
        users: BTreeSet<&'a str>,
        disclosers: BTreeSet<&'a str>,
    }
    let mut by_article: BTreeMap<&str, Acc> = BTreeMap::new();
    for rec in records {
        let acc = by_article.entry(&rec.article_id).or_default();
        acc.r += 1;
        acc.users.insert(&rec.user_id);
        if rec.disclosed {
            acc.disclosers.insert(&rec.user_id);
        }
    }
    by_article
        .into_iter()
        .map(|(id, acc)| ArticleAggregate {
            article_id: id.to_string(),
            r: acc.r,
            s: acc.disclosers.len() as u64,
            user_ids: acc.users.into_iter().map(String::from).collect(),
        })
        .collect()
}

/// Writes records in the canonical CSV layout.
pub fn write_records_csv<W: std::io::Write>(records: &[CommentRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["article_id", "user_id", "disclosed", "timestamp", "source"])?;
    for r in records {
        writer.write_record([
            r.article_id.as_str(),
            r.user_id.as_str(),
            if r.disclosed { "true" } else { "false" },
            r.timestamp.as_deref().unwrap_or(""),
            r.source.as_deref().unwrap_or(""),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes aggregates as `article_id,r,s`.
pub fn write_aggregates_csv<W: std::io::Write>(
    aggregates: &[ArticleAggregate],
    out: W,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["article_id", "r", "s"])?;
    for a in aggregates {
        writer.write_record([a.article_id.clone(), a.r.to_string(), a.s.to_string()])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
