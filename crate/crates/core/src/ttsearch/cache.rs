//! Append-only JSON-lines store of search outcomes.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{ColorScope, SearchResult};
use crate::graphs::Vertex;
use crate::TOOL_VERSION;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cache {path} line {line}: {source}")]
    Malformed {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Exists,
    Count,
    Max,
    Scan,
    Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub k: u32,
    pub q: u64,
    pub m: Option<usize>,
    pub kind: RecordKind,
    pub color: ColorScope,
    pub value: Value,
    pub witness: Option<Vec<Vertex>>,
    pub elapsed_ms: u64,
    pub version: String,
    pub timestamp: u64,
    pub at_limit: bool,
}

impl CacheRecord {
    pub fn from_search(
        k: u32,
        q: u64,
        m: Option<usize>,
        color: ColorScope,
        r: &SearchResult,
    ) -> Self {
        Self {
            k,
            q,
            m,
            kind: r.kind,
            color,
            value: serde_json::to_value(r.value).expect("search values serialize"),
            witness: r.witness.clone(),
            elapsed_ms: r.stats.elapsed_ms,
            version: TOOL_VERSION.to_string(),
            timestamp: now_secs(),
            at_limit: !r.complete,
        }
    }
}

pub fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Default)]
pub struct ResultCache {
    path: Option<PathBuf>,
    records: Vec<CacheRecord>,
}

impl ResultCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads every record in `path`; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec = serde_json::from_str(line).map_err(|source| CacheError::Malformed {
                path: path.clone(),
                line: i + 1,
                source,
            })?;
            records.push(rec);
        }
        Ok(Self {
            path: Some(path),
            records,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn records(&self) -> &[CacheRecord] {
        &self.records
    }

    /// Latest complete record for the key written by this tool version.
    pub fn lookup(
        &self,
        k: u32,
        q: u64,
        m: Option<usize>,
        kind: RecordKind,
        color: ColorScope,
    ) -> Option<&CacheRecord> {
        self.records.iter().rev().find(|r| {
            r.k == k
                && r.q == q
                && r.m == m
                && r.kind == kind
                && r.color == color
                && r.version == TOOL_VERSION
                && !r.at_limit
        })
    }

    pub fn append(&mut self, record: CacheRecord) -> Result<(), CacheError> {
        if let Some(path) = &self.path {
            let io_err = |source| CacheError::Io {
                path: path.clone(),
                source,
            };
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(io_err)?;
            let line = serde_json::to_string(&record).expect("records serialize");
            writeln!(file, "{line}").map_err(io_err)?;
        }
        self.records.push(record);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttsearch::{SearchStats, SearchValue};

    fn sample(at_limit: bool) -> CacheRecord {
        let r = SearchResult {
            kind: RecordKind::Exists,
            value: SearchValue::Exists(true),
            witness: Some(vec![0, 1, 2]),
            stats: SearchStats {
                nodes: 3,
                elapsed_ms: 1,
            },
            complete: !at_limit,
        };
        CacheRecord::from_search(2, 7, Some(3), ColorScope::Single(1), &r)
    }

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut cache = ResultCache::open(&path).unwrap();
        assert!(cache.records().is_empty());
        cache.append(sample(true)).unwrap();
        assert!(cache
            .lookup(2, 7, Some(3), RecordKind::Exists, ColorScope::Single(1))
            .is_none());
        cache.append(sample(false)).unwrap();

        let reloaded = ResultCache::open(&path).unwrap();
        assert_eq!(reloaded.records().len(), 2);
        let hit = reloaded
            .lookup(2, 7, Some(3), RecordKind::Exists, ColorScope::Single(1))
            .unwrap();
        assert_eq!(hit.value, Value::Bool(true));
        assert!(reloaded
            .lookup(2, 7, Some(4), RecordKind::Exists, ColorScope::Single(1))
            .is_none());

        let line = fs::read_to_string(&path)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string();
        let obj: serde_json::Map<String, Value> = serde_json::from_str(&line).unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|s| s.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "at_limit",
                "color",
                "elapsed_ms",
                "k",
                "kind",
                "m",
                "q",
                "timestamp",
                "value",
                "version",
                "witness"
            ]
        );
    }

    #[test]
    fn malformed_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(&path, "{\"k\":2}\n").unwrap();
        assert!(matches!(
            ResultCache::open(&path),
            Err(CacheError::Malformed { line: 1, .. })
        ));
    }
}
