use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfq::is_admissible;

const SHIPPED: &str = include_str!("../../data/facts.json");

#[derive(Debug, Error)]
pub enum FactError {
    #[error("fact base {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("fact base is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(
        "q-data entry m={m} k={k} q={q} is not admissible (need a prime power q ≡ k+1 mod 2k)"
    )]
    Inadmissible { m: u32, k: u32, q: u64 },
    #[error("duplicate {what} for {key}")]
    Duplicate { what: &'static str, key: String },
    #[error("fact t={t} m={m} is out of range (need t >= 1, m >= 2)")]
    BadFact { t: u32, m: u32 },
}

/// A known value (`exact`) or lower bound on `R_t(m)` from the literature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub t: u32,
    pub m: u32,
    pub value: u64,
    pub exact: bool,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QSource {
    /// Taken from published tables.
    Published,
    /// Backed by a search run of this tool.
    Searched,
}

/// Largest known `q` with no transitive subtournament of order `m` in the
/// k-th power Paley digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QEntry {
    pub m: u32,
    pub k: u32,
    pub q: u64,
    pub source: QSource,
    /// The search stopped just above `q`; a larger range may raise it.
    pub at_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactBase {
    pub facts: Vec<Fact>,
    pub qdata: Vec<QEntry>,
}

impl FactBase {
    /// The fact base compiled into the crate.
    pub fn shipped() -> Self {
        Self::from_json(SHIPPED).expect("shipped fact base is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, FactError> {
        let base: Self = serde_json::from_str(text)?;
        base.validate()?;
        Ok(base)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FactError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| FactError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fact bases serialize")
    }

    pub fn validate(&self) -> Result<(), FactError> {
        let mut seen = HashSet::new();
        for f in &self.facts {
            if f.t == 0 || f.m < 2 {
                return Err(FactError::BadFact { t: f.t, m: f.m });
            }
            if !seen.insert((f.t, f.m)) {
                return Err(FactError::Duplicate {
                    what: "fact",
                    key: format!("t={} m={}", f.t, f.m),
                });
            }
        }
        let mut seen = HashSet::new();
        for e in &self.qdata {
            if !is_admissible(e.k, e.q) {
                return Err(FactError::Inadmissible {
                    m: e.m,
                    k: e.k,
                    q: e.q,
                });
            }
            if !seen.insert((e.m, e.k)) {
                return Err(FactError::Duplicate {
                    what: "q-data entry",
                    key: format!("m={} k={}", e.m, e.k),
                });
            }
        }
        Ok(())
    }

    pub fn fact(&self, t: u32, m: u32) -> Option<&Fact> {
        self.facts.iter().find(|f| f.t == t && f.m == m)
    }

    pub fn q(&self, m: u32, k: u32) -> Option<&QEntry> {
        self.qdata.iter().find(|e| e.m == m && e.k == k)
    }

    /// Records a q-data entry, keeping the larger q when one already exists.
    pub fn merge_q(&mut self, entry: QEntry) -> Result<(), FactError> {
        if !is_admissible(entry.k, entry.q) {
            return Err(FactError::Inadmissible {
                m: entry.m,
                k: entry.k,
                q: entry.q,
            });
        }
        match self
            .qdata
            .iter_mut()
            .find(|e| e.m == entry.m && e.k == entry.k)
        {
            Some(e) if e.q >= entry.q => {}
            Some(e) => *e = entry,
            None => self.qdata.push(entry),
        }
        Ok(())
    }
}
