use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cache::{now_secs, CacheError, CacheRecord, RecordKind, ResultCache};
use super::{run, ColorScope, Mode, SearchError, SearchTask, Symmetry};
use crate::gfq::{admissible_q, ResidueError, ResidueSystem};
use crate::graphs::{PaleyView, Vertex};
use crate::TOOL_VERSION;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("no admissible q <= {q_max} for k = {k} (need a prime power q ≡ k+1 mod 2k)")]
    NoAdmissible { k: u32, q_max: u64 },
    #[error("order m = {0} is too small: scans need m >= 2")]
    BadOrder(usize),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanOrder {
    #[default]
    Descending,
    Ascending,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScanOptions {
    pub order: ScanOrder,
    pub budget: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStep {
    pub q: u64,
    /// `None` when the search ran out of budget.
    pub has_tt: Option<bool>,
    pub cached: bool,
    pub witness: Option<Vec<Vertex>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub k: u32,
    pub m: usize,
    pub q_max: u64,
    /// Largest admissible q whose k-th power Paley digraph has no TT_m.
    pub largest: Option<u64>,
    /// Set when `largest` is the last admissible q below the limit, so a
    /// larger search range might move it.
    pub at_limit: bool,
    pub steps: Vec<ScanStep>,
}

fn cached_answer(
    cache: &ResultCache,
    k: u32,
    q: u64,
    m: usize,
) -> Option<(bool, Option<Vec<Vertex>>)> {
    let color = ColorScope::Single(1);
    if let Some(r) = cache.lookup(k, q, Some(m), RecordKind::Exists, color) {
        return r.value.as_bool().map(|b| (b, r.witness.clone()));
    }
    cache
        .lookup(k, q, Some(m), RecordKind::Count, color)
        .and_then(|r| r.value.as_u64())
        .map(|c| (c > 0, None))
}

fn decide(
    k: u32,
    q: u64,
    m: usize,
    cache: &mut ResultCache,
    opts: &ScanOptions,
) -> Result<ScanStep, ScanError> {
    if let Some((has_tt, witness)) = cached_answer(cache, k, q, m) {
        return Ok(ScanStep {
            q,
            has_tt: Some(has_tt),
            cached: true,
            witness,
        });
    }
    let view = PaleyView::new(ResidueSystem::for_order(k, q)?);
    let color = ColorScope::Single(1);
    let task = SearchTask::new(&view, color, Mode::Exists(m))
        .symmetry(Symmetry::PaleyAffine)
        .budget(opts.budget);
    let result = run(&task)?;
    cache.append(CacheRecord::from_search(k, q, Some(m), color, &result))?;
    let has_tt = if result.complete || result.witness.is_some() {
        result.exists()
    } else {
        None
    };
    Ok(ScanStep {
        q,
        has_tt,
        cached: false,
        witness: result.witness,
    })
}

/// Largest admissible `q <= q_max` with no transitive subtournament of
/// order `m` in the k-th power Paley digraph. Every evaluation is recorded
/// in `cache`, and cached answers are reused.
pub fn scan(
    k: u32,
    m: usize,
    q_max: u64,
    cache: &mut ResultCache,
    opts: ScanOptions,
) -> Result<ScanOutcome, ScanError> {
    if m < 2 {
        return Err(ScanError::BadOrder(m));
    }
    let qs = admissible_q(k, q_max)?;
    if qs.is_empty() {
        return Err(ScanError::NoAdmissible { k, q_max });
    }
    let start = std::time::Instant::now();
    let mut steps = Vec::new();
    let mut largest = None;
    match opts.order {
        ScanOrder::Descending => {
            for &q in qs.iter().rev() {
                let step = decide(k, q, m, cache, &opts)?;
                let free = step.has_tt == Some(false);
                steps.push(step);
                if free {
                    largest = Some(q);
                    break;
                }
            }
        }
        ScanOrder::Ascending => {
            for &q in &qs {
                let step = decide(k, q, m, cache, &opts)?;
                if step.has_tt == Some(false) {
                    largest = Some(q);
                }
                steps.push(step);
            }
        }
    }
    let at_limit = largest.is_some() && largest == qs.last().copied();
    cache.append(CacheRecord {
        k,
        q: q_max,
        m: Some(m),
        kind: RecordKind::Scan,
        color: ColorScope::Single(1),
        value: largest.map_or(serde_json::Value::Null, Into::into),
        witness: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
        version: TOOL_VERSION.to_string(),
        timestamp: now_secs(),
        at_limit,
    })?;
    Ok(ScanOutcome {
        k,
        m,
        q_max,
        largest,
        at_limit,
        steps,
    })
}
