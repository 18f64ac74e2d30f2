//! Lower bounds on multicolor directed Ramsey numbers `R_t(m)`.
//!
//! Every cell of a derived table carries a [`Derivation`] tree whose leaves
//! are fact-base entries; [`audit`] replays each tree against the fact base.

mod facts;
mod tables;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use facts::{Fact, FactBase, FactError, QEntry, QSource};
pub use tables::{emit_tables, tables, Deficit, Table1Row, Table3Row, Tables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Fact,
    Direct,
    Mathon,
    Product,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fact => "fact",
            Self::Direct => "direct",
            Self::Mathon => "mathon",
            Self::Product => "product",
        })
    }
}

/// How a lower bound on `R_t(m)` was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum Derivation {
    Fact {
        t: u32,
        m: u32,
        value: u64,
        exact: bool,
        source: String,
    },
    /// `q_{m,2t} + 1`
    Direct {
        t: u32,
        m: u32,
        k: u32,
        q: u64,
        source: QSource,
        at_limit: bool,
    },
    /// `2t (q_{m-2,2t} + 1) + 1`, only when `m - 2 >= 2t`
    Mathon {
        t: u32,
        m: u32,
        k: u32,
        base_m: u32,
        q: u64,
        source: QSource,
        at_limit: bool,
    },
    /// `(R_{t-1}(m) - 1)(R(m) - 1) + 1`
    Product {
        t: u32,
        m: u32,
        left: Box<Derivation>,
        right: Box<Derivation>,
    },
}

impl Derivation {
    pub fn rule(&self) -> Rule {
        match self {
            Self::Fact { .. } => Rule::Fact,
            Self::Direct { .. } => Rule::Direct,
            Self::Mathon { .. } => Rule::Mathon,
            Self::Product { .. } => Rule::Product,
        }
    }

    pub fn target(&self) -> (u32, u32) {
        match *self {
            Self::Fact { t, m, .. }
            | Self::Direct { t, m, .. }
            | Self::Mathon { t, m, .. }
            | Self::Product { t, m, .. } => (t, m),
        }
    }

    /// Recomputes the bound from the recorded inputs.
    pub fn value(&self) -> Option<u128> {
        match self {
            Self::Fact { value, .. } => Some(u128::from(*value)),
            Self::Direct { q, .. } => u128::from(*q).checked_add(1),
            Self::Mathon { k, q, .. } => u128::from(*k)
                .checked_mul(u128::from(*q) + 1)?
                .checked_add(1),
            Self::Product { left, right, .. } => (left.value()? - 1)
                .checked_mul(right.value()? - 1)?
                .checked_add(1),
        }
    }

    pub fn exact(&self) -> bool {
        matches!(self, Self::Fact { exact: true, .. })
    }

    /// Whether any q-data input carries the search-limit flag.
    pub fn at_limit(&self) -> bool {
        match self {
            Self::Fact { .. } => false,
            Self::Direct { at_limit, .. } | Self::Mathon { at_limit, .. } => *at_limit,
            Self::Product { left, right, .. } => left.at_limit() || right.at_limit(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub t: u32,
    pub m: u32,
    pub value: u128,
    pub exact: bool,
    pub at_limit: bool,
    pub provenance: Derivation,
}

impl BoundEntry {
    fn from_derivation(d: Derivation) -> Option<Self> {
        let (t, m) = d.target();
        Some(Self {
            t,
            m,
            value: d.value()?,
            exact: d.exact(),
            at_limit: d.at_limit(),
            provenance: d,
        })
    }
}

fn fact_candidate(facts: &FactBase, t: u32, m: u32) -> Option<Derivation> {
    facts.fact(t, m).map(|f| Derivation::Fact {
        t,
        m,
        value: f.value,
        exact: f.exact,
        source: f.source.clone(),
    })
}

pub fn bound_direct(facts: &FactBase, t: u32, m: u32) -> Option<Derivation> {
    let k = 2 * t;
    facts.q(m, k).map(|e| Derivation::Direct {
        t,
        m,
        k,
        q: e.q,
        source: e.source,
        at_limit: e.at_limit,
    })
}

/// Never produces a candidate when `m - 2 < 2t`.
pub fn bound_mathon(facts: &FactBase, t: u32, m: u32) -> Option<Derivation> {
    let k = 2 * t;
    let base_m = m.checked_sub(2)?;
    if base_m < k {
        return None;
    }
    facts.q(base_m, k).map(|e| Derivation::Mathon {
        t,
        m,
        k,
        base_m,
        q: e.q,
        source: e.source,
        at_limit: e.at_limit,
    })
}

pub fn bound_product(table: &BoundTable, t: u32, m: u32) -> Option<Derivation> {
    if t < 2 {
        return None;
    }
    let left = table.get(t - 1, m)?;
    let right = table.get(1, m)?;
    Some(Derivation::Product {
        t,
        m,
        left: Box::new(left.provenance.clone()),
        right: Box::new(right.provenance.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveOptions {
    /// When false only the three rules are applied, as in a table built
    /// purely from search data.
    pub use_facts: bool,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        Self { use_facts: true }
    }
}

/// Cells `R_t(m)` for `1 <= t <= t_max`, `3 <= m <= m_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub t_max: u32,
    pub m_max: u32,
    pub entries: Vec<BoundEntry>,
    /// `(t, m)` cells with no candidate at all.
    pub missing: Vec<(u32, u32)>,
}

pub const M_MIN: u32 = 3;

impl BoundTable {
    pub fn get(&self, t: u32, m: u32) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.t == t && e.m == m)
    }

    pub fn value(&self, t: u32, m: u32) -> Option<u128> {
        self.get(t, m).map(|e| e.value)
    }
}

pub fn derive_bounds(facts: &FactBase, t_max: u32, m_max: u32) -> BoundTable {
    derive_with(facts, t_max, m_max, DeriveOptions::default())
}

/// Per cell, the largest candidate; ties go to the earlier of fact, direct,
/// mathon, product.
pub fn derive_with(facts: &FactBase, t_max: u32, m_max: u32, opts: DeriveOptions) -> BoundTable {
    let mut table = BoundTable {
        t_max,
        m_max,
        entries: Vec::new(),
        missing: Vec::new(),
    };
    for t in 1..=t_max {
        for m in M_MIN..=m_max {
            let candidates = [
                opts.use_facts
                    .then(|| fact_candidate(facts, t, m))
                    .flatten(),
                bound_direct(facts, t, m),
                bound_mathon(facts, t, m),
                bound_product(&table, t, m),
            ];
            let mut best: Option<BoundEntry> = None;
            for entry in candidates
                .into_iter()
                .flatten()
                .filter_map(BoundEntry::from_derivation)
            {
                if best.as_ref().is_none_or(|b| entry.value > b.value) {
                    best = Some(entry);
                }
            }
            match best {
                Some(e) => table.entries.push(e),
                None => table.missing.push((t, m)),
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("R_{t}({m}): provenance replays to {replayed:?}, entry says {value}")]
    Replay {
        t: u32,
        m: u32,
        value: u128,
        replayed: Option<u128>,
    },
    #[error("R_{t}({m}): {what} is not backed by the fact base")]
    Unbacked { t: u32, m: u32, what: String },
    #[error("R_{t}({m}): mathon rule applied with m - 2 < 2t")]
    Hypothesis { t: u32, m: u32 },
    #[error("R_{t}({m}): product inputs do not match the table")]
    Product { t: u32, m: u32 },
    #[error("R_{t}({m}): exact flag without an exact fact")]
    Exact { t: u32, m: u32 },
}

fn audit_derivation(
    d: &Derivation,
    facts: &FactBase,
    table: &BoundTable,
) -> Result<(), AuditError> {
    let (t, m) = d.target();
    match d {
        Derivation::Fact { value, exact, .. } => match facts.fact(t, m) {
            Some(f) if f.value == *value && f.exact == *exact => Ok(()),
            _ => Err(AuditError::Unbacked {
                t,
                m,
                what: format!("fact {value}"),
            }),
        },
        Derivation::Direct { k, q, .. } => match facts.q(m, *k) {
            Some(e) if e.q == *q && *k == 2 * t => Ok(()),
            _ => Err(AuditError::Unbacked {
                t,
                m,
                what: format!("q({m},{k}) = {q}"),
            }),
        },
        Derivation::Mathon { k, base_m, q, .. } => {
            if *base_m + 2 != m || *base_m < *k || *k != 2 * t {
                return Err(AuditError::Hypothesis { t, m });
            }
            match facts.q(*base_m, *k) {
                Some(e) if e.q == *q => Ok(()),
                _ => Err(AuditError::Unbacked {
                    t,
                    m,
                    what: format!("q({base_m},{k}) = {q}"),
                }),
            }
        }
        Derivation::Product { left, right, .. } => {
            let matches = |d: &Derivation, tt: u32| {
                d.target() == (tt, m) && table.get(tt, m).is_some_and(|e| e.provenance == *d)
            };
            if t < 2 || !matches(left, t - 1) || !matches(right, 1) {
                return Err(AuditError::Product { t, m });
            }
            audit_derivation(left, facts, table)?;
            audit_derivation(right, facts, table)
        }
    }
}

/// Replays every entry and checks each leaf against `facts`.
pub fn audit(table: &BoundTable, facts: &FactBase) -> Result<(), AuditError> {
    for e in &table.entries {
        let replayed = e.provenance.value();
        if replayed != Some(e.value) || e.provenance.target() != (e.t, e.m) {
            return Err(AuditError::Replay {
                t: e.t,
                m: e.m,
                value: e.value,
                replayed,
            });
        }
        if e.exact && !e.provenance.exact() {
            return Err(AuditError::Exact { t: e.t, m: e.m });
        }
        audit_derivation(&e.provenance, facts, table)?;
    }
    Ok(())
}
