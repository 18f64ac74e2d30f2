//! Transitive subtournament search.
//!
//! A tournament on m vertices is transitive iff its out-degrees are
//! `{0, ..., m-1}`; its vertices then form a unique chain `a_1, ..., a_m`
//! with `a_i -> a_j` for all `i < j`. Searches count, detect, or maximize
//! such chains inside one color class (or all colors at once).

mod bitset;
mod cache;
mod engine;
mod scan;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graphs::{Digraph, Vertex};
pub use bitset::BitRelation;
pub use cache::{now_secs, CacheError, CacheRecord, RecordKind, ResultCache};
use engine::{Control, Problem};
pub use scan::{scan, ScanError, ScanOptions, ScanOrder, ScanOutcome, ScanStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("color {color} is out of range: expected 1..={max}")]
    BadColor { color: u8, max: u32 },
    #[error("vertex {vertex} is out of range for a graph of order {n}")]
    BadVertex { vertex: Vertex, n: usize },
    #[error("vertex {0} appears twice")]
    DuplicateVertex(Vertex),
    #[error("order must be at least {min}, got {m}")]
    BadOrder { m: usize, min: usize },
    #[error("{0} symmetry requested on a graph without that symmetry")]
    SymmetryUnavailable(Symmetry),
}

/// Which arcs a chain may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColorScope {
    Single(u8),
    /// Any oriented arc, regardless of color.
    Any,
}

impl ColorScope {
    #[inline]
    pub fn admits(self, arc: Option<u8>) -> bool {
        match (self, arc) {
            (ColorScope::Single(c), Some(a)) => a == c,
            (ColorScope::Any, Some(a)) => a > 0,
            (_, None) => false,
        }
    }
}

impl fmt::Display for ColorScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorScope::Single(c) => write!(f, "{c}"),
            ColorScope::Any => f.write_str("any"),
        }
    }
}

impl std::str::FromStr for ColorScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "any" {
            return Ok(ColorScope::Any);
        }
        s.parse()
            .map(ColorScope::Single)
            .map_err(|_| format!("bad color `{s}`: expected a number or `any`"))
    }
}

// Serialized as the color number or the string "any".
impl Serialize for ColorScope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ColorScope::Single(c) => s.serialize_u8(*c),
            ColorScope::Any => s.serialize_str("any"),
        }
    }
}

impl<'de> Deserialize<'de> for ColorScope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u8),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(c) => Ok(ColorScope::Single(c)),
            Repr::Word(w) if w == "any" => Ok(ColorScope::Any),
            Repr::Word(w) => Err(serde::de::Error::custom(format!("bad color scope `{w}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exists(usize),
    Count(usize),
    /// Maximum order, optionally stopping once the given order is reached.
    Max(Option<usize>),
}

impl Mode {
    pub fn kind(self) -> RecordKind {
        match self {
            Mode::Exists(_) => RecordKind::Exists,
            Mode::Count(_) => RecordKind::Count,
            Mode::Max(_) => RecordKind::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    None,
    /// Fix `a_1 = 0`.
    VertexTransitive,
    /// Fix `a_1 = 0` and `a_2` to a coset representative; Paley graphs only.
    PaleyAffine,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::None => "none",
            Symmetry::VertexTransitive => "vertex-transitive",
            Symmetry::PaleyAffine => "paley-affine",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Symmetric,
}

pub struct SearchTask<'g> {
    pub graph: &'g dyn Digraph,
    pub color: ColorScope,
    pub mode: Mode,
    pub symmetry: Symmetry,
    pub deterministic_witness: bool,
    pub budget: Option<Duration>,
}

impl<'g> SearchTask<'g> {
    pub fn new(graph: &'g dyn Digraph, color: ColorScope, mode: Mode) -> Self {
        Self {
            graph,
            color,
            mode,
            symmetry: Symmetry::None,
            deterministic_witness: true,
            budget: None,
        }
    }

    pub fn symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn budget(mut self, budget: Option<Duration>) -> Self {
        self.budget = budget;
        self
    }

    pub fn deterministic(mut self, on: bool) -> Self {
        self.deterministic_witness = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SearchValue {
    Exists(bool),
    Count(u64),
    Max(usize),
}

impl SearchValue {
    /// Untagged JSON cannot tell a count from an order; the record kind does.
    pub fn from_json(kind: RecordKind, v: &serde_json::Value) -> Option<Self> {
        match kind {
            RecordKind::Exists => v.as_bool().map(Self::Exists),
            RecordKind::Count => v.as_u64().map(Self::Count),
            RecordKind::Max => v
                .as_u64()
                .and_then(|l| usize::try_from(l).ok())
                .map(Self::Max),
            RecordKind::Scan | RecordKind::Check => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSearchResult")]
pub struct SearchResult {
    pub kind: RecordKind,
    pub value: SearchValue,
    pub witness: Option<Vec<Vertex>>,
    pub stats: SearchStats,
    /// False when the time budget ran out; the value is then only a partial answer.
    pub complete: bool,
}

#[derive(Deserialize)]
struct RawSearchResult {
    kind: RecordKind,
    value: serde_json::Value,
    witness: Option<Vec<Vertex>>,
    stats: SearchStats,
    complete: bool,
}

impl TryFrom<RawSearchResult> for SearchResult {
    type Error = String;

    fn try_from(r: RawSearchResult) -> Result<Self, String> {
        let value = SearchValue::from_json(r.kind, &r.value)
            .ok_or_else(|| format!("bad {:?} value {}", r.kind, r.value))?;
        Ok(Self {
            kind: r.kind,
            value,
            witness: r.witness,
            stats: r.stats,
            complete: r.complete,
        })
    }
}

impl SearchResult {
    pub fn exists(&self) -> Option<bool> {
        match self.value {
            SearchValue::Exists(b) => Some(b),
            SearchValue::Count(c) => Some(c > 0),
            SearchValue::Max(_) => None,
        }
    }

    pub fn count(&self) -> Option<u64> {
        match self.value {
            SearchValue::Count(c) => Some(c),
            _ => None,
        }
    }

    pub fn max_order(&self) -> Option<usize> {
        match self.value {
            SearchValue::Max(l) => Some(l),
            _ => None,
        }
    }
}

/// The unique chain ordering of `set` when it induces a transitive
/// subtournament within `color`, found by sorting on within-set out-degree.
pub fn is_transitive(
    g: &dyn Digraph,
    set: &[Vertex],
    color: ColorScope,
) -> Result<Option<Vec<Vertex>>, SearchError> {
    let n = g.order();
    let mut seen = std::collections::HashSet::new();
    for &v in set {
        if v as usize >= n {
            return Err(SearchError::BadVertex { vertex: v, n });
        }
        if !seen.insert(v) {
            return Err(SearchError::DuplicateVertex(v));
        }
    }
    let mut by_degree: Vec<(usize, Vertex)> = set
        .iter()
        .map(|&u| {
            (
                set.iter()
                    .filter(|&&v| color.admits(g.arc_color(u, v)))
                    .count(),
                u,
            )
        })
        .collect();
    by_degree.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let chain: Vec<Vertex> = by_degree.into_iter().map(|(_, v)| v).collect();
    let ok = chain.iter().enumerate().all(|(i, &u)| {
        chain[i + 1..]
            .iter()
            .all(|&v| color.admits(g.arc_color(u, v)))
    });
    Ok(ok.then_some(chain))
}

fn check_color(g: &dyn Digraph, color: ColorScope) -> Result<(), SearchError> {
    if let ColorScope::Single(c) = color {
        if c == 0 || u32::from(c) > g.color_count() {
            return Err(SearchError::BadColor {
                color: c,
                max: g.color_count(),
            });
        }
    }
    Ok(())
}

fn full_relation(g: &dyn Digraph, color: ColorScope) -> BitRelation {
    BitRelation::from_fn(g.order(), |u, v| {
        color.admits(g.arc_color(u as Vertex, v as Vertex))
    })
}

/// Search spaces and the orbit multiplier that turns their chain counts into
/// the full count.
fn problems(
    g: &dyn Digraph,
    color: ColorScope,
    symmetry: Symmetry,
) -> Result<(Vec<Problem>, u64), SearchError> {
    let n = g.order();
    if n == 0 {
        return Ok((Vec::new(), 1));
    }
    match symmetry {
        Symmetry::None => {
            let rel = full_relation(g, color);
            let roots = rel.full_set();
            Ok((
                vec![Problem {
                    rel,
                    map: None,
                    prefix: Vec::new(),
                    roots,
                }],
                1,
            ))
        }
        Symmetry::VertexTransitive => {
            if !g.is_vertex_transitive() {
                return Err(SearchError::SymmetryUnavailable(symmetry));
            }
            let rel = full_relation(g, color);
            let roots = rel.row(0).to_vec();
            Ok((
                vec![Problem {
                    rel,
                    map: None,
                    prefix: vec![0],
                    roots,
                }],
                n as u64,
            ))
        }
        Symmetry::PaleyAffine => {
            let rs = g
                .paley_residues()
                .ok_or(SearchError::SymmetryUnavailable(symmetry))?;
            let colors: Vec<u8> = match color {
                ColorScope::Single(c) => vec![c],
                ColorScope::Any => (1..=rs.half() as u8).collect(),
            };
            let out = colors
                .into_iter()
                .map(|c| {
                    let second = rs.coset_rep(c);
                    let map: Vec<Vertex> = (0..n as Vertex)
                        .filter(|&x| {
                            color.admits(g.arc_color(0, x)) && color.admits(g.arc_color(second, x))
                        })
                        .collect();
                    let rel = BitRelation::from_fn(map.len(), |i, j| {
                        color.admits(g.arc_color(map[i], map[j]))
                    });
                    let roots = rel.full_set();
                    Problem {
                        rel,
                        map: Some(map),
                        prefix: vec![0, second],
                        roots,
                    }
                })
                .collect();
            let q = u64::from(rs.q());
            Ok((out, q * (q - 1) / u64::from(rs.k())))
        }
    }
}

/// Runs one search task on the current rayon pool.
pub fn run(task: &SearchTask<'_>) -> Result<SearchResult, SearchError> {
    let g = task.graph;
    check_color(g, task.color)?;
    let min_order = match (task.mode, task.symmetry) {
        (Mode::Count(_), Symmetry::PaleyAffine) => 2,
        (Mode::Exists(_) | Mode::Count(_), _) => 1,
        (Mode::Max(_), _) => 0,
    };
    if let Mode::Exists(m) | Mode::Count(m) | Mode::Max(Some(m)) = task.mode {
        if m < min_order.max(1) {
            return Err(SearchError::BadOrder {
                m,
                min: min_order.max(1),
            });
        }
    }
    let start = Instant::now();
    let (problems, multiplier) = problems(g, task.color, task.symmetry)?;
    let ctl = Control::new(task.budget.map(|b| start + b));
    let (value, witness) = match task.mode {
        Mode::Exists(m) => {
            let w = engine::run_exists(&problems, m, &ctl);
            (SearchValue::Exists(w.is_some()), w)
        }
        Mode::Count(m) => {
            let counts = engine::run_count(&problems, m, &ctl);
            (
                SearchValue::Count(counts.iter().sum::<u64>() * multiplier),
                None,
            )
        }
        Mode::Max(limit) => {
            let (len, w) = engine::run_max(&problems, limit, task.deterministic_witness, &ctl);
            (SearchValue::Max(len), (len > 0).then_some(w))
        }
    };
    if let Some(w) = &witness {
        debug_assert!(
            is_transitive(g, w, task.color).ok().flatten().as_deref() == Some(w.as_slice())
        );
    }
    Ok(SearchResult {
        kind: task.mode.kind(),
        value,
        witness,
        stats: SearchStats {
            nodes: ctl.nodes(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
        complete: !ctl.timed_out(),
    })
}

/// Default symmetry for a graph: affine on Paley graphs, vertex-transitive
/// where available, otherwise none.
pub fn auto_symmetry(g: &dyn Digraph) -> Symmetry {
    if g.paley_residues().is_some() {
        Symmetry::PaleyAffine
    } else if g.is_vertex_transitive() {
        Symmetry::VertexTransitive
    } else {
        Symmetry::None
    }
}

/// Number of m-vertex subsets inducing a transitive subtournament in `color`.
pub fn count_tt(
    g: &dyn Digraph,
    m: usize,
    color: ColorScope,
    method: CountMethod,
) -> Result<u64, SearchError> {
    let symmetry = match method {
        CountMethod::Brute => Symmetry::None,
        CountMethod::Symmetric => Symmetry::PaleyAffine,
    };
    let r = run(&SearchTask::new(g, color, Mode::Count(m)).symmetry(symmetry))?;
    Ok(r.count().expect("count mode"))
}

/// A witness chain of order m, if one exists.
pub fn exists_tt(
    g: &dyn Digraph,
    m: usize,
    color: ColorScope,
) -> Result<Option<Vec<Vertex>>, SearchError> {
    let r = run(&SearchTask::new(g, color, Mode::Exists(m)).symmetry(auto_symmetry(g)))?;
    Ok(r.witness)
}

/// Maximum chain order with its deterministic witness.
pub fn max_tt(g: &dyn Digraph, color: ColorScope) -> Result<SearchResult, SearchError> {
    run(&SearchTask::new(g, color, Mode::Max(None)).symmetry(auto_symmetry(g)))
}

#[cfg(test)]
mod tests;
