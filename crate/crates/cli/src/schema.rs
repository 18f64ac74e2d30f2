//! JSON documents printed under `--format json`, one per invocation.

use dramsey_core::bounds::{BoundTable, Tables};
use dramsey_core::graphs::Vertex;
use dramsey_core::ttsearch::{ColorScope, RecordKind, ScanOutcome, SearchValue};
use dramsey_core::verifier::CheckReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub q: u64,
    pub p: u32,
    pub n: u32,
    /// Coefficients of the monic modulus below the leading term, constant first.
    pub modulus: Vec<u32>,
    pub modulus_text: String,
    pub omega: u32,
    pub omega_text: String,
    /// Even `k <= 20` with `q ≡ k+1 (mod 2k)`.
    pub admissible_k: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOutput {
    pub family: String,
    pub k: u32,
    pub q: u64,
    pub n: usize,
    pub seed: Option<u64>,
    pub arc_lines: usize,
    pub digon_pairs: usize,
    pub path: Option<String>,
    /// The graph file itself when no output path was given.
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSearchOutput")]
pub struct SearchOutput {
    pub graph: String,
    pub k: u32,
    pub q: u64,
    pub seed: Option<u64>,
    pub kind: RecordKind,
    pub m: Option<usize>,
    pub color: ColorScope,
    pub value: SearchValue,
    pub witness: Option<Vec<Vertex>>,
    pub complete: bool,
    pub cached: bool,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

#[derive(Deserialize)]
struct RawSearchOutput {
    graph: String,
    k: u32,
    q: u64,
    seed: Option<u64>,
    kind: RecordKind,
    m: Option<usize>,
    color: ColorScope,
    value: serde_json::Value,
    witness: Option<Vec<Vertex>>,
    complete: bool,
    cached: bool,
    nodes: u64,
    elapsed_ms: u64,
}

impl TryFrom<RawSearchOutput> for SearchOutput {
    type Error = String;

    fn try_from(r: RawSearchOutput) -> Result<Self, String> {
        let value = SearchValue::from_json(r.kind, &r.value)
            .ok_or_else(|| format!("bad {:?} value {}", r.kind, r.value))?;
        Ok(Self {
            graph: r.graph,
            k: r.k,
            q: r.q,
            seed: r.seed,
            kind: r.kind,
            m: r.m,
            color: r.color,
            value,
            witness: r.witness,
            complete: r.complete,
            cached: r.cached,
            nodes: r.nodes,
            elapsed_ms: r.elapsed_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOutput {
    #[serde(flatten)]
    pub outcome: ScanOutcome,
    pub cache: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub passed: bool,
    pub reports: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeriveOutput {
    pub table: BoundTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablesOutput {
    pub tables: Tables,
    pub text: String,
}
