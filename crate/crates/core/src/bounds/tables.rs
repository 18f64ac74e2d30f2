use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{derive_bounds, derive_with, DeriveOptions, FactBase, Rule};

const T1_MS: std::ops::RangeInclusive<u32> = 7..=20;
const T3_MS: std::ops::RangeInclusive<u32> = 3..=10;
const T3_TS: std::ops::RangeInclusive<u32> = 2..=6;
/// q-data keys the tables draw on: `k = 2` for orders up to 20, and
/// `k = 4..=10` for orders up to 10.
const EXPECTED_K: [u32; 4] = [4, 6, 8, 10];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub m: u32,
    pub q: Option<u64>,
    pub bound: Option<u128>,
    pub rule: Option<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table3Row {
    pub m: u32,
    /// One cell per `t` in `ts`.
    pub cells: Vec<Option<u128>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deficit {
    pub m: u32,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub table1: Vec<Table1Row>,
    pub ts: Vec<u32>,
    pub table3: Vec<Table3Row>,
    /// Multicolor table cells whose derivation uses a search-limited q-data entry.
    pub flagged: Vec<(u32, u32)>,
    pub deficits: Vec<Deficit>,
}

/// The single-color table uses the rules on q-data only; the multicolor
/// table also draws on known facts.
pub fn tables(facts: &FactBase) -> Tables {
    let single = derive_with(facts, 1, *T1_MS.end(), DeriveOptions { use_facts: false });
    let table1 = T1_MS
        .map(|m| {
            let e = single.get(1, m);
            Table1Row {
                m,
                q: facts.q(m, 2).map(|e| e.q),
                bound: e.map(|e| e.value),
                rule: e.map(|e| e.provenance.rule()),
            }
        })
        .collect();

    let multi = derive_bounds(facts, *T3_TS.end(), *T3_MS.end());
    let ts: Vec<u32> = T3_TS.collect();
    let table3 = T3_MS
        .map(|m| Table3Row {
            m,
            cells: ts.iter().map(|&t| multi.value(t, m)).collect(),
        })
        .collect();
    let flagged = multi
        .entries
        .iter()
        .filter(|e| e.t >= *T3_TS.start() && e.at_limit)
        .map(|e| (e.t, e.m))
        .collect();

    let mut deficits: Vec<Deficit> = (*T3_MS.start()..=*T1_MS.end())
        .map(|m| Deficit { m, k: 2 })
        .chain(T3_MS.flat_map(|m| EXPECTED_K.map(|k| Deficit { m, k })))
        .filter(|d| facts.q(d.m, d.k).is_none())
        .collect();
    deficits.sort_by_key(|d| (d.k, d.m));
    Tables {
        table1,
        ts,
        table3,
        flagged,
        deficits,
    }
}

fn cell(v: Option<impl ToString>) -> String {
    v.map_or_else(|| "?".to_string(), |v| v.to_string())
}

fn render(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
}

/// Byte-stable text rendering of both tables; unknown cells print as `?`.
pub fn emit_tables(facts: &FactBase) -> String {
    let t = tables(facts);
    let mut out = String::new();
    writeln!(out, "Lower bounds for R(m)").unwrap();
    let mut rows = vec![vec![
        "m".to_string(),
        "q_m".to_string(),
        "R(m) >=".to_string(),
    ]];
    rows.extend(
        t.table1
            .iter()
            .map(|r| vec![r.m.to_string(), cell(r.q), cell(r.bound)]),
    );
    render(&mut out, &rows);

    writeln!(out).unwrap();
    writeln!(out, "Lower bounds for R_t(m)").unwrap();
    let mut rows = vec![std::iter::once("m".to_string())
        .chain(t.ts.iter().map(|t| format!("t={t}")))
        .collect()];
    rows.extend(t.table3.iter().map(|r| {
        std::iter::once(r.m.to_string())
            .chain(r.cells.iter().map(|&c| cell(c)))
            .collect()
    }));
    render(&mut out, &rows);

    writeln!(out).unwrap();
    if t.flagged.is_empty() {
        writeln!(out, "search-limited inputs: none").unwrap();
    } else {
        let list: Vec<String> = t
            .flagged
            .iter()
            .map(|(t, m)| format!("R_{t}({m})"))
            .collect();
        writeln!(out, "search-limited inputs: {}", list.join(", ")).unwrap();
    }
    if t.deficits.is_empty() {
        writeln!(out, "missing q-data: none").unwrap();
    } else {
        let list: Vec<String> = t
            .deficits
            .iter()
            .map(|d| format!("q(m={}, k={})", d.m, d.k))
            .collect();
        writeln!(out, "missing q-data: {}", list.join(", ")).unwrap();
    }
    out
}
