//! Plain-text graph files.
//!
//! ```text
//! digraph <family> k=<k> q=<q> n=<n> [seed=<seed>]
//! u v c        one line per colored arc u -> v (c = 0 for digon halves)
//! # v <index> <label>
//! ```

use std::fmt::Write as _;

use super::{ColoredTournament, GraphError, GraphFamily, MathonDigraph, Vertex};
use crate::gfq::EdgeClass;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphHeader {
    pub family: GraphFamily,
    pub k: u32,
    pub q: u32,
    pub n: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub header: GraphHeader,
    pub arcs: Vec<(Vertex, Vertex, u8)>,
    pub labels: Vec<(Vertex, String)>,
}

impl GraphFile {
    pub fn from_tournament(t: &ColoredTournament) -> Self {
        let n = t.n();
        let mut arcs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as Vertex {
            for v in 0..n as Vertex {
                if let Some(c) = super::Digraph::arc_color(t, u, v) {
                    arcs.push((u, v, c));
                }
            }
        }
        GraphFile {
            header: GraphHeader {
                family: t.family(),
                k: t.k(),
                q: t.q(),
                n,
                seed: t.seed(),
            },
            arcs,
            labels: t
                .labels()
                .iter()
                .enumerate()
                .map(|(i, l)| (i as Vertex, l.clone()))
                .collect(),
        }
    }

    pub fn from_mathon(m: &MathonDigraph) -> Self {
        let n = m.n();
        let mut arcs = Vec::new();
        for u in 0..n as Vertex {
            for v in 0..n as Vertex {
                if u == v {
                    continue;
                }
                match m.arc(u, v) {
                    EdgeClass::Forward(c) => arcs.push((u, v, c)),
                    EdgeClass::Zero => arcs.push((u, v, 0)),
                    EdgeClass::Backward(_) => {}
                }
            }
        }
        GraphFile {
            header: GraphHeader {
                family: GraphFamily::Mathon,
                k: m.k(),
                q: m.q(),
                n,
                seed: None,
            },
            arcs,
            labels: (0..n as Vertex).map(|v| (v, m.label(v))).collect(),
        }
    }

    /// Rebuilds a tournament; fails for files containing digons.
    pub fn to_tournament(&self) -> Result<ColoredTournament, GraphError> {
        let h = &self.header;
        let colors = (h.k / 2).max(1);
        let t = ColoredTournament::from_arcs(h.n, colors, self.arcs.iter().copied())?;
        let labels = if self.labels.len() == h.n {
            let mut sorted = self.labels.clone();
            sorted.sort_by_key(|(v, _)| *v);
            sorted.into_iter().map(|(_, l)| l).collect()
        } else {
            Vec::new()
        };
        Ok(t.with_meta(h.family, h.k, h.q, h.seed).with_labels(labels))
    }

    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = format!("digraph {} k={} q={} n={}", h.family, h.k, h.q, h.n);
        if let Some(seed) = h.seed {
            let _ = write!(out, " seed={seed}");
        }
        out.push('\n');
        for &(u, v, c) in &self.arcs {
            let _ = writeln!(out, "{u} {v} {c}");
        }
        for (v, label) in &self.labels {
            let _ = writeln!(out, "# v {v} {label}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let err = |line: usize, msg: &str| GraphError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let mut words = first.split_whitespace();
        if words.next() != Some("digraph") {
            return Err(err(1, "header must start with `digraph`"));
        }
        let family = words
            .next()
            .and_then(GraphFamily::from_name)
            .ok_or_else(|| err(1, "unknown graph family"))?;
        let (mut k, mut q, mut n, mut seed) = (None, None, None, None);
        for w in words {
            let (key, value) = w
                .split_once('=')
                .ok_or_else(|| err(1, "expected key=value"))?;
            let bad = || err(1, &format!("bad value for {key}"));
            match key {
                "k" => k = Some(value.parse().map_err(|_| bad())?),
                "q" => q = Some(value.parse().map_err(|_| bad())?),
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(err(1, &format!("unknown header field {key}"))),
            }
        }
        let header = GraphHeader {
            family,
            k: k.ok_or_else(|| err(1, "missing k"))?,
            q: q.ok_or_else(|| err(1, "missing q"))?,
            n: n.ok_or_else(|| err(1, "missing n"))?,
            seed,
        };
        let mut arcs = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if let Some(rest) = line.strip_prefix("# v ") {
                let (idx, label) = rest.split_once(' ').unwrap_or((rest, ""));
                let idx: Vertex = idx.parse().map_err(|_| err(lineno, "bad label index"))?;
                labels.push((idx, label.to_string()));
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err(lineno, "expected `u v c`"));
            }
            let u: Vertex = parts[0].parse().map_err(|_| err(lineno, "bad vertex"))?;
            let v: Vertex = parts[1].parse().map_err(|_| err(lineno, "bad vertex"))?;
            let c: u8 = parts[2].parse().map_err(|_| err(lineno, "bad color"))?;
            if u as usize >= header.n || v as usize >= header.n {
                return Err(err(lineno, "vertex out of range"));
            }
            arcs.push((u, v, c));
        }
        Ok(GraphFile {
            header,
            arcs,
            labels,
        })
    }
}
