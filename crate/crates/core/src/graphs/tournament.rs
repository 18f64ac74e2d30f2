use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Digraph, GraphError, Vertex};
use crate::gfq::ResidueSystem;

/// Orientation of an ordered pair in a colored tournament.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcDir {
    /// `u -> v` in the given color.
    Color(u8),
    /// `v -> u`.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    Paley,
    Mathon,
    MathonStar,
    Custom,
}

impl GraphFamily {
    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Paley => "paley",
            GraphFamily::Mathon => "mathon",
            GraphFamily::MathonStar => "mathon-star",
            GraphFamily::Custom => "custom",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "paley" => GraphFamily::Paley,
            "mathon" => GraphFamily::Mathon,
            "mathon-star" => GraphFamily::MathonStar,
            "custom" => GraphFamily::Custom,
            _ => return None,
        })
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A tournament whose arcs carry colors `1..=colors`, stored as a dense matrix.
#[derive(Debug, Clone)]
pub struct ColoredTournament {
    n: usize,
    colors: u32,
    /// `cells[u*n + v]` is the color of `u -> v`, or 0 when the arc points `v -> u`.
    cells: Vec<u8>,
    labels: Vec<String>,
    family: GraphFamily,
    k: u32,
    q: u32,
    seed: Option<u64>,
    paley: Option<ResidueSystem>,
}

impl PartialEq for ColoredTournament {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.colors == other.colors && self.cells == other.cells
    }
}

impl ColoredTournament {
    /// Builds a tournament from the orientation of each pair `u < v`:
    /// `pair(u, v)` returns `(true, c)` for `u -> v` and `(false, c)` for `v -> u`.
    pub fn from_pairs(
        n: usize,
        colors: u32,
        mut pair: impl FnMut(Vertex, Vertex) -> (bool, u8),
    ) -> Result<Self, GraphError> {
        let mut cells = vec![0u8; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let (forward, c) = pair(u as Vertex, v as Vertex);
                if c == 0 || u32::from(c) > colors {
                    return Err(GraphError::BadColor {
                        color: c.into(),
                        max: colors,
                    });
                }
                if forward {
                    cells[u * n + v] = c;
                } else {
                    cells[v * n + u] = c;
                }
            }
        }
        Ok(Self {
            n,
            colors,
            cells,
            labels: Vec::new(),
            family: GraphFamily::Custom,
            k: 2 * colors,
            q: 0,
            seed: None,
            paley: None,
        })
    }

    /// Builds from an explicit arc list; every unordered pair must appear exactly once.
    pub fn from_arcs(
        n: usize,
        colors: u32,
        arcs: impl IntoIterator<Item = (Vertex, Vertex, u8)>,
    ) -> Result<Self, GraphError> {
        let mut cells = vec![0u8; n * n];
        for (u, v, c) in arcs {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(GraphError::BadVertex {
                        vertex: x.into(),
                        n,
                    });
                }
            }
            if c == 0 || u32::from(c) > colors {
                return Err(GraphError::BadColor {
                    color: c.into(),
                    max: colors,
                });
            }
            let (ui, vi) = (u as usize, v as usize);
            if u == v || cells[ui * n + vi] != 0 || cells[vi * n + ui] != 0 {
                return Err(GraphError::NotAntisymmetric { u, v });
            }
            cells[ui * n + vi] = c;
        }
        for u in 0..n {
            for v in u + 1..n {
                if cells[u * n + v] == 0 && cells[v * n + u] == 0 {
                    return Err(GraphError::MissingArc {
                        u: u as Vertex,
                        v: v as Vertex,
                    });
                }
            }
        }
        Ok(Self {
            n,
            colors,
            cells,
            labels: Vec::new(),
            family: GraphFamily::Custom,
            k: 2 * colors,
            q: 0,
            seed: None,
            paley: None,
        })
    }

    pub(crate) fn with_meta(
        mut self,
        family: GraphFamily,
        k: u32,
        q: u32,
        seed: Option<u64>,
    ) -> Self {
        self.family = family;
        self.k = k;
        self.q = q;
        self.seed = seed;
        self
    }

    pub(crate) fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert!(labels.is_empty() || labels.len() == self.n);
        self.labels = labels;
        self
    }

    pub(crate) fn with_paley(mut self, rs: ResidueSystem) -> Self {
        self.paley = Some(rs);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn family(&self) -> GraphFamily {
        self.family
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Orientation of the pair; `u` and `v` must be distinct.
    #[inline]
    pub fn arc(&self, u: Vertex, v: Vertex) -> ArcDir {
        debug_assert_ne!(u, v);
        match self.cells[u as usize * self.n + v as usize] {
            0 => ArcDir::Reverse,
            c => ArcDir::Color(c),
        }
    }

    /// Number of arcs, always n(n-1)/2.
    pub fn arc_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    pub fn out_neighbors(&self, v: Vertex, color: u8) -> Vec<Vertex> {
        let row = &self.cells[v as usize * self.n..(v as usize + 1) * self.n];
        (0..self.n as Vertex)
            .filter(|&w| row[w as usize] == color && w != v)
            .collect()
    }

    pub fn in_neighbors(&self, v: Vertex, color: u8) -> Vec<Vertex> {
        (0..self.n as Vertex)
            .filter(|&w| w != v && self.cells[w as usize * self.n + v as usize] == color)
            .collect()
    }

    /// Pairs `u < v` where the two tournaments differ.
    pub fn differing_pairs(&self, other: &Self) -> Vec<(Vertex, Vertex)> {
        assert_eq!(self.n, other.n);
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                let i = u * self.n + v;
                let j = v * self.n + u;
                if self.cells[i] != other.cells[i] || self.cells[j] != other.cells[j] {
                    out.push((u as Vertex, v as Vertex));
                }
            }
        }
        out
    }
}

impl Digraph for ColoredTournament {
    fn order(&self) -> usize {
        self.n
    }

    fn color_count(&self) -> u32 {
        self.colors
    }

    #[inline]
    fn arc_color(&self, u: Vertex, v: Vertex) -> Option<u8> {
        if u == v {
            return None;
        }
        match self.cells[u as usize * self.n + v as usize] {
            0 => None,
            c => Some(c),
        }
    }

    fn paley_residues(&self) -> Option<&ResidueSystem> {
        self.paley.as_ref()
    }

    fn is_vertex_transitive(&self) -> bool {
        self.paley.is_some()
    }
}
