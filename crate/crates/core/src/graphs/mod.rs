//! Colored tournaments and digraphs built over finite fields.

mod format;
mod mathon;
mod paley;
mod tournament;

use thiserror::Error;

use crate::gfq::{ResidueError, ResidueSystem};

pub use format::{GraphFile, GraphHeader};
pub use mathon::{
    complete_mathon, complete_mathon_with, AutomorphismKind, AutomorphismStep, MathonDigraph,
    PaleyEmbedding,
};
pub use paley::{build_paley, PaleyView};
pub use tournament::{ArcDir, ColoredTournament, GraphFamily};

pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("color {color} is out of range: expected 1..={max}")]
    BadColor { color: u32, max: u32 },
    #[error("vertex {vertex} is out of range for a graph of order {n}")]
    BadVertex { vertex: u64, n: usize },
    #[error("arcs {u}->{v} and {v}->{u} are inconsistent")]
    NotAntisymmetric { u: Vertex, v: Vertex },
    #[error("pair {u},{v} has no arc in either direction")]
    MissingArc { u: Vertex, v: Vertex },
    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// Read access shared by every graph the search engine can walk.
///
/// `arc_color(u, v)` is `Some(c)` when there is an arc `u -> v` of color `c`.
/// Color `0` marks one half of a digon; oriented arcs use colors `1..=color_count()`.
pub trait Digraph: Sync {
    fn order(&self) -> usize;

    fn color_count(&self) -> u32;

    fn arc_color(&self, u: Vertex, v: Vertex) -> Option<u8>;

    /// Residue system when the arc set is invariant under `x -> s*x + t` for
    /// nonzero k-th powers `s` and vertex `u` is the field element `u`.
    fn paley_residues(&self) -> Option<&ResidueSystem> {
        None
    }

    fn is_vertex_transitive(&self) -> bool {
        false
    }
}
