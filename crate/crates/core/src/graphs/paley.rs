use super::{ColoredTournament, Digraph, GraphFamily, Vertex};
use crate::gfq::ResidueSystem;

/// Implicit multicolor Paley tournament: `a -> b` in color `i` iff `b - a`
/// lies in the i-th k-th power coset. Nothing is materialized beyond the
/// field's log table, so this scales to the whole supported range of q.
#[derive(Debug, Clone)]
pub struct PaleyView {
    rs: ResidueSystem,
}

impl PaleyView {
    pub fn new(rs: ResidueSystem) -> Self {
        Self { rs }
    }

    pub fn residues(&self) -> &ResidueSystem {
        &self.rs
    }

    pub fn q(&self) -> u32 {
        self.rs.q()
    }

    /// Color of `a -> b` when that orientation holds.
    #[inline]
    pub fn arc(&self, a: Vertex, b: Vertex) -> Option<u8> {
        if a == b {
            return None;
        }
        self.rs.forward_color(self.rs.field().sub(b, a))
    }

    pub fn materialize(&self) -> ColoredTournament {
        build_paley(&self.rs)
    }
}

impl Digraph for PaleyView {
    fn order(&self) -> usize {
        self.rs.q() as usize
    }

    fn color_count(&self) -> u32 {
        self.rs.half()
    }

    #[inline]
    fn arc_color(&self, u: Vertex, v: Vertex) -> Option<u8> {
        self.arc(u, v)
    }

    fn paley_residues(&self) -> Option<&ResidueSystem> {
        Some(&self.rs)
    }

    fn is_vertex_transitive(&self) -> bool {
        true
    }
}

/// Materializes the multicolor Paley tournament on GF(q) with `k/2` colors.
/// Vertex `u` is the field element with encoding `u`.
pub fn build_paley(rs: &ResidueSystem) -> ColoredTournament {
    let f = rs.field();
    let q = rs.q() as usize;
    let t = ColoredTournament::from_pairs(q, rs.half(), |u, v| match rs.pair_class(f.sub(v, u)) {
        crate::gfq::EdgeClass::Forward(c) => (true, c),
        crate::gfq::EdgeClass::Backward(c) => (false, c),
        crate::gfq::EdgeClass::Zero => unreachable!("distinct field elements"),
    })
    .expect("Paley colors are within range");
    let labels = (0..rs.q()).map(|x| f.element_string(x)).collect();
    t.with_meta(GraphFamily::Paley, rs.k(), rs.q(), None)
        .with_labels(labels)
        .with_paley(rs.clone())
}
