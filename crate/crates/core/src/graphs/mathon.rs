use std::collections::HashMap;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::{ColoredTournament, Digraph, GraphError, GraphFamily, Vertex};
use crate::gfq::{EdgeClass, Elem, ResidueSystem};

/// The Mathon-type colored digraph on the `k(q+1)` classes of nonzero pairs
/// `(a, b)` modulo scaling by k-th powers. `[a,b] -> [c,d]` is classified by
/// `bc - ad`: forward coset `i` gives an arc of color `i`, zero gives a digon.
#[derive(Debug, Clone)]
pub struct MathonDigraph {
    rs: ResidueSystem,
    n: usize,
    reps: Vec<(Elem, Elem)>,
    index: HashMap<(Elem, Elem), Vertex>,
    classes: Vec<EdgeClass>,
    digons: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AutomorphismKind {
    /// `[a,b] -> [a, b + a*s]`
    Rho,
    /// `[a,b] -> [a + b*s, b]`
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismStep {
    pub kind: AutomorphismKind,
    pub s: Elem,
}

/// `ON_i(v)` together with a color-preserving bijection onto the Paley tournament.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaleyEmbedding {
    pub color: u8,
    pub center: Vertex,
    /// `ON_i(center)` ascending.
    pub vertices: Vec<Vertex>,
    /// `phi[j]` is the field element assigned to `vertices[j]`.
    pub phi: Vec<Elem>,
}

impl MathonDigraph {
    pub fn build(rs: &ResidueSystem) -> Self {
        let f = rs.field();
        let k = rs.k();
        let q = rs.q();
        let mut reps: Vec<(Elem, Elem)> = Vec::with_capacity((k * (q + 1)) as usize);
        for r in 0..k {
            let a = f.omega_pow(r.into());
            reps.extend((0..q).map(|b| (a, b)));
            reps.push((0, a));
        }
        reps.sort_unstable();
        let n = reps.len();
        let index = reps
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as Vertex))
            .collect();

        let mut classes = vec![EdgeClass::Zero; n * n];
        for (u, &(a, b)) in reps.iter().enumerate() {
            for (v, &(c, d)) in reps.iter().enumerate() {
                if u != v {
                    classes[u * n + v] = rs.pair_class(f.sub(f.mul(b, c), f.mul(a, d)));
                }
            }
        }
        let mut m = Self {
            rs: rs.clone(),
            n,
            reps,
            index,
            classes,
            digons: Vec::new(),
        };
        m.refresh_digons();
        m
    }

    fn refresh_digons(&mut self) {
        let n = self.n;
        self.digons = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.classes[u * n + v] == EdgeClass::Zero)
            .map(|(u, v)| (u as Vertex, v as Vertex))
            .collect();
    }

    pub fn residues(&self) -> &ResidueSystem {
        &self.rs
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.rs.k()
    }

    pub fn q(&self) -> u32 {
        self.rs.q()
    }

    pub fn half(&self) -> u32 {
        self.rs.half()
    }

    pub fn rep(&self, v: Vertex) -> (Elem, Elem) {
        self.reps[v as usize]
    }

    pub fn reps(&self) -> &[(Elem, Elem)] {
        &self.reps
    }

    pub fn label(&self, v: Vertex) -> String {
        let (a, b) = self.rep(v);
        format!("[{a},{b}]")
    }

    /// Canonical representative of the class of `(a, b)`: the first nonzero
    /// coordinate is scaled into `{omega^0, ..., omega^(k-1)}`.
    pub fn canonical(&self, a: Elem, b: Elem) -> Option<(Elem, Elem)> {
        let f = self.rs.field();
        let k = i64::from(self.rs.k());
        let lead = if a != 0 { a } else { b };
        let e = i64::from(f.dlog(lead).ok()?);
        let g = f.omega_pow(e.rem_euclid(k) - e);
        Some((f.mul(a, g), f.mul(b, g)))
    }

    pub fn vertex_of(&self, a: Elem, b: Elem) -> Option<Vertex> {
        self.canonical(a, b)
            .and_then(|p| self.index.get(&p).copied())
    }

    /// Vertex `[0, 1]`.
    pub fn base_vertex(&self) -> Vertex {
        self.vertex_of(0, 1).expect("[0,1] is a vertex")
    }

    #[inline]
    pub fn arc(&self, u: Vertex, v: Vertex) -> EdgeClass {
        self.classes[u as usize * self.n + v as usize]
    }

    /// Unordered digon pairs `(u, v)`, `u < v`, ascending.
    pub fn digons(&self) -> &[(Vertex, Vertex)] {
        &self.digons
    }

    /// Overwrites the classification of `u -> v` (and its reverse). Used to
    /// build deliberately corrupted fixtures for the verifier.
    pub fn set_arc(&mut self, u: Vertex, v: Vertex, class: EdgeClass) {
        let n = self.n;
        self.classes[u as usize * n + v as usize] = class;
        self.classes[v as usize * n + u as usize] = class.reversed();
        self.refresh_digons();
    }

    pub fn out_neighbors(&self, v: Vertex, color: u8) -> Vec<Vertex> {
        let row = &self.classes[v as usize * self.n..(v as usize + 1) * self.n];
        (0..self.n as Vertex)
            .filter(|&w| row[w as usize] == EdgeClass::Forward(color))
            .collect()
    }

    pub fn in_neighbors(&self, v: Vertex, color: u8) -> Vec<Vertex> {
        let row = &self.classes[v as usize * self.n..(v as usize + 1) * self.n];
        (0..self.n as Vertex)
            .filter(|&w| row[w as usize] == EdgeClass::Backward(color))
            .collect()
    }

    /// Color-0 neighbors (digon partners).
    pub fn zero_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let row = &self.classes[v as usize * self.n..(v as usize + 1) * self.n];
        (0..self.n as Vertex)
            .filter(|&w| w != v && row[w as usize] == EdgeClass::Zero)
            .collect()
    }

    pub fn automorphism(&self, kind: AutomorphismKind, s: Elem, v: Vertex) -> Vertex {
        let f = self.rs.field();
        let (a, b) = self.rep(v);
        let (a2, b2) = apply_step(f, AutomorphismStep { kind, s }, (a, b));
        self.vertex_of(a2, b2)
            .expect("automorphisms map nonzero pairs to nonzero pairs")
    }

    pub fn apply_path(&self, path: &[AutomorphismStep], v: Vertex) -> Vertex {
        let f = self.rs.field();
        let (a, b) = path
            .iter()
            .fold(self.rep(v), |p, &step| apply_step(f, step, p));
        self.vertex_of(a, b)
            .expect("automorphisms map nonzero pairs to nonzero pairs")
    }

    /// Composition of rho/sigma maps carrying `from` to `to`: `sigma` then
    /// `rho` fixes the pair when both middle coordinates are nonzero, with
    /// `rho_1` prepended when `b = 0` and `sigma_{-1}` appended when `c = 0`.
    pub fn transitivity_path(&self, from: Vertex, to: Vertex) -> Vec<AutomorphismStep> {
        let f = self.rs.field();
        let (a, mut b) = self.rep(from);
        let (c, d) = self.rep(to);
        let mut steps = Vec::with_capacity(4);
        if b == 0 {
            steps.push(AutomorphismStep {
                kind: AutomorphismKind::Rho,
                s: 1,
            });
            b = a;
        }
        let (tc, finish) = if c == 0 { (d, true) } else { (c, false) };
        let s1 = f.div(f.sub(tc, a), b).expect("b is nonzero");
        steps.push(AutomorphismStep {
            kind: AutomorphismKind::Sigma,
            s: s1,
        });
        let s2 = f
            .div(f.sub(d, b), tc)
            .expect("target first coordinate is nonzero");
        steps.push(AutomorphismStep {
            kind: AutomorphismKind::Rho,
            s: s2,
        });
        if finish {
            steps.push(AutomorphismStep {
                kind: AutomorphismKind::Sigma,
                s: f.neg(1),
            });
        }
        steps
    }

    /// `[a,b] -> [omega*a, b]`, which carries color-i arcs to color-(i+1) arcs.
    pub fn shift_color(&self, v: Vertex) -> Vertex {
        let f = self.rs.field();
        let (a, b) = self.rep(v);
        self.vertex_of(f.mul(f.omega(), a), b)
            .expect("nonzero pair")
    }

    /// `ON_i(v)` with the explicit isomorphism onto the Paley tournament:
    /// carry `v` to `[0,1]`, where `ON_i([0,1]) = {[omega^(i-1), d]}`, and send
    /// `[omega^(i-1), d]` to `-omega^(i-1) * d`.
    pub fn out_neighborhood_paley(
        &self,
        v: Vertex,
        color: u8,
    ) -> Result<PaleyEmbedding, GraphError> {
        if color == 0 || u32::from(color) > self.half() {
            return Err(GraphError::BadColor {
                color: color.into(),
                max: self.half(),
            });
        }
        if v as usize >= self.n {
            return Err(GraphError::BadVertex {
                vertex: v.into(),
                n: self.n,
            });
        }
        let f = self.rs.field();
        let base = self.base_vertex();
        let path = self.transitivity_path(v, base);
        let lead = self.rs.coset_rep(color);
        let minus_lead = f.neg(lead);
        let vertices = self.out_neighbors(v, color);
        let phi = vertices
            .iter()
            .map(|&u| {
                let (a, d) = self.rep(self.apply_path(&path, u));
                debug_assert_eq!(a, lead);
                f.mul(minus_lead, d)
            })
            .collect();
        Ok(PaleyEmbedding {
            color,
            center: v,
            vertices,
            phi,
        })
    }
}

fn apply_step(
    f: &crate::gfq::FieldCtx,
    step: AutomorphismStep,
    (a, b): (Elem, Elem),
) -> (Elem, Elem) {
    match step.kind {
        AutomorphismKind::Rho => (a, f.add(b, f.mul(a, step.s))),
        AutomorphismKind::Sigma => (f.add(a, f.mul(b, step.s)), b),
    }
}

impl Digraph for MathonDigraph {
    fn order(&self) -> usize {
        self.n
    }

    fn color_count(&self) -> u32 {
        self.half()
    }

    #[inline]
    fn arc_color(&self, u: Vertex, v: Vertex) -> Option<u8> {
        if u == v {
            return None;
        }
        match self.arc(u, v) {
            EdgeClass::Zero => Some(0),
            EdgeClass::Forward(i) => Some(i),
            EdgeClass::Backward(_) => None,
        }
    }

    fn is_vertex_transitive(&self) -> bool {
        true
    }
}

/// Replaces every digon `{u, v}` (visited in ascending `(u, v)` order) by the
/// arc chosen by `pick(u, v)`: `(true, c)` for `u -> v`, `(false, c)` for `v -> u`.
pub fn complete_mathon_with(
    m: &MathonDigraph,
    mut pick: impl FnMut(Vertex, Vertex) -> (bool, u8),
) -> Result<ColoredTournament, GraphError> {
    let mut digon_choices = HashMap::with_capacity(m.digons().len());
    for &(u, v) in m.digons() {
        digon_choices.insert((u, v), pick(u, v));
    }
    let t = ColoredTournament::from_pairs(m.n(), m.half(), |u, v| match m.arc(u, v) {
        EdgeClass::Forward(c) => (true, c),
        EdgeClass::Backward(c) => (false, c),
        EdgeClass::Zero => digon_choices[&(u, v)],
    })?;
    let labels = (0..m.n() as Vertex).map(|v| m.label(v)).collect();
    Ok(t.with_meta(GraphFamily::MathonStar, m.k(), m.q(), None)
        .with_labels(labels))
}

/// Seeded completion: each digon consumes one splitmix64 draw `z`; bit 0
/// picks the orientation (0 means `u -> v`) and `((z >> 1) mod (k/2)) + 1`
/// the color.
pub fn complete_mathon(m: &MathonDigraph, seed: u64) -> ColoredTournament {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let half = u64::from(m.half());
    let t = complete_mathon_with(m, |_, _| {
        let z = rng.next_u64();
        (z & 1 == 0, ((z >> 1) % half + 1) as u8)
    })
    .expect("completion colors are within range");
    t.with_meta(GraphFamily::MathonStar, m.k(), m.q(), Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::build_paley;
    use crate::graphs::ArcDir;

    fn mathon(k: u32, q: u64) -> MathonDigraph {
        MathonDigraph::build(&ResidueSystem::for_order(k, q).unwrap())
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(mathon(2, 7).n(), 16);
        assert_eq!(mathon(4, 13).n(), 56);
    }

    #[test]
    fn canonical_representative() {
        let m = mathon(2, 7);
        assert_eq!(m.canonical(6, 1), Some((3, 4)));
        assert_eq!(m.canonical(0, 0), None);
    }

    #[test]
    fn digon_counts() {
        assert_eq!(mathon(2, 7).digons().len(), 8);
        assert_eq!(mathon(4, 13).digons().len(), 84);
        assert_eq!(mathon(6, 43).digons().len(), 44 * 15);
    }

    #[test]
    fn degree_profile() {
        for (k, q) in [(2, 7), (4, 13), (6, 19), (8, 9)] {
            let m = mathon(k, q);
            for v in 0..m.n() as Vertex {
                assert_eq!(m.zero_neighbors(v).len(), k as usize - 1);
                let mut total = m.zero_neighbors(v).len();
                for c in 1..=m.half() as u8 {
                    assert_eq!(m.out_neighbors(v, c).len(), q as usize);
                    assert_eq!(m.in_neighbors(v, c).len(), q as usize);
                    total += 2 * q as usize;
                }
                assert_eq!(total, m.n() - 1);
            }
        }
    }

    #[test]
    fn arcs_are_antisymmetric() {
        let m = mathon(4, 13);
        for u in 0..m.n() as Vertex {
            for v in 0..m.n() as Vertex {
                if u != v {
                    assert_eq!(m.arc(u, v), m.arc(v, u).reversed());
                }
            }
        }
    }

    #[test]
    fn automorphism_basics() {
        let m = mathon(2, 7);
        for v in 0..m.n() as Vertex {
            assert_eq!(m.automorphism(AutomorphismKind::Rho, 0, v), v);
            assert_eq!(m.automorphism(AutomorphismKind::Sigma, 0, v), v);
        }
        let one_zero = m.vertex_of(1, 0).unwrap();
        let one_one = m.vertex_of(1, 1).unwrap();
        assert_eq!(m.automorphism(AutomorphismKind::Rho, 1, one_zero), one_one);
    }

    #[test]
    fn rho_preserves_classification() {
        let m = mathon(2, 7);
        for s in 0..7 {
            for u in 0..m.n() as Vertex {
                for v in 0..m.n() as Vertex {
                    if u == v {
                        continue;
                    }
                    let (fu, fv) = (
                        m.automorphism(AutomorphismKind::Rho, s, u),
                        m.automorphism(AutomorphismKind::Rho, s, v),
                    );
                    assert_eq!(m.arc(u, v), m.arc(fu, fv));
                }
            }
        }
    }

    #[test]
    fn paley_embedding_at_base() {
        for (k, q, color) in [(2u32, 7u64, 1u8), (4, 13, 2), (4, 13, 1)] {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            let m = MathonDigraph::build(&rs);
            let p = build_paley(&rs);
            let emb = m.out_neighborhood_paley(m.base_vertex(), color).unwrap();
            assert_eq!(emb.vertices.len(), q as usize);
            let mut pairs = 0;
            for (i, &u) in emb.vertices.iter().enumerate() {
                for (j, &w) in emb.vertices.iter().enumerate() {
                    if i < j {
                        pairs += 1;
                    }
                    if i == j {
                        continue;
                    }
                    let expected = match m.arc(u, w) {
                        EdgeClass::Forward(c) => ArcDir::Color(c),
                        EdgeClass::Backward(_) => ArcDir::Reverse,
                        EdgeClass::Zero => panic!("digon inside an out-neighborhood"),
                    };
                    assert_eq!(p.arc(emb.phi[i], emb.phi[j]), expected);
                }
            }
            assert_eq!(pairs, q * (q - 1) / 2);
        }
    }

    #[test]
    fn paley_embedding_rejects_bad_color() {
        let m = mathon(2, 7);
        assert!(matches!(
            m.out_neighborhood_paley(0, 2),
            Err(GraphError::BadColor { .. })
        ));
        assert!(matches!(
            m.out_neighborhood_paley(0, 0),
            Err(GraphError::BadColor { .. })
        ));
    }

    #[test]
    fn completion_is_deterministic_and_local() {
        let m = mathon(2, 7);
        let a = complete_mathon(&m, 42);
        assert_eq!(a.arc_count(), 120);
        assert_eq!(a, complete_mathon(&m, 42));

        let m = mathon(4, 13);
        let (s1, s2) = (complete_mathon(&m, 1), complete_mathon(&m, 2));
        let digons: std::collections::HashSet<_> = m.digons().iter().copied().collect();
        let diff = s1.differing_pairs(&s2);
        assert!(diff.iter().all(|p| digons.contains(p)));
        let agree = 56 * 55 / 2 - diff.len();
        assert!(agree >= 1456);
        for u in 0..m.n() as Vertex {
            for v in 0..m.n() as Vertex {
                if let EdgeClass::Forward(c) = m.arc(u, v) {
                    assert_eq!(s1.arc(u, v), ArcDir::Color(c));
                }
            }
        }
    }

    #[test]
    fn completion_stream_is_splitmix() {
        // first splitmix64 output for seed 0
        let mut rng = SplitMix64::seed_from_u64(0);
        assert_eq!(rng.next_u64(), 0xE220A8397B1DCDAF);
        let m = mathon(2, 3);
        let t = complete_mathon(&m, 0);
        let (u, v) = m.digons()[0];
        let z = 0xE220A8397B1DCDAFu64;
        let expected = if z & 1 == 0 {
            ArcDir::Color(1)
        } else {
            ArcDir::Reverse
        };
        assert_eq!(t.arc(u, v), expected);
    }
}
