//! Executable structural checks on Mathon digraphs and completion spot-checks
//! for the monochromatic transitive subtournament bound.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::gfq::{EdgeClass, ResidueError, ResidueSystem};
use crate::graphs::{
    build_paley, complete_mathon, complete_mathon_with, ArcDir, AutomorphismKind,
    ColoredTournament, Digraph, MathonDigraph, PaleyView, Vertex,
};
use crate::ttsearch::{
    now_secs, run, CacheRecord, ColorScope, Mode, RecordKind, SearchError, SearchTask, Symmetry,
};
use crate::TOOL_VERSION;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("m = {m} < k = {k}: the bound needs m >= k")]
    Hypothesis { k: u32, m: usize },
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The hypothesis `K_m(G_k(q)) = 0` does not hold, so nothing was tested.
    Vacuous,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Vacuous => "VACUOUS",
        })
    }
}

/// Outcome of one check. `Fail` always carries a counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub k: u32,
    pub q: u64,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub status: CheckStatus,
    pub detail: String,
    pub counterexample: Option<Value>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }

    /// The report as a cache line of kind `check`.
    pub fn to_record(&self) -> CacheRecord {
        CacheRecord {
            k: self.k,
            q: self.q,
            m: self.m,
            kind: RecordKind::Check,
            color: ColorScope::Any,
            value: serde_json::to_value(self).expect("reports serialize"),
            witness: None,
            elapsed_ms: self.elapsed_ms,
            version: TOOL_VERSION.to_string(),
            timestamp: now_secs(),
            at_limit: false,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} k={} q={}", self.status, self.name, self.k, self.q)?;
        if let Some(m) = self.m {
            write!(f, " m={m}")?;
        }
        write!(f, ": {}", self.detail)?;
        if let Some(c) = &self.counterexample {
            write!(f, " counterexample={c}")?;
        }
        Ok(())
    }
}

struct Outcome {
    detail: String,
    counterexample: Option<Value>,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        detail: detail.into(),
        counterexample: None,
    }
}

fn fail(detail: impl Into<String>, counterexample: Value) -> Outcome {
    Outcome {
        detail: detail.into(),
        counterexample: Some(counterexample),
    }
}

fn report(name: &str, m: &MathonDigraph, f: impl FnOnce(&MathonDigraph) -> Outcome) -> CheckReport {
    let start = Instant::now();
    let out = f(m);
    CheckReport {
        name: name.to_string(),
        k: m.k(),
        q: m.q().into(),
        m: None,
        trials: None,
        status: if out.counterexample.is_some() {
            CheckStatus::Fail
        } else {
            CheckStatus::Pass
        },
        detail: out.detail,
        counterexample: out.counterexample,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn class_json(c: EdgeClass) -> String {
    c.to_string()
}

/// Finds `(u, v)` with `arc(u, v) != arc(pi(u), pi(v))`, or a collision of `pi`.
fn preserves(m: &MathonDigraph, image: &[Vertex]) -> Result<(), Value> {
    let n = m.n();
    let distinct: HashSet<Vertex> = image.iter().copied().collect();
    if distinct.len() != n {
        return Err(json!({ "reason": "not a bijection" }));
    }
    for u in 0..n as Vertex {
        for v in 0..n as Vertex {
            if u == v {
                continue;
            }
            let (a, b) = (m.arc(u, v), m.arc(image[u as usize], image[v as usize]));
            if a != b {
                return Err(json!({
                    "u": m.label(u), "v": m.label(v),
                    "u_image": m.label(image[u as usize]), "v_image": m.label(image[v as usize]),
                    "before": class_json(a), "after": class_json(b),
                }));
            }
        }
    }
    Ok(())
}

fn check_automorphisms(m: &MathonDigraph) -> Outcome {
    let n = m.n() as Vertex;
    for kind in [AutomorphismKind::Rho, AutomorphismKind::Sigma] {
        for s in 0..m.q() {
            let image: Vec<Vertex> = (0..n).map(|v| m.automorphism(kind, s, v)).collect();
            if let Err(mut cx) = preserves(m, &image) {
                cx["map"] = json!({ "kind": kind, "s": s });
                return fail(format!("{kind:?}_{s} is not an automorphism"), cx);
            }
        }
    }
    pass(format!(
        "all {} rho/sigma maps preserve every arc class",
        2 * m.q()
    ))
}

fn check_transitivity(m: &MathonDigraph) -> Outcome {
    let n = m.n() as Vertex;
    for u in 0..n {
        for v in 0..n {
            let path = m.transitivity_path(u, v);
            let got = m.apply_path(&path, u);
            if got != v {
                return fail(
                    "composed maps miss their target",
                    json!({ "from": m.label(u), "to": m.label(v), "reached": m.label(got), "path": path }),
                );
            }
        }
    }
    pass(format!(
        "{} ordered pairs joined by composed maps",
        u64::from(n) * u64::from(n)
    ))
}

fn check_zero_cliques(m: &MathonDigraph) -> Outcome {
    let n = m.n();
    let k = m.k() as usize;
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut stack = vec![start as Vertex];
        let mut members = Vec::new();
        comp[start] = id;
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in m.zero_neighbors(v) {
                if comp[w as usize] == usize::MAX {
                    comp[w as usize] = id;
                    stack.push(w);
                }
            }
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if m.arc(a, b) != EdgeClass::Zero {
                    return fail(
                        "color-0 component is not a clique",
                        json!({ "u": m.label(a), "v": m.label(b), "class": class_json(m.arc(a, b)) }),
                    );
                }
            }
        }
        if members.len() != k {
            return fail(
                format!(
                    "color-0 component of order {} instead of {k}",
                    members.len()
                ),
                json!({ "component": members.iter().map(|&v| m.label(v)).collect::<Vec<_>>() }),
            );
        }
        sizes.push(members.len());
    }
    let want = m.q() as usize + 1;
    if sizes.len() != want {
        return fail(
            format!("{} color-0 cliques instead of {want}", sizes.len()),
            json!({ "cliques": sizes.len() }),
        );
    }
    pass(format!("{want} disjoint color-0 cliques of order {k}"))
}

fn check_color_shift(m: &MathonDigraph) -> Outcome {
    let n = m.n() as Vertex;
    let half = m.half() as u8;
    let image: Vec<Vertex> = (0..n).map(|v| m.shift_color(v)).collect();
    if image.iter().collect::<HashSet<_>>().len() != n as usize {
        return fail(
            "color shift is not a bijection",
            json!({ "reason": "not a bijection" }),
        );
    }
    let mut counts = vec![0usize; usize::from(half) + 1];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let before = m.arc(u, v);
            if let EdgeClass::Forward(i) = before {
                counts[usize::from(i)] += 1;
                let after = m.arc(image[u as usize], image[v as usize]);
                if i < half && after != EdgeClass::Forward(i + 1) {
                    return fail(
                        format!("color-{i} arc not carried to color {}", i + 1),
                        json!({ "u": m.label(u), "v": m.label(v), "after": class_json(after) }),
                    );
                }
            }
        }
    }
    if counts[1..].iter().any(|&c| c != counts[1]) {
        return fail(
            "color classes differ in size",
            json!({ "arcs_per_color": counts[1..].to_vec() }),
        );
    }
    pass(format!(
        "colors 1..{half} pairwise isomorphic with {} arcs each",
        counts[1]
    ))
}

fn check_disjoint_neighborhoods(m: &MathonDigraph) -> Outcome {
    let n = m.n() as Vertex;
    let half = m.half() as u8;
    for v in 0..n {
        for x in m.zero_neighbors(v) {
            for i in 1..=half {
                for w in 0..n {
                    let out_both = m.arc(v, w) == EdgeClass::Forward(i)
                        && m.arc(x, w) == EdgeClass::Forward(i);
                    let in_both = m.arc(v, w) == EdgeClass::Backward(i)
                        && m.arc(x, w) == EdgeClass::Backward(i);
                    if out_both || in_both {
                        return fail(
                            "digon partners share a neighbor",
                            json!({
                                "v": m.label(v), "x": m.label(x), "w": m.label(w), "color": i,
                                "side": if out_both { "out" } else { "in" },
                            }),
                        );
                    }
                }
            }
        }
    }
    pass("digon partners have disjoint same-color out- and in-neighborhoods")
}

fn check_paley_embedding(m: &MathonDigraph, paley: &ColoredTournament) -> Outcome {
    let q = m.q() as usize;
    let centers = [m.base_vertex(), m.n() as Vertex - 1];
    for &center in &centers {
        for i in 1..=m.half() as u8 {
            let emb = match m.out_neighborhood_paley(center, i) {
                Ok(e) => e,
                Err(e) => {
                    return fail(
                        "embedding unavailable",
                        json!({ "center": m.label(center), "error": e.to_string() }),
                    )
                }
            };
            let distinct: HashSet<_> = emb.phi.iter().collect();
            if emb.vertices.len() != q || distinct.len() != q {
                return fail(
                    "out-neighborhood is not in bijection with the field",
                    json!({ "center": m.label(center), "color": i, "size": emb.vertices.len(), "distinct_images": distinct.len() }),
                );
            }
            for (j, &u) in emb.vertices.iter().enumerate() {
                for (l, &w) in emb.vertices.iter().enumerate() {
                    if j == l {
                        continue;
                    }
                    let want = match m.arc(u, w) {
                        EdgeClass::Forward(c) => Some(ArcDir::Color(c)),
                        EdgeClass::Backward(_) => Some(ArcDir::Reverse),
                        EdgeClass::Zero => None,
                    };
                    let got = paley.arc(emb.phi[j], emb.phi[l]);
                    if want != Some(got) {
                        return fail(
                            "embedding does not preserve arcs",
                            json!({
                                "center": m.label(center), "color": i,
                                "u": m.label(u), "w": m.label(w),
                                "mathon": class_json(m.arc(u, w)),
                                "phi_u": emb.phi[j], "phi_w": emb.phi[l],
                            }),
                        );
                    }
                }
            }
        }
    }
    pass(format!(
        "every ON_i at two centers maps isomorphically onto the Paley tournament of order {q}"
    ))
}

/// Structural checks, in order: automorphisms, transitivity, color-0
/// cliques, color shift, disjoint neighborhoods of digon partners, Paley
/// embedding of out-neighborhoods.
pub fn check_structure(m: &MathonDigraph) -> Vec<CheckReport> {
    let paley = build_paley(m.residues());
    vec![
        report("automorphisms", m, check_automorphisms),
        report("transitivity", m, check_transitivity),
        report("zero-cliques", m, check_zero_cliques),
        report("color-shift", m, check_color_shift),
        report("disjoint-neighborhoods", m, check_disjoint_neighborhoods),
        report("paley-embedding", m, |m| check_paley_embedding(m, &paley)),
    ]
}

/// Names a completion of the digons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completion {
    Seeded(u64),
    /// Every digon `u < v` becomes `u -> v` in color 1.
    LowToHigh,
    /// Every digon `u < v` becomes `v -> u` in color k/2.
    HighToLow,
}

impl Completion {
    pub fn build(self, m: &MathonDigraph) -> ColoredTournament {
        let top = m.half() as u8;
        match self {
            Self::Seeded(seed) => complete_mathon(m, seed),
            Self::LowToHigh => complete_mathon_with(m, |_, _| (true, 1)).expect("color 1 is valid"),
            Self::HighToLow => {
                complete_mathon_with(m, |_, _| (false, top)).expect("color k/2 is valid")
            }
        }
    }
}

/// Searches `trials` seeded completions (seeds `base_seed + j`) plus both
/// adversarial ones for a monochromatic transitive subtournament of order
/// `m + 2`, after confirming that the Paley digraph has none of order `m`.
pub fn check_theorem(
    k: u32,
    q: u64,
    m: usize,
    trials: usize,
    base_seed: u64,
) -> Result<CheckReport, VerifyError> {
    if m < k as usize {
        return Err(VerifyError::Hypothesis { k, m });
    }
    let start = Instant::now();
    let rs = ResidueSystem::for_order(k, q)?;
    let mut rep = CheckReport {
        name: "theorem".to_string(),
        k,
        q,
        m: Some(m),
        trials: Some(trials),
        status: CheckStatus::Pass,
        detail: String::new(),
        counterexample: None,
        elapsed_ms: 0,
    };
    let view = PaleyView::new(rs.clone());
    let base = run(
        &SearchTask::new(&view, ColorScope::Single(1), Mode::Exists(m))
            .symmetry(Symmetry::PaleyAffine),
    )?;
    if base.exists() == Some(true) {
        rep.status = CheckStatus::Vacuous;
        rep.detail = format!("the Paley digraph already contains TT_{m}; nothing to check");
        rep.counterexample = None;
        rep.elapsed_ms = start.elapsed().as_millis() as u64;
        return Ok(rep);
    }

    let mathon = MathonDigraph::build(&rs);
    let target = m + 2;
    let completions = (0..trials as u64)
        .map(|j| Completion::Seeded(base_seed.wrapping_add(j)))
        .chain([Completion::LowToHigh, Completion::HighToLow]);
    let mut checked = 0usize;
    for c in completions {
        let t = c.build(&mathon);
        for color in 1..=t.color_count() as u8 {
            let task = SearchTask::new(&t, ColorScope::Single(color), Mode::Exists(target));
            let r = run(&task)?;
            if let Some(w) = r.witness {
                rep.status = CheckStatus::Fail;
                rep.detail = format!("completion contains a color-{color} TT_{target}");
                rep.counterexample = Some(json!({ "completion": c, "color": color, "chain": w }));
                rep.elapsed_ms = start.elapsed().as_millis() as u64;
                return Ok(rep);
            }
        }
        checked += 1;
    }
    rep.detail = format!(
        "{checked} completions of order {} have no monochromatic TT_{target}",
        mathon.n()
    );
    rep.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(rep)
}
