//! Depth-first branch-and-bound over nested out-neighbor intersections.
//!
//! A chain `a_1, ..., a_l` is transitive exactly when every later vertex is an
//! out-neighbor of every earlier one, so the candidates for the next vertex are
//! the intersection of the out-rows of the chain. Each task fixes the first
//! free chain vertex; tasks run in parallel and are combined in task order.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::bitset::{intersect_into, members, popcount, BitRelation};
use crate::graphs::Vertex;

/// A search space: a fixed chain prefix plus a relation on the vertices that
/// may extend it.
pub(crate) struct Problem {
    pub rel: BitRelation,
    /// Local index -> graph vertex; identity when absent.
    pub map: Option<Vec<Vertex>>,
    pub prefix: Vec<Vertex>,
    /// Local vertices that extend the prefix.
    pub roots: Vec<u64>,
}

impl Problem {
    fn global(&self, local: usize) -> Vertex {
        match &self.map {
            Some(m) => m[local],
            None => local as Vertex,
        }
    }

    fn witness(&self, local_chain: &[usize]) -> Vec<Vertex> {
        self.prefix
            .iter()
            .copied()
            .chain(local_chain.iter().map(|&v| self.global(v)))
            .collect()
    }
}

pub(crate) struct Control {
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Control {
    pub fn new(deadline: Option<Instant>) -> Self {
        Self {
            deadline,
            timed_out: AtomicBool::new(false),
            nodes: AtomicU64::new(0),
        }
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out.load(Ordering::Relaxed)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

const CHECK_EVERY: u64 = 1 << 12;

struct Walker<'a> {
    rel: &'a BitRelation,
    words: usize,
    bufs: Vec<u64>,
    chain: Vec<usize>,
    nodes: u64,
    ctl: &'a Control,
    cancel: &'a dyn Fn() -> bool,
    aborted: bool,
}

impl<'a> Walker<'a> {
    fn new(
        rel: &'a BitRelation,
        depth: usize,
        ctl: &'a Control,
        cancel: &'a dyn Fn() -> bool,
    ) -> Self {
        let words = rel.words();
        Self {
            rel,
            words,
            bufs: vec![0; (depth + 2) * words],
            chain: Vec::with_capacity(depth + 1),
            nodes: 0,
            ctl,
            cancel,
            aborted: false,
        }
    }

    fn load(&mut self, level: usize, set: &[u64]) {
        self.bufs[level * self.words..(level + 1) * self.words].copy_from_slice(set);
    }

    /// Writes `cands[level] & row(v)` into level + 1 and returns its size.
    #[inline]
    fn descend(&mut self, level: usize, v: usize) -> usize {
        let w = self.words;
        let (cur, next) = self.bufs.split_at_mut((level + 1) * w);
        intersect_into(&mut next[..w], &cur[level * w..], self.rel.row(v))
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes % CHECK_EVERY == 0 {
            if (self.cancel)() {
                self.aborted = true;
            } else if let Some(d) = self.ctl.deadline {
                if Instant::now() >= d {
                    self.ctl.timed_out.store(true, Ordering::Relaxed);
                    self.aborted = true;
                }
            }
            if self.ctl.timed_out() {
                self.aborted = true;
            }
        }
        self.aborted
    }

    /// Tries to pick `need` more chain vertices from the candidates at `level`.
    fn exists(&mut self, level: usize, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        let w = self.words;
        for wi in 0..w {
            let mut word = self.bufs[level * w + wi];
            while word != 0 {
                let v = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if self.tick() {
                    return false;
                }
                if need == 1 {
                    self.chain.push(v);
                    return true;
                }
                if self.descend(level, v) + 1 < need {
                    continue;
                }
                self.chain.push(v);
                if self.exists(level + 1, need - 1) {
                    return true;
                }
                self.chain.pop();
                if self.aborted {
                    return false;
                }
            }
        }
        false
    }

    /// Number of ways to pick `need >= 1` more chain vertices.
    fn count(&mut self, level: usize, need: usize) -> u64 {
        let w = self.words;
        if need == 1 {
            return popcount(&self.bufs[level * w..(level + 1) * w]) as u64;
        }
        let mut total = 0u64;
        for wi in 0..w {
            let mut word = self.bufs[level * w + wi];
            while word != 0 {
                let v = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if self.tick() {
                    return total;
                }
                let c = self.descend(level, v);
                if c + 1 < need {
                    continue;
                }
                total += if need == 2 {
                    c as u64
                } else {
                    self.count(level + 1, need - 1)
                };
            }
        }
        total
    }

    /// Grows chains while they can still beat the local best (and reach the
    /// shared best). `depth` counts prefix and local chain vertices.
    fn maximize(&mut self, level: usize, depth: usize, best: &mut MaxState, shared: &AtomicUsize) {
        let w = self.words;
        for wi in 0..w {
            let mut word = self.bufs[level * w + wi];
            while word != 0 {
                let v = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                if self.tick() {
                    return;
                }
                let c = self.descend(level, v);
                let reach = depth + 1;
                self.chain.push(v);
                if reach > best.len {
                    best.len = reach;
                    best.chain = self.chain.clone();
                    shared.fetch_max(reach, Ordering::Relaxed);
                    if best.limit.is_some_and(|l| reach >= l) {
                        best.hit_limit = true;
                        self.aborted = true;
                        return;
                    }
                }
                let known = shared.load(Ordering::Relaxed);
                let threshold = if best.deterministic {
                    known.max(best.len + 1)
                } else {
                    known.max(best.len) + 1
                };
                if c > 0 && reach + c >= threshold {
                    self.maximize(level + 1, reach, best, shared);
                    if self.aborted {
                        return;
                    }
                }
                self.chain.pop();
            }
        }
    }
}

struct MaxState {
    len: usize,
    chain: Vec<usize>,
    limit: Option<usize>,
    deterministic: bool,
    hit_limit: bool,
}

fn tasks(problems: &[Problem]) -> Vec<(usize, usize)> {
    problems
        .iter()
        .enumerate()
        .flat_map(|(pi, p)| members(&p.roots).map(move |r| (pi, r)))
        .collect()
}

/// Lowest-task witness for a chain of order `m`.
pub(crate) fn run_exists(problems: &[Problem], m: usize, ctl: &Control) -> Option<Vec<Vertex>> {
    for p in problems {
        if m <= p.prefix.len() {
            return Some(p.prefix[..m].to_vec());
        }
    }
    let all = tasks(problems);
    let found_at = AtomicUsize::new(usize::MAX);
    let hits: Vec<Option<(usize, Vec<Vertex>)>> = all
        .par_iter()
        .enumerate()
        .map(|(ti, &(pi, root))| {
            if found_at.load(Ordering::Relaxed) < ti || ctl.timed_out() {
                return None;
            }
            let p = &problems[pi];
            let need = m - p.prefix.len();
            let cancel = || found_at.load(Ordering::Relaxed) < ti;
            let mut walker = Walker::new(&p.rel, need, ctl, &cancel);
            walker.load(0, &p.roots);
            let c = walker.descend(0, root);
            walker.chain.push(root);
            let ok = need == 1 || (c + 1 >= need && walker.exists(1, need - 1));
            ctl.nodes.fetch_add(walker.nodes + 1, Ordering::Relaxed);
            if ok {
                found_at.fetch_min(ti, Ordering::Relaxed);
                Some((ti, p.witness(&walker.chain)))
            } else {
                None
            }
        })
        .collect();
    hits.into_iter()
        .flatten()
        .min_by_key(|(ti, _)| *ti)
        .map(|(_, w)| w)
}

/// Number of chains of order `m` in each problem (not yet scaled by orbit size).
pub(crate) fn run_count(problems: &[Problem], m: usize, ctl: &Control) -> Vec<u64> {
    let mut out: Vec<u64> = problems
        .iter()
        .map(|p| match m.checked_sub(p.prefix.len()) {
            None => 0,
            Some(0) => 1,
            Some(1) => popcount(&p.roots) as u64,
            Some(_) => 0,
        })
        .collect();
    let deep: Vec<usize> = (0..problems.len())
        .filter(|&i| m > problems[i].prefix.len() + 1)
        .collect();
    if deep.is_empty() {
        return out;
    }
    let all: Vec<(usize, usize)> = tasks(problems)
        .into_iter()
        .filter(|(pi, _)| deep.contains(pi))
        .collect();
    let counts: Vec<(usize, u64)> = all
        .par_iter()
        .map(|&(pi, root)| {
            let p = &problems[pi];
            let need = m - p.prefix.len() - 1;
            let cancel = || false;
            let mut walker = Walker::new(&p.rel, need, ctl, &cancel);
            walker.load(0, &p.roots);
            let c = walker.descend(0, root);
            let n = if c < need { 0 } else { walker.count(1, need) };
            ctl.nodes.fetch_add(walker.nodes + 1, Ordering::Relaxed);
            (pi, n)
        })
        .collect();
    for (pi, n) in counts {
        out[pi] += n;
    }
    out
}

/// Longest chain; ties resolved by lowest task, then first found within it.
pub(crate) fn run_max(
    problems: &[Problem],
    limit: Option<usize>,
    deterministic: bool,
    ctl: &Control,
) -> (usize, Vec<Vertex>) {
    let mut base: (usize, Vec<Vertex>) = (0, Vec::new());
    for p in problems {
        if p.prefix.len() > base.0 {
            base = (p.prefix.len(), p.prefix.clone());
        }
    }
    if let Some(l) = limit {
        if base.0 >= l {
            base.1.truncate(l);
            return (l, base.1);
        }
    }
    let all = tasks(problems);
    let shared = AtomicUsize::new(base.0);
    let stop_at = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<(usize, usize, Vec<Vertex>)>> = all
        .par_iter()
        .enumerate()
        .map(|(ti, &(pi, root))| {
            if stop_at.load(Ordering::Relaxed) < ti || ctl.timed_out() {
                return None;
            }
            let p = &problems[pi];
            let cancel = || stop_at.load(Ordering::Relaxed) < ti;
            let mut walker = Walker::new(&p.rel, p.rel.n(), ctl, &cancel);
            walker.load(0, &p.roots);
            let c = walker.descend(0, root);
            walker.chain.push(root);
            let reach = p.prefix.len() + 1;
            let mut state = MaxState {
                len: reach,
                chain: walker.chain.clone(),
                limit,
                deterministic,
                hit_limit: limit.is_some_and(|l| reach >= l),
            };
            shared.fetch_max(reach, Ordering::Relaxed);
            if !state.hit_limit && c > 0 {
                walker.maximize(1, reach, &mut state, &shared);
            }
            if state.hit_limit {
                stop_at.fetch_min(ti, Ordering::Relaxed);
            }
            ctl.nodes.fetch_add(walker.nodes + 1, Ordering::Relaxed);
            Some((state.len, ti, p.witness(&state.chain)))
        })
        .collect();
    let best = results
        .into_iter()
        .flatten()
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    match best {
        Some((len, _, w)) if len > base.0 => (len, w),
        _ => base,
    }
}
