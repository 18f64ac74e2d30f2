use proptest::prelude::*;

use super::*;
use crate::gfq::{admissible_q, ResidueSystem};
use crate::graphs::{build_paley, complete_mathon, ColoredTournament, MathonDigraph, PaleyView};

/// Oracle: enumerate every m-subset and test the out-degree-set
/// characterization directly (out-degrees within the subset are exactly 0..m-1).
fn oracle_count(g: &dyn Digraph, m: usize, color: ColorScope) -> u64 {
    fn rec(
        g: &dyn Digraph,
        color: ColorScope,
        start: usize,
        m: usize,
        cur: &mut Vec<Vertex>,
        total: &mut u64,
    ) {
        if cur.len() == m {
            let mut degs: Vec<usize> = cur
                .iter()
                .map(|&u| {
                    cur.iter()
                        .filter(|&&v| color.admits(g.arc_color(u, v)))
                        .count()
                })
                .collect();
            degs.sort_unstable();
            if degs.iter().enumerate().all(|(i, &d)| i == d) {
                *total += 1;
            }
            return;
        }
        for v in start..g.order() {
            cur.push(v as Vertex);
            rec(g, color, v + 1, m, cur, total);
            cur.pop();
        }
    }
    let mut total = 0;
    rec(g, color, 0, m, &mut Vec::new(), &mut total);
    total
}

fn paley(k: u32, q: u64) -> ColoredTournament {
    build_paley(&ResidueSystem::for_order(k, q).unwrap())
}

fn view(k: u32, q: u64) -> PaleyView {
    PaleyView::new(ResidueSystem::for_order(k, q).unwrap())
}

const C1: ColorScope = ColorScope::Single(1);

#[test]
fn transitivity_examples() {
    let g = paley(2, 7);
    assert_eq!(
        is_transitive(&g, &[0, 1, 2], C1).unwrap(),
        Some(vec![0, 1, 2])
    );
    assert_eq!(
        is_transitive(&g, &[2, 0, 1], C1).unwrap(),
        Some(vec![0, 1, 2])
    );
    assert_eq!(is_transitive(&g, &[0, 1, 3], C1).unwrap(), None);
    assert_eq!(is_transitive(&g, &[5], C1).unwrap(), Some(vec![5]));
    assert_eq!(
        is_transitive(&g, &[0, 9], C1),
        Err(SearchError::BadVertex { vertex: 9, n: 7 })
    );
    assert_eq!(
        is_transitive(&g, &[1, 1], C1),
        Err(SearchError::DuplicateVertex(1))
    );
}

#[test]
fn count_examples() {
    let g = paley(2, 7);
    assert_eq!(oracle_count(&g, 3, C1), 21);
    assert_eq!(count_tt(&g, 3, C1, CountMethod::Brute).unwrap(), 21);
    assert_eq!(count_tt(&g, 3, C1, CountMethod::Symmetric).unwrap(), 21);
    assert_eq!(count_tt(&g, 4, C1, CountMethod::Brute).unwrap(), 0);
    assert_eq!(
        count_tt(&paley(4, 13), 3, C1, CountMethod::Symmetric).unwrap(),
        0
    );
    assert_eq!(count_tt(&g, 1, C1, CountMethod::Brute).unwrap(), 7);
}

#[test]
fn symmetric_requires_paley_and_order_two() {
    let m = MathonDigraph::build(&ResidueSystem::for_order(2, 7).unwrap());
    let t = complete_mathon(&m, 1);
    assert_eq!(
        count_tt(&t, 3, C1, CountMethod::Symmetric),
        Err(SearchError::SymmetryUnavailable(Symmetry::PaleyAffine))
    );
    assert_eq!(
        count_tt(&paley(2, 7), 1, C1, CountMethod::Symmetric),
        Err(SearchError::BadOrder { m: 1, min: 2 })
    );
    assert_eq!(
        count_tt(&paley(2, 7), 3, ColorScope::Single(2), CountMethod::Brute),
        Err(SearchError::BadColor { color: 2, max: 1 })
    );
}

#[test]
fn exists_and_max_small() {
    assert_eq!(exists_tt(&paley(2, 3), 3, C1).unwrap(), None);
    assert_eq!(max_tt(&paley(2, 3), C1).unwrap().max_order(), Some(2));
    let r = max_tt(&paley(2, 7), C1).unwrap();
    assert_eq!(r.max_order(), Some(3));
    assert_eq!(r.witness, Some(vec![0, 1, 2]));
    assert_eq!(exists_tt(&view(2, 27), 7, C1).unwrap(), None);
    for q in [31, 43, 47] {
        let w = exists_tt(&view(2, q), 7, C1)
            .unwrap()
            .expect("TT_7 present");
        assert_eq!(w.len(), 7);
        let g = view(2, q);
        assert_eq!(is_transitive(&g, &w, C1).unwrap(), Some(w.clone()));
    }
    // matches the hand-built GF(27) check in gf27_squares_have_no_tt6
    let r = max_tt(&view(2, 27), C1).unwrap();
    assert_eq!(r.max_order(), Some(5));
    for sym in [
        Symmetry::None,
        Symmetry::VertexTransitive,
        Symmetry::PaleyAffine,
    ] {
        let r = run(&SearchTask::new(&view(2, 27), C1, Mode::Max(None)).symmetry(sym)).unwrap();
        assert_eq!(r.max_order(), Some(5), "{sym:?}");
    }
}

#[test]
fn brute_and_symmetric_agree_with_oracle() {
    for (k, qmax) in [(2u32, 31u64), (4, 31)] {
        for q in admissible_q(k, qmax).unwrap() {
            let g = paley(k, q);
            for m in 2..=5 {
                let brute = count_tt(&g, m, C1, CountMethod::Brute).unwrap();
                let sym = count_tt(&g, m, C1, CountMethod::Symmetric).unwrap();
                assert_eq!(brute, sym, "k={k} q={q} m={m}");
                assert_eq!(sym % (q * (q - 1) / u64::from(k)), 0);
                if q <= 23 {
                    assert_eq!(brute, oracle_count(&g, m, C1), "k={k} q={q} m={m}");
                }
            }
        }
    }
}

#[test]
fn any_scope_counts_underlying_tournament() {
    let g = paley(4, 13);
    for m in 2..=4 {
        let any = count_tt(&g, m, ColorScope::Any, CountMethod::Brute).unwrap();
        assert_eq!(any, oracle_count(&g, m, ColorScope::Any));
        assert_eq!(
            any,
            count_tt(&g, m, ColorScope::Any, CountMethod::Symmetric).unwrap()
        );
    }
}

#[test]
fn vertex_transitive_mathon_counts() {
    let m = MathonDigraph::build(&ResidueSystem::for_order(4, 13).unwrap());
    for c in 1..=2u8 {
        for order in 1..=4 {
            let color = ColorScope::Single(c);
            let full = run(&SearchTask::new(&m, color, Mode::Count(order))).unwrap();
            let sym = run(&SearchTask::new(&m, color, Mode::Count(order))
                .symmetry(Symmetry::VertexTransitive))
            .unwrap();
            assert_eq!(full.value, sym.value, "color {c} m={order}");
        }
    }
}

#[test]
fn paley_colors_are_isomorphic() {
    for (k, q) in [(4u32, 29u64), (6, 43), (8, 9)] {
        let g = view(k, q);
        let base = max_tt(&g, C1).unwrap().max_order();
        for c in 2..=(k / 2) as u8 {
            assert_eq!(
                max_tt(&g, ColorScope::Single(c)).unwrap().max_order(),
                base,
                "k={k} q={q} c={c}"
            );
        }
    }
}

#[test]
fn deterministic_max_witness_is_lex_least() {
    let m = MathonDigraph::build(&ResidueSystem::for_order(2, 7).unwrap());
    let t = complete_mathon(&m, 5);
    let r = run(&SearchTask::new(&t, C1, Mode::Max(None))).unwrap();
    let len = r.max_order().unwrap();
    // oracle: all chains of that order, lexicographically sorted
    let mut chains = Vec::new();
    let n = t.n() as Vertex;
    let mut stack: Vec<Vec<Vertex>> = (0..n).map(|v| vec![v]).collect();
    while let Some(ch) = stack.pop() {
        if ch.len() == len {
            chains.push(ch);
            continue;
        }
        for v in 0..n {
            if ch.iter().all(|&u| C1.admits(t.arc_color(u, v))) {
                let mut next = ch.clone();
                next.push(v);
                stack.push(next);
            }
        }
    }
    chains.sort();
    assert_eq!(r.witness.as_ref(), chains.first());
    assert_eq!(oracle_count(&t, len + 1, C1), 0);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let g = view(2, 43);
    let tasks = [
        Mode::Count(5),
        Mode::Exists(7),
        Mode::Max(None),
        Mode::Max(Some(5)),
    ];
    let runs: Vec<Vec<(SearchValue, Option<Vec<Vertex>>)>> = [1, 3, 8]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                tasks
                    .iter()
                    .flat_map(|&mode| {
                        [Symmetry::None, Symmetry::PaleyAffine].map(|s| {
                            let r = run(&SearchTask::new(&g, C1, mode).symmetry(s)).unwrap();
                            (r.value, r.witness)
                        })
                    })
                    .collect()
            })
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn budget_marks_partial_results() {
    let g = view(2, 199);
    let r = run(&SearchTask::new(&g, C1, Mode::Count(9)).budget(Some(std::time::Duration::ZERO)))
        .unwrap();
    assert!(!r.complete);
}

#[test]
fn scan_examples() {
    let mut cache = ResultCache::in_memory();
    let out = scan(2, 7, 50, &mut cache, ScanOptions::default()).unwrap();
    assert_eq!(out.largest, Some(27));
    assert!(!out.at_limit);
    let before = cache.records().len();
    let again = scan(2, 7, 50, &mut cache, ScanOptions::default()).unwrap();
    assert_eq!(again.largest, Some(27));
    assert!(again.steps.iter().all(|s| s.cached));
    assert_eq!(cache.records().len(), before + 1);

    let asc = scan(
        2,
        7,
        50,
        &mut ResultCache::in_memory(),
        ScanOptions {
            order: ScanOrder::Ascending,
            budget: None,
        },
    )
    .unwrap();
    assert_eq!(asc.largest, Some(27));

    assert_eq!(
        scan(4, 3, 100, &mut cache, ScanOptions::default())
            .unwrap()
            .largest,
        Some(13)
    );
    assert_eq!(
        scan(10, 3, 100, &mut cache, ScanOptions::default())
            .unwrap()
            .largest,
        Some(71)
    );
    let limit = scan(2, 7, 27, &mut cache, ScanOptions::default()).unwrap();
    assert_eq!(limit.largest, Some(27));
    assert!(limit.at_limit);
    assert!(matches!(
        scan(10, 3, 10, &mut cache, ScanOptions::default()),
        Err(ScanError::NoAdmissible { .. })
    ));
}

fn random_tournament(n: usize, colors: u32, bits: &[u8]) -> ColoredTournament {
    let mut i = 0;
    ColoredTournament::from_pairs(n, colors, |_, _| {
        let b = bits[i % bits.len()];
        i += 1;
        (b & 1 == 0, (b >> 1) % colors as u8 + 1)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_matches_oracle_on_random_tournaments(
        n in 1usize..11,
        colors in 1u32..3,
        bits in prop::collection::vec(any::<u8>(), 1..64),
    ) {
        let t = random_tournament(n, colors, &bits);
        for scope in [ColorScope::Single(1), ColorScope::Any] {
            let mut best = 0;
            for m in 1..=n {
                let want = oracle_count(&t, m, scope);
                prop_assert_eq!(count_tt(&t, m, scope, CountMethod::Brute).unwrap(), want);
                let w = exists_tt(&t, m, scope).unwrap();
                prop_assert_eq!(w.is_some(), want > 0);
                if let Some(w) = w {
                    prop_assert_eq!(is_transitive(&t, &w, scope).unwrap(), Some(w.clone()));
                    best = m;
                }
            }
            prop_assert_eq!(max_tt(&t, scope).unwrap().max_order(), Some(best));
        }
    }

    #[test]
    fn exists_is_monotone_in_order(q_idx in 0usize..9, m in 2usize..8) {
        let q = admissible_q(2, 47).unwrap()[q_idx];
        let g = view(2, q);
        if exists_tt(&g, m, C1).unwrap().is_some() {
            for smaller in 1..m {
                prop_assert!(exists_tt(&g, smaller, C1).unwrap().is_some());
            }
        }
    }
}

#[test]
fn search_result_json_round_trips_by_kind() {
    let g = paley(2, 27);
    for mode in [Mode::Max(None), Mode::Count(3), Mode::Exists(4)] {
        let r = run(&SearchTask::new(&g, ColorScope::Single(1), mode)).unwrap();
        let back: SearchResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

/// GF(27) as F_3[x]/(x^3 + 2x + 1), written out by hand; arcs a -> b when
/// b - a is a nonzero square. Counts transitive subsets by out-degrees.
#[test]
fn gf27_squares_have_no_tt6() {
    type E = [u8; 3];
    fn mul(a: E, b: E) -> E {
        let mut p = [0u8; 5];
        for i in 0..3 {
            for j in 0..3 {
                p[i + j] = (p[i + j] + a[i] * b[j]) % 3;
            }
        }
        // x^3 = x + 2
        for d in (3..5).rev() {
            let c = p[d];
            p[d] = 0;
            p[d - 2] = (p[d - 2] + c) % 3;
            p[d - 3] = (p[d - 3] + 2 * c) % 3;
        }
        [p[0], p[1], p[2]]
    }
    let elems: Vec<E> = (0..27u8).map(|i| [i % 3, i / 3 % 3, i / 9]).collect();
    let squares: Vec<E> = elems[1..].iter().map(|&a| mul(a, a)).collect();
    let arc: Vec<Vec<bool>> = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    squares.contains(&[
                        (b[0] + 3 - a[0]) % 3,
                        (b[1] + 3 - a[1]) % 3,
                        (b[2] + 3 - a[2]) % 3,
                    ])
                })
                .collect()
        })
        .collect();
    let transitive = |s: &[usize]| {
        let mut d: Vec<usize> = s
            .iter()
            .map(|&u| s.iter().filter(|&&v| arc[u][v]).count())
            .collect();
        d.sort_unstable();
        d.iter().enumerate().all(|(i, &x)| i == x)
    };
    let mut found = [0u64; 7];
    let mut s = Vec::new();
    fn subsets(n: usize, m: usize, start: usize, s: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if s.len() == m {
            return f(s);
        }
        for v in start..n {
            s.push(v);
            subsets(n, m, v + 1, s, f);
            s.pop();
        }
    }
    for m in [5, 6] {
        subsets(27, m, 0, &mut s, &mut |c| {
            found[m] += u64::from(transitive(c))
        });
    }
    assert!(found[5] > 0);
    assert_eq!(found[6], 0);
}
