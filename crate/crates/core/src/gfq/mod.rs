//! Finite fields GF(p^n) and their k-th power residue cosets.

mod field;
pub mod primes;
mod residue;

pub use field::{Elem, FieldCtx, FieldError, MAX_ORDER};
pub use residue::{admissible_q, is_admissible, EdgeClass, ResidueError, ResidueSystem};

#[cfg(test)]
mod props {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;

    fn small_pairs() -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for k in [2u32, 4, 6, 8, 10] {
            for q in admissible_q(k, 400).unwrap() {
                out.push((k, q));
            }
        }
        out
    }

    fn pair_and_elems() -> impl Strategy<Value = ((u32, u64), u32, u32)> {
        prop::sample::select(small_pairs()).prop_flat_map(|(k, q)| {
            let q32 = q as u32;
            (Just((k, q)), 1..q32, 1..q32)
        })
    }

    proptest! {
        #[test]
        fn dlog_is_a_homomorphism(((k, q), x, y) in pair_and_elems()) {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            let f = rs.field();
            let lhs = f.dlog(f.mul(x, y)).unwrap();
            let rhs = (f.dlog(x).unwrap() + f.dlog(y).unwrap()) % (f.order() - 1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn negation_swaps_direction(((k, q), x, _y) in pair_and_elems()) {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            let neg = rs.field().neg(x);
            prop_assert_eq!(rs.pair_class(neg), rs.pair_class(x).reversed());
            prop_assert!(rs.pair_class(x) != EdgeClass::Zero);
        }
    }

    #[test]
    fn cosets_partition_nonzero_elements() {
        for (k, q) in small_pairs() {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            let mut forward = vec![0u32; rs.half() as usize + 1];
            let mut backward = vec![0u32; rs.half() as usize + 1];
            for x in 1..rs.q() {
                match rs.pair_class(x) {
                    EdgeClass::Forward(i) => forward[i as usize] += 1,
                    EdgeClass::Backward(i) => backward[i as usize] += 1,
                    EdgeClass::Zero => panic!("nonzero {x} classified as zero"),
                }
            }
            for i in 1..=rs.half() as usize {
                assert_eq!(forward[i], rs.coset_size(), "k={k} q={q} i={i}");
                assert_eq!(backward[i], rs.coset_size(), "k={k} q={q} i={i}");
            }
        }
    }

    #[test]
    fn kth_powers_do_not_depend_on_generator() {
        for (k, q) in small_pairs() {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            // GF(3) has a single primitive element
            let Some(second) = rs.field().primitive_elements().nth(1) else {
                continue;
            };
            let alt = ResidueSystem::new(Arc::new(FieldCtx::with_generator(q, second).unwrap()), k)
                .unwrap();
            for x in 1..rs.q() {
                assert_eq!(rs.is_kth_power(x), alt.is_kth_power(x), "k={k} q={q} x={x}");
                // independent oracle: x is a k-th power iff x^((q-1)/k) = 1
                let mut acc = 1;
                for _ in 0..rs.coset_size() {
                    acc = rs.field().mul(acc, x);
                }
                assert_eq!(rs.is_kth_power(x), acc == 1);
            }
        }
    }
}
