use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::field::{Elem, FieldCtx, FieldError};
use super::primes::prime_powers_up_to;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("k = {0} must be an even integer >= 2")]
    BadK(u32),
    #[error("q = {q} is not admissible for k = {k}: need q ≡ k+1 (mod 2k), i.e. q ≡ {want} (mod {modulus})")]
    Inadmissible {
        q: u32,
        k: u32,
        want: u32,
        modulus: u32,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Classification of a nonzero difference (or determinant) into the
/// k-th power cosets and their negatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    Zero,
    /// Member of the coset of color `i` (1-based).
    Forward(u8),
    /// Member of the negated coset of color `i`.
    Backward(u8),
}

impl EdgeClass {
    /// The class of the negated element.
    pub fn reversed(self) -> Self {
        match self {
            EdgeClass::Zero => EdgeClass::Zero,
            EdgeClass::Forward(i) => EdgeClass::Backward(i),
            EdgeClass::Backward(i) => EdgeClass::Forward(i),
        }
    }

    pub fn color(self) -> Option<u8> {
        match self {
            EdgeClass::Zero => None,
            EdgeClass::Forward(i) | EdgeClass::Backward(i) => Some(i),
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeClass::Zero => write!(f, "zero"),
            EdgeClass::Forward(i) => write!(f, "forward({i})"),
            EdgeClass::Backward(i) => write!(f, "backward({i})"),
        }
    }
}

/// The k-th power residue cosets of GF(q) for an admissible pair (k, q).
///
/// Coset `i` (1-based, `i <= k/2`) is `omega^(i-1) * S_k`, where `S_k` is the
/// subgroup of k-th powers; its negation is `omega^(i-1+k/2) * S_k`.
#[derive(Debug, Clone)]
pub struct ResidueSystem {
    field: Arc<FieldCtx>,
    k: u32,
    /// Per element: 0 for zero, `i` for Forward(i), `half + i` for Backward(i).
    codes: Arc<[u8]>,
}

impl ResidueSystem {
    pub fn new(field: Arc<FieldCtx>, k: u32) -> Result<Self, ResidueError> {
        check_k(k)?;
        let q = field.order();
        if q % (2 * k) != (k + 1) % (2 * k) {
            return Err(ResidueError::Inadmissible {
                q,
                k,
                want: k + 1,
                modulus: 2 * k,
            });
        }
        let half = k / 2;
        let mut codes = vec![0u8; q as usize];
        for x in 1..q {
            // r < half: Forward(r+1); otherwise Backward(r-half+1), coded half + i
            codes[x as usize] = (field.log_unchecked(x) % k + 1) as u8;
        }
        debug_assert_eq!(field.dlog(field.neg(1)).map(|e| e % k), Ok(half));
        Ok(Self {
            field,
            k,
            codes: codes.into(),
        })
    }

    /// Convenience: build the canonical field and the residue system together.
    pub fn for_order(k: u32, q: u64) -> Result<Self, ResidueError> {
        check_k(k)?;
        let field = FieldCtx::new(q)?;
        Self::new(Arc::new(field), k)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of arc colors, `k/2`.
    pub fn half(&self) -> u32 {
        self.k / 2
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    /// Size of each coset, `(q-1)/k`.
    pub fn coset_size(&self) -> u32 {
        (self.q() - 1) / self.k
    }

    #[inline]
    pub fn pair_class(&self, x: Elem) -> EdgeClass {
        let code = u32::from(self.codes[x as usize]);
        let half = self.half();
        match code {
            0 => EdgeClass::Zero,
            c if c <= half => EdgeClass::Forward(c as u8),
            c => EdgeClass::Backward((c - half) as u8),
        }
    }

    /// Color `c` when `x` lies in the forward coset `c`, otherwise `None`.
    #[inline]
    pub fn forward_color(&self, x: Elem) -> Option<u8> {
        let code = self.codes[x as usize];
        (code != 0 && u32::from(code) <= self.half()).then_some(code)
    }

    /// True when `x` is a nonzero k-th power.
    pub fn is_kth_power(&self, x: Elem) -> bool {
        self.codes[x as usize] == 1
    }

    /// Representative `omega^(i-1)` of coset `i`.
    pub fn coset_rep(&self, color: u8) -> Elem {
        self.field.omega_pow(i64::from(color) - 1)
    }
}

fn check_k(k: u32) -> Result<(), ResidueError> {
    if k < 2 || k % 2 != 0 || k > 254 {
        return Err(ResidueError::BadK(k));
    }
    Ok(())
}

/// True when q is a prime power with q ≡ k+1 (mod 2k).
pub fn is_admissible(k: u32, q: u64) -> bool {
    k >= 2
        && k % 2 == 0
        && q >= 3
        && q % (2 * u64::from(k)) == u64::from(k) + 1
        && super::primes::prime_power(q).is_some()
}

/// All admissible prime powers up to `q_max`, ascending.
pub fn admissible_q(k: u32, q_max: u64) -> Result<Vec<u64>, ResidueError> {
    check_k(k)?;
    let m = 2 * u64::from(k);
    let r = u64::from(k) + 1;
    Ok(prime_powers_up_to(q_max)
        .into_iter()
        .filter(|&q| q >= 3 && q % m == r % m)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        let rs = ResidueSystem::for_order(2, 7).unwrap();
        assert_eq!(rs.pair_class(0), EdgeClass::Zero);
        assert_eq!(rs.pair_class(1), EdgeClass::Forward(1));
        assert_eq!(rs.pair_class(6), EdgeClass::Backward(1));

        let rs = ResidueSystem::for_order(4, 13).unwrap();
        assert_eq!(rs.field().omega(), 2);
        assert_eq!(rs.pair_class(2), EdgeClass::Forward(2));
        assert_eq!(rs.pair_class(12), EdgeClass::Backward(1));
    }

    #[test]
    fn admissible_lists() {
        assert_eq!(
            admissible_q(2, 50).unwrap(),
            vec![3, 7, 11, 19, 23, 27, 31, 43, 47]
        );
        assert_eq!(
            admissible_q(4, 130).unwrap(),
            vec![5, 13, 29, 37, 53, 61, 101, 109, 125]
        );
        assert!(admissible_q(8, 170).unwrap().contains(&169));
        assert_eq!(admissible_q(3, 100), Err(ResidueError::BadK(3)));
        assert!(is_admissible(10, 71));
        assert!(!is_admissible(10, 51));
    }

    #[test]
    fn rejects_inadmissible_pairs() {
        let err = ResidueSystem::for_order(4, 7).unwrap_err();
        assert!(err.to_string().contains("q ≡ k+1 (mod 2k)"), "{err}");
        assert!(matches!(
            ResidueSystem::for_order(2, 6),
            Err(ResidueError::Field(_))
        ));
    }

    #[test]
    fn minus_one_is_half_power() {
        for (k, q) in [(2, 27), (4, 125), (6, 43), (8, 169), (10, 71)] {
            let rs = ResidueSystem::for_order(k, q).unwrap();
            let f = rs.field();
            assert_eq!(f.dlog(f.neg(1)).unwrap() % k, k / 2);
        }
    }
}
