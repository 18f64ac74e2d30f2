use rayon::prelude::*;

/// Dense directed relation: row `u` holds the out-neighbors of `u` as bits.
#[derive(Debug, Clone)]
pub struct BitRelation {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitRelation {
    pub fn from_fn(n: usize, arc: impl Fn(usize, usize) -> bool + Sync) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        rows.par_chunks_mut(words).enumerate().for_each(|(u, row)| {
            for v in 0..n {
                if u != v && arc(u, v) {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
        });
        Self { n, words, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    /// Bitset with every vertex set.
    pub fn full_set(&self) -> Vec<u64> {
        let mut set = vec![0u64; self.words];
        for v in 0..self.n {
            set[v / 64] |= 1 << (v % 64);
        }
        set
    }
}

#[inline]
pub fn popcount(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn intersect_into(dst: &mut [u64], a: &[u64], b: &[u64]) -> usize {
    let mut count = 0;
    for ((d, &x), &y) in dst.iter_mut().zip(a).zip(b) {
        *d = x & y;
        count += d.count_ones() as usize;
    }
    count
}

/// Set bits in ascending order.
pub fn members(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + b)
        })
    })
}
