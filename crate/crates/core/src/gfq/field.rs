use serde::Serialize;
use thiserror::Error;

use super::primes::{factorize, format_factorization, prime_power};

/// A field element, encoded by packing polynomial coefficients in base `p`
/// (coefficient of `x^j` is digit `j`). `0` and `1` are the identities.
pub type Elem = u32;

/// Largest supported field order (exclusive).
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("q = {q} is not a prime power (q = {factorization})")]
    NotPrimePower { q: u64, factorization: String },
    #[error("q = {0} is too small: field order must be at least 3")]
    TooSmall(u64),
    #[error("q = {0} is out of range: field order must be below 2^20")]
    TooLarge(u64),
    #[error("discrete logarithm of 0 is undefined")]
    LogOfZero,
    #[error("element {x} is out of range for GF({q})")]
    OutOfRange { x: u64, q: u64 },
    #[error("element {g} is not a primitive element of GF({q})")]
    NotPrimitive { g: u64, q: u64 },
}

/// The finite field GF(p^n) with a canonical primitive element and
/// exp/log tables over it.
#[derive(Debug, Clone, Serialize)]
pub struct FieldCtx {
    q: u32,
    p: u32,
    n: u32,
    /// Low coefficients `c_0..c_{n-1}` of the monic modulus; empty for prime fields.
    modulus: Vec<u32>,
    omega: Elem,
    #[serde(skip)]
    exp: Vec<Elem>,
    #[serde(skip)]
    log: Vec<u32>,
}

impl FieldCtx {
    /// Builds GF(q) with the lexicographically smallest monic irreducible
    /// modulus and the smallest primitive element.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, n) = split_order(q)?;
        let modulus = if n == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, n)
        };
        let arith = PolyArith {
            p,
            n,
            modulus: &modulus,
        };
        let q32 = q as u32;
        let omega = (1..q32)
            .find(|&g| arith.is_primitive(g, q32))
            .expect("every finite field has a primitive element");
        Ok(Self::with_tables(q32, p, n, modulus, omega))
    }

    /// Builds GF(q) with the canonical modulus but a caller-chosen primitive element.
    pub fn with_generator(q: u64, generator: Elem) -> Result<Self, FieldError> {
        let (p, n) = split_order(q)?;
        if u64::from(generator) >= q {
            return Err(FieldError::OutOfRange {
                x: generator.into(),
                q,
            });
        }
        let modulus = if n == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, n)
        };
        let arith = PolyArith {
            p,
            n,
            modulus: &modulus,
        };
        if !arith.is_primitive(generator, q as u32) {
            return Err(FieldError::NotPrimitive {
                g: generator.into(),
                q,
            });
        }
        Ok(Self::with_tables(q as u32, p, n, modulus, generator))
    }

    fn with_tables(q: u32, p: u32, n: u32, modulus: Vec<u32>, omega: Elem) -> Self {
        let arith = PolyArith {
            p,
            n,
            modulus: &modulus,
        };
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        let mut x: Elem = 1;
        for e in 0..q - 1 {
            exp.push(x);
            log[x as usize] = e;
            x = arith.mul(x, omega);
        }
        debug_assert_eq!(x, 1);
        Self {
            q,
            p,
            n,
            modulus,
            omega,
            exp,
            log,
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Low coefficients of the monic modulus (`c_0` first); empty when n = 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn omega(&self) -> Elem {
        self.omega
    }

    /// Human-readable modulus, highest degree first, e.g. `x^2 + 1`.
    pub fn modulus_string(&self) -> String {
        if self.n == 1 {
            return String::from("x");
        }
        let mut terms = vec![format!("x^{}", self.n)];
        for j in (0..self.n as usize).rev() {
            let c = self.modulus[j];
            if c == 0 {
                continue;
            }
            terms.push(match (j, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (j, 1) => format!("x^{j}"),
                (j, c) => format!("{c}x^{j}"),
            });
        }
        terms.join(" + ")
    }

    /// Polynomial form of an element, e.g. `x + 1`.
    pub fn element_string(&self, x: Elem) -> String {
        if self.n == 1 {
            return x.to_string();
        }
        let digits = self.digits(x);
        let terms: Vec<String> = (0..self.n as usize)
            .rev()
            .filter(|&j| digits[j] != 0)
            .map(|j| match (j, digits[j]) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (1, c) => format!("{c}x"),
                (j, 1) => format!("x^{j}"),
                (j, c) => format!("{c}x^{j}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    fn digits(&self, mut x: Elem) -> Vec<u32> {
        (0..self.n)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn contains(&self, x: u64) -> bool {
        x < u64::from(self.q)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        while a != 0 || b != 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.n == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        while a != 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(e % u64::from(self.q - 1)) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let e = self.log[a as usize];
        Some(self.exp[((self.q - 1 - e) % (self.q - 1)) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `omega^e` for any integer exponent (reduced mod q - 1).
    #[inline]
    pub fn omega_pow(&self, e: i64) -> Elem {
        self.exp[e.rem_euclid(i64::from(self.q - 1)) as usize]
    }

    pub fn dlog(&self, x: Elem) -> Result<u32, FieldError> {
        match x {
            0 => Err(FieldError::LogOfZero),
            x if x >= self.q => Err(FieldError::OutOfRange {
                x: x.into(),
                q: self.q.into(),
            }),
            x => Ok(self.log[x as usize]),
        }
    }

    /// Unchecked discrete log; callers guarantee `0 < x < q`.
    #[inline]
    pub(crate) fn log_unchecked(&self, x: Elem) -> u32 {
        self.log[x as usize]
    }

    /// True when `x` generates the multiplicative group.
    pub fn is_primitive(&self, x: Elem) -> bool {
        x != 0 && x < self.q && gcd(self.log[x as usize], self.q - 1) == 1
    }

    /// Primitive elements in ascending encoding order.
    pub fn primitive_elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (1..self.q).filter(move |&x| self.is_primitive(x))
    }

    pub fn exp_table(&self) -> &[Elem] {
        &self.exp
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn split_order(q: u64) -> Result<(u32, u32), FieldError> {
    if q < 3 {
        return Err(FieldError::TooSmall(q));
    }
    if q >= MAX_ORDER {
        return Err(FieldError::TooLarge(q));
    }
    match prime_power(q) {
        Some((p, n)) => Ok((p as u32, n)),
        None => Err(FieldError::NotPrimePower {
            q,
            factorization: format_factorization(&factorize(q)),
        }),
    }
}

/// Slow schoolbook arithmetic used only while building the tables.
struct PolyArith<'a> {
    p: u32,
    n: u32,
    modulus: &'a [u32],
}

impl PolyArith<'_> {
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let p = u64::from(self.p);
        if self.n == 1 {
            return ((u64::from(a) * u64::from(b)) % p) as Elem;
        }
        let n = self.n as usize;
        let da = to_digits(a, self.p, n);
        let db = to_digits(b, self.p, n);
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        // x^n = -sum c_j x^j
        for top in (n..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (j, &mj) in self.modulus.iter().enumerate() {
                let idx = top - n + j;
                prod[idx] = (prod[idx] + (p - c) * u64::from(mj)) % p;
            }
        }
        from_digits(&prod[..n], self.p)
    }

    fn pow(&self, mut base: Elem, mut e: u64) -> Elem {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn is_primitive(&self, g: Elem, q: u32) -> bool {
        if g == 0 {
            return false;
        }
        let order = u64::from(q - 1);
        factorize(order)
            .iter()
            .all(|&(r, _)| self.pow(g, order / r) != 1)
    }
}

fn to_digits(mut x: Elem, p: u32, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn from_digits(d: &[u64], p: u32) -> Elem {
    d.iter().rev().fold(0, |acc, &c| acc * p + c as u32)
}

/// Smallest `r` (as a coefficient tuple from degree n-1 down to 0) such that
/// `x^n + r(x)` is irreducible over GF(p).
fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    (0..count)
        .map(|r| to_digits(r as u32, p, n as usize))
        .find(|low| {
            let mut f = low.clone();
            f.push(1);
            is_irreducible(&f, p)
        })
        .expect("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
/// Coefficients are stored lowest degree first.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for low in 0..(p as u64).pow(d as u32) {
            let mut g = to_digits(low as u32, p, d);
            g.push(1);
            if poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let p = u64::from(p);
    let mut r: Vec<u64> = f.iter().map(|&c| u64::from(c)).collect();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        // g is monic
        for (j, &gj) in g.iter().enumerate() {
            let idx = top - dg + j;
            r[idx] = (r[idx] + (p - c) * u64::from(gj) % p) % p;
        }
    }
    r[..dg].iter().all(|&c| c == 0)
}
