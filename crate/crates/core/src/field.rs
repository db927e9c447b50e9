//! Small finite fields `F_q`, `q = p^e`, with table-driven arithmetic.
//!
//! Elements are encoded as integers in `[0, q)`: the code `c = Σ c_i p^i`
//! stands for the residue class of `Σ c_i t^i` modulo the defining polynomial.
//! Codes `0..p` are exactly the prime subfield.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on the field order.
pub const DEFAULT_MAX_ORDER: u32 = 16;

/// Hard limit: operation tables are `q × q`.
pub const ABSOLUTE_MAX_ORDER: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NonPrimeP(u32),
    #[error("field of order {order} exceeds the configured bound {bound}")]
    FieldTooLarge { order: u64, bound: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("no irreducible polynomial of degree {0} found (internal error)")]
    NoIrreduciblePolynomial(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
}

pub type Elem = u16;

/// A finite field with precomputed operation tables.
#[derive(Clone, Serialize, Deserialize)]
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    /// Monic defining polynomial over `F_p`, low degree first (length `e + 1`).
    modulus: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    trace: Vec<u32>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime.
pub fn prime_power(q: u32) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p, e))
}

// Polynomials over F_p as coefficient vectors, low degree first, no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = top * lead_inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_from_code(mut code: u64, p: u32) -> Vec<u32> {
    let mut v = Vec::new();
    while code > 0 {
        v.push((code % p as u64) as u32);
        code /= p as u64;
    }
    v
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    r as u32
}

/// Irreducibility by exhaustive division by every monic polynomial of degree
/// `1..=deg/2`. Codes in `[p^d, 2p^d)` are exactly the monic ones of degree `d`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let lo = (p as u64).pow(d as u32);
        for code in lo..2 * lo {
            let g = poly_from_code(code, p);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The least monic irreducible polynomial of degree `e` over `F_p`, ordered
/// by the integer code `Σ c_i p^i`.
pub fn least_irreducible(p: u32, e: u32) -> Option<Vec<u32>> {
    let lo = (p as u64).pow(e);
    (lo..2 * lo)
        .map(|code| poly_from_code(code, p))
        .find(|f| is_irreducible(f, p))
}

impl FiniteField {
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, e, DEFAULT_MAX_ORDER)
    }

    pub fn with_bound(p: u32, e: u32, bound: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrimeP(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        let bound = bound.min(ABSOLUTE_MAX_ORDER);
        if order > bound as u64 {
            return Err(FieldError::FieldTooLarge { order, bound });
        }
        let q = order as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, e).ok_or(FieldError::NoIrreduciblePolynomial(e))?
        };

        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let mut neg = vec![0; qs];
        let digits: Vec<Vec<u32>> = (0..q)
            .map(|c| {
                let mut v = poly_from_code(c as u64, p);
                v.resize(e as usize, 0);
                v
            })
            .collect();
        let encode = |v: &[u32]| -> Elem {
            v.iter().rev().fold(0u32, |acc, &d| acc * p + d) as Elem
        };
        for a in 0..qs {
            neg[a] = encode(&digits[a].iter().map(|&d| (p - d) % p).collect::<Vec<_>>());
            for b in 0..qs {
                let s: Vec<u32> = digits[a]
                    .iter()
                    .zip(&digits[b])
                    .map(|(&x, &y)| (x + y) % p)
                    .collect();
                add[a * qs + b] = encode(&s);
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, &x) in digits[a].iter().enumerate() {
                    for (j, &y) in digits[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = if e == 1 {
                    poly_trim(vec![prod[0]])
                } else {
                    poly_rem(&poly_trim(prod), &modulus, p)
                };
                r.resize(e as usize, 0);
                mul[a * qs + b] = encode(&r);
            }
        }
        let mut field = FiniteField {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv: Vec::new(),
            trace: Vec::new(),
        };
        // a^{q-2} = a^{-1}; a failed check means the modulus was reducible
        field.inv = (0..q as Elem)
            .map(|a| if a == 0 { 0 } else { field.pow(a, q as u64 - 2) })
            .collect();
        if (1..q as Elem).any(|a| field.mul(a, field.inv[a as usize]) != 1) {
            return Err(FieldError::NoIrreduciblePolynomial(e));
        }
        // Tr(a) = a + a^p + ... + a^{p^{e-1}}, which lands in the prime subfield.
        field.trace = (0..q as Elem)
            .map(|a| {
                let mut acc = 0;
                let mut frob = a;
                for _ in 0..e {
                    acc = field.add(acc, frob);
                    frob = field.pow(frob, p as u64);
                }
                debug_assert!((acc as u32) < p);
                acc as u32
            })
            .collect();
        Ok(field)
    }

    /// Builds the field of order `q` (a prime power).
    pub fn of_order(q: u32, bound: u32) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q)?;
        Self::with_bound(p, e, bound)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: Elem, mut exp: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Absolute trace `F_q → F_p`, as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Elem) -> u32 {
        self.trace[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q as Elem
    }
}
