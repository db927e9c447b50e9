//! Prime-field arithmetic hosting exact character values.
//!
//! A character of `G` takes values in `ℤ[ζ_m]` with `m` dividing the exponent
//! of `G`. Reducing modulo a prime `ℓ ≡ 1 (mod m)` maps these values into
//! `F_ℓ`, and every inner product is an integer bounded by `|G|`, so with
//! `ℓ > 2|G|` the residues lift back uniquely.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("modulus {ell} is not a prime congruent to 1 mod {m} and larger than {bound}")]
    ArenaTooSmall { ell: u64, m: u64, bound: u64 },
    #[error("no suitable prime below 2^32")]
    NoPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularArena {
    ell: u64,
    m: u64,
    p: u32,
    zeta_m: u64,
    zeta_p: u64,
}

impl ModularArena {
    /// Least prime `ℓ ≡ 1 (mod lcm(exponent, p))` with `ℓ > 2·group_order`,
    /// or the given override after validation.
    pub fn new(
        exponent: u64,
        p: u32,
        group_order: u64,
        ell_override: Option<u64>,
    ) -> Result<Self, ArenaError> {
        let m = exponent.lcm(&(p as u64));
        let bound = 2 * group_order;
        let ell = match ell_override {
            Some(ell) => {
                if ell <= bound || ell % m != 1 || !is_prime(ell) || ell >= 1 << 32 {
                    return Err(ArenaError::ArenaTooSmall { ell, m, bound });
                }
                ell
            }
            None => {
                let mut c = (bound / m) * m + 1;
                if c <= bound {
                    c += m;
                }
                while !is_prime(c) {
                    c += m;
                    if c >= 1 << 32 {
                        return Err(ArenaError::NoPrime);
                    }
                }
                c
            }
        };
        let g = primitive_root(ell);
        let zeta_m = pow_mod(g, (ell - 1) / m, ell);
        let zeta_p = pow_mod(zeta_m, m / p as u64, ell);
        Ok(ModularArena {
            ell,
            m,
            p,
            zeta_m,
            zeta_p,
        })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Order of the fixed root of unity `ζ_m`.
    pub fn root_order(&self) -> u64 {
        self.m
    }

    pub fn zeta_m(&self) -> u64 {
        self.zeta_m
    }

    pub fn zeta_p(&self) -> u64 {
        self.zeta_p
    }

    /// `ζ_p^e`.
    pub fn zeta_p_pow(&self, e: u64) -> u64 {
        self.pow(self.zeta_p, e % self.p as u64)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.ell
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.ell - b) % self.ell
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.ell
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.ell - a) % self.ell
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.ell)
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.ell != 0);
        pow_mod(a, self.ell - 2, self.ell)
    }

    pub fn from_u64(&self, v: u64) -> u64 {
        v % self.ell
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.ell as i64) as u64
    }

    /// Representative in `(−ℓ/2, ℓ/2]`.
    pub fn lift_signed(&self, a: u64) -> i64 {
        if a <= self.ell / 2 {
            a as i64
        } else {
            a as i64 - self.ell as i64
        }
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least generator of `F_ℓ^×`.
pub fn primitive_root(ell: u64) -> u64 {
    let factors = prime_factors(ell - 1);
    (2..ell)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (ell - 1) / f, ell) != 1))
        .unwrap_or(1)
}

/// Dense linear algebra over `F_ℓ`.
pub mod linalg {
    use super::ModularArena;

    pub type Mat = Vec<Vec<u64>>;

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(a: &ModularArena, m: &mut Mat) -> Vec<usize> {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, p);
            let inv = a.inv(m[r][c]);
            for x in m[r].iter_mut() {
                *x = a.mul(*x, inv);
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in c..cols {
                        let sub = a.mul(f, m[r][j]);
                        m[i][j] = a.sub(m[i][j], sub);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of `{v : M v = 0}`.
    pub fn nullspace(a: &ModularArena, m: &Mat) -> Vec<Vec<u64>> {
        let cols = m.first().map_or(0, |r| r.len());
        let mut e = m.clone();
        let pivots = rref(a, &mut e);
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = a.neg(e[row][fc]);
                }
                v
            })
            .collect()
    }

    pub fn mat_vec(a: &ModularArena, m: &Mat, v: &[u64]) -> Vec<u64> {
        m.iter()
            .map(|row| row.iter().zip(v).fold(0, |acc, (&x, &y)| a.add(acc, a.mul(x, y))))
            .collect()
    }

    /// Characteristic polynomial `det(xI − M)`, low degree first, via
    /// reduction to upper Hessenberg form.
    pub fn charpoly(a: &ModularArena, m: &Mat) -> Vec<u64> {
        let n = m.len();
        let mut h = m.clone();
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| h[i][c] != 0) else {
                continue;
            };
            if p != c + 1 {
                h.swap(p, c + 1);
                for row in h.iter_mut() {
                    row.swap(p, c + 1);
                }
            }
            let inv = a.inv(h[c + 1][c]);
            for i in c + 2..n {
                let f = a.mul(h[i][c], inv);
                if f == 0 {
                    continue;
                }
                // row_i -= f row_{c+1}; col_{c+1} += f col_i
                for j in 0..n {
                    let sub = a.mul(f, h[c + 1][j]);
                    h[i][j] = a.sub(h[i][j], sub);
                }
                for row in h.iter_mut() {
                    let add = a.mul(f, row[i]);
                    row[c + 1] = a.add(row[c + 1], add);
                }
            }
        }
        // p_k = det(xI − H_k) for the leading k×k block
        let mut polys: Vec<Vec<u64>> = vec![vec![1]];
        for k in 1..=n {
            let mut next = vec![0; k + 1];
            // (x − h_{kk}) p_{k−1}
            let prev = &polys[k - 1];
            for (i, &c) in prev.iter().enumerate() {
                next[i + 1] = a.add(next[i + 1], c);
                next[i] = a.sub(next[i], a.mul(h[k - 1][k - 1], c));
            }
            let mut sub_prod = 1;
            for i in (1..k).rev() {
                sub_prod = a.mul(sub_prod, h[i][i - 1]);
                let coef = a.mul(h[i - 1][k - 1], sub_prod);
                if coef == 0 {
                    continue;
                }
                for (j, &c) in polys[i - 1].iter().enumerate() {
                    next[j] = a.sub(next[j], a.mul(coef, c));
                }
            }
            polys.push(next);
        }
        polys.pop().unwrap()
    }

    pub fn eval_poly(a: &ModularArena, p: &[u64], x: u64) -> u64 {
        p.iter().rev().fold(0, |acc, &c| a.add(a.mul(acc, x), c))
    }

    /// Distinct roots in `F_ℓ` by exhaustive scan.
    pub fn roots(a: &ModularArena, p: &[u64]) -> Vec<u64> {
        let deg = p.len() - 1;
        let mut out = Vec::new();
        for x in 0..a.ell() {
            if eval_poly(a, p, x) == 0 {
                out.push(x);
                if out.len() == deg {
                    break;
                }
            }
        }
        out
    }
}
