//! Polynomials over `F_q` and invariant factors of `xI − g`.

use serde::{Deserialize, Serialize};

use crate::field::{Elem, FiniteField};
use crate::matrix::MatrixGF;

/// Polynomial over `F_q`, coefficients low degree first, no trailing zeros.
/// The zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly(pub Vec<Elem>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Elem) -> Self {
        Poly(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }

    pub fn add(&self, other: &Poly, f: &FiniteField) -> Poly {
        let len = self.0.len().max(other.0.len());
        let c = (0..len)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = other.0.get(i).copied().unwrap_or(0);
                f.add(a, b)
            })
            .collect();
        Poly(c).trimmed()
    }

    pub fn sub(&self, other: &Poly, f: &FiniteField) -> Poly {
        self.add(&other.scale(f.neg(1), f), f)
    }

    pub fn scale(&self, c: Elem, f: &FiniteField) -> Poly {
        Poly(self.0.iter().map(|&a| f.mul(a, c)).collect()).trimmed()
    }

    pub fn mul(&self, other: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly(c).trimmed()
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly, f: &FiniteField) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(d.0[dd]).unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0; r.len() - dd];
        while r.len() > dd {
            let top = *r.last().unwrap();
            let shift = r.len() - 1 - dd;
            if top != 0 {
                let c = f.mul(top, lead_inv);
                quot[shift] = c;
                for (i, &di) in d.0.iter().enumerate() {
                    r[shift + i] = f.sub(r[shift + i], f.mul(c, di));
                }
            }
            r.pop();
        }
        (Poly(quot).trimmed(), Poly(r).trimmed())
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        match self.0.last() {
            None => Poly::zero(),
            Some(&lead) => self.scale(f.inv(lead).unwrap(), f),
        }
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Nontrivial invariant factors of `xI − g`, monic, in divisibility order
/// `d_1 | d_2 | … `. Unit factors are dropped.
pub fn invariant_factors(g: &MatrixGF, f: &FiniteField) -> Vec<Poly> {
    let n = g.n();
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = f.neg(g.get(i, j));
                    if i == j {
                        Poly(vec![c, 1]).trimmed()
                    } else {
                        Poly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    smith_diagonal(&mut m, f)
        .into_iter()
        .filter(|d| !d.is_one())
        .collect()
}

/// Reduces a square matrix over `F_q[x]` to Smith normal form in place and
/// returns the monic diagonal.
fn smith_diagonal(m: &mut [Vec<Poly>], f: &FiniteField) -> Vec<Poly> {
    let n = m.len();
    for t in 0..n {
        loop {
            // pivot: nonzero entry of least degree in the trailing block
            let pivot = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].degree().unwrap());
            let Some((pi, pj)) = pivot else {
                break;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let (qt, r) = m[i][t].div_rem(&m[t][t], f);
                for j in t..n {
                    let sub = qt.mul(&m[t][j], f);
                    m[i][j] = m[i][j].sub(&sub, f);
                }
                debug_assert_eq!(m[i][t], r);
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let (qt, r) = m[t][j].div_rem(&m[t][t], f);
                for row in m[t..].iter_mut() {
                    let sub = qt.mul(&row[t], f);
                    row[j] = row[j].sub(&sub, f);
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !m[i][j].div_rem(&m[t][t], f).1.is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        let v = m[i][j].clone();
                        m[t][j] = m[t][j].add(&v, f);
                    }
                }
                None => break,
            }
        }
    }
    (0..n).map(|i| m[i][i].monic(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FiniteField {
        FiniteField::new(p, 1).unwrap()
    }

    #[test]
    fn division_identity() {
        let f5 = f(5);
        let a = Poly(vec![1, 2, 3, 4]);
        let d = Poly(vec![2, 0, 1]);
        let (qt, r) = a.div_rem(&d, &f5);
        assert_eq!(qt.mul(&d, &f5).add(&r, &f5), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn identity_matrix_factors() {
        let f3 = f(3);
        let id = MatrixGF::identity(3);
        // x - 1 three times
        let want = vec![Poly(vec![2, 1]); 3];
        assert_eq!(invariant_factors(&id, &f3), want);
    }

    #[test]
    fn companion_matrix_has_single_factor() {
        let f2 = f(2);
        // companion of x^2 + x + 1
        let g = MatrixGF::from_rows(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(invariant_factors(&g, &f2), vec![Poly(vec![1, 1, 1])]);
    }

    #[test]
    fn jordan_block_vs_scalar() {
        let f3 = f(3);
        let jordan = MatrixGF::from_rows(&[vec![1, 1], vec![0, 1]]);
        // (x - 1)^2 = x^2 + x + 1 over F3
        assert_eq!(invariant_factors(&jordan, &f3), vec![Poly(vec![1, 1, 1])]);
        let scalar = MatrixGF::from_rows(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(invariant_factors(&scalar, &f3), vec![Poly(vec![1, 1]); 2]);
    }

    #[test]
    fn display() {
        assert_eq!(Poly(vec![1, 0, 2]).to_string(), "2x^2 + 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
