//! Square matrices over a small finite field.

use serde::{Deserialize, Serialize};

use crate::field::{Elem, FiniteField};

/// An `n × n` matrix of field-element codes, row-major.
///
/// Field arithmetic is supplied by the caller; a matrix does not carry its
/// field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixGF {
    n: usize,
    entries: Vec<Elem>,
}

impl MatrixGF {
    pub fn new(n: usize, entries: Vec<Elem>) -> Self {
        assert_eq!(entries.len(), n * n, "matrix needs n^2 entries");
        MatrixGF { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        MatrixGF::new(n, vec![0; n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixGF::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let n = rows.len();
        MatrixGF::new(n, rows.iter().flatten().copied().collect())
    }

    /// Decodes a row-major base-`q` code (first entry most significant).
    pub fn from_code(n: usize, q: u32, mut code: u64) -> Self {
        let mut entries = vec![0; n * n];
        for slot in entries.iter_mut().rev() {
            *slot = (code % q as u64) as Elem;
            code /= q as u64;
        }
        MatrixGF { n, entries }
    }

    /// Row-major base-`q` code. Ordering of codes agrees with the
    /// lexicographic order of the entry sequences.
    pub fn code(&self, q: u32) -> u64 {
        self.entries
            .iter()
            .fold(0u64, |acc, &e| acc * q as u64 + e as u64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == (i == j) as Elem))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = MatrixGF::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixGF, f: &FiniteField) -> MatrixGF {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out[idx] = f.add(out[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        MatrixGF { n, entries: out }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, f: &FiniteField) -> Elem {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = 1;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).unwrap();
            for r in col + 1..n {
                let factor = f.mul(a[r * n + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[col * n + j]));
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination; `None` when singular.
    pub fn inverse(&self, f: &FiniteField) -> Option<MatrixGF> {
        let n = self.n;
        let w = 2 * n;
        let mut a = vec![0; n * w];
        for i in 0..n {
            for j in 0..n {
                a[i * w + j] = self.get(i, j);
            }
            a[i * w + n + i] = 1;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r * w + col] != 0)?;
            if piv != col {
                for j in 0..w {
                    a.swap(piv * w + j, col * w + j);
                }
            }
            let pinv = f.inv(a[col * w + col]).unwrap();
            for j in 0..w {
                a[col * w + j] = f.mul(a[col * w + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * w + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..w {
                    a[r * w + j] = f.sub(a[r * w + j], f.mul(factor, a[col * w + j]));
                }
            }
        }
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * w + n + j])
            .collect();
        Some(MatrixGF { n, entries })
    }

    /// The square block of the given size with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> MatrixGF {
        let entries = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .map(|(i, j)| self.get(r0 + i, c0 + j))
            .collect();
        MatrixGF { n: size, entries }
    }
}

impl std::fmt::Display for MatrixGF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
