//! Exponent vectors, permutations and the residue bookkeeping for the
//! constant term of a residual Eisenstein series along `Q` of type
//! `(r, 2mr)`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::segment::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("only odd lengths t = 2m + 1 are supported, got {0}")]
    UnsupportedComposition(usize),
    #[error("m must be at least 1")]
    ZeroM,
    #[error("vector is not constant on the blocks of the Levi")]
    NotBlockConstant,
}

/// An element of `𝔞*` in the coordinates of `M` of type `(r, …, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector(pub Vec<Q>);

impl ExponentVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> Q {
        self.0.iter().sum()
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn concat(parts: &[ExponentVector]) -> ExponentVector {
        ExponentVector(parts.iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    /// Coordinates in `𝔞*_L` for the composition `blocks`; the vector must
    /// be constant on every block.
    pub fn project(&self, blocks: &[usize]) -> Result<ExponentVector, WeylError> {
        let mut out = Vec::with_capacity(blocks.len());
        let mut at = 0;
        for &len in blocks {
            let part = &self.0[at..at + len];
            if part.iter().any(|x| *x != part[0]) {
                return Err(WeylError::NotBlockConstant);
            }
            out.push(part[0]);
            at += len;
        }
        Ok(ExponentVector(out))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `Λ_t = ((t−1)/2, (t−3)/2, …, (1−t)/2)`.
pub fn lambda_vec(t: usize) -> ExponentVector {
    ExponentVector(
        (0..t)
            .map(|i| Q::new(t as i64 - 1 - 2 * i as i64, 2))
            .collect(),
    )
}

/// A permutation of `[1, t]`, stored as the images `w(1), …, w(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement(Vec<usize>);

impl WeylElement {
    /// Returns `None` unless `images` is a permutation of `1..=t`.
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x == 0 || x > images.len() || std::mem::replace(&mut seen[x - 1], true) {
                return None;
            }
        }
        Some(WeylElement(images))
    }

    pub fn identity(t: usize) -> Self {
        WeylElement((1..=t).collect())
    }

    /// The cycle `1 → 2 → ⋯ → i → 1` in `S_t`.
    pub fn cycle(t: usize, i: usize) -> Self {
        let mut w: Vec<usize> = (1..=t).collect();
        for j in 1..i {
            w[j - 1] = j + 1;
        }
        if i >= 1 {
            w[i - 1] = 1;
        }
        WeylElement(w)
    }

    pub fn reversal(t: usize) -> Self {
        WeylElement((1..=t).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w(i)`, one-based.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &w) in self.0.iter().enumerate() {
            inv[w - 1] = i + 1;
        }
        WeylElement(inv)
    }

    /// `(wλ)_j = λ_{w^{−1}(j)}`.
    pub fn act(&self, v: &ExponentVector) -> ExponentVector {
        let inv = self.inverse();
        ExponentVector((1..=self.len()).map(|j| v.0[inv.apply(j) - 1]).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for WeylElement {
    /// Cycle notation, fixed points omitted; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.len()];
        let mut any = false;
        for start in 1..=self.len() {
            if seen[start - 1] || self.apply(start) == start {
                continue;
            }
            any = true;
            let mut cyc = vec![start];
            seen[start - 1] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x - 1] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            let s: Vec<String> = cyc.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// `Δ(w) = {i ∈ [1, t−1] : w(i) > w(i+1)}`.
pub fn descent_set(w: &WeylElement) -> BTreeSet<usize> {
    (1..w.len()).filter(|&i| w.apply(i) > w.apply(i + 1)).collect()
}

fn odd_half(t: usize) -> Result<usize, WeylError> {
    if t % 2 == 0 {
        return Err(WeylError::UnsupportedComposition(t));
    }
    Ok((t - 1) / 2)
}

/// The minimal-length representatives `w^{(1)}, …, w^{(t)}` with
/// `w^{(i)}(i) = 1`, for `L` of type `(1, 2m)` in block coordinates.
pub fn coset_reps(t: usize) -> Result<Vec<WeylElement>, WeylError> {
    odd_half(t)?;
    Ok((1..=t).map(|i| WeylElement::cycle(t, i)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurvivalRow {
    pub i: usize,
    /// `w^{(i)}` in cycle notation.
    pub element: String,
    /// `{w^{−1}(j) : j ∈ [1,2m], (wΛ)_j − (wΛ)_{j+1} = 1}` over all `j`.
    pub displayed_set: Vec<usize>,
    /// The same with `j` restricted to simple roots inside the Levi `L`,
    /// which is where `E^Q` can have poles.
    pub pole_set: Vec<usize>,
    pub descents: Vec<usize>,
    pub pole_order: usize,
    pub survives: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurvivalReport {
    pub t: usize,
    pub m: usize,
    pub required_order: usize,
    pub rows: Vec<SurvivalRow>,
    /// Indices `i` whose term survives the multi-residue.
    pub survivors: Vec<usize>,
}

/// Pole bookkeeping for each term of the constant term along `Q`.
///
/// A term survives the `2m`-fold residue at `Λ_{2m+1}` iff it has poles
/// along all `2m` hyperplanes: those of the intertwining operator (the
/// descents) together with those of `E^Q` (the pole set).
pub fn residue_survival(t: usize) -> Result<SurvivalReport, WeylError> {
    let m = odd_half(t)?;
    if m == 0 {
        return Err(WeylError::ZeroM);
    }
    let lambda = lambda_vec(t);
    let one = Q::one();
    let rows = coset_reps(t)?
        .into_iter()
        .enumerate()
        .map(|(idx, w)| {
            let wl = w.act(&lambda);
            let inv = w.inverse();
            let hit = |j: &usize| wl.0[j - 1] - wl.0[*j] == one;
            let displayed: BTreeSet<usize> = (1..=2 * m).filter(hit).map(|j| inv.apply(j)).collect();
            // the first block of L has size 1, so its simple roots are 2..=2m
            let poles: BTreeSet<usize> = (2..=2 * m).filter(hit).map(|j| inv.apply(j)).collect();
            let descents = descent_set(&w);
            let pole_order = poles.union(&descents).count();
            SurvivalRow {
                i: idx + 1,
                element: w.to_string(),
                displayed_set: displayed.into_iter().collect(),
                pole_set: poles.into_iter().collect(),
                descents: descents.into_iter().collect(),
                pole_order,
                survives: pole_order == 2 * m,
            }
        })
        .collect::<Vec<_>>();
    let survivors = rows.iter().filter(|r| r.survives).map(|r| r.i).collect();
    Ok(SurvivalReport {
        t,
        m,
        required_order: 2 * m,
        rows,
        survivors,
    })
}

/// `μ_Q = w_Q Λ_{2m+1} − Λ^Q` projected to `𝔞*_L` for `L` of type `(1, 2m)`.
pub fn mu_q(m: usize) -> Result<ExponentVector, WeylError> {
    if m == 0 {
        return Err(WeylError::ZeroM);
    }
    let t = 2 * m + 1;
    let w_q = WeylElement::cycle(t, t);
    let lambda_q = ExponentVector::concat(&[lambda_vec(1), lambda_vec(2 * m)]);
    w_q.act(&lambda_vec(t)).sub(&lambda_q).project(&[1, 2 * m])
}

/// Sum of a vector is zero and reversal negates it.
pub fn is_antisymmetric(v: &ExponentVector) -> bool {
    v.sum().is_zero() && v.0.iter().zip(v.0.iter().rev()).all(|(a, b)| *a == -*b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_vec(1).0, vec![q(0, 1)]);
        assert_eq!(lambda_vec(2).0, vec![q(1, 2), q(-1, 2)]);
        assert_eq!(lambda_vec(3).0, vec![q(1, 1), q(0, 1), q(-1, 1)]);
    }

    #[test]
    fn descents() {
        assert!(descent_set(&WeylElement::identity(4)).is_empty());
        for i in 2..=5 {
            assert_eq!(descent_set(&WeylElement::cycle(5, i)).into_iter().collect::<Vec<_>>(), vec![i - 1]);
        }
        assert_eq!(descent_set(&WeylElement::reversal(4)).len(), 3);
    }

    #[test]
    fn coset_representatives() {
        let reps = coset_reps(3).unwrap();
        let names: Vec<String> = reps.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, vec!["()", "(1 2)", "(1 2 3)"]);
        for (i, w) in reps.iter().enumerate() {
            assert_eq!(w.inverse().apply(1), i + 1);
        }
        assert_eq!(coset_reps(1).unwrap(), vec![WeylElement::identity(1)]);
        assert_eq!(coset_reps(4), Err(WeylError::UnsupportedComposition(4)));
    }

    #[test]
    fn survival_for_t3() {
        let r = residue_survival(3).unwrap();
        assert_eq!(r.rows[1].displayed_set, Vec::<usize>::new());
        assert_eq!(r.rows[1].pole_order, 1);
        assert_eq!(r.rows[2].pole_order, 2);
        assert_eq!(r.survivors, vec![3]);
        // identity: all of [1,2] in the display, only the Levi root 2 is a pole
        assert_eq!(r.rows[0].displayed_set, vec![1, 2]);
        assert_eq!(r.rows[0].pole_set, vec![2]);
    }

    #[test]
    fn mu_q_examples() {
        assert_eq!(mu_q(1).unwrap().0, vec![q(-1, 1), q(1, 2)]);
        assert_eq!(mu_q(2).unwrap().0, vec![q(-2, 1), q(1, 2)]);
        assert_eq!(mu_q(0), Err(WeylError::ZeroM));
    }

    #[test]
    fn permutation_validation() {
        assert!(WeylElement::new(vec![2, 1, 3]).is_some());
        assert!(WeylElement::new(vec![1, 1, 3]).is_none());
        assert!(WeylElement::new(vec![0, 1]).is_none());
    }
}
