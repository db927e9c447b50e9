//! The mixed subgroups `H_{r,2k}` (and the mirrored `H'_{2k,r}`) and the
//! character `ψ_r` on them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Elem, FiniteField};
use crate::gl::GroupTable;
use crate::matrix::MatrixGF;
use crate::parallel::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("matrix of size {got} where {expected} was required")]
    SizeMismatch { expected: usize, got: usize },
    #[error("matrix is not in the subgroup")]
    NotInSubgroup,
    #[error("psi choice {0} is not in [1, p)")]
    BadPsiChoice(u32),
}

/// Block placement of the unipotent and symplectic parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Orientation {
    /// `H_{r,2k}`: `(u X; 0 h)` with `u ∈ U_r` upper-left.
    #[default]
    Standard,
    /// `H'_{2k,r}`: `(h X; 0 u)` with `h ∈ Sp(2k)` upper-left.
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KlyachkoSubgroupSpec {
    pub r: usize,
    pub k: usize,
    pub orientation: Orientation,
    /// `ψ(x) = ζ_p^{psi_choice · Tr(x)}` for the arena's base `ζ_p`.
    pub psi_choice: u32,
}

impl KlyachkoSubgroupSpec {
    pub fn new(r: usize, k: usize) -> Self {
        KlyachkoSubgroupSpec {
            r,
            k,
            orientation: Orientation::Standard,
            psi_choice: 1,
        }
    }

    /// The spec with `r = n − 2k`.
    pub fn for_n(n: usize, k: usize) -> Self {
        assert!(2 * k <= n, "2k must not exceed n");
        Self::new(n - 2 * k, k)
    }

    pub fn mirrored(mut self) -> Self {
        self.orientation = Orientation::Mirrored;
        self
    }

    pub fn with_psi(mut self, choice: u32) -> Self {
        self.psi_choice = choice;
        self
    }

    pub fn n(&self) -> usize {
        self.r + 2 * self.k
    }

    fn unipotent_offset(&self) -> usize {
        match self.orientation {
            Orientation::Standard => 0,
            Orientation::Mirrored => 2 * self.k,
        }
    }

    fn symplectic_offset(&self) -> usize {
        match self.orientation {
            Orientation::Standard => self.r,
            Orientation::Mirrored => 0,
        }
    }
}

/// The form `J = (0 w_k; −w_k 0)` with `w_k` the antidiagonal permutation.
pub fn symplectic_form(k: usize, f: &FiniteField) -> MatrixGF {
    let mut j = MatrixGF::zero(2 * k);
    let minus_one = f.neg(1);
    for i in 0..k {
        // w_k has (i, k-1-i) entries equal to one
        j.set(i, k + (k - 1 - i), 1);
        j.set(k + i, k - 1 - i, minus_one);
    }
    j
}

/// `ᵗg J g = J` for `g` of size `2k`.
pub fn sp_membership(g: &MatrixGF, k: usize, f: &FiniteField) -> Result<bool, SubgroupError> {
    if g.n() != 2 * k {
        return Err(SubgroupError::SizeMismatch {
            expected: 2 * k,
            got: g.n(),
        });
    }
    if k == 0 {
        return Ok(true);
    }
    let j = symplectic_form(k, f);
    Ok(g.transpose().mul(&j, f).mul(g, f) == j)
}

fn is_upper_unipotent(g: &MatrixGF, offset: usize, r: usize) -> bool {
    (0..r).all(|i| {
        g.get(offset + i, offset + i) == 1 && (0..i).all(|j| g.get(offset + i, offset + j) == 0)
    })
}

/// Membership in `H_{r,2k}` (or `H'_{2k,r}` per the spec's orientation).
pub fn h_membership(
    g: &MatrixGF,
    spec: &KlyachkoSubgroupSpec,
    f: &FiniteField,
) -> Result<bool, SubgroupError> {
    let n = spec.n();
    if g.n() != n {
        return Err(SubgroupError::SizeMismatch {
            expected: n,
            got: g.n(),
        });
    }
    let (top, bottom) = match spec.orientation {
        Orientation::Standard => (spec.r, 2 * spec.k),
        Orientation::Mirrored => (2 * spec.k, spec.r),
    };
    // lower-left block vanishes
    for i in top..top + bottom {
        for j in 0..top {
            if g.get(i, j) != 0 {
                return Ok(false);
            }
        }
    }
    if !is_upper_unipotent(g, spec.unipotent_offset(), spec.r) {
        return Ok(false);
    }
    let s = spec.symplectic_offset();
    sp_membership(&g.block(s, s, 2 * spec.k), spec.k, f)
}

/// `Tr(u_{12} + ⋯ + u_{r−1,r})` as an exponent in `ℤ/p` of the chosen
/// primitive `p`-th root of unity.
pub fn psi_r_value(
    g: &MatrixGF,
    spec: &KlyachkoSubgroupSpec,
    f: &FiniteField,
) -> Result<u32, SubgroupError> {
    if !h_membership(g, spec, f)? {
        return Err(SubgroupError::NotInSubgroup);
    }
    Ok(psi_exponent_unchecked(g, spec, f))
}

/// [`psi_r_value`] without the membership test.
#[inline]
pub fn psi_exponent_unchecked(g: &MatrixGF, spec: &KlyachkoSubgroupSpec, f: &FiniteField) -> u32 {
    let o = spec.unipotent_offset();
    let sum: Elem = (1..spec.r).fold(0, |acc, i| f.add(acc, g.get(o + i - 1, o + i)));
    f.trace(sum)
}

/// Indices of all members of the subgroup in the table's element list.
pub fn enumerate_subgroup(
    table: &GroupTable,
    spec: &KlyachkoSubgroupSpec,
    exec: Execution,
) -> Result<Vec<usize>, SubgroupError> {
    if spec.n() != table.n() {
        return Err(SubgroupError::SizeMismatch {
            expected: table.n(),
            got: spec.n(),
        });
    }
    let flags = parallel::map_range(exec, table.elements().len(), |i| {
        h_membership(table.element(i), spec, table.field()).unwrap_or(false)
    });
    Ok(flags
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::Limits;

    fn table(n: usize, q: u32) -> GroupTable {
        let f = FiniteField::of_order(q, 16).unwrap();
        GroupTable::build(n, f, &Limits::default(), Execution::Sequential).unwrap()
    }

    #[test]
    fn identity_is_symplectic() {
        let f = FiniteField::new(3, 1).unwrap();
        for k in 1..4 {
            assert!(sp_membership(&MatrixGF::identity(2 * k), k, &f).unwrap());
        }
        assert_eq!(
            sp_membership(&MatrixGF::identity(3), 1, &f),
            Err(SubgroupError::SizeMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn sp2_is_sl2() {
        let t = table(2, 3);
        let f = t.field();
        let members: Vec<&MatrixGF> = t
            .elements()
            .iter()
            .filter(|g| sp_membership(g, 1, f).unwrap())
            .collect();
        assert_eq!(members.len(), 24);
        assert!(members.iter().all(|g| g.det(f) == 1));
        let t2 = table(2, 2);
        let count = t2
            .elements()
            .iter()
            .filter(|g| sp_membership(g, 1, t2.field()).unwrap())
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn subgroup_orders() {
        // U_2 over F_2
        let t = table(2, 2);
        let h = enumerate_subgroup(&t, &KlyachkoSubgroupSpec::new(2, 0), Execution::Sequential).unwrap();
        assert_eq!(h.len(), 2);
        // H_{1,2}(F_3): q^{2kr} |Sp(2)| = 9 * 24
        let t = table(3, 3);
        let h = enumerate_subgroup(&t, &KlyachkoSubgroupSpec::new(1, 1), Execution::Parallel).unwrap();
        assert_eq!(h.len(), 216);
        let hm = enumerate_subgroup(&t, &KlyachkoSubgroupSpec::new(1, 1).mirrored(), Execution::Parallel)
            .unwrap();
        assert_eq!(hm.len(), 216);
    }

    #[test]
    fn psi_values() {
        let f = FiniteField::new(3, 1).unwrap();
        let spec = KlyachkoSubgroupSpec::new(2, 0);
        assert_eq!(psi_r_value(&MatrixGF::identity(2), &spec, &f), Ok(0));
        let u = MatrixGF::from_rows(&[vec![1, 2], vec![0, 1]]);
        assert_eq!(psi_r_value(&u, &spec, &f), Ok(2));
        let not_member = MatrixGF::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert_eq!(psi_r_value(&not_member, &spec, &f), Err(SubgroupError::NotInSubgroup));
        let sym = KlyachkoSubgroupSpec::new(0, 1);
        let h = MatrixGF::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(psi_r_value(&h, &sym, &f), Ok(0));
    }

    #[test]
    fn closure_and_homomorphism_on_h_1_2() {
        let t = table(3, 2);
        let spec = KlyachkoSubgroupSpec::new(1, 1);
        let h = enumerate_subgroup(&t, &spec, Execution::Sequential).unwrap();
        let f = t.field();
        for &a in &h {
            for &b in &h {
                let ab = t.element(t.mul_index(a, b)).clone();
                assert!(h_membership(&ab, &spec, f).unwrap());
            }
            let inv = t.element(t.inverse_index(a));
            assert!(h_membership(inv, &spec, f).unwrap());
        }
    }
}
