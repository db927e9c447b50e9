//! Enumeration of `GL_n(F_q)` and its conjugacy classes.

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FiniteField, DEFAULT_MAX_ORDER};
use crate::matrix::MatrixGF;
use crate::parallel::{self, Execution};
use crate::poly::{invariant_factors, Poly};

pub const DEFAULT_MAX_ELEMENTS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("|GL_{n}(F_{q})| = {order} exceeds the element cap {cap}")]
    GroupTooLarge { n: usize, q: u32, order: u128, cap: u64 },
    #[error("matrix size must be at least 1")]
    ZeroSize,
    #[error("conjugacy classes have not been computed")]
    ClassesMissing,
}

/// Resource caps for group construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_elements: u64,
    pub max_field_order: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_field_order: DEFAULT_MAX_ORDER,
        }
    }
}

/// `∏_{i<n} (q^n − q^i)`.
pub fn gl_order(n: usize, q: u32) -> u128 {
    let qn = (q as u128).pow(n as u32);
    (0..n as u32).map(|i| qn - (q as u128).pow(i)).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjClass {
    pub representative: MatrixGF,
    /// Index of the representative in the element list.
    pub rep_index: usize,
    pub size: u64,
    pub invariant_factors: Vec<Poly>,
    pub inverse_class: usize,
    pub element_order: u64,
}

/// `GL_n(F_q)` with its elements in lexicographic (row-major code) order.
#[derive(Debug, Clone)]
pub struct GroupTable {
    n: usize,
    field: FiniteField,
    elements: Vec<MatrixGF>,
    codes: Vec<u64>,
    inverse: Vec<u32>,
    orders: Vec<u32>,
    exponent: u64,
    classes: Vec<ConjClass>,
    class_of: Vec<u32>,
}

impl GroupTable {
    /// Enumerates every invertible matrix. Classes are left empty.
    pub fn enumerate(
        n: usize,
        field: FiniteField,
        limits: &Limits,
        exec: Execution,
    ) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroSize);
        }
        let q = field.q();
        let order = gl_order(n, q);
        if order > limits.max_elements as u128 {
            return Err(GroupError::GroupTooLarge {
                n,
                q,
                order,
                cap: limits.max_elements,
            });
        }
        let rows = RowSpace::new(n, &field);
        let firsts: Vec<u32> = (1..rows.count).collect();
        let chunks = parallel::map_range(exec, firsts.len(), |i| {
            let mut out = Vec::new();
            rows.extend(&mut vec![firsts[i]], &mut out);
            out
        });
        let codes: Vec<u64> = chunks
            .into_iter()
            .flatten()
            .map(|row_codes| {
                row_codes
                    .iter()
                    .fold(0u64, |acc, &r| acc * rows.count as u64 + r as u64)
            })
            .collect();
        debug_assert_eq!(codes.len() as u128, order);
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));

        let elements: Vec<MatrixGF> = parallel::map_range(exec, codes.len(), |i| {
            MatrixGF::from_code(n, q, codes[i])
        });
        let mut table = GroupTable {
            n,
            field,
            elements,
            codes,
            inverse: Vec::new(),
            orders: Vec::new(),
            exponent: 1,
            classes: Vec::new(),
            class_of: Vec::new(),
        };
        table.fill_inverses_and_orders(exec);
        Ok(table)
    }

    /// Fills in the conjugacy classes, keyed by invariant factors of `xI − g`.
    ///
    /// The identity class comes first; the others follow in the order of
    /// their representatives, each being the least element of its class.
    pub fn compute_classes(&mut self, exec: Execution) {
        let keys: Vec<Vec<Poly>> = parallel::map_range(exec, self.elements.len(), |i| {
            invariant_factors(&self.elements[i], &self.field)
        });
        let identity = self.identity_index();
        let mut first_seen: HashMap<&[Poly], usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut raw_class = vec![0usize; keys.len()];
        for (i, key) in keys.iter().enumerate() {
            let id = *first_seen.entry(key.as_slice()).or_insert_with(|| {
                reps.push(i);
                reps.len() - 1
            });
            raw_class[i] = id;
        }
        let id_class = raw_class[identity];
        let mut perm: Vec<usize> = (0..reps.len()).collect();
        perm.sort_by_key(|&c| (c != id_class, reps[c]));
        let mut relabel = vec![0usize; reps.len()];
        for (new, &old) in perm.iter().enumerate() {
            relabel[old] = new;
        }
        self.class_of = raw_class.iter().map(|&c| relabel[c] as u32).collect();
        let mut sizes = vec![0u64; reps.len()];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        self.classes = perm
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                let rep_index = reps[old];
                ConjClass {
                    representative: self.elements[rep_index].clone(),
                    rep_index,
                    size: sizes[new],
                    invariant_factors: keys[rep_index].clone(),
                    inverse_class: self.class_of[self.inverse[rep_index] as usize] as usize,
                    element_order: self.orders[rep_index] as u64,
                }
            })
            .collect();
    }

    /// Enumeration followed by class computation.
    pub fn build(n: usize, field: FiniteField, limits: &Limits, exec: Execution) -> Result<Self, GroupError> {
        let mut t = Self::enumerate(n, field, limits, exec)?;
        t.compute_classes(exec);
        Ok(t)
    }

    /// Rebuilds a table from cached element codes and class labels.
    pub(crate) fn from_parts(
        n: usize,
        field: FiniteField,
        codes: Vec<u64>,
        class_of: Vec<u32>,
        exec: Execution,
    ) -> Self {
        let q = field.q();
        let elements = codes.iter().map(|&c| MatrixGF::from_code(n, q, c)).collect();
        let mut table = GroupTable {
            n,
            field,
            elements,
            codes,
            inverse: Vec::new(),
            orders: Vec::new(),
            exponent: 1,
            classes: Vec::new(),
            class_of,
        };
        table.fill_inverses_and_orders(exec);
        let count = table.class_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut reps = vec![usize::MAX; count];
        let mut sizes = vec![0u64; count];
        for (i, &c) in table.class_of.iter().enumerate() {
            let c = c as usize;
            reps[c] = reps[c].min(i);
            sizes[c] += 1;
        }
        table.classes = (0..count)
            .map(|c| {
                let rep_index = reps[c];
                ConjClass {
                    representative: table.elements[rep_index].clone(),
                    rep_index,
                    size: sizes[c],
                    invariant_factors: invariant_factors(&table.elements[rep_index], &table.field),
                    inverse_class: table.class_of[table.inverse[rep_index] as usize] as usize,
                    element_order: table.orders[rep_index] as u64,
                }
            })
            .collect();
        table
    }

    fn fill_inverses_and_orders(&mut self, exec: Execution) {
        self.inverse = parallel::map_range(exec, self.elements.len(), |i| {
            let inv = self.elements[i].inverse(&self.field).unwrap();
            self.index_of(&inv).unwrap() as u32
        });
        self.orders = parallel::map_range(exec, self.elements.len(), |i| {
            let g = &self.elements[i];
            let mut acc = g.clone();
            let mut k = 1;
            while !acc.is_identity() {
                acc = acc.mul(g, &self.field);
                k += 1;
            }
            k
        });
        self.exponent = self.orders.iter().fold(1u64, |acc, &o| acc.lcm(&(o as u64)));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[MatrixGF] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &MatrixGF {
        &self.elements[i]
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    /// Position of `g` in the element list, if `g` is invertible of the right size.
    pub fn index_of(&self, g: &MatrixGF) -> Option<usize> {
        if g.n() != self.n {
            return None;
        }
        self.codes.binary_search(&g.code(self.field.q())).ok()
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&MatrixGF::identity(self.n)).unwrap()
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.orders[i] as u64
    }

    /// lcm of all element orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let prod = self.elements[a].mul(&self.elements[b], &self.field);
        self.index_of(&prod).unwrap()
    }

    pub fn has_classes(&self) -> bool {
        !self.classes.is_empty()
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i] as usize
    }

    pub fn class_labels(&self) -> &[u32] {
        &self.class_of
    }

    /// Class index of an arbitrary invertible matrix.
    pub fn class_of_matrix(&self, g: &MatrixGF) -> Option<usize> {
        self.index_of(g).map(|i| self.class_of(i))
    }

    pub fn require_classes(&self) -> Result<(), GroupError> {
        if self.has_classes() {
            Ok(())
        } else {
            Err(GroupError::ClassesMissing)
        }
    }
}

/// Row vectors of `F_q^n`, encoded base `q` with the first coordinate most
/// significant.
struct RowSpace<'a> {
    n: usize,
    count: u32,
    field: &'a FiniteField,
}

impl<'a> RowSpace<'a> {
    fn new(n: usize, field: &'a FiniteField) -> Self {
        RowSpace {
            n,
            count: field.q().pow(n as u32),
            field,
        }
    }

    fn digits(&self, mut code: u32) -> Vec<u16> {
        let q = self.field.q();
        let mut d = vec![0; self.n];
        for slot in d.iter_mut().rev() {
            *slot = (code % q) as u16;
            code /= q;
        }
        d
    }

    fn encode(&self, d: &[u16]) -> u32 {
        d.iter().fold(0, |acc, &x| acc * self.field.q() + x as u32)
    }

    /// Membership table of the span of `rows`.
    fn span(&self, rows: &[u32]) -> Vec<bool> {
        let mut members = vec![0u32];
        for &r in rows {
            let rd = self.digits(r);
            let mut next = Vec::with_capacity(members.len() * self.field.q() as usize);
            for c in self.field.elements() {
                let scaled: Vec<u16> = rd.iter().map(|&x| self.field.mul(c, x)).collect();
                for &m in &members {
                    let md = self.digits(m);
                    let sum: Vec<u16> = md
                        .iter()
                        .zip(&scaled)
                        .map(|(&a, &b)| self.field.add(a, b))
                        .collect();
                    next.push(self.encode(&sum));
                }
            }
            members = next;
        }
        let mut table = vec![false; self.count as usize];
        for m in members {
            table[m as usize] = true;
        }
        table
    }

    /// Appends every completion of the partial basis `prefix` to `out`, in
    /// increasing code order.
    fn extend(&self, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == self.n {
            out.push(prefix.clone());
            return;
        }
        let span = self.span(prefix);
        for v in 0..self.count {
            if !span[v as usize] {
                prefix.push(v);
                self.extend(prefix, out);
                prefix.pop();
            }
        }
    }
}
