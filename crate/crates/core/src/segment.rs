//! Zelevinsky segments over opaque cuspidal labels, Speh blocks, Tadic
//! parameters and the model assignment `κ`.
//!
//! Cuspidal data carry no internal structure: the calculus only needs the
//! cuspidal line (name, degree, duality mark) and exact rational shifts.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::klyachko::Orientation;

pub type Q = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentError {
    #[error("a Speh block with t = 0 has no multisegment")]
    EmptyBlock,
    #[error("segment end {b} is not a nonnegative integer step from {a}")]
    BadEndpoints { a: String, b: String },
}

/// A cuspidal representation `ρ[x]` of `G_r`, named opaquely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CuspidalLabel {
    pub name: String,
    pub degree: u32,
    /// Formal contragredient mark.
    pub dual: bool,
    /// Self-dual labels are fixed by the contragredient.
    pub self_dual: bool,
    #[serde(with = "rational_str")]
    pub shift: Q,
}

impl CuspidalLabel {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        CuspidalLabel {
            name: name.into(),
            degree,
            dual: false,
            self_dual: false,
            shift: Q::zero(),
        }
    }

    pub fn self_dual(mut self) -> Self {
        self.self_dual = true;
        self.dual = false;
        self
    }

    /// `(ρ[x])[y] = ρ[x + y]`.
    pub fn shifted(&self, y: Q) -> Self {
        CuspidalLabel {
            shift: self.shift + y,
            ..self.clone()
        }
    }

    /// The unshifted label.
    pub fn line(&self) -> Self {
        self.shifted(-self.shift)
    }

    /// `ρ̃`: toggles the dual mark unless the label is self-dual, and negates
    /// the shift.
    pub fn contragredient(&self) -> Self {
        CuspidalLabel {
            dual: if self.self_dual { false } else { !self.dual },
            shift: -self.shift,
            ..self.clone()
        }
    }

    /// Name as written in parameter strings.
    pub fn display_name(&self) -> String {
        if self.dual {
            format!("{}~", self.name)
        } else {
            self.name.clone()
        }
    }
}

/// `[a, b]^{(ρ)} = {ρ[a+i] : 0 ≤ i ≤ b−a}` with `ρ` unshifted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub rho: CuspidalLabel,
    #[serde(with = "rational_str")]
    pub a: Q,
    #[serde(with = "rational_str")]
    pub b: Q,
}

impl Segment {
    /// Normalises any shift on `rho` into the endpoints.
    pub fn new(rho: &CuspidalLabel, a: Q, b: Q) -> Result<Self, SegmentError> {
        let len = b - a;
        if !len.is_integer() || len.is_negative() {
            return Err(SegmentError::BadEndpoints {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(Segment {
            rho: rho.line(),
            a: a + rho.shift,
            b: b + rho.shift,
        })
    }

    /// Number of cuspidal points, `b − a + 1`.
    pub fn length(&self) -> i64 {
        (self.b - self.a).to_integer() + 1
    }

    pub fn degree(&self) -> u64 {
        self.rho.degree as u64 * self.length() as u64
    }

    /// Same line and the endpoints differ from each other by integers.
    fn comparable(&self, other: &Segment) -> bool {
        self.rho == other.rho && (other.a - self.a).is_integer()
    }

    pub fn contains(&self, other: &Segment) -> bool {
        self.comparable(other) && self.a <= other.a && other.b <= self.b
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    /// Line first, then decreasing right end, then decreasing left end.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rho
            .cmp(&other.rho)
            .then_with(|| other.b.cmp(&self.b))
            .then_with(|| other.a.cmp(&self.a))
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]^({})", self.a, self.b, self.rho.display_name())
    }
}

/// `Δ` precedes `Δ′`: `Δ′ ⊄ Δ`, `ρ′[a′] = ρ[a+k]` for an integer `k > 0`, and
/// `Δ ∪ Δ′` is a segment.
pub fn segment_precedes(d: &Segment, d2: &Segment) -> bool {
    if !d.comparable(d2) {
        return false;
    }
    let k = d2.a - d.a;
    // the union is a segment iff there is no gap between them
    k.is_positive() && !d.contains(d2) && d2.a <= d.b + Q::one()
}

/// A multiset of segments kept in canonical sorted order, so derived
/// equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Multisegment(Vec<Segment>);

impl Multisegment {
    pub fn new(mut segments: Vec<Segment>) -> Self {
        segments.sort();
        Multisegment(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(Segment::degree).sum()
    }
}

impl fmt::Display for Multisegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// An ordering in which no segment precedes a later one.
pub fn admissible_order(a: &Multisegment) -> Vec<Segment> {
    // the canonical order already sorts by line, then decreasing b
    let order = a.0.clone();
    debug_assert!(is_admissible(&order));
    order
}

pub fn is_admissible(order: &[Segment]) -> bool {
    order
        .iter()
        .enumerate()
        .all(|(i, d)| order[i + 1..].iter().all(|later| !segment_precedes(d, later)))
}

/// `a⁻`: every segment loses its right end; emptied segments vanish.
pub fn derivative_multisegment(a: &Multisegment) -> Multisegment {
    Multisegment::new(
        a.0.iter()
            .filter(|s| s.a < s.b)
            .map(|s| Segment {
                b: s.b - Q::one(),
                ..s.clone()
            })
            .collect(),
    )
}

/// `U(δ,t)[α]` with `δ` the square-integrable built from `d` twists of the
/// unitary cuspidal `ρ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpehBlock {
    pub rho: CuspidalLabel,
    pub d: u32,
    pub t: u32,
    #[serde(with = "rational_str")]
    pub alpha: Q,
}

impl SpehBlock {
    pub fn new(rho: CuspidalLabel, d: u32, t: u32, alpha: Q) -> Self {
        SpehBlock {
            rho: rho.line(),
            d,
            t,
            alpha,
        }
    }

    /// `deg δ = deg ρ · d`.
    pub fn delta_degree(&self) -> u64 {
        self.rho.degree as u64 * self.d as u64
    }

    pub fn degree(&self) -> u64 {
        self.delta_degree() * self.t as u64
    }
}

/// `Δ(t, ρ[c]) = [c + (1−t)/2, c + (t−1)/2]^{(ρ)}`.
fn centred_segment(rho: &CuspidalLabel, t: u32, c: Q) -> Segment {
    let half = Q::new(t as i64 - 1, 2);
    Segment {
        rho: rho.line(),
        a: c - half,
        b: c + half,
    }
}

/// `a(δ,t,α) = {Δ(t, ρ[(1−d)/2 + j + α]) : 0 ≤ j < d}`.
pub fn speh_multisegment(block: &SpehBlock) -> Result<Multisegment, SegmentError> {
    if block.t == 0 {
        return Err(SegmentError::EmptyBlock);
    }
    let start = Q::new(1 - block.d as i64, 2) + block.alpha;
    Ok(Multisegment::new(
        (0..block.d)
            .map(|j| centred_segment(&block.rho, block.t, start + Q::from(j as i64)))
            .collect(),
    ))
}

/// `U(δ,t)[α] ↦ U(δ,t−1)[α−1/2]`.
pub fn speh_highest_derivative(block: &SpehBlock) -> Result<SpehBlock, SegmentError> {
    if block.t == 0 {
        return Err(SegmentError::EmptyBlock);
    }
    Ok(SpehBlock {
        t: block.t - 1,
        alpha: block.alpha - Q::new(1, 2),
        ..block.clone()
    })
}

/// Highest derivative of a product of Speh blocks: its order `Σ deg δ_i` and
/// the blockwise derivatives with empty blocks dropped.
pub fn product_highest_derivative(
    blocks: &[SpehBlock],
) -> Result<(u64, Vec<SpehBlock>), SegmentError> {
    let mut order = 0;
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        let der = speh_highest_derivative(b)?;
        order += b.delta_degree();
        if der.t > 0 {
            out.push(der);
        }
    }
    Ok((order, out))
}

/// A Tadic block: plain `U(δ,t)[α]`, or paired `U(δ,t)[α] × U(δ,t)[−α]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TadicBlock {
    pub block: SpehBlock,
    pub paired: bool,
}

impl TadicBlock {
    pub fn plain(block: SpehBlock) -> Self {
        TadicBlock { block, paired: false }
    }

    /// Stored with the nonnegative representative of `±α`.
    pub fn paired(mut block: SpehBlock) -> Self {
        block.alpha = block.alpha.abs();
        TadicBlock { block, paired: true }
    }

    pub fn degree(&self) -> u64 {
        self.block.degree() * if self.paired { 2 } else { 1 }
    }

    /// The Speh factors of the product this block stands for.
    pub fn expand(&self) -> Vec<SpehBlock> {
        if self.paired {
            vec![
                self.block.clone(),
                SpehBlock {
                    alpha: -self.block.alpha,
                    ..self.block.clone()
                },
            ]
        } else {
            vec![self.block.clone()]
        }
    }
}

/// A product of Tadic blocks, held as a multiset (canonical order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TadicParameter(Vec<TadicBlock>);

impl TadicParameter {
    pub fn new(mut blocks: Vec<TadicBlock>) -> Self {
        for b in blocks.iter_mut().filter(|b| b.paired) {
            b.block.alpha = b.block.alpha.abs();
        }
        blocks.sort();
        TadicParameter(blocks)
    }

    pub fn blocks(&self) -> &[TadicBlock] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `n`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(TadicBlock::degree).sum()
    }

    /// All Speh factors, pairs split into their two halves.
    pub fn speh_factors(&self) -> Vec<SpehBlock> {
        self.0.iter().flat_map(TadicBlock::expand).collect()
    }
}

/// `δ ↦ δ̃` and `α ↦ −α` blockwise; an involution.
pub fn contragredient(param: &TadicParameter) -> TadicParameter {
    TadicParameter::new(
        param
            .0
            .iter()
            .map(|tb| {
                let block = SpehBlock {
                    rho: tb.block.rho.contragredient(),
                    alpha: -tb.block.alpha,
                    ..tb.block.clone()
                };
                TadicBlock { block, paired: tb.paired }
            })
            .collect(),
    )
}

/// The model type `(r, k)` with `n = r + 2k`, together with which subgroup
/// family realises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KlyachkoType {
    pub r: u64,
    pub k: u64,
    pub orientation: Orientation,
}

impl KlyachkoType {
    pub fn n(&self) -> u64 {
        self.r + 2 * self.k
    }

    pub fn model(&self) -> String {
        match self.orientation {
            Orientation::Standard => format!("H_{{{},{}}} with psi_{}", self.r, 2 * self.k, self.r),
            Orientation::Mirrored => format!(
                "H'_{{{},{}}} with conj(psi'_{}) on the contragredient",
                2 * self.k,
                self.r,
                self.r
            ),
        }
    }
}

impl fmt::Display for KlyachkoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.model())
    }
}

/// `κ`: `r` sums `deg δ` over odd-`t` factors and `k` sums `⌊t/2⌋ deg δ` over
/// all factors, pairs counted twice.
pub fn kappa(param: &TadicParameter) -> KlyachkoType {
    let mut r = 0;
    let mut k = 0;
    for b in param.speh_factors() {
        if b.t % 2 == 1 {
            r += b.delta_degree();
        }
        k += (b.t / 2) as u64 * b.delta_degree();
    }
    KlyachkoType {
        r,
        k,
        orientation: Orientation::Standard,
    }
}

/// Plain blocks untwisted and paired blocks with `0 < α < 1/2`.
pub fn validate_unitary(param: &TadicParameter) -> bool {
    let half = Q::new(1, 2);
    param.0.iter().all(|tb| {
        if tb.paired {
            tb.block.alpha.is_positive() && tb.block.alpha < half
        } else {
            tb.block.alpha.is_zero()
        }
    })
}

/// Same `(r, k)`, read off the other subgroup family: `H_{r,2k}` models of
/// `π` correspond to `H'_{2k,r}` models of `π̃` with the conjugate character.
pub fn dual_model_type(t: KlyachkoType) -> KlyachkoType {
    KlyachkoType {
        orientation: match t.orientation {
            Orientation::Standard => Orientation::Mirrored,
            Orientation::Mirrored => Orientation::Standard,
        },
        ..t
    }
}

/// Serialises rationals as `"p"` or `"p/q"`.
pub mod rational_str {
    use super::Q;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad rational {s:?}")))
    }
}
