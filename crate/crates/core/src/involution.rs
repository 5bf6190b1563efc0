//! The action of a real structure on `H₂(E;ℤ) = L ⊕ ℤ/2`.
//!
//! An [`ExtendedInvolution`] is an involutive isometry `m` of `L = E8 ⊕ U`
//! together with a mod-2 functional `eps`: the involution of `L ⊕ ℤ/2` is
//! `(v, t) ↦ (m v, eps(v) + t)`. It squares to the identity exactly when
//! `eps ∘ (I + m) ≡ 0 (mod 2)`. On the (−1)-eigenlattice `L⁻` the functional
//! `eps` is the δ-invariant, valued in `{0, w₂}`.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use crate::lattice::{self, Isometry, Lattice, LatticeError, LatticeVector};
use crate::matrix::{self, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvolutionError {
    #[error("expected a {expected}x{expected} matrix and {expected} eps entries")]
    DimensionMismatch { expected: usize },
    #[error("eps entries must be 0 or 1")]
    EpsNotBinary,
    #[error("m·m is not the identity")]
    NotInvolutive,
    #[error("m does not preserve the intersection form")]
    NotIsometry,
    #[error("eps∘(I+m) is not zero mod 2 (the extension to L ⊕ ℤ/2 is not an involution)")]
    EpsIncompatible,
    #[error("vector is not in the (−1)-eigenlattice L⁻")]
    YNotInMinusEigenlattice,
    #[error("(u1, u2) is not a standard pair: u1² = {u1u1}, u2² = {u2u2}, u1·u2 = {u1u2}")]
    NotStandardPair { u1u1: BigInt, u2u2: BigInt, u1u2: BigInt },
    #[error("span(u1, u2) is not invariant under m")]
    NotInvariant,
    #[error("m acts on the plane neither as −1 nor as a transposition")]
    NeitherType,
    #[error("e-basis does not satisfy the D4 relations or is not orthogonal to the pair")]
    BadD4Frame,
    #[error("δ vanishes on the pair and on every tested e; no plane of type I(0,w2) in the searched family")]
    NoPlaneInSearchedFamily,
    #[error("vector has square {0}, expected 0")]
    NotIsotropic(BigInt),
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("vector has negative square {0}")]
    NegativeSquare(BigInt),
    #[error("reflection step limit {limit} exceeded after word of length {}", partial.len())]
    StepLimitExceeded { limit: usize, partial: Vec<usize> },
    #[error("nodal class in L⁻ has δ = w2")]
    NodalClassWithNonzeroDelta,
    #[error("coordinates exceed the range of the isotropic search")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Value of δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Delta {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "w2")]
    W2,
}

impl Delta {
    fn from_bit(b: bool) -> Self {
        if b {
            Delta::W2
        } else {
            Delta::Zero
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Delta::Zero => "0",
            Delta::W2 => "w2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaneType {
    #[serde(rename = "I(0,0)")]
    I00,
    #[serde(rename = "I(0,w2)")]
    I0w2,
    #[serde(rename = "I(w2,w2)")]
    Iw2w2,
    #[serde(rename = "II")]
    II,
}

impl fmt::Display for PlaneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaneType::I00 => "I(0,0)",
            PlaneType::I0w2 => "I(0,w2)",
            PlaneType::Iw2w2 => "I(w2,w2)",
            PlaneType::II => "II",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealityVerdict {
    NotReal,
    RealWithRealFibers,
    RealWithConjugateFibers,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UPairCase {
    PairOfPencils,
    PencilPlusNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInvolution", into = "RawInvolution")]
pub struct ExtendedInvolution {
    lattice: Lattice,
    m: Isometry,
    eps: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct RawInvolution {
    #[serde(with = "json::int_mat")]
    m: IntMatrix,
    eps: Vec<u8>,
}

impl TryFrom<RawInvolution> for ExtendedInvolution {
    type Error = InvolutionError;

    fn try_from(raw: RawInvolution) -> Result<Self, Self::Error> {
        make_involution(raw.m, raw.eps)
    }
}

impl From<ExtendedInvolution> for RawInvolution {
    fn from(inv: ExtendedInvolution) -> Self {
        RawInvolution {
            m: inv.m.matrix,
            eps: inv.eps,
        }
    }
}

/// Validated involution of `L = E8neg ⊕ U` (rank 10).
pub fn make_involution(m: IntMatrix, eps: Vec<u8>) -> Result<ExtendedInvolution, InvolutionError> {
    ExtendedInvolution::new(Lattice::enriques(), m, eps)
}

impl ExtendedInvolution {
    pub fn new(lattice: Lattice, m: IntMatrix, eps: Vec<u8>) -> Result<Self, InvolutionError> {
        let n = lattice.rank();
        if m.len() != n || m.iter().any(|r| r.len() != n) || eps.len() != n {
            return Err(InvolutionError::DimensionMismatch { expected: n });
        }
        if eps.iter().any(|&e| e > 1) {
            return Err(InvolutionError::EpsNotBinary);
        }
        if matrix::mul(&m, &m) != matrix::identity(n) {
            return Err(InvolutionError::NotInvolutive);
        }
        if matrix::congruence(lattice.gram(), &m) != *lattice.gram() {
            return Err(InvolutionError::NotIsometry);
        }
        let one_plus_m = matrix::add(&matrix::identity(n), &m);
        for j in 0..n {
            let s: BigInt = (0..n).filter(|&i| eps[i] == 1).map(|i| one_plus_m[i][j].clone()).sum();
            if s.is_odd() {
                return Err(InvolutionError::EpsIncompatible);
            }
        }
        Ok(ExtendedInvolution {
            lattice,
            m: Isometry { matrix: m },
            eps,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m.matrix
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        self.m.apply(v)
    }

    /// `eps(v) mod 2` for any `v ∈ L`.
    pub fn eps_of(&self, v: &LatticeVector) -> bool {
        let s: BigInt = v
            .coords
            .iter()
            .zip(&self.eps)
            .filter(|(_, &e)| e == 1)
            .map(|(c, _)| c.clone())
            .sum();
        s.is_odd()
    }

    pub fn in_minus(&self, v: &LatticeVector) -> bool {
        self.apply(v).add(v).is_zero()
    }

    pub fn in_plus(&self, v: &LatticeVector) -> bool {
        self.apply(v) == *v
    }

    /// Conjugate `g m g⁻¹`, with `eps` transported along `g`.
    pub fn conjugate(&self, g: &IntMatrix, g_inv: &IntMatrix) -> Result<Self, InvolutionError> {
        let m = matrix::mul(g, &matrix::mul(&self.m.matrix, g_inv));
        // eps'(v) = eps(g⁻¹ v)
        let n = self.lattice.rank();
        let eps: Vec<u8> = (0..n)
            .map(|j| {
                let s: BigInt = (0..n).filter(|&i| self.eps[i] == 1).map(|i| g_inv[i][j].clone()).sum();
                u8::from(s.is_odd())
            })
            .collect();
        ExtendedInvolution::new(self.lattice.clone(), m, eps)
    }

    pub fn with_eps(&self, eps: Vec<u8>) -> Result<Self, InvolutionError> {
        ExtendedInvolution::new(self.lattice.clone(), self.m.matrix.clone(), eps)
    }
}

/// Saturated basis of `ker(m ∓ I)` (`sign = +1` gives `L⁺`).
pub fn eigenlattice(inv: &ExtendedInvolution, sign: i8) -> Vec<LatticeVector> {
    let n = inv.lattice.rank();
    let shift = BigInt::from(sign);
    let mut a = inv.m.matrix.clone();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= &shift;
    }
    matrix::integer_kernel(&a, n).into_iter().map(LatticeVector::new).collect()
}

pub fn delta(inv: &ExtendedInvolution, y: &LatticeVector) -> Result<Delta, InvolutionError> {
    inv.lattice.check(y)?;
    if !inv.in_minus(y) {
        return Err(InvolutionError::YNotInMinusEigenlattice);
    }
    Ok(Delta::from_bit(inv.eps_of(y)))
}

/// Nodal classes lying in `L⁻` always have δ = 0; reject data violating that.
pub fn check_nodal_classes(inv: &ExtendedInvolution, roots: &[LatticeVector]) -> Result<(), InvolutionError> {
    for r in roots {
        if inv.in_minus(r) && delta(inv, r)? == Delta::W2 {
            return Err(InvolutionError::NodalClassWithNonzeroDelta);
        }
    }
    Ok(())
}

fn check_standard_pair(l: &Lattice, u1: &LatticeVector, u2: &LatticeVector) -> Result<(), InvolutionError> {
    l.check(u1)?;
    l.check(u2)?;
    let (a, b, c) = (l.square(u1), l.square(u2), l.product(u1, u2));
    if !a.is_zero() || !b.is_zero() || !c.is_one() {
        return Err(InvolutionError::NotStandardPair {
            u1u1: a,
            u2u2: b,
            u1u2: c,
        });
    }
    Ok(())
}

/// Coordinates of `v` in the standard pair, if `v` lies in its span.
fn plane_coords(l: &Lattice, u1: &LatticeVector, u2: &LatticeVector, v: &LatticeVector) -> Option<(BigInt, BigInt)> {
    let a = l.product(v, u2);
    let b = l.product(v, u1);
    let back = u1.scale(&a).add(&u2.scale(&b));
    (back == *v).then_some((a, b))
}

pub fn classify_plane(
    inv: &ExtendedInvolution,
    u1: &LatticeVector,
    u2: &LatticeVector,
) -> Result<PlaneType, InvolutionError> {
    let l = &inv.lattice;
    check_standard_pair(l, u1, u2)?;
    let (a1, b1) = plane_coords(l, u1, u2, &inv.apply(u1)).ok_or(InvolutionError::NotInvariant)?;
    let (a2, b2) = plane_coords(l, u1, u2, &inv.apply(u2)).ok_or(InvolutionError::NotInvariant)?;
    let one = BigInt::one();
    let minus = -BigInt::one();
    if a1 == minus && b1.is_zero() && a2.is_zero() && b2 == minus {
        let d1 = delta(inv, u1)?;
        let d2 = delta(inv, u2)?;
        return Ok(match (d1, d2) {
            (Delta::Zero, Delta::Zero) => PlaneType::I00,
            (Delta::W2, Delta::W2) => PlaneType::Iw2w2,
            _ => PlaneType::I0w2,
        });
    }
    // transposition of the generators, up to the sign ambiguity of the pair
    let swap = a1.is_zero() && b2.is_zero() && a2 == b1 && (b1 == one || b1 == minus);
    if swap {
        return Ok(PlaneType::II);
    }
    Err(InvolutionError::NeitherType)
}

/// A standard generator frame `e1..e4` of a D4 with
/// `eᵢ² = −2`, `eᵢeⱼ = 0 (i<j≤3)`, `eᵢe₄ = 1`.
pub fn is_d4_frame(l: &Lattice, e: &[LatticeVector; 4]) -> bool {
    let d4 = Lattice::d4_negative();
    (0..4).all(|i| (0..4).all(|j| l.product(&e[i], &e[j]) == d4.gram()[i][j]))
}

/// Builds a plane of type `I(0,w2)` inside `L⁻` from a standard pair and an
/// orthogonal D4 frame by the three-way case split on `(δ(u1), δ(u2))`.
/// Only the family `{u1, u2, u1+u2+e : e ∈ {e1,…,e4, e1+e4}}` is searched.
pub fn find_plane_i0w2(
    inv: &ExtendedInvolution,
    u1: &LatticeVector,
    u2: &LatticeVector,
    d4: &[LatticeVector; 4],
) -> Result<(LatticeVector, LatticeVector), InvolutionError> {
    let l = &inv.lattice;
    check_standard_pair(l, u1, u2)?;
    for e in d4 {
        l.check(e)?;
    }
    if !is_d4_frame(l, d4) || d4.iter().any(|e| !l.product(e, u1).is_zero() || !l.product(e, u2).is_zero()) {
        return Err(InvolutionError::BadD4Frame);
    }
    let d1 = delta(inv, u1)?;
    let d2 = delta(inv, u2)?;
    let family: Vec<LatticeVector> = d4.iter().cloned().chain([d4[0].add(&d4[3])]).collect();
    let deltas: Vec<Delta> = family.iter().map(|e| delta(inv, e)).collect::<Result<_, _>>()?;
    let pick = |want: Delta| family.iter().zip(&deltas).find(|(_, d)| **d == want).map(|(e, _)| e);
    match (d1, d2) {
        (Delta::Zero, Delta::W2) => Ok((u1.clone(), u2.clone())),
        (Delta::W2, Delta::Zero) => Ok((u2.clone(), u1.clone())),
        (Delta::W2, Delta::W2) => {
            // δ(e1) = δ(e4) = w2 forces δ(e1+e4) = 0, so this always succeeds
            let e = pick(Delta::Zero).ok_or(InvolutionError::NoPlaneInSearchedFamily)?;
            Ok((u1.add(u2).add(e), u1.clone()))
        }
        (Delta::Zero, Delta::Zero) => {
            let e = pick(Delta::W2).ok_or(InvolutionError::NoPlaneInSearchedFamily)?;
            Ok((u1.clone(), u1.add(u2).add(e)))
        }
    }
}

/// Outcome of the bounded isotropic search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsotropicSearch {
    Found(LatticeVector),
    /// `L⁻` is definite (or zero), so no isotropic vector exists.
    Definite,
    /// Nothing found with coordinates bounded by `bound` in the basis of `L⁻`;
    /// not a proof of nonexistence.
    NotFoundWithinBound { bound: u32 },
}

pub const DEFAULT_ISOTROPIC_BOUND: u32 = 3;

/// Searches `L⁻` for a primitive `x` with `x² = 0`, in shells of growing
/// max-norm over the Hermite-reduced basis returned by [`eigenlattice`].
pub fn find_primitive_isotropic(inv: &ExtendedInvolution, bound: u32) -> Result<IsotropicSearch, InvolutionError> {
    let basis = eigenlattice(inv, -1);
    let k = basis.len();
    if k == 0 {
        return Ok(IsotropicSearch::Definite);
    }
    let sub = inv.lattice.restrict(&basis);
    let sig = lattice::signature(&sub);
    if sig.zero == 0 && (sig.pos == 0 || sig.neg == 0) {
        return Ok(IsotropicSearch::Definite);
    }
    let g: Vec<Vec<i128>> = sub
        .gram()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or(InvolutionError::Overflow)?;
    let b = bound as i64;
    let mut c = vec![0i64; k];
    for shell in 1..=b {
        // odometer over [-shell, shell]^k, keeping vectors on the shell boundary
        for x in c.iter_mut() {
            *x = -shell;
        }
        loop {
            if c.iter().any(|x| x.abs() == shell) {
                let mut q: i128 = 0;
                for i in 0..k {
                    if c[i] == 0 {
                        continue;
                    }
                    let mut row: i128 = 0;
                    for j in 0..k {
                        row += g[i][j] * c[j] as i128;
                    }
                    q += c[i] as i128 * row;
                }
                let gcd = c.iter().fold(0i64, |a, &x| a.gcd(&x));
                if q == 0 && gcd == 1 {
                    let mut x = LatticeVector::zero(inv.lattice.rank());
                    for (ci, v) in c.iter().zip(&basis) {
                        x = x.add(&v.scale(&BigInt::from(*ci)));
                    }
                    return Ok(IsotropicSearch::Found(x));
                }
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                c[pos] += 1;
                if c[pos] <= shell {
                    break;
                }
                c[pos] = -shell;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    Ok(IsotropicSearch::NotFoundWithinBound { bound })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub y: LatticeVector,
    /// Indices into the root list, in application order.
    pub word: Vec<usize>,
}

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

/// Reflects `x` in the first root with negative pairing until every root
/// pairs nonnegatively with the result.
pub fn reduce_by_reflections(
    l: &Lattice,
    x: &LatticeVector,
    roots: &[LatticeVector],
    step_limit: usize,
) -> Result<Reduction, InvolutionError> {
    l.check(x)?;
    for r in roots {
        l.check(r)?;
        let rr = l.square(r);
        if rr != BigInt::from(-2) {
            return Err(LatticeError::NotARoot(rr).into());
        }
    }
    let xx = l.square(x);
    if xx.is_negative() {
        return Err(InvolutionError::NegativeSquare(xx));
    }
    let mut y = x.clone();
    let mut word = Vec::new();
    while let Some(i) = roots.iter().position(|r| l.product(&y, r).is_negative()) {
        if word.len() == step_limit {
            return Err(InvolutionError::StepLimitExceeded {
                limit: step_limit,
                partial: word,
            });
        }
        y = lattice::reflect_root(l, &roots[i], &y)?;
        word.push(i);
    }
    Ok(Reduction { y, word })
}

/// Replays a reflection word; used to audit [`reduce_by_reflections`].
pub fn replay_word(l: &Lattice, x: &LatticeVector, roots: &[LatticeVector], word: &[usize]) -> Result<LatticeVector, LatticeError> {
    word.iter().try_fold(x.clone(), |y, &i| lattice::reflect_root(l, &roots[i], &y))
}

pub fn pencil_reality(inv: &ExtendedInvolution, x: &LatticeVector) -> Result<RealityVerdict, InvolutionError> {
    let l = &inv.lattice;
    l.check(x)?;
    let xx = l.square(x);
    if !xx.is_zero() {
        return Err(InvolutionError::NotIsotropic(xx));
    }
    if !lattice::is_primitive(x)? {
        return Err(InvolutionError::NotPrimitive);
    }
    if !inv.in_minus(x) {
        return Ok(RealityVerdict::NotReal);
    }
    Ok(match delta(inv, x)? {
        Delta::Zero => RealityVerdict::RealWithRealFibers,
        Delta::W2 => RealityVerdict::RealWithConjugateFibers,
    })
}

/// Lattice-level surrogate for the special/nonspecial dichotomy: a pencil
/// plus a node when `y2 − y1` is one of the supplied nodal classes.
pub fn u_pair_case(
    l: &Lattice,
    y1: &LatticeVector,
    y2: &LatticeVector,
    roots: &[LatticeVector],
) -> Result<UPairCase, InvolutionError> {
    check_standard_pair(l, y1, y2)?;
    let diff = y2.sub(y1);
    Ok(if roots.contains(&diff) {
        UPairCase::PencilPlusNode
    } else {
        UPairCase::PairOfPencils
    })
}

/// Matrix of the reflection `x ↦ x + (x·r) r`.
pub fn reflection_matrix(l: &Lattice, r: &LatticeVector) -> IntMatrix {
    let n = l.rank();
    let gr = matrix::mul_vec(l.gram(), &r.coords);
    let mut m = matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m[i][j] += &r.coords[i] * &gr[j];
        }
    }
    m
}

/// Solutions of `A x ≡ 0 (mod 2)` as a basis of bit vectors.
pub fn nullspace_mod2(a: &IntMatrix, n: usize) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<u8>> = a
        .iter()
        .map(|r| r.iter().map(|x| u8::from(x.is_odd())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] == 1 {
                let src = rows[r].clone();
                for (x, s) in rows[i].iter_mut().zip(src) {
                    *x ^= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; n];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = rows[i][f];
            }
            v
        })
        .collect()
}

/// All `eps` compatible with `m`, as a basis of the solution space of
/// `(I + m)ᵀ eps ≡ 0 (mod 2)`.
pub fn compatible_eps_basis(m: &IntMatrix) -> Vec<Vec<u8>> {
    let n = m.len();
    let a = matrix::transpose(&matrix::add(&matrix::identity(n), m));
    nullspace_mod2(&a, n)
}

/// An involution of the empty-surface type together with a standard pair
/// and an orthogonal D4 frame inside `L⁻`.
#[derive(Clone, Debug)]
pub struct EmptyTypeFrame {
    pub involution: ExtendedInvolution,
    pub u1: LatticeVector,
    pub u2: LatticeVector,
    pub d4: [LatticeVector; 4],
}

impl EmptyTypeFrame {
    pub fn frame_vectors(&self) -> Vec<LatticeVector> {
        let mut v = vec![self.u1.clone(), self.u2.clone()];
        v.extend(self.d4.iter().cloned());
        v
    }
}

/// The model involution on `E8 ⊕ U`: the product of reflections in four
/// orthogonal roots of E8 whose half-sum is integral (so they saturate to a
/// D4), extended by −1 on U. Its eigenlattices are `L⁺ ≅ D4`, `L⁻ ≅ D4 ⊕ U`.
pub fn model_frame() -> EmptyTypeFrame {
    let l = Lattice::enriques();
    let e8 = Lattice::e8_negative();
    let roots: Vec<LatticeVector> = lattice::short_vectors(&e8.negated(), &BigInt::from(2))
        .expect("E8 is definite")
        .into_iter()
        .filter(|v| !v.is_zero())
        .collect();
    let quad = orthogonal_quadruple(&e8, &roots).expect("E8 contains a D4 frame of orthogonal roots");
    let lift = |v: &LatticeVector| {
        let mut c = v.coords.clone();
        c.extend([BigInt::zero(), BigInt::zero()]);
        LatticeVector::new(c)
    };
    let r: Vec<LatticeVector> = quad.iter().map(lift).collect();
    let mut m = matrix::identity(10);
    for root in &r {
        m = matrix::mul(&reflection_matrix(&l, root), &m);
    }
    m[8][8] = -BigInt::one();
    m[9][9] = -BigInt::one();
    let sum = r.iter().fold(LatticeVector::zero(10), |a, b| a.add(b));
    let e4 = LatticeVector::new(sum.coords.iter().map(|x: &BigInt| -(x / BigInt::from(2))).collect::<Vec<BigInt>>());
    let frame = EmptyTypeFrame {
        involution: ExtendedInvolution::new(l, m, vec![0; 10]).expect("reflection product is an involution"),
        u1: LatticeVector::basis(10, 8),
        u2: LatticeVector::basis(10, 9),
        d4: [r[0].clone(), r[1].clone(), r[2].clone(), e4],
    };
    debug_assert!(is_d4_frame(frame.involution.lattice(), &frame.d4));
    frame
}

fn orthogonal_quadruple(e8: &Lattice, roots: &[LatticeVector]) -> Option<[LatticeVector; 4]> {
    let orth = |a: &LatticeVector, b: &LatticeVector| e8.product(a, b).is_zero();
    let r1 = &roots[0];
    for (i, r2) in roots.iter().enumerate().filter(|(_, r)| orth(r1, r)) {
        for (j, r3) in roots.iter().enumerate().skip(i + 1).filter(|(_, r)| orth(r1, r) && orth(r2, r)) {
            for r4 in roots.iter().skip(j + 1).filter(|r| orth(r1, r) && orth(r2, r) && orth(r3, r)) {
                let s = r1.add(r2).add(r3).add(r4);
                if s.coords.iter().all(|x| x.is_even()) {
                    return Some([r1.clone(), r2.clone(), r3.clone(), r4.clone()]);
                }
            }
        }
    }
    None
}

/// A random root of `E8 ⊕ U` of the form `w + a x1 + b x2` with `w ∈ E8`.
fn random_root<R: Rng>(rng: &mut R, e8_short: &[LatticeVector], e8: &Lattice) -> LatticeVector {
    loop {
        let w = e8_short.choose(rng).expect("nonempty pool");
        let ww = e8.square(w).to_i64().unwrap();
        // w² + 2ab = −2
        let (a, b): (i64, i64) = match ww {
            0 => {
                if rng.gen_bool(0.5) {
                    (1, -1)
                } else {
                    (-1, 1)
                }
            }
            -2 => {
                let k = rng.gen_range(-2..=2);
                if rng.gen_bool(0.5) {
                    (0, k)
                } else {
                    (k, 0)
                }
            }
            -4 => {
                if rng.gen_bool(0.5) {
                    (1, 1)
                } else {
                    (-1, -1)
                }
            }
            _ => continue,
        };
        let mut c = w.coords.clone();
        c.push(BigInt::from(a));
        c.push(BigInt::from(b));
        return LatticeVector::new(c);
    }
}

/// Random isometry of `E8 ⊕ U` as a word of `len` root reflections, with its inverse.
pub fn random_isometry<R: Rng>(rng: &mut R, len: usize) -> (IntMatrix, IntMatrix) {
    let l = Lattice::enriques();
    let e8 = Lattice::e8_negative();
    static POOL: OnceLock<Vec<LatticeVector>> = OnceLock::new();
    let pool = POOL.get_or_init(|| lattice::short_vectors(&e8.negated(), &BigInt::from(4)).expect("E8 is definite"));
    let mut g = matrix::identity(10);
    let mut g_inv = matrix::identity(10);
    for _ in 0..len {
        let r = random_root(rng, pool, &e8);
        let s = reflection_matrix(&l, &r);
        g = matrix::mul(&s, &g);
        g_inv = matrix::mul(&g_inv, &s);
    }
    (g, g_inv)
}

/// A random conjugate of [`model_frame`] with a random compatible `eps` that
/// does not vanish on the frame.
pub fn random_frame<R: Rng>(rng: &mut R) -> EmptyTypeFrame {
    let base = model_frame();
    let len = rng.gen_range(3..=8);
    let (g, g_inv) = random_isometry(rng, len);
    let inv = base.involution.conjugate(&g, &g_inv).expect("conjugate of an involution");
    let apply = |v: &LatticeVector| LatticeVector::new(matrix::mul_vec(&g, &v.coords));
    let mut frame = EmptyTypeFrame {
        u1: apply(&base.u1),
        u2: apply(&base.u2),
        d4: [apply(&base.d4[0]), apply(&base.d4[1]), apply(&base.d4[2]), apply(&base.d4[3])],
        involution: inv,
    };
    let eps_basis = compatible_eps_basis(frame.involution.matrix());
    let vectors = frame.frame_vectors();
    loop {
        let mut eps = vec![0u8; 10];
        for b in &eps_basis {
            if rng.gen_bool(0.5) {
                for (e, x) in eps.iter_mut().zip(b) {
                    *e ^= x;
                }
            }
        }
        let candidate = frame.involution.with_eps(eps).expect("eps from the compatible space");
        if vectors.iter().any(|v| candidate.eps_of(v)) {
            frame.involution = candidate;
            return frame;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn minus_identity() -> IntMatrix {
        matrix::neg(&matrix::identity(10))
    }

    fn x1() -> LatticeVector {
        LatticeVector::basis(10, 8)
    }

    fn x2() -> LatticeVector {
        LatticeVector::basis(10, 9)
    }

    #[test]
    fn make_involution_examples() {
        let inv = make_involution(minus_identity(), vec![0; 10]).unwrap();
        assert_eq!(eigenlattice(&inv, -1).len(), 10);
        assert!(eigenlattice(&inv, 1).is_empty());

        let id = make_involution(matrix::identity(10), vec![1, 0, 1, 0, 1, 1, 0, 0, 1, 1]).unwrap();
        assert!(eigenlattice(&id, -1).is_empty());

        let mut eps = vec![0; 10];
        eps[8] = 1;
        let inv = make_involution(minus_identity(), eps).unwrap();
        assert_eq!(delta(&inv, &x1()).unwrap(), Delta::W2);
        assert_eq!(delta(&inv, &x2()).unwrap(), Delta::Zero);
    }

    #[test]
    fn make_involution_rejections() {
        let mut m = matrix::identity(10);
        m[0][1] = BigInt::one();
        assert_eq!(make_involution(m, vec![0; 10]), Err(InvolutionError::NotInvolutive));

        // swapping x1 with an E8 basis vector is involutive but not an isometry
        let mut m = matrix::identity(10);
        m.swap(0, 8);
        assert_eq!(make_involution(m, vec![0; 10]), Err(InvolutionError::NotIsometry));

        // reflection in the root x1 - x2 fixes L⁺ ⊃ x1 + x2; eps(x1+x2) must be even
        let l = Lattice::enriques();
        let r = x1().sub(&x2());
        let s = reflection_matrix(&l, &r);
        let mut eps = vec![0; 10];
        eps[8] = 1;
        assert_eq!(make_involution(s, eps), Err(InvolutionError::EpsIncompatible));
        assert!(matches!(
            make_involution(matrix::identity(3), vec![0; 3]),
            Err(InvolutionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn delta_requires_minus_vector() {
        let inv = make_involution(matrix::identity(10), vec![0; 10]).unwrap();
        assert_eq!(delta(&inv, &x1()), Err(InvolutionError::YNotInMinusEigenlattice));
    }

    #[test]
    fn delta_spot_value() {
        let mut eps = vec![0; 10];
        eps[0] = 1;
        let inv = make_involution(minus_identity(), eps).unwrap();
        let y = LatticeVector::from_i64(&[1, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(delta(&inv, &y).unwrap(), Delta::W2);
    }

    #[test]
    fn plane_types() {
        let inv = make_involution(minus_identity(), vec![0; 10]).unwrap();
        assert_eq!(classify_plane(&inv, &x1(), &x2()).unwrap(), PlaneType::I00);

        let mut eps = vec![0; 10];
        eps[9] = 1;
        let inv = make_involution(minus_identity(), eps).unwrap();
        assert_eq!(classify_plane(&inv, &x1(), &x2()).unwrap(), PlaneType::I0w2);

        // −I on E8, transposition on U (with sign), as for indecomposable actions
        let mut m = minus_identity();
        m[8][8] = BigInt::zero();
        m[9][9] = BigInt::zero();
        m[8][9] = -BigInt::one();
        m[9][8] = -BigInt::one();
        let inv = make_involution(m.clone(), vec![0; 10]).unwrap();
        assert_eq!(classify_plane(&inv, &x1(), &x2()).unwrap(), PlaneType::II);
        m[8][9] = BigInt::one();
        m[9][8] = BigInt::one();
        let inv = make_involution(m, vec![0; 10]).unwrap();
        assert_eq!(classify_plane(&inv, &x1(), &x2()).unwrap(), PlaneType::II);

        let id = make_involution(matrix::identity(10), vec![0; 10]).unwrap();
        assert_eq!(classify_plane(&id, &x1(), &x2()), Err(InvolutionError::NeitherType));
        assert!(matches!(
            classify_plane(&id, &x1(), &x1()),
            Err(InvolutionError::NotStandardPair { .. })
        ));
    }

    #[test]
    fn model_frame_eigenlattices() {
        let frame = model_frame();
        let inv = &frame.involution;
        let plus = eigenlattice(inv, 1);
        let minus = eigenlattice(inv, -1);
        assert_eq!((plus.len(), minus.len()), (4, 6));
        let lp = inv.lattice().restrict(&plus);
        assert!(lattice::isometry_search(&lp, &Lattice::d4_negative()).unwrap().is_some());
        for p in &plus {
            for q in &minus {
                assert!(inv.lattice().product(p, q).is_zero());
            }
        }
        for v in frame.frame_vectors() {
            assert!(inv.in_minus(&v));
        }
        // some compatible eps is nonzero on L⁻
        let basis = compatible_eps_basis(inv.matrix());
        assert!(basis.iter().any(|b| {
            let e = inv.with_eps(b.clone()).unwrap();
            minus.iter().any(|v| e.eps_of(v))
        }));
    }

    #[test]
    fn find_plane_cases() {
        let frame = model_frame();
        let l = frame.involution.lattice().clone();
        let (u1, u2, d4) = (&frame.u1, &frame.u2, &frame.d4);
        let basis = compatible_eps_basis(frame.involution.matrix());
        let mut seen = std::collections::HashSet::new();
        // walk the whole compatible eps space
        for mask in 0u32..(1 << basis.len()) {
            let mut eps = vec![0u8; 10];
            for (k, b) in basis.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    for (e, x) in eps.iter_mut().zip(b) {
                        *e ^= x;
                    }
                }
            }
            let inv = frame.involution.with_eps(eps).unwrap();
            let key = (delta(&inv, u1).unwrap(), delta(&inv, u2).unwrap());
            match find_plane_i0w2(&inv, u1, u2, d4) {
                Ok((a, b)) => {
                    assert_eq!(classify_plane(&inv, &a, &b).unwrap(), PlaneType::I0w2);
                    assert!(l.square(&a).is_zero() && l.square(&b).is_zero());
                    seen.insert(key);
                }
                Err(InvolutionError::NoPlaneInSearchedFamily) => {
                    assert_eq!(key, (Delta::Zero, Delta::Zero));
                    assert!(frame.frame_vectors().iter().all(|v| !inv.eps_of(v)));
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(seen.contains(&(Delta::W2, Delta::W2)));
        assert!(seen.contains(&(Delta::Zero, Delta::Zero)));
    }

    #[test]
    fn isotropic_search() {
        let inv = make_involution(minus_identity(), vec![0; 10]).unwrap();
        match find_primitive_isotropic(&inv, 3).unwrap() {
            IsotropicSearch::Found(x) => {
                assert!(inv.lattice().square(&x).is_zero());
                assert!(lattice::is_primitive(&x).unwrap());
            }
            other => panic!("{other:?}"),
        }
        // L⁻ = E8 (m = −1 on E8, +1 on U) is negative definite
        let mut m = minus_identity();
        m[8][8] = BigInt::one();
        m[9][9] = BigInt::one();
        let inv = make_involution(m, vec![0; 10]).unwrap();
        assert_eq!(find_primitive_isotropic(&inv, 3).unwrap(), IsotropicSearch::Definite);
        let frame = model_frame();
        assert!(matches!(
            find_primitive_isotropic(&frame.involution, 1).unwrap(),
            IsotropicSearch::Found(_)
        ));
    }

    #[test]
    fn reflection_reduction_examples() {
        let l = lattice::direct_sum(&Lattice::hyperbolic_plane(), &Lattice::diagonal(&[-2]));
        let x = LatticeVector::from_i64(&[1, 1, 1]);
        let r = LatticeVector::from_i64(&[0, 0, 1]);
        let red = reduce_by_reflections(&l, &x, &[], DEFAULT_STEP_LIMIT).unwrap();
        assert_eq!((red.y, red.word), (x.clone(), vec![]));
        let red = reduce_by_reflections(&l, &x, &[r.clone()], DEFAULT_STEP_LIMIT).unwrap();
        assert_eq!(red.y, LatticeVector::from_i64(&[1, 1, -1]));
        assert_eq!(red.word, vec![0]);
        let red = reduce_by_reflections(&l, &red.y, &[r.clone()], DEFAULT_STEP_LIMIT).unwrap();
        assert!(red.word.is_empty());
        // ±r cannot both be satisfied
        let err = reduce_by_reflections(&l, &x, &[r.clone(), r.neg()], 50).unwrap_err();
        assert!(matches!(err, InvolutionError::StepLimitExceeded { limit: 50, .. }));
    }

    #[test]
    fn reality_verdicts() {
        let inv = make_involution(minus_identity(), vec![0; 10]).unwrap();
        assert_eq!(pencil_reality(&inv, &x1()).unwrap(), RealityVerdict::RealWithRealFibers);
        let id = make_involution(matrix::identity(10), vec![0; 10]).unwrap();
        assert_eq!(pencil_reality(&id, &x1()).unwrap(), RealityVerdict::NotReal);
        let mut eps = vec![0; 10];
        eps[8] = 1;
        let inv = make_involution(minus_identity(), eps).unwrap();
        assert_eq!(pencil_reality(&inv, &x1()).unwrap(), RealityVerdict::RealWithConjugateFibers);
        assert!(matches!(pencil_reality(&inv, &x1().add(&x2())), Err(InvolutionError::NotIsotropic(_))));
        assert_eq!(pencil_reality(&inv, &x1().scale(&BigInt::from(2))), Err(InvolutionError::NotPrimitive));
    }

    #[test]
    fn u_pair_cases() {
        let l = lattice::direct_sum(&Lattice::hyperbolic_plane(), &Lattice::diagonal(&[-2]));
        let y1 = LatticeVector::from_i64(&[1, 0, 0]);
        let y2 = LatticeVector::from_i64(&[0, 1, 0]);
        assert_eq!(u_pair_case(&l, &y1, &y2, &[]).unwrap(), UPairCase::PairOfPencils);
        let r = y2.sub(&y1);
        assert_eq!(u_pair_case(&l, &y1, &y2, &[r]).unwrap(), UPairCase::PencilPlusNode);
        // y2 − y1 has square −2 but is not a listed nodal class
        let other = LatticeVector::from_i64(&[0, 0, 1]);
        assert_eq!(u_pair_case(&l, &y1, &y2, &[other]).unwrap(), UPairCase::PairOfPencils);
    }

    #[test]
    fn random_frames_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let f = random_frame(&mut rng);
            let inv = &f.involution;
            assert_eq!(eigenlattice(inv, 1).len() + eigenlattice(inv, -1).len(), 10);
            assert!(is_d4_frame(inv.lattice(), &f.d4));
            assert!(f.frame_vectors().iter().all(|v| inv.in_minus(v)));
            assert!(f.frame_vectors().iter().any(|v| inv.eps_of(v)));
        }
    }

    #[test]
    fn json_shape() {
        let inv = make_involution(minus_identity(), vec![0; 10]).unwrap();
        let s = serde_json::to_string(&inv).unwrap();
        assert!(s.starts_with("{\"m\":[["));
        let back: ExtendedInvolution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inv);
        assert_eq!(serde_json::to_string(&PlaneType::I0w2).unwrap(), "\"I(0,w2)\"");
    }
}
