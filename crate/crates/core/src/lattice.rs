//! Finite-rank integral lattices given by an exact Gram matrix.
//!
//! Covers the handful of constructions needed for the Enriques lattice
//! `L = E8 ⊕ U` and its eigenlattices: standard lattices, direct sums,
//! inertia, discriminant groups and forms, complements, root reflections,
//! the maximal even sublattice of an odd lattice, and exhaustive isometry
//! search between definite lattices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use crate::matrix::{self, IntMatrix, IntVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("unknown standard lattice {0:?}")]
    UnknownName(String),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("rank {rank} does not match a {rows}x{cols} gram matrix")]
    RankMismatch { rank: usize, rows: usize, cols: usize },
    #[error("vector of length {got} used with a lattice of rank {rank}")]
    LengthMismatch { rank: usize, got: usize },
    #[error("lattice is degenerate (det = 0)")]
    Degenerate,
    #[error("lattice is odd; an even lattice is required")]
    Odd,
    #[error("lattice is indefinite; only definite lattices are supported here")]
    Indefinite,
    #[error("reflection vector has square {0}, expected -2")]
    NotARoot(BigInt),
    #[error("zero vector has no primitivity")]
    ZeroVector,
    #[error("discriminant group of order {0} is too large to tabulate")]
    GroupTooLarge(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct Lattice {
    gram: IntMatrix,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    rank: usize,
    #[serde(with = "json::int_mat")]
    gram: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawLattice> for Lattice {
    type Error = LatticeError;

    fn try_from(raw: RawLattice) -> Result<Self, Self::Error> {
        let rows = raw.gram.len();
        let cols = matrix::ncols(&raw.gram);
        if rows != raw.rank || (rows > 0 && cols != raw.rank) || raw.gram.iter().any(|r| r.len() != rows) {
            return Err(LatticeError::RankMismatch {
                rank: raw.rank,
                rows,
                cols,
            });
        }
        let l = Lattice::new(raw.gram)?;
        Ok(match raw.labels {
            Some(labels) => l.with_labels(labels),
            None => l,
        })
    }
}

impl From<Lattice> for RawLattice {
    fn from(l: Lattice) -> Self {
        RawLattice {
            rank: l.rank(),
            gram: l.gram,
            labels: l.labels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    #[serde(with = "json::int_vec")]
    pub coords: IntVector,
}

impl LatticeVector {
    pub fn new(coords: IntVector) -> Self {
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector::new(matrix::vec_from_i64(coords))
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector::new(vec![BigInt::zero(); rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = LatticeVector::zero(rank);
        v.coords[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeVector::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector::new(self.coords.iter().map(|a| a * k).collect())
    }

    /// Coefficient gcd; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        matrix::gcd_all(&self.coords)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    #[serde(with = "json::int_mat")]
    pub matrix: IntMatrix,
}

impl Isometry {
    pub fn identity(rank: usize) -> Self {
        Isometry {
            matrix: matrix::identity(rank),
        }
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector::new(matrix::mul_vec(&self.matrix, &v.coords))
    }

    /// `Mᵀ G_target M = G_source`, with |det M| = 1 when the ranks agree.
    pub fn is_isometry_between(&self, source: &Lattice, target: &Lattice) -> bool {
        self.matrix.len() == target.rank()
            && matrix::ncols(&self.matrix) == source.rank()
            && matrix::congruence(target.gram(), &self.matrix) == *source.gram()
            && (source.rank() != target.rank() || matrix::det(&self.matrix).abs().is_one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    /// `pos - neg`
    pub fn sigma(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.pos, self.neg, self.zero)
    }
}

/// Named lattices accepted by [`standard_lattice`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardName {
    U,
    E8Neg,
    D4Neg,
    /// `n` orthogonal copies of ⟨−2⟩.
    NA1(usize),
    Diag(Vec<i64>),
}

impl std::str::FromStr for StandardName {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "U" => return Ok(StandardName::U),
            "E8neg" => return Ok(StandardName::E8Neg),
            "D4neg" => return Ok(StandardName::D4Neg),
            _ => {}
        }
        if let Some(n) = t.strip_suffix("A1") {
            let n = if n.is_empty() { Ok(1) } else { n.parse::<usize>() };
            return n.map(StandardName::NA1).map_err(|_| LatticeError::UnknownName(s.into()));
        }
        if let Some(inner) = t.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
            let inner = inner.trim().trim_start_matches('[').trim_end_matches(']');
            if inner.trim().is_empty() {
                return Ok(StandardName::Diag(Vec::new()));
            }
            let entries: Result<Vec<i64>, _> = inner.split(',').map(|x| x.trim().parse::<i64>()).collect();
            return entries
                .map(StandardName::Diag)
                .map_err(|_| LatticeError::UnknownName(s.into()));
        }
        Err(LatticeError::UnknownName(s.into()))
    }
}

/// Negative E8 Gram matrix in the simple-root basis (Bourbaki numbering:
/// chain 1-3-4-5-6-7-8 with node 2 attached to node 4).
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

pub fn standard_lattice(name: &str) -> Result<Lattice, LatticeError> {
    Ok(match name.parse::<StandardName>()? {
        StandardName::U => Lattice::hyperbolic_plane(),
        StandardName::E8Neg => Lattice::e8_negative(),
        StandardName::D4Neg => Lattice::d4_negative(),
        StandardName::NA1(n) => Lattice::diagonal(&vec![-2; n]),
        StandardName::Diag(d) => Lattice::diagonal(&d),
    })
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::RankMismatch {
                rank: n,
                rows: n,
                cols: matrix::ncols(&gram),
            });
        }
        if !matrix::is_symmetric(&gram) {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(Lattice { gram, labels: None })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Lattice::new(matrix::from_i64(rows))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.rank() {
            self.labels = Some(labels);
        }
        self
    }

    pub fn empty() -> Self {
        Lattice {
            gram: Vec::new(),
            labels: None,
        }
    }

    pub fn hyperbolic_plane() -> Self {
        Lattice::from_i64(&[vec![0, 1], vec![1, 0]])
            .unwrap()
            .with_labels(vec!["x1".into(), "x2".into()])
    }

    pub fn e8_negative() -> Self {
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for &(a, b) in &E8_EDGES {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        Lattice::from_i64(&g).unwrap()
    }

    /// D4 with generators `e1..e4`: `eᵢ² = −2`, `eᵢeⱼ = 0` for `i<j≤3`, `eᵢe₄ = 1`.
    pub fn d4_negative() -> Self {
        Lattice::from_i64(&[
            vec![-2, 0, 0, 1],
            vec![0, -2, 0, 1],
            vec![0, 0, -2, 1],
            vec![1, 1, 1, -2],
        ])
        .unwrap()
        .with_labels(vec!["e1".into(), "e2".into(), "e3".into(), "e4".into()])
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut g = vec![vec![0i64; n]; n];
        for (i, &e) in entries.iter().enumerate() {
            g[i][i] = e;
        }
        Lattice::from_i64(&g).unwrap()
    }

    /// `E8neg ⊕ U`, with the U generators in positions 8 and 9.
    pub fn enriques() -> Self {
        direct_sum(&Lattice::e8_negative(), &Lattice::hyperbolic_plane())
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn check(&self, v: &LatticeVector) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::LengthMismatch {
                rank: self.rank(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn product(&self, x: &LatticeVector, y: &LatticeVector) -> BigInt {
        let gy = matrix::mul_vec(&self.gram, &y.coords);
        matrix::dot(&x.coords, &gy)
    }

    pub fn square(&self, x: &LatticeVector) -> BigInt {
        self.product(x, x)
    }

    pub fn det(&self) -> BigInt {
        matrix::det(&self.gram)
    }

    /// Gram matrix of the sublattice spanned by `basis`.
    pub fn restrict(&self, basis: &[LatticeVector]) -> Lattice {
        let b = matrix::columns(&basis.iter().map(|v| v.coords.clone()).collect::<Vec<_>>());
        if basis.is_empty() {
            return Lattice::empty();
        }
        Lattice::new(matrix::congruence(&self.gram, &b)).expect("congruent gram is symmetric")
    }

    pub fn negated(&self) -> Lattice {
        Lattice {
            gram: matrix::neg(&self.gram),
            labels: self.labels.clone(),
        }
    }
}

pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    let (n, m) = (a.rank(), b.rank());
    if m == 0 {
        return a.clone();
    }
    if n == 0 {
        return b.clone();
    }
    let mut g = matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            g[i][j] = a.gram[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            g[n + i][n + j] = b.gram[i][j].clone();
        }
    }
    let labels = match (&a.labels, &b.labels) {
        (Some(la), Some(lb)) => Some(la.iter().chain(lb).cloned().collect()),
        _ => None,
    };
    Lattice { gram: g, labels }
}

/// Exact inertia by symmetric pivoting over ℚ. A vanishing diagonal with a
/// nonzero off-diagonal entry is eliminated as a hyperbolic 2×2 block.
pub fn signature(l: &Lattice) -> Signature {
    let mut a = matrix::to_rational(&l.gram);
    let mut sig = Signature { pos: 0, neg: 0, zero: 0 };
    while !a.is_empty() {
        let n = a.len();
        if let Some(k) = (0..n).find(|&k| !a[k][k].is_zero()) {
            let pivot = a[k][k].clone();
            if pivot.is_positive() {
                sig.pos += 1;
            } else {
                sig.neg += 1;
            }
            let col: Vec<BigRational> = (0..n).map(|i| a[i][k].clone()).collect();
            let rest: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            a = rest
                .iter()
                .map(|&i| rest.iter().map(|&j| &a[i][j] - &col[i] * &col[j] / &pivot).collect())
                .collect();
            continue;
        }
        let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && !a[i][j].is_zero());
        let Some((i, j)) = off else {
            sig.zero += n;
            break;
        };
        // block [[0,b],[b,0]] has inertia (1,1); its inverse is [[0,1/b],[1/b,0]]
        sig.pos += 1;
        sig.neg += 1;
        let b = a[i][j].clone();
        let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
        a = rest
            .iter()
            .map(|&r| {
                rest.iter()
                    .map(|&c| &a[r][c] - (&a[r][i] * &a[j][c] + &a[r][j] * &a[i][c]) / &b)
                    .collect()
            })
            .collect();
    }
    sig
}

pub fn is_even(l: &Lattice) -> bool {
    (0..l.rank()).all(|i| l.gram[i][i].is_even())
}

pub fn is_unimodular(l: &Lattice) -> bool {
    l.det().abs().is_one()
}

/// Invariant factors `d₁ | d₂ | …` (all > 1) of `coker(gram)`.
pub fn discriminant_group(l: &Lattice) -> Result<Vec<BigInt>, LatticeError> {
    discriminant_smith(l).map(|(factors, _)| factors)
}

/// Invariant factors together with dual-lattice representatives of the
/// corresponding cyclic generators (coordinates in the lattice basis).
fn discriminant_smith(l: &Lattice) -> Result<(Vec<BigInt>, Vec<Vec<BigRational>>), LatticeError> {
    if l.rank() == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let snf = matrix::smith_normal_form(&l.gram);
    if snf.diagonal.iter().any(Zero::is_zero) {
        return Err(LatticeError::Degenerate);
    }
    // L* = V D^{-1} ℤⁿ with U G V = D; generator i is V e_i / d_i
    let mut factors = Vec::new();
    let mut gens = Vec::new();
    for (i, d) in snf.diagonal.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        factors.push(d.clone());
        gens.push(
            snf.right
                .iter()
                .map(|row| BigRational::new(row[i].clone(), d.clone()))
                .collect(),
        );
    }
    Ok((factors, gens))
}

/// Finite quadratic form on `L*/L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscriminantForm {
    #[serde(with = "json::int_vec")]
    pub invariant_factors: Vec<BigInt>,
    /// `q` of each group element (tuple of residues mod `dᵢ`), in `[0, 2)`.
    #[serde(serialize_with = "serialize_q_table")]
    pub q_values: BTreeMap<Vec<BigInt>, BigRational>,
    /// `b(gᵢ, gⱼ)` on the cyclic generators, in `[0, 1)`.
    #[serde(skip)]
    pub b_generators: Vec<Vec<BigRational>>,
}

fn serialize_q_table<S: serde::Serializer>(
    table: &BTreeMap<Vec<BigInt>, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(table.len()))?;
    for (k, v) in table {
        let key: Vec<String> = k.iter().map(ToString::to_string).collect();
        seq.serialize_element(&(key, json::format_rational(v)))?;
    }
    seq.end()
}

const MAX_TABULATED_ORDER: u64 = 1 << 16;

fn reduce_mod(q: &BigRational, m: &BigInt) -> BigRational {
    let m = BigRational::from_integer(m.clone());
    let k = (q / &m).floor();
    q - k * m
}

pub fn discriminant_form(l: &Lattice) -> Result<DiscriminantForm, LatticeError> {
    if !is_even(l) {
        return Err(LatticeError::Odd);
    }
    let (factors, gens) = discriminant_smith(l)?;
    let order: BigInt = factors.iter().product();
    if order > BigInt::from(MAX_TABULATED_ORDER) {
        return Err(LatticeError::GroupTooLarge(order));
    }
    let g = matrix::to_rational(&l.gram);
    let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..x.len() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..y.len() {
                s += &x[i] * &g[i][j] * &y[j];
            }
        }
        s
    };
    let two = BigInt::from(2);
    let one = BigInt::one();
    let k = gens.len();
    let b_generators: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..k).map(|j| reduce_mod(&pair(&gens[i], &gens[j]), &one)).collect())
        .collect();

    let mut q_values = BTreeMap::new();
    let mut idx = vec![BigInt::zero(); k];
    loop {
        let mut v = vec![BigRational::zero(); l.rank()];
        for (c, gen) in idx.iter().zip(&gens) {
            let c = BigRational::from_integer(c.clone());
            for (vi, gi) in v.iter_mut().zip(gen) {
                *vi += &c * gi;
            }
        }
        q_values.insert(idx.clone(), reduce_mod(&pair(&v, &v), &two));
        // odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(DiscriminantForm {
                    invariant_factors: factors,
                    q_values,
                    b_generators,
                });
            }
            idx[pos] += 1;
            if idx[pos] < factors[pos] {
                break;
            }
            idx[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

impl DiscriminantForm {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Number of cyclic factors (the minimal number of generators).
    pub fn dimension(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Vec<BigInt>> {
        self.q_values.keys()
    }

    pub fn normalize(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter()
            .zip(&self.invariant_factors)
            .map(|(a, d)| a.mod_floor(d))
            .collect()
    }

    pub fn q(&self, x: &[BigInt]) -> BigRational {
        self.q_values[&self.normalize(x)].clone()
    }

    pub fn b(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                s += BigRational::from_integer(xi * yj) * &self.b_generators[i][j];
            }
        }
        reduce_mod(&s, &BigInt::one())
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let s: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.normalize(&s)
    }

    /// Every value of `q` is an integer (mod 2).
    pub fn is_even(&self) -> bool {
        self.q_values.values().all(BigRational::is_integer)
    }
}

/// Saturated basis of `{x : x·v = 0 for all v in vs}`.
pub fn orthogonal_complement(vs: &[LatticeVector], l: &Lattice) -> Result<Vec<LatticeVector>, LatticeError> {
    for v in vs {
        l.check(v)?;
    }
    let rows: IntMatrix = vs.iter().map(|v| matrix::mul_vec(&l.gram, &v.coords)).collect();
    Ok(matrix::integer_kernel(&rows, l.rank())
        .into_iter()
        .map(LatticeVector::new)
        .collect())
}

/// `x + (x·r) r` for a root `r` (`r² = −2`).
pub fn reflect_root(l: &Lattice, r: &LatticeVector, x: &LatticeVector) -> Result<LatticeVector, LatticeError> {
    l.check(r)?;
    l.check(x)?;
    let rr = l.square(r);
    if rr != BigInt::from(-2) {
        return Err(LatticeError::NotARoot(rr));
    }
    Ok(x.add(&r.scale(&l.product(x, r))))
}

pub fn is_primitive(x: &LatticeVector) -> Result<bool, LatticeError> {
    if x.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(x.content().is_one())
}

/// The maximal even sublattice together with its embedding basis (one
/// vector per column of the embedding, given here as a list).
#[derive(Clone, Debug)]
pub struct EvenSublattice {
    pub lattice: Lattice,
    pub basis: Vec<LatticeVector>,
    pub index: BigInt,
}

/// Kernel of the parity functional `x ↦ x² mod 2 = Σ gᵢᵢ xᵢ mod 2`.
pub fn max_even_sublattice(l: &Lattice) -> EvenSublattice {
    let n = l.rank();
    let odd: Vec<usize> = (0..n).filter(|&i| l.gram[i][i].is_odd()).collect();
    let Some(&pivot) = odd.first() else {
        return EvenSublattice {
            lattice: l.clone(),
            basis: (0..n).map(|i| LatticeVector::basis(n, i)).collect(),
            index: BigInt::one(),
        };
    };
    let mut basis = Vec::with_capacity(n);
    for i in 0..n {
        if i == pivot {
            basis.push(LatticeVector::basis(n, i).scale(&BigInt::from(2)));
        } else if odd.contains(&i) {
            basis.push(LatticeVector::basis(n, i).add(&LatticeVector::basis(n, pivot)));
        } else {
            basis.push(LatticeVector::basis(n, i));
        }
    }
    EvenSublattice {
        lattice: l.restrict(&basis),
        basis,
        index: BigInt::from(2),
    }
}

fn definite_sign(l: &Lattice) -> Option<i8> {
    let s = signature(l);
    if s.pos == l.rank() {
        Some(1)
    } else if s.neg == l.rank() {
        Some(-1)
    } else {
        None
    }
}

/// All vectors `x` of a positive definite lattice with `x² ≤ bound`
/// (Fincke–Pohst enumeration with exact rational bounds).
pub fn short_vectors(l: &Lattice, bound: &BigInt) -> Result<Vec<LatticeVector>, LatticeError> {
    let n = l.rank();
    if n == 0 {
        return Ok(vec![LatticeVector::zero(0)]);
    }
    if definite_sign(l) != Some(1) {
        return Err(LatticeError::Indefinite);
    }
    // x^T G x = Σ dᵢ (xᵢ + Σ_{j>i} uᵢⱼ xⱼ)²
    let mut a = matrix::to_rational(&l.gram);
    let mut d = vec![BigRational::zero(); n];
    let mut u = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        d[i] = a[i][i].clone();
        for j in i + 1..n {
            u[i][j] = &a[i][j] / &d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let t = &a[i][j] * &a[i][k] / &d[i];
                a[j][k] -= t;
            }
        }
    }
    let bound = BigRational::from_integer(bound.clone());
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fincke_pohst(n - 1, &d, &u, &bound, &mut x, &mut out);
    Ok(out.into_iter().map(LatticeVector::new).collect())
}

fn fincke_pohst(
    i: usize,
    d: &[BigRational],
    u: &[Vec<BigRational>],
    budget: &BigRational,
    x: &mut Vec<BigInt>,
    out: &mut Vec<IntVector>,
) {
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center += &u[i][j] * BigRational::from_integer(x[j].clone());
    }
    let cost = |k: &BigInt| -> BigRational {
        let t = BigRational::from_integer(k.clone()) + &center;
        &d[i] * &t * &t
    };
    let start: BigInt = (-center.clone()).floor().to_integer();
    let visit = |k: BigInt, x: &mut Vec<BigInt>, out: &mut Vec<IntVector>| {
        let c = cost(&k);
        if &c > budget {
            return false;
        }
        x[i] = k;
        if i == 0 {
            out.push(x.clone());
        } else {
            let rest = budget - c;
            fincke_pohst(i - 1, d, u, &rest, x, out);
        }
        true
    };
    let mut k = start.clone();
    while visit(k.clone(), x, out) {
        k -= 1;
    }
    let mut k: BigInt = start + 1u32;
    while visit(k.clone(), x, out) {
        k += 1;
    }
    x[i] = BigInt::zero();
}

/// Exhaustive isometry search between definite lattices of equal rank.
/// Returns a matrix `M` (columns = images of the basis of `a` in `b`) with
/// `Mᵀ G_b M = G_a`, or `None` when no isometry exists.
pub fn isometry_search(a: &Lattice, b: &Lattice) -> Result<Option<Isometry>, LatticeError> {
    let n = a.rank();
    if b.rank() != n {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(Isometry::identity(0)));
    }
    let sa = definite_sign(a).ok_or(LatticeError::Indefinite)?;
    let sb = definite_sign(b).ok_or(LatticeError::Indefinite)?;
    if sa != sb || a.det() != b.det() {
        return Ok(None);
    }
    let (pa, pb) = if sa < 0 { (a.negated(), b.negated()) } else { (a.clone(), b.clone()) };

    let max_norm = (0..n).map(|i| pa.gram[i][i].clone()).max().unwrap();
    let pool = short_vectors(&pb, &max_norm)?;
    let candidates: Vec<Vec<&LatticeVector>> = (0..n)
        .map(|i| pool.iter().filter(|v| pb.square(v) == pa.gram[i][i]).collect())
        .collect();
    let mut chosen: Vec<LatticeVector> = Vec::with_capacity(n);
    if backtrack(&pa, &pb, &candidates, &mut chosen) {
        let cols: Vec<IntVector> = chosen.into_iter().map(|v| v.coords).collect();
        let m = Isometry {
            matrix: matrix::columns(&cols),
        };
        debug_assert!(m.is_isometry_between(a, b));
        return Ok(Some(m));
    }
    Ok(None)
}

fn backtrack(a: &Lattice, b: &Lattice, candidates: &[Vec<&LatticeVector>], chosen: &mut Vec<LatticeVector>) -> bool {
    let i = chosen.len();
    if i == candidates.len() {
        return true;
    }
    for v in &candidates[i] {
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(j, w)| b.product(v, w) == a.gram[i][j]);
        if !ok {
            continue;
        }
        chosen.push((*v).clone());
        if backtrack(a, b, candidates, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Sorted multiset of `|x²|` over the minimal nonzero vectors, together with
/// their count; an isometry invariant used to explain negative search results.
pub fn minimal_norm_profile(l: &Lattice) -> Result<(BigInt, usize), LatticeError> {
    let sign = definite_sign(l).ok_or(LatticeError::Indefinite)?;
    let p = if sign < 0 { l.negated() } else { l.clone() };
    let max_diag = (0..p.rank()).map(|i| p.gram[i][i].clone()).max().unwrap_or_else(BigInt::zero);
    let vs = short_vectors(&p, &max_diag)?;
    let norms: Vec<BigInt> = vs.iter().filter(|v| !v.is_zero()).map(|v| p.square(v)).collect();
    let min = norms.iter().min().cloned().unwrap_or_else(BigInt::zero);
    let count = norms.iter().filter(|&x| *x == min).count();
    Ok((min, count))
}

/// Convenience for tests and reports.
pub fn signature_mod8(l: &Lattice) -> i64 {
    signature(l).sigma().rem_euclid(8)
}

pub fn to_i64_matrix(m: &IntMatrix) -> Option<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn standard_grams() {
        assert_eq!(standard_lattice("U").unwrap().gram(), &matrix::from_i64(&[vec![0, 1], vec![1, 0]]));
        let d4 = standard_lattice("D4neg").unwrap();
        assert_eq!(
            d4.gram(),
            &matrix::from_i64(&[
                vec![-2, 0, 0, 1],
                vec![0, -2, 0, 1],
                vec![0, 0, -2, 1],
                vec![1, 1, 1, -2]
            ])
        );
        let four = standard_lattice("diag(-1,-1,-1,-1)").unwrap();
        assert_eq!(four, Lattice::diagonal(&[-1, -1, -1, -1]));
        assert_eq!(standard_lattice("3A1").unwrap(), Lattice::diagonal(&[-2, -2, -2]));
        assert!(matches!(standard_lattice("F4"), Err(LatticeError::UnknownName(_))));
    }

    #[test]
    fn direct_sum_ranks() {
        let u = Lattice::hyperbolic_plane();
        assert_eq!(direct_sum(&u, &Lattice::e8_negative()).rank(), 10);
        assert_eq!(direct_sum(&Lattice::d4_negative(), &u).rank(), 6);
        assert_eq!(direct_sum(&u, &Lattice::empty()), u);
    }

    #[test]
    fn signatures() {
        let u = Lattice::hyperbolic_plane();
        assert_eq!(signature(&u), Signature { pos: 1, neg: 1, zero: 0 });
        let e8 = Lattice::e8_negative();
        assert_eq!(signature(&e8), Signature { pos: 0, neg: 8, zero: 0 });
        assert_eq!(signature_mod8(&e8), 0);
        assert_eq!(signature(&Lattice::d4_negative()).sigma(), -4);
        let degenerate = Lattice::from_i64(&[vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(signature(&degenerate), Signature { pos: 1, neg: 0, zero: 1 });
        // zero diagonal in the middle of a larger form
        let mixed = Lattice::from_i64(&[vec![0, 2, 1], vec![2, 0, 0], vec![1, 0, -3]]).unwrap();
        let s = signature(&mixed);
        assert_eq!(s.pos + s.neg + s.zero, 3);
        assert_eq!(s, Signature { pos: 1, neg: 2, zero: 0 });
    }

    #[test]
    fn parity() {
        assert!(is_even(&Lattice::hyperbolic_plane()));
        assert!(!is_even(&Lattice::diagonal(&[-1, -1, -1, -1])));
        assert!(is_even(&Lattice::d4_negative()));
    }

    #[test]
    fn discriminant_groups() {
        assert!(discriminant_group(&Lattice::hyperbolic_plane()).unwrap().is_empty());
        assert_eq!(
            discriminant_group(&Lattice::d4_negative()).unwrap(),
            vec![BigInt::from(2), BigInt::from(2)]
        );
        assert!(discriminant_group(&Lattice::enriques()).unwrap().is_empty());
        let deg = Lattice::from_i64(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(discriminant_group(&deg), Err(LatticeError::Degenerate));
    }

    #[test]
    fn discriminant_form_of_a1() {
        let a1 = Lattice::diagonal(&[-2]);
        let f = discriminant_form(&a1).unwrap();
        assert_eq!(f.invariant_factors, vec![BigInt::from(2)]);
        assert_eq!(f.q(&[BigInt::one()]), r(3, 2)); // -1/2 mod 2
        assert!(!f.is_even());
        assert_eq!(discriminant_form(&Lattice::diagonal(&[-1])), Err(LatticeError::Odd));
    }

    #[test]
    fn discriminant_form_of_d4() {
        let f = discriminant_form(&Lattice::d4_negative()).unwrap();
        assert_eq!(f.order(), BigInt::from(4));
        assert!(f.is_even());
        for (k, q) in &f.q_values {
            if k.iter().all(Zero::is_zero) {
                assert!(q.is_zero());
            } else {
                assert_eq!(*q, r(1, 1));
            }
        }
        let u = discriminant_form(&Lattice::hyperbolic_plane()).unwrap();
        assert_eq!(u.order(), BigInt::one());
        assert!(u.is_even());
    }

    #[test]
    fn complements() {
        let u = Lattice::hyperbolic_plane();
        let c = orthogonal_complement(&[v(&[1, 0])], &u).unwrap();
        assert_eq!(c, vec![v(&[1, 0])]);
        assert_eq!(orthogonal_complement(&[], &u).unwrap().len(), 2);
        let l = direct_sum(&Lattice::d4_negative(), &u);
        let d4: Vec<_> = (0..4).map(|i| LatticeVector::basis(6, i)).collect();
        let c = orthogonal_complement(&d4, &l).unwrap();
        assert_eq!(c, vec![v(&[0, 0, 0, 0, 1, 0]), v(&[0, 0, 0, 0, 0, 1])]);
    }

    #[test]
    fn reflections() {
        let l = direct_sum(&Lattice::hyperbolic_plane(), &Lattice::diagonal(&[-2]));
        let root = v(&[0, 0, 1]);
        assert_eq!(reflect_root(&l, &root, &root).unwrap(), root.neg());
        assert_eq!(reflect_root(&l, &root, &v(&[1, 0, 0])).unwrap(), v(&[1, 0, 0]));
        let x = v(&[1, 0, 1]);
        let y = reflect_root(&l, &root, &x).unwrap();
        assert_eq!(y, v(&[1, 0, -1]));
        assert_eq!(l.square(&y), l.square(&x));
        assert!(matches!(reflect_root(&l, &v(&[1, 0, 0]), &x), Err(LatticeError::NotARoot(_))));
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&v(&[1, 0, 0])).unwrap());
        assert!(!is_primitive(&v(&[2, 4])).unwrap());
        assert!(is_primitive(&v(&[2, 1])).unwrap());
        assert_eq!(is_primitive(&v(&[0, 0])), Err(LatticeError::ZeroVector));
    }

    #[test]
    fn even_sublattices() {
        let u = Lattice::hyperbolic_plane();
        assert_eq!(max_even_sublattice(&u).lattice, u);
        let four = Lattice::diagonal(&[-1, -1, -1, -1]);
        let e = max_even_sublattice(&four);
        assert_eq!(e.index, BigInt::from(2));
        assert!(is_even(&e.lattice));
        assert_eq!(e.lattice.det(), BigInt::from(4));
        let one = max_even_sublattice(&Lattice::diagonal(&[-1]));
        assert_eq!(one.lattice, Lattice::diagonal(&[-4]));
    }

    #[test]
    fn e8_has_240_roots() {
        let e8 = Lattice::e8_negative().negated();
        let vs = short_vectors(&e8, &BigInt::from(2)).unwrap();
        assert_eq!(vs.iter().filter(|x| !x.is_zero()).count(), 240);
    }

    #[test]
    fn isometries() {
        let d4 = Lattice::d4_negative();
        let id = isometry_search(&d4, &d4).unwrap().unwrap();
        assert!(id.is_isometry_between(&d4, &d4));
        let even = max_even_sublattice(&Lattice::diagonal(&[-1, -1, -1, -1])).lattice;
        let m = isometry_search(&even, &d4).unwrap().unwrap();
        assert!(m.is_isometry_between(&even, &d4));
        assert_eq!(isometry_search(&d4, &Lattice::diagonal(&[-2, -2, -2, -2])).unwrap(), None);
        // same determinant, different parity: the search runs to exhaustion
        let odd = Lattice::diagonal(&[-1, -1, -2, -2]);
        assert_eq!(isometry_search(&d4, &odd).unwrap(), None);
        assert_eq!(
            isometry_search(&Lattice::hyperbolic_plane(), &Lattice::hyperbolic_plane()),
            Err(LatticeError::Indefinite)
        );
    }

    #[test]
    fn json_round_trip() {
        let l = Lattice::d4_negative();
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"rank\":4"));
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"rank":2,"gram":[[0,1],[2,0]]}"#;
        assert!(serde_json::from_str::<Lattice>(bad).is_err());
        let bad_rank = r#"{"rank":3,"gram":[[0,1],[1,0]]}"#;
        assert!(serde_json::from_str::<Lattice>(bad_rank).is_err());
    }
}
