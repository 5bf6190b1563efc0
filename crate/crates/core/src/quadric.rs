//! (ℤ/2)²-actions on the quadric P¹×P¹ and on Σ₂.
//!
//! The holomorphic generator is always `s = (s₀, s₀)` with
//! `s₀(u:v) = (−u:v)`. A decomposable action is given by one
//! antiholomorphic involution per factor; an indecomposable one by a
//! factor-swapping map `(z₁, z₂) ↦ (G z̄₂, H z̄₁)` with `H ∝ conj(G)⁻¹`.
//! Actions are classified by their invariant tuple: topology of the two
//! real halves `Fix(c)`, `Fix(s∘c)` and the number of invariant fibers
//! of each ruling.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;

pub type GaussRat = Complex<BigRational>;
pub type Mat2 = [[GaussRat; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadricError {
    #[error("unknown involution name {0:?} (expected s, c_a, c_b or s_c_b)")]
    UnknownName(String),
    #[error("matrix is singular")]
    Singular,
    #[error("map is not an involution")]
    NotInvolution,
    #[error("not an action: {0}")]
    NotAnAction(String),
    #[error("Σ₂ data cannot be reduced: {0}")]
    NotReducible(String),
    #[error("bad number {0:?}")]
    BadNumber(String),
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn gq(re: i64, im: i64) -> GaussRat {
    Complex::new(q(re), q(im))
}

fn conj_mat(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn det2(m: &Mat2) -> GaussRat {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

fn adj2(m: &Mat2) -> Mat2 {
    [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]]
}

/// `λ` with `m = λ I`, if `m` is scalar.
fn scalar_of(m: &Mat2) -> Option<GaussRat> {
    (m[0][1].is_zero() && m[1][0].is_zero() && m[0][0] == m[1][1]).then(|| m[0][0].clone())
}

fn apply_vec(m: &Mat2, p: &[GaussRat; 2]) -> [GaussRat; 2] {
    [&m[0][0] * &p[0] + &m[0][1] * &p[1], &m[1][0] * &p[0] + &m[1][1] * &p[1]]
}

fn proportional(a: &[GaussRat; 2], b: &[GaussRat; 2]) -> bool {
    (&a[0] * &b[1] - &a[1] * &b[0]).is_zero()
}

fn s0() -> Mat2 {
    [[gq(-1, 0), gq(0, 0)], [gq(0, 0), gq(1, 0)]]
}

/// A point `(u:v)` of P¹, scaled so that the last nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint(pub [GaussRat; 2]);

impl ProjPoint {
    pub fn new(u: GaussRat, v: GaussRat) -> Self {
        if !v.is_zero() {
            ProjPoint([u / v.clone(), GaussRat::one()])
        } else {
            ProjPoint([GaussRat::one(), GaussRat::zero()])
        }
    }

    pub fn zero() -> Self {
        ProjPoint::new(GaussRat::zero(), GaussRat::one())
    }

    pub fn infinity() -> Self {
        ProjPoint::new(GaussRat::one(), GaussRat::zero())
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", fmt_gauss(&self.0[0]), fmt_gauss(&self.0[1]))
    }
}

pub fn fmt_gauss(z: &GaussRat) -> String {
    let re = json::format_rational(&z.re);
    if z.im.is_zero() {
        return re;
    }
    let im = json::format_rational(&z.im.abs());
    let sign = if z.im.is_negative() { '-' } else { '+' };
    if z.re.is_zero() {
        format!("{}{im}i", if sign == '-' { "-" } else { "" })
    } else {
        format!("{re}{sign}{im}i")
    }
}

/// Exact square root in ℚ(i), if it exists.
fn sqrt_gauss(z: &GaussRat) -> Option<GaussRat> {
    if z.is_zero() {
        return Some(GaussRat::zero());
    }
    let norm = sqrt_rat(&(&z.re * &z.re + &z.im * &z.im))?;
    let two = q(2);
    let x = sqrt_rat(&((&z.re + &norm) / &two))?;
    if !x.is_zero() {
        let y = &z.im / (&two * &x);
        return Some(Complex::new(x, y));
    }
    let y = sqrt_rat(&((&norm - &z.re) / &two))?;
    Some(Complex::new(x, y))
}

fn sqrt_rat(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedSet {
    /// Two fixed points with coordinates in ℚ(i).
    TwoPoints(Vec<ProjPoint>),
    /// Two fixed points not defined over ℚ(i): the roots of
    /// `a z² + b z + c` in the affine coordinate `z = u/v`.
    TwoPointsQuadratic([GaussRat; 3]),
    Circle,
    Empty,
    AllOfP1,
}

/// A holomorphic or antiholomorphic involution of P¹: `z ↦ M(z)` or `z ↦ M(z̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Involution {
    matrix: Mat2,
    anti: bool,
}

impl P1Involution {
    pub fn new(matrix: Mat2, anti: bool) -> Result<Self, QuadricError> {
        if det2(&matrix).is_zero() {
            return Err(QuadricError::Singular);
        }
        let sq = if anti {
            mul2(&matrix, &conj_mat(&matrix))
        } else {
            mul2(&matrix, &matrix)
        };
        if scalar_of(&sq).is_none() {
            return Err(QuadricError::NotInvolution);
        }
        Ok(P1Involution { matrix, anti })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn is_anti(&self) -> bool {
        self.anti
    }

    /// `λ` with `M·M = λI` or `M·M̄ = λI`.
    pub fn lambda(&self) -> GaussRat {
        let sq = if self.anti {
            mul2(&self.matrix, &conj_mat(&self.matrix))
        } else {
            mul2(&self.matrix, &self.matrix)
        };
        scalar_of(&sq).expect("validated on construction")
    }

    pub fn image(&self, p: &ProjPoint) -> ProjPoint {
        let src = if self.anti {
            [p.0[0].conj(), p.0[1].conj()]
        } else {
            p.0.clone()
        };
        let [u, v] = apply_vec(&self.matrix, &src);
        ProjPoint::new(u, v)
    }

    pub fn fixes(&self, p: &ProjPoint) -> bool {
        proportional(&self.image(p).0, &p.0)
    }

    /// `s₀ ∘ self`.
    pub fn after_s(&self) -> P1Involution {
        P1Involution {
            matrix: mul2(&s0(), &self.matrix),
            anti: self.anti,
        }
    }

    /// Whether the map commutes with `s₀`, i.e. the matrix is diagonal or antidiagonal.
    pub fn commutes_with_s(&self) -> bool {
        let m = &self.matrix;
        (m[0][1].is_zero() && m[1][0].is_zero()) || (m[0][0].is_zero() && m[1][1].is_zero())
    }
}

pub fn canonical_involution(name: &str) -> Result<P1Involution, QuadricError> {
    let (m, anti) = match name {
        "s" => ([[gq(-1, 0), gq(0, 0)], [gq(0, 0), gq(1, 0)]], false),
        "c_a" => ([[gq(1, 0), gq(0, 0)], [gq(0, 0), gq(1, 0)]], true),
        "c_b" => ([[gq(0, 0), gq(1, 0)], [gq(1, 0), gq(0, 0)]], true),
        "s_c_b" => ([[gq(0, 0), gq(-1, 0)], [gq(1, 0), gq(0, 0)]], true),
        other => return Err(QuadricError::UnknownName(other.to_string())),
    };
    P1Involution::new(m, anti)
}

pub fn fixed_set(f: &P1Involution) -> FixedSet {
    let m = &f.matrix;
    if f.anti {
        // M·M̄ = λI with λ real; rescaling M multiplies λ by |c|² > 0, and
        // the normal forms z̄ (λ > 0) and −1/z̄ (λ < 0) fix a circle resp. nothing
        return if f.lambda().re.is_positive() {
            FixedSet::Circle
        } else {
            FixedSet::Empty
        };
    }
    if scalar_of(m).is_some() {
        return FixedSet::AllOfP1;
    }
    // trace zero, eigenvalues ±μ with μ² = λ
    match sqrt_gauss(&f.lambda()) {
        Some(mu) => {
            let pts = [mu.clone(), -mu]
                .iter()
                .map(|e| {
                    // kernel of M − eI
                    let a = &m[0][0] - e;
                    let b = &m[0][1];
                    if !(a.is_zero() && b.is_zero()) {
                        ProjPoint::new(-b.clone(), a)
                    } else {
                        ProjPoint::new(&m[1][1] - e, -m[1][0].clone())
                    }
                })
                .collect();
            FixedSet::TwoPoints(pts)
        }
        None => FixedSet::TwoPointsQuadratic([m[1][0].clone(), &m[1][1] - &m[0][0], -m[0][1].clone()]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfTopology {
    Torus,
    Sphere,
    Empty,
}

impl fmt::Display for HalfTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfTopology::Torus => "S1xS1",
            HalfTopology::Sphere => "S2",
            HalfTopology::Empty => "empty",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberCount {
    Count(u8),
    Swapped,
}

impl fmt::Display for FiberCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberCount::Count(n) => write!(f, "{n}"),
            FiberCount::Swapped => f.write_str("swap"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surface {
    #[serde(rename = "P1xP1")]
    P1xP1,
    Sigma2,
}

/// Marked data of a Σ₂ action after blowing down to P¹×P¹: the image of
/// the exceptional section is the fiber over `fiber` of ruling `ruling`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sigma2Marking {
    pub ruling: u8,
    pub fiber: MarkedFiber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkedFiber {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "inf")]
    Infinity,
}

impl MarkedFiber {
    fn point(self) -> ProjPoint {
        match self {
            MarkedFiber::Zero => ProjPoint::zero(),
            MarkedFiber::Infinity => ProjPoint::infinity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Decomposable(P1Involution, P1Involution),
    /// `c(z₁, z₂) = (G z̄₂, H z̄₁)`; only `G` is stored.
    Indecomposable(Mat2),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricAction {
    kind: ActionKind,
    sigma2: Option<Sigma2Marking>,
}

impl QuadricAction {
    pub fn decomposable(f1: P1Involution, f2: P1Involution) -> Result<Self, QuadricError> {
        for (k, f) in [&f1, &f2].into_iter().enumerate() {
            if !f.anti {
                return Err(QuadricError::NotAnAction(format!("factor {} is holomorphic", k + 1)));
            }
            if !f.commutes_with_s() {
                return Err(QuadricError::NotAnAction(format!("factor {} does not commute with s", k + 1)));
            }
        }
        Ok(QuadricAction {
            kind: ActionKind::Decomposable(f1, f2),
            sigma2: None,
        })
    }

    pub fn indecomposable(g: Mat2) -> Result<Self, QuadricError> {
        if det2(&g).is_zero() {
            return Err(QuadricError::Singular);
        }
        let inv = P1Involution { matrix: g.clone(), anti: true };
        if !inv.commutes_with_s() {
            return Err(QuadricError::NotAnAction("swap matrix does not commute with s".into()));
        }
        Ok(QuadricAction {
            kind: ActionKind::Indecomposable(g),
            sigma2: None,
        })
    }

    /// The canonical indecomposable action `(z₁, z₂) ↦ (z̄₂, z̄₁)`.
    pub fn canonical_indecomposable() -> Self {
        Self::indecomposable([[gq(1, 0), gq(0, 0)], [gq(0, 0), gq(1, 0)]]).expect("identity")
    }

    pub fn from_names(a: &str, b: &str) -> Result<Self, QuadricError> {
        Self::decomposable(canonical_involution(a)?, canonical_involution(b)?)
    }

    pub fn on_sigma2(mut self, marking: Sigma2Marking) -> Self {
        self.sigma2 = Some(marking);
        self
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    pub fn surface(&self) -> Surface {
        if self.sigma2.is_some() {
            Surface::Sigma2
        } else {
            Surface::P1xP1
        }
    }

    /// The action with `c` replaced by `s∘c`.
    pub fn swap_halves(&self) -> Self {
        let kind = match &self.kind {
            ActionKind::Decomposable(a, b) => ActionKind::Decomposable(a.after_s(), b.after_s()),
            ActionKind::Indecomposable(g) => ActionKind::Indecomposable(mul2(&s0(), g)),
        };
        QuadricAction {
            kind,
            sigma2: self.sigma2,
        }
    }

    /// Conjugates by `(z₁, z₂) ↦ (k₁ z₁, k₂ z₂)` for nonzero Gaussian rationals `kᵢ`.
    pub fn conjugate_by_scaling(&self, k1: &GaussRat, k2: &GaussRat) -> Self {
        // φ ∘ c ∘ φ⁻¹ has matrix D_k · M · conj(D_k)⁻¹
        let d = |k: &GaussRat| [[k.clone(), GaussRat::zero()], [GaussRat::zero(), GaussRat::one()]];
        let dinv_conj = |k: &GaussRat| {
            [[GaussRat::one() / k.conj(), GaussRat::zero()], [GaussRat::zero(), GaussRat::one()]]
        };
        let kind = match &self.kind {
            ActionKind::Decomposable(a, b) => ActionKind::Decomposable(
                P1Involution {
                    matrix: mul2(&d(k1), &mul2(&a.matrix, &dinv_conj(k1))),
                    anti: true,
                },
                P1Involution {
                    matrix: mul2(&d(k2), &mul2(&b.matrix, &dinv_conj(k2))),
                    anti: true,
                },
            ),
            // first coordinate receives G z̄₂
            ActionKind::Indecomposable(g) => ActionKind::Indecomposable(mul2(&d(k1), &mul2(g, &dinv_conj(k2)))),
        };
        QuadricAction {
            kind,
            sigma2: self.sigma2,
        }
    }

    /// Conjugates by the factor swap `(z₁, z₂) ↦ (z₂, z₁)`.
    pub fn conjugate_by_swap(&self) -> Self {
        let kind = match &self.kind {
            ActionKind::Decomposable(a, b) => ActionKind::Decomposable(b.clone(), a.clone()),
            ActionKind::Indecomposable(g) => ActionKind::Indecomposable(adj2(&conj_mat(g))),
        };
        QuadricAction {
            kind,
            sigma2: self.sigma2.map(|m| Sigma2Marking {
                ruling: 3 - m.ruling,
                fiber: m.fiber,
            }),
        }
    }

    /// Applies `c` to a point of P¹×P¹.
    pub fn apply_c(&self, p: &(ProjPoint, ProjPoint)) -> (ProjPoint, ProjPoint) {
        match &self.kind {
            ActionKind::Decomposable(a, b) => (a.image(&p.0), b.image(&p.1)),
            ActionKind::Indecomposable(g) => {
                let h = adj2(&conj_mat(g));
                let gi = P1Involution { matrix: g.clone(), anti: true };
                let hi = P1Involution { matrix: h, anti: true };
                (gi.image(&p.1), hi.image(&p.0))
            }
        }
    }
}

pub fn half_topology(a: &QuadricAction, half: u8) -> HalfTopology {
    let a = if half == 2 { a.swap_halves() } else { a.clone() };
    match &a.kind {
        ActionKind::Decomposable(f1, f2) => match (fixed_set(f1), fixed_set(f2)) {
            (FixedSet::Circle, FixedSet::Circle) => HalfTopology::Torus,
            _ => HalfTopology::Empty,
        },
        // the fixed set is the graph {(G z̄₂, z₂)}, a copy of P¹
        ActionKind::Indecomposable(_) => HalfTopology::Sphere,
    }
}

/// Fibers of ruling `ruling` (the fibers of the projection to factor
/// `ruling`) through fixed points of `s` that are also `c`-invariant.
pub fn invariant_fibers(a: &QuadricAction, ruling: u8) -> FiberCount {
    match &a.kind {
        ActionKind::Decomposable(f1, f2) => {
            let f = if ruling == 1 { f1 } else { f2 };
            let n = [ProjPoint::zero(), ProjPoint::infinity()]
                .iter()
                .filter(|p| f.fixes(p))
                .count();
            FiberCount::Count(n as u8)
        }
        ActionKind::Indecomposable(_) => FiberCount::Swapped,
    }
}

/// Number of the four fixed points of `s` lying on `Fix(c)`.
pub fn s_real_fixed_points(a: &QuadricAction) -> usize {
    let pts = [ProjPoint::zero(), ProjPoint::infinity()];
    let mut n = 0;
    for p in &pts {
        for r in &pts {
            let pair = (p.clone(), r.clone());
            let img = a.apply_c(&pair);
            if proportional(&img.0 .0, &p.0) && proportional(&img.1 .0, &r.0) {
                n += 1;
            }
        }
    }
    n
}

/// Matrix of `c_*` on `H₂(P¹×P¹) = ℤ y₁ ⊕ ℤ y₂` (ruling classes).
/// An antiholomorphic map reverses the orientation of complex curves.
pub fn induced_h2_action(a: &QuadricAction) -> [[i64; 2]; 2] {
    match a.kind {
        ActionKind::Decomposable(..) => [[-1, 0], [0, -1]],
        ActionKind::Indecomposable(_) => [[0, -1], [-1, 0]],
    }
}

pub fn preserves_hyperbolic_form(m: &[[i64; 2]; 2]) -> bool {
    // Mᵀ U M with U = [[0,1],[1,0]]
    let u = [[0, 1], [1, 0]];
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[i][j] += m[k][i] * u[k][l] * m[l][j];
                }
            }
        }
    }
    out == u
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionReport {
    pub surface: Surface,
    pub type_id: u8,
    pub halves: [HalfTopology; 2],
    pub invariant_fibers: [FiberCount; 2],
    pub s_real_fixed_points: usize,
    pub h2_matrix: [[i64; 2]; 2],
}

/// One row of the reference table: unordered halves and fiber counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub type_id: u8,
    pub halves: [HalfTopology; 2],
    pub fibers: [FiberCount; 2],
    pub description: &'static str,
}

pub const ACTION_TABLE: [TableRow; 5] = [
    TableRow {
        type_id: 1,
        halves: [HalfTopology::Torus, HalfTopology::Torus],
        fibers: [FiberCount::Count(2), FiberCount::Count(2)],
        description: "c_a x c_a: each ruling has two invariant fibers",
    },
    TableRow {
        type_id: 2,
        halves: [HalfTopology::Torus, HalfTopology::Empty],
        fibers: [FiberCount::Count(2), FiberCount::Count(0)],
        description: "c_a x c_b: one ruling has two invariant fibers",
    },
    TableRow {
        type_id: 3,
        halves: [HalfTopology::Torus, HalfTopology::Empty],
        fibers: [FiberCount::Count(0), FiberCount::Count(0)],
        description: "c_b x c_b: no invariant fibers",
    },
    TableRow {
        type_id: 4,
        halves: [HalfTopology::Empty, HalfTopology::Empty],
        fibers: [FiberCount::Count(0), FiberCount::Count(0)],
        description: "c_b x s_c_b: no invariant fibers",
    },
    TableRow {
        type_id: 5,
        halves: [HalfTopology::Sphere, HalfTopology::Sphere],
        fibers: [FiberCount::Swapped, FiberCount::Swapped],
        description: "indecomposable (z1,z2) -> (conj z2, conj z1): rulings swapped",
    },
];

pub const SIGMA2_TABLE: [TableRow; 2] = [
    TableRow {
        type_id: 1,
        halves: [HalfTopology::Torus, HalfTopology::Torus],
        fibers: [FiberCount::Count(2), FiberCount::Count(2)],
        description: "two invariant generatrices",
    },
    TableRow {
        type_id: 2,
        halves: [HalfTopology::Torus, HalfTopology::Empty],
        fibers: [FiberCount::Count(0), FiberCount::Count(0)],
        description: "no invariant generatrices",
    },
];

fn sorted_fibers(f: [FiberCount; 2]) -> [FiberCount; 2] {
    let key = |c: &FiberCount| match c {
        FiberCount::Count(n) => *n as i16,
        FiberCount::Swapped => -1,
    };
    let mut v = f;
    v.sort_by_key(|c| -key(c));
    v
}

fn sorted_halves(h: [HalfTopology; 2]) -> [HalfTopology; 2] {
    let mut v = h;
    v.sort();
    v
}

fn lookup(table: &[TableRow], halves: [HalfTopology; 2], fibers: [FiberCount; 2]) -> Option<u8> {
    let (h, f) = (sorted_halves(halves), sorted_fibers(fibers));
    table
        .iter()
        .find(|r| sorted_halves(r.halves) == h && sorted_fibers(r.fibers) == f)
        .map(|r| r.type_id)
}

fn p1p1_report(a: &QuadricAction) -> Result<ActionReport, QuadricError> {
    let halves = [half_topology(a, 1), half_topology(a, 2)];
    let fibers = [invariant_fibers(a, 1), invariant_fibers(a, 2)];
    let type_id = lookup(&ACTION_TABLE, halves, fibers)
        .ok_or_else(|| QuadricError::NotAnAction(format!("invariants {halves:?} {fibers:?} match no row")))?;
    Ok(ActionReport {
        surface: Surface::P1xP1,
        type_id,
        halves,
        invariant_fibers: fibers,
        s_real_fixed_points: s_real_fixed_points(a),
        h2_matrix: induced_h2_action(a),
    })
}

pub fn classify_action(a: &QuadricAction) -> Result<ActionReport, QuadricError> {
    if a.sigma2.is_some() {
        return classify_sigma2_action(a);
    }
    p1p1_report(a)
}

/// Classifies an action on Σ₂ through its blown-down model: the marked
/// fiber (image of the exceptional section) must be an invariant fiber,
/// and the generatrices of Σ₂ become the fibers of the other ruling.
pub fn classify_sigma2_action(a: &QuadricAction) -> Result<ActionReport, QuadricError> {
    let marking = a
        .sigma2
        .ok_or_else(|| QuadricError::NotReducible("no marked section".into()))?;
    if !(1..=2).contains(&marking.ruling) {
        return Err(QuadricError::NotReducible(format!("ruling {} does not exist", marking.ruling)));
    }
    let (f1, f2) = match &a.kind {
        ActionKind::Decomposable(f1, f2) => (f1, f2),
        ActionKind::Indecomposable(_) => {
            return Err(QuadricError::NotReducible("the action exchanges the rulings".into()))
        }
    };
    let base = if marking.ruling == 1 { f1 } else { f2 };
    if !base.fixes(&marking.fiber.point()) {
        return Err(QuadricError::NotReducible("the marked fiber is not invariant".into()));
    }
    let plain = QuadricAction {
        kind: a.kind.clone(),
        sigma2: None,
    };
    let inner = p1p1_report(&plain)?;
    let generatrices = invariant_fibers(&plain, 3 - marking.ruling);
    let fibers = [generatrices, generatrices];
    let type_id = lookup(&SIGMA2_TABLE, inner.halves, fibers).ok_or_else(|| {
        QuadricError::NotReducible(format!(
            "reduced action of type {} has no Σ₂ counterpart",
            inner.type_id
        ))
    })?;
    Ok(ActionReport {
        surface: Surface::Sigma2,
        type_id,
        halves: inner.halves,
        invariant_fibers: fibers,
        s_real_fixed_points: inner.s_real_fixed_points,
        h2_matrix: inner.h2_matrix,
    })
}

/// The five canonical actions, in table order.
pub fn canonical_actions() -> Vec<QuadricAction> {
    vec![
        QuadricAction::from_names("c_a", "c_a").unwrap(),
        QuadricAction::from_names("c_a", "c_b").unwrap(),
        QuadricAction::from_names("c_b", "c_b").unwrap(),
        QuadricAction::from_names("c_b", "s_c_b").unwrap(),
        QuadricAction::canonical_indecomposable(),
    ]
}

/// The two canonical Σ₂ actions.
pub fn canonical_sigma2_actions() -> Vec<QuadricAction> {
    let m = Sigma2Marking {
        ruling: 1,
        fiber: MarkedFiber::Zero,
    };
    vec![
        QuadricAction::from_names("c_a", "c_a").unwrap().on_sigma2(m),
        QuadricAction::from_names("c_a", "c_b").unwrap().on_sigma2(m),
    ]
}

// JSON

#[derive(Serialize, Deserialize)]
struct RawP1 {
    matrix: Vec<[String; 2]>,
    anti: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawKind {
    Decomposable { f1: RawP1, f2: RawP1 },
    Indecomposable { matrix: Vec<[String; 2]> },
}

#[derive(Serialize, Deserialize)]
pub struct RawAction {
    #[serde(flatten)]
    kind: RawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surface: Option<Surface>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marking: Option<Sigma2Marking>,
}

fn mat_to_raw(m: &Mat2) -> Vec<[String; 2]> {
    m.iter()
        .flatten()
        .map(|z| [json::format_rational(&z.re), json::format_rational(&z.im)])
        .collect()
}

fn mat_from_raw(v: &[[String; 2]]) -> Result<Mat2, QuadricError> {
    if v.len() != 4 {
        return Err(QuadricError::BadNumber(format!("expected 4 entries, got {}", v.len())));
    }
    let e = |k: usize| -> Result<GaussRat, QuadricError> {
        let re = json::parse_rational(&v[k][0]).map_err(QuadricError::BadNumber)?;
        let im = json::parse_rational(&v[k][1]).map_err(QuadricError::BadNumber)?;
        Ok(Complex::new(re, im))
    };
    Ok([[e(0)?, e(1)?], [e(2)?, e(3)?]])
}

impl TryFrom<RawAction> for QuadricAction {
    type Error = QuadricError;

    fn try_from(raw: RawAction) -> Result<Self, QuadricError> {
        let action = match raw.kind {
            RawKind::Decomposable { f1, f2 } => QuadricAction::decomposable(
                P1Involution::new(mat_from_raw(&f1.matrix)?, f1.anti)?,
                P1Involution::new(mat_from_raw(&f2.matrix)?, f2.anti)?,
            )?,
            RawKind::Indecomposable { matrix } => QuadricAction::indecomposable(mat_from_raw(&matrix)?)?,
        };
        match (raw.surface, raw.marking) {
            (Some(Surface::Sigma2), Some(m)) => Ok(action.on_sigma2(m)),
            (Some(Surface::Sigma2), None) => Err(QuadricError::NotReducible("Σ₂ action without marking".into())),
            _ => Ok(action),
        }
    }
}

impl From<&QuadricAction> for RawAction {
    fn from(a: &QuadricAction) -> Self {
        let p1 = |f: &P1Involution| RawP1 {
            matrix: mat_to_raw(&f.matrix),
            anti: f.anti,
        };
        RawAction {
            kind: match &a.kind {
                ActionKind::Decomposable(f1, f2) => RawKind::Decomposable { f1: p1(f1), f2: p1(f2) },
                ActionKind::Indecomposable(g) => RawKind::Indecomposable { matrix: mat_to_raw(g) },
            },
            surface: a.sigma2.map(|_| Surface::Sigma2),
            marking: a.sigma2,
        }
    }
}

impl Serialize for QuadricAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawAction::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadricAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawAction::deserialize(d)?;
        QuadricAction::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_matrices() {
        let s = canonical_involution("s").unwrap();
        assert!(!s.is_anti());
        assert_eq!(s.matrix()[0][0], gq(-1, 0));
        let scb = canonical_involution("s_c_b").unwrap();
        assert_eq!(scb.matrix()[0][1], gq(-1, 0));
        assert_eq!(scb.matrix()[1][0], gq(1, 0));
        assert!(matches!(canonical_involution("t"), Err(QuadricError::UnknownName(_))));
    }

    #[test]
    fn fixed_sets() {
        let s = canonical_involution("s").unwrap();
        assert_eq!(
            fixed_set(&s),
            FixedSet::TwoPoints(vec![ProjPoint::zero(), ProjPoint::infinity()])
        );
        assert_eq!(fixed_set(&canonical_involution("c_a").unwrap()), FixedSet::Circle);
        assert_eq!(fixed_set(&canonical_involution("c_b").unwrap()), FixedSet::Circle);
        assert_eq!(fixed_set(&canonical_involution("s_c_b").unwrap()), FixedSet::Empty);
        // z ↦ 2/z has fixed points ±√2, not in ℚ(i)
        let m = [[gq(0, 0), gq(2, 0)], [gq(1, 0), gq(0, 0)]];
        assert!(matches!(
            fixed_set(&P1Involution::new(m, false).unwrap()),
            FixedSet::TwoPointsQuadratic(_)
        ));
        // z ↦ −1/z has fixed points ±i
        let m = [[gq(0, 0), gq(-1, 0)], [gq(1, 0), gq(0, 0)]];
        match fixed_set(&P1Involution::new(m.clone(), false).unwrap()) {
            FixedSet::TwoPoints(p) => {
                let inv = P1Involution::new(m, false).unwrap();
                assert!(p.iter().all(|x| inv.fixes(x)));
                assert_ne!(p[0], p[1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_involutions_rejected() {
        let m = [[gq(1, 0), gq(1, 0)], [gq(0, 0), gq(1, 0)]];
        assert_eq!(P1Involution::new(m, true), Err(QuadricError::NotInvolution));
        let z = [[gq(0, 0), gq(0, 0)], [gq(0, 0), gq(0, 0)]];
        assert_eq!(P1Involution::new(z, true), Err(QuadricError::Singular));
    }

    #[test]
    fn action_table() {
        let reports: Vec<ActionReport> = canonical_actions().iter().map(|a| classify_action(a).unwrap()).collect();
        for (r, row) in reports.iter().zip(ACTION_TABLE.iter()) {
            assert_eq!(r.type_id, row.type_id);
            assert_eq!(r.halves, row.halves);
        }
        assert_eq!(reports[1].invariant_fibers, [FiberCount::Count(2), FiberCount::Count(0)]);
        assert_eq!(reports[4].s_real_fixed_points, 2);
        assert_eq!(reports[0].s_real_fixed_points, 4);
    }

    #[test]
    fn h2_action_preserves_form() {
        for a in canonical_actions() {
            assert!(preserves_hyperbolic_form(&induced_h2_action(&a)));
        }
    }

    #[test]
    fn all_generator_pairs() {
        let names = ["c_a", "c_b", "s_c_b"];
        let mut ids = std::collections::BTreeSet::new();
        for a in names {
            for b in names {
                ids.insert(classify_action(&QuadricAction::from_names(a, b).unwrap()).unwrap().type_id);
            }
        }
        ids.insert(classify_action(&QuadricAction::canonical_indecomposable()).unwrap().type_id);
        assert_eq!(ids.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn sigma2() {
        let r: Vec<u8> = canonical_sigma2_actions()
            .iter()
            .map(|a| classify_sigma2_action(a).unwrap().type_id)
            .collect();
        assert_eq!(r, vec![1, 2]);
        let m = Sigma2Marking {
            ruling: 2,
            fiber: MarkedFiber::Zero,
        };
        // in c_a × c_b the second ruling has no invariant fiber
        let bad = QuadricAction::from_names("c_a", "c_b").unwrap().on_sigma2(m);
        assert!(matches!(classify_sigma2_action(&bad), Err(QuadricError::NotReducible(_))));
        let bad = QuadricAction::canonical_indecomposable().on_sigma2(m);
        assert!(matches!(classify_sigma2_action(&bad), Err(QuadricError::NotReducible(_))));
    }

    #[test]
    fn commuting_with_s_required() {
        let m = [[gq(1, 0), gq(1, 0)], [gq(1, 0), gq(-1, 0)]];
        let f = P1Involution::new(m, true).unwrap();
        assert!(matches!(
            QuadricAction::decomposable(f, canonical_involution("c_a").unwrap()),
            Err(QuadricError::NotAnAction(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        for a in canonical_actions().into_iter().chain(canonical_sigma2_actions()) {
            let s = serde_json::to_string(&a).unwrap();
            let back: QuadricAction = serde_json::from_str(&s).unwrap();
            assert_eq!(back, a);
        }
        let s = serde_json::to_string(&QuadricAction::canonical_indecomposable()).unwrap();
        assert!(s.contains("\"kind\":\"indecomposable\""));
    }
}
