//! s-invariant bidegree-(4,4) branch polynomials
//! `p(x, y) = Σ a_{i,j} xⁱ yʲ` with `i ≡ j (mod 2)` and
//! `a_{4−i,j} = conj(a_{i,j})`.
//!
//! The reality condition says `p` is real for the structure
//! `c(x, y) = (1/x̄, ȳ)`. Substituting `x = (t₁ + i t₀)/(t₁ − i t₀)` and
//! `y = u₀/u₁` and clearing denominators gives a bihomogeneous form
//! `G(t₀, t₁; u₀, u₁)` with real coefficients. The torus `|x| = 1` becomes
//! `RP¹ × RP¹`, and with `t = (sin θ/2, cos θ/2)`, `u = (sin φ, cos φ)`
//! one has `G = f(θ, φ)`, the restriction of `x⁻² p` to the torus.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json;
use crate::poly::bipoly::BiPoly;
use crate::quadric::{fmt_gauss, GaussRat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    OutOfRange(u8, u8),
    Parity(u8, u8),
    Reality(u8, u8),
    Duplicate(u8, u8),
    ZeroPolynomial,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange(i, j) => write!(f, "a[{i},{j}] is outside 0..=4"),
            Violation::Parity(i, j) => write!(f, "a[{i},{j}] violates i ≡ j (mod 2)"),
            Violation::Reality(i, j) => write!(f, "a[{i},{j}] is not the conjugate of a[{},{j}]", 4 - i),
            Violation::Duplicate(i, j) => write!(f, "a[{i},{j}] given twice"),
            Violation::ZeroPolynomial => f.write_str("polynomial is zero"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BranchError {
    #[error("invalid branch polynomial: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("bad number: {0}")]
    BadNumber(String),
}

/// The 13 index pairs, in lexicographic order.
pub fn admissible_indices() -> Vec<(u8, u8)> {
    let mut v = Vec::new();
    for i in 0..=4u8 {
        for j in 0..=4u8 {
            if (i + j) % 2 == 0 {
                v.push((i, j));
            }
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPolynomial {
    coeffs: BTreeMap<(u8, u8), GaussRat>,
}

/// Real coordinates on the space of branch polynomials: `a_{2,j}` for
/// `j ∈ {0,2,4}`, then real and imaginary parts of `a_{0,j}` (`j` even) and
/// `a_{1,j}` (`j` odd). Thirteen in total.
pub const REAL_DIMENSION: usize = 13;

fn real_slots() -> Vec<((u8, u8), bool)> {
    let mut v = Vec::new();
    for j in [0u8, 2, 4] {
        v.push(((2, j), false));
    }
    for j in [0u8, 2, 4] {
        v.push(((0, j), false));
        v.push(((0, j), true));
    }
    for j in [1u8, 3] {
        v.push(((1, j), false));
        v.push(((1, j), true));
    }
    v
}

impl BranchPolynomial {
    /// Checks every constraint and reports all violations at once.
    pub fn validate<I: IntoIterator<Item = ((u8, u8), GaussRat)>>(entries: I) -> Result<Self, BranchError> {
        let mut coeffs = BTreeMap::new();
        let mut bad = Vec::new();
        for ((i, j), a) in entries {
            if i > 4 || j > 4 {
                bad.push(Violation::OutOfRange(i, j));
                continue;
            }
            if (i + j) % 2 == 1 {
                bad.push(Violation::Parity(i, j));
                continue;
            }
            if coeffs.insert((i, j), a).is_some() {
                bad.push(Violation::Duplicate(i, j));
            }
        }
        coeffs.retain(|_, a: &mut GaussRat| !a.is_zero());
        for (&(i, j), a) in &coeffs {
            let partner = coeffs.get(&(4 - i, j)).cloned().unwrap_or_else(GaussRat::zero);
            if partner.conj() != *a {
                bad.push(Violation::Reality(i, j));
            }
        }
        if coeffs.is_empty() && bad.is_empty() {
            bad.push(Violation::ZeroPolynomial);
        }
        if bad.is_empty() {
            Ok(BranchPolynomial { coeffs })
        } else {
            Err(BranchError::Invalid(bad))
        }
    }

    /// Builds a polynomial from the 13 real coordinates; `None` if all vanish.
    pub fn from_real_coordinates(x: &[BigRational]) -> Option<Self> {
        assert_eq!(x.len(), REAL_DIMENSION);
        let mut coeffs: BTreeMap<(u8, u8), GaussRat> = BTreeMap::new();
        for (((i, j), imag), v) in real_slots().into_iter().zip(x) {
            let e = coeffs.entry((i, j)).or_insert_with(GaussRat::zero);
            if imag {
                e.im += v;
            } else {
                e.re += v;
            }
        }
        let mut full = BTreeMap::new();
        for ((i, j), a) in coeffs {
            if a.is_zero() {
                continue;
            }
            if i != 2 {
                full.insert((4 - i, j), a.conj());
            }
            full.insert((i, j), a);
        }
        (!full.is_empty()).then_some(BranchPolynomial { coeffs: full })
    }

    pub fn real_coordinates(&self) -> Vec<BigRational> {
        real_slots()
            .into_iter()
            .map(|((i, j), imag)| {
                let a = self.coeff(i, j);
                if imag {
                    a.im
                } else {
                    a.re
                }
            })
            .collect()
    }

    pub fn coeff(&self, i: u8, j: u8) -> GaussRat {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<(u8, u8), GaussRat> {
        &self.coeffs
    }

    /// `a·self + b·other`, or `None` if the result vanishes.
    pub fn combine(&self, a: &BigRational, other: &Self, b: &BigRational) -> Option<Self> {
        let xs = self.real_coordinates();
        let ys = other.real_coordinates();
        let z: Vec<BigRational> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
        Self::from_real_coordinates(&z)
    }

    pub fn scale(&self, k: &BigRational) -> Option<Self> {
        let z: Vec<BigRational> = self.real_coordinates().iter().map(|x| x * k).collect();
        Self::from_real_coordinates(&z)
    }

    pub fn corners(&self) -> [GaussRat; 4] {
        [self.coeff(0, 0), self.coeff(0, 4), self.coeff(4, 0), self.coeff(4, 4)]
    }

    /// Scales by ±1 so that the largest-magnitude coefficient (first in
    /// `(i, j)` order among ties) has positive real part, or positive
    /// imaginary part when its real part is zero.
    pub fn normalize(&self) -> Self {
        let norm = |a: &GaussRat| &a.re * &a.re + &a.im * &a.im;
        let mut best: Option<(&GaussRat, BigRational)> = None;
        for a in self.coeffs.values() {
            let n = norm(a);
            if best.as_ref().map_or(true, |(_, m)| n > *m) {
                best = Some((a, n));
            }
        }
        let (a, _) = best.expect("nonzero polynomial");
        let negative = a.re.is_negative() || (a.re.is_zero() && a.im.is_negative());
        if negative {
            self.scale(&-BigRational::one()).expect("nonzero")
        } else {
            self.clone()
        }
    }

    /// Coefficients `c[k][l]` of `t₀ᵏ t₁^{4−k} u₀ˡ u₁^{4−l}` in the real form `G`.
    pub fn bihomogeneous(&self) -> [[BigRational; 5]; 5] {
        let mut re: [[BigRational; 5]; 5] = Default::default();
        let mut im: [[BigRational; 5]; 5] = Default::default();
        for (&(i, j), a) in &self.coeffs {
            let e = cayley_factor(i);
            for (k, c) in e.iter().enumerate() {
                let v = a * c;
                re[k][j as usize] += &v.re;
                im[k][j as usize] += &v.im;
            }
        }
        assert!(
            im.iter().flatten().all(Zero::is_zero),
            "reality condition violated: imaginary part of the real form is nonzero"
        );
        re
    }

    /// `G` dehomogenized in the given chart of each factor.
    pub fn chart(&self, chart: Chart) -> BiPoly {
        let c = self.bihomogeneous();
        let mut terms = Vec::new();
        for (k, row) in c.iter().enumerate() {
            for (l, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                // exponent of the free variable in each factor
                let et = match chart.t {
                    TChart::T0 => 4 - k,
                    TChart::T1 => k,
                };
                let eu = match chart.u {
                    UChart::U1 => l,
                    UChart::U0 => 4 - l,
                };
                terms.push(((et, eu), x.clone()));
            }
        }
        BiPoly::from_terms(terms)
    }

    /// Exact torus value `f(θ, φ)` at `tan(θ/2) = τ`, `tan φ = ω`.
    pub fn torus_value_tan(&self, tau: &BigRational, omega: &BigRational) -> BigRational {
        let g = self.chart(Chart::MAIN_REAL);
        let one = BigRational::one();
        let d1 = &one + tau * tau;
        let d2 = &one + omega * omega;
        g.eval(tau, omega) / (&d1 * &d1 * &d2 * &d2)
    }

    /// `f(θ, φ) = Re[e^{−2iθ} Σ a_{i,j} e^{iθi} sinʲφ cos^{4−j}φ]` in floating point.
    pub fn torus_value_f64(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let mut acc = Complex::new(0.0, 0.0);
        for (&(i, j), a) in &self.coeffs {
            let a = Complex::new(a.re.to_f64().unwrap(), a.im.to_f64().unwrap());
            let e = Complex::from_polar(1.0, theta * (i as f64 - 2.0));
            acc += a * e * s.powi(j as i32) * c.powi(4 - j as i32);
        }
        acc.re
    }
}

/// Coefficients of `t₀ᵏ t₁^{4−k}` in `(t₁ + i t₀)ⁱ (t₁ − i t₀)^{4−i}`.
fn cayley_factor(i: u8) -> Vec<GaussRat> {
    let lin = |s: i64| vec![Complex::new(BigRational::one(), BigRational::zero()), Complex::new(BigRational::zero(), BigRational::from_integer(BigInt::from(s)))];
    let mul = |a: &[GaussRat], b: &[GaussRat]| {
        let mut out = vec![GaussRat::zero(); a.len() + b.len() - 1];
        for (p, x) in a.iter().enumerate() {
            for (q, y) in b.iter().enumerate() {
                out[p + q] += x * y;
            }
        }
        out
    };
    let mut acc = vec![GaussRat::one()];
    for _ in 0..i {
        acc = mul(&acc, &lin(1));
    }
    for _ in i..4 {
        acc = mul(&acc, &lin(-1));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TChart {
    /// `t₀ = 1`, free variable `t₁`.
    T0,
    /// `t₁ = 1`, free variable `t₀`.
    T1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UChart {
    /// `u₁ = 1`, free variable `u₀`.
    U1,
    /// `u₀ = 1`, free variable `u₁`.
    U0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chart {
    pub t: TChart,
    pub u: UChart,
}

impl Chart {
    /// Free variables `(tan θ/2, tan φ)`.
    pub const MAIN_REAL: Chart = Chart { t: TChart::T1, u: UChart::U1 };
    pub const ALL: [Chart; 4] = [
        Chart { t: TChart::T1, u: UChart::U1 },
        Chart { t: TChart::T1, u: UChart::U0 },
        Chart { t: TChart::T0, u: UChart::U1 },
        Chart { t: TChart::T0, u: UChart::U0 },
    ];

    pub fn index(self) -> usize {
        Chart::ALL.iter().position(|c| *c == self).unwrap()
    }

    /// Angles `(θ, φ)` of a point with chart coordinates `(a, b)`.
    pub fn to_angles(self, a: f64, b: f64) -> (f64, f64) {
        let theta = match self.t {
            TChart::T1 => 2.0 * a.atan(),
            TChart::T0 => 2.0 * (1.0f64).atan2(a),
        };
        let phi = match self.u {
            UChart::U1 => b.atan(),
            UChart::U0 => (1.0f64).atan2(b),
        };
        (theta, phi)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.t {
            TChart::T0 => "t0=1",
            TChart::T1 => "t1=1",
        };
        let u = match self.u {
            UChart::U1 => "u1=1",
            UChart::U0 => "u0=1",
        };
        write!(f, "{t},{u}")
    }
}

impl fmt::Display for BranchPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), a)| format!("({})x^{i}y^{j}", fmt_gauss(a)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

// JSON: {"coeffs": [{"i": 0, "j": 0, "re": "1/10", "im": "0"}, ...]}

#[derive(Serialize, Deserialize)]
struct RawCoeff {
    i: u8,
    j: u8,
    re: String,
    #[serde(default = "zero_string")]
    im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Serialize, Deserialize)]
pub struct RawBranch {
    coeffs: Vec<RawCoeff>,
}

impl TryFrom<RawBranch> for BranchPolynomial {
    type Error = BranchError;

    fn try_from(raw: RawBranch) -> Result<Self, BranchError> {
        let mut entries = Vec::new();
        for c in raw.coeffs {
            let re = json::parse_rational(&c.re).map_err(BranchError::BadNumber)?;
            let im = json::parse_rational(&c.im).map_err(BranchError::BadNumber)?;
            entries.push(((c.i, c.j), Complex::new(re, im)));
        }
        BranchPolynomial::validate(entries)
    }
}

impl From<&BranchPolynomial> for RawBranch {
    fn from(p: &BranchPolynomial) -> Self {
        RawBranch {
            coeffs: p
                .coeffs
                .iter()
                .map(|(&(i, j), a)| RawCoeff {
                    i,
                    j,
                    re: json::format_rational(&a.re),
                    im: json::format_rational(&a.im),
                })
                .collect(),
        }
    }
}

impl Serialize for BranchPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawBranch::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BranchPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        BranchPolynomial::try_from(RawBranch::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::rat;

    fn real(n: i64, d: i64) -> GaussRat {
        Complex::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    fn bp(entries: &[((u8, u8), (i64, i64))]) -> BranchPolynomial {
        BranchPolynomial::validate(entries.iter().map(|&(e, (re, im))| (e, Complex::new(rat(re), rat(im))))).unwrap()
    }

    #[test]
    fn validation() {
        assert!(BranchPolynomial::validate([((2, 0), real(1, 1))]).is_ok());
        assert_eq!(
            BranchPolynomial::validate([((1, 0), real(1, 1))]),
            Err(BranchError::Invalid(vec![Violation::Parity(1, 0)]))
        );
        let i = Complex::new(rat(0), rat(1));
        assert!(BranchPolynomial::validate([((0, 0), i.clone()), ((4, 0), -i.clone())]).is_ok());
        assert_eq!(
            BranchPolynomial::validate([((0, 0), i.clone()), ((4, 0), i)]),
            Err(BranchError::Invalid(vec![Violation::Reality(0, 0), Violation::Reality(4, 0)]))
        );
        assert_eq!(
            BranchPolynomial::validate([((2, 2), real(0, 1))]),
            Err(BranchError::Invalid(vec![Violation::ZeroPolynomial]))
        );
    }

    #[test]
    fn torus_restriction_examples() {
        // p = x²: f = cos⁴φ, so at tan φ = 1 the value is 1/4
        let p = bp(&[((2, 0), (1, 0))]);
        assert_eq!(p.torus_value_tan(&rat(0), &rat(1)), BigRational::new(1.into(), 4.into()));
        // corner-only: f = 2 cos 2θ (cos⁴φ + sin⁴φ); θ = π/2 is tan(θ/2) = 1
        let p = bp(&[((0, 0), (1, 0)), ((0, 4), (1, 0)), ((4, 0), (1, 0)), ((4, 4), (1, 0))]);
        assert_eq!(p.torus_value_tan(&rat(1), &rat(0)), rat(-2));
        assert_eq!(p.torus_value_tan(&rat(0), &rat(0)), rat(2));
    }

    #[test]
    fn exact_and_float_restrictions_agree() {
        let p = bp(&[((2, 0), (3, 0)), ((1, 1), (1, -2)), ((3, 1), (1, 2)), ((0, 2), (2, 5)), ((4, 2), (2, -5))]);
        for (tn, td, on, od) in [(1, 3, -2, 5), (7, 2, 1, 1), (-5, 4, 3, 8)] {
            let tau = BigRational::new(tn.into(), td.into());
            let omega = BigRational::new(on.into(), od.into());
            let exact = p.torus_value_tan(&tau, &omega).to_f64().unwrap();
            let theta = 2.0 * tau.to_f64().unwrap().atan();
            let phi = omega.to_f64().unwrap().atan();
            assert!((exact - p.torus_value_f64(theta, phi)).abs() < 1e-9);
        }
    }

    #[test]
    fn real_coordinates_round_trip() {
        let p = bp(&[((2, 0), (3, 0)), ((1, 1), (1, -2)), ((3, 1), (1, 2))]);
        let x = p.real_coordinates();
        assert_eq!(BranchPolynomial::from_real_coordinates(&x).unwrap(), p);
        assert_eq!(p.normalize(), p);
        assert_eq!(p.scale(&rat(-1)).unwrap().normalize(), p);
    }

    #[test]
    fn json_round_trip() {
        let p = bp(&[((0, 2), (2, 5)), ((4, 2), (2, -5))]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with("{\"coeffs\":[{\"i\":0,\"j\":2,\"re\":\"2\",\"im\":\"5\"}"));
        assert_eq!(serde_json::from_str::<BranchPolynomial>(&s).unwrap(), p);
    }
}
