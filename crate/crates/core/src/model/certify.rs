//! Certified sign of the torus restriction.
//!
//! `RP¹ × RP¹` is covered by the four charts of [`Chart::ALL`], each
//! parametrized by `[−1, 1]²` in the tangent coordinates of the two angles.
//! On each box the dehomogenized form is expanded exactly around the box
//! center; `|Σ_{(k,l)≠0} d_{kl} h₁ᵏ h₂ˡ| ≤ Σ |d_{kl}| r₁ᵏ r₂ˡ` bounds the
//! deviation from the center value. Boxes are processed breadth first and
//! quartered until every leaf has a strict sign.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::branch::{BranchPolynomial, Chart};
use crate::json;
use crate::poly::bipoly::BiPoly;

pub const DEFAULT_BUDGET: usize = 200_000;

type Dense = [[BigRational; 5]; 5];

fn dense(p: &BiPoly) -> Dense {
    let mut d: Dense = Default::default();
    for ((i, j), x) in p.terms() {
        d[i][j] = x.clone();
    }
    d
}

/// Exact Taylor coefficients of `p` at `(a, b)` by repeated synthetic division.
fn taylor(p: &Dense, a: &BigRational, b: &BigRational) -> Dense {
    let mut d = p.clone();
    // shift in the first variable for each power of the second
    for j in 0..5 {
        for k in 0..5 {
            for i in (k..4).rev() {
                let t = &d[i + 1][j] * a;
                d[i][j] += t;
            }
        }
    }
    for row in d.iter_mut() {
        for k in 0..5 {
            for j in (k..4).rev() {
                let t = &row[j + 1] * b;
                row[j] += t;
            }
        }
    }
    d
}

/// Center value and a bound on the variation over the box of half-widths `r`.
fn box_estimate(p: &Dense, center: &[BigRational; 2], r: &BigRational) -> (BigRational, BigRational) {
    let d = taylor(p, &center[0], &center[1]);
    let mut pows = vec![BigRational::one()];
    for _ in 0..8 {
        let next = pows.last().unwrap() * r;
        pows.push(next);
    }
    let mut var = BigRational::zero();
    for (k, row) in d.iter().enumerate() {
        for (l, x) in row.iter().enumerate() {
            if (k, l) != (0, 0) && !x.is_zero() {
                var += x.abs() * &pows[k + l];
            }
        }
    }
    (d[0][0].clone(), var)
}

/// A square box of a chart, addressed by its quadtree path from `[−1, 1]²`.
/// Child `q` takes the upper half in the first coordinate iff `q & 2` and in
/// the second iff `q & 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertBox {
    pub chart: Chart,
    pub path: Vec<u8>,
    #[serde(with = "rat_pair")]
    pub lo: [BigRational; 2],
    #[serde(with = "rat_pair")]
    pub hi: [BigRational; 2],
    /// Exact lower bound on `|g|` over the box.
    #[serde(with = "json::rational")]
    pub bound: BigRational,
}

mod rat_pair {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational; 2], s: S) -> Result<S::Ok, S::Error> {
        [json::format_rational(&v[0]), json::format_rational(&v[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigRational; 2], D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let p = |s: &str| json::parse_rational(s).map_err(serde::de::Error::custom);
        Ok([p(&a)?, p(&b)?])
    }
}

fn box_from_path(path: &[u8]) -> ([BigRational; 2], [BigRational; 2]) {
    let mut lo = [-BigRational::one(), -BigRational::one()];
    let mut hi = [BigRational::one(), BigRational::one()];
    let two = BigRational::from_integer(BigInt::from(2));
    for &q in path {
        for (c, bit) in [(0usize, 2u8), (1, 1)] {
            let mid = (&lo[c] + &hi[c]) / &two;
            if q & bit != 0 {
                lo[c] = mid;
            } else {
                hi[c] = mid;
            }
        }
    }
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCertificate {
    /// `+1` or `−1`.
    pub sign: i8,
    pub boxes: Vec<CertBox>,
    pub depth: usize,
    pub evaluated: usize,
}

impl TorusCertificate {
    /// Smallest certified `|g|` over all boxes.
    pub fn min_bound(&self) -> BigRational {
        self.boxes.iter().map(|b| b.bound.clone()).min().unwrap_or_else(BigRational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub chart: Chart,
    #[serde(with = "rat_pair")]
    pub coords: [BigRational; 2],
}

impl SamplePoint {
    pub fn angles(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        self.chart
            .to_angles(self.coords[0].to_f64().unwrap(), self.coords[1].to_f64().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroWitness {
    /// The form vanishes exactly at this point.
    Exact(SamplePoint),
    /// The form is positive at one point and negative at the other.
    SignChange { positive: SamplePoint, negative: SamplePoint },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignOutcome {
    Certified(TorusCertificate),
    HasZero(ZeroWitness),
    BudgetExhausted { evaluated: usize, pending: usize },
}

struct Pending {
    chart: Chart,
    path: Vec<u8>,
}

/// Branch-and-bound certification of the sign of `f` on the torus.
pub fn certify_sign(p: &BranchPolynomial, budget: usize) -> SignOutcome {
    let charts: Vec<Dense> = Chart::ALL.iter().map(|c| dense(&p.chart(*c))).collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut level: Vec<Pending> = Chart::ALL.iter().map(|&chart| Pending { chart, path: Vec::new() }).collect();
    let mut leaves: Vec<CertBox> = Vec::new();
    let mut positive: Option<SamplePoint> = None;
    let mut negative: Option<SamplePoint> = None;
    let mut evaluated = 0usize;
    let mut depth = 0usize;
    while !level.is_empty() {
        if evaluated + level.len() > budget {
            return SignOutcome::BudgetExhausted {
                evaluated,
                pending: level.len(),
            };
        }
        let estimates: Vec<(BigRational, BigRational)> = level
            .par_iter()
            .map(|b| {
                let (lo, hi) = box_from_path(&b.path);
                let center = [(&lo[0] + &hi[0]) / &two, (&lo[1] + &hi[1]) / &two];
                let r = (&hi[0] - &lo[0]) / &two;
                box_estimate(&charts[b.chart.index()], &center, &r)
            })
            .collect();
        let mut next = Vec::new();
        for (b, (value, var)) in level.into_iter().zip(estimates) {
            evaluated += 1;
            depth = depth.max(b.path.len());
            let (lo, hi) = box_from_path(&b.path);
            let center = SamplePoint {
                chart: b.chart,
                coords: [(&lo[0] + &hi[0]) / &two, (&lo[1] + &hi[1]) / &two],
            };
            if value.is_zero() {
                return SignOutcome::HasZero(ZeroWitness::Exact(center));
            }
            let slot = if value.is_positive() { &mut positive } else { &mut negative };
            if slot.is_none() {
                *slot = Some(center);
            }
            if let (Some(pos), Some(neg)) = (&positive, &negative) {
                return SignOutcome::HasZero(ZeroWitness::SignChange {
                    positive: pos.clone(),
                    negative: neg.clone(),
                });
            }
            let margin = value.abs() - &var;
            if margin.is_positive() {
                leaves.push(CertBox {
                    chart: b.chart,
                    path: b.path,
                    lo,
                    hi,
                    bound: margin,
                });
            } else {
                for q in 0..4u8 {
                    let mut path = b.path.clone();
                    path.push(q);
                    next.push(Pending { chart: b.chart, path });
                }
            }
        }
        level = next;
    }
    let sign = if positive.is_some() { 1 } else { -1 };
    SignOutcome::Certified(TorusCertificate {
        sign,
        boxes: leaves,
        depth,
        evaluated,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("box {0} has endpoints inconsistent with its path")]
    BadEndpoints(usize),
    #[error("boxes of chart {0} do not tile the square")]
    NotATiling(Chart),
    #[error("box {0} does not reproduce its bound")]
    BoundNotReproduced(usize),
    #[error("box {0} has the wrong sign")]
    WrongSign(usize),
    #[error("sign must be ±1")]
    BadSign,
}

/// Replays a certificate: checks that the boxes tile each chart and that
/// recomputing every bound gives at least the stored value with the
/// certified sign.
pub fn audit_certificate(p: &BranchPolynomial, cert: &TorusCertificate) -> Result<(), AuditError> {
    if cert.sign != 1 && cert.sign != -1 {
        return Err(AuditError::BadSign);
    }
    let two = BigRational::from_integer(BigInt::from(2));
    for chart in Chart::ALL {
        let mut paths: Vec<&Vec<u8>> = cert.boxes.iter().filter(|b| b.chart == chart).map(|b| &b.path).collect();
        paths.sort();
        // a prefix-free set of quadtree paths with Kraft sum 1 is a tiling
        let prefix_free = paths.windows(2).all(|w| !w[1].starts_with(w[0]));
        let kraft: BigRational = paths
            .iter()
            .map(|p| BigRational::new(BigInt::one(), BigInt::from(4u32).pow(p.len() as u32)))
            .sum();
        if !prefix_free || !kraft.is_one() {
            return Err(AuditError::NotATiling(chart));
        }
    }
    let charts: Vec<Dense> = Chart::ALL.iter().map(|c| dense(&p.chart(*c))).collect();
    let results: Vec<Result<(), AuditError>> = cert
        .boxes
        .par_iter()
        .enumerate()
        .map(|(n, b)| {
            let (lo, hi) = box_from_path(&b.path);
            if lo != b.lo || hi != b.hi {
                return Err(AuditError::BadEndpoints(n));
            }
            let center = [(&lo[0] + &hi[0]) / &two, (&lo[1] + &hi[1]) / &two];
            let r = (&hi[0] - &lo[0]) / &two;
            let (value, var) = box_estimate(&charts[b.chart.index()], &center, &r);
            if (value.is_positive() && cert.sign < 0) || (value.is_negative() && cert.sign > 0) {
                return Err(AuditError::WrongSign(n));
            }
            if value.abs() - var < b.bound || !b.bound.is_positive() {
                return Err(AuditError::BoundNotReproduced(n));
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::rat;
    use num_complex::Complex;

    fn bp(entries: &[((u8, u8), i64)]) -> BranchPolynomial {
        BranchPolynomial::validate(entries.iter().map(|&(e, re)| (e, Complex::new(rat(re), rat(0))))).unwrap()
    }

    #[test]
    fn taylor_matches_translation() {
        let p = BiPoly::from_i64(&[((4, 4), 3), ((2, 1), -1), ((0, 3), 5), ((1, 0), 2)]);
        let (a, b) = (BigRational::new(1.into(), 3.into()), rat(-2));
        let d = taylor(&dense(&p), &a, &b);
        assert_eq!(d, dense(&p.translate(&a, &b)));
    }

    #[test]
    fn positive_example() {
        let p = bp(&[((2, 0), 1), ((2, 4), 1)]);
        match certify_sign(&p, 10_000) {
            SignOutcome::Certified(c) => {
                assert_eq!(c.sign, 1);
                audit_certificate(&p, &c).unwrap();
                let neg = p.scale(&rat(-1)).unwrap();
                match certify_sign(&neg, 10_000) {
                    SignOutcome::Certified(d) => {
                        assert_eq!(d.sign, -1);
                        let paths = |c: &TorusCertificate| c.boxes.iter().map(|b| (b.chart, b.path.clone())).collect::<Vec<_>>();
                        assert_eq!(paths(&c), paths(&d));
                    }
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_examples() {
        assert!(matches!(
            certify_sign(&bp(&[((2, 0), 1)]), 10_000),
            SignOutcome::HasZero(ZeroWitness::Exact(_))
        ));
        let corner = bp(&[((0, 0), 1), ((0, 4), 1), ((4, 0), 1), ((4, 4), 1)]);
        assert!(matches!(certify_sign(&corner, 10_000), SignOutcome::HasZero(_)));
        assert!(matches!(
            certify_sign(&bp(&[((2, 0), 1), ((2, 4), 1)]), 2),
            SignOutcome::BudgetExhausted { .. }
        ));
    }

    #[test]
    fn tampered_certificate_fails_audit() {
        let p = bp(&[((2, 0), 1), ((2, 4), 1)]);
        let SignOutcome::Certified(mut c) = certify_sign(&p, 10_000) else {
            panic!()
        };
        c.boxes[0].bound += rat(100);
        assert!(matches!(audit_certificate(&p, &c), Err(AuditError::BoundNotReproduced(0))));
        c.boxes.pop();
        assert!(matches!(audit_certificate(&p, &c), Err(AuditError::NotATiling(_))));
    }
}
