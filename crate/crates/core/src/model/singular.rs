//! Singular points of the branch curve.
//!
//! The curve is `G = 0` in `P¹ × P¹`, with `G` the real form of
//! [`BranchPolynomial::bihomogeneous`]; the Cayley transform is a linear
//! change of coordinates on the first factor, so singular points and their
//! types are the same as for `p = 0`. The four charts are disjoint pieces:
//! the affine part `t₁u₁ ≠ 0`, the two lines `t₁ = 0` and `u₁ = 0` minus
//! the corner, and the corner itself. Each point is reported exactly as a
//! root of a squarefree modulus `m(z)` with coordinates polynomial in `z`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::branch::{BranchPolynomial, Chart, TChart, UChart};
use crate::json;
use crate::poly::bipoly::BiPoly;
use crate::poly::field::{split_run, KPoly, NumberField, Split};
use crate::poly::germ::{classify_at_point, classify_germ, GermType};
use crate::poly::resultant::resultant_u;
use crate::poly::upoly::{rat, UPoly};

/// A Galois orbit of singular points: the roots of `modulus`, with chart
/// coordinates `(t(z), u(z))` in the free variables of `chart`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub chart: Chart,
    #[serde(with = "json::upoly")]
    pub modulus: UPoly,
    #[serde(with = "json::upoly")]
    pub t: UPoly,
    #[serde(with = "json::upoly")]
    pub u: UPoly,
    pub germ: GermType,
}

impl SingularPoint {
    /// Number of geometric points in the orbit.
    pub fn count(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub points: Vec<SingularPoint>,
    /// The curve has a multiple component, so its singular locus is a curve.
    pub non_reduced: bool,
    pub smooth: bool,
}

impl SingularityReport {
    fn new(points: Vec<SingularPoint>, non_reduced: bool) -> Self {
        let smooth = points.is_empty() && !non_reduced;
        SingularityReport {
            points,
            non_reduced,
            smooth,
        }
    }

    /// Total number of geometric singular points.
    pub fn count(&self) -> usize {
        self.points.iter().map(SingularPoint::count).sum()
    }

    /// The worst type present: `NotSimple` for non-reduced curves.
    pub fn types(&self) -> Vec<GermType> {
        if self.non_reduced {
            return vec![GermType::NotSimple];
        }
        self.points.iter().map(|p| p.germ).collect()
    }
}

const SHEARS: [i64; 12] = [1, 2, -1, 3, -2, 5, -3, 7, 4, -5, 11, -7];
const LAMBDAS: [i64; 10] = [1, 2, 3, -1, 5, -2, 7, 4, -3, 11];

enum Affine {
    Points(Vec<SingularPoint>),
    NonReduced,
}

/// Singular points of `g = 0` in the affine plane of `chart`.
fn affine_points(g: &BiPoly, chart: Chart) -> Affine {
    let Some(d) = g.total_degree() else {
        return Affine::NonReduced;
    };
    if d == 0 {
        return Affine::Points(Vec::new());
    }
    'shear: for a in SHEARS {
        let a = rat(a);
        // t ↦ t + a·u makes the u-leading coefficient a nonzero constant
        let shift = &BiPoly::t() + &BiPoly::u().scale(&a);
        let gs = g.compose(&shift, &BiPoly::u());
        if gs.degree_u() != Some(d) {
            continue;
        }
        let gu = gs.d_u();
        let gt = gs.d_t();
        let r1 = resultant_u(&gs, &gu);
        if r1.is_zero() {
            return Affine::NonReduced;
        }
        // Res(gs, gt + λ gu) vanishes for at most one λ per factor of gs
        let Some(r2) = LAMBDAS.iter().find_map(|&l| {
            let r = resultant_u(&gs, &(&gt + &gu.scale(&rat(l))));
            (!r.is_zero()).then_some(r)
        }) else {
            continue;
        };
        let m = r1.gcd(&r2).squarefree();
        if m.degree().unwrap_or(0) == 0 {
            return Affine::Points(Vec::new());
        }
        let fibers = split_run(&m, |k| {
            let over = |p: &BiPoly| {
                KPoly((0..=p.degree_u().unwrap_or(0)).map(|j| k.reduce(&p.coeff_u(j))).collect())
            };
            let h = KPoly::gcd(&over(&gs), &over(&gu), k)?;
            let h = KPoly::gcd(&h, &over(&gt), k)?;
            Ok::<KPoly, Split>(h)
        });
        let mut points = Vec::new();
        for (mi, h) in fibers {
            match h.degree() {
                Some(0) => {}
                Some(1) => {
                    let u0 = -&h.0[0];
                    let t0 = &UPoly::x() + &u0.scale(&a);
                    let t0 = t0.rem(&mi);
                    for (mj, germ) in classify_at_point(g, &mi, &t0, &u0) {
                        points.push(SingularPoint {
                            chart,
                            t: t0.rem(&mj),
                            u: u0.rem(&mj),
                            modulus: mj,
                            germ,
                        });
                    }
                }
                // several singular points over one t: the shear failed to separate them
                _ => continue 'shear,
            }
        }
        return Affine::Points(points);
    }
    panic!("no separating shear found for a curve of degree {d}")
}

/// Singular points of `g = 0` on the line `t = 0`, which is parametrized by `u`.
fn line_points(g: &BiPoly, chart: Chart, swapped: bool) -> Affine {
    let h0 = g.eval_t(&BigRational::zero());
    let h1 = g.d_t().eval_t(&BigRational::zero());
    if h0.is_zero() && h1.is_zero() {
        return Affine::NonReduced;
    }
    let m = h0.gcd(&h1).gcd(&h0.derivative()).squarefree();
    if m.degree().unwrap_or(0) == 0 {
        return Affine::Points(Vec::new());
    }
    let points = classify_at_point(g, &m, &UPoly::zero(), &UPoly::x())
        .into_iter()
        .map(|(mj, germ)| {
            let (t, u) = if swapped {
                (UPoly::x(), UPoly::zero())
            } else {
                (UPoly::zero(), UPoly::x())
            };
            SingularPoint {
                chart,
                modulus: mj,
                t,
                u,
                germ,
            }
        })
        .collect();
    Affine::Points(points)
}

/// All singular points of the branch curve, classified.
pub fn singular_locus(p: &BranchPolynomial) -> SingularityReport {
    let main = Chart { t: TChart::T1, u: UChart::U1 };
    let t_line = Chart { t: TChart::T0, u: UChart::U1 };
    let u_line = Chart { t: TChart::T1, u: UChart::U0 };
    let corner = Chart { t: TChart::T0, u: UChart::U0 };
    let pieces: Vec<Affine> = {
        use rayon::prelude::*;
        (0..4)
            .into_par_iter()
            .map(|n| match n {
                0 => affine_points(&p.chart(main), main),
                1 => line_points(&p.chart(t_line), t_line, false),
                2 => line_points(&p.chart(u_line).swap_vars(), u_line, true),
                _ => {
                    let g = p.chart(corner);
                    let singular = g.coeff(0, 0).is_zero() && g.coeff(1, 0).is_zero() && g.coeff(0, 1).is_zero();
                    // a doubled axis through the corner is caught by the line charts
                    Affine::Points(if singular { vec![corner_point(&g, corner)] } else { Vec::new() })
                }
            })
            .collect()
    };
    let mut points = Vec::new();
    let mut non_reduced = false;
    for piece in pieces {
        match piece {
            Affine::Points(v) => points.extend(v),
            Affine::NonReduced => non_reduced = true,
        }
    }
    if non_reduced {
        points.clear();
    }
    SingularityReport::new(points, non_reduced)
}

fn corner_point(g: &BiPoly, chart: Chart) -> SingularPoint {
    SingularPoint {
        chart,
        modulus: UPoly::x(),
        t: UPoly::zero(),
        u: UPoly::zero(),
        germ: classify_germ(g),
    }
}

/// Whether `(t, u)` is a singular point of the chart polynomial, checked
/// exactly over `ℚ[z]/(m)` on every component.
pub fn is_singular_point(p: &BranchPolynomial, pt: &SingularPoint) -> bool {
    let g = p.chart(pt.chart);
    let partials = [g.clone(), g.d_t(), g.d_u()];
    let results = split_run(&pt.modulus, |k: &NumberField| {
        let t = k.reduce(&pt.t);
        let u = k.reduce(&pt.u);
        for f in &partials {
            let mut acc = UPoly::zero();
            for ((i, j), x) in f.terms() {
                let term = k.mul(&k.pow(&t, i), &k.pow(&u, j)).scale(x);
                acc = k.add(&acc, &term);
            }
            if !k.is_zero(&acc)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    results.into_iter().all(|(_, ok)| ok)
}

/// Classifies the germ at an explicit rational point of a chart.
pub fn classify_singularity(p: &BranchPolynomial, chart: Chart, t: &BigRational, u: &BigRational) -> Result<GermType, NotASingularPoint> {
    let g = p.chart(chart).translate(t, u);
    if !(g.coeff(0, 0).is_zero() && g.coeff(1, 0).is_zero() && g.coeff(0, 1).is_zero()) {
        return Err(NotASingularPoint);
    }
    Ok(classify_germ(&g))
}

#[derive(Debug, thiserror::Error, Clone, Copy, PartialEq, Eq)]
#[error("not a singular point of the curve")]
pub struct NotASingularPoint;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix;
    use crate::model::branch::REAL_DIMENSION;
    use num_bigint::BigInt;
    use num_complex::Complex;
    use num_traits::One;

    fn real(entries: &[((u8, u8), (i64, i64))]) -> BranchPolynomial {
        BranchPolynomial::validate(
            entries
                .iter()
                .map(|&(e, (n, d))| (e, Complex::new(BigRational::new(n.into(), d.into()), BigRational::zero()))),
        )
        .unwrap()
    }

    fn nodal_center() -> BranchPolynomial {
        real(&[((2, 0), (1, 1)), ((2, 4), (1, 1)), ((0, 0), (1, 10)), ((0, 4), (1, 10)), ((4, 0), (1, 10)), ((4, 4), (1, 10))])
    }

    #[test]
    fn product_curve_has_sixteen_nodes() {
        let r = singular_locus(&nodal_center());
        assert!(!r.smooth && !r.non_reduced);
        assert_eq!(r.count(), 16);
        assert!(r.points.iter().all(|pt| pt.germ == GermType::A(1)));
        assert!(r.points.iter().all(|pt| is_singular_point(&nodal_center(), pt)));
    }

    #[test]
    fn double_lines_are_non_reduced() {
        let r = singular_locus(&real(&[((2, 2), (1, 1))]));
        assert!(r.non_reduced && !r.smooth);
        assert_eq!(r.types(), vec![GermType::NotSimple]);
    }

    #[test]
    fn perturbed_center_is_smooth() {
        let p = real(&[((2, 0), (11, 10)), ((2, 4), (9, 10)), ((0, 0), (1, 10)), ((0, 4), (1, 10)), ((4, 0), (1, 10)), ((4, 4), (1, 10))]);
        assert!(singular_locus(&p).smooth);
    }

    /// A polynomial with a node forced at the rational chart point `(t, u)`.
    fn with_node(t: i64, u: i64, weights: &[i64]) -> BranchPolynomial {
        let (t, u) = (rat(t), rat(u));
        let basis: Vec<BranchPolynomial> = (0..REAL_DIMENSION)
            .map(|k| {
                let mut e = vec![BigRational::zero(); REAL_DIMENSION];
                e[k] = BigRational::one();
                BranchPolynomial::from_real_coordinates(&e).unwrap()
            })
            .collect();
        let rows: Vec<Vec<BigRational>> = (0..3)
            .map(|r| {
                basis
                    .iter()
                    .map(|b| {
                        let g = b.chart(Chart::MAIN_REAL);
                        let g = [g.clone(), g.d_t(), g.d_u()][r].clone();
                        g.eval(&t, &u)
                    })
                    .collect()
            })
            .collect();
        // entries are integers here since the points and basis are integral
        let a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        let kernel = matrix::integer_kernel(&a, REAL_DIMENSION);
        assert_eq!(kernel.len(), REAL_DIMENSION - 3);
        let mut x = vec![BigRational::zero(); REAL_DIMENSION];
        for (v, &w) in kernel.iter().zip(weights) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += BigRational::from_integer(vi * w);
            }
        }
        BranchPolynomial::from_real_coordinates(&x).unwrap()
    }

    #[test]
    fn constructed_node_is_found() {
        let p = with_node(1, 2, &[3, -1, 4, 1, -5, 9, 2, -6, 5, 3]);
        let r = singular_locus(&p);
        // s maps (τ, ω) to (−1/τ, −ω), so the node comes with its image (−1, −2)
        assert_eq!(r.count(), 2, "{r:?}");
        let mut found = Vec::new();
        for pt in &r.points {
            assert_eq!(pt.germ, GermType::A(1));
            for z in [rat(1), rat(-1), rat(2), rat(-2)] {
                if pt.modulus.eval(&z).is_zero() {
                    found.push((pt.t.eval(&z), pt.u.eval(&z)));
                }
            }
        }
        found.sort();
        assert_eq!(found, vec![(rat(-1), rat(-2)), (rat(1), rat(2))]);
        for (t, u) in &found {
            assert_eq!(classify_singularity(&p, Chart::MAIN_REAL, t, u), Ok(GermType::A(1)));
        }
        assert_eq!(classify_singularity(&p, Chart::MAIN_REAL, &rat(0), &rat(0)), Err(NotASingularPoint));
    }
}
