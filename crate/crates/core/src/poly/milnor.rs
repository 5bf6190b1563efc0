//! Milnor numbers by elimination: `μ(f, 0)` is the intersection
//! multiplicity of `f_x` and `f_y` at the origin, read off as the order at
//! `t = 0` of `Res_u(f_t, f_u)` after a shear that leaves the origin as the
//! only common zero on the line `t = 0` and makes the `u`-leading
//! coefficient constant.

use num_rational::BigRational;
use num_traits::Zero;

use super::bipoly::BiPoly;
use super::resultant::resultant_u;
use super::upoly::{rat, UPoly};

/// `None` when the origin is not an isolated critical point.
pub fn milnor_number(f: &BiPoly) -> Option<usize> {
    let fx = f.d_t();
    let fy = f.d_u();
    if !fx.coeff(0, 0).is_zero() || !fy.coeff(0, 0).is_zero() {
        return Some(0);
    }
    for a in [0i64, 1, 2, 3, 5, 7, 11, 13] {
        // t ↦ t + a·u
        let x = &BiPoly::t() + &BiPoly::u().scale(&rat(a));
        let y = BiPoly::u();
        let p = fx.compose(&x, &y);
        let q = fy.compose(&x, &y);
        let Some(dp) = p.degree_u() else {
            continue;
        };
        if p.coeff_u(dp).degree() != Some(0) {
            continue;
        }
        let common = p.eval_t(&BigRational::zero()).gcd(&q.eval_t(&BigRational::zero()));
        if common.is_zero() {
            continue;
        }
        // only u = 0 may be a common root on t = 0
        let deg = common.degree().unwrap();
        if common != UPoly::x().pow(deg as u32) {
            continue;
        }
        let r = resultant_u(&p, &q);
        return r.order_at_zero();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::germ::{normal_form, GermType};

    #[test]
    fn milnor_numbers_of_normal_forms() {
        for t in [
            GermType::A(1),
            GermType::A(4),
            GermType::D(4),
            GermType::D(7),
            GermType::E(6),
            GermType::E(7),
            GermType::E(8),
        ] {
            let f = normal_form(t).unwrap();
            assert_eq!(milnor_number(&f), t.milnor_number().map(|m| m as usize), "{t}");
        }
        // x⁴ + y⁴ has μ = 9
        assert_eq!(milnor_number(&BiPoly::from_i64(&[((4, 0), 1), ((0, 4), 1)])), Some(9));
        // x² is not isolated
        assert_eq!(milnor_number(&BiPoly::from_i64(&[((2, 0), 1)])), None);
    }
}
