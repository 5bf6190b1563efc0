//! Resultants by Sylvester determinants and evaluation/interpolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::bipoly::BiPoly;
use super::upoly::{rat, UPoly};
use crate::matrix;

/// Resultant of `a` and `b` taken with formal degrees `m ≥ deg a`, `n ≥ deg b`.
pub fn sylvester_resultant(a: &UPoly, m: usize, b: &UPoly, n: usize) -> BigRational {
    if m + n == 0 {
        return BigRational::one();
    }
    let (ca, ai) = clear(a, m);
    let (cb, bi) = clear(b, n);
    let size = m + n;
    let mut s = matrix::zeros(size, size);
    for r in 0..n {
        for (k, x) in ai.iter().enumerate() {
            s[r][r + k] = x.clone();
        }
    }
    for r in 0..m {
        for (k, x) in bi.iter().enumerate() {
            s[n + r][r + k] = x.clone();
        }
    }
    let d = matrix::det(&s);
    // rows of a were scaled by ca (n of them), rows of b by cb (m of them)
    let scale = Pow::pow(&ca, n) * Pow::pow(&cb, m);
    BigRational::new(d, scale)
}

/// Integer coefficients of `c·p` (highest first, padded to formal degree `deg`).
fn clear(p: &UPoly, deg: usize) -> (BigInt, Vec<BigInt>) {
    let l = p.coeffs().iter().fold(BigInt::one(), |a, c| a.lcm(c.denom()));
    let lr = BigRational::from_integer(l.clone());
    let v = (0..=deg).rev().map(|k| (p.coeff(k) * &lr).to_integer()).collect();
    (l, v)
}

/// `Res_u(a, b)` as a polynomial in `t`, using formal `u`-degrees.
pub fn resultant_u(a: &BiPoly, b: &BiPoly) -> UPoly {
    let (Some(m), Some(n)) = (a.degree_u(), b.degree_u()) else {
        return UPoly::zero();
    };
    // degree bound from the total degrees
    let bound = a.total_degree().unwrap_or(0) * b.total_degree().unwrap_or(0);
    let values: Vec<BigRational> = (0..=bound as i64)
        .map(|k| {
            let t = rat(k);
            sylvester_resultant(&a.eval_t(&t), m, &b.eval_t(&t), n)
        })
        .collect();
    UPoly::interpolate_at_naturals(&values)
}

/// [`resultant_u`] computed pointwise by the Euclidean remainder formula
/// instead of determinants; an independent cross-check.
pub fn resultant_u_direct(a: &BiPoly, b: &BiPoly) -> UPoly {
    let (Some(m), Some(n)) = (a.degree_u(), b.degree_u()) else {
        return UPoly::zero();
    };
    let bound = a.total_degree().unwrap_or(0) * b.total_degree().unwrap_or(0);
    let values: Vec<BigRational> = (0..=bound as i64)
        .map(|k| {
            let t = rat(k);
            euclid_resultant(&a.eval_t(&t), m, &b.eval_t(&t), n)
        })
        .collect();
    UPoly::interpolate_at_naturals(&values)
}

/// Resultant via the Euclidean remainder sequence, with formal degrees.
pub fn euclid_resultant(a: &UPoly, m: usize, b: &UPoly, n: usize) -> BigRational {
    // a formal leading zero makes the resultant pick up a factor of lc
    let da = a.degree();
    let db = b.degree();
    match (da, db) {
        (None, _) | (_, None) => {
            return if m + n == 0 { BigRational::one() } else { BigRational::zero() };
        }
        _ => {}
    }
    let (da, db) = (da.unwrap(), db.unwrap());
    if da < m {
        // Res_{m,n}(a,b) = (−1)^{n(m−da)}·lc(b)^{m−da}·Res_{da,n}(a,b)
        let k = m - da;
        let sign = if (n * k) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
        if db < n {
            return BigRational::zero();
        }
        return sign * Pow::pow(&b.lc(), k) * euclid_resultant(a, da, b, n);
    }
    if db < n {
        let k = n - db;
        return Pow::pow(&a.lc(), k) * euclid_resultant(a, m, b, db);
    }
    if n == 0 {
        return Pow::pow(&b.lc(), m);
    }
    if m < n {
        let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
        return sign * euclid_resultant(b, n, a, m);
    }
    let r = a.rem(b);
    let Some(dr) = r.degree() else {
        return BigRational::zero();
    };
    // Res(a,b) = (−1)^{mn} lc(b)^{m−dr} Res(b, r)
    let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    sign * Pow::pow(&b.lc(), m - dr) * euclid_resultant(b, n, &r, dr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_resultants_agree() {
        let a = UPoly::from_i64(&[-2, 0, 1]);
        let b = UPoly::from_i64(&[1, 3, 0, 2]);
        assert_eq!(sylvester_resultant(&a, 2, &b, 3), euclid_resultant(&a, 2, &b, 3));
        // Res(a, b) = lc(a)^n Π b(αᵢ), here b(1) = −1
        let r = sylvester_resultant(&UPoly::from_i64(&[-1, 1]), 1, &UPoly::from_i64(&[-2, 1]), 1);
        assert_eq!(r, rat(-1));
        // common root
        let c = UPoly::from_i64(&[-1, 1]);
        let d = UPoly::from_i64(&[1, 0, -1]);
        assert!(sylvester_resultant(&c, 1, &d, 2).is_zero());
    }

    #[test]
    fn discriminant_of_circle() {
        // Res_u(t² + u² − 1, 2u) = 4(t² − 1)
        let g = BiPoly::from_i64(&[((2, 0), 1), ((0, 2), 1), ((0, 0), -1)]);
        let r = resultant_u(&g, &g.d_u());
        assert_eq!(r, UPoly::from_i64(&[-4, 0, 4]));
        assert_eq!(r, resultant_u_direct(&g, &g.d_u()));
    }
}
