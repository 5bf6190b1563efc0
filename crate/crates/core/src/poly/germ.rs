//! ADE classification of plane curve germs `f(X, Y) = 0` at the origin,
//! with coefficients in a number field component.
//!
//! Multiplicity 2 uses the splitting lemma: solve `f_X = 0` for `X` as a
//! power series in `Y`; the order of the restriction is `k + 1` for `A_k`.
//! Multiplicity 3 moves the repeated tangent to `X = 0` and blows up once;
//! the strict transform at the tangent point decides between the `D` and
//! `E` series.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::bipoly::BiPoly;
use super::field::{split_run, KElem, NumberField, Split};
use super::upoly::{rat, UPoly};

/// Highest power of `Y` examined in the splitting lemma, so the largest
/// recognized `A_k` is `A_15`.
pub const ORDER_BOUND: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GermType {
    Smooth,
    A(u32),
    D(u32),
    E(u32),
    NotSimple,
    Unknown,
}

impl GermType {
    pub fn is_simple(self) -> bool {
        matches!(self, GermType::A(_) | GermType::D(_) | GermType::E(_))
    }

    pub fn milnor_number(self) -> Option<u32> {
        match self {
            GermType::Smooth => Some(0),
            GermType::A(k) | GermType::D(k) | GermType::E(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for GermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GermType::Smooth => f.write_str("smooth"),
            GermType::A(k) => write!(f, "A{k}"),
            GermType::D(k) => write!(f, "D{k}"),
            GermType::E(k) => write!(f, "E{k}"),
            GermType::NotSimple => f.write_str("not simple"),
            GermType::Unknown => f.write_str("unknown"),
        }
    }
}

/// A polynomial in `X`, `Y` with coefficients in `K`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KBiPoly(pub BTreeMap<(usize, usize), KElem>);

impl KBiPoly {
    pub fn from_rational(p: &BiPoly) -> Self {
        KBiPoly(p.terms().map(|(e, x)| (e, UPoly::constant(x.clone()))).collect())
    }

    pub fn coeff(&self, i: usize, j: usize) -> KElem {
        self.0.get(&(i, j)).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: (usize, usize), x: KElem, k: &NumberField) {
        let cur = self.0.remove(&e).unwrap_or_default();
        let s = k.add(&cur, &x);
        if !s.is_zero() {
            self.0.insert(e, s);
        }
    }

    fn mul(&self, o: &KBiPoly, k: &NumberField) -> KBiPoly {
        let mut out = KBiPoly::default();
        for (&(i, j), a) in &self.0 {
            for (&(p, q), b) in &o.0 {
                out.add_term((i + p, j + q), k.mul(a, b), k);
            }
        }
        out
    }

    fn linear(cx: KElem, cy: KElem, c0: KElem) -> KBiPoly {
        let mut m = BTreeMap::new();
        for (e, v) in [((1, 0), cx), ((0, 1), cy), ((0, 0), c0)] {
            if !v.is_zero() {
                m.insert(e, v);
            }
        }
        KBiPoly(m)
    }

    /// `self(X', Y')` with `X`, `Y` replaced by the given polynomials.
    pub fn compose(&self, x: &KBiPoly, y: &KBiPoly, k: &NumberField) -> KBiPoly {
        let dx = self.0.keys().map(|e| e.0).max().unwrap_or(0);
        let dy = self.0.keys().map(|e| e.1).max().unwrap_or(0);
        let one = KBiPoly(BTreeMap::from([((0, 0), k.one())]));
        let mut xp = vec![one.clone()];
        for _ in 0..dx {
            xp.push(xp.last().unwrap().mul(x, k));
        }
        let mut yp = vec![one];
        for _ in 0..dy {
            yp.push(yp.last().unwrap().mul(y, k));
        }
        let mut out = KBiPoly::default();
        for (&(i, j), c) in &self.0 {
            for (&e, v) in &xp[i].mul(&yp[j], k).0 {
                out.add_term(e, k.mul(c, v), k);
            }
        }
        out
    }

    /// `self(X + a, Y + b)`.
    pub fn translate(&self, a: &KElem, b: &KElem, k: &NumberField) -> KBiPoly {
        let x = KBiPoly::linear(k.one(), UPoly::zero(), a.clone());
        let y = KBiPoly::linear(UPoly::zero(), k.one(), b.clone());
        self.compose(&x, &y, k)
    }

    fn d_x(&self, k: &NumberField) -> KBiPoly {
        let mut out = KBiPoly::default();
        for (&(i, j), c) in &self.0 {
            if i > 0 {
                out.add_term((i - 1, j), k.scale(c, &rat(i as i64)), k);
            }
        }
        out
    }

    fn swap(&self) -> KBiPoly {
        KBiPoly(self.0.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect())
    }
}

/// Lowest total degree with a nonzero coefficient, searched up to `bound`.
fn multiplicity(f: &KBiPoly, bound: usize, k: &NumberField) -> Result<Option<usize>, Split> {
    for d in 0..=bound {
        for (&(i, j), c) in &f.0 {
            if i + j == d && !k.is_zero(c)? {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Truncated power series in `Y` over `K`.
fn series_mul(a: &[KElem], b: &[KElem], n: usize, k: &NumberField) -> Vec<KElem> {
    let mut out = vec![UPoly::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] = k.add(&out[i + j], &k.mul(x, y));
            }
        }
    }
    out
}

/// `f(φ(Y), Y)` mod `Y^n`.
fn substitute_series(f: &KBiPoly, phi: &[KElem], n: usize, k: &NumberField) -> Vec<KElem> {
    let dx = f.0.keys().map(|e| e.0).max().unwrap_or(0);
    let mut powers = vec![{
        let mut one = vec![UPoly::zero(); n];
        one[0] = k.one();
        one
    }];
    for _ in 0..dx {
        powers.push(series_mul(powers.last().unwrap(), phi, n, k));
    }
    let mut out = vec![UPoly::zero(); n];
    for (&(i, j), c) in &f.0 {
        for (m, p) in powers[i].iter().enumerate() {
            if m + j < n && !p.is_zero() {
                out[m + j] = k.add(&out[m + j], &k.mul(c, p));
            }
        }
    }
    out
}

/// Classifies the germ of `f` at the origin over one field component.
pub fn classify_germ_in(f: &KBiPoly, k: &NumberField) -> Result<GermType, Split> {
    classify_rec(f, k, 0)
}

fn classify_rec(f: &KBiPoly, k: &NumberField, depth: usize) -> Result<GermType, Split> {
    if !k.is_zero(&f.coeff(0, 0))? {
        // not on the curve
        return Ok(GermType::Unknown);
    }
    let Some(m) = multiplicity(f, 4, k)? else {
        return Ok(GermType::NotSimple);
    };
    match m {
        1 => Ok(GermType::Smooth),
        2 => classify_double(f, k),
        3 if depth == 0 => classify_triple(f, k),
        _ => Ok(GermType::NotSimple),
    }
}

fn classify_double(f: &KBiPoly, k: &NumberField) -> Result<GermType, Split> {
    let (a, b, c) = (f.coeff(2, 0), f.coeff(1, 1), f.coeff(0, 2));
    let disc = k.sub(&k.mul(&b, &b), &k.scale(&k.mul(&a, &c), &rat(4)));
    if !k.is_zero(&disc)? {
        return Ok(GermType::A(1));
    }
    // rank one: bring the quadratic part to λX²
    let g = if !k.is_zero(&a)? {
        let shift = k.neg(&k.div(&b, &k.scale(&a, &rat(2)))?);
        let x = KBiPoly::linear(k.one(), shift, UPoly::zero());
        let y = KBiPoly::linear(UPoly::zero(), k.one(), UPoly::zero());
        f.compose(&x, &y, k)
    } else {
        f.swap()
    };
    let lambda2 = k.scale(&g.coeff(2, 0), &rat(2));
    let inv = k.inv(&lambda2)?;
    let n = ORDER_BOUND + 2;
    let fx = g.d_x(k);
    // φ ← φ − f_X(φ, Y)/(2λ) gains at least one order per step
    let mut phi = vec![UPoly::zero(); n];
    for _ in 0..n {
        let r = substitute_series(&fx, &phi, n, k);
        for (p, x) in phi.iter_mut().zip(&r) {
            *p = k.sub(p, &k.mul(x, &inv));
        }
    }
    let h = substitute_series(&g, &phi, n, k);
    for (ord, c) in h.iter().enumerate().take(ORDER_BOUND + 1) {
        if !k.is_zero(c)? {
            return Ok(if ord >= 3 { GermType::A(ord as u32 - 1) } else { GermType::Unknown });
        }
    }
    Ok(GermType::Unknown)
}

fn binary_cubic(f: &KBiPoly) -> [KElem; 4] {
    [f.coeff(3, 0), f.coeff(2, 1), f.coeff(1, 2), f.coeff(0, 3)]
}

fn classify_triple(f: &KBiPoly, k: &NumberField) -> Result<GermType, Split> {
    // make the X³ coefficient nonzero by Y ↦ Y + sX
    let mut f = f.clone();
    let mut s = 0i64;
    loop {
        let [c30, ..] = binary_cubic(&f);
        if !k.is_zero(&c30)? {
            break;
        }
        s += 1;
        let x = KBiPoly::linear(k.one(), UPoly::zero(), UPoly::zero());
        let y = KBiPoly::linear(UPoly::constant(rat(1)), k.one(), UPoly::zero());
        f = f.compose(&x, &y, k);
        assert!(s <= 4, "a nonzero binary cubic has at most three roots");
    }
    let [a, b, c, d] = binary_cubic(&f);
    let m = |x: &KElem, y: &KElem| k.mul(x, y);
    let sc = |x: &KElem, n: i64| k.scale(x, &rat(n));
    // discriminant of a r³ + b r² + c r + d
    let disc = {
        let t1 = m(&m(&b, &b), &m(&c, &c));
        let t2 = sc(&m(&a, &m(&c, &m(&c, &c))), 4);
        let t3 = sc(&m(&d, &m(&b, &m(&b, &b))), 4);
        let t4 = sc(&m(&m(&a, &a), &m(&d, &d)), 27);
        let t5 = sc(&m(&m(&a, &b), &m(&c, &d)), 18);
        k.add(&k.sub(&k.sub(&k.sub(&t1, &t2), &t3), &t4), &t5)
    };
    if !k.is_zero(&disc)? {
        return Ok(GermType::D(4));
    }
    let h0 = k.sub(&m(&b, &b), &sc(&m(&a, &c), 3));
    let triple = k.is_zero(&h0)?;
    // the repeated root r₀ of the cubic in r = X/Y
    let r0 = if triple {
        k.neg(&k.div(&b, &sc(&a, 3))?)
    } else {
        let num = k.sub(&sc(&m(&a, &d), 9), &m(&b, &c));
        k.div(&num, &sc(&h0, 2))?
    };
    // X = X' + r₀Y puts the repeated tangent on X' = 0
    let x = KBiPoly::linear(k.one(), r0, UPoly::zero());
    let y = KBiPoly::linear(UPoly::zero(), k.one(), UPoly::zero());
    let g = f.compose(&x, &y, k);
    // chart X' = X₁Y of the blow-up, divided by Y³
    let mut strict = KBiPoly::default();
    for (&(i, j), c) in &g.0 {
        if i + j < 3 {
            if !k.is_zero(c)? {
                return Ok(GermType::Unknown);
            }
            continue;
        }
        strict.add_term((i, i + j - 3), c.clone(), k);
    }
    let sub = classify_rec(&strict, k, 1)?;
    Ok(match (triple, sub) {
        (_, GermType::Unknown) => GermType::Unknown,
        (false, GermType::Smooth) => GermType::D(5),
        (false, GermType::A(j)) => GermType::D(5 + j),
        (true, GermType::Smooth) => GermType::E(6),
        (true, GermType::A(1)) => GermType::E(7),
        (true, GermType::A(2)) => GermType::E(8),
        _ => GermType::NotSimple,
    })
}

/// Classifies the germ at the origin of a polynomial over ℚ.
pub fn classify_germ(f: &BiPoly) -> GermType {
    let results = split_run(&UPoly::x(), |k| classify_germ_in(&KBiPoly::from_rational(f), k));
    results.into_iter().next().expect("ℚ has one component").1
}

/// Classifies the germ of `f` at `(t₀, u₀) ∈ K²` on every component of
/// `K = ℚ[z]/(m)`; coordinates are given as polynomials in `z`.
pub fn classify_at_point(f: &BiPoly, m: &UPoly, t0: &UPoly, u0: &UPoly) -> Vec<(UPoly, GermType)> {
    split_run(m, |k| {
        let g = KBiPoly::from_rational(f).translate(&k.reduce(t0), &k.reduce(u0), k);
        classify_germ_in(&g, k)
    })
}

/// Whether `f` vanishes to order at least 2 at the origin (a singular point).
pub fn is_singular_at_origin(f: &BiPoly) -> bool {
    f.coeff(0, 0).is_zero() && f.coeff(1, 0).is_zero() && f.coeff(0, 1).is_zero()
}

/// Local models `x² + y^{k+1}`, `x²y + y^{k−1}`, `x³ + y⁴`, `x³ + xy³`, `x³ + y⁵`.
pub fn normal_form(t: GermType) -> Option<BiPoly> {
    let one = BigRational::one();
    let mono = |i: usize, j: usize| ((i, j), one.clone());
    Some(match t {
        GermType::A(k) => BiPoly::from_terms([mono(2, 0), mono(0, k as usize + 1)]),
        GermType::D(k) if k >= 4 => BiPoly::from_terms([mono(2, 1), mono(0, k as usize - 1)]),
        GermType::E(6) => BiPoly::from_terms([mono(3, 0), mono(0, 4)]),
        GermType::E(7) => BiPoly::from_terms([mono(3, 0), mono(1, 3)]),
        GermType::E(8) => BiPoly::from_terms([mono(3, 0), mono(0, 5)]),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(terms: &[((usize, usize), i64)]) -> BiPoly {
        BiPoly::from_i64(terms)
    }

    #[test]
    fn normal_forms_classify_to_themselves() {
        let types = [
            GermType::A(1),
            GermType::A(2),
            GermType::A(5),
            GermType::A(12),
            GermType::D(4),
            GermType::D(5),
            GermType::D(6),
            GermType::D(9),
            GermType::E(6),
            GermType::E(7),
            GermType::E(8),
        ];
        for t in types {
            assert_eq!(classify_germ(&normal_form(t).unwrap()), t, "{t}");
        }
    }

    #[test]
    fn disguised_models() {
        // (x + y²)² + y⁴ is A3 after X = x + y²
        let f = bp(&[((2, 0), 1), ((1, 2), 2), ((0, 4), 2)]);
        assert_eq!(classify_germ(&f), GermType::A(3));
        // x³ + y³ has three distinct tangents
        assert_eq!(classify_germ(&bp(&[((3, 0), 1), ((0, 3), 1)])), GermType::D(4));
        // y²x + x⁴: D5 with the double tangent along y = 0 and no X³ term
        assert_eq!(classify_germ(&bp(&[((1, 2), 1), ((4, 0), 1)])), GermType::D(5));
        // (x − y)³ + y⁴ is E6 with a tilted tangent
        let f = bp(&[((3, 0), 1), ((2, 1), -3), ((1, 2), 3), ((0, 3), -1), ((0, 4), 1)]);
        assert_eq!(classify_germ(&f), GermType::E(6));
    }

    #[test]
    fn non_simple_and_degenerate() {
        assert_eq!(classify_germ(&bp(&[((4, 0), 1), ((0, 4), 1)])), GermType::NotSimple);
        assert_eq!(classify_germ(&bp(&[((3, 0), 1), ((0, 6), 1)])), GermType::NotSimple);
        // x² is non-reduced: the splitting lemma never terminates
        assert_eq!(classify_germ(&bp(&[((2, 0), 1)])), GermType::Unknown);
        assert_eq!(classify_germ(&bp(&[((1, 0), 1), ((0, 2), 1)])), GermType::Smooth);
    }

    #[test]
    fn classification_over_extension() {
        // node of y² − x²(x + 1) translated to (√2, 0) is still A1 over ℚ(√2)
        let m = UPoly::from_i64(&[-2, 0, 1]);
        let f = bp(&[((0, 2), 1), ((3, 0), -1), ((2, 0), -1)]);
        // f(t − √2, u) has its node at t = √2
        let shifted = {
            let k = NumberField::new(m.clone());
            let z = k.generator();
            KBiPoly::from_rational(&f).translate(&-&z, &UPoly::zero(), &k)
        };
        let k = NumberField::new(m.clone());
        let back = shifted.translate(&k.generator(), &UPoly::zero(), &k);
        assert_eq!(classify_germ_in(&back, &k).unwrap(), GermType::A(1));
        let r = classify_at_point(&f, &m, &UPoly::zero(), &UPoly::zero());
        assert_eq!(r, vec![(m, GermType::A(1))]);
    }
}
