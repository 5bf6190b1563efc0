//! Arithmetic in `K = ℚ[z]/(m)` for squarefree `m`, a product of number
//! fields. Any zero test or inversion that meets a zero divisor reports a
//! factorization of `m` instead of an answer; [`split_run`] reruns the
//! computation on each factor, so results are always per field component.

use num_rational::BigRational;
use num_traits::One;

use super::upoly::UPoly;

/// A nontrivial factorization `m = a·b` found while computing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split(pub UPoly, pub UPoly);

pub type KElem = UPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    modulus: UPoly,
}

impl NumberField {
    /// `modulus` must be squarefree of positive degree.
    pub fn new(modulus: UPoly) -> Self {
        assert!(modulus.degree().unwrap_or(0) >= 1, "modulus must have positive degree");
        NumberField {
            modulus: modulus.monic(),
        }
    }

    /// ℚ itself, as `ℚ[z]/(z)`.
    pub fn rationals() -> Self {
        NumberField::new(UPoly::x())
    }

    pub fn modulus(&self) -> &UPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    /// The generator `z`.
    pub fn generator(&self) -> KElem {
        self.reduce(&UPoly::x())
    }

    pub fn reduce(&self, p: &UPoly) -> KElem {
        p.rem(&self.modulus)
    }

    pub fn from_rat(&self, x: BigRational) -> KElem {
        UPoly::constant(x)
    }

    pub fn one(&self) -> KElem {
        UPoly::one()
    }

    pub fn add(&self, a: &KElem, b: &KElem) -> KElem {
        a + b
    }

    pub fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        a - b
    }

    pub fn neg(&self, a: &KElem) -> KElem {
        -a
    }

    pub fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        self.reduce(&(a * b))
    }

    pub fn scale(&self, a: &KElem, k: &BigRational) -> KElem {
        a.scale(k)
    }

    pub fn pow(&self, a: &KElem, e: usize) -> KElem {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    fn split_on(&self, g: UPoly) -> Split {
        let other = self.modulus.exact_div(&g).monic();
        Split(g.monic(), other)
    }

    /// Whether `a` vanishes on every component; splits if it vanishes on some.
    pub fn is_zero(&self, a: &KElem) -> Result<bool, Split> {
        if a.is_zero() {
            return Ok(true);
        }
        let g = a.gcd(&self.modulus);
        if g.degree() == Some(0) {
            Ok(false)
        } else {
            Err(self.split_on(g))
        }
    }

    /// Inverse of an element that is nonzero on every component.
    pub fn inv(&self, a: &KElem) -> Result<KElem, Split> {
        // extended Euclid on (a, m)
        let (mut r0, mut r1) = (self.modulus.clone(), a.clone());
        let (mut s0, mut s1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd up to a constant, s0·a ≡ r0
        match r0.degree() {
            Some(0) => {
                let c = BigRational::one() / r0.lc();
                Ok(self.reduce(&s0.scale(&c)))
            }
            Some(d) if d < self.degree() => Err(self.split_on(r0)),
            _ => panic!("inverting zero in a number field"),
        }
    }

    pub fn div(&self, a: &KElem, b: &KElem) -> Result<KElem, Split> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// Runs `f` over `ℚ[z]/(m)`, splitting `m` whenever `f` reports a zero
/// divisor. Returns the final factors of `m` with their results, in a
/// deterministic order.
pub fn split_run<T, F>(m: &UPoly, f: F) -> Vec<(UPoly, T)>
where
    F: Fn(&NumberField) -> Result<T, Split>,
{
    let mut work = vec![m.monic()];
    let mut done = Vec::new();
    while let Some(cur) = work.pop() {
        let field = NumberField::new(cur.clone());
        match f(&field) {
            Ok(v) => done.push((cur, v)),
            Err(Split(a, b)) => {
                work.push(b);
                work.push(a);
            }
        }
    }
    done
}

/// Polynomials over `K`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPoly(pub Vec<KElem>);

impl KPoly {
    pub fn from_rational(p: &UPoly) -> Self {
        KPoly(p.coeffs().iter().map(|c| UPoly::constant(c.clone())).collect())
    }

    /// Drops leading coefficients that vanish; may split.
    pub fn normalize(mut self, k: &NumberField) -> Result<Self, Split> {
        while let Some(last) = self.0.last() {
            if k.is_zero(last)? {
                self.0.pop();
            } else {
                break;
            }
        }
        Ok(self)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Remainder of `self` by a normalized nonzero `d`.
    pub fn rem(&self, d: &KPoly, k: &NumberField) -> Result<KPoly, Split> {
        let dd = d.degree().expect("nonzero divisor");
        let inv_lc = k.inv(d.0.last().unwrap())?;
        let mut r = self.0.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let f = k.mul(&r[top], &inv_lc);
            for (j, c) in d.0.iter().enumerate() {
                r[top - dd + j] = k.sub(&r[top - dd + j], &k.mul(&f, c));
            }
            r.pop();
        }
        KPoly(r).normalize(k)
    }

    /// Monic gcd; both inputs may be zero.
    pub fn gcd(a: &KPoly, b: &KPoly, k: &NumberField) -> Result<KPoly, Split> {
        let mut a = a.clone().normalize(k)?;
        let mut b = b.clone().normalize(k)?;
        while b.degree().is_some() {
            let r = a.rem(&b, k)?;
            a = b;
            b = r;
        }
        a.monic(k)
    }

    pub fn monic(&self, k: &NumberField) -> Result<KPoly, Split> {
        let Some(lc) = self.0.last() else {
            return Ok(self.clone());
        };
        let inv = k.inv(lc)?;
        Ok(KPoly(self.0.iter().map(|c| k.mul(c, &inv)).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for KPoly {
    fn default() -> Self {
        KPoly(Vec::new())
    }
}

pub fn kzero() -> KElem {
    UPoly::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::rat;

    #[test]
    fn inverse_in_quadratic_field() {
        let k = NumberField::new(UPoly::from_i64(&[-2, 0, 1])); // √2
        let z = k.generator();
        let a = &z + &UPoly::one();
        let inv = k.inv(&a).unwrap();
        assert_eq!(k.mul(&a, &inv), k.one());
    }

    #[test]
    fn splits_on_zero_divisor() {
        // z² − 1 = (z − 1)(z + 1)
        let m = UPoly::from_i64(&[-1, 0, 1]);
        let k = NumberField::new(m.clone());
        let a = &k.generator() - &UPoly::one();
        assert!(k.is_zero(&a).is_err());
        let results = split_run(&m, |k| {
            let a = &k.generator() - &UPoly::one();
            k.is_zero(&a)
        });
        let mut r: Vec<(UPoly, bool)> = results;
        r.sort_by_key(|(p, _)| p.coeff(0));
        assert_eq!(r[0], (UPoly::from_i64(&[-1, 1]), true));
        assert_eq!(r[1], (UPoly::from_i64(&[1, 1]), false));
    }

    #[test]
    fn gcd_over_extension() {
        // over ℚ(√2): gcd(u² − 2, u − √2) = u − √2
        let k = NumberField::new(UPoly::from_i64(&[-2, 0, 1]));
        let z = k.generator();
        let a = KPoly(vec![UPoly::constant(rat(-2)), kzero(), k.one()]);
        let b = KPoly(vec![-&z, k.one()]);
        assert_eq!(KPoly::gcd(&a, &b, &k).unwrap(), b);
    }
}
