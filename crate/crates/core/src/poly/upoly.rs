//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly(Vec<BigRational>);

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        UPoly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        UPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        UPoly::new(self.0.iter().map(|x| x / &l).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); r.len() - dd];
        let lc = d.lc();
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let f = &r[k] / &lc;
            for (j, c) in d.0.iter().enumerate() {
                r[k - dd + j] -= &f * c;
            }
            quo[k - dd] = f;
        }
        r.truncate(dd);
        (UPoly::new(quo), UPoly::new(r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero only if both inputs are zero).
    ///
    /// Coprime inputs are recognized modulo a large prime first; otherwise
    /// the Euclidean sequence runs on integer primitive parts, which keeps
    /// coefficient growth in check.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() { other.monic() } else { self.monic() };
        }
        let ai = self.primitive_integer();
        let bi = other.primitive_integer();
        if coprime_mod_p(&ai, &bi) {
            return UPoly::one();
        }
        let from_ints = |v: Vec<BigInt>| UPoly::new(v.into_iter().map(BigRational::from_integer).collect());
        let mut a = from_ints(ai);
        let mut b = from_ints(bi);
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = from_ints(r.primitive_integer());
        }
        a.monic()
    }

    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).monic()
    }

    /// Multiplicity of `x` as a factor.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// Integer primitive part with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = self.0.iter().fold(BigInt::one(), |a, c| a.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |a, c| a.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Interpolates `values[k]` at the nodes `0, 1, …, n−1`.
    pub fn interpolate_at_naturals(values: &[BigRational]) -> UPoly {
        // Newton divided differences
        let n = values.len();
        let mut dd: Vec<BigRational> = values.to_vec();
        for level in 1..n {
            for k in (level..n).rev() {
                dd[k] = (&dd[k] - &dd[k - 1]) / rat(level as i64);
            }
        }
        let mut p = UPoly::zero();
        for k in (0..n).rev() {
            // p = p·(x − k) + dd[k]
            p = &(&p * &UPoly::from_i64(&[-(k as i64), 1])) + &UPoly::constant(dd[k].clone());
        }
        p
    }

    pub fn pow(&self, e: u32) -> UPoly {
        (0..e).fold(UPoly::one(), |acc, _| &acc * self)
    }
}

/// A prime just below 2^62 that divides neither leading coefficient.
const PRIMES: [u64; 3] = [(1 << 62) - 57, (1 << 62) - 87, (1 << 61) - 1];

/// True only if the integer polynomials are coprime over ℚ: reduction mod a
/// prime not dividing either leading coefficient can only raise the gcd degree.
fn coprime_mod_p(a: &[BigInt], b: &[BigInt]) -> bool {
    let Some(p) = PRIMES.iter().copied().find(|&p| {
        let pb = BigInt::from(p);
        !(a.last().unwrap() % &pb).is_zero() && !(b.last().unwrap() % &pb).is_zero()
    }) else {
        return false;
    };
    let pb = BigInt::from(p);
    let reduce = |v: &[BigInt]| -> Vec<u64> {
        v.iter()
            .map(|c| {
                let r = c.mod_floor(&pb);
                r.to_u64_digits().1.first().copied().unwrap_or(0)
            })
            .collect()
    };
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let inv = |x: u64| {
        let (mut base, mut e, mut acc) = (x, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let (mut x, mut y) = (reduce(a), reduce(b));
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        // x mod y
        let dy = y.len() - 1;
        let li = inv(*y.last().unwrap());
        while x.len() > dy && !x.is_empty() {
            let top = x.len() - 1;
            let f = mul(x[top], li);
            for (j, &c) in y.iter().enumerate() {
                let k = top - dy + j;
                x[k] = (x[k] + p - mul(f, c)) % p;
            }
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    x.len() == 1
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let ints = self.primitive_integer();
        let mut first = true;
        for (k, c) in ints.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("z")?,
                (1, false) => write!(f, "{a}*z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{a}*z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_with_large_coefficients() {
        let big = UPoly::from_i64(&[123456789, -987654321, 1000000007]);
        let common = UPoly::from_i64(&[-3, 7]);
        let a = &(&big * &common) * &UPoly::from_i64(&[5, 1]);
        let b = &common * &UPoly::from_i64(&[-11, 0, 13]);
        assert_eq!(a.gcd(&b), common.monic());
        assert_eq!(big.gcd(&b), UPoly::one());
        assert_eq!(UPoly::zero().gcd(&b), b.monic());
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = UPoly::from_i64(&[-1, 0, 1]); // x² − 1
        let b = UPoly::from_i64(&[1, 1]); // x + 1
        assert_eq!(a.gcd(&b), b);
        let sq = &a * &a;
        assert_eq!(sq.squarefree(), a);
        assert_eq!(UPoly::zero().gcd(&a), a);
        assert_eq!(a.gcd(&UPoly::from_i64(&[2, 1])), UPoly::one());
    }

    #[test]
    fn interpolation_round_trip() {
        let p = UPoly::from_i64(&[3, -2, 0, 5, 1]);
        let vals: Vec<_> = (0..7).map(|k| p.eval(&rat(k))).collect();
        assert_eq!(UPoly::interpolate_at_naturals(&vals), p);
    }

    #[test]
    fn display() {
        assert_eq!(UPoly::from_i64(&[1, 0, -2]).to_string(), "2*z^2 - 1");
    }
}
