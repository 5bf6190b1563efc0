//! Dense bivariate polynomials over ℚ in variables `t`, `u`.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::upoly::{rat, UPoly};

/// `c[i][j]` is the coefficient of `tⁱ uʲ`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    c: Vec<Vec<BigRational>>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { c: Vec::new() }
    }

    pub fn constant(x: BigRational) -> Self {
        BiPoly::from_terms([((0, 0), x)])
    }

    pub fn t() -> Self {
        BiPoly::from_terms([((1, 0), BigRational::one())])
    }

    pub fn u() -> Self {
        BiPoly::from_terms([((0, 1), BigRational::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), BigRational)>>(terms: I) -> Self {
        let mut p = BiPoly::zero();
        for ((i, j), x) in terms {
            p.add_term(i, j, &x);
        }
        p.trim();
        p
    }

    pub fn from_i64(terms: &[((usize, usize), i64)]) -> Self {
        BiPoly::from_terms(terms.iter().map(|&(k, x)| (k, rat(x))))
    }

    fn trim(&mut self) {
        for row in &mut self.c {
            while row.last().is_some_and(|x| x.is_zero()) {
                row.pop();
            }
        }
        while self.c.last().is_some_and(|r| r.is_empty()) {
            self.c.pop();
        }
    }

    pub fn add_term(&mut self, i: usize, j: usize, x: &BigRational) {
        if self.c.len() <= i {
            self.c.resize(i + 1, Vec::new());
        }
        let row = &mut self.c[i];
        if row.len() <= j {
            row.resize(j + 1, BigRational::zero());
        }
        row[j] += x;
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        self.c
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &BigRational)> {
        self.c
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(j, x)| ((i, j), x)))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms().map(|((i, j), _)| i + j).max()
    }

    pub fn degree_t(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn degree_u(&self) -> Option<usize> {
        self.terms().map(|((_, j), _)| j).max()
    }

    pub fn eval(&self, t: &BigRational, u: &BigRational) -> BigRational {
        self.eval_t(t).eval(u)
    }

    /// Specializes `t`, leaving a polynomial in `u`.
    pub fn eval_t(&self, t: &BigRational) -> UPoly {
        let n = self.degree_u().map_or(0, |d| d + 1);
        let mut out = vec![BigRational::zero(); n];
        let mut pow = BigRational::one();
        for row in &self.c {
            for (j, x) in row.iter().enumerate() {
                out[j] += x * &pow;
            }
            pow *= t;
        }
        UPoly::new(out)
    }

    /// Specializes `u`, leaving a polynomial in `t`.
    pub fn eval_u(&self, u: &BigRational) -> UPoly {
        UPoly::new(self.c.iter().map(|row| UPoly::new(row.clone()).eval(u)).collect())
    }

    pub fn d_t(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), x)| ((i - 1, j), x * rat(i as i64))),
        )
    }

    pub fn d_u(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), x)| ((i, j - 1), x * rat(j as i64))),
        )
    }

    pub fn scale(&self, k: &BigRational) -> BiPoly {
        BiPoly::from_terms(self.terms().map(|(e, x)| (e, x * k)))
    }

    pub fn pow(&self, e: usize) -> BiPoly {
        (0..e).fold(BiPoly::constant(BigRational::one()), |acc, _| &acc * self)
    }

    /// `self(T, U)` for polynomials `T`, `U`.
    pub fn compose(&self, t: &BiPoly, u: &BiPoly) -> BiPoly {
        let dt = self.degree_t().unwrap_or(0);
        let du = self.degree_u().unwrap_or(0);
        let tp: Vec<BiPoly> = (0..=dt).map(|k| t.pow(k)).collect();
        let up: Vec<BiPoly> = (0..=du).map(|k| u.pow(k)).collect();
        let mut out = BiPoly::zero();
        for ((i, j), x) in self.terms() {
            out = &out + &(&tp[i] * &up[j]).scale(x);
        }
        out
    }

    /// `self(t + a, u + b)`.
    pub fn translate(&self, a: &BigRational, b: &BigRational) -> BiPoly {
        let t = &BiPoly::t() + &BiPoly::constant(a.clone());
        let u = &BiPoly::u() + &BiPoly::constant(b.clone());
        self.compose(&t, &u)
    }

    /// Coefficient of `u^k` as a polynomial in `t`.
    pub fn coeff_u(&self, k: usize) -> UPoly {
        UPoly::new(self.c.iter().map(|r| r.get(k).cloned().unwrap_or_else(BigRational::zero)).collect())
    }

    /// Exchanges the roles of `t` and `u`.
    pub fn swap_vars(&self) -> BiPoly {
        BiPoly::from_terms(self.terms().map(|((i, j), x)| ((j, i), x.clone())))
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for ((i, j), x) in o.terms() {
            p.add_term(i, j, x);
        }
        p.trim();
        p
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for ((i, j), x) in o.terms() {
            p.add_term(i, j, &-x);
        }
        p.trim();
        p
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        let mut p = BiPoly::zero();
        for ((i, j), x) in self.terms() {
            for ((k, l), y) in o.terms() {
                p.add_term(i + k, j + l, &(x * y));
            }
        }
        p.trim();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_and_translation() {
        // t²u + 3u³
        let p = BiPoly::from_i64(&[((2, 1), 1), ((0, 3), 3)]);
        assert_eq!(p.d_t(), BiPoly::from_i64(&[((1, 1), 2)]));
        assert_eq!(p.d_u(), BiPoly::from_i64(&[((2, 0), 1), ((0, 2), 9)]));
        let q = p.translate(&rat(1), &rat(-2));
        assert_eq!(q.eval(&rat(0), &rat(0)), p.eval(&rat(1), &rat(-2)));
        assert_eq!(q.translate(&rat(-1), &rat(2)), p);
        assert_eq!(p.total_degree(), Some(3));
        assert_eq!(p.eval_t(&rat(2)), UPoly::from_i64(&[0, 4, 0, 3]));
    }
}
