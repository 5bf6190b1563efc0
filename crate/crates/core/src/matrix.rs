//! Dense matrices over ℤ and ℚ.
//!
//! Everything here is exact. Matrices are stored row-major as `Vec<Vec<_>>`;
//! the helpers assume rectangular input and panic on ragged rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type IntVector = Vec<BigInt>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> IntMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn vec_from_i64(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn ncols(m: &IntMatrix) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    let (r, c) = (m.len(), ncols(m));
    let mut t = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            t[j][i] = m[i][j].clone();
        }
    }
    t
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), ncols(b));
    assert!(a.is_empty() || ncols(a) == k, "dimension mismatch in product");
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn mul_vec(a: &IntMatrix, v: &[BigInt]) -> IntVector {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn neg(a: &IntMatrix) -> IntMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_symmetric(m: &IntMatrix) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// `B^T G B`.
pub fn congruence(g: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    mul(&transpose(b), &mul(g, b))
}

/// Columns of `vectors` (given as rows) stacked into a matrix.
pub fn columns(vectors: &[IntVector]) -> IntMatrix {
    transpose(&vectors.to_vec())
}

/// Fraction-free (Bareiss) determinant.
pub fn det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Smith normal form `left · A · right = diag(d)` with unimodular transforms.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, nonnegative, each dividing the next; length `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let rows = a.len();
    let cols = ncols(a);
    let mut m = a.clone();
    let mut left = identity(rows);
    let mut right = identity(cols);
    let steps = rows.min(cols);

    for k in 0..steps {
        loop {
            // pivot of minimal absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => m[i][j].abs() < m[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            m.swap(k, pi);
            left.swap(k, pi);
            for r in m.iter_mut() {
                r.swap(k, pj);
            }
            for r in right.iter_mut() {
                r.swap(k, pj);
            }

            let mut clean = true;
            for i in k + 1..rows {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = m[i][k].div_floor(&m[k][k]);
                row_axpy(&mut m, i, k, &q);
                row_axpy(&mut left, i, k, &q);
                if !m[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..cols {
                if m[k][j].is_zero() {
                    continue;
                }
                let q = m[k][j].div_floor(&m[k][k]);
                col_axpy(&mut m, j, k, &q);
                col_axpy(&mut right, j, k, &q);
                if !m[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition on the remaining block
            let bad = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &m[k][k]).is_zero());
            match bad {
                Some((i, _)) => {
                    // m[k] += m[i]; retry
                    let one = -BigInt::one();
                    row_axpy(&mut m, k, i, &one);
                    row_axpy(&mut left, k, i, &one);
                }
                None => break,
            }
        }
        if m[k][k].is_negative() {
            for x in m[k].iter_mut() {
                *x = -x.clone();
            }
            for x in left[k].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diagonal = (0..steps).map(|k| m[k][k].clone()).collect();
    Smith {
        diagonal,
        left,
        right,
    }
}

/// row[target] -= q * row[source]
fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    let src = m[source].clone();
    for (x, s) in m[target].iter_mut().zip(src) {
        *x -= q * s;
    }
}

/// col[target] -= q * col[source]
fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

/// A ℤ-basis of `{x ∈ ℤⁿ : A x = 0}`. The result is saturated in ℤⁿ and
/// returned in row-Hermite form, so equal kernels give equal bases.
pub fn integer_kernel(a: &IntMatrix, n: usize) -> Vec<IntVector> {
    if a.is_empty() {
        return identity(n);
    }
    assert_eq!(ncols(a), n);
    let snf = smith_normal_form(a);
    let rank = snf.diagonal.iter().filter(|d| !d.is_zero()).count();
    // A = L^{-1} D R^{-1}; kernel = R · (span of e_rank..e_n)
    let basis: Vec<IntVector> = (rank..n)
        .map(|j| snf.right.iter().map(|row| row[j].clone()).collect())
        .collect();
    hermite_rows(&basis)
}

/// Row-style Hermite normal form of a list of row vectors; zero rows are
/// dropped. Pivots are positive and entries above a pivot are reduced into
/// `[0, pivot)`.
pub fn hermite_rows(vectors: &[IntVector]) -> Vec<IntVector> {
    let mut m: IntMatrix = vectors.to_vec();
    let rows = m.len();
    let cols = ncols(&m);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let piv = (r..rows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by(|&i, &j| m[i][c].abs().cmp(&m[j][c].abs()));
            let Some(p) = piv else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                row_axpy(&mut m, i, r, &q);
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                row_axpy(&mut m, i, r, &q);
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Inverse over ℚ; `None` when singular.
pub fn rational_inverse(m: &IntMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a = to_rational(m);
    let mut inv: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let pivot = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &pivot;
            inv[c][j] = &inv[c][j] / &pivot;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
                let t = &f * &inv[c][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = from_i64(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(det(&m), BigInt::from(4));
        let s = from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(det(&s), BigInt::from(-1));
    }

    #[test]
    fn smith_form_of_small_matrix() {
        let m = from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec_from_i64(&[2, 6, 12]));
        let d = mul(&mul(&s.left, &m), &s.right);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
        assert_eq!(det(&s.left).abs(), BigInt::one());
        assert_eq!(det(&s.right).abs(), BigInt::one());
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y + 3z = 0 has a rank-2 saturated kernel
        let a = from_i64(&[vec![2, 4, 6]]);
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mul_vec(&a, v).iter().all(Zero::is_zero));
        }
        let s = smith_normal_form(&k);
        assert!(s.diagonal.iter().all(|d| d.is_one()));
    }

    #[test]
    fn rational_inverse_round_trip() {
        let m = from_i64(&[vec![-2, 1], vec![1, -2]]);
        let inv = rational_inverse(&m).unwrap();
        assert_eq!(inv[0][0], BigRational::new((-2).into(), 3.into()));
        assert!(rational_inverse(&from_i64(&[vec![1, 2], vec![2, 4]])).is_none());
    }
}
