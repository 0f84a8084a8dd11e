//! Integer matrices, quadratic forms (symmetric Gram matrices), congruence
//! transforms, primitive-vector completion and exact rational
//! diagonalization.
//!
//! All vectors are column vectors. A modulus of 0 means exact arithmetic
//! over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::zmod::{self, LocalContext};

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    e: Vec<BigInt>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, e: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Mat { rows: r, cols: c, e: rows.into_iter().flatten().collect() })
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.e[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.e[i * self.cols + j]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.at(k, j);
                    *out.at_mut(i, j) += prod;
                }
            }
        }
        out
    }

    /// Entrywise reduction into [0, m); identity when m = 0.
    pub fn reduce_mod(&self, m: &BigInt) -> Mat {
        if m.is_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        for v in out.e.iter_mut() {
            *v = v.mod_floor(m);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Mat {
        let mut out = self.clone();
        for v in out.e.iter_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.e.iter_mut().zip(&other.e) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.e.iter_mut().zip(&other.e) {
            *v -= w;
        }
        out
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn from_cols(cols: Vec<Vec<BigInt>>) -> Result<Self> {
        Mat::from_rows(cols).map(|m| m.transpose())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m.at(r, k).is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    let tmp = m.at(k, j).clone();
                    *m.at_mut(k, j) = m.at(r, j).clone();
                    *m.at_mut(r, j) = tmp;
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / &prev;
                    *m.at_mut(i, j) = v;
                }
                *m.at_mut(i, k) = BigInt::zero();
            }
            prev = m.at(k, k).clone();
        }
        m.at(n - 1, n - 1) * sign
    }

    /// Determinant reduced mod m (m > 0).
    pub fn det_mod(&self, m: &BigInt) -> BigInt {
        self.det().mod_floor(m)
    }

    /// Inverse modulo `m` when the determinant is a unit mod m.
    pub fn inverse_mod(&self, m: &BigInt) -> Option<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.reduce_mod(m);
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| zmod::mod_inv(a.at(r, col), m).is_some())?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(col, j).clone();
                    *a.at_mut(col, j) = a.at(pivot, j).clone();
                    *a.at_mut(pivot, j) = tmp;
                    let tmp = inv.at(col, j).clone();
                    *inv.at_mut(col, j) = inv.at(pivot, j).clone();
                    *inv.at_mut(pivot, j) = tmp;
                }
            }
            let pinv = zmod::mod_inv(a.at(col, col), m)?;
            for j in 0..n {
                *a.at_mut(col, j) = zmod::mod_mul(a.at(col, j), &pinv, m);
                *inv.at_mut(col, j) = zmod::mod_mul(inv.at(col, j), &pinv, m);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let v = (a.at(r, j) - &f * a.at(col, j)).mod_floor(m);
                    *a.at_mut(r, j) = v;
                    let v = (inv.at(r, j) - &f * inv.at(col, j)).mod_floor(m);
                    *inv.at_mut(r, j) = v;
                }
            }
        }
        Some(inv)
    }
}

/// A quadratic form: symmetric n x n integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadForm {
    mat: Mat,
}

impl std::fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.mat)
    }
}

impl QuadForm {
    pub fn new(mat: Mat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("quadratic form must be square".into()));
        }
        for i in 0..mat.rows {
            for j in 0..i {
                if mat.at(i, j) != mat.at(j, i) {
                    return Err(Error::Schema(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(QuadForm { mat })
    }

    pub fn from_diagonal(d: &[BigInt]) -> Self {
        let mut m = Mat::zero(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            *m.at_mut(i, i) = v.clone();
        }
        QuadForm { mat: m }
    }

    pub fn identity(n: usize) -> Self {
        QuadForm { mat: Mat::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.mat.rows
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        self.mat.at(i, j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        *self.mat.at_mut(i, j) = v.clone();
        *self.mat.at_mut(j, i) = v;
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn scale(&self, c: &BigInt) -> QuadForm {
        QuadForm { mat: self.mat.scale(c) }
    }

    pub fn reduce_mod(&self, m: &BigInt) -> QuadForm {
        QuadForm { mat: self.mat.reduce_mod(m) }
    }

    pub fn det(&self) -> BigInt {
        self.mat.det()
    }

    /// Block-diagonal concatenation.
    pub fn direct_sum(parts: &[QuadForm]) -> QuadForm {
        let n: usize = parts.iter().map(|p| p.n()).sum();
        let mut m = Mat::zero(n, n);
        let mut off = 0;
        for p in parts {
            for i in 0..p.n() {
                for j in 0..p.n() {
                    *m.at_mut(off + i, off + j) = p.at(i, j).clone();
                }
            }
            off += p.n();
        }
        QuadForm { mat: m }
    }

    /// `U' Q U` reduced mod q (exact when q = 0).
    pub fn conjugate(&self, u: &Mat, q: &BigInt) -> Result<QuadForm> {
        if u.rows != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "transform has {} rows, form has {}",
                u.rows,
                self.n()
            )));
        }
        let m = u.transpose().mul(&self.mat).mul(u).reduce_mod(q);
        Ok(QuadForm { mat: m })
    }

    /// Value `x' Q x`.
    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.n());
        let mut acc = BigInt::zero();
        for i in 0..self.n() {
            for j in 0..self.n() {
                acc += self.at(i, j) * &x[i] * &x[j];
            }
        }
        acc
    }
}

/// An n x n change of basis carried modulo `modulus` (0 = integer exact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    pub mat: Mat,
    pub modulus: BigInt,
}

impl Transform {
    pub fn identity(n: usize, modulus: BigInt) -> Self {
        Transform { mat: Mat::identity(n), modulus }
    }

    pub fn new(mat: Mat, modulus: BigInt) -> Self {
        let mat = mat.reduce_mod(&modulus);
        Transform { mat, modulus }
    }

    pub fn n(&self) -> usize {
        self.mat.rows
    }

    /// Is det a unit modulo the modulus (nonzero over Z)?
    pub fn is_invertible(&self) -> bool {
        let d = self.mat.det();
        if self.modulus.is_zero() {
            d.abs().is_one()
        } else {
            zmod::mod_inv(&d, &self.modulus).is_some()
        }
    }

    pub fn compose(&self, other: &Transform) -> Transform {
        assert_eq!(self.modulus, other.modulus);
        Transform::new(self.mat.mul(&other.mat), self.modulus.clone())
    }

    pub fn inverse(&self) -> Option<Transform> {
        if self.modulus.is_zero() {
            return None;
        }
        let inv = self.mat.inverse_mod(&self.modulus)?;
        Some(Transform { mat: inv, modulus: self.modulus.clone() })
    }
}

/// Completion of a primitive vector to an invertible matrix `[x | A]`
/// modulo p^k, first column exactly `x`.
pub fn extend_primitive(x: &[BigInt], ctx: &LocalContext) -> Result<Transform> {
    let n = x.len();
    let pivot = (0..n)
        .find(|&i| x[i].gcd(&ctx.p).is_one())
        .ok_or(Error::NotPrimitive)?;
    if n == 1 {
        let mut w = Mat::zero(1, 1);
        *w.at_mut(0, 0) = x[0].clone();
        return Ok(Transform::new(w, ctx.modulus.clone()));
    }
    let inv = zmod::mod_inv(&x[pivot], &ctx.modulus).expect("pivot is a unit");
    // Build the matrix with the pivot coordinate rotated to the top, then
    // swap it back: the second column holds the pivot inverse, the rest is
    // an identity on the remaining coordinates.
    let mut w = Mat::zero(n, n);
    *w.at_mut(0, 0) = x[pivot].clone();
    let mut r = 1;
    for i in (0..n).filter(|&i| i != pivot) {
        *w.at_mut(r, 0) = x[i].clone();
        r += 1;
    }
    *w.at_mut(1, 1) = inv;
    for j in 2..n {
        *w.at_mut(j, j) = BigInt::one();
    }
    // Undo the row rotation that brought `pivot` to the top.
    let mut rows: Vec<usize> = Vec::with_capacity(n);
    rows.push(pivot);
    for i in (0..n).filter(|&i| i != pivot) {
        rows.push(i);
    }
    // rows[r] tells which original row the r-th row of w corresponds to.
    let mut m = Mat::zero(n, n);
    for r in 0..n {
        for j in 0..n {
            *m.at_mut(rows[r], j) = w.at(r, j).clone();
        }
    }
    let t = Transform::new(m, ctx.modulus.clone());
    debug_assert!(t.is_invertible());
    debug_assert!((0..n).all(|i| t.mat.at(i, 0) == &x[i].mod_floor(&ctx.modulus)));
    Ok(t)
}

/// Exact rational diagonalization `V' Q V = diag(q_1..q_n)` with positive
/// entries listed first.
#[derive(Debug, Clone)]
pub struct RationalDiag {
    pub diag: Vec<BigRational>,
    pub basis: Vec<Vec<BigRational>>,
    pub positives: usize,
}

pub fn rational_diagonalize(q: &QuadForm) -> Result<RationalDiag> {
    let n = q.n();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from(q.at(i, j).clone())).collect())
        .collect();
    let mut v: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    // v columns are the basis vectors; m = V' Q V throughout.
    for i in 0..n {
        if m[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                for r in 0..n {
                    m[r].swap(i, j);
                }
                m.swap(i, j);
                for r in 0..n {
                    v[r].swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                // Mix in column j: diagonal becomes 2*m[i][j].
                for r in 0..n {
                    let add = m[r][j].clone();
                    m[r][i] += add;
                }
                let row: Vec<BigRational> = m[j].clone();
                for c in 0..n {
                    let add = row[c].clone();
                    m[i][c] += add;
                }
                for r in 0..n {
                    let add = v[r][j].clone();
                    v[r][i] += add;
                }
            } else {
                return Err(Error::SingularForm);
            }
        }
        let pivot = m[i][i].clone();
        for j in i + 1..n {
            if m[i][j].is_zero() {
                continue;
            }
            let f = &m[i][j] / &pivot;
            for r in 0..n {
                let sub = &f * &m[r][i];
                m[r][j] -= sub;
            }
            let row: Vec<BigRational> = m[i].clone();
            for c in 0..n {
                let sub = &f * &row[c];
                m[j][c] -= sub;
            }
            for r in 0..n {
                let sub = &f * &v[r][i];
                v[r][j] -= sub;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| if m[i][i].is_positive() { 0 } else { 1 });
    let diag: Vec<BigRational> = order.iter().map(|&i| m[i][i].clone()).collect();
    let basis: Vec<Vec<BigRational>> =
        (0..n).map(|r| order.iter().map(|&c| v[r][c].clone()).collect()).collect();
    let positives = diag.iter().filter(|d| d.is_positive()).count();
    if diag.iter().any(|d| d.is_zero()) {
        return Err(Error::SingularForm);
    }
    Ok(RationalDiag { diag, basis, positives })
}

/// Signature `2a - n` where `a` counts positive eigenvalue classes over Q.
pub fn signature(q: &QuadForm) -> Result<i64> {
    let rd = rational_diagonalize(q)?;
    Ok(2 * rd.positives as i64 - q.n() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::big;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    pub fn qf(rows: &[&[i64]]) -> QuadForm {
        let m = Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| big(v)).collect()).collect(),
        )
        .unwrap();
        QuadForm::new(m).unwrap()
    }

    fn t_plus() -> QuadForm {
        qf(&[&[2, 1], &[1, 4]])
    }

    fn t_minus() -> QuadForm {
        qf(&[&[2, 1], &[1, 2]])
    }

    #[test]
    fn direct_sum_shapes() {
        let s = QuadForm::direct_sum(&[
            QuadForm::from_diagonal(&[big(1)]),
            QuadForm::from_diagonal(&[big(7)]),
        ]);
        assert_eq!(s, QuadForm::from_diagonal(&[big(1), big(7)]));
        let s = QuadForm::direct_sum(&[QuadForm::identity(2)]);
        assert_eq!(s, QuadForm::identity(2));
        let s = QuadForm::direct_sum(&[t_plus(), QuadForm::from_diagonal(&[big(3)])]);
        assert_eq!(s.n(), 3);
        assert_eq!(s.at(2, 2), &big(3));
        assert_eq!(s.at(0, 1), &big(1));
        assert_eq!(s.at(0, 2), &big(0));
    }

    #[test]
    fn dets() {
        assert_eq!(QuadForm::identity(3).det(), big(1));
        assert_eq!(t_plus().det(), big(7));
        assert_eq!(t_minus().det(), big(3));
        assert_eq!(qf(&[&[0, 1], &[1, 0]]).det(), big(-1));
    }

    #[test]
    fn det_multiplicative_over_sums() {
        let a = qf(&[&[2, 1], &[1, 4]]);
        let b = qf(&[&[3, 0], &[0, -5]]);
        let s = QuadForm::direct_sum(&[a.clone(), b.clone()]);
        assert_eq!(s.det(), a.det() * b.det());
    }

    #[test]
    fn conjugate_examples() {
        let q = QuadForm::identity(2);
        let u = Mat::from_rows(vec![
            vec![big(1), big(1)],
            vec![big(0), big(1)],
        ])
        .unwrap();
        let c = q.conjugate(&u, &big(0)).unwrap();
        assert_eq!(c, qf(&[&[1, 1], &[1, 2]]));

        let m = big(11);
        let c = q.conjugate(&Mat::identity(2), &m).unwrap();
        assert_eq!(c, q.reduce_mod(&m));
    }

    #[test]
    fn conjugate_preserves_det_class() {
        // Determinants of congruent forms differ by the square of the
        // transform determinant.
        let q = t_plus();
        let m = big(8);
        let u = Mat::from_rows(vec![
            vec![big(1), big(2)],
            vec![big(1), big(3)],
        ])
        .unwrap();
        let t = Transform::new(u.clone(), m.clone());
        assert!(t.is_invertible());
        let c = q.conjugate(&u, &m).unwrap();
        let lhs = c.det().mod_floor(&m);
        let rhs = (q.det() * u.det() * u.det()).mod_floor(&m);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_roundtrip_random() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5usize);
            let m = big([8, 9, 25, 27, 49][rng.gen_range(0..5)]);
            let mut q = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(rng.gen_range(-9..=9));
                    *q.at_mut(i, j) = v.clone();
                    *q.at_mut(j, i) = v;
                }
            }
            let q = QuadForm::new(q).unwrap();
            // Random unimodular U from shear generators.
            let mut u = Mat::identity(n);
            for _ in 0..6 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let f = big(rng.gen_range(-3..=3));
                for r in 0..n {
                    let add = u.at(r, i) * &f;
                    *u.at_mut(r, j) += add;
                }
            }
            let t = Transform::new(u.clone(), m.clone());
            let inv = t.inverse().unwrap();
            let c = q.conjugate(&u, &m).unwrap();
            let back = c.conjugate(&inv.mat, &m).unwrap();
            assert_eq!(back, q.reduce_mod(&m));
        }
    }

    #[test]
    fn extend_primitive_examples() {
        let ctx = LocalContext::new(big(2), 2).unwrap();
        let t = extend_primitive(&[big(2), big(1)], &ctx).unwrap();
        assert_eq!(t.mat.at(0, 0), &big(2));
        assert_eq!(t.mat.at(1, 0), &big(1));
        assert!(t.is_invertible());

        let ctx = LocalContext::new(big(7), 3).unwrap();
        let t = extend_primitive(&[big(1), big(0), big(0)], &ctx).unwrap();
        assert!(t.is_invertible());

        let ctx = LocalContext::new(big(5), 2).unwrap();
        let t = extend_primitive(&[big(0), big(5), big(3)], &ctx).unwrap();
        assert!(t.is_invertible());
        assert_eq!(t.mat.at(1, 0), &big(5));

        assert!(extend_primitive(&[big(5), big(10)], &ctx).is_err());
    }

    #[test]
    fn rational_diag_examples() {
        let rd = rational_diagonalize(&qf(&[&[2, 0], &[0, -3]])).unwrap();
        assert_eq!(rd.positives, 1);
        let rd = rational_diagonalize(&qf(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(rd.positives, 1);
        let rd = rational_diagonalize(&QuadForm::identity(3)).unwrap();
        assert_eq!(rd.positives, 3);
        assert!(rational_diagonalize(&qf(&[&[1, 1], &[1, 1]])).is_err());
    }

    #[test]
    fn rational_diag_is_congruence() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5usize);
            let mut q = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(rng.gen_range(-6..=6));
                    *q.at_mut(i, j) = v.clone();
                    *q.at_mut(j, i) = v;
                }
            }
            let q = match QuadForm::new(q) {
                Ok(q) if !q.det().is_zero() => q,
                _ => continue,
            };
            let rd = rational_diagonalize(&q).unwrap();
            let n = q.n();
            for i in 0..n {
                for j in 0..n {
                    let mut acc = BigRational::zero();
                    for r in 0..n {
                        for c in 0..n {
                            acc += &rd.basis[r][i]
                                * BigRational::from(q.at(r, c).clone())
                                * &rd.basis[c][j];
                        }
                    }
                    let expect = if i == j { rd.diag[i].clone() } else { BigRational::zero() };
                    assert_eq!(acc, expect);
                }
            }
        }
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&QuadForm::identity(4)).unwrap(), 4);
        assert_eq!(signature(&QuadForm::from_diagonal(&[big(-1), big(-1)])).unwrap(), -2);
        assert_eq!(signature(&qf(&[&[0, 1], &[1, 0]])).unwrap(), 0);
    }

    #[test]
    fn signature_invariant_under_unimodular() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(2..=5usize);
            let mut q = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(rng.gen_range(-8..=8));
                    *q.at_mut(i, j) = v.clone();
                    *q.at_mut(j, i) = v;
                }
            }
            let q = match QuadForm::new(q) {
                Ok(q) if !q.det().is_zero() => q,
                _ => continue,
            };
            let mut u = Mat::identity(n);
            for _ in 0..8 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let f = big(rng.gen_range(-2..=2));
                for r in 0..n {
                    let add = u.at(r, i) * &f;
                    *u.at_mut(r, j) += add;
                }
            }
            let c = q.conjugate(&u, &big(0)).unwrap();
            assert_eq!(signature(&q).unwrap(), signature(&c).unwrap());
        }
    }
}
