//! Dense matrices over exact complex rationals.
//!
//! Row-major, immutable after construction. Elimination-based kernels are
//! deterministic: pivots are always the first nonzero candidate scanning rows
//! top-down, so ranks, nullspace bases and normalizing transforms are
//! reproducible bit for bit.
//!
//! The determinant runs a fraction-free Bareiss elimination over Gaussian
//! integers after clearing row denominators, which keeps intermediate swell
//! polynomial instead of exponential.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            entries,
        }
    }

    /// Panics on ragged input. An empty list is the 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == n_cols),
            "ragged rows in matrix literal"
        );
        Mat {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer literal convenience, mostly for tests and examples.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        self.map(|e| e * s)
    }

    pub fn scale_int(&self, v: i64) -> Mat {
        self.scale(&Scalar::from_int(v))
    }

    /// True when rows `0..r` are identically zero.
    pub fn has_zero_top_rows(&self, r: usize) -> bool {
        (0..r.min(self.rows)).all(|i| (0..self.cols).all(|j| self.at(i, j).is_zero()))
    }

    /// True when the last `k` columns are identically zero.
    pub fn has_zero_trailing_cols(&self, k: usize) -> bool {
        let start = self.cols.saturating_sub(k);
        (0..self.rows).all(|i| (start..self.cols).all(|j| self.at(i, j).is_zero()))
    }

    /// `m * self * m_inv`; the caller supplies a precomputed inverse.
    pub fn conjugate_by(&self, m: &Mat, m_inv: &Mat) -> Mat {
        &(m * self) * m_inv
    }

    /// Exact determinant by fraction-free Bareiss elimination over Gaussian
    /// integers, after scaling each row to clear denominators.
    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Scalar::one());
        }
        let mut scale = BigInt::one();
        let mut g: Vec<Vec<GInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut l = BigInt::one();
            for j in 0..n {
                let e = self.at(i, j);
                l = l.lcm(e.re().denom()).lcm(e.im().denom());
            }
            g.push(
                (0..n)
                    .map(|j| {
                        let e = self.at(i, j);
                        GInt {
                            re: e.re().numer() * (&l / e.re().denom()),
                            im: e.im().numer() * (&l / e.im().denom()),
                        }
                    })
                    .collect(),
            );
            scale *= l;
        }
        let mut negate = false;
        let mut prev = GInt::one();
        for k in 0..n {
            let pivot_row = match (k..n).find(|&i| !g[i][k].is_zero()) {
                Some(i) => i,
                None => return Ok(Scalar::zero()),
            };
            if pivot_row != k {
                g.swap(k, pivot_row);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = g[k][k].mul(&g[i][j]).sub(&g[i][k].mul(&g[k][j]));
                    g[i][j] = t.exact_div(&prev);
                }
                g[i][k] = GInt::zero();
            }
            prev = g[k][k].clone();
        }
        let mut d = g[n - 1][n - 1].clone();
        if negate {
            d = GInt::zero().sub(&d);
        }
        Ok(Scalar::new(
            BigRational::new(d.re, scale.clone()),
            BigRational::new(d.im, scale),
        ))
    }

    /// Gauss-Jordan inverse with first-nonzero pivoting.
    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        let mut work: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut row: Vec<Scalar> = (0..n).map(|j| self.at(i, j).clone()).collect();
                row.extend((0..n).map(|j| {
                    if i == j {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                }));
                row
            })
            .collect();
        for k in 0..n {
            let pivot_row = (k..n)
                .find(|&i| !work[i][k].is_zero())
                .ok_or(Error::Singular)?;
            work.swap(k, pivot_row);
            let inv = work[k][k].inv().unwrap();
            for j in k..2 * n {
                work[k][j] = &work[k][j] * &inv;
            }
            for i in 0..n {
                if i == k || work[i][k].is_zero() {
                    continue;
                }
                let f = work[i][k].clone();
                for j in k..2 * n {
                    work[i][j] = &work[i][j] - &(&f * &work[k][j]);
                }
            }
        }
        Ok(Mat::from_fn(n, n, |i, j| work[i][n + j].clone()))
    }

    /// Exact rank by Gaussian elimination, defined for any shape.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot_row) = (rank..self.rows).find(|&i| !work[i][col].is_zero()) else {
                continue;
            };
            work.swap(rank, pivot_row);
            let inv = work[rank][col].inv().unwrap();
            for i in rank + 1..self.rows {
                if work[i][col].is_zero() {
                    continue;
                }
                let f = &work[i][col] * &inv;
                for j in col..self.cols {
                    work[i][j] = &work[i][j] - &(&f * &work[rank][j]);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Basis of `{ v : v * self = 0 }` as row vectors, ordered by ascending
    /// free-variable index from the reduced echelon form of the transpose.
    /// The zero matrix yields the standard basis.
    pub fn left_nullspace(&self) -> Vec<Vec<Scalar>> {
        let t = self.transpose();
        let (rref, pivots) = t.rref();
        let m = self.rows;
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..m).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![Scalar::zero(); m];
            v[free] = Scalar::one();
            for &(row, col) in &pivots {
                v[col] = -rref.at(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form plus the (row, col) pivot positions.
    fn rref(&self) -> (Mat, Vec<(usize, usize)>) {
        let mut work: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            let Some(pivot_row) = (next_row..self.rows).find(|&i| !work[i][col].is_zero()) else {
                continue;
            };
            work.swap(next_row, pivot_row);
            let inv = work[next_row][col].inv().unwrap();
            for j in col..self.cols {
                work[next_row][j] = &work[next_row][j] * &inv;
            }
            for i in 0..self.rows {
                if i == next_row || work[i][col].is_zero() {
                    continue;
                }
                let f = work[i][col].clone();
                for j in col..self.cols {
                    work[i][j] = &work[i][j] - &(&f * &work[next_row][j]);
                }
            }
            pivots.push((next_row, col));
            next_row += 1;
            if next_row == self.rows {
                break;
            }
        }
        (
            Mat {
                rows: self.rows,
                cols: self.cols,
                entries: work.into_iter().flatten().collect(),
            },
            pivots,
        )
    }

    /// Splits a square matrix along `p` into corner blocks.
    pub fn blocks(&self, p: &BlockPartition) -> Result<Blocks> {
        if !self.is_square() || self.rows != p.n() {
            return Err(Error::BadPartition);
        }
        let r = p.r();
        let n = p.n();
        Ok(Blocks {
            a: Mat::from_fn(r, r, |i, j| self.at(i, j).clone()),
            b: Mat::from_fn(r, n - r, |i, j| self.at(i, r + j).clone()),
            c: Mat::from_fn(n - r, r, |i, j| self.at(r + i, j).clone()),
            d: Mat::from_fn(n - r, n - r, |i, j| self.at(r + i, r + j).clone()),
        })
    }

    /// Leading-block Schur complement `A - B D^-1 C`.
    pub fn schur_d(&self, p: &BlockPartition) -> Result<Mat> {
        let bl = self.blocks(p)?;
        let d_inv = bl.d.inverse().map_err(|_| Error::SingularBlock)?;
        Ok(&bl.a - &(&(&bl.b * &d_inv) * &bl.c))
    }

    /// Trailing-block Schur complement `D - C A^-1 B`.
    pub fn schur_a(&self, p: &BlockPartition) -> Result<Mat> {
        let bl = self.blocks(p)?;
        let a_inv = bl.a.inverse().map_err(|_| Error::SingularBlock)?;
        Ok(&bl.d - &(&(&bl.c * &a_inv) * &bl.b))
    }

    /// Blockwise inverse. Tries the trailing-block branch first, then the
    /// leading-block one; fails with `SingularBlock` when neither applies
    /// (which does not imply the matrix itself is singular).
    pub fn block_inverse(&self, p: &BlockPartition) -> Result<Mat> {
        self.block_inverse_via(p, InverseBranch::SchurD)
            .or_else(|_| self.block_inverse_via(p, InverseBranch::SchurA))
    }

    /// Blockwise inverse through one specific branch.
    pub fn block_inverse_via(&self, p: &BlockPartition, branch: InverseBranch) -> Result<Mat> {
        let bl = self.blocks(p)?;
        match branch {
            InverseBranch::SchurD => {
                let d_inv = bl.d.inverse().map_err(|_| Error::SingularBlock)?;
                let s = &bl.a - &(&(&bl.b * &d_inv) * &bl.c);
                let s_inv = s.inverse().map_err(|_| Error::SingularBlock)?;
                let top_right = -&(&(&s_inv * &bl.b) * &d_inv);
                let bottom_left = -&(&(&d_inv * &bl.c) * &s_inv);
                let corr = &(&(&bl.c * &s_inv) * &bl.b) * &d_inv;
                let bottom_right = &d_inv * &(&Mat::identity(p.n() - p.r()) + &corr);
                Ok(Mat::from_blocks(&s_inv, &top_right, &bottom_left, &bottom_right))
            }
            InverseBranch::SchurA => {
                let a_inv = bl.a.inverse().map_err(|_| Error::SingularBlock)?;
                let s = &bl.d - &(&(&bl.c * &a_inv) * &bl.b);
                let s_inv = s.inverse().map_err(|_| Error::SingularBlock)?;
                let corr = &(&(&bl.b * &s_inv) * &bl.c) * &a_inv;
                let top_left = &a_inv + &(&a_inv * &corr);
                let top_right = -&(&(&a_inv * &bl.b) * &s_inv);
                let bottom_left = -&(&(&s_inv * &bl.c) * &a_inv);
                Ok(Mat::from_blocks(&top_left, &top_right, &bottom_left, &s_inv))
            }
            InverseBranch::Mixed => {
                let d_inv = bl.d.inverse().map_err(|_| Error::SingularBlock)?;
                let a_inv = bl.a.inverse().map_err(|_| Error::SingularBlock)?;
                let sd = &bl.a - &(&(&bl.b * &d_inv) * &bl.c);
                let sa = &bl.d - &(&(&bl.c * &a_inv) * &bl.b);
                let sd_inv = sd.inverse().map_err(|_| Error::SingularBlock)?;
                let sa_inv = sa.inverse().map_err(|_| Error::SingularBlock)?;
                let top_right = -&(&(&sd_inv * &bl.b) * &d_inv);
                let bottom_left = -&(&(&d_inv * &bl.c) * &sd_inv);
                Ok(Mat::from_blocks(&sd_inv, &top_right, &bottom_left, &sa_inv))
            }
        }
    }

    /// Reassembles `[[a, b], [c, d]]`. Panics on inconsistent block shapes.
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        assert_eq!(a.rows, b.rows, "top blocks disagree on rows");
        assert_eq!(c.rows, d.rows, "bottom blocks disagree on rows");
        assert_eq!(a.cols, c.cols, "left blocks disagree on cols");
        assert_eq!(b.cols, d.cols, "right blocks disagree on cols");
        let r = a.rows;
        let s = a.cols;
        Mat::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r, j < s) {
            (true, true) => a.at(i, j).clone(),
            (true, false) => b.at(i, j - s).clone(),
            (false, true) => c.at(i - r, j).clone(),
            (false, false) => d.at(i - r, j - s).clone(),
        })
    }

    /// Builds the invertible transform whose conjugation zeroes the first `r`
    /// rows of `self`: its leading rows are the left-nullspace basis, completed
    /// greedily with standard unit vectors by ascending index.
    /// Requires `rank(self) == n - r`.
    pub fn similarity_normalize(&self, r: usize) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if r < 1 || r > n {
            return Err(Error::BadPartition);
        }
        if self.rank() != n - r {
            return Err(Error::RankMismatch);
        }
        let mut rows = self.left_nullspace();
        debug_assert_eq!(rows.len(), r);
        let stack_rank = |rows: &[Vec<Scalar>]| {
            Mat::from_rows(rows.to_vec()).rank()
        };
        for i in 0..n {
            if rows.len() == n {
                break;
            }
            let mut unit = vec![Scalar::zero(); n];
            unit[i] = Scalar::one();
            rows.push(unit);
            if stack_rank(&rows) != rows.len() {
                rows.pop();
            }
        }
        debug_assert_eq!(rows.len(), n);
        Ok(Mat::from_rows(rows))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        self.at(i, j)
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix addition shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + rhs.at(i, j))
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix subtraction shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - rhs.at(i, j))
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert!(
            self.cols == rhs.rows,
            "matrix product shape mismatch: {}x{} times {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Scalar::zero();
            for k in 0..self.cols {
                acc = acc + self.at(i, k) * rhs.at(k, j);
            }
            acc
        })
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|e| -e)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j)).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Scalar>> = Vec::deserialize(deserializer)?;
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(de::Error::custom("ragged matrix rows"));
        }
        Ok(Mat::from_rows(rows))
    }
}

/// Split point for corner-block structure: square size `n`, leading size `r`,
/// `1 <= r <= n`. With `r == n` the trailing blocks are empty, which encodes
/// the maximal-rank case of the analyzer.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BlockPartition {
    n: usize,
    r: usize,
}

impl BlockPartition {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n == 0 || r < 1 || r > n {
            return Err(Error::BadPartition);
        }
        Ok(BlockPartition { n, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

/// Corner blocks of a square matrix: `a` is `r x r`, `d` is `(n-r) x (n-r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
}

/// Which block-inverse formula to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseBranch {
    /// Needs `D` and `A - B D^-1 C` invertible.
    SchurD,
    /// Needs `A` and `D - C A^-1 B` invertible.
    SchurA,
    /// Needs all four of `A`, `D` and both Schur complements invertible.
    Mixed,
}

/// Gaussian integer used internally by the fraction-free determinant.
#[derive(Clone, Debug)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn zero() -> Self {
        GInt {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn one() -> Self {
        GInt {
            re: BigInt::one(),
            im: BigInt::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Division that is exact by the Bareiss identity; checked in debug builds.
    fn exact_div(&self, d: &GInt) -> GInt {
        if d.re.is_one() && d.im.is_zero() {
            return self.clone();
        }
        let norm = &d.re * &d.re + &d.im * &d.im;
        let num_re = &self.re * &d.re + &self.im * &d.im;
        let num_im = &self.im * &d.re - &self.re * &d.im;
        debug_assert!((&num_re % &norm).is_zero() && (&num_im % &norm).is_zero());
        GInt {
            re: num_re / &norm,
            im: num_im / norm,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    /// Independent determinant oracle: cofactor expansion along the first row.
    fn cofactor_det(m: &Mat) -> Scalar {
        let n = m.n_rows();
        assert!(m.is_square());
        if n == 0 {
            return Scalar::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut acc = Scalar::zero();
        for j in 0..n {
            let minor = Mat::from_fn(n - 1, n - 1, |r, c| {
                m.at(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = m.at(0, j) * &cofactor_det(&minor);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    #[test]
    fn product_fixture() {
        let a = Mat::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let swap = Mat::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(&a * &swap, Mat::from_i64_rows(&[&[2, 1], &[4, 3]]));
        let id = Mat::identity(2);
        assert_eq!(&id * &id, id);
        assert!((&a - &a).is_zero());
    }

    #[test]
    #[should_panic(expected = "shape mismatch")]
    fn product_shape_mismatch_panics() {
        let a = Mat::identity(2);
        let b = Mat::identity(3);
        let _ = &a * &b;
    }

    #[test]
    fn determinant_fixtures() {
        assert_eq!(Mat::identity(3).det().unwrap(), sc(1));
        assert_eq!(
            Mat::from_i64_rows(&[&[0, 1], &[1, 0]]).det().unwrap(),
            sc(-1)
        );
        assert_eq!(Mat::zero(0, 0).det().unwrap(), sc(1));
        assert_eq!(Mat::from_i64_rows(&[&[1, 2], &[2, 4]]).det().unwrap(), sc(0));
        assert_eq!(Mat::zero(2, 3).det(), Err(Error::NonSquare));
    }

    #[test]
    fn determinant_gaussian_entries() {
        // det [[i, 1], [1, i]] = i*i - 1 = -2
        let m = Mat::from_rows(vec![
            vec![Scalar::i(), Scalar::one()],
            vec![Scalar::one(), Scalar::i()],
        ]);
        assert_eq!(m.det().unwrap(), sc(-2));
        assert_eq!(m.det().unwrap(), cofactor_det(&m));
    }

    #[test]
    fn inverse_fixtures() {
        assert_eq!(Mat::identity(4).inverse().unwrap(), Mat::identity(4));
        let d = Mat::from_i64_rows(&[&[2, 0], &[0, 4]]);
        let d_inv = d.inverse().unwrap();
        assert_eq!(*d_inv.at(0, 0), Scalar::from_ratio(1, 2));
        assert_eq!(*d_inv.at(1, 1), Scalar::from_ratio(1, 4));
        assert_eq!(
            Mat::from_i64_rows(&[&[1, 2], &[2, 4]]).inverse(),
            Err(Error::Singular)
        );
        assert_eq!(Mat::zero(0, 0).inverse().unwrap(), Mat::zero(0, 0));
    }

    #[test]
    fn rank_fixtures() {
        assert_eq!(Mat::zero(3, 3).rank(), 0);
        assert_eq!(Mat::identity(3).rank(), 3);
        // rank-1 outer product
        let m = Mat::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[-1, -2, -3]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn blocks_fixtures() {
        let p = BlockPartition::new(3, 1).unwrap();
        let bl = Mat::identity(3).blocks(&p).unwrap();
        assert_eq!(bl.a, Mat::identity(1));
        assert!(bl.b.is_zero() && bl.c.is_zero());
        assert_eq!(bl.d, Mat::identity(2));

        let p2 = BlockPartition::new(2, 1).unwrap();
        let bl2 = Mat::from_i64_rows(&[&[1, 2], &[3, 4]]).blocks(&p2).unwrap();
        assert_eq!(bl2.a, Mat::from_i64_rows(&[&[1]]));
        assert_eq!(bl2.b, Mat::from_i64_rows(&[&[2]]));
        assert_eq!(bl2.c, Mat::from_i64_rows(&[&[3]]));
        assert_eq!(bl2.d, Mat::from_i64_rows(&[&[4]]));

        // maximal partition leaves empty trailing blocks
        let pm = BlockPartition::new(2, 2).unwrap();
        let blm = Mat::identity(2).blocks(&pm).unwrap();
        assert_eq!(blm.d.n_rows(), 0);
        assert_eq!(blm.d.det().unwrap(), sc(1));

        assert!(BlockPartition::new(2, 0).is_err());
        assert!(BlockPartition::new(2, 3).is_err());
    }

    #[test]
    fn schur_fixtures() {
        let p = BlockPartition::new(2, 1).unwrap();
        let m = Mat::from_i64_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(*m.schur_d(&p).unwrap().at(0, 0), Scalar::from_ratio(-1, 2));
        // det factorization: det M = det D * det S_D
        let lhs = m.det().unwrap();
        let rhs = m.blocks(&p).unwrap().d.det().unwrap() * m.schur_d(&p).unwrap().det().unwrap();
        assert_eq!(lhs, rhs);

        // block diagonal: schur_d reduces to A
        let bd = Mat::from_i64_rows(&[&[7, 0], &[0, 5]]);
        assert_eq!(bd.schur_d(&p).unwrap(), Mat::from_i64_rows(&[&[7]]));

        // singular D
        let sing = Mat::from_i64_rows(&[&[1, 2], &[3, 0]]);
        assert_eq!(sing.schur_d(&p), Err(Error::SingularBlock));
    }

    #[test]
    fn block_inverse_fixtures() {
        let p = BlockPartition::new(3, 1).unwrap();
        let m = Mat::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.block_inverse(&p).unwrap(), m.inverse().unwrap());
        // both branches agree where both apply
        assert_eq!(
            m.block_inverse_via(&p, InverseBranch::SchurD).unwrap(),
            m.block_inverse_via(&p, InverseBranch::SchurA).unwrap()
        );
        assert_eq!(
            m.block_inverse_via(&p, InverseBranch::Mixed).unwrap(),
            m.inverse().unwrap()
        );
        // invertible matrix where no branch applies
        let p2 = BlockPartition::new(2, 1).unwrap();
        let swap = Mat::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.block_inverse(&p2), Err(Error::SingularBlock));
        assert!(swap.inverse().is_ok());
        // maximal partition: block inverse degenerates to the plain inverse
        let pm = BlockPartition::new(2, 2).unwrap();
        let a = Mat::from_i64_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.block_inverse(&pm).unwrap(), a.inverse().unwrap());
    }

    #[test]
    fn left_nullspace_fixtures() {
        // zero matrix: the standard basis, in order
        let basis = Mat::zero(3, 3).left_nullspace();
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            for (j, e) in v.iter().enumerate() {
                assert_eq!(*e, if i == j { sc(1) } else { sc(0) });
            }
        }
        // invertible: empty
        assert!(Mat::identity(3).left_nullspace().is_empty());
        // rank 1: single annihilating vector
        let m = Mat::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let ns = m.left_nullspace();
        assert_eq!(ns.len(), 1);
        let v = Mat::from_rows(vec![ns[0].clone()]);
        assert!((&v * &m).is_zero());
    }

    #[test]
    fn similarity_normalize_fixtures() {
        // [[0,1],[0,0]] with r = 1: conjugation kills the first row
        let b0 = Mat::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let m = b0.similarity_normalize(1).unwrap();
        let conj = b0.conjugate_by(&m, &m.inverse().unwrap());
        assert!(conj.has_zero_top_rows(1));

        // already normalized input: the transform is the identity
        let k = Mat::from_i64_rows(&[&[0, 0], &[5, 7]]);
        assert_eq!(k.similarity_normalize(1).unwrap(), Mat::identity(2));

        // zero matrix with r = n: identity transform
        assert_eq!(Mat::zero(2, 2).similarity_normalize(2).unwrap(), Mat::identity(2));

        // rank violation
        assert_eq!(
            Mat::identity(2).similarity_normalize(1),
            Err(Error::RankMismatch)
        );
    }

    fn small_mat(n: usize) -> impl Strategy<Value = Mat> {
        proptest::collection::vec(
            (-9i64..=9, 1i64..=9, -9i64..=9, 1i64..=9),
            n * n,
        )
        .prop_map(move |v| {
            Mat::from_fn(n, n, |i, j| {
                let (a, b, c, d) = v[i * n + j];
                Scalar::gaussian(a, b, c, d)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Bareiss agrees with the cofactor oracle.
        #[test]
        fn det_matches_cofactor_oracle(m in small_mat(4)) {
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m));
        }

        /// det is multiplicative.
        #[test]
        fn det_multiplicative(a in small_mat(3), b in small_mat(3)) {
            prop_assert_eq!((&a * &b).det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }

        /// Inverse multiplies back to the identity.
        #[test]
        fn inverse_multiplies_back(m in small_mat(3)) {
            prop_assume!(!m.det().unwrap().is_zero());
            let inv = m.inverse().unwrap();
            prop_assert_eq!(&m * &inv, Mat::identity(3));
            prop_assert_eq!(&inv * &m, Mat::identity(3));
        }

        /// Splitting into blocks and reassembling is lossless.
        #[test]
        fn blocks_reassemble(m in small_mat(4), r in 1usize..=4) {
            let p = BlockPartition::new(4, r).unwrap();
            let bl = m.blocks(&p).unwrap();
            prop_assert_eq!(Mat::from_blocks(&bl.a, &bl.b, &bl.c, &bl.d), m);
        }

        /// det M = det D * det S_D whenever D is invertible.
        #[test]
        fn det_factorization(m in small_mat(4), r in 1usize..=3) {
            let p = BlockPartition::new(4, r).unwrap();
            let d = m.blocks(&p).unwrap().d;
            prop_assume!(!d.det().unwrap().is_zero());
            let s = m.schur_d(&p).unwrap();
            prop_assert_eq!(m.det().unwrap(), d.det().unwrap() * s.det().unwrap());
        }

        /// Blockwise inverse agrees with Gauss-Jordan when the branch applies.
        #[test]
        fn block_inverse_agrees(m in small_mat(3), r in 1usize..=2) {
            let p = BlockPartition::new(3, r).unwrap();
            match m.block_inverse(&p) {
                Ok(bi) => prop_assert_eq!(bi, m.inverse().unwrap()),
                Err(_) => {}
            }
        }

        /// Left-nullspace vectors annihilate and span the right dimension.
        #[test]
        fn left_nullspace_annihilates(m in small_mat(3)) {
            let ns = m.left_nullspace();
            prop_assert_eq!(ns.len(), 3 - m.rank());
            for v in ns {
                let row = Mat::from_rows(vec![v]);
                prop_assert!((&row * &m).is_zero());
            }
        }

        /// Normalization zeroes the top rows of rank-deficient samples.
        #[test]
        fn similarity_normalize_post(l in small_mat(3), rr in 1usize..=2) {
            // rank <= 3 - rr by construction: product through a thin factor
            let thin = Mat::from_fn(3, 3 - rr, |i, j| l.at(i, j).clone());
            let wide = Mat::from_fn(3 - rr, 3, |i, j| l.at(j, i).clone());
            let b0 = &thin * &wide;
            prop_assume!(b0.rank() == 3 - rr);
            let m = b0.similarity_normalize(rr).unwrap();
            let conj = b0.conjugate_by(&m, &m.inverse().unwrap());
            prop_assert!(conj.has_zero_top_rows(rr));
        }
    }
}
