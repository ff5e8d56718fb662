//! Truncated Laurent series with square-matrix coefficients.
//!
//! A series is `sum_k M_k e^k` over the exact complex rationals, stored from
//! its certified leading order `nu` up to (not including) a window: the first
//! order at which nothing is known. All arithmetic keeps the window honest,
//! shrinking it pessimistically whenever unknown tail terms could contaminate
//! a coefficient. Inversion and determinant valuation run a Gaussian
//! elimination over scalar truncated series with full pivoting by minimal
//! valuation, the standard strategy for maximizing retained precision over a
//! local field.
//!
//! Classification recognizes the singularity-pattern classes the confinement
//! analysis is built on. With a split size `r`:
//!
//! * `Regular`: no pole (leading order >= 0);
//! * `ZeroTopRows`: regular and the order-0 coefficient has its first `r`
//!   rows zero;
//! * `PoleZeroRightCols`: a simple pole whose pole coefficient has its last
//!   `n - r` columns zero;
//! * `Other`: anything not certified to match the patterns above.
//!
//! The two middle classes close under addition and multiplication without
//! identity, absorb regular factors one-sidedly (right respectively left
//! ideals), and a `ZeroTopRows` element whose determinant has valuation `r`
//! inverts into a `PoleZeroRightCols` element and back.

use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::scalar::Scalar;
use crate::scalar_series::ScalarSeries;
use crate::window::Window;
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    n: usize,
    nu: i64,
    coeffs: Vec<Mat>,
    window: Window,
}

/// Singularity pattern of a series relative to a block split.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesClass {
    Regular,
    ZeroTopRows,
    PoleZeroRightCols,
    Other,
}

impl LaurentSeries {
    /// The zero-to-window series: every order below `window` is certified
    /// zero, nothing beyond is claimed.
    pub fn zero(n: usize, window: Window) -> Self {
        assert!(n >= 1, "series need a positive matrix size");
        let nu = match window {
            Window::Finite(w) => w,
            Window::Exact => 0,
        };
        LaurentSeries {
            n,
            nu,
            coeffs: Vec::new(),
            window,
        }
    }

    /// Normalizing constructor. The caller asserts that `coeffs` starting at
    /// order `nu`, padded with zero matrices, are exact up to `window`; in
    /// particular a finite window claims the padded tail coefficients really
    /// are zero. Panics on empty or inconsistently shaped data.
    pub fn from_coeffs(nu: i64, mut coeffs: Vec<Mat>, window: Window) -> Self {
        assert!(!coeffs.is_empty(), "use LaurentSeries::zero for empty data");
        let n = coeffs[0].n_rows();
        assert!(n >= 1, "series need a positive matrix size");
        assert!(
            coeffs.iter().all(|m| m.n_rows() == n && m.n_cols() == n),
            "series coefficients must be square matrices of one size"
        );
        let mut nu = nu;
        if let Window::Finite(w) = window {
            let keep = (w - nu).max(0) as usize;
            coeffs.truncate(keep);
            coeffs.resize(keep, Mat::zero(n, n));
        }
        while coeffs.first().is_some_and(Mat::is_zero) {
            coeffs.remove(0);
            nu += 1;
        }
        if window.is_exact() {
            while coeffs.last().is_some_and(Mat::is_zero) {
                coeffs.pop();
            }
        }
        if coeffs.is_empty() {
            return LaurentSeries::zero(n, window);
        }
        LaurentSeries {
            n,
            nu,
            coeffs,
            window,
        }
    }

    /// Exact single coefficient at the given order.
    pub fn monomial(m: Mat, order: i64) -> Self {
        LaurentSeries::from_coeffs(order, vec![m], Window::Exact)
    }

    /// Exact constant series.
    pub fn constant(m: Mat) -> Self {
        LaurentSeries::monomial(m, 0)
    }

    pub fn identity(n: usize) -> Self {
        LaurentSeries::constant(Mat::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn is_zero_to_window(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Certified leading order; `None` for a zero-to-window series.
    pub fn min_order(&self) -> Option<i64> {
        (!self.is_zero_to_window()).then_some(self.nu)
    }

    /// Lower bound on the leading order, falling back to the window when no
    /// nonzero coefficient is certified.
    fn val_bound(&self) -> Window {
        match self.min_order() {
            Some(v) => Window::Finite(v),
            None => self.window,
        }
    }

    fn stored_end(&self) -> i64 {
        self.nu + self.coeffs.len() as i64
    }

    fn stored_mat(&self, k: i64) -> Mat {
        if k < self.nu {
            return Mat::zero(self.n, self.n);
        }
        self.coeffs
            .get((k - self.nu) as usize)
            .cloned()
            .unwrap_or_else(|| Mat::zero(self.n, self.n))
    }

    /// Coefficient of order `k`, or `None` when `k` lies outside the window.
    pub fn coeff(&self, k: i64) -> Option<Mat> {
        self.window.covers(k + 1).then(|| self.stored_mat(k))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return LaurentSeries::zero(self.n, Window::Exact);
        }
        LaurentSeries {
            n: self.n,
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
            window: self.window,
        }
    }

    pub fn scale_int(&self, v: i64) -> Self {
        self.scale(&Scalar::from_int(v))
    }

    /// Multiply by `e^by`.
    pub fn shift(&self, by: i64) -> Self {
        if self.is_zero_to_window() {
            return LaurentSeries::zero(self.n, self.window.shift(by));
        }
        LaurentSeries {
            n: self.n,
            nu: self.nu + by,
            coeffs: self.coeffs.clone(),
            window: self.window.shift(by),
        }
    }

    /// Forgets knowledge beyond `new_window`. Fails with `WindowGrow` when
    /// asked for more than is certified.
    pub fn truncate(&self, new_window: i64) -> Result<Self> {
        if !self.window.covers(new_window) {
            return Err(Error::WindowGrow);
        }
        if self.is_zero_to_window() {
            return Ok(LaurentSeries::zero(self.n, Window::Finite(new_window)));
        }
        Ok(LaurentSeries::from_coeffs(
            self.nu,
            self.coeffs.clone(),
            Window::Finite(new_window),
        ))
    }

    /// Coefficient-wise conjugation `m * self * m_inv` by an invertible
    /// constant matrix; leading orders and windows are untouched.
    pub fn conjugate(&self, m: &Mat, m_inv: &Mat) -> Self {
        LaurentSeries {
            n: self.n,
            nu: self.nu,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.conjugate_by(m, m_inv))
                .collect(),
            window: self.window,
        }
    }

    /// Certified pattern of this series under the split `p`.
    ///
    /// A zero-to-window series needs its order-0 coefficient certified
    /// (window at least 1) to count as `ZeroTopRows`; shorter knowledge
    /// cannot even rule out a pole and classifies as `Other`.
    pub fn classify(&self, p: &BlockPartition) -> SeriesClass {
        assert_eq!(self.n, p.n(), "partition size must match the series");
        let r = p.r();
        if self.is_zero_to_window() {
            return if self.window.covers(1) {
                SeriesClass::ZeroTopRows
            } else {
                SeriesClass::Other
            };
        }
        if self.nu >= 0 {
            if self.stored_mat(0).has_zero_top_rows(r) {
                SeriesClass::ZeroTopRows
            } else {
                SeriesClass::Regular
            }
        } else if self.nu == -1 {
            if self.coeffs[0].has_zero_trailing_cols(self.n - r) {
                SeriesClass::PoleZeroRightCols
            } else {
                SeriesClass::Other
            }
        } else {
            SeriesClass::Other
        }
    }

    fn entry(&self, i: usize, j: usize) -> ScalarSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| m.at(i, j).clone())
            .collect::<Vec<_>>();
        if coeffs.is_empty() {
            ScalarSeries::zero(self.window)
        } else {
            ScalarSeries::from_parts(self.nu, coeffs, self.window)
        }
    }

    fn grid(&self) -> Vec<Vec<ScalarSeries>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    fn assemble(n: usize, grid: &[Vec<ScalarSeries>]) -> LaurentSeries {
        let window = grid
            .iter()
            .flatten()
            .map(ScalarSeries::window)
            .min()
            .expect("nonempty grid");
        let lo = grid.iter().flatten().filter_map(ScalarSeries::val).min();
        let Some(lo) = lo else {
            return LaurentSeries::zero(n, window);
        };
        let hi = match window {
            Window::Finite(w) => w,
            Window::Exact => grid
                .iter()
                .flatten()
                .filter(|e| !e.is_zero())
                .map(ScalarSeries::stored_end)
                .max()
                .unwrap_or(lo),
        };
        let coeffs = (lo..hi)
            .map(|k| Mat::from_fn(n, n, |i, j| grid[i][j].stored(k)))
            .collect::<Vec<_>>();
        if coeffs.is_empty() {
            return LaurentSeries::zero(n, window);
        }
        LaurentSeries::from_coeffs(lo, coeffs, window)
    }

    /// Best certified pivot in the square subgrid starting at `k`: minimal
    /// valuation, ties by lowest row then lowest column. Distinguishes "all
    /// remaining entries are exactly zero" from "some entry is only zero to a
    /// finite window", which is an information failure rather than a rank one.
    fn pivot_search(grid: &[Vec<ScalarSeries>], k: usize, n: usize) -> Result<(usize, usize)> {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut uncertified = false;
        for i in k..n {
            for j in k..n {
                match grid[i][j].val() {
                    Some(v) => {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                    None => {
                        if !grid[i][j].window().is_exact() {
                            uncertified = true;
                        }
                    }
                }
            }
        }
        match best {
            Some((_, i, j)) => Ok((i, j)),
            None if uncertified => Err(Error::InsufficientTruncation),
            None => Err(Error::SingularToWindow),
        }
    }

    /// Inverse as a matrix Laurent series, by Gauss-Jordan elimination over
    /// scalar truncated series with full valuation pivoting. The result
    /// window is the minimum over the computed entries.
    pub fn inverse(&self) -> Result<LaurentSeries> {
        let n = self.n;
        let mut grid = self.grid();
        for (i, row) in grid.iter_mut().enumerate() {
            row.extend((0..n).map(|j| {
                if i == j {
                    ScalarSeries::constant(Scalar::one())
                } else {
                    ScalarSeries::zero(Window::Exact)
                }
            }));
        }
        let mut unknown_of_row: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pi, pj) = Self::pivot_search(&grid, k, n)?;
            grid.swap(k, pi);
            if pj != k {
                for row in grid.iter_mut() {
                    row.swap(k, pj);
                }
                unknown_of_row.swap(k, pj);
            }
            let pivot_row = grid[k].clone();
            let pivot_inv = pivot_row[k].inverse()?;
            for i in 0..n {
                if i == k {
                    continue;
                }
                let lead = &grid[i][k];
                if lead.is_zero() && lead.window().is_exact() {
                    continue;
                }
                let f = lead.mul(&pivot_inv);
                for j in k..2 * n {
                    grid[i][j] = grid[i][j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
        let mut out = vec![vec![ScalarSeries::zero(Window::Exact); n]; n];
        for k in 0..n {
            let pivot_inv = grid[k][k].inverse()?;
            for j in 0..n {
                out[unknown_of_row[k]][j] = grid[k][n + j].mul(&pivot_inv);
            }
        }
        Ok(Self::assemble(n, &out))
    }

    /// Valuation `d` and leading coefficient `c` of the determinant:
    /// `det(self) = c * e^d + O(e^(d+1))` with `c != 0`. Forward elimination
    /// over scalar series; the determinant is the signed product of the
    /// pivots, so `d` is the sum of pivot valuations and `c` the signed
    /// product of their leading coefficients.
    pub fn det_valuation(&self) -> Result<(i64, Scalar)> {
        let n = self.n;
        let mut grid = self.grid();
        let mut negate = false;
        let mut d = 0i64;
        let mut lead = Scalar::one();
        for k in 0..n {
            let (pi, pj) = Self::pivot_search(&grid, k, n)?;
            grid.swap(k, pi);
            if pi != k {
                negate = !negate;
            }
            if pj != k {
                for row in grid.iter_mut() {
                    row.swap(k, pj);
                }
                negate = !negate;
            }
            let pivot_row = grid[k].clone();
            let pivot = &pivot_row[k];
            d += pivot.val().expect("pivot is certified nonzero");
            lead = &lead * pivot.leading().expect("pivot is certified nonzero");
            if k + 1 == n {
                break;
            }
            let pivot_inv = pivot.inverse()?;
            for i in k + 1..n {
                let head = &grid[i][k];
                if head.is_zero() && head.window().is_exact() {
                    continue;
                }
                let f = head.mul(&pivot_inv);
                for j in k..n {
                    grid[i][j] = grid[i][j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
        if negate {
            lead = -lead;
        }
        Ok((d, lead))
    }

    /// Compares two series over the window both certify, returning the
    /// agreement flag together with that shared window.
    pub fn agrees_to_shared_window(&self, other: &LaurentSeries) -> (bool, Window) {
        assert_eq!(self.n, other.n, "series size mismatch");
        let shared = self.window.min(other.window);
        let hi = match shared {
            Window::Finite(w) => w,
            Window::Exact => self.stored_end().max(other.stored_end()),
        };
        let lo = [self.min_order(), other.min_order()]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or(hi);
        let agree = (lo..hi).all(|k| self.stored_mat(k) == other.stored_mat(k));
        (agree, shared)
    }
}

fn assert_same_shape(a: &LaurentSeries, b: &LaurentSeries) {
    assert_eq!(
        a.n, b.n,
        "series arithmetic needs matching matrix sizes: {} vs {}",
        a.n, b.n
    );
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        assert_same_shape(self, rhs);
        let window = self.window.min(rhs.window);
        let lo = [self.min_order(), rhs.min_order()]
            .into_iter()
            .flatten()
            .min();
        let Some(lo) = lo else {
            return LaurentSeries::zero(self.n, window);
        };
        let hi = match window {
            Window::Finite(w) => w,
            Window::Exact => self.stored_end().max(rhs.stored_end()),
        };
        let coeffs = (lo..hi)
            .map(|k| &self.stored_mat(k) + &rhs.stored_mat(k))
            .collect::<Vec<_>>();
        if coeffs.is_empty() {
            return LaurentSeries::zero(self.n, window);
        }
        LaurentSeries::from_coeffs(lo, coeffs, window)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            n: self.n,
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|m| -m).collect(),
            window: self.window,
        }
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        assert_same_shape(self, rhs);
        let window = self
            .window
            .shift_by(rhs.val_bound())
            .min(rhs.window.shift_by(self.val_bound()));
        if self.is_zero_to_window() || rhs.is_zero_to_window() {
            return LaurentSeries::zero(self.n, window);
        }
        let lo = self.nu + rhs.nu;
        let hi = match window {
            Window::Finite(w) => w,
            Window::Exact => self.stored_end() + rhs.stored_end() - 1,
        };
        let coeffs = (lo..hi)
            .map(|k| {
                let mut acc = Mat::zero(self.n, self.n);
                for i in self.nu..self.stored_end() {
                    let j = k - i;
                    if j >= rhs.nu && j < rhs.stored_end() {
                        acc = &acc
                            + &(&self.coeffs[(i - self.nu) as usize]
                                * &rhs.coeffs[(j - rhs.nu) as usize]);
                    }
                }
                acc
            })
            .collect::<Vec<_>>();
        if coeffs.is_empty() {
            return LaurentSeries::zero(self.n, window);
        }
        LaurentSeries::from_coeffs(lo, coeffs, window)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_to_window() {
            write!(f, "0")?;
        } else {
            for (idx, m) in self.coeffs.iter().enumerate() {
                let k = self.nu + idx as i64;
                if idx > 0 {
                    writeln!(f, "  +")?;
                }
                match k {
                    0 => writeln!(f, "{m}")?,
                    1 => writeln!(f, "e *\n{m}")?,
                    _ => writeln!(f, "e^{k} *\n{m}")?,
                }
            }
        }
        match self.window {
            Window::Finite(w) => write!(f, "  + O(e^{w})"),
            Window::Exact => write!(f, "  (exact)"),
        }
    }
}

// JSON form: {n, nu, window, coeffs}; data is renormalized on the way in.

#[derive(Serialize)]
struct RawSeriesRef<'a> {
    n: usize,
    nu: i64,
    window: Window,
    coeffs: &'a [Mat],
}

#[derive(Deserialize)]
struct RawSeries {
    n: usize,
    nu: i64,
    window: Window,
    coeffs: Vec<Mat>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSeriesRef {
            n: self.n,
            nu: self.nu,
            window: self.window,
            coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSeries::deserialize(deserializer)?;
        if raw.n == 0 {
            return Err(de::Error::custom("series matrix size must be positive"));
        }
        if raw
            .coeffs
            .iter()
            .any(|m| m.n_rows() != raw.n || m.n_cols() != raw.n)
        {
            return Err(de::Error::custom("series coefficient shape mismatch"));
        }
        Ok(if raw.coeffs.is_empty() {
            LaurentSeries::zero(raw.n, raw.window)
        } else {
            LaurentSeries::from_coeffs(raw.nu, raw.coeffs, raw.window)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize, r: usize) -> BlockPartition {
        BlockPartition::new(n, r).unwrap()
    }

    fn m2(rows: [[i64; 2]; 2]) -> Mat {
        Mat::from_i64_rows(&[&rows[0], &rows[1]])
    }

    /// The 2x2 split-pattern fixture: zero constant term in the top row,
    /// generic elsewhere, window 6.
    fn k_fixture() -> LaurentSeries {
        LaurentSeries::from_coeffs(
            0,
            vec![m2([[0, 0], [1, 5]]), m2([[2, 3], [7, -1]])],
            Window::Finite(6),
        )
    }

    #[test]
    fn normalization_strips_leading_zero_and_pads() {
        let s = LaurentSeries::from_coeffs(
            -1,
            vec![Mat::zero(2, 2), m2([[1, 0], [0, 1]])],
            Window::Finite(3),
        );
        assert_eq!(s.min_order(), Some(0));
        assert_eq!(s.coeff(2), Some(Mat::zero(2, 2)));
        assert_eq!(s.coeff(3), None);
    }

    #[test]
    fn exact_trailing_zeros_are_stripped() {
        let s = LaurentSeries::from_coeffs(
            0,
            vec![Mat::identity(2), Mat::zero(2, 2)],
            Window::Exact,
        );
        assert_eq!(s, LaurentSeries::identity(2));
        assert_eq!(s.coeff(100), Some(Mat::zero(2, 2)));
    }

    #[test]
    fn cancellation_leaves_zero_to_window() {
        let a = LaurentSeries::from_coeffs(0, vec![m2([[1, 2], [3, 4]])], Window::Finite(4));
        let d = &a - &a;
        assert!(d.is_zero_to_window());
        assert_eq!(d.min_order(), None);
        assert_eq!(d.window(), Window::Finite(4));
        assert_eq!(d.coeff(3), Some(Mat::zero(2, 2)));
        assert_eq!(d.coeff(4), None);
    }

    #[test]
    fn product_window_is_pessimistic() {
        // (e^-1 A + ... + O(e^3)) * (B + O(e^5)): unknown tails enter at
        // order min(3 + 0, 5 + (-1)) = 3.
        let a = LaurentSeries::from_coeffs(-1, vec![Mat::identity(2)], Window::Finite(3));
        let b = LaurentSeries::from_coeffs(0, vec![m2([[1, 1], [0, 1]])], Window::Finite(5));
        let prod = &a * &b;
        assert_eq!(prod.window(), Window::Finite(3));
        assert_eq!(prod.min_order(), Some(-1));
        assert_eq!(prod.coeff(-1), Some(m2([[1, 1], [0, 1]])));
    }

    #[test]
    fn exact_factors_stay_exact() {
        let a = LaurentSeries::monomial(m2([[0, 1], [1, 0]]), -2);
        let b = LaurentSeries::monomial(m2([[2, 0], [0, 3]]), 5);
        let prod = &a * &b;
        assert!(prod.window().is_exact());
        assert_eq!(prod.min_order(), Some(3));
        assert_eq!(prod.coeff(3), Some(m2([[0, 3], [2, 0]])));
    }

    #[test]
    fn classify_regular_and_top_row_patterns() {
        let part = p(2, 1);
        assert_eq!(LaurentSeries::identity(2).classify(&part), SeriesClass::Regular);
        assert_eq!(k_fixture().classify(&part), SeriesClass::ZeroTopRows);
        // Positive valuation is a fortiori zero in the top rows at order 0.
        let shifted = k_fixture().shift(2);
        assert_eq!(shifted.classify(&part), SeriesClass::ZeroTopRows);
    }

    #[test]
    fn classify_zero_to_window_needs_order_zero_certified() {
        let part = p(2, 1);
        assert_eq!(
            LaurentSeries::zero(2, Window::Finite(1)).classify(&part),
            SeriesClass::ZeroTopRows
        );
        assert_eq!(
            LaurentSeries::zero(2, Window::Finite(0)).classify(&part),
            SeriesClass::Other
        );
        assert_eq!(
            LaurentSeries::zero(2, Window::Exact).classify(&part),
            SeriesClass::ZeroTopRows
        );
    }

    #[test]
    fn classify_pole_patterns() {
        let part = p(2, 1);
        let pole_ok = LaurentSeries::from_coeffs(
            -1,
            vec![m2([[4, 0], [9, 0]]), m2([[1, 2], [3, 4]])],
            Window::Finite(3),
        );
        assert_eq!(pole_ok.classify(&part), SeriesClass::PoleZeroRightCols);
        let pole_bad = LaurentSeries::from_coeffs(-1, vec![m2([[4, 1], [9, 0]])], Window::Finite(3));
        assert_eq!(pole_bad.classify(&part), SeriesClass::Other);
        let deep = LaurentSeries::from_coeffs(-2, vec![m2([[4, 0], [9, 0]])], Window::Finite(3));
        assert_eq!(deep.classify(&part), SeriesClass::Other);
    }

    #[test]
    fn pattern_ideal_products() {
        let part = p(2, 1);
        let k = k_fixture();
        let l = LaurentSeries::from_coeffs(
            -1,
            vec![m2([[4, 0], [9, 0]]), m2([[1, 2], [3, 4]])],
            Window::Finite(4),
        );
        let reg = LaurentSeries::from_coeffs(
            0,
            vec![m2([[1, 2], [3, 4]]), m2([[0, 1], [1, 0]])],
            Window::Finite(5),
        );
        // Top-row-zero elements absorb regular factors on the right.
        assert_eq!((&k * &reg).classify(&part), SeriesClass::ZeroTopRows);
        assert_eq!((&k * &k).classify(&part), SeriesClass::ZeroTopRows);
        // Pole-pattern elements absorb regular factors on the left.
        assert_eq!((&reg * &l).classify(&part), SeriesClass::PoleZeroRightCols);
        // The pole coefficient annihilates the zero top rows: no pole at all.
        let prod = &l * &k;
        assert!(prod.min_order().is_none_or(|v| v >= 0));
        assert_ne!(prod.classify(&part), SeriesClass::Other);
    }

    /// Recursive cofactor determinant over the scalar-series grid; slow but
    /// independent of the elimination code under test.
    fn cofactor_det(grid: &[Vec<ScalarSeries>]) -> ScalarSeries {
        let n = grid.len();
        if n == 1 {
            return grid[0][0].clone();
        }
        let mut acc = ScalarSeries::zero(Window::Exact);
        for j in 0..n {
            let minor: Vec<Vec<ScalarSeries>> = (1..n)
                .map(|i| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| grid[i][c].clone())
                        .collect()
                })
                .collect();
            let mut term = grid[0][j].mul(&cofactor_det(&minor));
            if j % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term);
        }
        acc
    }

    #[test]
    fn det_valuation_matches_cofactor_oracle_on_split_fixture() {
        let k = k_fixture();
        let (d, lead) = k.det_valuation().unwrap();
        assert_eq!(d, 1);
        // Leading coefficient is det of the mixed corner block
        // [[a1, b1], [c0, d0]] = [[2, 3], [1, 5]].
        assert_eq!(lead, Scalar::from_int(2 * 5 - 3 * 1));
        let oracle = cofactor_det(&k.grid());
        assert_eq!(oracle.val(), Some(d));
        assert_eq!(oracle.leading(), Some(&lead));
    }

    #[test]
    fn det_valuation_of_pole_series() {
        let s = LaurentSeries::from_coeffs(
            -1,
            vec![m2([[4, 0], [9, 0]]), m2([[1, 2], [3, 4]])],
            Window::Finite(4),
        );
        let (d, lead) = s.det_valuation().unwrap();
        let oracle = cofactor_det(&s.grid());
        assert_eq!(oracle.val(), Some(d));
        assert_eq!(oracle.leading(), Some(&lead));
    }

    #[test]
    fn det_valuation_errors() {
        assert_eq!(
            LaurentSeries::zero(2, Window::Finite(3)).det_valuation(),
            Err(Error::InsufficientTruncation)
        );
        assert_eq!(
            LaurentSeries::zero(2, Window::Exact).det_valuation(),
            Err(Error::SingularToWindow)
        );
        let rank1 = LaurentSeries::constant(m2([[1, 1], [1, 1]]));
        assert_eq!(rank1.det_valuation(), Err(Error::SingularToWindow));
    }

    #[test]
    fn inverse_of_exact_constant_matches_matrix_inverse() {
        let m = m2([[1, 2], [3, 4]]);
        let s = LaurentSeries::constant(m.clone()).inverse().unwrap();
        assert!(s.window().is_exact());
        assert_eq!(s.min_order(), Some(0));
        assert_eq!(s.coeff(0), Some(m.inverse().unwrap()));
        assert_eq!(s.coeff(1), Some(Mat::zero(2, 2)));
    }

    #[test]
    fn inverse_of_split_pattern_is_dual_pole_pattern() {
        let part = p(2, 1);
        let k = k_fixture();
        let inv = k.inverse().unwrap();
        assert_eq!(inv.min_order(), Some(-1));
        assert_eq!(inv.classify(&part), SeriesClass::PoleZeroRightCols);
        let (ok, shared) = (&k * &inv).agrees_to_shared_window(&LaurentSeries::identity(2));
        assert!(ok, "product with inverse must match identity");
        assert!(matches!(shared, Window::Finite(w) if w >= 1));
        let (ok_left, _) = (&inv * &k).agrees_to_shared_window(&LaurentSeries::identity(2));
        assert!(ok_left);
    }

    #[test]
    fn inverse_errors_mirror_det_errors() {
        assert_eq!(
            LaurentSeries::zero(2, Window::Finite(3)).inverse(),
            Err(Error::InsufficientTruncation)
        );
        assert_eq!(
            LaurentSeries::constant(m2([[1, 1], [1, 1]])).inverse(),
            Err(Error::SingularToWindow)
        );
    }

    #[test]
    fn truncate_drops_knowledge_and_refuses_to_grow() {
        let s = LaurentSeries::identity(2);
        let t = s.truncate(2).unwrap();
        assert_eq!(t.window(), Window::Finite(2));
        assert_eq!(t.coeff(1), Some(Mat::zero(2, 2)));
        assert_eq!(t.coeff(2), None);
        assert_eq!(t.truncate(5), Err(Error::WindowGrow));
        assert_eq!(t.truncate(2).unwrap(), t);
    }

    #[test]
    fn shared_window_agreement() {
        let a = LaurentSeries::from_coeffs(
            0,
            vec![Mat::identity(2), m2([[1, 0], [0, 1]])],
            Window::Finite(4),
        );
        // Same through order 1, different at order 2 -- outside the narrower window.
        let b = LaurentSeries::from_coeffs(
            0,
            vec![Mat::identity(2), m2([[1, 0], [0, 1]]), m2([[9, 9], [9, 9]])],
            Window::Finite(2),
        )
        .truncate(2)
        .unwrap();
        let (ok, shared) = a.agrees_to_shared_window(&b);
        assert!(ok);
        assert_eq!(shared, Window::Finite(2));
        let c = LaurentSeries::from_coeffs(0, vec![m2([[0, 1], [1, 0]])], Window::Finite(4));
        let (ok, _) = a.agrees_to_shared_window(&c);
        assert!(!ok);
    }

    #[test]
    fn conjugation_preserves_determinant_data_and_orders() {
        let m = m2([[1, 1], [0, 1]]);
        let m_inv = m.inverse().unwrap();
        let k = k_fixture();
        let conj = k.conjugate(&m, &m_inv);
        assert_eq!(conj.min_order(), k.min_order());
        assert_eq!(conj.window(), k.window());
        assert_eq!(conj.det_valuation().unwrap(), k.det_valuation().unwrap());
    }

    #[test]
    fn serde_round_trip_renormalizes() {
        let s = LaurentSeries::from_coeffs(
            -1,
            vec![m2([[4, 0], [9, 0]]), m2([[1, 2], [3, 4]])],
            Window::Finite(3),
        );
        let json = serde_json::to_string(&s).unwrap();
        let back: LaurentSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        // Unnormalized input: a leading zero matrix shifts the reported order.
        let raw = r#"{"n":1,"nu":0,"window":3,"coeffs":[[[0]],[[7]]]}"#;
        let t: LaurentSeries = serde_json::from_str(raw).unwrap();
        assert_eq!(t.min_order(), Some(1));
        let bad = r#"{"n":2,"nu":0,"window":3,"coeffs":[[[1]]]}"#;
        assert!(serde_json::from_str::<LaurentSeries>(bad).is_err());
    }

    #[test]
    fn display_mentions_window() {
        let shown = format!("{}", k_fixture());
        assert!(shown.contains("O(e^6)"));
        let exact = format!("{}", LaurentSeries::identity(2));
        assert!(exact.contains("(exact)"));
    }

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3)
            .prop_map(|(rn, rd, im, id)| Scalar::gaussian(rn, rd, im, id))
    }

    fn small_mat() -> impl Strategy<Value = Mat> {
        proptest::collection::vec(small_scalar(), 4).prop_map(|v| {
            Mat::from_fn(2, 2, |i, j| v[2 * i + j].clone())
        })
    }

    fn exact_poly(max_len: usize) -> impl Strategy<Value = LaurentSeries> {
        (
            proptest::collection::vec(small_mat(), 1..=max_len),
            -2i64..=2,
        )
            .prop_map(|(coeffs, nu)| LaurentSeries::from_coeffs(nu, coeffs, Window::Exact))
    }

    fn exact_regular_poly(max_len: usize) -> impl Strategy<Value = LaurentSeries> {
        (
            proptest::collection::vec(small_mat(), 1..=max_len),
            0i64..=2,
        )
            .prop_map(|(coeffs, nu)| LaurentSeries::from_coeffs(nu, coeffs, Window::Exact))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_ring_laws_on_exact_series(
            a in exact_poly(3),
            b in exact_poly(3),
            c in exact_poly(3),
        ) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn prop_det_valuation_matches_cofactor(a in exact_poly(3)) {
            let grid = a.grid();
            match a.det_valuation() {
                Ok((d, lead)) => {
                    let oracle = cofactor_det(&grid);
                    prop_assert_eq!(oracle.val(), Some(d));
                    prop_assert_eq!(oracle.leading(), Some(&lead));
                }
                Err(Error::SingularToWindow) => {
                    prop_assert!(cofactor_det(&grid).is_zero());
                }
                Err(e) => prop_assert!(false, "unexpected error {e:?}"),
            }
        }

        #[test]
        fn prop_inverse_multiplies_back_to_identity(a in exact_poly(2)) {
            prop_assume!(a.det_valuation().is_ok());
            let inv = a.inverse().unwrap();
            let (ok, shared) = (&a * &inv).agrees_to_shared_window(&LaurentSeries::identity(2));
            prop_assert!(ok);
            prop_assert!(shared.covers(1));
        }

        #[test]
        fn prop_top_row_pattern_is_right_ideal(k_extra in small_mat(), reg in exact_regular_poly(2)) {
            let part = p(2, 1);
            let k = LaurentSeries::from_coeffs(
                0,
                vec![Mat::from_fn(2, 2, |i, j| {
                    if i == 0 { Scalar::zero() } else { k_extra.at(i, j).clone() }
                }), k_extra.clone()],
                Window::Finite(5),
            );
            prop_assert_eq!(k.classify(&part), SeriesClass::ZeroTopRows);
            prop_assert_ne!((&k * &reg).classify(&part), SeriesClass::Other);
            prop_assert_eq!((&k * &reg).classify(&part), SeriesClass::ZeroTopRows);
        }

        #[test]
        fn prop_pole_pattern_annihilates_top_row_pattern(
            pole_col in proptest::collection::vec(small_scalar(), 2),
            k_extra in small_mat(),
        ) {
            let l = LaurentSeries::from_coeffs(
                -1,
                vec![Mat::from_fn(2, 2, |i, j| {
                    if j == 0 { pole_col[i].clone() } else { Scalar::zero() }
                }), k_extra.clone()],
                Window::Finite(4),
            );
            let k = LaurentSeries::from_coeffs(
                0,
                vec![Mat::from_fn(2, 2, |i, j| {
                    if i == 0 { Scalar::zero() } else { k_extra.at(i, j).clone() }
                })],
                Window::Finite(4),
            );
            let prod = &l * &k;
            prop_assert!(prod.min_order().is_none_or(|v| v >= 0));
        }
    }
}
