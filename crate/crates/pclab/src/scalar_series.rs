//! Truncated scalar Laurent series: the coefficient field used by the
//! elimination kernels on matrix series.
//!
//! Window bookkeeping is pessimistic everywhere. A series stores certified
//! coefficients only; any operation that could be contaminated by unknown
//! tail terms shrinks the window accordingly and never silently extends it.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::window::Window;

/// Fallback relative precision when inverting exact non-monomial data, whose
/// true inverse has infinitely many terms. Matches the default initial-data
/// window so precision is not the bottleneck anywhere in a default run.
pub(crate) const EXACT_INVERSE_PRECISION: i64 = 8;

/// Invariants: a nonzero series has `coeffs[0] != 0`; with `Finite(w)` the
/// storage spans exactly `nu..w`; with `Exact` trailing zeros are stripped.
/// The zero-to-window series has empty `coeffs` (and `nu == w` when finite),
/// meaning: every coefficient below `w` is certified zero, nothing more.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct ScalarSeries {
    nu: i64,
    coeffs: Vec<Scalar>,
    window: Window,
}

impl ScalarSeries {
    pub fn zero(window: Window) -> Self {
        let nu = match window {
            Window::Finite(w) => w,
            Window::Exact => 0,
        };
        ScalarSeries {
            nu,
            coeffs: Vec::new(),
            window,
        }
    }

    pub fn monomial(c: Scalar, order: i64) -> Self {
        ScalarSeries::from_parts(order, vec![c], Window::Exact)
    }

    pub fn constant(c: Scalar) -> Self {
        ScalarSeries::monomial(c, 0)
    }

    /// Normalizing constructor. The caller asserts that `coeffs` starting at
    /// order `nu`, padded with zeros, are exact up to `window`.
    pub fn from_parts(nu: i64, mut coeffs: Vec<Scalar>, window: Window) -> Self {
        let mut nu = nu;
        if let Window::Finite(w) = window {
            let keep = (w - nu).max(0) as usize;
            coeffs.truncate(keep);
            coeffs.resize(keep, Scalar::zero());
        }
        while coeffs.first().is_some_and(Scalar::is_zero) {
            coeffs.remove(0);
            nu += 1;
        }
        if window.is_exact() {
            while coeffs.last().is_some_and(Scalar::is_zero) {
                coeffs.pop();
            }
        }
        if coeffs.is_empty() {
            return ScalarSeries::zero(window);
        }
        ScalarSeries { nu, coeffs, window }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Certified valuation; `None` for a zero-to-window series.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.nu)
    }

    /// Lower bound on the valuation: the valuation itself when certified,
    /// otherwise the window (exactly-zero data bounds it by `Exact`).
    pub fn val_bound(&self) -> Window {
        match self.val() {
            Some(v) => Window::Finite(v),
            None => self.window,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.first()
    }

    /// Stored coefficient lookup; only meaningful below the window.
    pub(crate) fn stored(&self, k: i64) -> Scalar {
        if k < self.nu {
            return Scalar::zero();
        }
        let idx = (k - self.nu) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of order `k`, or `None` when `k` is outside the window.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn coeff(&self, k: i64) -> Option<Scalar> {
        self.window.covers(k + 1).then(|| self.stored(k))
    }

    pub(crate) fn stored_end(&self) -> i64 {
        self.nu + self.coeffs.len() as i64
    }

    pub fn add(&self, o: &Self) -> Self {
        let window = self.window.min(o.window);
        if self.is_zero() && o.is_zero() {
            return ScalarSeries::zero(window);
        }
        let lo = self
            .val()
            .into_iter()
            .chain(o.val())
            .min()
            .expect("one operand is nonzero");
        let hi = match window {
            Window::Finite(w) => w,
            Window::Exact => self.stored_end().max(o.stored_end()),
        };
        let coeffs = (lo..hi).map(|k| self.stored(k) + o.stored(k)).collect();
        ScalarSeries::from_parts(lo, coeffs, window)
    }

    pub fn neg(&self) -> Self {
        ScalarSeries {
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            window: self.window,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let window = self
            .window
            .shift_by(o.val_bound())
            .min(o.window.shift_by(self.val_bound()));
        if self.is_zero() || o.is_zero() {
            return ScalarSeries::zero(window);
        }
        let lo = self.nu + o.nu;
        let hi = match window {
            Window::Finite(w) => w,
            Window::Exact => self.stored_end() + o.stored_end() - 1,
        };
        let coeffs = (lo..hi)
            .map(|k| {
                let mut acc = Scalar::zero();
                for i in self.nu..self.stored_end() {
                    let j = k - i;
                    if j >= o.nu && j < o.stored_end() {
                        acc = acc + &self.coeffs[(i - self.nu) as usize]
                            * &o.coeffs[(j - o.nu) as usize];
                    }
                }
                acc
            })
            .collect();
        ScalarSeries::from_parts(lo, coeffs, window)
    }

    /// Reciprocal. A series with certified valuation `v` and relative
    /// precision `p = window - v` yields relative precision `p` again, so the
    /// result window is `window - 2v`. Exact monomials invert exactly; other
    /// exact inputs are capped at `EXACT_INVERSE_PRECISION` relative terms
    /// since their true inverses do not terminate.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(if self.window.is_exact() {
                Error::SingularToWindow
            } else {
                Error::InsufficientTruncation
            });
        }
        let v = self.nu;
        let lead_inv = self.coeffs[0].inv().expect("leading coefficient nonzero");
        let rel = match self.window {
            Window::Finite(w) => w - v,
            Window::Exact => {
                if self.coeffs.len() == 1 {
                    return Ok(ScalarSeries::monomial(lead_inv, -v));
                }
                EXACT_INVERSE_PRECISION.max(self.coeffs.len() as i64)
            }
        };
        debug_assert!(rel >= 1);
        let mut out: Vec<Scalar> = Vec::with_capacity(rel as usize);
        out.push(lead_inv.clone());
        for t in 1..rel {
            let mut acc = Scalar::zero();
            for i in 1..=t {
                let u = self.stored(v + i);
                if !u.is_zero() {
                    acc = acc + &u * &out[(t - i) as usize];
                }
            }
            out.push(-(&lead_inv * &acc));
        }
        Ok(ScalarSeries::from_parts(-v, out, Window::Finite(-v + rel)))
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }
}
