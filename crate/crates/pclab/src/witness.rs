//! Engineered openings lying exactly on a chosen certificate's vanishing
//! variety.
//!
//! The analyzers claim each certificate determinant is *equivalent* to the
//! full-depth valuation at its site. Random sampling almost never lands on
//! the vanishing varieties, so the failure direction needs constructed
//! instances: these builders solve one free entry of the opening data (a
//! trailing alpha entry, or a previous-state entry) so that the targeted
//! certificate is exactly zero while the earlier ones stay invertible.
//!
//! All builders produce depth-one data in normalized coordinates with a
//! scalar trailing block; `embed_regular_coordinate` then pads a witness
//! with an extra decoupled regular coordinate to reach higher dimension
//! without leaving the variety.

use crate::confinement::Certificate;
use crate::dynamics::{build_initial, InitialData, InitialState, ModelParams};
use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::scalar::Scalar;

/// A constructed opening together with the certificate it is engineered to
/// annihilate.
#[derive(Clone, Debug)]
pub struct Witness {
    pub label: String,
    pub target: Certificate,
    pub data: InitialData,
    pub params: ModelParams,
    pub partition: BlockPartition,
}

impl Witness {
    /// Validates and normalizes the data into a ready-to-analyze state.
    pub fn build(&self, window: i64) -> Result<InitialState> {
        build_initial(&self.data, &self.partition, &self.params, window)
    }
}

fn config(msg: &str) -> Error {
    Error::Config(msg.to_string())
}

fn nonzero<'a>(v: &'a Scalar, what: &str) -> Result<&'a Scalar> {
    if v.is_zero() {
        Err(config(&format!("witness requires nonzero {what}")))
    } else {
        Ok(v)
    }
}

/// Shared ingredients of the two-dimensional witnesses. `delta` is the
/// trailing entry of the degenerate state's constant term, `gamma` the
/// entry below the zero row, `d_prev`/`b_prev` the matching entries of the
/// previous state, `a12` the upper-right alpha entry. The trailing alpha
/// entry is always the solved knob.
struct ScalarKnobs {
    m: i64,
    gamma: Scalar,
    delta: Scalar,
    d_prev: Scalar,
    b_prev: Scalar,
    a12: Scalar,
}

impl ScalarKnobs {
    /// The value the first certificate takes when the trailing alpha entry
    /// is `a22`: `m/delta - d_prev - delta - a22 - (gamma/delta)(b_prev + a12)`.
    fn z1_with(&self, a22: &Scalar) -> Scalar {
        let m = Scalar::from_int(self.m);
        let coupling = &(&self.gamma / &self.delta) * &(&self.b_prev + &self.a12);
        &(&(&(&(&m / &self.delta) - &self.d_prev) - &self.delta) - a22) - &coupling
    }

    /// Trailing alpha entry that makes the first certificate equal `target`.
    fn a22_for_z1(&self, target: &Scalar) -> Scalar {
        &self.z1_with(&Scalar::zero()) - target
    }

    /// Second certificate value given the first:
    /// `(m+1)/z1 + (gamma/delta) b_prev - m/delta + d_prev`.
    fn z2_given(&self, z1: &Scalar) -> Scalar {
        let lead = &Scalar::from_int(self.m + 1) / z1;
        let coupling = &(&self.gamma / &self.delta) * &self.b_prev;
        &(&(&lead + &coupling) - &(&Scalar::from_int(self.m) / &self.delta)) + &self.d_prev
    }

    fn assemble(&self, label: &str, target: Certificate, a22: Scalar) -> Result<Witness> {
        nonzero(&self.delta, "trailing entry of the degenerate state")?;
        // With a dead upper-right column the states degenerate to rank-one
        // determinants that vanish identically and nothing is measurable.
        nonzero(
            &(&self.b_prev + &self.a12),
            "coupling b_prev + a12 (the witness needs a live upper-right column)",
        )?;
        let zero = Scalar::zero();
        let one = Scalar::one();
        let prev = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => one.clone(),
            (0, 1) => self.b_prev.clone(),
            (1, 1) => self.d_prev.clone(),
            _ => zero.clone(),
        });
        let cur0 = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (1, 0) => self.gamma.clone(),
            (1, 1) => self.delta.clone(),
            _ => zero.clone(),
        });
        let cur1 = Mat::from_fn(2, 2, |i, j| {
            if (i, j) == (0, 0) {
                one.clone()
            } else {
                zero.clone()
            }
        });
        let alpha = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => self.a12.clone(),
            (1, 1) => a22.clone(),
            _ => zero.clone(),
        });
        Ok(Witness {
            label: label.to_string(),
            target,
            data: InitialData {
                beta_prev: vec![prev],
                beta_cur: vec![cur0, cur1],
            },
            params: ModelParams::new(alpha, self.m)?,
            partition: BlockPartition::new(2, 1)?,
        })
    }
}

/// Witness with the first certificate exactly zero: solves the trailing
/// alpha entry from freely chosen remaining data.
pub fn z1_witness(
    label: &str,
    m: i64,
    gamma: Scalar,
    delta: Scalar,
    d_prev: Scalar,
    b_prev: Scalar,
    a12: Scalar,
) -> Result<Witness> {
    let k = ScalarKnobs {
        m,
        gamma,
        delta,
        d_prev,
        b_prev,
        a12,
    };
    nonzero(&k.delta, "trailing entry of the degenerate state")?;
    let a22 = k.a22_for_z1(&Scalar::zero());
    debug_assert!(k.z1_with(&a22).is_zero());
    k.assemble(label, Certificate::Z1, a22)
}

/// Witness with the second certificate exactly zero and the first
/// invertible: the first certificate's target value is forced to
/// `(m+1) / (m/delta - d_prev - (gamma/delta) b_prev)` and the trailing
/// alpha entry then closes the system.
pub fn z2_witness(
    label: &str,
    m: i64,
    gamma: Scalar,
    delta: Scalar,
    d_prev: Scalar,
    b_prev: Scalar,
    a12: Scalar,
) -> Result<Witness> {
    let k = ScalarKnobs {
        m,
        gamma,
        delta,
        d_prev,
        b_prev,
        a12,
    };
    nonzero(&k.delta, "trailing entry of the degenerate state")?;
    let w = &(&(&Scalar::from_int(m) / &k.delta) - &k.d_prev)
        - &(&(&k.gamma / &k.delta) * &k.b_prev);
    nonzero(&w, "m/delta - d_prev - (gamma/delta) b_prev (else no z1 value works)")?;
    let t1 = &Scalar::from_int(m + 1) / &w;
    let a22 = k.a22_for_z1(&t1);
    debug_assert!(k.z2_given(&t1).is_zero());
    k.assemble(label, Certificate::Z2, a22)
}

/// Witness with the third certificate exactly zero and the first two
/// invertible: the first certificate is pinned at the caller's `t1`, the
/// second's forced value determines the previous state's upper-right entry,
/// and the trailing alpha entry closes the system.
pub fn z3_witness(
    label: &str,
    m: i64,
    gamma: Scalar,
    delta: Scalar,
    d_prev: Scalar,
    t1: Scalar,
    a12: Scalar,
) -> Result<Witness> {
    nonzero(&delta, "trailing entry of the degenerate state")?;
    nonzero(&gamma, "entry below the zero row (it solves for b_prev)")?;
    nonzero(&t1, "first certificate target")?;
    let v = &(&Scalar::from_int(m + 1) / &t1) - &delta;
    nonzero(&v, "(m+1)/t1 - delta (else no second-certificate value works)")?;
    let t2 = &Scalar::from_int(m + 2) / &v;
    // Solve z2_given(t1) = t2 for b_prev.
    let b_prev = &(&delta / &gamma)
        * &(&(&t2 - &(&Scalar::from_int(m + 1) / &t1))
            + &(&(&Scalar::from_int(m) / &delta) - &d_prev));
    let k = ScalarKnobs {
        m,
        gamma,
        delta,
        d_prev,
        b_prev,
        a12,
    };
    let a22 = k.a22_for_z1(&t1);
    debug_assert!(k.z2_given(&t1) == t2);
    k.assemble(label, Certificate::Z3, a22)
}

/// Pads a witness with one extra decoupled coordinate living in the
/// trailing block: previous value `prev_extra`, degenerate-state constant
/// `cur_extra` (nonzero), alpha entry `alpha_extra`. The certificates gain
/// a diagonal factor each; the builder rejects choices that would zero one
/// of those factors and so move the first vanishing site.
pub fn embed_regular_coordinate(
    base: &Witness,
    prev_extra: Scalar,
    cur_extra: Scalar,
    alpha_extra: Scalar,
) -> Result<Witness> {
    nonzero(&cur_extra, "degenerate-state entry of the embedded coordinate")?;
    let m = base.params.m();
    let f1 = &(&(&(&Scalar::from_int(m) / &cur_extra) - &prev_extra) - &cur_extra) - &alpha_extra;
    nonzero(&f1, "first certificate factor of the embedded coordinate")?;
    let f2 = &(&(&Scalar::from_int(m + 1) / &f1) - &(&Scalar::from_int(m) / &cur_extra))
        + &prev_extra;
    nonzero(&f2, "second certificate factor of the embedded coordinate")?;
    let f3 = &(&cur_extra - &(&Scalar::from_int(m + 1) / &f1))
        + &(&Scalar::from_int(m + 2) / &f2);
    nonzero(&f3, "third certificate factor of the embedded coordinate")?;

    let n = base.partition.n();
    let pad = |mat: &Mat, extra: &Scalar| {
        Mat::from_fn(n + 1, n + 1, |i, j| {
            if i < n && j < n {
                mat.at(i, j).clone()
            } else if i == n && j == n {
                extra.clone()
            } else {
                Scalar::zero()
            }
        })
    };
    let zero = Scalar::zero();
    let pad_list = |coeffs: &[Mat], order0_extra: &Scalar| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, mat)| pad(mat, if k == 0 { order0_extra } else { &zero }))
            .collect::<Vec<_>>()
    };
    Ok(Witness {
        label: format!("{}+coord", base.label),
        target: base.target,
        data: InitialData {
            beta_prev: pad_list(&base.data.beta_prev, &prev_extra),
            beta_cur: pad_list(&base.data.beta_cur, &cur_extra),
        },
        params: ModelParams::new(pad(base.params.alpha(), &alpha_extra), m)?,
        partition: BlockPartition::new(n + 1, base.partition.r())?,
    })
}

/// Three witnesses per certificate: two two-dimensional parameter sets and
/// one three-dimensional embedding, all with the targeted determinant
/// exactly zero.
pub fn standard_witnesses() -> Vec<Witness> {
    let s = Scalar::from_int;
    let r = Scalar::from_ratio;
    let z1a = z1_witness("z1/a", 2, s(1), s(1), s(0), s(1), s(0)).unwrap();
    let z1b = z1_witness("z1/b", 3, s(2), s(1), s(1), s(1), s(0)).unwrap();
    let z1c = {
        let base = z1_witness("z1/c", 2, r(1, 2), s(2), s(0), s(1), s(1)).unwrap();
        embed_regular_coordinate(&base, s(0), s(1), s(0)).unwrap()
    };
    let z2a = z2_witness("z2/a", 2, s(1), s(1), s(0), s(0), s(1)).unwrap();
    let z2b = z2_witness("z2/b", 3, s(1), s(2), s(1), s(2), s(0)).unwrap();
    let z2c = {
        let base = z2_witness("z2/c", 2, s(1), s(1), s(0), s(0), s(1)).unwrap();
        embed_regular_coordinate(&base, s(1), s(-1), s(0)).unwrap()
    };
    let z3a = z3_witness("z3/a", 2, s(1), s(1), s(0), s(1), s(0)).unwrap();
    let z3b = z3_witness("z3/b", 4, s(2), s(1), s(1), s(2), s(1)).unwrap();
    let z3c = {
        let base = z3_witness("z3/c", 2, s(1), s(1), s(0), s(1), s(0)).unwrap();
        embed_regular_coordinate(&base, s(0), s(2), s(0)).unwrap()
    };
    vec![z1a, z1b, z1c, z2a, z2b, z2c, z3a, z3b, z3c]
}
