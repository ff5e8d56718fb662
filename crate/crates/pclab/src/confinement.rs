//! Confinement analysis: certificate matrices computed from opening data,
//! the valuation pattern they predict, the pattern actually measured along
//! a trajectory, and the verdict reconciling the two.
//!
//! With a degeneracy of depth `r` entering at index `m`, the confined orbit
//! shows determinant valuations `(-r, -r, +r, 0)` over the next four states
//! together with the class chain pole / pole / zero-top-rows / regular, and
//! the singularity is gone after 4 steps. Whether that happens is decided by
//! three `(n-r) x (n-r)` certificate matrices `Z1, Z2, Z3` built from the
//! opening blocks alone:
//!
//! ```text
//!     Z1 = m*D0^-1 - Dp - D0 - a22 - D0^-1 C0 (Bp + a12)
//!     Z2 = (m+1)*Z1^-1 + D0^-1 C0 Bp - m*D0^-1 + Dp
//!     Z3 = D0 - (m+1)*Z1^-1 + (m+2)*Z2^-1
//! ```
//!
//! where `C0, D0` are blocks of the degenerate state's constant term,
//! `Bp, Dp` blocks of the previous state's constant term, and `a12, a22`
//! blocks of `alpha`. Each nonvanishing determinant is equivalent to the
//! full-depth valuation at its site; each formula needs the previous
//! certificates invertible, so the triple may be partial. Everything assumes
//! `det D0 != 0`; when that fails the hypotheses are void and no prediction
//! is attempted.

use crate::dynamics::{run_trajectory, InitialState, TrajectorySegment};
use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::scalar::Scalar;
use crate::series::SeriesClass;
use serde::{Deserialize, Serialize};

/// Which certificate matrix a statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Z1,
    Z2,
    Z3,
}

impl Certificate {
    /// Offset from `m` of the site this certificate governs.
    pub fn site_offset(self) -> i64 {
        match self {
            Certificate::Z1 => 1,
            Certificate::Z2 => 2,
            Certificate::Z3 => 3,
        }
    }
}

/// The certificate matrices and their determinants. `Z2` needs `Z1`
/// invertible and `Z3` needs both, so the triple is cut off at the first
/// vanishing determinant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZTriple {
    pub z1: Mat,
    pub det_z1: Scalar,
    pub z2: Option<Mat>,
    pub det_z2: Option<Scalar>,
    pub z3: Option<Mat>,
    pub det_z3: Option<Scalar>,
}

impl ZTriple {
    pub fn all_nonzero(&self) -> bool {
        !self.det_z1.is_zero()
            && self.det_z2.as_ref().is_some_and(|d| !d.is_zero())
            && self.det_z3.as_ref().is_some_and(|d| !d.is_zero())
    }

    pub fn dets(&self) -> [Option<Scalar>; 3] {
        [
            Some(self.det_z1.clone()),
            self.det_z2.clone(),
            self.det_z3.clone(),
        ]
    }

    /// First certificate in order whose determinant vanishes or could not
    /// be formed; `None` when all three are present and nonzero.
    pub fn first_vanishing(&self) -> Option<Certificate> {
        if self.det_z1.is_zero() {
            Some(Certificate::Z1)
        } else if !self.det_z2.as_ref().is_some_and(|d| !d.is_zero()) {
            Some(Certificate::Z2)
        } else if !self.det_z3.as_ref().is_some_and(|d| !d.is_zero()) {
            Some(Certificate::Z3)
        } else {
            None
        }
    }
}

/// Evaluates the certificate formulas on a validated opening state.
///
/// Fails with `HypothesesVoid` when the trailing block of the degenerate
/// state's constant term is singular: nothing is predicted in that regime.
/// In the maximal-depth case `r = n` all blocks are empty, every determinant
/// is 1, and the prediction machinery degenerates gracefully.
pub fn compute_certificates(state: &InitialState) -> Result<ZTriple> {
    let p = &state.partition;
    let m = state.params.m();
    let b_cur0 = state
        .beta_cur
        .coeff(0)
        .ok_or(Error::InsufficientTruncation)?;
    let b_prev0 = state
        .beta_prev
        .coeff(0)
        .ok_or(Error::InsufficientTruncation)?;
    let cur = b_cur0.blocks(p)?;
    let prev = b_prev0.blocks(p)?;
    let al = state.params.alpha().blocks(p)?;
    if cur.d.det()?.is_zero() {
        return Err(Error::HypothesesVoid);
    }
    let d0_inv = cur.d.inverse()?;
    let d0_inv_c0 = &d0_inv * &cur.c;

    let z1 = &(&(&(&d0_inv.scale_int(m) - &prev.d) - &cur.d) - &al.d)
        - &(&d0_inv_c0 * &(&prev.b + &al.b));
    let det_z1 = z1.det()?;
    if det_z1.is_zero() {
        return Ok(ZTriple {
            z1,
            det_z1,
            z2: None,
            det_z2: None,
            z3: None,
            det_z3: None,
        });
    }
    let z1_inv = z1.inverse()?;

    let z2 = &(&(&z1_inv.scale_int(m + 1) + &(&d0_inv_c0 * &prev.b)) - &d0_inv.scale_int(m))
        + &prev.d;
    let det_z2 = z2.det()?;
    if det_z2.is_zero() {
        return Ok(ZTriple {
            z1,
            det_z1,
            z2: Some(z2),
            det_z2: Some(det_z2),
            z3: None,
            det_z3: None,
        });
    }

    let z3 = &(&cur.d - &z1_inv.scale_int(m + 1)) + &z2.inverse()?.scale_int(m + 2);
    let det_z3 = z3.det()?;
    Ok(ZTriple {
        z1,
        det_z1,
        z2: Some(z2),
        det_z2: Some(det_z2),
        z3: Some(z3),
        det_z3: Some(det_z3),
    })
}

/// What the certificates say should happen over the next four sites.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// All certificates nonzero: full-depth pattern, eventual regular exit.
    Pattern { valuations: [i64; 4] },
    /// A certificate vanished; the pattern must break at its site.
    NotGeneric { certificate: Certificate },
}

pub fn predict(z: &ZTriple, p: &BlockPartition) -> Prediction {
    match z.first_vanishing() {
        None => {
            let r = p.r() as i64;
            Prediction::Pattern {
                valuations: [-r, -r, r, 0],
            }
        }
        Some(certificate) => Prediction::NotGeneric { certificate },
    }
}

/// The determinant valuations that mark a confined passage, per offset 1..4.
pub fn expected_valuations(p: &BlockPartition) -> [i64; 4] {
    let r = p.r() as i64;
    [-r, -r, r, 0]
}

/// The class chain a confined passage walks through, per offset 1..4.
pub fn expected_classes() -> [SeriesClass; 4] {
    [
        SeriesClass::PoleZeroRightCols,
        SeriesClass::PoleZeroRightCols,
        SeriesClass::ZeroTopRows,
        SeriesClass::Regular,
    ]
}

/// Where a measurement stopped and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureFailure {
    /// Offset from `m` of the first site that could not be measured.
    pub offset: i64,
    pub error: Error,
}

/// Observed valuations and classes at offsets 1 through 4, with `None`
/// entries past the first failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub valuations: [Option<i64>; 4],
    pub classes: [Option<SeriesClass>; 4],
    pub failure: Option<MeasureFailure>,
}

impl Measurement {
    pub fn matches_pattern(&self, p: &BlockPartition) -> bool {
        let expected = expected_valuations(p);
        (0..4).all(|k| self.valuations[k] == Some(expected[k]))
            && (0..4).all(|k| self.classes[k] == Some(expected_classes()[k]))
    }
}

/// Reads determinant valuations and classes off the four states following
/// the degenerate one. A segment cut short, or a determinant that cannot be
/// certified within its window, ends the measurement at that offset.
pub fn measure(segment: &TrajectorySegment, p: &BlockPartition) -> Measurement {
    let mut valuations = [None; 4];
    let mut classes = [None; 4];
    let mut failure = None;
    for k in 1..=4i64 {
        let idx = (k - 1) as usize;
        let Some(state) = segment.state(k) else {
            failure = Some(MeasureFailure {
                offset: k,
                error: segment
                    .failure()
                    .map(|f| f.error.clone())
                    .unwrap_or(Error::InsufficientTruncation),
            });
            break;
        };
        classes[idx] = Some(state.classify(p));
        match state.det_valuation() {
            Ok((d, _)) => valuations[idx] = Some(d),
            Err(error) => {
                failure = Some(MeasureFailure { offset: k, error });
                break;
            }
        }
    }
    Measurement {
        valuations,
        classes,
        failure,
    }
}

/// Why an orbit was not confined.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonConfinementReason {
    /// A certificate determinant vanished and the orbit indeed missed the
    /// full-depth valuation at that certificate's site.
    CertificateVanished {
        certificate: Certificate,
        offset: i64,
        measured_valuation: i64,
    },
    /// A valuation came out off-pattern with no certificate naming the site
    /// (the residual non-generic set; the exit site has no certificate).
    PatternBroken {
        offset: i64,
        expected_valuation: i64,
        measured_valuation: i64,
    },
    /// Valuations on pattern but a state fell outside its expected class.
    ClassBroken {
        offset: i64,
        expected: SeriesClass,
        measured: SeriesClass,
    },
}

/// Outcome of a confinement experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Full pattern and class chain observed; `time` is the offset of the
    /// first regular, order-zero-determinant state after the degeneracy.
    Confined { time: i64 },
    NotConfined { reason: NonConfinementReason },
    /// Measurement ran out of certified coefficients before deciding.
    Indeterminate { offset: i64, error: Error },
}

impl Verdict {
    pub fn is_confined(&self) -> bool {
        matches!(self, Verdict::Confined { .. })
    }
}

fn indeterminate_from(measurement: &Measurement, offset_hint: i64) -> Verdict {
    match &measurement.failure {
        Some(f) => Verdict::Indeterminate {
            offset: f.offset,
            error: f.error.clone(),
        },
        None => Verdict::Indeterminate {
            offset: offset_hint,
            error: Error::InsufficientTruncation,
        },
    }
}

/// Reconciles measurement against the confined pattern. The verdict follows
/// the measurement alone; the prediction only names the responsible
/// certificate when the miss happens at a site whose certificate vanished.
pub fn confinement_verdict(
    prediction: &Prediction,
    measurement: &Measurement,
    p: &BlockPartition,
) -> Verdict {
    let expected = expected_valuations(p);
    for k in 0..4 {
        let offset = k as i64 + 1;
        match measurement.valuations[k] {
            Some(v) if v == expected[k] => {}
            Some(v) => {
                if let Prediction::NotGeneric { certificate } = prediction {
                    if certificate.site_offset() == offset {
                        return Verdict::NotConfined {
                            reason: NonConfinementReason::CertificateVanished {
                                certificate: *certificate,
                                offset,
                                measured_valuation: v,
                            },
                        };
                    }
                }
                return Verdict::NotConfined {
                    reason: NonConfinementReason::PatternBroken {
                        offset,
                        expected_valuation: expected[k],
                        measured_valuation: v,
                    },
                };
            }
            None => return indeterminate_from(measurement, offset),
        }
    }
    for k in 0..4 {
        let offset = k as i64 + 1;
        match measurement.classes[k] {
            Some(c) if c == expected_classes()[k] => {}
            Some(c) => {
                return Verdict::NotConfined {
                    reason: NonConfinementReason::ClassBroken {
                        offset,
                        expected: expected_classes()[k],
                        measured: c,
                    },
                }
            }
            None => return indeterminate_from(measurement, offset),
        }
    }
    let time = (1..=4)
        .find(|&k| {
            measurement.classes[k - 1] == Some(SeriesClass::Regular)
                && measurement.valuations[k - 1] == Some(0)
        })
        .expect("pattern checks above guarantee a regular exit state");
    Verdict::Confined { time: time as i64 }
}

/// Everything one experiment produces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfinementReport {
    pub r: usize,
    pub m: i64,
    pub predicted: Prediction,
    pub measured_valuations: [Option<i64>; 4],
    pub class_trace: [Option<SeriesClass>; 4],
    pub z_dets: [Option<Scalar>; 3],
    pub verdict: Verdict,
}

/// Runs the full experiment on a validated opening state: certificates,
/// prediction, four forward steps, measurement, verdict.
pub fn analyze(state: &InitialState) -> Result<ConfinementReport> {
    let z = compute_certificates(state)?;
    let prediction = predict(&z, &state.partition);
    let segment = run_trajectory(&state.beta_prev, &state.beta_cur, &state.params, 4);
    let measurement = measure(&segment, &state.partition);
    let verdict = confinement_verdict(&prediction, &measurement, &state.partition);
    Ok(ConfinementReport {
        r: state.partition.r(),
        m: state.params.m(),
        predicted: prediction,
        measured_valuations: measurement.valuations,
        class_trace: measurement.classes,
        z_dets: z.dets(),
        verdict,
    })
}

/// One certificate's claimed equivalence, checked both ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiconditionalCheck {
    pub certificate: Certificate,
    /// `None` when the certificate itself could not be formed (an earlier
    /// one vanished), making the claim vacuous.
    pub det_nonzero: Option<bool>,
    pub expected_valuation: i64,
    pub measured_valuation: Option<i64>,
    /// `det != 0  <=>  valuation on pattern`; `None` when either side is
    /// unavailable.
    pub holds: Option<bool>,
}

/// A named exact identity between quantities from two different routes;
/// `holds` is `None` when an ingredient was not available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: Option<bool>,
}

impl NamedCheck {
    fn evaluated(name: &str, holds: bool) -> Self {
        NamedCheck {
            name: name.to_string(),
            holds: Some(holds),
        }
    }

    fn vacuous(name: &str) -> Self {
        NamedCheck {
            name: name.to_string(),
            holds: None,
        }
    }
}

/// Cross-validation of one instance: the certificate determinants against
/// the measured valuations (both directions), the certificate formulas
/// against their definitional reads off the trajectory, and the structural
/// block identities of the re-entry state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub report: ConfinementReport,
    pub biconditionals: Vec<BiconditionalCheck>,
    pub definitional: Vec<NamedCheck>,
    pub structural: Vec<NamedCheck>,
    pub all_hold: bool,
}

impl VerificationRecord {
    /// True when nothing evaluated to false; vacuous checks do not count
    /// against it.
    fn compute_all_hold(&self) -> bool {
        self.biconditionals.iter().all(|b| b.holds != Some(false))
            && self
                .definitional
                .iter()
                .chain(self.structural.iter())
                .all(|c| c.holds != Some(false))
    }

    /// True when the verdict itself is decided (not indeterminate).
    pub fn decided(&self) -> bool {
        !matches!(self.report.verdict, Verdict::Indeterminate { .. })
    }
}

/// Blocks of the order-`k` coefficient of a state, when certified.
fn blocks_at(
    segment: &TrajectorySegment,
    offset: i64,
    order: i64,
    p: &BlockPartition,
) -> Option<crate::matrix::Blocks> {
    segment
        .state(offset)?
        .coeff(order)
        .and_then(|m| m.blocks(p).ok())
}

/// Runs the full experiment and cross-checks every exact identity the
/// analysis rests on, on this one instance.
pub fn verify_instance(state: &InitialState) -> Result<VerificationRecord> {
    let p = &state.partition;
    let z = compute_certificates(state)?;
    let prediction = predict(&z, p);
    let segment = run_trajectory(&state.beta_prev, &state.beta_cur, &state.params, 4);
    let measurement = measure(&segment, p);
    let verdict = confinement_verdict(&prediction, &measurement, p);
    let report = ConfinementReport {
        r: p.r(),
        m: state.params.m(),
        predicted: prediction,
        measured_valuations: measurement.valuations,
        class_trace: measurement.classes,
        z_dets: z.dets(),
        verdict,
    };

    let expected = expected_valuations(p);
    let det_states = [
        Some(!z.det_z1.is_zero()),
        z.det_z2.as_ref().map(|d| !d.is_zero()),
        z.det_z3.as_ref().map(|d| !d.is_zero()),
    ];
    let biconditionals = [Certificate::Z1, Certificate::Z2, Certificate::Z3]
        .into_iter()
        .enumerate()
        .map(|(k, certificate)| {
            let measured = measurement.valuations[k];
            let holds = match (det_states[k], measured) {
                (Some(nz), Some(v)) => Some(nz == (v == expected[k])),
                _ => None,
            };
            BiconditionalCheck {
                certificate,
                det_nonzero: det_states[k],
                expected_valuation: expected[k],
                measured_valuation: measured,
                holds,
            }
        })
        .collect();

    // Ingredients shared by the definitional and structural identities.
    let cur0 = state
        .beta_cur
        .coeff(0)
        .and_then(|m| m.blocks(p).ok())
        .expect("certificate computation already read this coefficient");
    let d0_inv = cur0.d.inverse()?;
    let d0_inv_c0 = &d0_inv * &cur0.c;

    let mut definitional = Vec::new();
    // The certificate formulas against their defining reads: Z1 and Z2 are
    // the trailing block of the state's constant term corrected by
    // D0^-1 C0 * (top-right block); Z3 is the trailing block itself.
    match blocks_at(&segment, 1, 0, p) {
        Some(bl) => {
            let direct = &bl.d + &(&d0_inv_c0 * &bl.b);
            definitional.push(NamedCheck::evaluated("z1_definition", direct == z.z1));
        }
        None => definitional.push(NamedCheck::vacuous("z1_definition")),
    }
    match (&z.z2, blocks_at(&segment, 2, 0, p)) {
        (Some(z2), Some(bl)) => {
            let direct = &bl.d + &(&d0_inv_c0 * &bl.b);
            definitional.push(NamedCheck::evaluated("z2_definition", &direct == z2));
        }
        _ => definitional.push(NamedCheck::vacuous("z2_definition")),
    }
    match (&z.z3, blocks_at(&segment, 3, 0, p)) {
        (Some(z3), Some(bl)) => {
            definitional.push(NamedCheck::evaluated("z3_definition", &bl.d == z3));
        }
        _ => definitional.push(NamedCheck::vacuous("z3_definition")),
    }

    let mut structural = Vec::new();
    // Re-entry state block identities, valid once Z1 and Z2 are invertible:
    // the constant term's lower blocks are Z3 [D0^-1 C0 | I], and the linear
    // correction satisfies A1' - B1' D0^-1 C0 = -((m+3)/m) (A1 - B1 D0^-1 C0)
    // with unticked blocks from the degenerate state's linear coefficient.
    match (&z.z3, blocks_at(&segment, 3, 0, p)) {
        (Some(z3), Some(bl)) => {
            structural.push(NamedCheck::evaluated(
                "reentry_constant_lower_blocks",
                bl.c == z3 * &d0_inv_c0 && &bl.d == z3,
            ));
        }
        _ => structural.push(NamedCheck::vacuous("reentry_constant_lower_blocks")),
    }
    match (
        z.z3.is_some(),
        blocks_at(&segment, 3, 1, p),
        state.beta_cur.coeff(1).and_then(|m| m.blocks(p).ok()),
    ) {
        (true, Some(re1), Some(cur1)) => {
            let m_idx = state.params.m();
            let lhs = &re1.a - &(&re1.b * &d0_inv_c0);
            let schur_lead = &cur1.a - &(&cur1.b * &d0_inv_c0);
            let rhs = schur_lead.scale(&-&Scalar::from_ratio(m_idx + 3, m_idx));
            structural.push(NamedCheck::evaluated("reentry_linear_schur_ratio", lhs == rhs));
        }
        _ => structural.push(NamedCheck::vacuous("reentry_linear_schur_ratio")),
    }

    let mut record = VerificationRecord {
        report,
        biconditionals,
        definitional,
        structural,
        all_hold: false,
    };
    record.all_hold = record.compute_all_hold();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_initial, InitialData, ModelParams, DEFAULT_WINDOW};
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn m2(rows: [[i64; 2]; 2]) -> Mat {
        Mat::from_i64_rows(&[&rows[0], &rows[1]])
    }

    fn state_n2r1(
        beta_prev: Vec<Mat>,
        beta_cur: Vec<Mat>,
        alpha: [[i64; 2]; 2],
        m: i64,
    ) -> InitialState {
        let params = ModelParams::new(m2(alpha), m).unwrap();
        let p = BlockPartition::new(2, 1).unwrap();
        build_initial(
            &InitialData {
                beta_prev,
                beta_cur,
            },
            &p,
            &params,
            DEFAULT_WINDOW,
        )
        .unwrap()
    }

    /// Decoupled fixture: D0 = 1, lower-right blocks of the previous state
    /// and alpha zero, so the certificates reduce to integer arithmetic.
    /// The top-left corner of the previous state is nonzero to keep the
    /// exit state's constant term invertible.
    fn diagonal_fixture() -> InitialState {
        state_n2r1(
            vec![m2([[1, 0], [0, 0]])],
            vec![m2([[0, 0], [0, 1]]), m2([[1, 0], [0, 0]])],
            [[0, 0], [0, 0]],
            2,
        )
    }

    #[test]
    fn certificates_on_integer_fixture() {
        // m=2, D0=1, C0=0, Bp=0, Dp=0, alpha=0:
        // Z1 = 2 - 0 - 1 - 0 - 0 = 1; Z2 = 3 + 0 - 2 + 0 = 1;
        // Z3 = 1 - 3 + 4 = 2.
        let z = compute_certificates(&diagonal_fixture()).unwrap();
        assert_eq!(z.det_z1, Scalar::one());
        assert_eq!(z.det_z2, Some(Scalar::one()));
        assert_eq!(z.det_z3, Some(Scalar::from_int(2)));
        assert!(z.all_nonzero());
        assert_eq!(z.first_vanishing(), None);
    }

    #[test]
    fn hypotheses_void_when_trailing_block_singular() {
        // D0 = 0 with C0 = 1 keeps rank 1 but voids the working hypothesis.
        let params = ModelParams::new(Mat::zero(2, 2), 2).unwrap();
        let p = BlockPartition::new(2, 1).unwrap();
        let st = build_initial(
            &InitialData {
                beta_prev: vec![Mat::identity(2)],
                beta_cur: vec![m2([[0, 0], [1, 0]]), m2([[0, 1], [0, 0]])],
            },
            &p,
            &params,
            DEFAULT_WINDOW,
        )
        .unwrap();
        assert_eq!(
            compute_certificates(&st).unwrap_err(),
            Error::HypothesesVoid
        );
    }

    #[test]
    fn prediction_branches() {
        let p = BlockPartition::new(2, 1).unwrap();
        let z = compute_certificates(&diagonal_fixture()).unwrap();
        assert_eq!(
            predict(&z, &p),
            Prediction::Pattern {
                valuations: [-1, -1, 1, 0]
            }
        );
        let broken = ZTriple {
            z1: Mat::zero(1, 1),
            det_z1: Scalar::zero(),
            z2: None,
            det_z2: None,
            z3: None,
            det_z3: None,
        };
        assert_eq!(
            predict(&broken, &p),
            Prediction::NotGeneric {
                certificate: Certificate::Z1
            }
        );
    }

    #[test]
    fn generic_instance_is_confined_with_time_four() {
        let report = analyze(&diagonal_fixture()).unwrap();
        assert_eq!(report.verdict, Verdict::Confined { time: 4 });
        assert_eq!(
            report.measured_valuations,
            [Some(-1), Some(-1), Some(1), Some(0)]
        );
        assert_eq!(
            report.class_trace,
            [
                Some(SeriesClass::PoleZeroRightCols),
                Some(SeriesClass::PoleZeroRightCols),
                Some(SeriesClass::ZeroTopRows),
                Some(SeriesClass::Regular),
            ]
        );
    }

    #[test]
    fn vanishing_first_certificate_breaks_pattern_at_its_site() {
        // Previous state the identity, degenerate state
        // [[2e, e], [1, 1+0e]]: Z1 = 2/1 - 1 - 1 - 0 - 1*(0+0) = 0.
        let st = state_n2r1(
            vec![Mat::identity(2)],
            vec![m2([[0, 0], [1, 1]]), m2([[2, 1], [0, 0]])],
            [[0, 0], [0, 0]],
            2,
        );
        let z = compute_certificates(&st).unwrap();
        assert!(z.det_z1.is_zero());
        assert!(z.z2.is_none());
        let report = analyze(&st).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::NotConfined {
                reason: NonConfinementReason::CertificateVanished {
                    certificate: Certificate::Z1,
                    offset: 1,
                    measured_valuation: 0,
                }
            }
        );
        // The vacuous-safe record still validates the evaluable claims.
        let record = verify_instance(&st).unwrap();
        assert!(record.all_hold);
        assert_eq!(record.biconditionals[0].holds, Some(true));
        assert_eq!(record.biconditionals[1].holds, None);
        assert_eq!(record.biconditionals[2].holds, None);
        assert_eq!(record.definitional[0].holds, Some(true));
        assert_eq!(record.structural[1].holds, None);
    }

    #[test]
    fn full_verification_on_generic_instance() {
        let record = verify_instance(&diagonal_fixture()).unwrap();
        assert!(record.all_hold);
        assert!(record.decided());
        for b in &record.biconditionals {
            assert_eq!(b.holds, Some(true), "{b:?}");
        }
        for c in record.definitional.iter().chain(&record.structural) {
            assert_eq!(c.holds, Some(true), "{c:?}");
        }
    }

    #[test]
    fn verification_on_coupled_instance() {
        // Nontrivial C0, off-diagonal alpha, nonzero previous state: all
        // identities must still close exactly.
        let record = verify_instance(&state_n2r1(
            vec![m2([[1, 2], [3, 4]]), m2([[0, 1], [1, 0]])],
            vec![m2([[0, 0], [3, 2]]), m2([[1, 1], [2, 1]])],
            [[1, 1], [0, 2]],
            3,
        ))
        .unwrap();
        assert!(record.all_hold, "{record:?}");
        assert_eq!(record.report.verdict, Verdict::Confined { time: 4 });
    }

    #[test]
    fn maximal_depth_runs_with_empty_certificates() {
        let params = ModelParams::new(Mat::zero(2, 2), 2).unwrap();
        let p = BlockPartition::new(2, 2).unwrap();
        let st = build_initial(
            &InitialData {
                beta_prev: vec![Mat::identity(2)],
                beta_cur: vec![Mat::zero(2, 2), Mat::identity(2)],
            },
            &p,
            &params,
            DEFAULT_WINDOW,
        )
        .unwrap();
        let z = compute_certificates(&st).unwrap();
        assert!(z.all_nonzero());
        assert_eq!(z.z1.n_rows(), 0);
        let report = analyze(&st).unwrap();
        assert_eq!(report.verdict, Verdict::Confined { time: 4 });
        assert_eq!(
            report.measured_valuations,
            [Some(-2), Some(-2), Some(2), Some(0)]
        );
        let record = verify_instance(&st).unwrap();
        assert!(record.all_hold);
    }

    #[test]
    fn scalar_exit_locus_breaks_at_the_last_site() {
        // One-dimensional model with m * prev = 2 * alpha: the exit state's
        // constant term is (m/(m+3))*prev - (2/(m+3))*alpha = 0.
        let params = ModelParams::new(Mat::from_i64_rows(&[&[1]]), 2).unwrap();
        let p = BlockPartition::new(1, 1).unwrap();
        let st = build_initial(
            &InitialData {
                beta_prev: vec![Mat::from_i64_rows(&[&[1]])],
                beta_cur: vec![Mat::zero(1, 1), Mat::from_i64_rows(&[&[1]])],
            },
            &p,
            &params,
            DEFAULT_WINDOW,
        )
        .unwrap();
        let report = analyze(&st).unwrap();
        match report.verdict {
            Verdict::NotConfined {
                reason:
                    NonConfinementReason::PatternBroken {
                        offset: 4,
                        expected_valuation: 0,
                        measured_valuation,
                    },
            } => assert!(measured_valuation >= 1),
            other => panic!("expected a break at the exit site, got {other:?}"),
        }
    }

    #[test]
    fn indeterminate_when_trajectory_cannot_continue() {
        let p = BlockPartition::new(2, 1).unwrap();
        let params = ModelParams::new(Mat::zero(2, 2), 2).unwrap();
        // A degenerate state whose first step immediately leaves nothing
        // invertible: previous = cur makes beta at m+1 singular to window.
        let prev = crate::series::LaurentSeries::zero(2, crate::window::Window::Finite(6));
        let cur = crate::series::LaurentSeries::from_coeffs(
            0,
            vec![m2([[0, 0], [1, 1]])],
            crate::window::Window::Finite(6),
        );
        let segment = run_trajectory(&prev, &cur, &params, 4);
        let measurement = measure(&segment, &p);
        assert!(measurement.failure.is_some());
        let verdict = confinement_verdict(
            &Prediction::Pattern {
                valuations: [-1, -1, 1, 0],
            },
            &measurement,
            &p,
        );
        assert!(matches!(verdict, Verdict::Indeterminate { .. }));
    }

    #[test]
    fn report_serialization_shape() {
        let report = analyze(&diagonal_fixture()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in [
            "r",
            "m",
            "predicted",
            "measured_valuations",
            "class_trace",
            "z_dets",
            "verdict",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(json["verdict"]["kind"], "confined");
        assert_eq!(json["verdict"]["time"], 4);
    }

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        (-3i64..=3, 1i64..=2).prop_map(|(n, d)| Scalar::from_ratio(n, d))
    }

    fn small_mat() -> impl Strategy<Value = Mat> {
        proptest::collection::vec(small_scalar(), 4)
            .prop_map(|v| Mat::from_fn(2, 2, |i, j| v[2 * i + j].clone()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Random admissible openings: nothing evaluable may come out false.
        #[test]
        fn prop_cross_validation_never_fails(
            prev0 in small_mat(),
            cur1 in small_mat(),
            alpha in small_mat(),
            c0 in small_scalar(),
            d0 in small_scalar(),
            m in 2i64..=4,
        ) {
            prop_assume!(!d0.is_zero());
            let b0 = Mat::from_fn(2, 2, |i, j| match (i, j) {
                (1, 0) => c0.clone(),
                (1, 1) => d0.clone(),
                _ => Scalar::zero(),
            });
            let params = ModelParams::new(alpha, m).unwrap();
            let p = BlockPartition::new(2, 1).unwrap();
            let data = InitialData {
                beta_prev: vec![prev0],
                beta_cur: vec![b0, cur1],
            };
            let Ok(st) = build_initial(&data, &p, &params, DEFAULT_WINDOW) else {
                return Ok(());
            };
            let record = verify_instance(&st).unwrap();
            prop_assert!(record.all_hold, "{record:?}");
        }
    }
}
