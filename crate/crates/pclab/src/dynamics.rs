//! The non-autonomous matrix recursion and its trajectory machinery.
//!
//! Forward map at index `n`:
//!
//! ```text
//!     b[n+1] = n * b[n]^-1 - b[n-1] - b[n] - alpha
//! ```
//!
//! Solving the same relation for `b[n-1]` gives the time-reversed map, so the
//! dynamics are invertible wherever the middle state is. The recursion index
//! is carried explicitly with every step because the map changes with `n`.
//!
//! A trajectory starts from a pair of states: a regular previous state and a
//! current state whose determinant vanishes to a prescribed order `r`. The
//! builder normalizes that pair by a similarity transformation so the
//! current state's constant term has zero top `r` rows, which the downstream
//! classification relies on; the recursion itself is equivariant under any
//! such conjugation, so nothing observable is lost.

use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use crate::window::Window;
use serde::{Deserialize, Serialize};

/// Default first-unknown order for initial data. The confinement analysis
/// needs coefficients through order `r` four steps in and order 0 five steps
/// in, after two window-shrinking series inversions; 8 leaves slack for
/// matrix sizes up to 4 with `r` up to 3. When the slack runs out the
/// pipeline reports the shortage instead of guessing.
pub const DEFAULT_WINDOW: i64 = 8;

/// Fixed data of the recursion: the constant matrix `alpha` and the index
/// `m` at which the degenerate state enters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    alpha: Mat,
    m: i64,
}

impl ModelParams {
    pub fn new(alpha: Mat, m: i64) -> Result<Self> {
        if !alpha.is_square() {
            return Err(Error::NonSquare);
        }
        if m < 2 {
            return Err(Error::Config(format!(
                "start index must be at least 2, got {m}"
            )));
        }
        Ok(ModelParams { alpha, m })
    }

    pub fn n(&self) -> usize {
        self.alpha.n_rows()
    }

    pub fn alpha(&self) -> &Mat {
        &self.alpha
    }

    pub fn m(&self) -> i64 {
        self.m
    }
}

/// `n * b^-1 - other - b - alpha`: the common shape of both time directions.
fn recursion_rhs(
    n_index: i64,
    other: &LaurentSeries,
    b: &LaurentSeries,
    params: &ModelParams,
) -> Result<LaurentSeries> {
    let inv = b.inverse()?;
    let alpha = LaurentSeries::constant(params.alpha.clone());
    Ok(&(&(&inv.scale_int(n_index) - other) - b) - &alpha)
}

/// One forward step: from `(b[n-1], b[n])` at index `n` to `b[n+1]`.
pub fn step_forward(
    n_index: i64,
    beta_prev: &LaurentSeries,
    beta_cur: &LaurentSeries,
    params: &ModelParams,
) -> Result<LaurentSeries> {
    recursion_rhs(n_index, beta_prev, beta_cur, params)
}

/// One backward step: from `(b[n+1], b[n])` at index `n` to `b[n-1]`.
/// Exact inverse of `step_forward` over the windows both sides certify.
pub fn step_backward(
    n_index: i64,
    beta_next: &LaurentSeries,
    beta_cur: &LaurentSeries,
    params: &ModelParams,
) -> Result<LaurentSeries> {
    recursion_rhs(n_index, beta_next, beta_cur, params)
}

/// A step that could not be completed, with the recursion index that was
/// being applied when it failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFailure {
    pub at_index: i64,
    pub error: Error,
}

/// A run of consecutive states `b[m-1], b[m], ..., b[m+k]`, possibly cut
/// short: a failed orbit is an experimental outcome, not an abort, so the
/// partial run plus the diagnostic is returned rather than an error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySegment {
    m: i64,
    states: Vec<LaurentSeries>,
    /// Window to which each produced state satisfies the recursion against
    /// its two predecessors; entry `k` belongs to the step made at index
    /// `m + k`.
    residual_windows: Vec<Window>,
    failure: Option<StepFailure>,
}

impl TrajectorySegment {
    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn states(&self) -> &[LaurentSeries] {
        &self.states
    }

    /// State at signed offset from `m`: `state(-1)` is the opening regular
    /// state, `state(0)` the degenerate one, `state(k)` is `b[m+k]`.
    pub fn state(&self, offset: i64) -> Option<&LaurentSeries> {
        usize::try_from(offset + 1).ok().and_then(|i| self.states.get(i))
    }

    pub fn residual_windows(&self) -> &[Window] {
        &self.residual_windows
    }

    pub fn failure(&self) -> Option<&StepFailure> {
        self.failure.as_ref()
    }

    /// Recomputes the recursion residual for the triple ending at offset
    /// `k + 1` (the step made at index `m + k`); zero-to-window on every
    /// honestly produced segment.
    pub fn residual(&self, k: i64, params: &ModelParams) -> Result<LaurentSeries> {
        let prev = self.state(k - 1).ok_or(Error::Config(format!(
            "no state at offset {}",
            k - 1
        )))?;
        let cur = self.state(k).ok_or(Error::Config(format!("no state at offset {k}")))?;
        let next = self.state(k + 1).ok_or(Error::Config(format!(
            "no state at offset {}",
            k + 1
        )))?;
        Ok(&step_forward(self.m + k, prev, cur, params)? - next)
    }
}

/// Iterates the forward map `steps` times from the given opening pair.
/// The first two states of the result are the inputs; each later one is
/// produced at index `m`, `m+1`, ... in turn. On a failed step the segment
/// ends where it stands and carries the diagnostic.
pub fn run_trajectory(
    initial_prev: &LaurentSeries,
    initial_cur: &LaurentSeries,
    params: &ModelParams,
    steps: usize,
) -> TrajectorySegment {
    assert!(steps >= 1, "a trajectory needs at least one step");
    let mut states = vec![initial_prev.clone(), initial_cur.clone()];
    let mut residual_windows = Vec::with_capacity(steps);
    let mut failure = None;
    for k in 0..steps {
        let n_index = params.m + k as i64;
        let prev = &states[states.len() - 2];
        let cur = &states[states.len() - 1];
        match step_forward(n_index, prev, cur, params) {
            Ok(next) => {
                residual_windows.push(next.window());
                states.push(next);
            }
            Err(error) => {
                failure = Some(StepFailure {
                    at_index: n_index,
                    error,
                });
                break;
            }
        }
    }
    TrajectorySegment {
        m: params.m,
        states,
        residual_windows,
        failure,
    }
}

/// Transforms a whole segment by `s -> M s M^-1` and the parameters by
/// `alpha -> M alpha M^-1`. The transformed segment satisfies the recursion
/// with the transformed `alpha`, and determinant valuations are untouched.
pub fn conjugate_segment(
    segment: &TrajectorySegment,
    m: &Mat,
    params: &ModelParams,
) -> Result<(TrajectorySegment, ModelParams)> {
    let m_inv = m.inverse()?;
    let states = segment
        .states
        .iter()
        .map(|s| s.conjugate(m, &m_inv))
        .collect();
    let new_params = ModelParams {
        alpha: params.alpha.conjugate_by(m, &m_inv),
        m: params.m,
    };
    Ok((
        TrajectorySegment {
            m: segment.m,
            states,
            residual_windows: segment.residual_windows.clone(),
            failure: segment.failure.clone(),
        },
        new_params,
    ))
}

/// Raw opening data: coefficient lists from order 0 upward for the previous
/// and current states. Finitely many coefficients define the input exactly;
/// the builder pads with zeros up to the working window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub beta_prev: Vec<Mat>,
    pub beta_cur: Vec<Mat>,
}

/// A validated, similarity-normalized opening pair ready to iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    pub beta_prev: LaurentSeries,
    pub beta_cur: LaurentSeries,
    /// The conjugation that put the current state's constant term into
    /// zero-top-rows form (identity when the input already was).
    pub normalizer: Mat,
    /// Parameters with `alpha` conjugated by the same transformation.
    pub params: ModelParams,
    pub partition: BlockPartition,
}

fn exact_series_from_list(n: usize, coeffs: &[Mat]) -> LaurentSeries {
    if coeffs.is_empty() {
        LaurentSeries::zero(n, Window::Exact)
    } else {
        LaurentSeries::from_coeffs(0, coeffs.to_vec(), Window::Exact)
    }
}

/// Validates and normalizes opening data.
///
/// Gates, in order: every coefficient must be `n x n`; the current state's
/// constant term must have rank exactly `n - r` (for `r = n` this forces a
/// zero constant term); after normalization the current state's determinant
/// must vanish to order exactly `r`. A rank failure and a wrong determinant
/// order are reported as distinct errors because they call for different
/// fixes to the data.
///
/// The coefficient lists define exact polynomials and the determinant gate
/// uses that exactness (an identically vanishing determinant is degenerate
/// data, not a truncation shortage). The returned states are then cut to the
/// working window, which is what every later operation gets to know.
pub fn build_initial(
    data: &InitialData,
    p: &BlockPartition,
    params: &ModelParams,
    window: i64,
) -> Result<InitialState> {
    let n = params.n();
    if p.n() != n {
        return Err(Error::BadPartition);
    }
    if data
        .beta_prev
        .iter()
        .chain(data.beta_cur.iter())
        .any(|c| c.n_rows() != n || c.n_cols() != n)
    {
        return Err(Error::DimensionMismatch);
    }
    let b0 = data
        .beta_cur
        .first()
        .cloned()
        .unwrap_or_else(|| Mat::zero(n, n));
    if b0.rank() != n - p.r() {
        return Err(Error::RankMismatch);
    }
    let normalizer = b0.similarity_normalize(p.r())?;
    let normalizer_inv = normalizer.inverse()?;
    let beta_prev =
        exact_series_from_list(n, &data.beta_prev).conjugate(&normalizer, &normalizer_inv);
    let beta_cur =
        exact_series_from_list(n, &data.beta_cur).conjugate(&normalizer, &normalizer_inv);
    match beta_cur.det_valuation() {
        Ok((d, _)) if d == p.r() as i64 => {}
        Ok(_) | Err(Error::SingularToWindow) => return Err(Error::DegenerateData),
        Err(e) => return Err(e),
    }
    let params = ModelParams {
        alpha: params.alpha.conjugate_by(&normalizer, &normalizer_inv),
        m: params.m,
    };
    Ok(InitialState {
        beta_prev: beta_prev
            .truncate(window)
            .expect("exact series truncate to any window"),
        beta_cur: beta_cur
            .truncate(window)
            .expect("exact series truncate to any window"),
        normalizer,
        params,
        partition: p.clone(),
    })
}

/// Walks the recursion backward from the last two states of a segment and
/// reports whether it reproduces the opening pair, together with the
/// narrowest window over which the comparisons were made.
pub fn backward_recovery(
    segment: &TrajectorySegment,
    params: &ModelParams,
) -> Result<(bool, Window)> {
    let states = &segment.states;
    assert!(
        states.len() >= 3,
        "backward recovery needs at least one produced state"
    );
    let top = segment.m + states.len() as i64 - 2;
    let mut next = states[states.len() - 1].clone();
    let mut cur = states[states.len() - 2].clone();
    for idx in (segment.m..top).rev() {
        let prev = step_backward(idx, &next, &cur, params)?;
        next = cur;
        cur = prev;
    }
    let (ok_cur, w_cur) = next.agrees_to_shared_window(&states[1]);
    let (ok_prev, w_prev) = cur.agrees_to_shared_window(&states[0]);
    Ok((ok_cur && ok_prev, w_cur.min(w_prev)))
}

/// One comparison between a coefficient read off a trajectory and its
/// closed-form value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffCheck {
    /// Offset of the state from `m`.
    pub offset: i64,
    /// Order of the coefficient within that state.
    pub order: i64,
    pub expected: Scalar,
    /// `None` when the trajectory ended early or the window fell short.
    pub measured: Option<Scalar>,
    pub matches: bool,
}

fn coeff_check(
    segment: &TrajectorySegment,
    offset: i64,
    order: i64,
    expected: Scalar,
) -> CoeffCheck {
    let measured = segment
        .state(offset)
        .and_then(|s| s.coeff(order))
        .map(|m| m.at(0, 0).clone());
    let matches = measured.as_ref() == Some(&expected);
    CoeffCheck {
        offset,
        order,
        expected,
        measured,
        matches,
    }
}

/// The one-dimensional model iterated through a simple zero, with each
/// stage's hallmark coefficient compared against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarWalkthrough {
    pub m: i64,
    /// Pole coefficient one step in: `m / b1`.
    pub pole_coeff_m1: CoeffCheck,
    /// Pole coefficient two steps in: `-m / b1`.
    pub pole_coeff_m2: CoeffCheck,
    /// Linear coefficient three steps in: `-((m+3)/m) * b1`.
    pub linear_coeff_m3: CoeffCheck,
    /// Constant term four steps in: `(m/(m+3)) * b_prev - (2/(m+3)) * alpha`.
    pub constant_m4: CoeffCheck,
    pub segment: TrajectorySegment,
}

impl ScalarWalkthrough {
    pub fn all_match(&self) -> bool {
        self.pole_coeff_m1.matches
            && self.pole_coeff_m2.matches
            && self.linear_coeff_m3.matches
            && self.constant_m4.matches
    }
}

/// Runs the one-dimensional walkthrough: previous state the constant
/// `b_prev`, current state `b1 * e` (a simple zero), four forward steps.
pub fn scalar_walkthrough(
    m: i64,
    beta_prev0: &Scalar,
    beta_m1: &Scalar,
    alpha: &Scalar,
    window: i64,
) -> Result<ScalarWalkthrough> {
    if beta_m1.is_zero() {
        return Err(Error::Config(
            "the entering state's linear coefficient must be nonzero".into(),
        ));
    }
    let params = ModelParams::new(Mat::from_fn(1, 1, |_, _| alpha.clone()), m)?;
    let prev = LaurentSeries::from_coeffs(
        0,
        vec![Mat::from_fn(1, 1, |_, _| beta_prev0.clone())],
        Window::Finite(window),
    );
    let cur = LaurentSeries::from_coeffs(
        1,
        vec![Mat::from_fn(1, 1, |_, _| beta_m1.clone())],
        Window::Finite(window),
    );
    let segment = run_trajectory(&prev, &cur, &params, 4);
    let b1_inv = beta_m1.inv().expect("nonzero by the gate above");
    let m_scalar = Scalar::from_int(m);
    let pole = &m_scalar * &b1_inv;
    let expected_m4 = &(&Scalar::from_ratio(m, m + 3) * beta_prev0)
        - &(&Scalar::from_ratio(2, m + 3) * alpha);
    Ok(ScalarWalkthrough {
        m,
        pole_coeff_m1: coeff_check(&segment, 1, -1, pole.clone()),
        pole_coeff_m2: coeff_check(&segment, 2, -1, -&pole),
        linear_coeff_m3: coeff_check(
            &segment,
            3,
            1,
            &(-&Scalar::from_ratio(m + 3, m)) * beta_m1,
        ),
        constant_m4: coeff_check(&segment, 4, 0, expected_m4),
        segment,
    })
}
