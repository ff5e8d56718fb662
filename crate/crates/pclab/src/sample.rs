//! Seeded random experiments: how often does a randomly drawn degeneracy
//! pass through confined?
//!
//! Failure is expected to live on a finite union of algebraic varieties in
//! the opening data, so random exact-rational draws should land off it with
//! overwhelming probability. The sampler makes that claim empirical: it
//! draws openings from a documented distribution, runs the full analysis on
//! each, buckets the verdicts by failure site, and keeps the failing
//! instances for inspection.
//!
//! Determinism: trial `t` owns the RNG stream seeded with `seed + t`, so
//! results are independent of thread scheduling and identical across runs.
//! Draws that miss the preconditions (wrong rank, wrong determinant
//! valuation, singular trailing block) are rejected and redrawn from the
//! same stream; a trial that cannot produce an admissible opening after
//! `MAX_DRAWS_PER_TRIAL` attempts is reported indeterminate.

use crate::confinement::{analyze, ConfinementReport, NonConfinementReason, Verdict};
use crate::dynamics::{build_initial, InitialData, ModelParams};
use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Upper bound on rejected draws before a trial gives up.
pub const MAX_DRAWS_PER_TRIAL: usize = 64;

/// Default truncation window for sampled trajectories. Four forward steps
/// from this window still certify every site's valuation and class, while
/// coefficient heights (the dominant cost) stay small. Windows below 5 can
/// leave the last site uncertified and produce indeterminate rows.
pub const SAMPLE_WINDOW: i64 = 6;

/// What to sample and how.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: usize,
    pub r: usize,
    pub m: i64,
    pub trials: usize,
    /// Base seed; trial `t` owns the stream seeded with `seed + t`.
    #[serde(rename = "rng_seed", alias = "seed")]
    pub seed: u64,
    #[serde(default = "default_window")]
    pub window: i64,
    /// Numerators are drawn uniformly from `[-numerator_bound, numerator_bound]`.
    #[serde(default = "default_numerator_bound")]
    pub numerator_bound: i64,
    /// Denominators are drawn uniformly from `[1, denominator_bound]`.
    #[serde(default = "default_denominator_bound")]
    pub denominator_bound: i64,
}

fn default_window() -> i64 {
    SAMPLE_WINDOW
}

fn default_numerator_bound() -> i64 {
    9
}

fn default_denominator_bound() -> i64 {
    9
}

impl SampleSpec {
    /// Standard distribution (numerators in [-9, 9], denominators in [1, 9],
    /// default window) over the given shape.
    pub fn new(n: usize, r: usize, m: i64, trials: usize, seed: u64) -> Self {
        SampleSpec {
            n,
            r,
            m,
            trials,
            seed,
            window: SAMPLE_WINDOW,
            numerator_bound: default_numerator_bound(),
            denominator_bound: default_denominator_bound(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n == 0 {
            return fail("sample spec needs n >= 1");
        }
        if self.r == 0 || self.r > self.n {
            return fail("sample spec needs 1 <= r <= n");
        }
        if self.m < 2 {
            return fail("sample spec needs m >= 2");
        }
        if self.trials == 0 {
            return fail("sample spec needs trials >= 1");
        }
        if self.window < 4 {
            return fail("sample spec needs window >= 4 to observe all four sites");
        }
        if self.numerator_bound < 1 || self.denominator_bound < 1 {
            return fail("sample spec needs positive coefficient bounds");
        }
        Ok(())
    }
}

/// One complex rational with independently drawn real and imaginary parts.
fn draw_scalar(rng: &mut ChaCha8Rng, num_bound: i64, den_bound: i64) -> Scalar {
    let re_num = rng.gen_range(-num_bound..=num_bound);
    let re_den = rng.gen_range(1..=den_bound);
    let im_num = rng.gen_range(-num_bound..=num_bound);
    let im_den = rng.gen_range(1..=den_bound);
    Scalar::gaussian(re_num, re_den, im_num, im_den)
}

/// Entries drawn row by row, left to right.
fn draw_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, nb: i64, db: i64) -> Mat {
    let entries: Vec<Scalar> = (0..rows * cols).map(|_| draw_scalar(rng, nb, db)).collect();
    Mat::from_fn(rows, cols, |i, j| entries[i * cols + j].clone())
}

/// Draws one opening in a fixed order: previous-state constant term, the
/// degenerate state's constant term as a product of an `n x (n-r)` and an
/// `(n-r) x n` factor (zero when `r = n`), its linear coefficient, then
/// alpha.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    spec: &SampleSpec,
) -> Result<(InitialData, ModelParams)> {
    let (n, r) = (spec.n, spec.r);
    let (nb, db) = (spec.numerator_bound, spec.denominator_bound);
    let prev0 = draw_mat(rng, n, n, nb, db);
    let b0 = if r == n {
        Mat::zero(n, n)
    } else {
        &draw_mat(rng, n, n - r, nb, db) * &draw_mat(rng, n - r, n, nb, db)
    };
    let b1 = draw_mat(rng, n, n, nb, db);
    let alpha = draw_mat(rng, n, n, nb, db);
    Ok((
        InitialData {
            beta_prev: vec![prev0],
            beta_cur: vec![b0, b1],
        },
        ModelParams::new(alpha, spec.m)?,
    ))
}

/// Verdict histogram bucket, keyed by the first failing site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Confined,
    NotConfinedZ1,
    NotConfinedZ2,
    NotConfinedZ3,
    NotConfinedM4,
    Indeterminate,
}

impl Bucket {
    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Confined => "confined",
            Bucket::NotConfinedZ1 => "not_confined_z1",
            Bucket::NotConfinedZ2 => "not_confined_z2",
            Bucket::NotConfinedZ3 => "not_confined_z3",
            Bucket::NotConfinedM4 => "not_confined_m4",
            Bucket::Indeterminate => "indeterminate",
        }
    }

    pub fn is_failure(self) -> bool {
        !matches!(self, Bucket::Confined)
    }
}

fn break_site(reason: &NonConfinementReason) -> i64 {
    match reason {
        NonConfinementReason::CertificateVanished { offset, .. }
        | NonConfinementReason::PatternBroken { offset, .. }
        | NonConfinementReason::ClassBroken { offset, .. } => *offset,
    }
}

fn bucket_of(verdict: &Verdict) -> Bucket {
    match verdict {
        Verdict::Confined { .. } => Bucket::Confined,
        Verdict::Indeterminate { .. } => Bucket::Indeterminate,
        Verdict::NotConfined { reason } => match break_site(reason) {
            1 => Bucket::NotConfinedZ1,
            2 => Bucket::NotConfinedZ2,
            3 => Bucket::NotConfinedZ3,
            _ => Bucket::NotConfinedM4,
        },
    }
}

/// One row of the experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Added to the base seed for this trial's RNG stream.
    pub seed_offset: u64,
    pub bucket: Bucket,
    pub det_z1: Option<Scalar>,
    pub det_z2: Option<Scalar>,
    pub det_z3: Option<Scalar>,
    pub valuations: [Option<i64>; 4],
    /// Offset from `m` of the site where the pattern broke or the
    /// measurement stopped; `None` for confined trials.
    pub failing_step: Option<i64>,
}

/// A failing trial's full opening, kept for offline inspection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureCase {
    pub trial: usize,
    pub seed_offset: u64,
    pub bucket: Bucket,
    pub data: InitialData,
    pub alpha: Mat,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BucketCounts {
    pub confined: usize,
    pub not_confined_z1: usize,
    pub not_confined_z2: usize,
    pub not_confined_z3: usize,
    pub not_confined_m4: usize,
    pub indeterminate: usize,
}

impl BucketCounts {
    fn add(&mut self, bucket: Bucket) {
        match bucket {
            Bucket::Confined => self.confined += 1,
            Bucket::NotConfinedZ1 => self.not_confined_z1 += 1,
            Bucket::NotConfinedZ2 => self.not_confined_z2 += 1,
            Bucket::NotConfinedZ3 => self.not_confined_z3 += 1,
            Bucket::NotConfinedM4 => self.not_confined_m4 += 1,
            Bucket::Indeterminate => self.indeterminate += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.confined
            + self.not_confined_z1
            + self.not_confined_z2
            + self.not_confined_z3
            + self.not_confined_m4
            + self.indeterminate
    }

    /// Everything that is not a confirmed confined passage.
    pub fn failures(&self) -> usize {
        self.total() - self.confined
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub spec: SampleSpec,
    pub counts: BucketCounts,
    pub records: Vec<TrialRecord>,
    pub failures: Vec<FailureCase>,
}

impl SampleReport {
    /// True when failures make up less than `num/den` of all trials.
    pub fn failure_fraction_below(&self, num: usize, den: usize) -> bool {
        self.counts.failures() * den < self.counts.total() * num
    }

    /// One-line verdict histogram.
    pub fn summary_line(&self) -> String {
        let c = &self.counts;
        format!(
            "trials={} confined={} not_confined_z1={} not_confined_z2={} \
             not_confined_z3={} not_confined_m4={} indeterminate={}",
            c.total(),
            c.confined,
            c.not_confined_z1,
            c.not_confined_z2,
            c.not_confined_z3,
            c.not_confined_m4,
            c.indeterminate
        )
    }
}

struct TrialOutcome {
    record: TrialRecord,
    failure: Option<FailureCase>,
}

fn failing_step_of(report: &ConfinementReport) -> Option<i64> {
    match &report.verdict {
        Verdict::Confined { .. } => None,
        Verdict::NotConfined { reason } => Some(break_site(reason)),
        Verdict::Indeterminate { offset, .. } => Some(*offset),
    }
}

fn run_trial(spec: &SampleSpec, trial: usize) -> TrialOutcome {
    let seed_offset = trial as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(seed_offset));
    let p = BlockPartition::new(spec.n, spec.r).expect("spec validated");
    for _ in 0..MAX_DRAWS_PER_TRIAL {
        let Ok((data, params)) = random_instance(&mut rng, spec) else {
            continue;
        };
        let state = match build_initial(&data, &p, &params, spec.window) {
            Ok(state) => state,
            // The draw missed an opening precondition; reject and redraw.
            Err(_) => continue,
        };
        let report = match analyze(&state) {
            Ok(report) => report,
            // Singular trailing block: outside the certified regime; redraw.
            Err(_) => continue,
        };
        let bucket = bucket_of(&report.verdict);
        let record = TrialRecord {
            trial,
            seed_offset,
            bucket,
            det_z1: report.z_dets[0].clone(),
            det_z2: report.z_dets[1].clone(),
            det_z3: report.z_dets[2].clone(),
            valuations: report.measured_valuations,
            failing_step: failing_step_of(&report),
        };
        let failure = bucket.is_failure().then(|| FailureCase {
            trial,
            seed_offset,
            bucket,
            data,
            alpha: params.alpha().clone(),
            m: params.m(),
        });
        return TrialOutcome { record, failure };
    }
    TrialOutcome {
        record: TrialRecord {
            trial,
            seed_offset,
            bucket: Bucket::Indeterminate,
            det_z1: None,
            det_z2: None,
            det_z3: None,
            valuations: [None; 4],
            failing_step: None,
        },
        failure: None,
    }
}

/// Runs the whole experiment. Trials execute in parallel; the report is a
/// deterministic ordered reduction by trial index.
pub fn genericity_sample(spec: &SampleSpec) -> Result<SampleReport> {
    spec.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t))
        .collect();
    let mut counts = BucketCounts::default();
    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        counts.add(outcome.record.bucket);
        records.push(outcome.record);
        if let Some(f) = outcome.failure {
            failures.push(f);
        }
    }
    Ok(SampleReport {
        spec: spec.clone(),
        counts,
        records,
        failures,
    })
}

fn csv_opt_scalar(v: &Option<Scalar>) -> String {
    v.as_ref().map(|s| s.to_string()).unwrap_or_default()
}

fn csv_valuations(vals: &[Option<i64>; 4]) -> String {
    vals.iter()
        .map(|v| v.map(|x| x.to_string()).unwrap_or_else(|| "?".to_string()))
        .collect::<Vec<_>>()
        .join(";")
}

/// Renders the per-trial table. Fields never contain commas: determinants
/// print as exact complex rationals, valuations as a `;`-joined quadruple
/// with `?` for unmeasured sites, and the failing step as `m+k`.
pub fn render_csv(report: &SampleReport) -> String {
    let mut out =
        String::from("trial,seed_offset,verdict,det_Z1,det_Z2,det_Z3,valuations,failing_step\n");
    for rec in &report.records {
        let failing = rec
            .failing_step
            .map(|k| format!("m+{k}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.trial,
            rec.seed_offset,
            rec.bucket.as_str(),
            csv_opt_scalar(&rec.det_z1),
            csv_opt_scalar(&rec.det_z2),
            csv_opt_scalar(&rec.det_z3),
            csv_valuations(&rec.valuations),
            failing
        ));
    }
    out
}
