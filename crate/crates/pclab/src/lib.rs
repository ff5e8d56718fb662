//! pclab: an exact-arithmetic laboratory for singularity confinement in the
//! matrix discrete Painleve I recursion
//!
//! ```text
//!     b[n+1] = n * b[n]^-1 - b[n-1] - b[n] - alpha,      b[n] in C^(NxN)
//! ```
//!
//! iterated over truncated matrix Laurent series in a deformation parameter.
//! Everything runs over exact complex rationals; there is no floating point
//! anywhere in the pipeline.

pub mod cli;
pub mod config;
pub mod confinement;
pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod sample;
pub mod scalar;
mod scalar_series;
pub mod series;
pub mod window;
pub mod witness;

pub use confinement::{
    analyze, compute_certificates, confinement_verdict, measure, predict, verify_instance,
    Certificate, ConfinementReport, Measurement, NonConfinementReason, Prediction, Verdict,
    VerificationRecord, ZTriple,
};
pub use config::{ExperimentConfig, ModeConfig, SCHEMA_VERSION};
pub use dynamics::{
    build_initial, run_trajectory, step_backward, step_forward, InitialData, InitialState,
    ModelParams, TrajectorySegment, DEFAULT_WINDOW,
};
pub use error::{Error, Result};
pub use matrix::{BlockPartition, Blocks, InverseBranch, Mat};
pub use sample::{genericity_sample, render_csv, Bucket, SampleReport, SampleSpec, TrialRecord};
pub use scalar::Scalar;
pub use series::{LaurentSeries, SeriesClass};
pub use window::Window;
pub use witness::{
    embed_regular_coordinate, standard_witnesses, z1_witness, z2_witness, z3_witness, Witness,
};
