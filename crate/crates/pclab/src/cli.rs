//! Command-line driver: one JSON config in, reports out.
//!
//! Exit codes: 0 success, 1 confinement/verification failure, 2 certificate
//! hypotheses void, 64 usage or configuration error, 74 output I/O error.
//! Outputs are byte-identical for identical (config, seed); the sampler's
//! parallelism never affects results, and `PCLAB_THREADS` caps it.

use crate::config::{ExperimentConfig, ModeConfig, ScalarDemoConfig, VerifyConfig, SCHEMA_VERSION};
use crate::confinement::{analyze, verify_instance, ConfinementReport, VerificationRecord};
use crate::dynamics::{
    build_initial, scalar_walkthrough, CoeffCheck, InitialData, ModelParams, ScalarWalkthrough,
};
use crate::error::Error;
use crate::matrix::{BlockPartition, Mat};
use crate::sample::{genericity_sample, render_csv};
use crate::scalar::Scalar;
use clap::{Parser, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_HYPOTHESES_VOID: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ScalarDemo,
    Verify,
    Sample,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::ScalarDemo => "scalar-demo",
            Mode::Verify => "verify",
            Mode::Sample => "sample",
        }
    }
}

/// Exact-arithmetic singularity-confinement experiments.
#[derive(Parser, Debug)]
#[command(name = "pclab", version, about)]
pub struct Args {
    /// Experiment mode; must agree with the config's `mode` when given.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Path to the JSON configuration document.
    #[arg(long)]
    pub config: PathBuf,
    /// Output path; overrides the config's `output_path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base RNG seed override (sample mode only).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trial count override (sample mode only).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Truncation window override.
    #[arg(long)]
    pub window: Option<i64>,
}

type CliError = (i32, String);

fn usage(e: Error) -> CliError {
    (EXIT_USAGE, e.to_string())
}

/// Maps analysis-stage errors onto the exit-code contract.
fn exit_for(e: &Error) -> i32 {
    match e {
        Error::HypothesesVoid => EXIT_HYPOTHESES_VOID,
        Error::Config(_)
        | Error::NonSquare
        | Error::DimensionMismatch
        | Error::BadPartition
        | Error::RankMismatch
        | Error::DegenerateData => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn analysis_error(e: Error) -> CliError {
    let code = exit_for(&e);
    let msg = if code == EXIT_HYPOTHESES_VOID {
        format!("hypotheses void: {e}")
    } else {
        e.to_string()
    };
    (code, msg)
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| (EXIT_IO, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn apply_thread_cap() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("PCLAB_THREADS") {
        let threads: usize = raw.parse().ok().filter(|&t| t >= 1).ok_or((
            EXIT_USAGE,
            format!("PCLAB_THREADS must be a positive integer, got {raw:?}"),
        ))?;
        // A later call in the same process is a no-op; that is fine because
        // the pool size never changes results, only wall time.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    schema: u32,
    #[serde(flatten)]
    record: &'a VerificationRecord,
}

#[derive(Serialize)]
struct DemoDocument<'a> {
    schema: u32,
    walkthrough: &'a ScalarWalkthrough,
    report: &'a ConfinementReport,
}

fn coeff_line(label: &str, check: &CoeffCheck) -> String {
    let measured = check
        .measured
        .as_ref()
        .map(Scalar::to_string)
        .unwrap_or_else(|| "unmeasured".to_string());
    let status = if check.matches { "ok" } else { "MISMATCH" };
    format!(
        "  {label}: expected {}, measured {measured} [{status}]",
        check.expected
    )
}

fn run_scalar_demo(cfg: &ScalarDemoConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let walk = scalar_walkthrough(cfg.m, &cfg.beta_prev0, &cfg.beta_m1, &cfg.alpha, cfg.window)
        .map_err(analysis_error)?;
    let scalar_mat = |s: &Scalar| Mat::from_fn(1, 1, |_, _| s.clone());
    let params = ModelParams::new(scalar_mat(&cfg.alpha), cfg.m).map_err(analysis_error)?;
    let partition = BlockPartition::new(1, 1).map_err(analysis_error)?;
    let state = build_initial(
        &InitialData {
            beta_prev: vec![scalar_mat(&cfg.beta_prev0)],
            beta_cur: vec![Mat::zero(1, 1), scalar_mat(&cfg.beta_m1)],
        },
        &partition,
        &params,
        cfg.window,
    )
    .map_err(analysis_error)?;
    let report = analyze(&state).map_err(analysis_error)?;

    println!(
        "passage through a depth-one degeneracy: m={}, previous value {}, entering slope {}, alpha {}",
        cfg.m, cfg.beta_prev0, cfg.beta_m1, cfg.alpha
    );
    println!("{}", coeff_line("state m+1, order -1", &walk.pole_coeff_m1));
    println!("{}", coeff_line("state m+2, order -1", &walk.pole_coeff_m2));
    println!("{}", coeff_line("state m+3, order +1", &walk.linear_coeff_m3));
    println!("{}", coeff_line("state m+4, order  0", &walk.constant_m4));
    println!(
        "  measured determinant valuations over m+1..m+4: {}",
        walk.segment
            .states()
            .iter()
            .skip(2) // states()[0..2] are the opening pair, before m+1
            .map(|s| s
                .det_valuation()
                .map(|(v, _)| v.to_string())
                .unwrap_or_else(|_| "?".to_string()))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("verdict: {}", verdict_line(&report));

    if out.is_some() {
        let doc = DemoDocument {
            schema: SCHEMA_VERSION,
            walkthrough: &walk,
            report: &report,
        };
        let json = to_pretty_json(&doc)?;
        write_or_print(out, &json)?;
    }
    Ok(if report.verdict.is_confined() && walk.all_match() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn verdict_line(report: &ConfinementReport) -> String {
    match &report.verdict {
        crate::confinement::Verdict::Confined { time } => {
            format!("confined; the degeneracy is gone after {time} steps")
        }
        crate::confinement::Verdict::NotConfined { reason } => format!("not confined ({reason:?})"),
        crate::confinement::Verdict::Indeterminate { offset, error } => {
            format!("indeterminate at offset {offset}: {error}")
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| (EXIT_FAILED, format!("cannot serialize report: {e}")))
}

fn run_verify(cfg: &VerifyConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let state = cfg.to_state().map_err(analysis_error)?;
    let record = verify_instance(&state).map_err(analysis_error)?;
    let doc = VerifyDocument {
        schema: SCHEMA_VERSION,
        record: &record,
    };
    let json = to_pretty_json(&doc)?;
    write_or_print(out, &json)?;
    if record.all_hold && record.decided() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_FAILED)
    }
}

fn run_sample(
    spec: &crate::sample::SampleSpec,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let report = genericity_sample(spec).map_err(analysis_error)?;
    let csv = render_csv(&report);
    match out {
        Some(_) => {
            write_or_print(out, &csv)?;
            println!("{}", report.summary_line());
        }
        None => {
            // CSV owns stdout; keep the summary out of the byte stream.
            print!("{csv}");
            eprintln!("{}", report.summary_line());
        }
    }
    Ok(EXIT_OK)
}

fn dispatch(args: &Args) -> Result<i32, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(usage)?;
    if let Some(mode) = args.mode {
        if mode.name() != cfg.mode.name() {
            return Err((
                EXIT_USAGE,
                format!(
                    "--mode {} disagrees with the config's mode {}",
                    mode.name(),
                    cfg.mode.name()
                ),
            ));
        }
    }
    if let Some(window) = args.window {
        cfg.mode.set_window(window);
    }
    if args.seed.is_some() || args.trials.is_some() {
        match &mut cfg.mode {
            ModeConfig::Sample(spec) => {
                if let Some(seed) = args.seed {
                    spec.seed = seed;
                }
                if let Some(trials) = args.trials {
                    spec.trials = trials;
                }
            }
            _ => {
                return Err((
                    EXIT_USAGE,
                    "--seed and --trials apply only to sample mode".to_string(),
                ))
            }
        }
    }
    cfg.validate().map_err(usage)?;
    apply_thread_cap()?;
    let out_path = args
        .out
        .clone()
        .or_else(|| cfg.output_path.clone().map(PathBuf::from));
    let out = out_path.as_deref();
    match &cfg.mode {
        ModeConfig::ScalarDemo(c) => run_scalar_demo(c, out),
        ModeConfig::Verify(c) => run_verify(c, out),
        ModeConfig::Sample(c) => run_sample(c, out),
    }
}

/// Runs the CLI on the given argument list and returns the process exit
/// code. Split from `main` so tests can drive it in-process.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&args) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("pclab: {msg}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("pclab").chain(args.iter().copied()))
    }

    const VERIFY_GOOD: &str = r#"{
        "schema": 1, "mode": "verify", "n": 2, "r": 1, "m": 2,
        "alpha": [[0, 0], [0, 0]],
        "beta_prev": [[[1, 0], [0, 0]]],
        "beta_cur": [[[0, 0], [0, 1]], [[1, 0], [0, 0]]]
    }"#;

    const VERIFY_VOID: &str = r#"{
        "schema": 1, "mode": "verify", "n": 2, "r": 1, "m": 2,
        "alpha": [[0, 0], [0, 0]],
        "beta_prev": [[[1, 0], [0, 1]]],
        "beta_cur": [[[0, 0], [1, 0]], [[0, 1], [0, 0]]]
    }"#;

    #[test]
    fn verify_good_config_exits_zero_and_writes_report() {
        let cfg = write_config(VERIFY_GOOD);
        let out = tempfile::NamedTempFile::new().unwrap();
        let code = run_args(&[
            "--mode",
            "verify",
            "--config",
            cfg.path().to_str().unwrap(),
            "--out",
            out.path().to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(out.path()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["report"]["verdict"]["kind"], "confined");
        assert_eq!(json["all_hold"], true);
    }

    #[test]
    fn verify_void_hypotheses_exit_two() {
        let cfg = write_config(VERIFY_VOID);
        let code = run_args(&["--config", cfg.path().to_str().unwrap()]);
        assert_eq!(code, EXIT_HYPOTHESES_VOID);
    }

    #[test]
    fn malformed_json_exits_usage() {
        let cfg = write_config("{ this is not json");
        assert_eq!(
            run_args(&["--config", cfg.path().to_str().unwrap()]),
            EXIT_USAGE
        );
    }

    #[test]
    fn missing_config_file_exits_usage() {
        assert_eq!(
            run_args(&["--config", "/nonexistent/pclab.json"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn mode_mismatch_exits_usage() {
        let cfg = write_config(VERIFY_GOOD);
        assert_eq!(
            run_args(&["--mode", "sample", "--config", cfg.path().to_str().unwrap()]),
            EXIT_USAGE
        );
    }

    #[test]
    fn seed_override_outside_sample_mode_exits_usage() {
        let cfg = write_config(VERIFY_GOOD);
        assert_eq!(
            run_args(&[
                "--config",
                cfg.path().to_str().unwrap(),
                "--seed",
                "7"
            ]),
            EXIT_USAGE
        );
    }

    #[test]
    fn scalar_demo_confined_and_locus() {
        let confined = write_config(
            r#"{"schema": 1, "mode": "scalar-demo", "m": 2,
                "beta_prev0": 1, "beta_m1": 1, "alpha": 0}"#,
        );
        assert_eq!(
            run_args(&["--config", confined.path().to_str().unwrap()]),
            EXIT_OK
        );
        // m * beta_prev0 = 2 * alpha puts the exit state at zero.
        let locus = write_config(
            r#"{"schema": 1, "mode": "scalar-demo", "m": 2,
                "beta_prev0": 1, "beta_m1": 1, "alpha": 1}"#,
        );
        assert_eq!(
            run_args(&["--config", locus.path().to_str().unwrap()]),
            EXIT_FAILED
        );
    }

    #[test]
    fn sample_runs_and_writes_csv() {
        let cfg = write_config(
            r#"{"schema": 1, "mode": "sample", "n": 2, "r": 1, "m": 2,
                "trials": 3, "rng_seed": 5}"#,
        );
        let out = tempfile::NamedTempFile::new().unwrap();
        let code = run_args(&[
            "--config",
            cfg.path().to_str().unwrap(),
            "--out",
            out.path().to_str().unwrap(),
            "--trials",
            "4",
        ]);
        assert_eq!(code, EXIT_OK);
        let csv = std::fs::read_to_string(out.path()).unwrap();
        assert!(csv.starts_with("trial,seed_offset,verdict,"));
        assert_eq!(csv.lines().count(), 5, "{csv}");
    }

    #[test]
    fn unwritable_output_exits_io() {
        let cfg = write_config(VERIFY_GOOD);
        assert_eq!(
            run_args(&[
                "--config",
                cfg.path().to_str().unwrap(),
                "--out",
                "/nonexistent-dir/report.json"
            ]),
            EXIT_IO
        );
    }

    #[test]
    fn help_exits_zero_and_unknown_flag_exits_usage() {
        assert_eq!(run_args(&["--help"]), EXIT_OK);
        assert_eq!(run_args(&["--frobnicate"]), EXIT_USAGE);
    }
}
