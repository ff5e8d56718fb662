//! Driving the library the way the CLI does: JSON experiment configs in,
//! serialized verification records out.
//!
//! The same schema the `pclab` binary consumes can be handled in-process,
//! which is convenient for embedding the verifier in a larger pipeline or
//! generating configs programmatically.
//!
//! Run with: `cargo run --example experiment_configs`

use pclab::confinement::verify_instance;
use pclab::config::{ExperimentConfig, ModeConfig};

fn main() {
    let text = r#"{
        "schema": 1,
        "mode": "verify",
        "n": 2,
        "r": 1,
        "m": 3,
        "alpha": [[0, 0], [0, 0]],
        "beta_prev": [[[1, 0], [0, 0]]],
        "beta_cur": [[[0, 0], [0, 1]], [[1, 0], [0, 0]]]
    }"#;

    let cfg = ExperimentConfig::from_json(text).unwrap();
    println!("parsed config: mode = {}", cfg.mode.name());

    let ModeConfig::Verify(verify) = &cfg.mode else {
        unreachable!("the document above is a verify config");
    };
    let state = verify.to_state().unwrap();
    let record = verify_instance(&state).unwrap();

    println!("verdict: {:?}", record.report.verdict);
    println!("all consistency checks hold: {}", record.all_hold);
    assert!(record.all_hold);

    // The record round-trips through JSON with named, stable fields — the
    // same document the CLI writes with --out.
    let json = serde_json::to_string_pretty(&record).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["report"]["verdict"]["kind"], "confined");
    assert!(value["biconditionals"].as_array().unwrap().len() == 3);

    println!();
    println!("serialized record (trimmed):");
    for line in json.lines().take(14) {
        println!("  {line}");
    }
    println!("  ...");

    // Bad documents fail loudly at parse time, not at run time.
    let bad = r#"{"schema": 99, "mode": "verify"}"#;
    let err = ExperimentConfig::from_json(bad).unwrap_err();
    println!();
    println!("schema mismatch rejected: {err}");
}
