//! Predicting confinement from the opening data alone, then checking the
//! prediction against an actual run.
//!
//! Three determinants Z1, Z2, Z3 — computed from nothing but the opening
//! pair and the parameters — decide whether the four-step passage will
//! succeed. Each one gates a specific site: if Z_k is the first to vanish,
//! the measured valuation breaks exactly at step m+k. This example shows a
//! generic opening (all certificates alive) and three engineered openings,
//! each silencing one certificate.
//!
//! Run with: `cargo run --example certificates`

use pclab::confinement::{analyze, compute_certificates, verify_instance, Verdict};
use pclab::dynamics::{build_initial, InitialData, ModelParams};
use pclab::matrix::{BlockPartition, Mat};
use pclab::scalar::Scalar;
use pclab::witness::standard_witnesses;

fn main() {
    // A hand-picked generic opening with integer certificates.
    let partition = BlockPartition::new(2, 1).unwrap();
    let params = ModelParams::new(Mat::zero(2, 2), 2).unwrap();
    let data = InitialData {
        beta_prev: vec![Mat::from_i64_rows(&[&[1, 0], &[0, 0]])],
        beta_cur: vec![
            Mat::from_i64_rows(&[&[0, 0], &[0, 1]]),
            Mat::from_i64_rows(&[&[1, 0], &[0, 0]]),
        ],
    };
    let state = build_initial(&data, &partition, &params, 8).unwrap();

    let z = compute_certificates(&state).unwrap();
    println!("generic opening:");
    for (k, det) in z.dets().iter().enumerate() {
        match det {
            Some(d) => println!("  det Z{} = {d}", k + 1),
            None => println!("  det Z{} not reached", k + 1),
        }
    }
    assert!(z.all_nonzero());

    let report = analyze(&state).unwrap();
    assert_eq!(report.verdict, Verdict::Confined { time: 4 });
    println!("  verdict: confined in 4 steps, as the certificates promised");
    println!();

    // Engineered failures: one witness per certificate. Each opening is
    // built so its target determinant is exactly zero while the earlier
    // ones stay alive — and the orbit breaks exactly at the gated site.
    for w in standard_witnesses().iter().take(3) {
        let state = w.build(8).unwrap();
        let z = compute_certificates(&state).unwrap();
        assert_eq!(z.first_vanishing(), Some(w.target));

        let record = verify_instance(&state).unwrap();
        let verdict = &record.report.verdict;
        println!("witness '{}' (target {:?}):", w.label, w.target);
        let dets: Vec<String> = z
            .dets()
            .iter()
            .map(|d| d.as_ref().map_or_else(|| "not reached".into(), Scalar::to_string))
            .collect();
        println!("  certificate determinants: [{}]", dets.join(", "));
        match verdict {
            Verdict::NotConfined { reason } => println!("  verdict: not confined — {reason:?}"),
            other => println!("  verdict: {other:?}"),
        }
        assert!(!verdict.is_confined());
        // The vanishing certificate and the broken site agree, which is
        // exactly the biconditional the verifier records.
        assert!(record.all_hold);
        println!("  certificate/measurement biconditional verified");
        println!();
    }
}
