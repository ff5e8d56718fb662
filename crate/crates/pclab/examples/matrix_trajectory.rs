//! Running the matrix recurrence straight through a degenerate step and
//! watching the singularity structure evolve.
//!
//! The state entering the degeneracy is a Laurent-series perturbation
//! `beta[m] = B0 + B1*eps + ...` whose constant term kills the top r rows.
//! Iterating `beta[n+1] = n*beta[n]^-1 - beta[n] - beta[n-1] - alpha` in the
//! series ring shows a pole appearing, migrating, and cancelling within
//! four steps, with the determinant valuations tracing -r, -r, +r, 0.
//!
//! Run with: `cargo run --example matrix_trajectory`

use pclab::dynamics::{build_initial, run_trajectory, InitialData, ModelParams};
use pclab::matrix::{BlockPartition, Mat};

fn main() {
    let n = 2;
    let r = 1;
    let m = 2;
    let partition = BlockPartition::new(n, r).unwrap();
    let params = ModelParams::new(Mat::zero(n, n), m).unwrap();

    // Constant term with zero top row (rank drop r), generic linear term.
    let data = InitialData {
        beta_prev: vec![Mat::from_i64_rows(&[&[1, 0], &[0, 0]])],
        beta_cur: vec![
            Mat::from_i64_rows(&[&[0, 0], &[0, 1]]),
            Mat::from_i64_rows(&[&[1, 0], &[0, 0]]),
        ],
    };
    let state = build_initial(&data, &partition, &params, 8).unwrap();

    println!("opening state beta[m] (series in eps):");
    println!("{}", state.beta_cur);
    println!();

    let segment = run_trajectory(&state.beta_prev, &state.beta_cur, &state.params, 4);
    assert!(segment.failure().is_none(), "trajectory must stay computable");

    println!("step-by-step determinant valuations and class membership:");
    for offset in 0..=4 {
        let s = segment.state(offset).unwrap();
        let (val, lead) = s.det_valuation().unwrap();
        println!(
            "  beta[m+{offset}]: det valuation {val:>2}, leading coefficient {lead}, class {:?}",
            s.classify(&partition)
        );
    }

    // The singular window: simple poles at m+1 and m+2, a deeper zero at
    // m+3, and a clean regular matrix at m+4.
    let vals: Vec<i64> = (1..=4)
        .map(|offset| segment.state(offset).unwrap().det_valuation().unwrap().0)
        .collect();
    assert_eq!(vals, vec![-(r as i64), -(r as i64), r as i64, 0]);
    println!();
    println!("pattern (-r, -r, +r, 0) confirmed for r = {r}");

    let reentry = segment.state(4).unwrap().coeff(0).unwrap();
    println!();
    println!("re-entry matrix beta[m+4](0):\n{reentry}");
    assert!(!reentry.det().unwrap().is_zero());
    println!("the degeneracy is gone: beta[m+4](0) is invertible");
}
