//! Truncated matrix Laurent series and the two compatible families that
//! organize the confinement analysis.
//!
//! With a block partition (r leading rows/columns), two families of series
//! matter:
//!   * the "landing" class: finite series whose constant term has zero top
//!     rows — where an orbit sits right before a degeneracy clears;
//!   * the "pole" class: simple poles whose residue has zero trailing
//!     columns — what the orbit looks like inside the singular window.
//! This example exercises their ring-theoretic behavior and the valuation
//! duality that links them through matrix inversion.
//!
//! Run with: `cargo run --example series_classes`

use pclab::matrix::{BlockPartition, Mat};
use pclab::series::{LaurentSeries, SeriesClass};
use pclab::window::Window;

fn landing(entries: [[i64; 2]; 2], next: [[i64; 2]; 2]) -> LaurentSeries {
    LaurentSeries::from_coeffs(
        0,
        vec![
            Mat::from_i64_rows(&[&[0, 0], &entries[1]]),
            Mat::from_i64_rows(&[&next[0], &next[1]]),
        ],
        Window::Finite(6),
    )
}

fn pole(res_col: [i64; 2], next: [[i64; 2]; 2]) -> LaurentSeries {
    LaurentSeries::from_coeffs(
        -1,
        vec![
            Mat::from_i64_rows(&[&[res_col[0], 0], &[res_col[1], 0]]),
            Mat::from_i64_rows(&[&next[0], &next[1]]),
        ],
        Window::Finite(6),
    )
}

fn main() {
    let p = BlockPartition::new(2, 1).unwrap();

    let k1 = landing([[0, 0], [2, 1]], [[1, 3], [0, 1]]);
    let k2 = landing([[0, 0], [1, 4]], [[2, 0], [1, 1]]);
    assert_eq!(k1.classify(&p), SeriesClass::ZeroTopRows);
    println!("landing-class sample classified: {:?}", k1.classify(&p));

    // The landing class is a ring without identity: closed under + and *.
    assert_eq!((&k1 + &k2).classify(&p), SeriesClass::ZeroTopRows);
    assert_eq!((&k1 * &k2).classify(&p), SeriesClass::ZeroTopRows);
    println!("closure: sums and products stay in the landing class");

    // It also absorbs arbitrary regular series from the right.
    let a = LaurentSeries::from_coeffs(
        0,
        vec![
            Mat::from_i64_rows(&[&[1, 2], &[3, 4]]),
            Mat::from_i64_rows(&[&[0, 1], &[1, 0]]),
        ],
        Window::Finite(6),
    );
    assert_eq!(a.classify(&p), SeriesClass::Regular);
    assert_eq!((&k1 * &a).classify(&p), SeriesClass::ZeroTopRows);
    println!("right ideal: landing * regular stays in the landing class");

    // The pole class absorbs regular series from the left...
    let l = pole([3, 1], [[1, 0], [2, 1]]);
    assert_eq!(l.classify(&p), SeriesClass::PoleZeroRightCols);
    assert_eq!((&a * &l).classify(&p), SeriesClass::PoleZeroRightCols);
    println!("left ideal: regular * pole stays in the pole class");

    // ...while pole * landing has no pole at all: the zero columns of the
    // residue annihilate the zero rows of the landing constant term.
    let prod = &l * &k1;
    assert!(prod.min_order().map_or(true, |o| o >= 0));
    println!("inclusion: pole * landing is regular (the singular parts cancel)");

    // Valuation duality. A landing-class member whose determinant vanishes
    // to the maximal order r inverts into the pole class, and back.
    let (dval, _) = k1.det_valuation().unwrap();
    assert_eq!(dval, 1);
    let k_inv = k1.inverse().unwrap();
    assert_eq!(k_inv.classify(&p), SeriesClass::PoleZeroRightCols);
    let back = k_inv.inverse().unwrap();
    assert_eq!(back.classify(&p), SeriesClass::ZeroTopRows);
    let (agrees, shared) = k1.agrees_to_shared_window(&back);
    assert!(agrees);
    println!(
        "duality: det valuation {dval} inverts into the pole class; \
         double inverse returns the original on the shared window {shared}"
    );
}
