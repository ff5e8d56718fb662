//! Exact block-matrix algebra: partitions, Schur complements, and the
//! identities the rest of the crate leans on.
//!
//! Everything is computed over exact Gaussian rationals, so equalities
//! below are bit-for-bit, not approximate.
//!
//! Run with: `cargo run --example block_matrix_identities`

use pclab::matrix::{BlockPartition, InverseBranch, Mat};
use pclab::scalar::Scalar;

fn main() {
    // A 3x3 matrix split into a 1x1 leading block and a 2x2 trailing block.
    let p = BlockPartition::new(3, 1).unwrap();
    let m = Mat::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]]);
    let blocks = m.blocks(&p).unwrap();
    println!("matrix:\n{m}");
    println!(
        "partition r=1: A is {}x{}, D is {}x{}",
        blocks.a.n_rows(),
        blocks.a.n_rows(),
        blocks.d.n_rows(),
        blocks.d.n_rows()
    );

    // det M = det(D) * det(A - B D^-1 C): the determinant factors through
    // the trailing block and its complement.
    let schur = m.schur_d(&p).unwrap();
    let left = m.det().unwrap();
    let right = &blocks.d.det().unwrap() * &schur.det().unwrap();
    assert_eq!(left, right);
    println!("det factorization: {left} = det(D) * det(Schur) = {right}");

    // The blockwise inverse agrees with straight Gaussian elimination,
    // whichever branch computes it.
    let plain = m.inverse().unwrap();
    for branch in [InverseBranch::SchurD, InverseBranch::SchurA, InverseBranch::Mixed] {
        assert_eq!(m.block_inverse_via(&p, branch).unwrap(), plain);
    }
    println!("blockwise inverse agrees with plain inversion on all three branches");

    // The generic entry point picks a working branch on its own, even when
    // one block is singular.
    let tricky = Mat::from_i64_rows(&[&[1, 1, 0], &[1, 1, 1], &[0, 1, 1]]);
    assert!(tricky.blocks(&p).unwrap().d.det().unwrap().is_zero());
    let via = tricky.block_inverse(&p).unwrap();
    assert_eq!(via, tricky.inverse().unwrap());
    println!("singular trailing block: fallback branch still inverts correctly");

    // Complex rational entries are first-class citizens.
    let i = Scalar::i();
    let z = Mat::from_fn(2, 2, |r, c| {
        if r == c {
            &Scalar::from_ratio(1, 2) + &i
        } else {
            Scalar::from_int((r + 2 * c) as i64)
        }
    });
    let z_inv = z.inverse().unwrap();
    assert_eq!(&z * &z_inv, Mat::identity(2));
    println!("complex rational inverse verified: Z * Z^-1 = I");

    // Conjugation preserves determinants; the confinement analysis relies
    // on this similarity invariance.
    let g = Mat::from_i64_rows(&[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1]]);
    let conj = m.conjugate_by(&g, &g.inverse().unwrap());
    assert_eq!(conj.det().unwrap(), m.det().unwrap());
    println!("similarity invariance: det(G M G^-1) = det(M)");
}
