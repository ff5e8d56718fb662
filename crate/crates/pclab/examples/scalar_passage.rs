//! A complete tour of the scalar (1x1) recurrence passing through a
//! degenerate value.
//!
//! Push the orbit of `b[n+1] = n/b[n] - b[n] - b[n-1] - alpha` into a zero:
//! instead of dying, the orbit develops a simple pole, walks through three
//! singular steps, and re-enters with explicitly computable data. This
//! example checks each closed-form coefficient against the engine and then
//! visits the one-parameter family where re-entry genuinely fails.
//!
//! Run with: `cargo run --example scalar_passage`

use pclab::dynamics::scalar_walkthrough;
use pclab::scalar::Scalar;

fn main() {
    let m = 2;
    let beta_prev = Scalar::from_ratio(3, 2); // value one step before the zero
    let slope = Scalar::from_ratio(-5, 4); // entering slope of the zero
    let alpha = Scalar::from_ratio(1, 3);

    println!("scalar passage with m = {m}, b[m-1](0) = {beta_prev}, slope {slope}, alpha = {alpha}");
    println!();

    let walk = scalar_walkthrough(m, &beta_prev, &slope, &alpha, 8).unwrap();

    // The pole right after the zero has residue m / slope, and the next
    // step flips its sign exactly.
    let pole = &Scalar::from_int(m) / &slope;
    assert_eq!(walk.pole_coeff_m1.measured.as_ref(), Some(&pole));
    assert_eq!(walk.pole_coeff_m2.measured.as_ref(), Some(&-&pole));
    println!("step m+1 pole coefficient: {pole}");
    println!("step m+2 pole coefficient: {} (sign flipped)", -&pole);

    // Two steps later the orbit hits zero again, with a rescaled slope...
    let reentry_slope = -&(&Scalar::from_ratio(m + 3, m) * &slope);
    assert_eq!(walk.linear_coeff_m3.measured.as_ref(), Some(&reentry_slope));
    println!("step m+3 slope: {reentry_slope} (the entering slope times -(m+3)/m)");

    // ...and re-enters at a finite value that remembers where it came from.
    let reentry = &(&Scalar::from_ratio(m, m + 3) * &beta_prev)
        - &(&Scalar::from_ratio(2, m + 3) * &alpha);
    assert_eq!(walk.constant_m4.measured.as_ref(), Some(&reentry));
    println!("step m+4 value: {reentry} (m/(m+3) * previous - 2/(m+3) * alpha)");

    assert!(walk.all_match());
    println!();
    println!("all four closed forms match the series engine exactly");

    // The re-entry value vanishes precisely when m * previous = 2 * alpha.
    // On that locus the passage degenerates further instead of finishing.
    let locus_prev = Scalar::from_int(1);
    let locus_alpha = Scalar::from_ratio(m, 2);
    let broken = scalar_walkthrough(m, &locus_prev, &slope, &locus_alpha, 8).unwrap();
    let exit = broken.constant_m4.measured.clone().unwrap();
    assert!(exit.is_zero());
    println!();
    println!(
        "on the escape locus m*b[m-1](0) = 2*alpha the re-entry value is {exit}: \
         the degeneracy does not resolve in four steps"
    );
}
