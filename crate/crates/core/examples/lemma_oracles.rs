//! Runs both lemma oracles and prints the verification summary: the
//! iteration bound on random extremal chains, and the empirical interpolation
//! constant on band-limited fields at two resolutions.

use chemoflow::lemmas::{check_iteration_bound, IterationCase, Y0Profile};
use chemoflow::verify::{verify_lemmas, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = IterationCase {
        a_bar: 2.0,
        r0: 1.0,
        b: 2.0,
        gamma1: 2.0,
        gamma2: 1.0,
        big_k: 1.5,
        y0: Y0Profile::Decaying {
            start: 1.5,
            floor: 0.5,
            rate: 1.0,
        },
        k_max: 6,
    };
    let check = check_iteration_bound(&case, 10.0)?;
    for (k, r) in check.ratios.iter().enumerate() {
        println!("k = {k}: sup y_k / bound_k = {r:.6e}");
    }

    let opts = VerifyOptions {
        cases: 50,
        seed: 1,
        ..VerifyOptions::default()
    };
    print!("{}", verify_lemmas(&opts)?.summary());
    Ok(())
}
