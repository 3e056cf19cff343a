//! Regime table for a few dimensions: which (alpha, beta) pairs satisfy the
//! boundedness conditions, and where beta > n/2.

use chemoflow::{classify_regime, classify_sublinear, collapse_threshold_hint, Regime};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [3u32, 4, 6] {
        println!("n = {n}   (1 = case 1, 2 = case 2, . = not covered, * marks beta > n/2)");
        let alphas: Vec<f64> = (0..=8).map(|i| 1.0 + 0.25 * f64::from(i)).collect();
        print!("{:>6}", "beta");
        for a in &alphas {
            print!("{a:>6}");
        }
        println!();
        for j in 0..10 {
            let beta = 1.25 + 0.5 * f64::from(j);
            let star = if collapse_threshold_hint(n, beta) {
                '*'
            } else {
                ' '
            };
            print!("{beta:>5}{star}");
            for &a in &alphas {
                let mark = match classify_regime(n, a, beta)?.verdict {
                    Regime::CoveredCase1 => "1",
                    Regime::CoveredCase2 => "2",
                    Regime::NotCovered => ".",
                };
                print!("{mark:>6}");
            }
            println!();
        }
        println!();
    }
    let v = classify_regime(4, 1.5, 4.0)?;
    println!(
        "(4, 1.5, 4): {} with lhs {} < rhs {}",
        v.verdict, v.lhs, v.rhs
    );
    println!(
        "sub-linear xi = 0.5, n = 4, beta = 1.5: {}",
        classify_sublinear(4, 0.5, 1.5)?
    );
    Ok(())
}
