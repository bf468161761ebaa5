//! A reduced noiseless-to-noisy crossover run: the excess-risk curve keeps
//! the fast noiseless slope until the variance floor takes over, and the
//! switch happens earlier for larger noise.
//!
//!     cargo run --release --example crossover_mini

use krrlab::harness::{crossover, CrossoverOptions, Profile};

fn main() -> krrlab::Result<()> {
    let opts = CrossoverOptions {
        profile: Profile {
            trials: 10,
            n_max: 2000,
            tolerance_scale: 1.5,
        },
        master_seed: 1,
        c: 0.005,
        sigma2_list: vec![0.0, 1e-3, 0.05, 1.0],
        thetas: vec![1.0],
        targets: vec!["sin2pi".to_string()],
    };
    let result = crossover(&opts)?;

    println!("sin2pi, theta = 1.0, lambda = 0.005/n, 10 trials\n");
    println!(
        "{:>9} {:>18} {:>22} {:>12}",
        "sigma2", "upper-half slope", "theory (clean/noisy)", "crossover n"
    );
    for curve in result
        .curves
        .iter()
        .filter(|c| c.reg == krrlab::harness::Regularization::Theta { value: 1.0 })
    {
        println!(
            "{:>9} {:>18} {:>22} {:>12}",
            curve.sigma2,
            curve
                .upper_fit
                .as_ref()
                .map(|e| format!("{:.3}", e.exponent))
                .unwrap_or_else(|| "--".into()),
            format!(
                "{} / {}",
                curve
                    .noiseless_slope
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_else(|| "--".into()),
                curve
                    .noisy_slope
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_else(|| "--".into())
            ),
            curve
                .crossover_n
                .map(|n| n.to_string())
                .unwrap_or_else(|| "--".into()),
        );
    }
    println!("\nfull curves are in crossover_curves.csv when run through the CLI with --out");
    Ok(())
}
