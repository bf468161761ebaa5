//! A small learning-curve sweep: mean exact risk over seeded trials on an
//! n-grid, log-log rate fit, and the theoretical exponents next to it.
//!
//!     cargo run --release --example learning_curve

use krrlab::harness::{run_sweep, ExperimentConfig, NGridSpec, Regularization, Tolerances};

fn main() -> krrlab::Result<()> {
    let config = ExperimentConfig {
        name: "learning-curve-example".to_string(),
        kernel: "min".to_string(),
        target: "sin2pi".to_string(),
        theta_list: vec![0.5],
        include_interpolation: false,
        c: 0.005,
        sigma2_list: vec![0.0025],
        n_grid: NGridSpec::Range {
            start: 200,
            stop: 2000,
            step: 200,
        },
        trials: 10,
        quadrature: Default::default(),
        mc_draws: 2000,
        master_seed: 3,
        reducer: krrlab::Reducer::Mean,
        out: None,
    };
    let sweep = run_sweep(&config, Some(Tolerances::base().scaled(1.5)))?;
    let curve = sweep
        .curves
        .iter()
        .find(|c| c.reg == Regularization::Theta { value: 0.5 })
        .expect("the sweep has one curve");

    println!(
        "sin2pi, lambda = 0.005 n^-0.5, sigma2 = 0.0025, {} trials\n",
        config.trials
    );
    println!(
        "{:>6} {:>14} {:>14} {:>14}",
        "n", "bias^2", "variance", "excess"
    );
    for (idx, &(n, excess)) in curve.excess_curve.points.iter().enumerate() {
        println!(
            "{n:>6} {:>14.6e} {:>14.6e} {excess:>14.6e}",
            curve.bias_curve.points[idx].1, curve.variance_curve.points[idx].1
        );
    }
    let show = |name: &str, fit: &Option<krrlab::RateEstimate>, theory: Option<f64>| {
        if let Some(f) = fit {
            println!(
                "{name:>9}: fitted exponent {:.3} (theory {}), rms residual {:.2e}",
                f.exponent,
                theory
                    .map(|t| format!("{t:.2}"))
                    .unwrap_or_else(|| "--".into()),
                f.rms_residual
            );
        }
    };
    println!();
    show("bias", &curve.bias_fit, curve.prediction.bias_exponent);
    show(
        "variance",
        &curve.variance_fit,
        curve.prediction.variance_exponent,
    );
    show("excess", &curve.excess_fit, curve.prediction.risk_exponent);
    println!(
        "\nmax solver residual across the sweep: {:.2e}",
        sweep.max_residual
    );
    Ok(())
}
