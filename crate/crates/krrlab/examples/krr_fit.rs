//! Fit kernel ridge regression on one sampled design and watch the
//! regularization path: in-sample residuals grow with lambda while the
//! solver keeps its reproduction residual at machine level.
//!
//!     cargo run --release --example krr_fit

use krrlab::{named_target, sample_labels, solve, Design, KernelSpec, TrialKey};

fn main() -> krrlab::Result<()> {
    let kernel = KernelSpec::min_kernel();
    let target = named_target("sin2pi")?;
    let key = TrialKey {
        master_seed: 7,
        cell: krrlab::seeding::cell_hash("krr-fit-example"),
        trial: 0,
    };
    let design = Design::sample(200, 0.0025, key)?;
    let y = sample_labels(&design, &target);

    println!("n = {}, noise sd = {}", design.n(), design.sigma2().sqrt());
    println!(
        "\n{:>10} {:>14} {:>16} {:>14}",
        "lambda", "in-sample rms", "solve residual", "f(0.5)"
    );
    for lambda in [0.0, 1e-6, 1e-4, 1e-2, 1.0] {
        let sol = solve(&kernel, &design, &y, lambda)?;
        let fitted = sol.fitted_values();
        let rms = (fitted
            .iter()
            .zip(&y)
            .map(|(f, yi)| (f - yi) * (f - yi))
            .sum::<f64>()
            / design.n() as f64)
            .sqrt();
        println!(
            "{lambda:>10.0e} {rms:>14.6e} {:>16.2e} {:>14.6}",
            sol.rel_residual(),
            sol.predict(0.5)?
        );
    }
    println!("\ntrue value f*(0.5) = {:.6}", target.evaluate(0.5)?);
    Ok(())
}
