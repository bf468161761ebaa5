//! The closed-form rate theory: exponents across the theta grid, the
//! optimal regularization scaling, and the three-case approximation law.
//!
//!     cargo run --release --example rate_theory

use krrlab::theory::{approximation_error_law, optimal_theta, predict_rates, NoiseModel};

fn main() -> krrlab::Result<()> {
    let beta = 2.0;
    for (label, s) in [("cos2pi", 0.5), ("sin2pi", 1.5), ("sin3pi2", f64::INFINITY)] {
        let (theta_op, rate_op) = optimal_theta(s, beta)?;
        println!("target {label} (s = {s}, beta = {beta}): theta_op = {theta_op}, optimal rate = {rate_op}");
        println!(
            "{:>6} {:>8} {:>10} {:>8} {:>15}",
            "theta", "bias", "variance", "risk", "regime"
        );
        for theta in [0.2, 0.4, 0.5, 1.0, 2.0, 3.0] {
            let p = predict_rates(s, beta, theta, NoiseModel::Noisy { tau: 0.0 })?;
            let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "--".into());
            println!(
                "{theta:>6.1} {:>8} {:>10} {:>8} {:>15}",
                fmt(p.bias_exponent),
                fmt(p.variance_exponent),
                fmt(p.risk_exponent),
                p.regime.label()
            );
        }
        println!();
    }

    println!("approximation-error law (regularization bias of f_lambda):");
    let lambdas = [1e-2, 1e-3, 1e-4];
    for (s, gamma) in [(1.5, 0.0), (2.0, 0.0), (3.7, 0.5)] {
        let (case, values) = approximation_error_law(s, gamma, &lambdas)?;
        let rendered: Vec<String> = values
            .iter()
            .map(|(l, v)| format!("{l:.0e} -> {v:.3e}"))
            .collect();
        println!(
            "  s = {s}, gamma = {gamma}: {} [{}]",
            case.label(),
            rendered.join(", ")
        );
    }
    Ok(())
}
