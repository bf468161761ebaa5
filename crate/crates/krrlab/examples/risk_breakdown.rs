//! Exact (quadrature) bias/variance/excess for one cell, checked against
//! the Monte Carlo oracle with its standard errors.
//!
//!     cargo run --release --example risk_breakdown

use krrlab::risk::CellEvaluator;
use krrlab::{named_target, Design, KernelSpec, QuadratureRule, TrialKey};

fn main() -> krrlab::Result<()> {
    let kernel = KernelSpec::min_kernel();
    let target = named_target("sin2pi")?;
    let n = 100;
    let lambda = 0.005 * (n as f64).powf(-0.5);
    let sigma2 = 0.0025;

    let key = TrialKey {
        master_seed: 11,
        cell: krrlab::seeding::cell_hash("risk-breakdown-example"),
        trial: 0,
    };
    let design = Design::sample(n, sigma2, key)?;
    let quad = QuadratureRule::for_sample_size(n);
    let evaluator = CellEvaluator::new(kernel, target, quad);

    let (exact, residual) = evaluator.exact(&design, lambda, sigma2)?;
    println!("cell: sin2pi, n = {n}, lambda = {lambda:.3e}, sigma2 = {sigma2}");
    println!("\nexact (quadrature on closed forms):");
    println!("  bias^2   = {:.6e}", exact.bias2);
    println!("  variance = {:.6e}", exact.variance);
    println!("  excess   = {:.6e}", exact.excess);
    println!("  solver residual = {residual:.2e}");

    let draws = 2000;
    let (mc, detail) = evaluator.monte_carlo(&design, lambda, sigma2, draws, 99)?;
    println!("\nMonte Carlo oracle ({draws} noise draws):");
    println!("  bias^2   = {:.6e}", mc.bias2);
    println!(
        "  variance = {:.6e}   ({:+.2} SE from exact)",
        mc.variance,
        (mc.variance - exact.variance) / detail.se_variance
    );
    println!(
        "  excess   = {:.6e}   ({:+.2} SE from exact)",
        mc.excess,
        (mc.excess - exact.excess) / detail.se_excess
    );
    println!(
        "\ndecomposition identity |excess - (bias^2 + variance)| = {:.2e}",
        (exact.excess - (exact.bias2 + exact.variance)).abs()
    );
    Ok(())
}
