//! Verify the min kernel's analytic Mercer eigensystem numerically: the
//! integral operator residuals, orthonormality under quadrature, the
//! eigenvalue decay interval, and the diagonal partial sums.
//!
//!     cargo run --release --example eigensystem_check

use krrlab::{KernelSpec, QuadratureRule};

fn main() -> krrlab::Result<()> {
    let kernel = KernelSpec::min_kernel();
    let sys = kernel.eigensystem();
    let quad = QuadratureRule::simpson(8193)?;

    println!("min kernel, truncation M = {}", sys.truncation());
    println!("\nintegral-operator residuals  max_x | (T e_i)(x) - eigenvalue_i e_i(x) |");
    for i in [1usize, 2, 5, 10, 50] {
        let residual = kernel.verify_eigensystem(i, &quad)?;
        println!("  i = {i:<3} residual = {residual:.3e}");
    }

    println!("\northonormality of the first 10 under quadrature:");
    let mut worst = 0.0f64;
    for i in 1..=10usize {
        for j in 1..=i {
            let fi: Vec<f64> = quad
                .nodes()
                .iter()
                .map(|&x| sys.eigenfunction(i, x))
                .collect();
            let fj: Vec<f64> = quad
                .nodes()
                .iter()
                .map(|&x| sys.eigenfunction(j, x))
                .collect();
            let inner = quad.inner_product(&fi, &fj);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).abs());
        }
    }
    println!("  worst | <e_i, e_j> - delta_ij | = {worst:.3e}");

    let scaled: Vec<f64> = sys
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(idx, &l)| ((idx + 1) as f64).powi(2) * l)
        .collect();
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    println!("\neigenvalue decay: i^2 eigenvalue_i in [{lo:.6}, {hi:.6}]");
    println!(
        "  (pi^-2 = {:.6}, (pi/2)^-2 = {:.6})",
        std::f64::consts::PI.powi(-2),
        (std::f64::consts::PI / 2.0).powi(-2)
    );

    println!("\nMercer partial sums on the diagonal (should approach min(x, x) = x):");
    for x in [0.25, 0.5, 0.9] {
        let partial: f64 = (1..=sys.truncation())
            .map(|i| sys.eigenvalue(i) * sys.eigenfunction(i, x).powi(2))
            .sum();
        println!(
            "  x = {x:<4}  partial = {partial:.6}  gap = {:.2e}",
            x - partial
        );
    }
    Ok(())
}
