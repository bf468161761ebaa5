//! The numerically checkable asymptotic sums: the effective dimension
//! scaling N_1(lambda) ~ lambda^(-1/beta) and the three-case law of the
//! spectral series.
//!
//!     cargo run --release --example effective_dimension

use krrlab::{effective_dimension, series_value, Eigensystem};

fn main() -> krrlab::Result<()> {
    let eig: Vec<f64> = Eigensystem::min_kernel(5000).eigenvalues().to_vec();

    println!("effective dimension of the min kernel (beta = 2):");
    println!(
        "{:>8} {:>14} {:>14} {:>18}",
        "lambda", "N_1(lambda)", "N_2(lambda)", "N_1 sqrt(lambda)"
    );
    for exp in 2..=6 {
        let lambda = 10f64.powi(-exp);
        let n1 = effective_dimension(&eig, 1.0, lambda)?.total();
        let n2 = effective_dimension(&eig, 2.0, lambda)?.total();
        println!(
            "{lambda:>8.0e} {n1:>14.4} {n2:>14.4} {:>18.6}",
            n1 * lambda.sqrt()
        );
    }

    println!("\nspectral series sum_i (eigenvalue_i^p / (eigenvalue_i + lambda))^2 / i:");
    let normalizers: [(f64, fn(f64, f64) -> f64, &str); 3] = [
        (0.5, |v, l| v * l, "value * lambda"),
        (1.0, |v, l| v / (1.0 / l).ln(), "value / ln(1/lambda)"),
        (1.5, |v, _| v, "value"),
    ];
    for (p, normalizer, label) in normalizers {
        print!("  p = {p}: {label} =");
        for exp in 3..=6 {
            let lambda = 10f64.powi(-exp);
            let v = series_value(&eig, p, lambda)?.total();
            print!(" {:.4}", normalizer(v, lambda));
        }
        println!("   (stable across three decades)");
    }

    let with_tail = series_value(&eig, 1.0, 1e-4)?;
    println!(
        "\ntruncation handling at p = 1, lambda = 1e-4: truncated sum {:.4} + integral tail {:.2e}",
        with_tail.truncated, with_tail.tail_estimate
    );
    Ok(())
}
