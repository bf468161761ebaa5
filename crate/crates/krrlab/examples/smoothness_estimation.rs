//! Recover the source-condition exponent of a target from its coefficient
//! decay, for the named trig targets and for synthesized ones.
//!
//!     cargo run --release --example smoothness_estimation

use krrlab::{estimate_smoothness, named_target, synthesize_target, Eigensystem};

fn main() -> krrlab::Result<()> {
    let sys = Eigensystem::min_kernel(5000);

    println!("named targets (projected onto the min-kernel eigenbasis):");
    for name in ["cos2pi", "sin2pi", "sin3pi2"] {
        let target = named_target(name)?;
        let fitted = estimate_smoothness(&target, &sys)?;
        println!(
            "  {name:<8} nominal s = {:<5} fitted s = {fitted:.3}",
            target.nominal_smoothness()
        );
    }

    println!("\nsynthesized targets b_i = eigenvalue_i^(s/2) i^(-1/2):");
    for s in [0.5, 1.0, 1.5, 2.5] {
        let target = synthesize_target(&sys, s, |_| 1.0)?;
        let fitted = estimate_smoothness(&target, &sys)?;
        println!("  s = {s:<4} fitted s = {fitted:.4}");
    }

    println!("\nalternating coefficient rule a_i = (-1)^i stays within the source band:");
    let target = synthesize_target(&sys, 1.2, |i| if i % 2 == 0 { 1.0 } else { -1.0 })?;
    println!(
        "  s = 1.2  fitted s = {:.4}",
        estimate_smoothness(&target, &sys)?
    );
    Ok(())
}
