//! Render the two phase diagrams of the asymptotic risk as coarse ASCII
//! rasters (the CLI emits the same grids as CSV).
//!
//!     cargo run --release --example phase_diagram

use krrlab::theory::{phase_diagram, PhasePanel, Regime};

fn glyph(regime: Option<Regime>) -> char {
    match regime {
        Some(Regime::Underfitting) => 'U',
        Some(Regime::Overfitting) => 'O',
        Some(Regime::Interpolating) => 'I',
        Some(Regime::Noiseless) => 'N',
        None => '?',
    }
}

fn main() -> krrlab::Result<()> {
    let beta = 2.0;
    let resolution = 31;

    println!("(theta, s) panel at constant noise, beta = {beta}");
    println!("U = underfitting (bias dominates), O = overfitting (variance dominates), I = interpolating\n");
    let cells = phase_diagram(
        PhasePanel::Smoothness {
            s_min: 0.1,
            s_max: 3.0,
        },
        (0.1, 3.0),
        beta,
        resolution,
    )?;
    // rows were generated s-ascending; print top-down
    for row in (0..resolution).rev() {
        let line: String = (0..resolution)
            .map(|col| glyph(cells[row * resolution + col].regime))
            .collect();
        if row == resolution - 1 {
            println!("s=3.0 |{line}");
        } else if row == 0 {
            println!("s=0.1 |{line}");
        } else {
            println!("      |{line}");
        }
    }
    println!("       theta: 0.1 {:->26}", " 3.0");

    println!("\n(theta, tau) panel at s = 1.5 (sigma^2 = n^-tau); ? = no upper bound known");
    let cells = phase_diagram(
        PhasePanel::Noise {
            tau_min: 0.0,
            tau_max: 6.0,
            s: 1.5,
        },
        (0.1, 3.0),
        beta,
        resolution,
    )?;
    for row in (0..resolution).rev() {
        let line: String = (0..resolution)
            .map(|col| {
                let cell = &cells[row * resolution + col];
                if cell.flags.contains(&"crossover") {
                    'x'
                } else {
                    glyph(cell.regime)
                }
            })
            .collect();
        if row == resolution - 1 {
            println!("tau=6 |{line}");
        } else if row == 0 {
            println!("tau=0 |{line}");
        } else {
            println!("      |{line}");
        }
    }
    println!("       theta: 0.1 {:->26}", " 3.0");
    println!("\n(x marks the noisy-to-noiseless crossover locus of the min)");
    Ok(())
}
