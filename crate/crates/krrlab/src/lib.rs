//! A numerical laboratory for kernel ridge regression learning curves on
//! synthetic spectral models.
//!
//! The crate simulates KRR through its representer closed form, computes
//! exact (noise-marginalized) bias and variance curves by quadrature, fits
//! empirical convergence rates by log-log least squares and compares them
//! against closed-form rate theory.
//!
//! Modules map onto the pipeline:
//!
//! * [`kernel`] — truncated Mercer expansions; the min kernel and a
//!   synthetic power-law family.
//! * [`target`] — regression functions with prescribed source smoothness.
//! * [`krr`] — the ridge solver (`(K + n lambda I) w = y`) with a
//!   tridiagonal fast path for the min kernel.
//! * [`risk`] — exact and Monte Carlo bias/variance/excess evaluation.
//! * [`theory`] — predicted exponents, regimes, phase diagrams and the
//!   checkable asymptotic sums.
//! * [`ratefit`] — log-log rate estimation and trial aggregation.
//! * [`harness`] — seeded parallel sweeps, the experiment table, the
//!   noise-crossover study and CSV output.
//!
//! Most entry points are demonstrated by a runnable example; see the
//! `examples/` directory. The CLI front end lives in `src/bin/krrlab.rs`
//! (`cargo run --release -p krrlab -- table1 --fast`).

pub mod error;
pub mod harness;
pub mod kernel;
pub mod krr;
pub mod linalg;
pub mod quad;
pub mod ratefit;
pub mod risk;
pub mod seeding;
pub mod target;
pub mod theory;

pub use error::{Error, Result};
pub use kernel::{parse_kernel, EigenBasis, Eigensystem, KernelKind, KernelSpec};
pub use krr::{
    conditional_mean_solution, sample_labels, solve, Design, RidgeSolution, RidgeSystem,
};
pub use quad::QuadratureRule;
pub use ratefit::{aggregate_trials, fit_rate, RateEstimate, Reducer};
pub use risk::{
    bias_squared, excess_risk, monte_carlo_risk, variance_exact, RiskBreakdown, RiskMethod,
};
pub use seeding::TrialKey;
pub use target::{estimate_smoothness, named_target, parse_target, synthesize_target, TargetSpec};
pub use theory::{
    approximation_error_law, effective_dimension, optimal_theta, phase_diagram, predict_rates,
    series_value, NoiseModel, PhasePanel, RatePrediction, Regime,
};
