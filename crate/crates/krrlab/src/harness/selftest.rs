//! The oracle-equivalence suite: exact quadrature quantities against the
//! Monte Carlo oracle on randomized cells, the asymptotic-sum scaling
//! checks, and the numerical hygiene checks (grid convergence, solver
//! residuals, byte-identical reruns).

use rand::Rng;

use crate::error::Result;
use crate::kernel::KernelSpec;
use crate::krr::{Design, RESIDUAL_TOLERANCE};
use crate::quad::QuadratureRule;
use crate::ratefit::Reducer;
use crate::risk::CellEvaluator;
use crate::seeding::{cell_hash, StreamKind, TrialKey};
use crate::target::{named_target_on, synthesize_target_default, NamedTarget, TargetSpec};
use crate::theory::{effective_dimension, series_value};

use super::{run_sweep, ExperimentConfig, NGridSpec};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

struct OracleCell {
    kernel: KernelSpec,
    target: TargetSpec,
    n: usize,
    lambda: f64,
    sigma2: f64,
}

fn random_cells(master_seed: u64, count: usize) -> Vec<OracleCell> {
    let key = TrialKey {
        master_seed,
        cell: cell_hash("selftest-oracle-cells"),
        trial: 0,
    };
    let mut rng = key.rng(StreamKind::Design);
    let min_kernel = KernelSpec::min_kernel_with(2000);
    let named = [
        NamedTarget::Cos2Pi,
        NamedTarget::Sin2Pi,
        NamedTarget::Sin3Pi2,
    ];
    let sigma_choices = [0.01, 0.05, 0.2, 1.0];
    let mut cells = Vec::new();
    for k in 0..count {
        let n = 20 + (rng.gen::<f64>() * 180.0) as usize;
        let lambda = 10f64.powf(-6.0 + 5.0 * rng.gen::<f64>());
        let sigma2 = sigma_choices[rng.gen_range(0..sigma_choices.len())];
        let target = if k % 4 == 3 {
            synthesize_target_default(min_kernel.eigensystem(), 1.0)
                .expect("synthesized target on the min-kernel eigensystem")
        } else {
            named_target_on(named[k % 3], min_kernel.eigensystem())
        };
        cells.push(OracleCell {
            kernel: min_kernel.clone(),
            target,
            n,
            lambda,
            sigma2,
        });
    }
    // a few cells through the dense route as well
    let spectral = KernelSpec::power_law(2.0, 400).expect("valid synthetic kernel");
    for &sigma2 in sigma_choices.iter().take(4) {
        let n = 20 + (rng.gen::<f64>() * 60.0) as usize;
        let lambda = 10f64.powf(-4.0 + 3.0 * rng.gen::<f64>());
        let target = synthesize_target_default(spectral.eigensystem(), 1.5)
            .expect("synthesized target on the sine eigensystem");
        cells.push(OracleCell {
            kernel: spectral.clone(),
            target,
            n,
            lambda,
            sigma2,
        });
    }
    cells
}

/// Exact-vs-Monte-Carlo agreement on randomized cells (criterion of the
/// oracle suite): each exact quantity within 3 MC standard errors, the
/// decomposition identity to 1e-12, residuals within contract.
pub fn oracle_equivalence_checks(master_seed: u64, draws: usize) -> Result<Vec<CheckReport>> {
    let cells = random_cells(master_seed, 20);
    let mut worst_excess = 0.0f64;
    let mut worst_variance = 0.0f64;
    let mut worst_bias = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut worst_residual = 0.0f64;
    let total = cells.len();
    for (idx, cell) in cells.into_iter().enumerate() {
        let key = TrialKey {
            master_seed,
            cell: cell_hash(&format!("selftest-oracle|{idx}")),
            trial: 0,
        };
        let design = Design::sample(cell.n, cell.sigma2, key)?;
        let quad = QuadratureRule::for_sample_size(cell.n);
        let evaluator = CellEvaluator::new(cell.kernel.clone(), cell.target.clone(), quad);
        let (exact, residual) = evaluator.exact(&design, cell.lambda, cell.sigma2)?;
        let (mc, detail) = evaluator.monte_carlo(
            &design,
            cell.lambda,
            cell.sigma2,
            draws,
            master_seed ^ 0x5eed,
        )?;

        worst_residual = worst_residual.max(residual);
        worst_identity = worst_identity.max((exact.excess - (exact.bias2 + exact.variance)).abs());
        if detail.se_excess > 0.0 {
            worst_excess = worst_excess.max((mc.excess - exact.excess).abs() / detail.se_excess);
        }
        if detail.se_variance > 0.0 {
            worst_variance =
                worst_variance.max((mc.variance - exact.variance).abs() / detail.se_variance);
        }
        // the mean-predictor bias estimate is offset upward by Var/draws and
        // fluctuates with std <= sqrt(4 b v / K + 2 v^2 / K^2)
        let k = draws as f64;
        let se_bias = (4.0 * exact.bias2 * exact.variance / k
            + 2.0 * exact.variance.powi(2) / (k * k))
            .sqrt();
        let allowance = 3.0 * se_bias + exact.variance / k + 1e-13;
        worst_bias = worst_bias.max((mc.bias2 - exact.bias2).abs() / allowance);
    }
    Ok(vec![
        CheckReport::new(
            "oracle: excess within 3 SE",
            worst_excess <= 3.0,
            format!("{total} cells, worst deviation {worst_excess:.2} SE"),
        ),
        CheckReport::new(
            "oracle: variance within 3 SE",
            worst_variance <= 3.0,
            format!("{total} cells, worst deviation {worst_variance:.2} SE"),
        ),
        CheckReport::new(
            "oracle: bias within allowance",
            worst_bias <= 1.0,
            format!("{total} cells, worst deviation {worst_bias:.2} of allowance"),
        ),
        CheckReport::new(
            "decomposition identity <= 1e-12",
            worst_identity <= 1e-12,
            format!("worst |excess - (bias2 + variance)| = {worst_identity:.2e}"),
        ),
        CheckReport::new(
            "solver residual <= 1e-10",
            worst_residual <= RESIDUAL_TOLERANCE,
            format!("worst relative residual {worst_residual:.2e}"),
        ),
    ])
}

/// Scaling checks of the asymptotic sums: the effective dimension follows
/// `lambda^(-1/beta)` within a factor-2 band and the spectral series obeys
/// its three-case law within +-20% after normalization.
pub fn asymptotic_sum_checks() -> Vec<CheckReport> {
    let eig: Vec<f64> = crate::kernel::Eigensystem::min_kernel(5000)
        .eigenvalues()
        .to_vec();
    let mut reports = Vec::new();

    let mut normalized = Vec::new();
    for exp in 2..=6 {
        let lambda = 10f64.powi(-exp);
        let v = effective_dimension(&eig, 1.0, lambda)
            .expect("valid parameters")
            .total();
        normalized.push(v * lambda.sqrt());
    }
    let max = normalized.iter().cloned().fold(f64::MIN, f64::max);
    let min = normalized.iter().cloned().fold(f64::MAX, f64::min);
    reports.push(CheckReport::new(
        "effective dimension: N_1(lambda) sqrt(lambda) in a factor-2 band",
        max / min <= 2.0,
        format!("band ratio {:.3} over lambda in [1e-6, 1e-2]", max / min),
    ));

    for (p, label) in [(0.5, "lambda^-1"), (1.0, "ln(1/lambda)"), (1.5, "constant")] {
        let mut vals = Vec::new();
        for exp in 3..=6 {
            let lambda = 10f64.powi(-exp);
            let v = series_value(&eig, p, lambda)
                .expect("valid parameters")
                .total();
            let normalized = if p < 1.0 {
                v * lambda.powf(2.0 * (1.0 - p))
            } else if p == 1.0 {
                v / (1.0 / lambda).ln()
            } else {
                v
            };
            vals.push(normalized);
        }
        let max = vals.iter().cloned().fold(f64::MIN, f64::max);
        let min = vals.iter().cloned().fold(f64::MAX, f64::min);
        reports.push(CheckReport::new(
            &format!("series trichotomy p={p}: normalized by {label}"),
            max / min <= 1.5,
            format!("band ratio {:.3} across three decades", max / min),
        ));
    }
    reports
}

/// Numerical hygiene: quadrature grid convergence on a canonical cell,
/// solver residuals across a sweep, and byte-identical reruns.
pub fn hygiene_checks(master_seed: u64) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();

    // canonical cell: sin2pi, n = 100, theta = 0.5 scaling, sigma2 = 0.05
    let kernel = KernelSpec::min_kernel_with(2000);
    let target = named_target_on(NamedTarget::Sin2Pi, kernel.eigensystem());
    let key = TrialKey {
        master_seed,
        cell: cell_hash("selftest-canonical-cell"),
        trial: 0,
    };
    let design = Design::sample(100, 0.05, key)?;
    let lambda = 0.005 * 100f64.powf(-0.5);
    let quad = QuadratureRule::for_sample_size(100);
    let coarse = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone())
        .exact(&design, lambda, 0.05)?
        .0;
    let fine = CellEvaluator::new(kernel.clone(), target.clone(), quad.refined())
        .exact(&design, lambda, 0.05)?
        .0;
    let drift = (coarse.bias2 - fine.bias2)
        .abs()
        .max((coarse.variance - fine.variance).abs())
        .max((coarse.excess - fine.excess).abs());
    reports.push(CheckReport::new(
        "quadrature refinement drift < 1e-8",
        drift < 1e-8,
        format!("max |change| under N -> 2N = {drift:.2e}"),
    ));

    // a small sweep, run twice: identical bytes, residuals in contract
    let config = ExperimentConfig {
        name: "selftest".to_string(),
        kernel: "min".to_string(),
        target: "sin2pi".to_string(),
        theta_list: vec![0.5, 2.0],
        include_interpolation: true,
        c: 0.005,
        sigma2_list: vec![0.0, 0.05],
        n_grid: NGridSpec::Explicit {
            values: vec![50, 100, 150, 200],
        },
        trials: 3,
        quadrature: Default::default(),
        mc_draws: 200,
        master_seed,
        reducer: Reducer::Mean,
        out: None,
    };
    let first = run_sweep(&config, None)?;
    let second = run_sweep(&config, None)?;
    let csv_a = first.rows_csv();
    let csv_b = second.rows_csv();
    reports.push(CheckReport::new(
        "equal seeds give byte-identical CSV",
        csv_a == csv_b,
        format!("{} bytes compared", csv_a.len()),
    ));
    reports.push(CheckReport::new(
        "sweep solver residuals <= 1e-10",
        first.max_residual <= RESIDUAL_TOLERANCE && first.failures == 0,
        format!(
            "max residual {:.2e}, {} failures",
            first.max_residual, first.failures
        ),
    ));
    Ok(reports)
}

/// Run the whole suite. Returns the reports; overall pass is their
/// conjunction.
pub fn run_selftest(master_seed: u64, mc_draws: usize) -> Result<Vec<CheckReport>> {
    let mut reports = oracle_equivalence_checks(master_seed, mc_draws)?;
    reports.extend(asymptotic_sum_checks());
    reports.extend(hygiene_checks(master_seed)?);
    Ok(reports)
}
