//! Exact (quadrature) and Monte Carlo bias/variance/excess-risk evaluation
//! for a fixed design.
//!
//! Exact quantities condition on the design: the squared bias integrates
//! `(conditional-mean predictor - target)^2`, the variance integrates
//! `sigma^2 ||(K + n lambda I)^-1 k(X, x)||^2`, both by composite Simpson.
//! The Monte Carlo oracle replays independent noise vectors through the same
//! factorization and is the independent check of both.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::kernel::KernelSpec;
use crate::krr::{solve_with_system, Design, RidgeSystem};
use crate::quad::QuadratureRule;
use crate::seeding::{StreamKind, TrialKey};
use crate::target::TargetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskMethod {
    Exact,
    MonteCarlo,
}

impl RiskMethod {
    pub fn label(&self) -> &'static str {
        match self {
            RiskMethod::Exact => "exact",
            RiskMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// Bias^2, variance and excess risk for one (n, lambda) cell.
#[derive(Debug, Clone)]
pub struct RiskBreakdown {
    pub bias2: f64,
    pub variance: f64,
    pub excess: f64,
    pub method: RiskMethod,
    pub n: usize,
    pub lambda: f64,
    pub sigma2: f64,
    /// Monte Carlo standard error of the excess estimate; None for exact.
    pub std_error: Option<f64>,
}

/// Per-draw diagnostics of the Monte Carlo oracle.
#[derive(Debug, Clone)]
pub struct McDetail {
    /// per-draw excess values `||f_k - f*||^2`
    pub excess_draws: Vec<f64>,
    /// per-draw centered values `||f_k - mean_f||^2`
    pub centered_draws: Vec<f64>,
    pub se_excess: f64,
    pub se_variance: f64,
}

/// Shared per-cell state: the target evaluated on the quadrature grid is
/// reused across all trials of a cell.
pub struct CellEvaluator {
    kernel: KernelSpec,
    target: TargetSpec,
    quad: QuadratureRule,
    target_grid: Vec<f64>,
}

impl CellEvaluator {
    pub fn new(kernel: KernelSpec, target: TargetSpec, quad: QuadratureRule) -> Self {
        let target_grid = target.values_on(quad.nodes());
        Self {
            kernel,
            target,
            quad,
            target_grid,
        }
    }

    pub fn quad(&self) -> &QuadratureRule {
        &self.quad
    }

    pub fn target(&self) -> &TargetSpec {
        &self.target
    }

    fn bias2_from_system(&self, system: &Arc<RidgeSystem>, design: &Design) -> Result<(f64, f64)> {
        let labels = design.noiseless_labels(&self.target);
        let sol = solve_with_system(Arc::clone(system), &labels)?;
        let grid = sol.predict_on(self.quad.nodes());
        let sq: Vec<f64> = grid
            .iter()
            .zip(&self.target_grid)
            .map(|(f, t)| {
                let d = f - t;
                d * d
            })
            .collect();
        Ok((self.quad.integrate_values(&sq), sol.rel_residual()))
    }

    /// Exact breakdown; also returns the solver reproduction residual.
    pub fn exact(&self, design: &Design, lambda: f64, sigma2: f64) -> Result<(RiskBreakdown, f64)> {
        self.quad.check_resolves(design.n())?;
        let system = Arc::new(RidgeSystem::new(&self.kernel, design, lambda)?);
        let (bias2, residual) = self.bias2_from_system(&system, design)?;
        let variance = if sigma2 > 0.0 {
            let profile = system.variance_profile(&self.quad);
            sigma2 * self.quad.integrate_values(&profile)
        } else {
            0.0
        };
        Ok((
            RiskBreakdown {
                bias2,
                variance,
                excess: bias2 + variance,
                method: RiskMethod::Exact,
                n: design.n(),
                lambda,
                sigma2,
                std_error: None,
            },
            residual,
        ))
    }

    /// Monte Carlo oracle over independent noise vectors. Deterministic in
    /// `seed`; two passes over replayable streams so that centered draws
    /// need no stored predictor grids.
    pub fn monte_carlo(
        &self,
        design: &Design,
        lambda: f64,
        sigma2: f64,
        draws: usize,
        seed: u64,
    ) -> Result<(RiskBreakdown, McDetail)> {
        self.quad.check_resolves(design.n())?;
        assert!(draws >= 1, "Monte Carlo oracle needs at least one draw");
        let system = Arc::new(RidgeSystem::new(&self.kernel, design, lambda)?);
        let y_star = design.noiseless_labels(&self.target);
        let sd = sigma2.sqrt();
        let noise_key = TrialKey {
            master_seed: seed,
            cell: design.key().cell,
            trial: design.key().trial,
        };
        let nodes = self.quad.nodes().len();

        let draw_labels = |k: usize| -> Vec<f64> {
            if sigma2 == 0.0 {
                return y_star.clone();
            }
            let mut rng = noise_key.rng(StreamKind::McNoise(k as u32));
            y_star
                .iter()
                .map(|v| v + sd * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };

        // pass 1: per-draw excess and the pointwise mean predictor
        let mut mean_grid = vec![0.0; nodes];
        let mut excess_draws = Vec::with_capacity(draws);
        for k in 0..draws {
            let y = draw_labels(k);
            let sol = solve_with_system(Arc::clone(&system), &y)?;
            let grid = sol.predict_on(self.quad.nodes());
            let sq: Vec<f64> = grid
                .iter()
                .zip(&self.target_grid)
                .map(|(f, t)| (f - t) * (f - t))
                .collect();
            excess_draws.push(self.quad.integrate_values(&sq));
            for (m, g) in mean_grid.iter_mut().zip(&grid) {
                *m += g;
            }
        }
        mean_grid.iter_mut().for_each(|m| *m /= draws as f64);

        let bias_sq: Vec<f64> = mean_grid
            .iter()
            .zip(&self.target_grid)
            .map(|(f, t)| (f - t) * (f - t))
            .collect();
        let bias2 = self.quad.integrate_values(&bias_sq);

        // pass 2: replay the same streams for the centered draws
        let mut centered_draws = Vec::with_capacity(draws);
        for k in 0..draws {
            let y = draw_labels(k);
            let sol = solve_with_system(Arc::clone(&system), &y)?;
            let grid = sol.predict_on(self.quad.nodes());
            let sq: Vec<f64> = grid
                .iter()
                .zip(&mean_grid)
                .map(|(f, m)| (f - m) * (f - m))
                .collect();
            centered_draws.push(self.quad.integrate_values(&sq));
        }

        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let sd_of = |v: &[f64]| {
            if v.len() < 2 {
                return 0.0;
            }
            let m = mean(v);
            (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        let excess = mean(&excess_draws);
        let variance = mean(&centered_draws);
        let se_excess = sd_of(&excess_draws) / (draws as f64).sqrt();
        let se_variance = sd_of(&centered_draws) / (draws as f64).sqrt();

        Ok((
            RiskBreakdown {
                bias2,
                variance,
                excess,
                method: RiskMethod::MonteCarlo,
                n: design.n(),
                lambda,
                sigma2,
                std_error: Some(se_excess),
            },
            McDetail {
                excess_draws,
                centered_draws,
                se_excess,
                se_variance,
            },
        ))
    }
}

/// `Bias^2(lambda) = || conditional-mean predictor - f* ||^2` by quadrature.
pub fn bias_squared(
    kernel: &KernelSpec,
    design: &Design,
    target: &TargetSpec,
    lambda: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    quad.check_resolves(design.n())?;
    let evaluator = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone());
    let system = Arc::new(RidgeSystem::new(kernel, design, lambda)?);
    Ok(evaluator.bias2_from_system(&system, design)?.0)
}

/// `Var(lambda) = sigma^2 integral of ||(K + n lambda I)^-1 k(X, x)||^2`.
pub fn variance_exact(
    kernel: &KernelSpec,
    design: &Design,
    lambda: f64,
    sigma2: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    quad.check_resolves(design.n())?;
    if sigma2 == 0.0 {
        return Ok(0.0);
    }
    let system = RidgeSystem::new(kernel, design, lambda)?;
    let profile = system.variance_profile(quad);
    Ok(sigma2 * quad.integrate_values(&profile))
}

/// Exact conditional excess risk and its decomposition.
pub fn excess_risk(
    kernel: &KernelSpec,
    design: &Design,
    target: &TargetSpec,
    lambda: f64,
    sigma2: f64,
    quad: &QuadratureRule,
) -> Result<RiskBreakdown> {
    let evaluator = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone());
    Ok(evaluator.exact(design, lambda, sigma2)?.0)
}

/// Monte Carlo estimate of the same decomposition over `draws` noise vectors.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_risk(
    kernel: &KernelSpec,
    design: &Design,
    target: &TargetSpec,
    lambda: f64,
    sigma2: f64,
    draws: usize,
    quad: &QuadratureRule,
    seed: u64,
) -> Result<RiskBreakdown> {
    let evaluator = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone());
    Ok(evaluator
        .monte_carlo(design, lambda, sigma2, draws, seed)?
        .0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::cell_hash;
    use crate::target::{named_target, synthesize_target_default};

    fn key(trial: u64) -> TrialKey {
        TrialKey {
            master_seed: 1234,
            cell: cell_hash("risk-tests"),
            trial,
        }
    }

    fn quad_for(n: usize) -> QuadratureRule {
        QuadratureRule::for_sample_size(n)
    }

    #[test]
    fn interpolation_bias_shrinks_with_sample_size() {
        let kernel = KernelSpec::min_kernel();
        let target = named_target("sin3pi2").unwrap();
        let d100 = Design::sample(100, 0.0, key(0)).unwrap();
        let d1000 = Design::sample(1000, 0.0, key(1)).unwrap();
        let b100 = bias_squared(&kernel, &d100, &target, 0.0, &quad_for(100)).unwrap();
        let b1000 = bias_squared(&kernel, &d1000, &target, 0.0, &quad_for(1000)).unwrap();
        assert!(b100 > 0.0 && b1000 > 0.0);
        // theory predicts n^-4 decay; a decade must shrink it dramatically
        assert!(
            b1000 < b100 * 1e-2,
            "interpolation bias did not shrink: {b100:e} -> {b1000:e}"
        );
    }

    #[test]
    fn infinite_regularization_recovers_target_norm() {
        let kernel = KernelSpec::min_kernel_with(100);
        let target = named_target("sin3pi2").unwrap();
        let d = Design::sample(50, 0.0, key(2)).unwrap();
        let b = bias_squared(&kernel, &d, &target, 1e8, &quad_for(50)).unwrap();
        assert!((b - 0.5).abs() <= 1e-4, "limit bias {b}");
    }

    #[test]
    fn zero_target_has_zero_bias() {
        let kernel = KernelSpec::min_kernel_with(100);
        let target = named_target("sin2pi").unwrap().scaled(0.0);
        let d = Design::sample(30, 0.0, key(3)).unwrap();
        let b = bias_squared(&kernel, &d, &target, 1e-3, &quad_for(30)).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn quadrature_must_resolve_the_design() {
        let kernel = KernelSpec::min_kernel_with(100);
        let target = named_target("sin2pi").unwrap();
        let d = Design::sample(3000, 0.0, key(4)).unwrap();
        let coarse = QuadratureRule::simpson(8193).unwrap();
        assert!(bias_squared(&kernel, &d, &target, 1e-3, &coarse).is_err());
    }

    #[test]
    fn variance_zero_without_noise() {
        let kernel = KernelSpec::min_kernel_with(100);
        let d = Design::sample(40, 0.0, key(5)).unwrap();
        let v = variance_exact(&kernel, &d, 1e-3, 0.0, &quad_for(40)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn variance_monotone_decreasing_in_lambda() {
        let kernel = KernelSpec::min_kernel_with(100);
        let quad = quad_for(60);
        for trial in 0..20 {
            let d = Design::sample(60, 0.05, key(100 + trial)).unwrap();
            let mut previous = f64::INFINITY;
            for lambda in [1e-6, 1e-4, 1e-2, 1.0] {
                let v = variance_exact(&kernel, &d, lambda, 0.05, &quad).unwrap();
                assert!(
                    v <= previous + 1e-14,
                    "variance increased with lambda at trial {trial}"
                );
                previous = v;
            }
        }
    }

    #[test]
    fn interpolation_variance_sits_at_the_noise_floor() {
        // at lambda = 0 the min-kernel variance integrand is piecewise
        // quadratic with unit column norms: the integral is about 2/3
        let kernel = KernelSpec::min_kernel();
        let d = Design::sample(500, 0.05, key(6)).unwrap();
        let v = variance_exact(&kernel, &d, 0.0, 0.05, &quad_for(500)).unwrap();
        let floor = v / 0.05;
        assert!(
            (0.5..0.9).contains(&floor),
            "lambda=0 variance / sigma^2 = {floor}"
        );
    }

    #[test]
    fn exact_decomposition_is_additive_and_nonnegative() {
        let kernel = KernelSpec::min_kernel_with(500);
        let target = named_target("sin2pi").unwrap();
        let d = Design::sample(80, 0.05, key(7)).unwrap();
        let r = excess_risk(&kernel, &d, &target, 1e-3, 0.05, &quad_for(80)).unwrap();
        assert!(r.bias2 >= 0.0 && r.variance >= 0.0 && r.excess >= 0.0);
        assert!((r.excess - (r.bias2 + r.variance)).abs() <= 1e-12);
        assert_eq!(r.method, RiskMethod::Exact);
        let noiseless = excess_risk(&kernel, &d, &target, 1e-3, 0.0, &quad_for(80)).unwrap();
        assert_eq!(noiseless.excess, noiseless.bias2);
    }

    #[test]
    fn scale_covariance_of_the_decomposition() {
        let kernel = KernelSpec::min_kernel_with(500);
        let target = named_target("cos2pi").unwrap();
        let d = Design::sample(60, 0.05, key(8)).unwrap();
        let quad = quad_for(60);
        let base = excess_risk(&kernel, &d, &target, 1e-3, 0.05, &quad).unwrap();
        let scaled = excess_risk(&kernel, &d, &target.scaled(3.0), 1e-3, 0.05, &quad).unwrap();
        assert!((scaled.bias2 - 9.0 * base.bias2).abs() <= 1e-10 * (1.0 + base.bias2.abs() * 9.0));
        assert_eq!(scaled.variance, base.variance);
    }

    #[test]
    fn monte_carlo_degenerate_single_draw_matches_exact() {
        let kernel = KernelSpec::min_kernel_with(500);
        let target = named_target("sin2pi").unwrap();
        let d = Design::sample(50, 0.0, key(9)).unwrap();
        let quad = quad_for(50);
        let exact = excess_risk(&kernel, &d, &target, 1e-3, 0.0, &quad).unwrap();
        let mc = monte_carlo_risk(&kernel, &d, &target, 1e-3, 0.0, 1, &quad, 55).unwrap();
        assert!((mc.excess - exact.excess).abs() < 1e-14);
        assert_eq!(mc.variance, 0.0);
    }

    #[test]
    fn monte_carlo_is_bit_reproducible() {
        let kernel = KernelSpec::min_kernel_with(200);
        let target = named_target("cos2pi").unwrap();
        let d = Design::sample(30, 0.05, key(10)).unwrap();
        let quad = quad_for(30);
        let a = monte_carlo_risk(&kernel, &d, &target, 1e-2, 0.05, 64, &quad, 77).unwrap();
        let b = monte_carlo_risk(&kernel, &d, &target, 1e-2, 0.05, 64, &quad, 77).unwrap();
        assert_eq!(a.excess.to_bits(), b.excess.to_bits());
        assert_eq!(a.bias2.to_bits(), b.bias2.to_bits());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
        let c = monte_carlo_risk(&kernel, &d, &target, 1e-2, 0.05, 64, &quad, 78).unwrap();
        assert_ne!(a.excess.to_bits(), c.excess.to_bits());
    }

    #[test]
    fn exact_matches_monte_carlo_oracle() {
        let kernel = KernelSpec::min_kernel_with(1000);
        let target = named_target("sin2pi").unwrap();
        let d = Design::sample(60, 0.05, key(11)).unwrap();
        let quad = quad_for(60);
        let evaluator = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone());
        let (exact, _) = evaluator.exact(&d, 1e-3, 0.05).unwrap();
        let (mc, detail) = evaluator.monte_carlo(&d, 1e-3, 0.05, 2000, 91).unwrap();
        assert!(
            (mc.excess - exact.excess).abs() <= 3.0 * detail.se_excess,
            "excess: exact {} mc {} se {}",
            exact.excess,
            mc.excess,
            detail.se_excess
        );
        assert!(
            (mc.variance - exact.variance).abs() <= 3.0 * detail.se_variance,
            "variance: exact {} mc {} se {}",
            exact.variance,
            mc.variance,
            detail.se_variance
        );
    }

    #[test]
    fn quadrature_refinement_stable_on_canonical_cell() {
        let kernel = KernelSpec::min_kernel_with(2000);
        let target = named_target("sin2pi").unwrap();
        let d = Design::sample(100, 0.05, key(12)).unwrap();
        let lambda = 0.005 * (100f64).powf(-0.5);
        let quad = quad_for(100);
        let coarse = excess_risk(&kernel, &d, &target, lambda, 0.05, &quad).unwrap();
        let fine = excess_risk(&kernel, &d, &target, lambda, 0.05, &quad.refined()).unwrap();
        assert!((coarse.bias2 - fine.bias2).abs() < 1e-8);
        assert!((coarse.variance - fine.variance).abs() < 1e-8);
        assert!((coarse.excess - fine.excess).abs() < 1e-8);
    }

    #[test]
    fn dense_route_agrees_with_oracle_too() {
        let kernel = KernelSpec::power_law(2.0, 400).unwrap();
        let target = synthesize_target_default(kernel.eigensystem(), 1.5).unwrap();
        let d = Design::sample(40, 0.1, key(13)).unwrap();
        let quad = quad_for(40);
        let evaluator = CellEvaluator::new(kernel.clone(), target.clone(), quad.clone());
        let (exact, _) = evaluator.exact(&d, 1e-3, 0.1).unwrap();
        let (mc, detail) = evaluator.monte_carlo(&d, 1e-3, 0.1, 1500, 17).unwrap();
        assert!((mc.excess - exact.excess).abs() <= 3.0 * detail.se_excess);
        assert!((mc.variance - exact.variance).abs() <= 3.0 * detail.se_variance);
    }
}
