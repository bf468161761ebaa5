//! Closed-form rate predictions, regime classification and the numerically
//! checkable asymptotic sums.
//!
//! Conventions: `lambda = c n^-theta` (with the `n lambda` matrix shift),
//! eigenvalue decay `i^-beta`, source smoothness `s`, noise `sigma^2 = n^-tau`
//! (`tau = 0` is constant noise). Exponents are reported as positive decay
//! rates: excess risk `~ n^-rate`.
//!
//! For `theta < beta` the noisy excess risk decays as
//! `n^-min(s,2)theta + sigma^2 n^-(1 - theta/beta)`; for `theta >= beta` the
//! risk is floored at the noise level. Without noise the risk is the bias
//! alone, saturating at `min(s,2) beta` once `theta >= beta`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Bias term dominates.
    Underfitting,
    /// Variance term dominates.
    Overfitting,
    /// `theta >= beta` with noise: risk floored at the noise order.
    Interpolating,
    /// No observation noise.
    Noiseless,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Underfitting => "underfitting",
            Regime::Overfitting => "overfitting",
            Regime::Interpolating => "interpolating",
            Regime::Noiseless => "noiseless",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Floor {
    None,
    /// Excess risk bounded below by the noise level sigma^2.
    ConstantSigma2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// sigma^2 = n^-tau; tau = 0 is constant noise.
    Noisy {
        tau: f64,
    },
    Noiseless,
}

/// Predicted decay exponents for one (s, beta, theta, noise) setting.
#[derive(Debug, Clone)]
pub struct RatePrediction {
    pub bias_exponent: Option<f64>,
    pub variance_exponent: Option<f64>,
    pub risk_exponent: Option<f64>,
    pub regime: Regime,
    pub floor: Floor,
    /// s = 2 carries a logarithmic factor the power-law fit cannot see.
    pub log_factor: bool,
    /// The stated exponent is an upper bound only (theta >= beta cases).
    pub upper_bound_only: bool,
    /// theta >= beta, noiseless, s <= 1: no bound is available.
    pub not_covered: bool,
    /// Information-theoretic lower exponent s*beta where stated.
    pub info_lower_exponent: Option<f64>,
}

fn validate(s: f64, beta: f64, theta: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("smoothness must be > 0, got {s}"),
        });
    }
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("eigenvalue decay must satisfy beta > 1, got {beta}"),
        });
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("regularization scaling must be > 0, got {theta}"),
        });
    }
    Ok(())
}

/// Theoretical exponents for `lambda = c n^-theta`.
pub fn predict_rates(s: f64, beta: f64, theta: f64, noise: NoiseModel) -> Result<RatePrediction> {
    validate(s, beta, theta)?;
    if let NoiseModel::Noisy { tau } = noise {
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("noise scaling must be finite and >= 0, got {tau}"),
            });
        }
    }
    let s_eff = s.min(2.0);
    let log_factor = s == 2.0;

    let prediction = match noise {
        NoiseModel::Noisy { tau } => {
            if theta < beta {
                let bias = s_eff * theta;
                let variance = tau + 1.0 - theta / beta;
                let risk = bias.min(variance);
                let regime = if bias < variance {
                    Regime::Underfitting
                } else {
                    Regime::Overfitting
                };
                RatePrediction {
                    bias_exponent: Some(bias),
                    variance_exponent: Some(variance),
                    risk_exponent: Some(risk),
                    regime,
                    floor: Floor::None,
                    log_factor,
                    upper_bound_only: false,
                    not_covered: false,
                    info_lower_exponent: None,
                }
            } else {
                // risk floored at the noise order sigma^2 = n^-tau; the bias
                // column saturates at min(s,2) beta (an upper bound, proven
                // for s > 1)
                RatePrediction {
                    bias_exponent: Some(s_eff * beta),
                    variance_exponent: Some(tau),
                    risk_exponent: Some(tau),
                    regime: Regime::Interpolating,
                    floor: Floor::ConstantSigma2,
                    log_factor,
                    upper_bound_only: true,
                    not_covered: false,
                    info_lower_exponent: None,
                }
            }
        }
        NoiseModel::Noiseless => {
            if theta < beta {
                let bias = s_eff * theta;
                RatePrediction {
                    bias_exponent: Some(bias),
                    variance_exponent: None,
                    risk_exponent: Some(bias),
                    regime: Regime::Noiseless,
                    floor: Floor::None,
                    log_factor,
                    upper_bound_only: false,
                    not_covered: false,
                    info_lower_exponent: None,
                }
            } else if s > 1.0 {
                let bias = s_eff * beta;
                RatePrediction {
                    bias_exponent: Some(bias),
                    variance_exponent: None,
                    risk_exponent: Some(bias),
                    regime: Regime::Noiseless,
                    floor: Floor::None,
                    log_factor,
                    upper_bound_only: true,
                    not_covered: false,
                    info_lower_exponent: Some(s * beta),
                }
            } else {
                // hypothesized open in the mis-specified case; do not extrapolate
                RatePrediction {
                    bias_exponent: None,
                    variance_exponent: None,
                    risk_exponent: None,
                    regime: Regime::Noiseless,
                    floor: Floor::None,
                    log_factor,
                    upper_bound_only: false,
                    not_covered: true,
                    info_lower_exponent: None,
                }
            }
        }
    };
    Ok(prediction)
}

/// Prediction for exact interpolation (lambda = 0): the theta >= beta limit.
pub fn predict_interpolation(s: f64, beta: f64, noise: NoiseModel) -> Result<RatePrediction> {
    predict_rates(s, beta, beta, noise)
}

/// Balancing the two noisy terms: `theta_op = beta / (min(s,2) beta + 1)`
/// with optimal rate `min(s,2) beta / (min(s,2) beta + 1)`.
pub fn optimal_theta(s: f64, beta: f64) -> Result<(f64, f64)> {
    validate(s, beta, 1.0)?;
    let s_eff = s.min(2.0);
    let denom = s_eff * beta + 1.0;
    Ok((beta / denom, s_eff * beta / denom))
}

/// The three-case law for the regularization approximation error
/// `||f_lambda - f*||^2` measured in the gamma-interpolation norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproxCase {
    /// `lambda^(s-gamma)` when s - gamma < 2
    Power(f64),
    /// `lambda^2 ln(1/lambda)` when s - gamma = 2
    SquareLog,
    /// `lambda^2` when s - gamma > 2
    Square,
}

impl ApproxCase {
    pub fn label(&self) -> String {
        match self {
            ApproxCase::Power(e) => format!("lambda^{e}"),
            ApproxCase::SquareLog => "lambda^2 ln(1/lambda)".to_string(),
            ApproxCase::Square => "lambda^2".to_string(),
        }
    }
}

/// Case label and predicted order for each lambda in the grid.
pub fn approximation_error_law(
    s: f64,
    gamma: f64,
    lambdas: &[f64],
) -> Result<(ApproxCase, Vec<(f64, f64)>)> {
    if gamma < 0.0 || gamma >= s {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("need 0 <= gamma < s, got gamma={gamma}, s={s}"),
        });
    }
    for &l in lambdas {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("law stated for lambda in (0, 1), got {l}"),
            });
        }
    }
    let diff = s - gamma;
    let case = if diff < 2.0 {
        ApproxCase::Power(diff)
    } else if diff == 2.0 {
        ApproxCase::SquareLog
    } else {
        ApproxCase::Square
    };
    let values = lambdas
        .iter()
        .map(|&l| {
            let v = match case {
                ApproxCase::Power(e) => l.powf(e),
                ApproxCase::SquareLog => l * l * (1.0 / l).ln(),
                ApproxCase::Square => l * l,
            };
            (l, v)
        })
        .collect();
    Ok((case, values))
}

/// A truncated spectral sum plus an integral-comparison tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub truncated: f64,
    pub tail_estimate: f64,
}

impl SeriesValue {
    pub fn total(&self) -> f64 {
        self.truncated + self.tail_estimate
    }
}

/// Fit `eigenvalue_i ~ c i^-beta` from the tail half of the sequence.
fn fit_tail_decay(eigenvalues: &[f64]) -> (f64, f64) {
    let m = eigenvalues.len();
    let i1 = (m / 2).max(1);
    let l1 = eigenvalues[i1 - 1];
    let l2 = eigenvalues[m - 1];
    if i1 == m || l1 <= 0.0 || l2 <= 0.0 || l1 == l2 {
        return (eigenvalues[m - 1].max(f64::MIN_POSITIVE), 1.5);
    }
    let beta = (l1 / l2).ln() / (m as f64 / i1 as f64).ln();
    let c = l2 * (m as f64).powf(beta);
    (c, beta)
}

/// Integrate `g(x)/1` over x in (M, inf) in log space with Simpson.
fn log_space_tail<F: Fn(f64) -> f64>(m: f64, g: F) -> f64 {
    // substitute x = m e^u: integral of g(x) dx = integral of g(m e^u) m e^u du
    let u_max = 50.0;
    let nodes = 2001usize;
    let h = u_max / (nodes - 1) as f64;
    let mut acc = 0.0;
    for q in 0..nodes {
        let u = q as f64 * h;
        let w = if q == 0 || q == nodes - 1 {
            1.0
        } else if q % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let x = m * u.exp();
        acc += w * g(x) * x;
    }
    acc * h / 3.0
}

/// `sum_i (eigenvalue_i^p / (eigenvalue_i + lambda))^2 / i`, truncated with
/// an integral tail estimate from the fitted eigenvalue decay.
pub fn series_value(eigenvalues: &[f64], p: f64, lambda: f64) -> Result<SeriesValue> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("need p > 0, got {p}"),
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("need lambda > 0, got {lambda}"),
        });
    }
    let mut acc = 0.0;
    for (idx, &l) in eigenvalues.iter().enumerate() {
        let ratio = l.powf(p) / (l + lambda);
        acc += ratio * ratio / (idx + 1) as f64;
    }
    let (c, beta) = fit_tail_decay(eigenvalues);
    let m = eigenvalues.len() as f64;
    let tail = log_space_tail(m, |x| {
        let l = c * x.powf(-beta);
        let ratio = l.powf(p) / (l + lambda);
        ratio * ratio / x
    });
    Ok(SeriesValue {
        truncated: acc,
        tail_estimate: tail,
    })
}

/// Effective dimension `N_p(lambda) = sum_i (eigenvalue_i/(eigenvalue_i+lambda))^p`,
/// truncated with an integral tail estimate.
pub fn effective_dimension(eigenvalues: &[f64], p: f64, lambda: f64) -> Result<SeriesValue> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("effective dimension is stated for p >= 1, got {p}"),
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("need lambda > 0, got {lambda}"),
        });
    }
    let mut acc = 0.0;
    for &l in eigenvalues {
        acc += (l / (l + lambda)).powf(p);
    }
    let (c, beta) = fit_tail_decay(eigenvalues);
    let m = eigenvalues.len() as f64;
    let tail = log_space_tail(m, |x| {
        let l = c * x.powf(-beta);
        (l / (l + lambda)).powf(p)
    });
    Ok(SeriesValue {
        truncated: acc,
        tail_estimate: tail,
    })
}

/// One panel of the asymptotic-rate phase diagram.
#[derive(Debug, Clone, Copy)]
pub enum PhasePanel {
    /// (theta, s) at constant noise (tau = 0).
    Smoothness { s_min: f64, s_max: f64 },
    /// (theta, tau) at fixed smoothness, sigma^2 = n^-tau.
    Noise { tau_min: f64, tau_max: f64, s: f64 },
}

#[derive(Debug, Clone)]
pub struct PhaseCell {
    pub theta: f64,
    pub s_or_tau: f64,
    pub regime: Option<Regime>,
    pub risk_exponent: Option<f64>,
    pub flags: Vec<&'static str>,
}

/// Raster of predicted regimes and exponents over a (theta, s) or
/// (theta, tau) grid.
pub fn phase_diagram(
    panel: PhasePanel,
    theta_range: (f64, f64),
    beta: f64,
    resolution: usize,
) -> Result<Vec<PhaseCell>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: format!("need at least a 2x2 raster, got {resolution}"),
        });
    }
    let (theta_lo, theta_hi) = theta_range;
    if !(theta_lo > 0.0 && theta_hi > theta_lo) {
        return Err(Error::InvalidParameter {
            name: "theta_range",
            reason: format!("need 0 < lo < hi, got ({theta_lo}, {theta_hi})"),
        });
    }
    let lerp = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (resolution - 1) as f64;
    let mut cells = Vec::with_capacity(resolution * resolution);
    match panel {
        PhasePanel::Smoothness { s_min, s_max } => {
            if !(s_min > 0.0 && s_max > s_min) {
                return Err(Error::InvalidParameter {
                    name: "s_range",
                    reason: format!("need 0 < lo < hi, got ({s_min}, {s_max})"),
                });
            }
            for row in 0..resolution {
                let s = lerp(s_min, s_max, row);
                for col in 0..resolution {
                    let theta = lerp(theta_lo, theta_hi, col);
                    let p = predict_rates(s, beta, theta, NoiseModel::Noisy { tau: 0.0 })?;
                    let mut flags = Vec::new();
                    if p.log_factor {
                        flags.push("log");
                    }
                    if p.floor == Floor::ConstantSigma2 {
                        flags.push("floor");
                    }
                    cells.push(PhaseCell {
                        theta,
                        s_or_tau: s,
                        regime: Some(p.regime),
                        risk_exponent: p.risk_exponent,
                        flags,
                    });
                }
            }
        }
        PhasePanel::Noise {
            tau_min,
            tau_max,
            s,
        } => {
            if !(tau_min >= 0.0 && tau_max > tau_min) {
                return Err(Error::InvalidParameter {
                    name: "tau_range",
                    reason: format!("need 0 <= lo < hi, got ({tau_min}, {tau_max})"),
                });
            }
            let s_eff = s.min(2.0);
            for row in 0..resolution {
                let tau = lerp(tau_min, tau_max, row);
                let mut previous_bias_dominant: Option<bool> = None;
                for col in 0..resolution {
                    let theta = lerp(theta_lo, theta_hi, col);
                    let p = predict_rates(s, beta, theta, NoiseModel::Noisy { tau })?;
                    let mut flags = Vec::new();
                    if p.log_factor {
                        flags.push("log");
                    }
                    let (regime, risk) = if theta < beta {
                        // flag the argument switch of min(s~ theta, tau + 1 - theta/beta)
                        let bias_dominant = p.regime == Regime::Underfitting;
                        if let Some(prev) = previous_bias_dominant {
                            if prev != bias_dominant {
                                flags.push("crossover");
                            }
                        }
                        previous_bias_dominant = Some(bias_dominant);
                        (Some(p.regime), p.risk_exponent)
                    } else if tau <= s_eff * beta {
                        previous_bias_dominant = None;
                        if tau == 0.0 {
                            flags.push("floor");
                        }
                        (Some(Regime::Interpolating), Some(tau))
                    } else {
                        // noiseless-dominant blank corner: no upper bound known
                        previous_bias_dominant = None;
                        flags.push("unknown_upper_bound");
                        (None, None)
                    };
                    cells.push(PhaseCell {
                        theta,
                        s_or_tau: tau,
                        regime,
                        risk_exponent: risk,
                        flags,
                    });
                }
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU0: NoiseModel = NoiseModel::Noisy { tau: 0.0 };

    #[test]
    fn balanced_cell_from_the_experiment_table() {
        let p = predict_rates(0.5, 2.0, 1.0, TAU0).unwrap();
        assert_eq!(p.bias_exponent, Some(0.5));
        assert_eq!(p.variance_exponent, Some(0.5));
        assert_eq!(p.risk_exponent, Some(0.5));
    }

    #[test]
    fn interpolating_regime_has_constant_floor() {
        let p = predict_rates(1.5, 2.0, 2.0, TAU0).unwrap();
        assert_eq!(p.regime, Regime::Interpolating);
        assert_eq!(p.risk_exponent, Some(0.0));
        assert_eq!(p.floor, Floor::ConstantSigma2);
        assert_eq!(p.bias_exponent, Some(3.0));
        assert_eq!(p.variance_exponent, Some(0.0));
    }

    #[test]
    fn noiseless_saturation_at_twice_beta() {
        let p = predict_rates(f64::INFINITY, 2.0, 3.0, NoiseModel::Noiseless).unwrap();
        assert_eq!(p.risk_exponent, Some(4.0));
        assert!(p.upper_bound_only);
        assert_eq!(p.info_lower_exponent, Some(f64::INFINITY));
        let finite = predict_rates(1.5, 2.0, 2.5, NoiseModel::Noiseless).unwrap();
        assert_eq!(finite.info_lower_exponent, Some(3.0));
    }

    #[test]
    fn mis_specified_noiseless_interpolation_not_covered() {
        let p = predict_rates(0.5, 2.0, 2.5, NoiseModel::Noiseless).unwrap();
        assert!(p.not_covered);
        assert_eq!(p.risk_exponent, None);
    }

    #[test]
    fn parameter_validation() {
        assert!(predict_rates(0.0, 2.0, 1.0, TAU0).is_err());
        assert!(predict_rates(1.0, 1.0, 1.0, TAU0).is_err());
        assert!(predict_rates(1.0, 2.0, 0.0, TAU0).is_err());
        assert!(predict_rates(1.0, 2.0, 1.0, NoiseModel::Noisy { tau: -0.5 }).is_err());
    }

    #[test]
    fn optimal_theta_matches_the_balancing_formula() {
        let cases = [
            (1.5, 2.0, 0.5, 0.75),
            (f64::INFINITY, 2.0, 0.4, 0.8),
            (0.5, 2.0, 1.0, 0.5),
        ];
        for (s, beta, want_theta, want_rate) in cases {
            let (theta, rate) = optimal_theta(s, beta).unwrap();
            assert!((theta - want_theta).abs() < 1e-15);
            assert!((rate - want_rate).abs() < 1e-15);
            // at theta_op both terms balance
            let p = predict_rates(s, beta, theta, TAU0).unwrap();
            assert!((p.bias_exponent.unwrap() - p.variance_exponent.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_factor_flag_only_at_s_two() {
        assert!(predict_rates(2.0, 2.0, 0.5, TAU0).unwrap().log_factor);
        assert!(!predict_rates(1.9, 2.0, 0.5, TAU0).unwrap().log_factor);
    }

    #[test]
    fn approximation_law_three_cases() {
        let grid = [0.5, 0.1, 0.01];
        let (case, vals) = approximation_error_law(1.5, 0.0, &grid).unwrap();
        assert_eq!(case, ApproxCase::Power(1.5));
        assert!((vals[2].1 - 0.01f64.powf(1.5)).abs() < 1e-18);
        let (case, _) = approximation_error_law(2.0, 0.0, &grid).unwrap();
        assert_eq!(case, ApproxCase::SquareLog);
        let (case, _) = approximation_error_law(3.7, 0.5, &grid).unwrap();
        assert_eq!(case, ApproxCase::Square);
        assert!(approximation_error_law(1.0, 1.0, &grid).is_err());
        assert!(approximation_error_law(1.0, 0.5, &[1.5]).is_err());
    }

    fn power_law_eigenvalues(beta: f64, m: usize) -> Vec<f64> {
        (1..=m).map(|i| (i as f64).powf(-beta)).collect()
    }

    #[test]
    fn series_constant_case() {
        let eig = power_law_eigenvalues(2.0, 200_000);
        let a = series_value(&eig, 2.0, 1e-4).unwrap().total();
        let b = series_value(&eig, 2.0, 1e-6).unwrap().total();
        assert!(
            (a - b).abs() / b.abs() < 0.05,
            "p=2 should be Theta(1): {a} vs {b}"
        );
    }

    #[test]
    fn series_log_case() {
        let eig = power_law_eigenvalues(2.0, 200_000);
        let mut ratios = Vec::new();
        for lambda in [1e-3, 1e-4, 1e-5] {
            let v = series_value(&eig, 1.0, lambda).unwrap().total();
            ratios.push(v / (1.0f64 / lambda).ln());
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.5, "log-normalized ratios {ratios:?}");
    }

    #[test]
    fn series_power_case() {
        // p = 0.5: value ~ lambda^(2(p-1)) = lambda^-1
        let eig = power_law_eigenvalues(2.0, 200_000);
        let mut normalized = Vec::new();
        for lambda in [1e-3, 1e-4, 1e-5] {
            let v = series_value(&eig, 0.5, lambda).unwrap().total();
            normalized.push(v * lambda);
        }
        let max = normalized.iter().cloned().fold(f64::MIN, f64::max);
        let min = normalized.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.5, "lambda-normalized values {normalized:?}");
    }

    #[test]
    fn truncation_tail_shrinks_with_doubling() {
        let eig_half = power_law_eigenvalues(2.0, 500_000);
        let eig_full = power_law_eigenvalues(2.0, 1_000_000);
        for p in [0.5, 1.0, 1.5] {
            let a = series_value(&eig_half, p, 1e-4).unwrap();
            let b = series_value(&eig_full, p, 1e-4).unwrap();
            assert!(b.tail_estimate < a.tail_estimate);
            let rel = (a.total() - b.total()).abs() / b.total();
            assert!(rel < 0.01, "p={p}: doubling moved the total by {rel}");
        }
    }

    #[test]
    fn effective_dimension_scaling_for_the_min_kernel() {
        let eig: Vec<f64> = crate::kernel::Eigensystem::min_kernel(5000)
            .eigenvalues()
            .to_vec();
        let mut normalized = Vec::new();
        for exp in 2..=6 {
            let lambda = 10f64.powi(-exp);
            let v = effective_dimension(&eig, 1.0, lambda).unwrap().total();
            normalized.push(v * lambda.sqrt());
        }
        let max = normalized.iter().cloned().fold(f64::MIN, f64::max);
        let min = normalized.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 2.0,
            "N_1(lambda) sqrt(lambda) should be a fixed band: {normalized:?}"
        );
    }

    #[test]
    fn effective_dimension_basics() {
        let eig = power_law_eigenvalues(2.0, 10_000);
        let huge = effective_dimension(&eig, 1.0, 1e9).unwrap().total();
        assert!(huge < 1e-6, "N_1 must vanish as lambda grows, got {huge}");
        for lambda in [1e-2, 1e-4] {
            let n1 = effective_dimension(&eig, 1.0, lambda).unwrap().total();
            let n2 = effective_dimension(&eig, 2.0, lambda).unwrap().total();
            assert!(n2 <= n1, "N_2 <= N_1 violated at lambda={lambda}");
        }
        assert!(effective_dimension(&eig, 0.5, 1e-2).is_err());
    }

    #[test]
    fn u_shape_over_theta() {
        let (theta_op, _) = optimal_theta(1.5, 2.0).unwrap();
        let grid: Vec<f64> = (1..40).map(|k| k as f64 * 0.05).collect();
        let mut best = (0.0, f64::MIN);
        let mut previous = f64::MIN;
        let mut increasing = true;
        for &theta in &grid {
            let r = predict_rates(1.5, 2.0, theta, TAU0)
                .unwrap()
                .risk_exponent
                .unwrap();
            if r > best.1 {
                best = (theta, r);
            }
            if increasing {
                if r < previous {
                    increasing = false;
                }
            } else {
                assert!(
                    r <= previous + 1e-12,
                    "risk exponent rose again after the kink"
                );
            }
            previous = r;
        }
        let nearest = grid
            .iter()
            .cloned()
            .min_by(|a, b| {
                (a - theta_op)
                    .abs()
                    .partial_cmp(&(b - theta_op).abs())
                    .unwrap()
            })
            .unwrap();
        assert!(
            (best.0 - nearest).abs() < 1e-12,
            "argmax {} vs theta_op {nearest}",
            best.0
        );
    }

    #[test]
    fn noiseless_exponents_monotone_then_flat() {
        let mut previous = 0.0;
        for k in 1..=35 {
            let theta = k as f64 * 0.1;
            let p = predict_rates(1.5, 2.0, theta, NoiseModel::Noiseless).unwrap();
            let r = p.risk_exponent.unwrap();
            assert!(r >= previous - 1e-12);
            if theta >= 2.0 {
                assert_eq!(r, 3.0, "plateau at min(s,2) beta");
            }
            previous = r;
        }
    }

    #[test]
    fn smoothness_panel_contains_three_regimes() {
        let cells = phase_diagram(
            PhasePanel::Smoothness {
                s_min: 0.2,
                s_max: 3.0,
            },
            (0.1, 3.0),
            2.0,
            25,
        )
        .unwrap();
        let has = |r: Regime| cells.iter().any(|c| c.regime == Some(r));
        assert!(has(Regime::Underfitting));
        assert!(has(Regime::Overfitting));
        assert!(has(Regime::Interpolating));
        // variance dominates just below theta = beta at large s
        let cell = cells
            .iter()
            .rfind(|c| c.theta < 2.0 && c.theta > 1.8 && c.s_or_tau > 2.5)
            .unwrap();
        assert_eq!(cell.regime, Some(Regime::Overfitting));
    }

    #[test]
    fn noise_panel_marks_crossover_and_unknown_corner() {
        let cells = phase_diagram(
            PhasePanel::Noise {
                tau_min: 0.0,
                tau_max: 6.0,
                s: 1.5,
            },
            (0.1, 3.0),
            2.0,
            30,
        )
        .unwrap();
        assert!(cells.iter().any(|c| c.flags.contains(&"crossover")));
        let blank: Vec<_> = cells
            .iter()
            .filter(|c| c.flags.contains(&"unknown_upper_bound"))
            .collect();
        assert!(!blank.is_empty());
        for c in blank {
            assert!(c.theta >= 2.0 && c.s_or_tau > 3.0);
            assert!(c.risk_exponent.is_none() && c.regime.is_none());
        }
        // constant-noise interpolating cells carry the floor flag
        assert!(cells
            .iter()
            .any(|c| c.theta >= 2.0 && c.s_or_tau == 0.0 && c.flags.contains(&"floor")));
    }

    #[test]
    fn boundary_cell_balances_exponents() {
        // on the locus min(s~ theta) = tau + 1 - theta/beta the two exponents agree
        let s = 1.0f64;
        let beta = 2.0;
        let theta = 0.4;
        let tau = s.min(2.0) * theta + theta / beta - 1.0;
        if tau >= 0.0 {
            let p = predict_rates(s, beta, theta, NoiseModel::Noisy { tau }).unwrap();
            assert!((p.bias_exponent.unwrap() - p.variance_exponent.unwrap()).abs() < 1e-12);
        }
        // a case with tau > 0 on the locus
        let theta2 = 0.9;
        let tau2: f64 = s.min(2.0) * theta2 + theta2 / beta - 1.0;
        assert!(tau2 > 0.0);
        let p2 = predict_rates(s, beta, theta2, NoiseModel::Noisy { tau: tau2 }).unwrap();
        assert!((p2.bias_exponent.unwrap() - p2.variance_exponent.unwrap()).abs() < 1e-12);
    }
}
