//! Empirical convergence exponents from (n, error) curves by
//! log-log least squares: `log err = -r log n + b`, reported as the positive
//! decay exponent r.

use crate::error::{Error, Result};

/// A fitted decay exponent with its intercept and residual.
#[derive(Debug, Clone)]
pub struct RateEstimate {
    /// Positive decay exponent (larger = faster decay).
    pub exponent: f64,
    /// Intercept b of the log-log fit.
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    /// Points with err <= 0 inside the window, excluded from the fit.
    pub excluded: usize,
    pub window: (usize, usize),
}

/// Ordinary least squares of log err against log n inside the window.
pub fn fit_rate(curve: &[(usize, f64)], window: (usize, usize)) -> Result<RateEstimate> {
    let (lo, hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0usize;
    for &(n, err) in curve {
        if n < lo || n > hi {
            continue;
        }
        if err > 0.0 && err.is_finite() {
            xs.push((n as f64).ln());
            ys.push(err.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < 3 {
        return Err(Error::NotEnoughPoints {
            usable: xs.len(),
            excluded,
        });
    }
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter {
            name: "curve",
            reason: "all points share the same n".into(),
        });
    }
    let slope = num / den;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    Ok(RateEstimate {
        exponent: -slope,
        intercept,
        rms_residual: (ss / count).sqrt(),
        n_points: xs.len(),
        excluded,
        window,
    })
}

/// Fit over the full n-range of the curve.
pub fn fit_rate_full(curve: &[(usize, f64)]) -> Result<RateEstimate> {
    let lo = curve.iter().map(|&(n, _)| n).min().unwrap_or(0);
    let hi = curve.iter().map(|&(n, _)| n).max().unwrap_or(0);
    fit_rate(curve, (lo, hi))
}

/// Fit over the upper half of the n-range (asymptotic-regime check).
pub fn fit_rate_upper_half(curve: &[(usize, f64)]) -> Result<RateEstimate> {
    let lo = curve.iter().map(|&(n, _)| n).min().unwrap_or(0);
    let hi = curve.iter().map(|&(n, _)| n).max().unwrap_or(0);
    fit_rate(curve, (lo + (hi - lo) / 2, hi))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reducer {
    #[default]
    Mean,
    Median,
}

impl Reducer {
    pub fn label(&self) -> &'static str {
        match self {
            Reducer::Mean => "mean",
            Reducer::Median => "median",
        }
    }
}

/// A pointwise-reduced curve with per-n spread across trials.
#[derive(Debug, Clone)]
pub struct AggregatedCurve {
    pub points: Vec<(usize, f64)>,
    pub std: Vec<f64>,
}

/// Reduce per-trial curves sharing one n-grid to a single curve plus the
/// per-n sample standard deviation.
pub fn aggregate_trials(trials: &[Vec<(usize, f64)>], reducer: Reducer) -> Result<AggregatedCurve> {
    let first = trials.first().ok_or(Error::MismatchedGrids)?;
    let grid: Vec<usize> = first.iter().map(|&(n, _)| n).collect();
    for t in trials {
        if t.len() != grid.len() || t.iter().zip(&grid).any(|(&(n, _), &g)| n != g) {
            return Err(Error::MismatchedGrids);
        }
    }
    let k = trials.len();
    let mut points = Vec::with_capacity(grid.len());
    let mut stds = Vec::with_capacity(grid.len());
    for (col, &n) in grid.iter().enumerate() {
        let mut values: Vec<f64> = trials.iter().map(|t| t[col].1).collect();
        let center = match reducer {
            Reducer::Mean => values.iter().sum::<f64>() / k as f64,
            Reducer::Median => {
                values.sort_by(|a, b| a.partial_cmp(b).expect("risk values are finite"));
                if k % 2 == 1 {
                    values[k / 2]
                } else {
                    0.5 * (values[k / 2 - 1] + values[k / 2])
                }
            }
        };
        let mean = values.iter().sum::<f64>() / k as f64;
        let std = if k < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64).sqrt()
        };
        points.push((n, center));
        stds.push(std);
    }
    Ok(AggregatedCurve { points, std: stds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered_exactly() {
        let curve: Vec<(usize, f64)> = (10..=50)
            .map(|k| {
                let n = k * 100;
                (n, 3.0 * (n as f64).powf(-0.75))
            })
            .collect();
        let est = fit_rate_full(&curve).unwrap();
        assert!((est.exponent - 0.75).abs() < 1e-12);
        assert!((est.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(est.rms_residual < 1e-13);
        assert_eq!(est.excluded, 0);
    }

    #[test]
    fn constant_curve_has_zero_exponent() {
        let curve: Vec<(usize, f64)> = (1..=20).map(|k| (k * 100, 0.37)).collect();
        let est = fit_rate_full(&curve).unwrap();
        assert!(est.exponent.abs() < 1e-12);
    }

    #[test]
    fn bounded_perturbation_stays_near_the_true_exponent() {
        let curve: Vec<(usize, f64)> = (10..=50)
            .map(|k| {
                let n = k * 100;
                let nf = n as f64;
                (n, nf.powf(-1.0) * (1.0 + 0.1 * nf.sin()))
            })
            .collect();
        let est = fit_rate_full(&curve).unwrap();
        assert!(
            (0.95..=1.05).contains(&est.exponent),
            "exponent {}",
            est.exponent
        );
    }

    #[test]
    fn nonpositive_errors_are_excluded_with_a_count() {
        let mut curve: Vec<(usize, f64)> = (1..=10).map(|k| (k * 100, 1.0 / k as f64)).collect();
        curve[3].1 = 0.0;
        curve[7].1 = -1.0;
        let est = fit_rate_full(&curve).unwrap();
        assert_eq!(est.excluded, 2);
        assert_eq!(est.n_points, 8);
        // too few usable points is an error
        let tiny = vec![(100, 1.0), (200, 0.0), (300, -1.0), (400, 0.5)];
        assert!(matches!(
            fit_rate_full(&tiny),
            Err(Error::NotEnoughPoints {
                usable: 2,
                excluded: 2
            })
        ));
    }

    #[test]
    fn window_restricts_the_fit() {
        // steep decay at small n, flat at large n
        let curve: Vec<(usize, f64)> = (1..=40)
            .map(|k| {
                let n = k * 100;
                let err = if n <= 2000 {
                    1e3 / (n as f64).powi(2)
                } else {
                    2.5e-4
                };
                (n, err)
            })
            .collect();
        let full = fit_rate_full(&curve).unwrap();
        let upper = fit_rate_upper_half(&curve).unwrap();
        assert!(upper.exponent < 0.1, "upper window sees the plateau");
        assert!(full.exponent > upper.exponent);
        assert_eq!(upper.window.0, 100 + (4000 - 100) / 2);
    }

    #[test]
    fn affine_invariance_of_the_exponent() {
        let curve: Vec<(usize, f64)> = (5..=30).map(|k| (k * 50, (k as f64).powf(-1.3))).collect();
        let scaled: Vec<(usize, f64)> = curve.iter().map(|&(n, e)| (n, 7.0 * e)).collect();
        let a = fit_rate_full(&curve).unwrap();
        let b = fit_rate_full(&scaled).unwrap();
        assert!((a.exponent - b.exponent).abs() < 1e-12);
        assert!((b.intercept - a.intercept - 7.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn aggregation_identity_and_spread() {
        let single = vec![vec![(100, 1.0), (200, 0.5)]];
        let agg = aggregate_trials(&single, Reducer::Mean).unwrap();
        assert_eq!(agg.points, vec![(100, 1.0), (200, 0.5)]);
        assert_eq!(agg.std, vec![0.0, 0.0]);

        let twin = vec![vec![(100, 0.7)], vec![(100, 0.7)]];
        let agg = aggregate_trials(&twin, Reducer::Mean).unwrap();
        assert_eq!(agg.std[0], 0.0);

        let mismatched = vec![vec![(100, 1.0)], vec![(200, 1.0)]];
        assert!(aggregate_trials(&mismatched, Reducer::Mean).is_err());
    }

    #[test]
    fn sample_std_of_unit_variance_noise() {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = crate::seeding::TrialKey {
            master_seed: 5,
            cell: 1,
            trial: 0,
        }
        .rng(crate::seeding::StreamKind::Labels);
        let trials: Vec<Vec<(usize, f64)>> = (0..100)
            .map(|_| vec![(100, rng.sample::<f64, _>(StandardNormal))])
            .collect();
        let agg = aggregate_trials(&trials, Reducer::Mean).unwrap();
        assert!(
            (0.85..=1.15).contains(&agg.std[0]),
            "sample std {}",
            agg.std[0]
        );
    }

    #[test]
    fn median_reducer() {
        let trials = vec![vec![(100, 1.0)], vec![(100, 2.0)], vec![(100, 100.0)]];
        let agg = aggregate_trials(&trials, Reducer::Median).unwrap();
        assert_eq!(agg.points[0].1, 2.0);
    }
}
