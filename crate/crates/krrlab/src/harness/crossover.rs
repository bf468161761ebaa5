//! Noiseless-to-noisy crossover study: learning curves over the extended
//! n-grid for several noise magnitudes at theta in {1, 2} and at exact
//! interpolation, with the theoretical slopes attached as overlay values.

use std::path::Path;

use crate::error::{Error, Result};
use crate::ratefit::{RateEstimate, Reducer};
use crate::theory::{predict_interpolation, predict_rates, NoiseModel};

use super::{run_sweep, ExperimentConfig, NGridSpec, Profile, Regularization, SweepResult};

#[derive(Debug, Clone)]
pub struct CrossoverOptions {
    pub profile: Profile,
    pub master_seed: u64,
    pub c: f64,
    /// Noise magnitudes; must contain 0 and at least two positive values.
    /// The default set is ours (the source text does not print its legend
    /// values) and is labeled as such in the metadata.
    pub sigma2_list: Vec<f64>,
    pub thetas: Vec<f64>,
    pub targets: Vec<String>,
}

impl Default for CrossoverOptions {
    fn default() -> Self {
        Self {
            profile: Profile::full(),
            master_seed: 0,
            c: 0.005,
            sigma2_list: vec![0.0, 1e-4, 1e-2, 0.05, 1.0],
            thetas: vec![1.0, 2.0],
            targets: vec!["cos2pi".into(), "sin2pi".into(), "sin3pi2".into()],
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossoverCurve {
    pub target: String,
    pub reg: Regularization,
    pub sigma2: f64,
    /// (n, mean excess, per-n std over trials)
    pub points: Vec<(usize, f64, f64)>,
    pub upper_fit: Option<RateEstimate>,
    /// Theoretical slope of the noiseless (bias-dominated) phase.
    pub noiseless_slope: Option<f64>,
    /// Theoretical slope of the noisy phase at constant noise.
    pub noisy_slope: Option<f64>,
    /// First n where this curve exceeds twice the sigma2 = 0 reference.
    pub crossover_n: Option<usize>,
}

pub struct CrossoverResult {
    pub curves: Vec<CrossoverCurve>,
    pub sweeps: Vec<SweepResult>,
}

/// Run the crossover study.
pub fn crossover(opts: &CrossoverOptions) -> Result<CrossoverResult> {
    if !opts.sigma2_list.contains(&0.0) || opts.sigma2_list.iter().filter(|&&s| s > 0.0).count() < 2
    {
        return Err(Error::Config(
            "crossover needs sigma2 = 0 plus at least two positive noise levels".into(),
        ));
    }
    let n_values = NGridSpec::Crossover.capped(opts.profile.n_max)?;

    let mut sweeps = Vec::new();
    for target in &opts.targets {
        let config = ExperimentConfig {
            name: "crossover".to_string(),
            kernel: "min".to_string(),
            target: target.clone(),
            theta_list: opts.thetas.clone(),
            include_interpolation: true,
            c: opts.c,
            sigma2_list: opts.sigma2_list.clone(),
            n_grid: NGridSpec::Explicit {
                values: n_values.clone(),
            },
            trials: opts.profile.trials,
            quadrature: Default::default(),
            mc_draws: 2000,
            master_seed: opts.master_seed,
            reducer: Reducer::Mean,
            out: None,
        };
        sweeps.push(run_sweep(&config, None)?);
    }

    let mut curves = Vec::new();
    for sweep in &sweeps {
        for summary in &sweep.curves {
            let s = crate::target::parse_target(
                &sweep.config.target,
                crate::kernel::parse_kernel(&sweep.config.kernel)?.eigensystem(),
            )?
            .nominal_smoothness();
            let beta = 2.0;
            let noiseless_slope = match summary.reg {
                Regularization::Theta { value } => {
                    predict_rates(s, beta, value, NoiseModel::Noiseless)?.risk_exponent
                }
                Regularization::Interpolation => {
                    predict_interpolation(s, beta, NoiseModel::Noiseless)?.risk_exponent
                }
            };
            let noisy_slope = match summary.reg {
                Regularization::Theta { value } => {
                    predict_rates(s, beta, value, NoiseModel::Noisy { tau: 0.0 })?.risk_exponent
                }
                Regularization::Interpolation => {
                    predict_interpolation(s, beta, NoiseModel::Noisy { tau: 0.0 })?.risk_exponent
                }
            };
            // crossover point: first n where the curve detaches from the
            // noiseless reference by a factor of two
            let reference = sweep
                .curves
                .iter()
                .find(|c| c.reg == summary.reg && c.sigma2 == 0.0)
                .map(|c| &c.excess_curve.points);
            let crossover_n = if summary.sigma2 > 0.0 {
                reference.and_then(|reference| {
                    summary
                        .excess_curve
                        .points
                        .iter()
                        .zip(reference)
                        .find(|((_, noisy), (_, clean))| *noisy >= 2.0 * *clean && *clean > 0.0)
                        .map(|((n, _), _)| *n)
                })
            } else {
                None
            };
            let points = summary
                .excess_curve
                .points
                .iter()
                .zip(&summary.excess_curve.std)
                .map(|(&(n, v), &s)| (n, v, s))
                .collect();
            curves.push(CrossoverCurve {
                target: summary.target.clone(),
                reg: summary.reg,
                sigma2: summary.sigma2,
                points,
                upper_fit: summary.excess_fit_upper.clone(),
                noiseless_slope,
                noisy_slope,
                crossover_n,
            });
        }
    }
    Ok(CrossoverResult { curves, sweeps })
}

impl CrossoverResult {
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("target,regularization,sigma2,n,mean_excess,std\n");
        for c in &self.curves {
            for &(n, v, s) in &c.points {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.target,
                    c.reg.label(),
                    c.sigma2,
                    n,
                    v,
                    s
                ));
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "target,regularization,sigma2,upper_half_slope,theory_noiseless_slope,theory_noisy_slope,crossover_n\n",
        );
        for c in &self.curves {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.target,
                c.reg.label(),
                c.sigma2,
                c.upper_fit
                    .as_ref()
                    .map(|e| e.exponent.to_string())
                    .unwrap_or_default(),
                c.noiseless_slope.map(|v| v.to_string()).unwrap_or_default(),
                c.noisy_slope.map(|v| v.to_string()).unwrap_or_default(),
                c.crossover_n.map(|v| v.to_string()).unwrap_or_default(),
            ));
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("crossover_curves.csv"), self.curves_csv())?;
        std::fs::write(dir.join("crossover_summary.csv"), self.summary_csv())?;
        for sweep in &self.sweeps {
            sweep.write(&dir.join(&sweep.config.target))?;
        }
        Ok(())
    }
}
