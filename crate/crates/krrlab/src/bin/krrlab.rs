//! Command-line front end over the library: sweeps, the experiment table,
//! the crossover study, rate theory queries, phase diagrams and the
//! self-test suite. Exits nonzero iff any pass/fail flag fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use krrlab::harness::{
    crossover, render_phase_csv, run_selftest, table1, CrossoverOptions, ExperimentConfig, Profile,
    Table1Options, Tolerances,
};
use krrlab::theory::{
    optimal_theta, phase_diagram, predict_rates, NoiseModel, PhasePanel, RatePrediction,
};

#[derive(Parser)]
#[command(
    name = "krrlab",
    about = "Kernel ridge regression learning-curve laboratory",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for all RNG streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (results.csv, rates.csv, metadata.json, ...).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Never changes any number.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// CI profile: trials = 20, n <= 3000, tolerances x 1.5.
    #[arg(long, global = true)]
    fast: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reproduce the bias/variance/risk rate table (3 targets x 6 thetas).
    Table1 {
        /// Trials per cell (default: profile setting).
        #[arg(long)]
        trials: Option<usize>,
        /// Prefactor of lambda = c n^-theta.
        #[arg(long, default_value_t = 0.005)]
        c: f64,
        /// Noise variance (default: the 0.05 noise scale read as a
        /// standard deviation).
        #[arg(long, default_value_t = 0.0025)]
        sigma2: f64,
    },
    /// Noiseless-to-noisy crossover curves at theta in {1, 2} and lambda = 0.
    Crossover {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0.005)]
        c: f64,
    },
    /// Closed-form rate predictions (add --phase for a raster).
    Theory(TheoryArgs),
    /// Phase diagram raster CSV over (theta, s) or (theta, tau).
    PhaseDiagram(PhaseArgs),
    /// Run the oracle-equivalence and numerical hygiene suite.
    Selftest {
        /// Monte Carlo draws per oracle cell.
        #[arg(long, default_value_t = 2000)]
        draws: usize,
    },
}

#[derive(Args)]
struct TheoryArgs {
    /// Source smoothness s (accepts `inf`).
    #[arg(long)]
    s: Option<f64>,
    /// Eigenvalue decay exponent.
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Regularization scaling lambda = c n^-theta.
    #[arg(long)]
    theta: Option<f64>,
    /// Noise scaling sigma^2 = n^-tau (default 0: constant noise).
    #[arg(long)]
    tau: Option<f64>,
    /// Predict the noiseless rates instead.
    #[arg(long)]
    noiseless: bool,
    /// Print the optimal theta and rate for (s, beta).
    #[arg(long)]
    optimal: bool,
    /// Emit a phase raster instead: `s` or `tau` panel.
    #[arg(long)]
    phase: Option<String>,
    #[arg(long, default_value_t = 41)]
    resolution: usize,
}

#[derive(Args)]
struct PhaseArgs {
    /// Panel kind: `s` (constant noise) or `tau` (fixed smoothness).
    #[arg(long)]
    panel: String,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Fixed smoothness for the tau panel.
    #[arg(long, default_value_t = 1.5)]
    s: f64,
    #[arg(long, default_value_t = 0.1)]
    theta_min: f64,
    #[arg(long, default_value_t = 3.0)]
    theta_max: f64,
    #[arg(long)]
    y_min: Option<f64>,
    #[arg(long)]
    y_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    resolution: usize,
}

fn print_prediction(p: &RatePrediction) {
    let fmt = |v: Option<f64>| {
        v.map(|x| format!("{x:.4}"))
            .unwrap_or_else(|| "--".to_string())
    };
    println!("regime:            {}", p.regime.label());
    println!("bias exponent:     {}", fmt(p.bias_exponent));
    println!("variance exponent: {}", fmt(p.variance_exponent));
    println!("risk exponent:     {}", fmt(p.risk_exponent));
    let mut flags = Vec::new();
    if p.log_factor {
        flags.push("log-factor (s = 2)");
    }
    if p.upper_bound_only {
        flags.push("upper bound only");
    }
    if p.not_covered {
        flags.push("not covered by the theory");
    }
    if let Some(lower) = p.info_lower_exponent {
        println!("info-theoretic lower exponent: {lower:.4}");
    }
    if !flags.is_empty() {
        println!("flags:             {}", flags.join(", "));
    }
}

fn run_phase(panel: &str, args: &PhaseArgs, out: &Option<PathBuf>) -> krrlab::Result<bool> {
    let panel = match panel {
        "s" => PhasePanel::Smoothness {
            s_min: args.y_min.unwrap_or(0.1),
            s_max: args.y_max.unwrap_or(3.0),
        },
        "tau" => PhasePanel::Noise {
            tau_min: args.y_min.unwrap_or(0.0),
            tau_max: args.y_max.unwrap_or(6.0),
            s: args.s,
        },
        other => {
            return Err(krrlab::Error::Config(format!(
                "unknown panel `{other}` (expected `s` or `tau`)"
            )))
        }
    };
    let cells = phase_diagram(
        panel,
        (args.theta_min, args.theta_max),
        args.beta,
        args.resolution,
    )?;
    let csv = render_phase_csv(&cells);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join("phase_diagram.csv");
            std::fs::write(&path, csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(true)
}

fn run(cli: Cli) -> krrlab::Result<bool> {
    let profile = Profile::pick(cli.fast);
    match cli.command {
        Command::Sweep { config } => {
            let mut config = ExperimentConfig::from_json_file(&config)?;
            config.master_seed = cli.seed;
            if cli.fast {
                config.trials = config.trials.min(profile.trials);
                config.n_grid = krrlab::harness::NGridSpec::Explicit {
                    values: config.n_grid.capped(profile.n_max)?,
                };
            }
            let tolerances = Tolerances::base().scaled(profile.tolerance_scale);
            let result = krrlab::harness::run_sweep(&config, Some(tolerances))?;
            for curve in &result.curves {
                let flag = |p: Option<bool>| match p {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "n/a",
                };
                println!(
                    "{} {} sigma2={}: bias {} variance {} risk {}",
                    curve.target,
                    curve.reg.label(),
                    curve.sigma2,
                    flag(curve.bias_pass),
                    flag(curve.variance_pass),
                    flag(curve.risk_pass),
                );
            }
            let dir = cli
                .out
                .or(result.config.out.clone())
                .unwrap_or_else(|| PathBuf::from("out/sweep"));
            result.write(&dir)?;
            println!("wrote {}", dir.display());
            Ok(result.all_pass())
        }
        Command::Table1 { trials, c, sigma2 } => {
            let mut opts = Table1Options {
                profile,
                master_seed: cli.seed,
                c,
                sigma2,
            };
            if let Some(t) = trials {
                opts.profile.trials = t;
            }
            let result = table1(&opts)?;
            print!("{}", result.render());
            if let Some(dir) = &cli.out {
                result.write(dir)?;
                println!("wrote {}", dir.display());
            }
            Ok(result.all_pass())
        }
        Command::Crossover { trials, c } => {
            let mut opts = CrossoverOptions {
                profile,
                master_seed: cli.seed,
                c,
                ..Default::default()
            };
            if let Some(t) = trials {
                opts.profile.trials = t;
            }
            let result = crossover(&opts)?;
            print!("{}", result.summary_csv());
            if let Some(dir) = &cli.out {
                result.write(dir)?;
                println!("wrote {}", dir.display());
            }
            Ok(result.sweeps.iter().all(|s| s.failures == 0))
        }
        Command::Theory(args) => {
            if let Some(panel) = &args.phase {
                let phase_args = PhaseArgs {
                    panel: panel.clone(),
                    beta: args.beta,
                    s: args.s.unwrap_or(1.5),
                    theta_min: 0.1,
                    theta_max: args.beta * 1.5,
                    y_min: None,
                    y_max: None,
                    resolution: args.resolution,
                };
                return run_phase(panel, &phase_args, &cli.out);
            }
            let s = args.s.ok_or_else(|| {
                krrlab::Error::Config(
                    "theory needs --s (use `inf` for eigenfunction targets)".into(),
                )
            })?;
            if args.optimal {
                let (theta_op, rate) = optimal_theta(s, args.beta)?;
                println!("theta_op = {theta_op:.6}");
                println!("optimal risk exponent = {rate:.6}");
                return Ok(true);
            }
            let theta = args.theta.ok_or_else(|| {
                krrlab::Error::Config("theory needs --theta (or --optimal / --phase)".into())
            })?;
            let noise = if args.noiseless {
                NoiseModel::Noiseless
            } else {
                NoiseModel::Noisy {
                    tau: args.tau.unwrap_or(0.0),
                }
            };
            let p = predict_rates(s, args.beta, theta, noise)?;
            print_prediction(&p);
            Ok(true)
        }
        Command::PhaseDiagram(args) => run_phase(&args.panel.clone(), &args, &cli.out),
        Command::Selftest { draws } => {
            let reports = run_selftest(cli.seed, draws)?;
            let mut all = true;
            for r in &reports {
                println!(
                    "{} {} — {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                all &= r.pass;
            }
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                let lines: String = reports
                    .iter()
                    .map(|r| format!("{},{},{}\n", r.pass, r.name, r.detail))
                    .collect();
                std::fs::write(
                    dir.join("selftest.csv"),
                    format!("pass,check,detail\n{lines}"),
                )?;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        // changes scheduling only; every emitted number is seed-determined
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
