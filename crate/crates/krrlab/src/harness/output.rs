//! Deterministic CSV and JSON-sidecar writers.
//!
//! Output is a pure function of the sweep result: rows are pre-sorted by
//! (cell, trial), floats go through the shortest-roundtrip formatter, and
//! no timestamps or machine identifiers are embedded, so equal seeds give
//! byte-identical files.

use std::path::Path;

use serde_json::json;

use crate::error::Result;
use crate::ratefit::RateEstimate;

use super::{CurveSummary, Row, SweepResult};

/// Column layout of the per-trial results file.
pub const CSV_HEADER: &str =
    "experiment,cell,theta,lambda,sigma2,n,trial,bias2,variance,excess,method,se";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render result rows under the pinned header. Failed rows keep their cell
/// coordinates, carry `method = error` and leave the numeric fields empty.
pub fn render_rows_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let theta = fmt_opt(row.reg.theta());
        match &row.result {
            Ok(b) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    row.experiment,
                    row.cell,
                    theta,
                    row.lambda,
                    row.sigma2,
                    row.n,
                    row.trial,
                    b.bias2,
                    b.variance,
                    b.excess,
                    b.method.label(),
                    fmt_opt(b.std_error),
                ));
            }
            Err(_) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},,,,error,\n",
                    row.experiment, row.cell, theta, row.lambda, row.sigma2, row.n, row.trial,
                ));
            }
        }
    }
    out
}

fn rate_fields(fit: &Option<RateEstimate>) -> String {
    match fit {
        Some(e) => format!(
            "{},{},{},{},{},{},{}",
            e.exponent, e.intercept, e.rms_residual, e.n_points, e.excluded, e.window.0, e.window.1
        ),
        None => ",,,,,,".to_string(),
    }
}

/// Per-curve rate estimates next to their theoretical exponents.
pub fn render_rates_csv(curves: &[CurveSummary]) -> String {
    let mut out = String::new();
    out.push_str("target,regularization,sigma2,quantity,exponent,intercept,rms_residual,n_points,excluded,window_lo,window_hi,upper_half_exponent,theory_exponent,pass\n");
    for c in curves {
        let rows: [(
            &str,
            &Option<RateEstimate>,
            &Option<RateEstimate>,
            Option<f64>,
            Option<bool>,
        ); 3] = [
            (
                "bias2",
                &c.bias_fit,
                &c.bias_fit_upper,
                c.prediction.bias_exponent,
                c.bias_pass,
            ),
            (
                "variance",
                &c.variance_fit,
                &c.variance_fit_upper,
                c.prediction.variance_exponent,
                c.variance_pass,
            ),
            (
                "excess",
                &c.excess_fit,
                &c.excess_fit_upper,
                c.prediction.risk_exponent,
                c.risk_pass,
            ),
        ];
        for (quantity, fit, upper, theory, pass) in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.target,
                c.reg.label(),
                c.sigma2,
                quantity,
                rate_fields(fit),
                fmt_opt(upper.as_ref().map(|e| e.exponent)),
                fmt_opt(theory),
                pass.map(|p| p.to_string()).unwrap_or_default(),
            ));
        }
    }
    out
}

fn curve_json(c: &CurveSummary) -> serde_json::Value {
    let fit_json = |f: &Option<RateEstimate>| {
        f.as_ref().map(|e| {
            json!({
                "exponent": e.exponent,
                "intercept": e.intercept,
                "rms_residual": e.rms_residual,
                "n_points": e.n_points,
                "excluded": e.excluded,
                "window": [e.window.0, e.window.1],
            })
        })
    };
    json!({
        "target": c.target,
        "regularization": c.reg.label(),
        "sigma2": c.sigma2,
        "bias_fit": fit_json(&c.bias_fit),
        "bias_fit_upper_half": fit_json(&c.bias_fit_upper),
        "variance_fit": fit_json(&c.variance_fit),
        "variance_fit_upper_half": fit_json(&c.variance_fit_upper),
        "excess_fit": fit_json(&c.excess_fit),
        "excess_fit_upper_half": fit_json(&c.excess_fit_upper),
        "theory": {
            "bias_exponent": c.prediction.bias_exponent,
            "variance_exponent": c.prediction.variance_exponent,
            "risk_exponent": c.prediction.risk_exponent,
            "regime": c.prediction.regime.label(),
            "log_factor": c.prediction.log_factor,
            "upper_bound_only": c.prediction.upper_bound_only,
            "not_covered": c.prediction.not_covered,
        },
        "pass": {
            "bias": c.bias_pass,
            "variance": c.variance_pass,
            "risk": c.risk_pass,
        },
    })
}

/// Config echo, tolerances, hygiene numbers and per-curve summaries.
pub fn metadata_json(result: &SweepResult) -> Result<String> {
    let config_text = serde_json::to_string(&result.config)?;
    let meta = json!({
        "experiment": result.config.name,
        "config": serde_json::from_str::<serde_json::Value>(&config_text)?,
        "config_hash": format!("{:016x}", crate::seeding::cell_hash(&config_text)),
        "master_seed": result.config.master_seed,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "reducer": result.config.reducer.label(),
        "rate_fit_protocol": "aggregate curve over trials, then log-log least squares",
        "tolerances": result.tolerances.map(|t| json!({
            "variance": t.variance,
            "risk": t.risk,
            "bias": t.bias,
        })),
        "max_solver_residual": result.max_residual,
        "row_failures": result.failures,
        "curves": result.curves.iter().map(curve_json).collect::<Vec<_>>(),
    });
    Ok(serde_json::to_string_pretty(&meta)?)
}

pub(super) fn write_sweep(result: &SweepResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("results.csv"), render_rows_csv(&result.rows))?;
    std::fs::write(dir.join("rates.csv"), render_rates_csv(&result.curves))?;
    std::fs::write(dir.join("metadata.json"), metadata_json(result)?)?;
    Ok(())
}

/// Render a phase-diagram raster as CSV.
pub fn render_phase_csv(cells: &[crate::theory::PhaseCell]) -> String {
    let mut out = String::from("theta,s_or_tau,regime,exponent,flags\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.theta,
            c.s_or_tau,
            c.regime.map(|r| r.label()).unwrap_or("unknown"),
            fmt_opt(c.risk_exponent),
            c.flags.join(";"),
        ));
    }
    out
}
