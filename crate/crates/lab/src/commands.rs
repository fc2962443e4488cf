//! The four subcommands. Each takes a validated [`RunSpec`], writes its
//! files through an [`Emitter`] and returns an error carrying the exit code
//! on failure.

use serde::Serialize;
use serde_json::{json, Value};
use wentzell_core::analysis::{classify_nonneg, decompose, defect, rate_fit, rate_quantity_for, Classification, DefectDecomposition, RateFit};
use wentzell_core::mc::{exit_model_masses, l1_distance, normalize_counts, phi_slope_limit, Estimate, ExitStats, SimConfig};
use wentzell_core::riccati::{ModelParams, Regime, RiccatiSolution};
use wentzell_core::semigroup::{fd_solve, scaled_sup_difference, FdConfig, Semigroup};

use crate::error::{LabError, Result};
use crate::io::Emitter;
use crate::parallel;
use crate::profile;
use crate::spec::{Command, RunSpec};
use crate::verify::{self, CheckResult, Injection, VerifyOptions};

/// Rows of `J_profile.csv`.
pub const J_PROFILE_ROWS: usize = 1001;

pub fn run(spec: &RunSpec, inject: Option<Injection>, on_check: impl FnMut(&CheckResult)) -> Result<()> {
    spec.validate()?;
    match spec.command {
        Command::Riccati => riccati(spec),
        Command::Solve => solve(spec),
        Command::Simulate => simulate(spec),
        Command::Verify => verify_cmd(spec, inject, on_check),
    }
}

/// Best-effort `error.json` next to the other outputs.
pub fn write_error(spec: &RunSpec, err: &LabError) {
    if let Ok(em) = Emitter::new(spec) {
        let _ = em.write_json(
            "error.json",
            &json!({
                "kind": err.kind(),
                "message": err.to_string(),
                "exit_code": err.exit_code(),
            }),
        );
    }
}

fn riccati(spec: &RunSpec) -> Result<()> {
    let sol = RiccatiSolution::new(spec.mu, spec.sigma)?;
    let em = Emitter::new(spec)?;
    let mut body = serde_json::to_value(&sol)?;
    if let Value::Object(m) = &mut body {
        m.insert("regime".into(), serde_json::to_value(sol.params.regime)?);
        m.insert("ode_residual".into(), json!(sol.ode_residual(1000)));
    }
    em.write_json("riccati.json", &body)?;
    let n = J_PROFILE_ROWS - 1;
    em.write_csv(
        "J_profile.csv",
        &["x", "J0", "J1"],
        (0..=n).map(|i| {
            let x = i as f64 / n as f64;
            let j = sol.eval_j(x);
            vec![x, j[0], j[1]]
        }),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SolveSummary {
    regime: Option<Regime>,
    lambda0: Option<f64>,
    lambda1: Option<f64>,
    decomposition: Option<DefectDecomposition>,
    classification: Option<Classification>,
    rate_fit: Option<RateFit>,
    rate_fit_window: [f64; 2],
    /// Why the rate fit is missing, when it is.
    rate_fit_note: Option<String>,
    final_sup_norm: f64,
    min_u: f64,
    fd_sup_diff: Option<f64>,
}

fn solve(spec: &RunSpec) -> Result<()> {
    let f = profile::resolve(&spec.f_spec, spec.mu, spec.sigma)?;
    let cfg = spec.volterra;
    let sg = Semigroup::new(spec.mu, spec.sigma, cfg)?;
    let (march, field) = sg.solve(&f)?;
    let t_end = *field.times.last().unwrap_or(&cfg.t_end);

    let analysis = if spec.sigma > 0.0 {
        let sol = RiccatiSolution::new(spec.mu, spec.sigma)?;
        let dec = decompose(defect(&f, &sol), &sol)?;
        Some((sol.params.regime, sol.lambda0, sol.lambda1, dec, classify_nonneg(&f, &sol)?))
    } else {
        None
    };
    let window = [0.5 * t_end, t_end];
    let quantity = analysis.as_ref().map_or(wentzell_core::analysis::RateQuantity::LogSup, |a| rate_quantity_for(a.0, &a.3));
    let (fit, note) = match rate_fit(&field, window, quantity) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let fd_sup_diff = if spec.oracle { Some(oracle_diff(spec, &f, &field)?) } else { None };

    let em = Emitter::new(spec)?;
    em.write_csv(
        "field.csv",
        &["t", "x", "u"],
        field
            .times
            .iter()
            .zip(&field.values)
            .flat_map(|(&t, row)| field.nodes.iter().zip(row).map(move |(&x, &u)| vec![t, x, u])),
    )?;
    em.write_csv(
        "traces.csv",
        &["t", "u0", "u1"],
        march.times.iter().zip(&march.traces).map(|(&t, v)| vec![t, v[0], v[1]]),
    )?;
    let last = field.values.len() - 1;
    em.write_json(
        "summary.json",
        &SolveSummary {
            regime: analysis.as_ref().map(|a| a.0),
            lambda0: analysis.as_ref().map(|a| a.1),
            lambda1: analysis.as_ref().map(|a| a.2),
            decomposition: analysis.as_ref().map(|a| a.3),
            classification: analysis.as_ref().map(|a| a.4),
            rate_fit: fit,
            rate_fit_window: window,
            rate_fit_note: note,
            final_sup_norm: field.sup_norm(last),
            min_u: field.min(),
            fd_sup_diff,
        },
    )?;
    Ok(())
}

/// Finite-difference rerun on a grid nested in the Volterra output grid.
fn oracle_diff(spec: &RunSpec, f: &wentzell_core::semigroup::BoundaryFunction, field: &wentzell_core::semigroup::SpaceTimeField) -> Result<f64> {
    let cfg = spec.volterra;
    let out_dt = cfg.dt * cfg.output_stride as f64;
    let ratio = out_dt / spec.fd.dt;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio || ratio.round() < 1.0 {
        return Err(LabError::Validation(format!(
            "fd dt {} must divide the output spacing {out_dt}",
            spec.fd.dt
        )));
    }
    if !spec.fd.n_space.is_multiple_of(cfg.n_space) {
        return Err(LabError::Validation(format!(
            "fd n_space {} must be a multiple of n_space {}",
            spec.fd.n_space, cfg.n_space
        )));
    }
    let fd_cfg = FdConfig {
        t_end: cfg.steps() as f64 * cfg.dt,
        output_stride: ratio.round() as usize,
        ..spec.fd
    };
    let fd = fd_solve(f, spec.mu, spec.sigma, &fd_cfg)?;
    Ok(scaled_sup_difference(field, &fd)?)
}

#[derive(Serialize)]
struct ExitRun {
    #[serde(flatten)]
    stats: ExitStats,
    model_mass: f64,
    hist_l1: f64,
    /// `p_finite` within 3·SE + 0.01 of the model mass.
    agrees: bool,
}

#[derive(Serialize)]
struct SimulateSummary {
    regime: Regime,
    masses: [f64; 2],
    phi_slope_limit: f64,
    /// Exit-law runs from each boundary; empty in the critical regime.
    runs: Vec<ExitRun>,
    /// `Φ` slope from each boundary start.
    phi_slopes: [Estimate; 2],
    note: Option<String>,
    inconclusive: bool,
}

fn simulate(spec: &RunSpec) -> Result<()> {
    let params = ModelParams::new(spec.mu, spec.sigma)?;
    let sol = RiccatiSolution::solve(params)?;
    let sim = spec.sim;
    let slope_cfg = SimConfig {
        n_paths: spec.slope.n_paths,
        t_max: spec.slope.t_max,
        ..sim
    };
    let phi_slopes = [
        parallel::phi_slope(&params, &slope_cfg, 0.0)?,
        parallel::phi_slope(&params, &slope_cfg, 1.0)?,
    ];
    let mut runs = Vec::new();
    let mut hist_rows = Vec::new();
    let note = if params.regime == Regime::Critical {
        Some("exit law is not classifiable in the critical regime; only the phi slope is reported".to_string())
    } else {
        let w = 1.0 / sim.n_bins as f64;
        for (k, slope) in phi_slopes.iter().enumerate() {
            let mut stats = parallel::exit_stats(k, &params, &sim)?;
            stats.phi_slope = Some(*slope);
            let model = exit_model_masses(&sol, k, sim.n_bins);
            let hist_l1 = l1_distance(&normalize_counts(&stats.exit_hist), &model);
            for (i, (&c, &m)) in stats.exit_hist.iter().zip(&model).enumerate() {
                hist_rows.push(vec![k as f64, i as f64 * w, (i + 1) as f64 * w, c as f64, m / w]);
            }
            runs.push(ExitRun {
                agrees: stats.p_finite.agrees(sol.masses[k], 0.01),
                model_mass: sol.masses[k],
                hist_l1,
                stats,
            });
        }
        None
    };
    let inconclusive = runs.iter().any(|r| r.stats.inconclusive);
    let em = Emitter::new(spec)?;
    em.write_json(
        "exit_stats.json",
        &SimulateSummary {
            regime: params.regime,
            masses: [sol.masses[0], sol.masses[1]],
            phi_slope_limit: phi_slope_limit(spec.mu, spec.sigma),
            runs,
            phi_slopes,
            note,
            inconclusive,
        },
    )?;
    em.write_csv("exit_hist.csv", &["k", "bin_left", "bin_right", "count", "model_density"], hist_rows)?;
    if inconclusive {
        return Err(LabError::Numerical(
            "censoring rate reached 1%; outputs are flagged inconclusive (raise t_max)".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    #[serde(flatten)]
    report: &'a verify::Report,
    injection: Option<Injection>,
}

fn verify_cmd(spec: &RunSpec, inject: Option<Injection>, on_check: impl FnMut(&CheckResult)) -> Result<()> {
    let opts = VerifyOptions {
        quick: spec.quick,
        seed: spec.seed,
        inject,
        only: spec.checks.clone(),
    };
    let em = Emitter::new(spec)?;
    let report = verify::run_all(&opts, on_check);
    em.write_json("report.json", &VerifyBody { report: &report, injection: inject })?;
    if !report.all_passed {
        let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
        return Err(LabError::Verification(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}
