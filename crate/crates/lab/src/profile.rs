//! Turning an [`FSpec`] into a boundary function.

use std::f64::consts::PI;
use std::path::Path;

use wentzell_core::analysis::closed_forms;
use wentzell_core::riccati::RiccatiSolution;
use wentzell_core::semigroup::BoundaryFunction;

use crate::error::{LabError, Result};
use crate::spec::{FSpec, Profile};

pub const NAMED_PROFILES: [&str; 9] = ["zero", "one", "sine", "step", "smoke", "h0", "h1", "g0", "g1"];

fn named(name: &str, mu: f64, sigma: f64) -> Result<BoundaryFunction> {
    let closed = || -> Result<_> {
        if !(sigma > 0.0) {
            return Err(LabError::Validation(format!("profile {name} needs sigma > 0")));
        }
        Ok(closed_forms(&RiccatiSolution::new(mu, sigma)?)?)
    };
    Ok(match name {
        "zero" => BoundaryFunction::zero(),
        "one" => BoundaryFunction::constant(1.0),
        "sine" => BoundaryFunction::closed(|x| (PI * x).sin(), 0.0, 0.0),
        "step" => BoundaryFunction::closed(|x| if x < 0.5 { 1.0 } else { 0.0 }, 1.0, 0.0),
        // boundary values away from the interior limits
        "smoke" => BoundaryFunction::closed(|x| (PI * x).sin(), 0.3, 0.3),
        "h0" => closed()?.h0_function(),
        "h1" => closed()?.h1_function(),
        "g0" => closed()?.g0_function(),
        "g1" => closed()?.g1_function(),
        _ => {
            return Err(LabError::Validation(format!(
                "unknown profile '{name}' (expected one of {}, poly:…, csv:…)",
                NAMED_PROFILES.join(", ")
            )))
        }
    })
}

fn polynomial(coeffs: &[f64]) -> Result<BoundaryFunction> {
    if coeffs.is_empty() || !coeffs.iter().all(|c| c.is_finite()) {
        return Err(LabError::Validation("polynomial needs finite coefficients".into()));
    }
    let c = coeffs.to_vec();
    let p = move |x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
    let (f0, f1) = (p(0.0), p(1.0));
    Ok(BoundaryFunction::closed(p, f0, f1))
}

/// Values in the second column, one per interior node `i/n`, `i = 1…n−1`.
/// An optional header row and `#` comment lines are skipped.
fn from_csv(path: &Path) -> Result<BoundaryFunction> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_path(path)?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if row == 0 && rec.get(0).is_some_and(|c| c.trim().parse::<f64>().is_err()) {
            continue;
        }
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| LabError::Validation("csv profile needs two columns x,value".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| LabError::Validation(format!("csv profile: {e}")))
        };
        xs.push(get(0)?);
        vs.push(get(1)?);
    }
    let n = xs.len() + 1;
    for (i, &x) in xs.iter().enumerate() {
        if (x - (i + 1) as f64 / n as f64).abs() > 1e-9 {
            return Err(LabError::Validation(format!(
                "csv profile must list the interior nodes i/{n} in order; row {} has x = {x}",
                i + 1
            )));
        }
    }
    let (f0, f1) = (*vs.first().unwrap_or(&0.0), *vs.last().unwrap_or(&0.0));
    Ok(BoundaryFunction::from_grid(vs, f0, f1, f64::INFINITY)?)
}

/// The datum described by `spec` for parameters `(μ, σ)`.
pub fn resolve(spec: &FSpec, mu: f64, sigma: f64) -> Result<BoundaryFunction> {
    let f = match &spec.profile {
        Profile::Named { name } => named(name, mu, sigma)?,
        Profile::Polynomial { coeffs } => polynomial(coeffs)?,
        Profile::Csv { path } => from_csv(Path::new(path))?,
    };
    let (f0, f1) = (spec.f0.unwrap_or(f.f0), spec.f1.unwrap_or(f.f1));
    if !f0.is_finite() || !f1.is_finite() {
        return Err(LabError::Validation("boundary values must be finite".into()));
    }
    Ok(f.with_boundary(f0, f1))
}
