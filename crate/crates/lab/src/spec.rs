//! The run specification: everything that determines a run's outputs.
//! Built from defaults, an optional JSON config file (partial objects are
//! merged key by key) and command-line flags, in increasing precedence.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use wentzell_core::mc::SimConfig;
use wentzell_core::semigroup::{FdConfig, VolterraConfig};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Riccati,
    #[default]
    Solve,
    Simulate,
    Verify,
}

/// Interior profile of the initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `zero`, `one`, `sine`, `step`, `smoke`, `h0`, `h1`, `g0`, `g1`.
    Named { name: String },
    /// `Σ c_i x^i`.
    Polynomial { coeffs: Vec<f64> },
    /// Two columns `x,value` at the interior nodes `i/n` of a uniform grid.
    Csv { path: String },
}

/// Initial datum: interior profile plus optional boundary values (default:
/// the profile's own boundary values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FSpec {
    pub profile: Profile,
    pub f0: Option<f64>,
    pub f1: Option<f64>,
}

impl Default for FSpec {
    fn default() -> Self {
        FSpec {
            profile: Profile::Named { name: "smoke".into() },
            f0: None,
            f1: None,
        }
    }
}

impl FSpec {
    /// Parse the command-line form: a profile name, `poly:c0,c1,…` or
    /// `csv:<path>`.
    pub fn parse_profile(s: &str) -> Result<Profile> {
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs = rest
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| LabError::Validation(format!("polynomial coefficients: {e}")))?;
            Ok(Profile::Polynomial { coeffs })
        } else if let Some(path) = s.strip_prefix("csv:") {
            Ok(Profile::Csv { path: path.into() })
        } else {
            Ok(Profile::Named { name: s.into() })
        }
    }
}

/// Paths and horizon of the `Φ` slope runs (one run per boundary start).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeSpec {
    pub n_paths: usize,
    pub t_max: f64,
}

impl Default for SlopeSpec {
    fn default() -> Self {
        SlopeSpec {
            n_paths: 200,
            t_max: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSpec {
    pub command: Command,
    pub mu: f64,
    pub sigma: f64,
    pub f_spec: FSpec,
    pub volterra: VolterraConfig,
    pub fd: FdConfig,
    pub sim: SimConfig,
    pub slope: SlopeSpec,
    pub out_dir: String,
    /// Master seed; every random stream derives from it.
    pub seed: u64,
    /// Also run the finite-difference oracle (`solve`).
    pub oracle: bool,
    /// Reduced verification suite (`verify`).
    pub quick: bool,
    /// Run only these checks (`verify`); empty means all.
    pub checks: Vec<u32>,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            command: Command::Solve,
            mu: 0.0,
            sigma: 2.0,
            f_spec: FSpec::default(),
            volterra: VolterraConfig::default(),
            fd: FdConfig {
                n_space: 1600,
                dt: 1e-4,
                ..FdConfig::default()
            },
            sim: SimConfig::default(),
            slope: SlopeSpec::default(),
            out_dir: "out".into(),
            seed: 0,
            oracle: false,
            quick: false,
            checks: Vec::new(),
        }
    }
}

/// Recursive merge of `patch` into `base` (objects key by key, anything
/// else replaced).
pub fn merge_json(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl RunSpec {
    /// Defaults overlaid with a (possibly partial) JSON config file.
    pub fn from_config_file(path: Option<&Path>) -> Result<Self> {
        let mut base = serde_json::to_value(RunSpec::default())?;
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| LabError::Validation(format!("config {}: {e}", p.display())))?;
            let patch: Value = serde_json::from_str(&text).map_err(|e| LabError::Validation(format!("config {}: {e}", p.display())))?;
            if !patch.is_object() {
                return Err(LabError::Validation("config file must hold a JSON object".into()));
            }
            merge_json(&mut base, patch);
        }
        serde_json::from_value(base).map_err(|e| LabError::Validation(format!("config: {e}")))
    }

    /// Propagate the master seed into the simulation config.
    pub fn sync_seed(&mut self) {
        self.sim.seed = self.seed;
    }

    /// Checks independent of the command's numerics.
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() {
            return Err(LabError::Validation("mu and sigma must be finite".into()));
        }
        if matches!(self.command, Command::Riccati | Command::Simulate) && !(self.sigma > 0.0) {
            return Err(LabError::Validation(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.command == Command::Solve {
            self.volterra.validate()?;
        }
        if self.command == Command::Simulate {
            self.sim.validate()?;
            if self.slope.n_paths == 0 || !(self.slope.t_max > 0.0 && self.slope.t_max.is_finite()) {
                return Err(LabError::Validation("slope config needs n_paths > 0 and finite t_max > 0".into()));
            }
        }
        if let Some(id) = self.checks.iter().find(|id| !(1..=13).contains(*id)) {
            return Err(LabError::Validation(format!("no check {id}; ids run from 1 to 13")));
        }
        Ok(())
    }
}
