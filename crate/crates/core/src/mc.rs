//! Monte Carlo model: reflected Brownian motion with drift on [0,1], its
//! boundary regulators `L₀, L₁`, the additive functional
//! `Φ_t = t − (L₀ + L₁)_t/σ`, the time change `ζ` and the process `Y = X∘ζ`.
//!
//! Two steppers are provided. [`Dynamics::step`] is the plain Euler scheme
//! with reflection folding. [`Dynamics::step_exact`] samples the regulator
//! increment exactly: given the free endpoint, the running minimum (maximum)
//! of the Brownian bridge has a closed-form law, and the one-sided Skorohod
//! regulator over a step is the overshoot of that extremum. The path runners
//! use the exact stepper with steps `h = clamp(level − Φ, dt, max_step)`:
//! since `Φ` grows at most at unit rate, no crossing of `level` can be
//! missed inside a step, and only the final approach is resolved at `dt`.
//!
//! Every path draws from its own ChaCha8 stream, so results do not depend
//! on how paths are split into batches.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::math::{abs, exp, expm1, log, sqrt};
use crate::quad::GaussLegendre;
use crate::riccati::{ModelParams, Regime, RiccatiSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Finest step, used while `Φ` is within `dt` of its target level.
    pub dt: f64,
    pub t_max: f64,
    pub phi_floor: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub n_bins: usize,
    /// Largest step taken while `Φ` is far below its target level.
    pub max_step: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-5,
            t_max: 100.0,
            phi_floor: -25.0,
            n_paths: 100_000,
            seed: 0,
            n_bins: 20,
            max_step: 1e-2,
        }
    }
}

/// Steps beyond this size could let a path touch both boundaries within
/// one step with non-negligible probability.
pub const MAX_STEP_LIMIT: f64 = 2e-2;

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.dt > 0.0 && self.dt <= 1e-3) {
            return bad("dt must lie in (0, 1e-3]");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("t_max must be positive");
        }
        if !(self.phi_floor <= -5.0) {
            return bad("phi_floor must be at most -5");
        }
        if self.n_paths == 0 || self.n_bins == 0 {
            return bad("n_paths and n_bins must be positive");
        }
        if !(self.max_step >= self.dt && self.max_step <= MAX_STEP_LIMIT) {
            return bad("max_step must lie in [dt, 0.02]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathState {
    pub x: f64,
    pub l0: f64,
    pub l1: f64,
    pub phi: f64,
    pub clock: f64,
}

impl PathState {
    pub fn new(x0: f64) -> Self {
        PathState {
            x: x0,
            l0: 0.0,
            l1: 0.0,
            phi: 0.0,
            clock: 0.0,
        }
    }
}

/// Fold `x_raw` back into [0,1] by repeated reflection. The pushes are the
/// regulator increments attributed to each boundary, so that
/// `x = x_raw + push0 − push1` exactly (twice the overshoot per reflection).
pub fn fold(x_raw: f64) -> (f64, f64, f64) {
    let (mut x, mut p0, mut p1) = (x_raw, 0.0, 0.0);
    if !x.is_finite() {
        return (x, p0, p1);
    }
    loop {
        if x < 0.0 {
            p0 -= 2.0 * x;
            x = -x;
        } else if x > 1.0 {
            p1 += 2.0 * (x - 1.0);
            x = 2.0 - x;
        } else {
            return (x, p0, p1);
        }
    }
}

/// Drift and boundary rate of the simulated process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub mu: f64,
    pub sigma: f64,
}

impl Dynamics {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain!("simulation needs finite mu and sigma > 0 (mu={mu}, sigma={sigma})"));
        }
        Ok(Dynamics { mu, sigma })
    }

    fn finish(&self, s: &PathState, x: f64, p0: f64, p1: f64, h: f64) -> PathState {
        let l0 = s.l0 + p0;
        let l1 = s.l1 + p1;
        let clock = s.clock + h;
        PathState {
            x,
            l0,
            l1,
            phi: clock - (l0 + l1) / self.sigma,
            clock,
        }
    }

    /// Euler step with reflection folding, driven by a standard normal draw.
    pub fn step(&self, s: &PathState, dt: f64, xi: f64) -> PathState {
        let (x, p0, p1) = fold(s.x + self.mu * dt + sqrt(dt) * xi);
        self.finish(s, x, p0, p1, dt)
    }

    /// Step with exactly sampled regulator increments. `xi` is the normal
    /// increment; `uniform` yields values in (0,1] for the bridge minimum
    /// and maximum and is only called when an endpoint lies within reach
    /// of a boundary.
    pub fn step_exact(&self, s: &PathState, h: f64, xi: f64, mut uniform: impl FnMut() -> f64) -> PathState {
        let a = s.x;
        let b = a + self.mu * h + sqrt(h) * xi;
        // beyond this distance the bridge touches the boundary with
        // probability below e^{-200}
        let reach = 10.0 * sqrt(h);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        if a.min(b) < reach {
            let d = b - a;
            let m = 0.5 * (a + b - sqrt(d * d - 2.0 * h * log(uniform())));
            if m < 0.0 {
                p0 = -m;
            }
        }
        if a.max(b) > 1.0 - reach {
            let d = b - a;
            let m = 0.5 * (a + b + sqrt(d * d - 2.0 * h * log(uniform())));
            if m > 1.0 {
                p1 = m - 1.0;
            }
        }
        // a two-sided touch within one step is not resolved exactly; fold
        // keeps the state admissible if it ever happens
        let (x, q0, q1) = fold(b + p0 - p1);
        self.finish(s, x, p0 + q0, p1 + q1, h)
    }
}

/// Experiment tags mixed into the master seed so that different
/// experiments with one seed use unrelated streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Exit0,
    Exit1,
    Slope,
    SampleY,
    Martingale,
    Occupation,
}

/// Generator of path `index` of experiment `tag` under master seed `seed`.
pub fn path_rng(seed: u64, tag: Stream, index: usize) -> ChaCha8Rng {
    let mixed = seed ^ (tag as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(index as u64);
    rng
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1], safe for the logarithm
    1.0 - rng.random::<f64>()
}

fn exact_step(dynamics: &Dynamics, s: &PathState, h: f64, rng: &mut ChaCha8Rng) -> PathState {
    let xi: f64 = rng.sample(StandardNormal);
    dynamics.step_exact(s, h, xi, || uniform_open(rng))
}

/// How a path run towards `Φ > level` ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// `Φ` exceeded the level; the state at that step.
    Crossed(PathState),
    /// `Φ` fell below the floor: `ζ = ∞`.
    Floor,
    /// `t_max` reached without a decision.
    Censored,
}

/// Run `s` until `Φ > level`, `Φ < phi_floor` or `clock ≥ t_max`. Steps are
/// additionally cut so that the clock lands on `stop_at` when given.
fn run_to_level(
    dynamics: &Dynamics,
    cfg: &SimConfig,
    s: &mut PathState,
    level: f64,
    stop_at: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Option<Crossing> {
    loop {
        if s.clock >= cfg.t_max {
            return Some(Crossing::Censored);
        }
        let mut h = (level - s.phi).clamp(cfg.dt, cfg.max_step);
        if let Some(t) = stop_at {
            if s.clock >= t {
                return None;
            }
            h = h.min(t - s.clock);
        }
        *s = exact_step(dynamics, s, h, rng);
        if s.phi > level {
            return Some(Crossing::Crossed(*s));
        }
        if s.phi < cfg.phi_floor {
            return Some(Crossing::Floor);
        }
    }
}

/// Estimate with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value − target| ≤ 3·SE + allowance`.
    pub fn agrees(&self, target: f64, allowance: f64) -> bool {
        abs(self.value - target) <= 3.0 * self.se + allowance
    }
}

/// Running sums for a sample mean; merging is exact for the counts and
/// order-dependent only through floating-point addition, so batches must be
/// merged in index order for bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanAccumulator {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn estimate(&self) -> Estimate {
        if self.n == 0 {
            return Estimate::default();
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            se: sqrt(var / n),
        }
    }
}

// ---------------------------------------------------------------- exit law

/// Counts from a batch of exit-law paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExitAccumulator {
    pub n_paths: u64,
    pub n_finite: u64,
    pub n_infinite: u64,
    pub n_censored: u64,
    pub hist: Vec<u64>,
}

impl ExitAccumulator {
    pub fn new(n_bins: usize) -> Self {
        ExitAccumulator {
            hist: vec![0; n_bins],
            ..Default::default()
        }
    }

    pub fn merge(&mut self, o: &Self) {
        self.n_paths += o.n_paths;
        self.n_finite += o.n_finite;
        self.n_infinite += o.n_infinite;
        self.n_censored += o.n_censored;
        for (a, b) in self.hist.iter_mut().zip(&o.hist) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExitStats {
    pub k: usize,
    pub n_paths: u64,
    pub n_finite: u64,
    pub n_infinite: u64,
    pub n_censored: u64,
    /// Fraction of classified paths with `ζ₀ < ∞`.
    pub p_finite: Estimate,
    /// Counts of `X_{ζ₀}` on `n_bins` equal bins of (0,1).
    pub exit_hist: Vec<u64>,
    /// Filled by callers that also run [`phi_slope`].
    pub phi_slope: Option<Estimate>,
    /// Censoring rate reached 1%.
    pub inconclusive: bool,
}

impl ExitStats {
    pub fn from_accumulator(k: usize, acc: &ExitAccumulator) -> Self {
        let classified = acc.n_paths - acc.n_censored;
        let p_finite = if classified == 0 {
            Estimate::default()
        } else {
            let n = classified as f64;
            let p = acc.n_finite as f64 / n;
            Estimate {
                value: p,
                se: sqrt(p * (1.0 - p) / n),
            }
        };
        ExitStats {
            k,
            n_paths: acc.n_paths,
            n_finite: acc.n_finite,
            n_infinite: acc.n_infinite,
            n_censored: acc.n_censored,
            p_finite,
            exit_hist: acc.hist.clone(),
            phi_slope: None,
            inconclusive: acc.n_censored as f64 >= 0.01 * acc.n_paths as f64,
        }
    }

    pub fn censoring_rate(&self) -> f64 {
        self.n_censored as f64 / self.n_paths.max(1) as f64
    }
}

fn check_exit_args(k: usize, params: &ModelParams, cfg: &SimConfig) -> Result<Dynamics> {
    cfg.validate()?;
    if k > 1 {
        return Err(domain!("boundary index must be 0 or 1, got {k}"));
    }
    if params.regime == Regime::Critical {
        return Err(domain!(
            "exit law is not classifiable in the critical regime (Φ oscillates without drift)"
        ));
    }
    Dynamics::new(params.mu, params.sigma)
}

fn bin_of(x: f64, n_bins: usize) -> usize {
    ((x * n_bins as f64) as usize).min(n_bins - 1)
}

/// Exit-law paths `range` started at boundary `k`.
pub fn run_exit_range(k: usize, params: &ModelParams, cfg: &SimConfig, range: Range<usize>) -> Result<ExitAccumulator> {
    let dynamics = check_exit_args(k, params, cfg)?;
    let tag = if k == 0 { Stream::Exit0 } else { Stream::Exit1 };
    let mut acc = ExitAccumulator::new(cfg.n_bins);
    for i in range {
        let mut rng = path_rng(cfg.seed, tag, i);
        let mut s = PathState::new(k as f64);
        acc.n_paths += 1;
        match run_to_level(&dynamics, cfg, &mut s, 0.0, None, &mut rng) {
            Some(Crossing::Crossed(st)) => {
                acc.n_finite += 1;
                acc.hist[bin_of(st.x, cfg.n_bins)] += 1;
            }
            Some(Crossing::Floor) => acc.n_infinite += 1,
            _ => acc.n_censored += 1,
        }
    }
    Ok(acc)
}

/// Exit law from boundary `k`: `P(ζ₀ < ∞)` and the law of `X_{ζ₀}`.
pub fn run_exit(k: usize, params: &ModelParams, cfg: &SimConfig) -> Result<ExitStats> {
    let acc = run_exit_range(k, params, cfg, 0..cfg.n_paths)?;
    Ok(ExitStats::from_accumulator(k, &acc))
}

/// Bin masses of the normalized exit density `J_k/⟨1,J_k⟩` on `n_bins`
/// equal bins.
pub fn exit_model_masses(sol: &RiccatiSolution, k: usize, n_bins: usize) -> Vec<f64> {
    let gl = GaussLegendre::new(12);
    let w = 1.0 / n_bins as f64;
    let raw: Vec<f64> = (0..n_bins)
        .map(|i| gl.integrate(i as f64 * w, (i + 1) as f64 * w, |x| sol.eval_j(x)[k]))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// L¹ distance between two bin-mass vectors.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| abs(x - y)).sum()
}

/// Normalized bin masses of a histogram.
pub fn normalize_counts(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
}

// ---------------------------------------------------------------- Φ drift

/// `Φ_T/T` over paths `range`, `T = t_max`, steps of `max_step`.
pub fn phi_slope_range(params: &ModelParams, cfg: &SimConfig, x0: f64, range: Range<usize>) -> Result<MeanAccumulator> {
    cfg.validate()?;
    let dynamics = Dynamics::new(params.mu, params.sigma)?;
    check_start(x0)?;
    let mut acc = MeanAccumulator::default();
    let steps = libm::ceil(cfg.t_max / cfg.max_step) as usize;
    let h = cfg.t_max / steps as f64;
    for i in range {
        let mut rng = path_rng(cfg.seed, Stream::Slope, i);
        let mut s = PathState::new(x0);
        for _ in 0..steps {
            s = exact_step(&dynamics, &s, h, &mut rng);
        }
        acc.push(s.phi / s.clock);
    }
    Ok(acc)
}

/// Long-run slope of `Φ`, estimated by `Φ_T/T` at `T = t_max`.
pub fn phi_slope(params: &ModelParams, cfg: &SimConfig, x0: f64) -> Result<Estimate> {
    Ok(phi_slope_range(params, cfg, x0, 0..cfg.n_paths)?.estimate())
}

/// The almost-sure limit `1 − μ coth μ/σ` of `Φ_t/t`.
pub fn phi_slope_limit(mu: f64, sigma: f64) -> f64 {
    1.0 - crate::riccati::mu_coth_mu(mu) / sigma
}

fn check_start(x0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(domain!("start point {x0} outside [0,1]"));
    }
    Ok(())
}

// ---------------------------------------------------------------- Y_T

/// Outcome of sampling `Y_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YSample {
    Alive(f64),
    /// Sent to the graveyard: `ζ_T = ∞`.
    Graveyard,
    Censored,
}

/// One draw of `Y_T = X(ζ_T)` started at `x0`.
pub fn sample_y(dynamics: &Dynamics, cfg: &SimConfig, x0: f64, t: f64, rng: &mut ChaCha8Rng) -> YSample {
    if t <= 0.0 && x0 > 0.0 && x0 < 1.0 {
        // no local time accrues before the first exit from the interior
        return YSample::Alive(x0);
    }
    let mut s = PathState::new(x0);
    match run_to_level(dynamics, cfg, &mut s, t, None, rng) {
        Some(Crossing::Crossed(st)) => YSample::Alive(st.x),
        Some(Crossing::Floor) => YSample::Graveyard,
        _ => YSample::Censored,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeynmanKac {
    /// Mean of `f(Y_T)·1{alive}` over classified paths.
    pub mean: MeanAccumulator,
    pub n_alive: u64,
    pub n_dead: u64,
    pub n_censored: u64,
}

impl FeynmanKac {
    pub fn merge(&mut self, o: &Self) {
        self.mean.merge(&o.mean);
        self.n_alive += o.n_alive;
        self.n_dead += o.n_dead;
        self.n_censored += o.n_censored;
    }

    pub fn survival(&self) -> f64 {
        self.n_alive as f64 / (self.n_alive + self.n_dead).max(1) as f64
    }
}

/// `E[f(Y_T), ζ_T < ∞ | X₀ = x0]` over paths `range`.
pub fn feynman_kac_range(
    params: &ModelParams,
    cfg: &SimConfig,
    x0: f64,
    t: f64,
    f: impl Fn(f64) -> f64,
    range: Range<usize>,
) -> Result<FeynmanKac> {
    cfg.validate()?;
    check_start(x0)?;
    if !(t >= 0.0) {
        return Err(domain!("time must be nonnegative"));
    }
    let dynamics = Dynamics::new(params.mu, params.sigma)?;
    let mut out = FeynmanKac::default();
    for i in range {
        let mut rng = path_rng(cfg.seed, Stream::SampleY, i);
        match sample_y(&dynamics, cfg, x0, t, &mut rng) {
            YSample::Alive(y) => {
                out.n_alive += 1;
                out.mean.push(f(y));
            }
            YSample::Graveyard => {
                out.n_dead += 1;
                out.mean.push(0.0);
            }
            YSample::Censored => out.n_censored += 1,
        }
    }
    Ok(out)
}

pub fn feynman_kac(params: &ModelParams, cfg: &SimConfig, x0: f64, t: f64, f: impl Fn(f64) -> f64) -> Result<FeynmanKac> {
    feynman_kac_range(params, cfg, x0, t, f, 0..cfg.n_paths)
}

/// Sample means of `u(T − Φ_{t∧ζ_T}, X_{t∧ζ_T})` at each checkpoint `t`
/// (ascending). Paths killed before a checkpoint contribute 0 there;
/// censored paths are skipped.
pub fn martingale_range(
    params: &ModelParams,
    cfg: &SimConfig,
    x0: f64,
    t: f64,
    checkpoints: &[f64],
    u: impl Fn(f64, f64) -> f64,
    range: Range<usize>,
) -> Result<Vec<MeanAccumulator>> {
    cfg.validate()?;
    check_start(x0)?;
    if checkpoints.windows(2).any(|w| !(w[0] < w[1])) || checkpoints.first().is_some_and(|&c| !(c > 0.0)) {
        return Err(domain!("checkpoints must be positive and increasing"));
    }
    let dynamics = Dynamics::new(params.mu, params.sigma)?;
    let mut acc = vec![MeanAccumulator::default(); checkpoints.len()];
    'paths: for i in range {
        let mut rng = path_rng(cfg.seed, Stream::Martingale, i);
        let mut s = PathState::new(x0);
        let mut values = Vec::with_capacity(checkpoints.len());
        let mut stopped: Option<f64> = None;
        for &cp in checkpoints {
            if stopped.is_none() {
                match run_to_level(&dynamics, cfg, &mut s, t, Some(cp), &mut rng) {
                    None => {}
                    Some(Crossing::Crossed(st)) => stopped = Some(u(0.0, st.x)),
                    Some(Crossing::Floor) => stopped = Some(0.0),
                    Some(Crossing::Censored) => continue 'paths,
                }
            }
            values.push(stopped.unwrap_or_else(|| u(t - s.phi, s.x)));
        }
        for (a, v) in acc.iter_mut().zip(values) {
            a.push(v);
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------- occupation

/// Occupation masses of `X` on `n_bins` bins, time-averaged over
/// `[burn_in, t_max]` on a grid of `max_step`, pooled over paths `range`
/// started at ½. Returned unnormalized (total time per bin).
pub fn occupation_range(params: &ModelParams, cfg: &SimConfig, burn_in: f64, range: Range<usize>) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(burn_in >= 0.0 && burn_in < cfg.t_max) {
        return Err(domain!("burn-in must lie in [0, t_max)"));
    }
    if !params.mu.is_finite() {
        return Err(domain!("drift must be finite"));
    }
    // the position process does not depend on σ
    let dynamics = Dynamics { mu: params.mu, sigma: 1.0 };
    let steps = libm::ceil(cfg.t_max / cfg.max_step) as usize;
    let h = cfg.t_max / steps as f64;
    let mut occ = vec![0.0; cfg.n_bins];
    for i in range {
        let mut rng = path_rng(cfg.seed, Stream::Occupation, i);
        let mut s = PathState::new(0.5);
        for _ in 0..steps {
            s = exact_step(&dynamics, &s, h, &mut rng);
            if s.clock > burn_in {
                occ[bin_of(s.x, cfg.n_bins)] += h;
            }
        }
    }
    Ok(occ)
}

/// Normalized occupation masses.
pub fn occupation_check(params: &ModelParams, cfg: &SimConfig, burn_in: f64) -> Result<Vec<f64>> {
    let occ = occupation_range(params, cfg, burn_in, 0..cfg.n_paths)?;
    let total: f64 = occ.iter().sum();
    Ok(occ.iter().map(|v| v / total).collect())
}

/// Bin masses of the stationary law `ν(dy) ∝ e^{2μy} dy`.
pub fn stationary_masses(mu: f64, n_bins: usize) -> Vec<f64> {
    let cdf = |y: f64| {
        if abs(mu) < 1e-12 {
            y
        } else {
            expm1(2.0 * mu * y) / expm1(2.0 * mu)
        }
    };
    (0..n_bins)
        .map(|i| cdf((i + 1) as f64 / n_bins as f64) - cdf(i as f64 / n_bins as f64))
        .collect()
}

/// Density of the stationary law at `y`.
pub fn stationary_density(mu: f64, y: f64) -> f64 {
    if abs(mu) < 1e-12 {
        1.0
    } else {
        2.0 * mu * exp(2.0 * mu * y) / expm1(2.0 * mu)
    }
}
