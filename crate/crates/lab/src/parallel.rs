//! Monte Carlo runs split into fixed-size path chunks that rayon executes
//! in parallel. Chunks are merged in index order, so results are
//! bit-identical for any thread count.

use std::ops::Range;

use rayon::prelude::*;
use wentzell_core::mc::{self, Estimate, ExitAccumulator, ExitStats, FeynmanKac, MeanAccumulator, SimConfig};
use wentzell_core::riccati::ModelParams;

use crate::error::Result;

/// Paths per chunk. Part of the reproducibility contract: changing it
/// changes the floating-point summation order of mean estimates.
pub const CHUNK: usize = 4096;

fn chunks(n: usize) -> Vec<Range<usize>> {
    (0..n).step_by(CHUNK).map(|a| a..(a + CHUNK).min(n)).collect()
}

fn run_chunks<T: Send>(n: usize, job: impl Fn(Range<usize>) -> wentzell_core::error::Result<T> + Sync) -> Result<Vec<T>> {
    let parts: Vec<_> = chunks(n).into_par_iter().map(&job).collect();
    Ok(parts.into_iter().collect::<wentzell_core::error::Result<Vec<T>>>()?)
}

pub fn exit_stats(k: usize, params: &ModelParams, cfg: &SimConfig) -> Result<ExitStats> {
    let parts = run_chunks(cfg.n_paths, |r| mc::run_exit_range(k, params, cfg, r))?;
    let mut acc = ExitAccumulator::new(cfg.n_bins);
    for p in &parts {
        acc.merge(p);
    }
    Ok(ExitStats::from_accumulator(k, &acc))
}

/// `Φ_T/T` over `n_paths` paths of length `t_max` from `x0`.
pub fn phi_slope(params: &ModelParams, cfg: &SimConfig, x0: f64) -> Result<Estimate> {
    let parts = run_chunks(cfg.n_paths, |r| mc::phi_slope_range(params, cfg, x0, r))?;
    let mut acc = MeanAccumulator::default();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.estimate())
}

pub fn feynman_kac(params: &ModelParams, cfg: &SimConfig, x0: f64, t: f64, f: impl Fn(f64) -> f64 + Sync) -> Result<FeynmanKac> {
    let parts = run_chunks(cfg.n_paths, |r| mc::feynman_kac_range(params, cfg, x0, t, &f, r))?;
    let mut out = FeynmanKac::default();
    for p in &parts {
        out.merge(p);
    }
    Ok(out)
}
