//! Crank–Nicolson oracle discretizing the boundary-value problem directly:
//! centered differences for `½u″ + μu′` inside, and the boundary ODEs
//! `u̇(t, 0) = −σu′(t, 0)`, `u̇(t, 1) = σu′(t, 1)` with second-order
//! one-sided derivatives.

use alloc::vec;
use alloc::vec::Vec;

use super::{BoundaryFunction, SpaceTimeField};
use crate::error::{domain, Error, Result};
use crate::math::abs;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FdConfig {
    pub t_end: f64,
    pub n_space: usize,
    pub dt: f64,
    pub output_stride: usize,
    /// Implicit-Euler half steps taken before switching to Crank–Nicolson,
    /// damping the oscillations rough data would otherwise excite.
    pub startup_half_steps: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            t_end: 1.0,
            n_space: 200,
            dt: 1e-3,
            output_stride: 10,
            startup_half_steps: 4,
        }
    }
}

/// Rows of `L` as `(lower, diag, upper)` plus the extra entries of the two
/// boundary rows (`u₂` in row 0, `u_{n−2}` in row n).
struct Operator {
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
    extra0: f64,
    extra_n: f64,
}

fn operator(mu: f64, sigma: f64, n: usize) -> Operator {
    let h = 1.0 / n as f64;
    let mut lo = vec![0.0; n + 1];
    let mut di = vec![0.0; n + 1];
    let mut up = vec![0.0; n + 1];
    let d2 = 0.5 / (h * h);
    let d1 = mu / (2.0 * h);
    for i in 1..n {
        lo[i] = d2 - d1;
        di[i] = -2.0 * d2;
        up[i] = d2 + d1;
    }
    let s = sigma / (2.0 * h);
    // u̇₀ = −σ(−3u₀ + 4u₁ − u₂)/(2h)
    di[0] = 3.0 * s;
    up[0] = -4.0 * s;
    let extra0 = s;
    // u̇ₙ = σ(3uₙ − 4uₙ₋₁ + uₙ₋₂)/(2h)
    di[n] = 3.0 * s;
    lo[n] = -4.0 * s;
    let extra_n = s;
    Operator {
        lo,
        di,
        up,
        extra0,
        extra_n,
    }
}

/// `y = L u`.
fn apply(op: &Operator, u: &[f64]) -> Vec<f64> {
    let n = u.len() - 1;
    let mut y = vec![0.0; n + 1];
    y[0] = op.di[0] * u[0] + op.up[0] * u[1] + op.extra0 * u[2];
    for i in 1..n {
        y[i] = op.lo[i] * u[i - 1] + op.di[i] * u[i] + op.up[i] * u[i + 1];
    }
    y[n] = op.extra_n * u[n - 2] + op.lo[n] * u[n - 1] + op.di[n] * u[n];
    y
}

/// Factored `(I − θΔt L)` reduced to tridiagonal form.
struct Stepper {
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
    /// Row-combination factors used to clear the two extra entries.
    k0: f64,
    kn: f64,
}

impl Stepper {
    fn new(op: &Operator, theta_dt: f64) -> Result<Self> {
        let n = op.di.len() - 1;
        let mut lo: Vec<f64> = op.lo.iter().map(|v| -theta_dt * v).collect();
        let mut di: Vec<f64> = op.di.iter().map(|v| 1.0 - theta_dt * v).collect();
        let mut up: Vec<f64> = op.up.iter().map(|v| -theta_dt * v).collect();
        let e0 = -theta_dt * op.extra0;
        let en = -theta_dt * op.extra_n;
        // row 0 −= k0 · row 1 removes column 2; row n −= kn · row n−1 removes n−2
        let k0 = if e0 == 0.0 { 0.0 } else { e0 / up[1] };
        di[0] -= k0 * lo[1];
        up[0] -= k0 * di[1];
        let kn = if en == 0.0 { 0.0 } else { en / lo[n - 1] };
        di[n] -= kn * up[n - 1];
        lo[n] -= kn * di[n - 1];
        if !k0.is_finite() || !kn.is_finite() {
            return Err(Error::Numerical("boundary-row elimination failed".into()));
        }
        Ok(Stepper { lo, di, up, k0, kn })
    }

    fn solve(&self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = rhs.len() - 1;
        rhs[0] -= self.k0 * rhs[1];
        rhs[n] -= self.kn * rhs[n - 1];
        // Thomas algorithm
        let mut c = vec![0.0; n + 1];
        let mut d = vec![0.0; n + 1];
        let mut piv = self.di[0];
        if abs(piv) < 1e-300 {
            return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
        }
        c[0] = self.up[0] / piv;
        d[0] = rhs[0] / piv;
        for i in 1..=n {
            piv = self.di[i] - self.lo[i] * c[i - 1];
            if abs(piv) < 1e-300 || !piv.is_finite() {
                return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
            }
            c[i] = if i < n { self.up[i] / piv } else { 0.0 };
            d[i] = (rhs[i] - self.lo[i] * d[i - 1]) / piv;
        }
        for i in (0..n).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Solve `u̇ = ½u″ + μu′` with the boundary ODEs on nodes `i/n` up to `T`.
/// Any real `σ` is accepted.
pub fn fd_solve(f: &BoundaryFunction, mu: f64, sigma: f64, cfg: &FdConfig) -> Result<SpaceTimeField> {
    let n = cfg.n_space;
    if n < 4 {
        return Err(Error::InvalidConfig("n_space must be at least 4".into()));
    }
    if !(cfg.dt > 0.0) || !(cfg.t_end > 0.0) || cfg.output_stride == 0 {
        return Err(Error::InvalidConfig("dt, T and output_stride must be positive".into()));
    }
    if !mu.is_finite() || !sigma.is_finite() {
        return Err(domain!("parameters must be finite"));
    }
    let steps = libm::round(cfg.t_end / cfg.dt).max(1.0) as usize;
    let dt = cfg.t_end / steps as f64;
    let h = 1.0 / n as f64;
    // The one-sided boundary rows can carry eigenvalues of size |σ|/h; an
    // explicit half of Crank–Nicolson stays bounded only if dt·|σ|/h is
    // moderate.
    if abs(sigma) * dt / h > 50.0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "dt = {dt} too large for sigma = {sigma} on n_space = {n} (need dt·|σ|·n ≤ 50)"
        )));
    }
    let op = operator(mu, sigma, n);
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut u: Vec<f64> = nodes.iter().map(|&x| f.eval(x)).collect();

    // an implicit-Euler half step and the implicit half of Crank–Nicolson
    // share the matrix I − (Δt/2)L
    let stepper = Stepper::new(&op, 0.5 * dt)?;
    let startup = cfg.startup_half_steps.min(2 * steps) & !1;

    let mut times = vec![0.0];
    let mut values = vec![u.clone()];
    let mut half = 0;
    for step in 1..=steps {
        if half < startup {
            // two implicit-Euler half steps make one full step
            for _ in 0..2 {
                u = stepper.solve(u)?;
                half += 1;
            }
        } else {
            let lu = apply(&op, &u);
            let rhs: Vec<f64> = u.iter().zip(&lu).map(|(a, b)| a + 0.5 * dt * b).collect();
            u = stepper.solve(rhs)?;
        }
        if !u.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(alloc::format!("non-finite values at step {step}")));
        }
        if step % cfg.output_stride == 0 || step == steps {
            times.push(step as f64 * dt);
            values.push(u.clone());
        }
    }
    let tr0 = values.iter().map(|r| r[0]).collect();
    let tr1 = values.iter().map(|r| r[n]).collect();
    Ok(SpaceTimeField {
        times,
        nodes,
        values,
        boundary_traces: [tr0, tr1],
    })
}
