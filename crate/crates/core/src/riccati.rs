//! Characteristic equations, the boundary density `J`, the matrix
//! `B = B(J)` and its spectrum.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::math::{abs, cosh_ratio_w, exp, sinh_ratio, sqrt, x_coth_x, x_over_sinh};
use crate::quad::GaussLegendre;

/// Tolerance on `σ − μ coth μ` for declaring the critical regime.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub mu: f64,
    pub sigma: f64,
    pub regime: Regime,
}

impl ModelParams {
    /// Parameters with the regime derived from `σ` versus `μ coth μ`.
    /// Any finite `σ` is accepted; the Riccati layer itself requires `σ > 0`.
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(domain!("parameters must be finite (mu={mu}, sigma={sigma})"));
        }
        let d = sigma - mu_coth_mu(mu);
        let regime = if abs(d) <= CRITICAL_TOL {
            Regime::Critical
        } else if d > 0.0 {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        };
        Ok(ModelParams { mu, sigma, regime })
    }

    /// Override the derived regime, for studies at the regime boundary.
    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    /// Parameters of the mirrored problem `x ↦ 1 − x`.
    pub fn mirrored(&self) -> Self {
        ModelParams {
            mu: -self.mu,
            ..*self
        }
    }
}

/// `μ coth μ`, equal to 1 at `μ = 0`.
pub fn mu_coth_mu(mu: f64) -> f64 {
    let m = abs(mu);
    if m < 1e-4 {
        let m2 = m * m;
        1.0 + m2 / 3.0 - m2 * m2 / 45.0
    } else {
        x_coth_x(m)
    }
}

#[inline]
fn radical(mu: f64, omega: f64) -> f64 {
    let a = x_over_sinh(omega);
    sqrt(mu * mu + a * a)
}

/// Residual of the "minus" characteristic equation, scaled by `2σ`.
pub fn char_g1(omega: f64, p: &ModelParams) -> f64 {
    let (mu, s) = (p.mu, p.sigma);
    omega * omega - 2.0 * s * x_coth_x(omega) - 2.0 * s * radical(mu, omega) - mu * mu
}

/// Residual of the "plus" characteristic equation, scaled by `2σ`.
pub fn char_g0(omega: f64, p: &ModelParams) -> f64 {
    let (mu, s) = (p.mu, p.sigma);
    omega * omega - 2.0 * s * x_coth_x(omega) + 2.0 * s * radical(mu, omega) - mu * mu
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // invariant: f(lo) < 0 <= f(hi)
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * abs(hi) || mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots `(ω₀, ω₁)` of the characteristic equations.
pub fn solve_omegas(p: &ModelParams) -> Result<(f64, f64)> {
    if !(p.sigma > 0.0) {
        return Err(domain!("the Riccati system requires sigma > 0, got {}", p.sigma));
    }
    let m = abs(p.mu);
    let g1 = |w: f64| char_g1(w, p);
    let mut hi = m.max(2.0 * p.sigma) + 1.0;
    let mut doublings = 0;
    while g1(hi) <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 || !hi.is_finite() {
            return Err(Error::NoSignChange {
                what: "g1 bracket",
                trace: alloc::vec![(hi, g1(hi))],
            });
        }
    }
    let lo = if g1(m) < 0.0 { m } else { 0.0 };
    let omega1 = bisect(g1, lo, hi);

    let omega0 = if p.regime == Regime::Supercritical {
        let g0 = |w: f64| char_g0(w, p);
        let eps = 1e-8 * (1.0 + m);
        let a = m + eps;
        if g0(a) < 0.0 && g0(omega1) > 0.0 {
            bisect(g0, a, omega1)
        } else {
            // fall back to a scan for the last sign change in (|μ|, ω₁)
            let n = 4000;
            let mut trace = Vec::with_capacity(n + 1);
            let mut bracket = None;
            let mut prev = (a, g0(a));
            trace.push(prev);
            for i in 1..=n {
                let w = a + (omega1 - a) * i as f64 / n as f64;
                let v = g0(w);
                trace.push((w, v));
                if prev.1 < 0.0 && v >= 0.0 {
                    bracket = Some((prev.0, w));
                }
                prev = (w, v);
            }
            match bracket {
                Some((l, h)) => bisect(g0, l, h),
                None => {
                    return Err(Error::NoSignChange {
                        what: "g0 root in (|mu|, omega1)",
                        trace,
                    })
                }
            }
        }
    } else {
        m
    };
    Ok((omega0, omega1))
}

/// `w₁/w₀` of the left eigenrow at `ω`; `plus` selects the `+` branch.
pub fn eigenrow_ratio(mu: f64, omega: f64, plus: bool) -> f64 {
    let a = x_over_sinh(omega);
    let r = sqrt(mu * mu + a * a);
    let em = exp(mu);
    // rationalize whichever combination cancels
    match (plus, mu >= 0.0) {
        (true, true) => em * (r + mu) / a,
        (true, false) => em * a / (r - mu),
        (false, true) => -em * a / (r + mu),
        (false, false) => em * (mu - r) / a,
    }
}

/// `w₀/w₁` from the reciprocal form, used only as a consistency check.
pub fn eigenrow_ratio_reciprocal(mu: f64, omega: f64, plus: bool) -> f64 {
    let a = x_over_sinh(omega);
    let r = sqrt(mu * mu + a * a);
    let s = if plus { r } else { -r };
    (s - mu) * exp(-mu) / a
}

/// Left eigenrows with unit first component.
pub fn left_eigenrows(p: &ModelParams, omega0: f64, omega1: f64) -> Result<Mat2> {
    let r0 = eigenrow_ratio(p.mu, omega0, true);
    let r1 = eigenrow_ratio(p.mu, omega1, false);
    let w = Mat2::new(1.0, r0, 1.0, r1);
    let scale = w.norm_max();
    if !(abs(w.det()) > 1e-10 * scale * scale) {
        return Err(Error::IllConditioned {
            what: "eigenrow matrix W",
            condition: w.cond(),
        });
    }
    Ok(w)
}

/// `B(J)` from the boundary derivatives `J′(0)` and `J′(1)`.
pub fn b_of_j(p: &ModelParams, jprime0: Vec2, jprime1: Vec2) -> Mat2 {
    let ms = 2.0 * p.mu * p.sigma;
    Mat2::new(
        -ms + 0.5 * jprime0[0],
        -0.5 * jprime1[0],
        0.5 * jprime0[1],
        ms - 0.5 * jprime1[1],
    )
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiccatiSolution {
    pub params: ModelParams,
    pub omega0: f64,
    pub omega1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "W"))]
    pub w: Mat2,
    #[cfg_attr(feature = "serde", serde(rename = "B"))]
    pub b: Mat2,
    pub lambda0: f64,
    pub lambda1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "V0"))]
    pub v0: Vec2,
    #[cfg_attr(feature = "serde", serde(rename = "V1"))]
    pub v1: Vec2,
    pub masses: Vec2,
    #[cfg_attr(feature = "serde", serde(rename = "mJ"))]
    pub m_j: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    winv: Mat2,
}

impl RiccatiSolution {
    pub fn solve(p: ModelParams) -> Result<Self> {
        let (omega0, omega1) = solve_omegas(&p)?;
        let w = left_eigenrows(&p, omega0, omega1)?;
        let winv = w.inverse().ok_or(Error::IllConditioned {
            what: "eigenrow matrix W",
            condition: f64::INFINITY,
        })?;
        let mu2 = p.mu * p.mu;
        let lambda0 = 0.5 * (mu2 - omega0 * omega0);
        let lambda1 = 0.5 * (mu2 - omega1 * omega1);
        let b = winv * Mat2::diag(lambda0, lambda1) * w;
        let (r0, r1) = (w.0[0][1], w.0[1][1]);
        let v0 = Vec2::new(-r1, 1.0).scale(1.0 / (1.0 - r1));
        let v1 = Vec2::new(r0, -1.0).scale(1.0 / (r0 + 1.0));
        let mut sol = RiccatiSolution {
            params: p,
            omega0,
            omega1,
            w,
            b,
            lambda0,
            lambda1,
            v0,
            v1,
            masses: Vec2::ZERO,
            m_j: 0.0,
            winv,
        };
        sol.masses = sol.integrate(|_| 1.0);
        sol.m_j = sol.masses[0].max(sol.masses[1]);
        Ok(sol)
    }

    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        Self::solve(ModelParams::new(mu, sigma)?)
    }

    #[inline]
    fn omegas(&self) -> [f64; 2] {
        [self.omega0, self.omega1]
    }

    /// `J(x)` together with its first two derivatives.
    pub fn eval_j_derivs(&self, x: f64) -> [Vec2; 3] {
        let mu = self.params.mu;
        let em = exp(-mu);
        let mut b = Vec2::ZERO;
        let mut db = Vec2::ZERO;
        let mut d2b = Vec2::ZERO;
        for (k, &om) in self.omegas().iter().enumerate() {
            let (wk0, wk1) = (self.w.0[k][0], self.w.0[k][1]);
            let f = sinh_ratio(1.0 - x, om);
            let s = sinh_ratio(x, om);
            let fp = -cosh_ratio_w(1.0 - x, om);
            let sp = cosh_ratio_w(x, om);
            b[k] = f * wk0 + em * s * wk1;
            db[k] = fp * wk0 + em * sp * wk1;
            d2b[k] = om * om * b[k];
        }
        let pre = 2.0 * self.params.sigma * exp(mu * x);
        let j = (self.winv * b).scale(pre);
        let jp = (self.winv * (mu * b + db)).scale(pre);
        let jpp = (self.winv * (mu * mu * b + (2.0 * mu) * db + d2b)).scale(pre);
        [j, jp, jpp]
    }

    /// The vector density `J(x) = (J₀(x), J₁(x))`.
    pub fn eval_j(&self, x: f64) -> Vec2 {
        self.eval_j_derivs(x)[0]
    }

    /// `(⟨φ, J₀⟩, ⟨φ, J₁⟩)` by composite Gauss–Legendre quadrature.
    pub fn integrate(&self, mut phi: impl FnMut(f64) -> f64) -> Vec2 {
        let panels = 4 + (self.omega1.max(1.0) * 2.0) as usize;
        let gl = GaussLegendre::new(16);
        let h = 1.0 / panels as f64;
        let mut acc = Vec2::ZERO;
        for p in 0..panels {
            let c = (p as f64 + 0.5) * h;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let y = c + 0.5 * h * x;
                acc += self.eval_j(y).scale(0.5 * h * w * phi(y));
            }
        }
        acc
    }

    /// `(⟨1,J₀⟩, ⟨1,J₁⟩)`.
    pub fn masses(&self) -> Vec2 {
        self.masses
    }

    /// `B(J)` evaluated from the analytic boundary derivatives of `J`.
    pub fn b_from_j(&self) -> Mat2 {
        let d0 = self.eval_j_derivs(0.0)[1];
        let d1 = self.eval_j_derivs(1.0)[1];
        b_of_j(&self.params, d0, d1)
    }

    /// Sup-norm over a uniform grid of `½J″ − μJ′ + BJ`.
    pub fn ode_residual(&self, n: usize) -> f64 {
        let mu = self.params.mu;
        (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                let [j, jp, jpp] = self.eval_j_derivs(x);
                (0.5 * jpp - mu * jp + self.b * j).norm_inf()
            })
            .fold(0.0, f64::max)
    }

    /// Right eigenvector matrix `(V₀ | V₁)`.
    pub fn v_matrix(&self) -> Mat2 {
        Mat2::from_cols(self.v0, self.v1)
    }

    pub fn w_inverse(&self) -> Mat2 {
        self.winv
    }
}
