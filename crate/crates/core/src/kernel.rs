//! Periodized Gauss kernel, absorbed fundamental solution and boundary
//! hitting densities on [0, 1].

use crate::error::{domain, Error, Result};
use crate::math::{abs, cos, exp, normal_interval, sin, sq, sqrt, FRAC_1_SQRT_2PI, PI};
use crate::quad;

/// Terms whose Gaussian exponent exceeds the leading one by more than this
/// are dropped (relative size below e^{-60}).
const EXP_CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Order {
    Value,
    DDx,
    DDt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelConfig {
    pub spatial_terms: usize,
    pub spectral_terms: usize,
    pub t_switch: f64,
    pub tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            spatial_terms: 8,
            spectral_terms: 64,
            t_switch: 0.25,
            tol: 1e-12,
        }
    }
}

impl KernelConfig {
    /// Truncation error bounds `(image, spectral)` at `t_switch`, from the
    /// first omitted term of each series (all three orders).
    pub fn truncation_bounds(&self) -> (f64, f64) {
        let t = self.t_switch;
        let y = 2.0 * self.spatial_terms as f64 + 1.0;
        let g = gauss_unchecked(t, y);
        let image = 2.0 * g * (1.0f64).max(y / t).max(0.5 * abs(y * y / (t * t) - 1.0 / t));
        let n = (self.spectral_terms + 1) as f64;
        let e = exp(-sq(n * PI) * t / 2.0);
        // geometric tail factor is < 2 once the decay ratio is below 1/2
        let spectral = 2.0 * e * (1.0f64).max(n * PI).max(0.5 * sq(n * PI));
        (image, spectral)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_switch > 0.0 && self.t_switch.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "t_switch must be positive, got {}",
                self.t_switch
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.spatial_terms == 0 || self.spectral_terms == 0 {
            return Err(Error::InvalidConfig("series lengths must be positive".into()));
        }
        let (image, spectral) = self.truncation_bounds();
        if image > self.tol || spectral > self.tol {
            return Err(Error::InvalidConfig(alloc::format!(
                "truncation bounds at t_switch (image {image:e}, spectral {spectral:e}) exceed tol {:e}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[inline]
fn gauss_unchecked(t: f64, x: f64) -> f64 {
    FRAC_1_SQRT_2PI / sqrt(t) * exp(-x * x / (2.0 * t))
}

/// Centered Gaussian density with variance `t`.
pub fn gauss(t: f64, x: f64) -> Result<f64> {
    check_t(t)?;
    Ok(gauss_unchecked(t, x))
}

#[inline]
fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain!("time must be positive and finite, got {t}"))
    }
}

/// Reduce `x` modulo 2 into [-1, 1].
#[inline]
fn reduce(x: f64) -> f64 {
    x - 2.0 * libm::round(x / 2.0)
}

/// Kernel evaluator for a fixed, validated [`KernelConfig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Kernel {
    cfg: KernelConfig,
    flip_q1: bool,
}

impl Kernel {
    pub fn new(cfg: KernelConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Kernel { cfg, flip_q1: false })
    }

    /// Deliberately wrong `q₁` (sign flipped), for mutation testing of the
    /// verification suite.
    #[doc(hidden)]
    pub fn with_q1_sign_flip(mut self) -> Self {
        self.flip_q1 = true;
        self
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    /// `G`, `G'` or `Ġ` from the image sum, regardless of `t_switch`.
    pub fn g_image(&self, t: f64, x: f64, order: Order) -> f64 {
        let x = reduce(x);
        let k_max = self.cfg.spatial_terms as i64;
        let inv2t = 0.5 / t;
        let lead = x * x * inv2t;
        let mut s = 0.0;
        for k in -k_max..=k_max {
            let y = x + 2.0 * k as f64;
            let e = y * y * inv2t;
            if e - lead > EXP_CUTOFF {
                continue;
            }
            let g = gauss_unchecked(t, y);
            s += match order {
                Order::Value => g,
                Order::DDx => -y / t * g,
                Order::DDt => 0.5 * (y * y / (t * t) - 1.0 / t) * g,
            };
        }
        s
    }

    /// `G`, `G'` or `Ġ` from the cosine series, regardless of `t_switch`.
    pub fn g_spectral(&self, t: f64, x: f64, order: Order) -> f64 {
        let mut s = match order {
            Order::Value => 0.5,
            _ => 0.0,
        };
        for n in 1..=self.cfg.spectral_terms {
            let k = n as f64 * PI;
            let a = 0.5 * k * k * t;
            if a > EXP_CUTOFF + 10.0 {
                break;
            }
            let e = exp(-a);
            s += match order {
                Order::Value => e * cos(k * x),
                Order::DDx => -k * e * sin(k * x),
                Order::DDt => -0.5 * k * k * e * cos(k * x),
            };
        }
        s
    }

    #[inline]
    fn g_raw(&self, t: f64, x: f64, order: Order) -> f64 {
        if t <= self.cfg.t_switch {
            self.g_image(t, x, order)
        } else {
            self.g_spectral(t, x, order)
        }
    }

    /// Periodized Gauss kernel `G(t, x) = Σ_k g(t, x + 2k)` or one of its
    /// first derivatives.
    pub fn periodized_g(&self, t: f64, x: f64, order: Order) -> Result<f64> {
        check_t(t)?;
        Ok(self.g_raw(t, x, order))
    }

    /// Density in `t` of hitting 0 before 1 from `x`.
    pub fn q0(&self, t: f64, x: f64, mu: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.q0_raw(t, x, mu))
    }

    /// Density in `t` of hitting 1 before 0 from `x`.
    pub fn q1(&self, t: f64, x: f64, mu: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.q1_raw(t, x, mu))
    }

    #[inline]
    pub(crate) fn q0_raw(&self, t: f64, x: f64, mu: f64) -> f64 {
        -exp(-mu * x - 0.5 * mu * mu * t) * self.g_raw(t, x, Order::DDx)
    }

    #[inline]
    pub(crate) fn q1_raw(&self, t: f64, x: f64, mu: f64) -> f64 {
        let q = -exp(mu * (1.0 - x) - 0.5 * mu * mu * t) * self.g_raw(t, 1.0 - x, Order::DDx);
        if self.flip_q1 {
            -q
        } else {
            q
        }
    }

    /// Fundamental solution of `u̇ = ½u″ + μu′` absorbed at {0, 1}.
    pub fn q0_absorbed(&self, t: f64, x: f64, y: f64, mu: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.q0_absorbed_raw(t, x, y, mu))
    }

    #[inline]
    pub(crate) fn q0_absorbed_raw(&self, t: f64, x: f64, y: f64, mu: f64) -> f64 {
        let d = self.g_raw(t, y - x, Order::Value) - self.g_raw(t, y + x, Order::Value);
        (exp(mu * (y - x) - 0.5 * mu * mu * t) * d).max(0.0)
    }

    /// `|∫Q⁰(t,x,y)dy + ∫₀ᵗq₀(τ,x)dτ + ∫₀ᵗq₁(τ,x)dτ − 1|`.
    pub fn mass_identity_residual(&self, t: f64, x: f64, mu: f64) -> Result<f64> {
        check_t(t)?;
        let (m, _) = self.mass_identity_parts(t, x, mu)?;
        Ok(abs(m - 1.0))
    }

    /// Returns the left-hand side of the mass identity along with the
    /// `(∫q₀, ∫q₁)` pair.
    pub fn mass_identity_parts(&self, t: f64, x: f64, mu: f64) -> Result<(f64, [f64; 2])> {
        check_t(t)?;
        let tol = 1e-12;
        // split the y-integral at x where the kernel peaks
        let mut interior = 0.0;
        for (a, b) in [(0.0, x), (x, 1.0)] {
            if b > a {
                interior += quad::adaptive1(|y| self.q0_absorbed_raw(t, x, y, mu), a, b, tol, tol)?;
            }
        }
        let q = quad::sqrt_substituted(
            |s| {
                if s <= 0.0 {
                    [0.0, 0.0]
                } else {
                    [self.q0_raw(s, x, mu), self.q1_raw(s, x, mu)]
                }
            },
            0.0,
            t,
            tol,
            tol,
        )?;
        Ok((interior + q[0] + q[1], q))
    }

    /// `∫₀¹ e^{νx} G(t, x − c) dx` in closed form.
    pub fn exp_moment(&self, t: f64, nu: f64, c: f64) -> f64 {
        let c = reduce(c);
        if t <= self.cfg.t_switch {
            let st = sqrt(t);
            let k_max = self.cfg.spatial_terms as i64;
            let mut s = 0.0;
            for k in -k_max..=k_max {
                let m = c - 2.0 * k as f64;
                let centre = m + nu * t;
                let dist = if centre < 0.0 {
                    -centre
                } else if centre > 1.0 {
                    centre - 1.0
                } else {
                    0.0
                };
                let pre = nu * m + 0.5 * nu * nu * t;
                if dist * dist / (2.0 * t) - pre > EXP_CUTOFF + 10.0 {
                    continue;
                }
                s += exp(pre) * normal_interval(-centre / st, (1.0 - centre) / st);
            }
            s
        } else {
            let mut s = if abs(nu) < 1e-12 {
                0.5
            } else {
                crate::math::expm1(nu) / (2.0 * nu)
            };
            let enu = exp(nu);
            for n in 1..=self.cfg.spectral_terms {
                let k = n as f64 * PI;
                let a = 0.5 * k * k * t;
                if a > EXP_CUTOFF + 10.0 {
                    break;
                }
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let th = k * c;
                s += exp(-a) * (enu * sign - 1.0) * (nu * cos(th) - k * sin(th)) / (nu * nu + k * k);
            }
            s
        }
    }

    /// `∫₀¹ x G(t, x − c) dx` in closed form.
    pub fn lin_moment(&self, t: f64, c: f64) -> f64 {
        let c = reduce(c);
        if t <= self.cfg.t_switch {
            let st = sqrt(t);
            let k_max = self.cfg.spatial_terms as i64;
            let mut s = 0.0;
            for k in -k_max..=k_max {
                let m = c - 2.0 * k as f64;
                let dist = if m < 0.0 {
                    -m
                } else if m > 1.0 {
                    m - 1.0
                } else {
                    0.0
                };
                if dist * dist / (2.0 * t) > EXP_CUTOFF + 10.0 {
                    continue;
                }
                s += m * normal_interval(-m / st, (1.0 - m) / st)
                    + t * (gauss_unchecked(t, m) - gauss_unchecked(t, 1.0 - m));
            }
            s
        } else {
            let mut s = 0.25;
            for n in 1..=self.cfg.spectral_terms {
                let k = n as f64 * PI;
                let a = 0.5 * k * k * t;
                if a > EXP_CUTOFF + 10.0 {
                    break;
                }
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let th = k * c;
                s += exp(-a) * ((sign - 1.0) * cos(th) / (k * k) - sign * sin(th) / k);
            }
            s
        }
    }

    /// Largest observed ratio `q₀(t,x) / ((x/t) g(t∧1, x))` on a scan of
    /// `n × n` log-spaced times in [1e-4, 20] and interior points.
    pub fn q0_envelope_constant(&self, mu: f64, n: usize) -> f64 {
        let mut c = 0.0f64;
        for i in 0..n {
            let t = 1e-4 * libm::pow(2e5, i as f64 / (n - 1) as f64);
            for j in 1..=n {
                let x = j as f64 / (n + 1) as f64;
                let env = x / t * gauss_unchecked(t.min(1.0), x);
                if env > 0.0 {
                    c = c.max(self.q0_raw(t, x, mu) / env);
                }
            }
        }
        c
    }
}
