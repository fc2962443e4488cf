//! Closed-form pairings of the kernels with the weights `w₀, w₁`.

use crate::kernel::{Kernel, Order};
use crate::linalg::{Mat2, Vec2};
use crate::math::{abs, exp, expm1, mu_over_expm1_2mu, sinh_over_x};

/// `(w₀(x), w₁(x))`, with `w₁ = (e^{2μx} − 1)/(e^{2μ} − 1)` and `w₀ = 1 − w₁`.
pub fn hat_weights(mu: f64, x: f64) -> (f64, f64) {
    let w1 = if abs(mu) < 1e-6 {
        // second-order series about μ = 0
        x + mu * x * (x - 1.0)
    } else {
        expm1(2.0 * mu * x) / expm1(2.0 * mu)
    };
    (1.0 - w1, w1)
}

/// Below this |μ| the odd combination of exponential moments is replaced by
/// its linear-moment limit.
const ODD_MOMENT_SWITCH: f64 = 1e-5;

#[derive(Debug, Clone, Copy)]
pub struct HatKernel {
    pub kernel: Kernel,
    pub mu: f64,
}

impl HatKernel {
    pub fn new(kernel: Kernel, mu: f64) -> Self {
        HatKernel { kernel, mu }
    }

    /// `E_ν(s) = ∫₀¹ e^{νx} G(s, x) dx`.
    #[inline]
    fn e(&self, s: f64, nu: f64) -> f64 {
        self.kernel.exp_moment(s, nu, 0.0)
    }

    /// `q̂(s)`: entry `(j, k)` is `⟨q_k(s, ·), w_j⟩`.
    pub fn q_hat(&self, s: f64) -> Mat2 {
        let mu = self.mu;
        let damp = exp(-0.5 * mu * mu * s);
        let g0 = self.kernel.periodized_g(s, 0.0, Order::Value).unwrap_or(0.0);
        let g1 = self.kernel.periodized_g(s, 1.0, Order::Value).unwrap_or(0.0);
        let (ep, em) = if mu == 0.0 {
            let e0 = self.e(s, 0.0);
            (e0, e0)
        } else {
            (self.e(s, mu), self.e(s, -mu))
        };
        let r = mu_over_expm1_2mu(mu);
        let e2 = exp(2.0 * mu);
        // I_ν = e^ν G(1) − G(0) − ν E_ν
        let i_plus = exp(mu) * g1 - g0 - mu * ep;
        let i_minus = exp(-mu) * g1 - g0 + mu * em;
        let q10 = -damp * r * (2.0 * sinh_over_x(mu) * g1 - (ep + em));
        let q00 = -damp * i_minus - q10;
        let q11 = -damp * (-g0 + r * (e2 * em + ep));
        let q01 = -damp * i_plus - q11;
        Mat2::new(q00, q01, q10, q11)
    }

    /// `(q₀(s, x), q₁(s, x))`.
    #[inline]
    pub fn q_row(&self, s: f64, x: f64) -> Vec2 {
        Vec2::new(
            self.kernel.q0(s, x, self.mu).unwrap_or(0.0),
            self.kernel.q1(s, x, self.mu).unwrap_or(0.0),
        )
    }

    /// `Q̂⁰(t, y) = (⟨Q⁰(t,·,y), w₀⟩, ⟨Q⁰(t,·,y), w₁⟩)`.
    pub fn q0_hat(&self, t: f64, y: f64) -> Vec2 {
        let mu = self.mu;
        let k = &self.kernel;
        let pre = exp(mu * y - 0.5 * mu * mu * t);
        // ⟨Q⁰, e^{νx}e^{−μx}⟩ differences: D(ν) = M(ν, y) − M(ν, −y)
        let d = |nu: f64| k.exp_moment(t, nu, y) - k.exp_moment(t, nu, -y);
        let total = d(-mu);
        // (D(μ) − D(−μ)) / (e^{2μ} − 1)
        let odd = if abs(mu) < ODD_MOMENT_SWITCH {
            2.0 * mu_over_expm1_2mu(mu) * (k.lin_moment(t, y) - k.lin_moment(t, -y))
        } else {
            (d(mu) - total) / expm1(2.0 * mu)
        };
        let w1 = pre * odd;
        Vec2::new(pre * total - w1, w1)
    }

    /// `∂ₜQ̂⁰(t, y) = e^{−μ²t/2} (e^{μy} G′(t, y), e^{μ(y−1)} G′(t, 1 − y))`.
    pub fn q0_hat_dot(&self, t: f64, y: f64) -> Vec2 {
        let mu = self.mu;
        let damp = exp(-0.5 * mu * mu * t);
        let k = &self.kernel;
        let gp = |z: f64| k.periodized_g(t, z, Order::DDx).unwrap_or(0.0);
        Vec2::new(
            damp * exp(mu * y) * gp(y),
            damp * exp(mu * (y - 1.0)) * gp(1.0 - y),
        )
    }

    /// The same expression without the `e^{−μ²t/2}` factor.
    pub fn q0_hat_dot_undamped(&self, t: f64, y: f64) -> Vec2 {
        self.q0_hat_dot(t, y).scale(exp(0.5 * self.mu * self.mu * t))
    }
}
