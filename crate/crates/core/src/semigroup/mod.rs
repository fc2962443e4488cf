//! The semigroup `Q_t f = u_f(t, ·)`: boundary-hat Volterra system,
//! reconstruction of the field, Picard validation and a finite-difference
//! oracle.

mod fd;
mod hats;
mod volterra;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use fd::{fd_solve, FdConfig};
pub use hats::{hat_weights, HatKernel};
pub use volterra::{MarchOutput, PicardOutput, Semigroup};

use crate::error::{domain, Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::math::{abs, exp, mu_over_expm1_2mu};
use crate::quad::CompositeRule;

/// Gauss–Legendre points per grid cell in the fixed spatial rule.
pub const NODES_PER_CELL: usize = 4;

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Interior {
    Grid(Vec<f64>),
    Closed(Profile),
}

/// An element of `F`: an interior profile on (0, 1) and two free boundary
/// values.
#[derive(Clone)]
pub struct BoundaryFunction {
    interior: Interior,
    pub f0: f64,
    pub f1: f64,
}

impl core::fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let kind = match &self.interior {
            Interior::Grid(v) => alloc::format!("grid[{}]", v.len()),
            Interior::Closed(_) => "closed-form".into(),
        };
        f.debug_struct("BoundaryFunction")
            .field("interior", &kind)
            .field("f0", &self.f0)
            .field("f1", &self.f1)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn closed(profile: impl Fn(f64) -> f64 + Send + Sync + 'static, f0: f64, f1: f64) -> Self {
        BoundaryFunction {
            interior: Interior::Closed(Arc::new(profile)),
            f0,
            f1,
        }
    }

    /// Interior values at the `n − 1` nodes `i/n` of an open uniform grid.
    /// Adjacent-node jumps must not exceed `modulus`.
    pub fn from_grid(values: Vec<f64>, f0: f64, f1: f64, modulus: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(domain!("grid profile needs at least one interior node"));
        }
        if !values.iter().all(|v| v.is_finite()) || !f0.is_finite() || !f1.is_finite() {
            return Err(domain!("grid profile must be finite"));
        }
        if let Some(w) = values.windows(2).find(|w| abs(w[1] - w[0]) > modulus) {
            return Err(domain!(
                "adjacent-node jump {} exceeds modulus {modulus}",
                abs(w[1] - w[0])
            ));
        }
        Ok(BoundaryFunction {
            interior: Interior::Grid(values),
            f0,
            f1,
        })
    }

    pub fn zero() -> Self {
        Self::closed(|_| 0.0, 0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::closed(move |_| c, c, c)
    }

    /// Same interior, new boundary values.
    pub fn with_boundary(&self, f0: f64, f1: f64) -> Self {
        BoundaryFunction {
            interior: self.interior.clone(),
            f0,
            f1,
        }
    }

    /// Interior value at `x ∈ (0, 1)`; grid profiles interpolate linearly
    /// and are held constant beyond the outermost nodes.
    pub fn interior(&self, x: f64) -> f64 {
        match &self.interior {
            Interior::Closed(p) => p(x),
            Interior::Grid(v) => {
                let n = v.len() + 1;
                let s = x * n as f64;
                if s <= 1.0 {
                    v[0]
                } else if s >= (n - 1) as f64 {
                    v[n - 2]
                } else {
                    let i = libm::floor(s) as usize;
                    let frac = s - i as f64;
                    v[i - 1] * (1.0 - frac) + v[(i).min(n - 2)] * frac
                }
            }
        }
    }

    /// Value at `x ∈ [0, 1]`, using the boundary slots at the endpoints.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.f0
        } else if x >= 1.0 {
            self.f1
        } else {
            self.interior(x)
        }
    }

    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let (f2, g2) = (f.clone(), g.clone());
        Self::closed(
            move |x| a * f2.interior(x) + b * g2.interior(x),
            a * f.f0 + b * g.f0,
            a * f.f1 + b * g.f1,
        )
    }
}

/// Numerical solution on a time × space grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceTimeField {
    pub times: Vec<f64>,
    pub nodes: Vec<f64>,
    /// `values[i][j] = u(times[i], nodes[j])`.
    pub values: Vec<Vec<f64>>,
    pub boundary_traces: [Vec<f64>; 2],
}

impl SpaceTimeField {
    pub fn sup_norm(&self, row: usize) -> f64 {
        self.values[row].iter().fold(0.0, |m, v| m.max(abs(*v)))
    }

    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|r| r.iter())
            .fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Row as a boundary function (grid interior, traces as boundary slots).
    pub fn row_function(&self, row: usize) -> Result<BoundaryFunction> {
        let r = &self.values[row];
        let n = r.len();
        BoundaryFunction::from_grid(r[1..n - 1].to_vec(), r[0], r[n - 1], f64::INFINITY)
    }

    /// Index of the row whose time is closest to `t`.
    pub fn row_at(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, s) in self.times.iter().enumerate() {
            if abs(s - t) < abs(self.times[best] - t) {
                best = i;
            }
        }
        best
    }

    /// Bilinear interpolation of the interior field at `(t, x)`, with `t`
    /// clamped to the stored range. In the two end cells the interior is
    /// extrapolated linearly, since the end columns hold boundary slots.
    pub fn interpolate(&self, t: f64, x: f64) -> f64 {
        let t = t.clamp(self.times[0], *self.times.last().unwrap());
        let i = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1) - 1;
        let (t0, t1) = (self.times[i], self.times[(i + 1).min(self.times.len() - 1)]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        let at = |row: usize| {
            let r = &self.values[row];
            let n = r.len() - 1;
            let h = self.nodes[1] - self.nodes[0];
            let j = ((x / h) as usize).clamp(1, n - 2);
            let s = (x - self.nodes[j]) / h;
            r[j] + s * (r[j + 1] - r[j])
        };
        let a = at(i);
        if w == 0.0 {
            a
        } else {
            (1.0 - w) * a + w * at(i + 1)
        }
    }

    /// `⟨u(t,·), φ⟩` on a row by composite Simpson on the closed node grid
    /// (falls back to the trapezoidal rule for an odd number of cells).
    pub fn pair_row(&self, row: usize, phi: impl Fn(f64) -> f64) -> f64 {
        simpson(&self.nodes, |j| self.values[row][j] * phi(self.nodes[j]))
    }
}

/// Largest difference between two fields over the rows of `a`, scaled by
/// `max(1, ‖a(t)‖)` per row. `b` must contain every time of `a` and a
/// node grid that refines that of `a` by an integer factor.
pub fn scaled_sup_difference(a: &SpaceTimeField, b: &SpaceTimeField) -> Result<f64> {
    let (na, nb) = (a.nodes.len() - 1, b.nodes.len() - 1);
    if na == 0 || nb % na != 0 {
        return Err(domain!("node grids are not nested ({na} and {nb} cells)"));
    }
    let ratio = nb / na;
    let mut worst: f64 = 0.0;
    for (i, &t) in a.times.iter().enumerate() {
        let j = b.row_at(t);
        if abs(b.times[j] - t) > 1e-9 {
            return Err(domain!("time {t} missing from the comparison field"));
        }
        let d = (0..=na)
            .map(|k| abs(a.values[i][k] - b.values[j][k * ratio]))
            .fold(0.0, f64::max);
        worst = worst.max(d / a.sup_norm(i).max(1.0));
    }
    Ok(worst)
}

/// Composite Simpson on a uniform grid (trapezoidal for an odd cell count).
pub fn simpson(nodes: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let n = nodes.len() - 1;
    let h = nodes[1] - nodes[0];
    if n.is_multiple_of(2) {
        let mut s = f(0) + f(n);
        for j in 1..n {
            s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(j);
        }
        s * h / 3.0
    } else {
        let mut s = 0.5 * (f(0) + f(n));
        for j in 1..n {
            s += f(j);
        }
        s * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    March,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VolterraConfig {
    pub dt: f64,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t_end: f64,
    pub n_space: usize,
    pub mode: Mode,
    pub picard_iters: usize,
    pub quad_tol: f64,
    /// Reconstruct every `output_stride`-th time row (the last row is
    /// always included).
    pub output_stride: usize,
}

impl Default for VolterraConfig {
    fn default() -> Self {
        VolterraConfig {
            dt: 1e-3,
            t_end: 1.0,
            n_space: 200,
            mode: Mode::March,
            picard_iters: 12,
            quad_tol: 1e-8,
            output_stride: 10,
        }
    }
}

impl VolterraConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.dt > 0.0) || !(self.t_end > 0.0) {
            return bad("dt and T must be positive");
        }
        if self.dt > self.t_end * (1.0 + 1e-12) {
            return bad("dt must not exceed T");
        }
        if self.n_space < 16 {
            return bad("n_space must be at least 16");
        }
        if !(self.quad_tol > 0.0) {
            return bad("quad_tol must be positive");
        }
        if self.output_stride == 0 {
            return bad("output_stride must be positive");
        }
        if self.mode == Mode::Picard && self.picard_iters == 0 {
            return bad("picard mode needs at least one iteration");
        }
        Ok(())
    }

    /// Number of time steps, rounding `T/dt` to the nearest integer.
    pub fn steps(&self) -> usize {
        libm::round(self.t_end / self.dt).max(1.0) as usize
    }
}

/// The 2×2 boundary coupling matrix `A` together with its spectral
/// projectors (eigenvalues 0 and `a = tr A`).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryMatrix {
    pub a_mat: Mat2,
    pub a: f64,
    pub pi0: Mat2,
    pub pi_a: Mat2,
}

impl BoundaryMatrix {
    pub fn new(mu: f64, sigma: f64) -> Self {
        let a_mat = boundary_matrix_a(mu, sigma);
        let a = a_mat.trace();
        let e2 = exp(2.0 * mu);
        // A/a, written without σ so that it survives σ → 0
        let pi_a = Mat2::new(e2, -e2, -1.0, 1.0).scale(1.0 / (e2 + 1.0));
        let (pi0, pi_a) = if a == 0.0 {
            (Mat2::IDENTITY, Mat2::ZERO)
        } else {
            (Mat2::IDENTITY - pi_a, pi_a)
        };
        BoundaryMatrix { a_mat, a, pi0, pi_a }
    }

    /// `e^{tA}`.
    pub fn expm(&self, t: f64) -> Mat2 {
        self.pi0 + self.pi_a.scale(exp(self.a * t))
    }
}

/// `A = 2σμ/(e^{2μ} − 1) · ((e^{2μ}, −e^{2μ}), (−1, 1))`.
pub fn boundary_matrix_a(mu: f64, sigma: f64) -> Mat2 {
    let k = 2.0 * sigma * mu_over_expm1_2mu(mu);
    let e2 = exp(2.0 * mu);
    Mat2::new(k * e2, -k * e2, -k, k)
}

/// Fixed open composite rule used for every spatial pairing.
pub fn spatial_rule(n_space: usize) -> CompositeRule {
    CompositeRule::unit_interval(n_space, NODES_PER_CELL)
}

/// `(f̂₀, f̂₁) = (⟨f, w₀⟩, ⟨f, w₁⟩)` on the fixed rule.
pub fn hat_transform(f: &BoundaryFunction, mu: f64, rule: &CompositeRule) -> Vec2 {
    let mut acc = Vec2::ZERO;
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (w0, w1) = hat_weights(mu, y);
        let fy = f.interior(y) * w;
        acc += Vec2::new(w0 * fy, w1 * fy);
    }
    acc
}
