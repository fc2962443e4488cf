//! Growth theory on top of the Riccati solution: the defect operator, its
//! decomposition along `V₀, V₁`, the explicit eigen-solutions `h₀, h₁`,
//! the nonnegativity classifier and exponential-rate fitting.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::linalg::Vec2;
use crate::math::{abs, cosh, exp, linear_fit, log, sqrt, tanh};
use crate::riccati::{Regime, RiccatiSolution};
use crate::semigroup::{simpson, BoundaryFunction, SpaceTimeField};

/// Classifier tolerance.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Allowed relative mismatch between the two component ratios defining `K_k`.
pub const K_CONSISTENCY_TOL: f64 = 1e-5;

/// `D f = (f(0) − ⟨f, J₀⟩, f(1) − ⟨f, J₁⟩)`, pairing interior values only.
pub fn defect(f: &BoundaryFunction, sol: &RiccatiSolution) -> Vec2 {
    let pair = sol.integrate(|x| f.interior(x));
    Vec2::new(f.f0 - pair[0], f.f1 - pair[1])
}

/// Defect of a grid row, paired with `J` by Simpson's rule on the nodes.
/// The endpoint slots hold boundary values, which need not be interior
/// limits, so the pairing extrapolates the interior instead.
pub fn defect_of_row(field: &SpaceTimeField, row: usize, sol: &RiccatiSolution) -> Vec2 {
    let r = &field.values[row];
    let n = r.len() - 1;
    let mut inner = r.clone();
    inner[0] = 3.0 * r[1] - 3.0 * r[2] + r[3];
    inner[n] = 3.0 * r[n - 1] - 3.0 * r[n - 2] + r[n - 3];
    let nodes = &field.nodes;
    let pair = |k: usize| simpson(nodes, |j| inner[j] * sol.eval_j(nodes[j])[k]);
    Vec2::new(r[0] - pair(0), r[n] - pair(1))
}

/// The element of the invariant subspace with interior `φ` plus `α V₀`
/// added to its boundary slots, so that its defect is exactly `α V₀`
/// (up to rounding) under [`defect`].
pub fn invariant_member(phi: impl Fn(f64) -> f64 + Send + Sync + 'static, sol: &RiccatiSolution, alpha: f64) -> BoundaryFunction {
    let pair = sol.integrate(&phi);
    let b = pair + alpha * sol.v0;
    BoundaryFunction::closed(phi, b[0], b[1])
}

/// A continuous element of the invariant subspace: `φ + a(1−x)² + bx²`
/// with `(a, b)` chosen so that the interior limits are themselves the
/// compatible boundary values.
pub fn continuous_invariant_member(
    phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    sol: &RiccatiSolution,
) -> Result<BoundaryFunction> {
    let cont = |g: &dyn Fn(f64) -> f64| {
        let p = sol.integrate(g);
        Vec2::new(g(0.0) - p[0], g(1.0) - p[1])
    };
    let d_phi = cont(&phi);
    let d_a = cont(&|x: f64| (1.0 - x) * (1.0 - x));
    let d_b = cont(&|x: f64| x * x);
    let ab = crate::linalg::Mat2::from_cols(d_a, d_b)
        .solve(-d_phi)
        .ok_or(Error::IllConditioned {
            what: "continuous invariant member",
            condition: f64::INFINITY,
        })?;
    let (a, b) = (ab[0], ab[1]);
    let g = move |x: f64| phi(x) + a * (1.0 - x) * (1.0 - x) + b * x * x;
    let (g0, g1) = (g(0.0), g(1.0));
    Ok(BoundaryFunction::closed(g, g0, g1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefectDecomposition {
    pub d: Vec2,
    pub a0: f64,
    pub a1: f64,
}

/// Solve `d = a₀V₀ + a₁V₁`.
pub fn decompose(d: Vec2, sol: &RiccatiSolution) -> Result<DefectDecomposition> {
    let a = sol.v_matrix().solve(d).ok_or(Error::IllConditioned {
        what: "eigenvector matrix (V0|V1)",
        condition: f64::INFINITY,
    })?;
    Ok(DefectDecomposition { d, a0: a[0], a1: a[1] })
}

/// `h(x) = (e^{xω} + c e^{(1−x)ω}) e^{−xμ}` with value and two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpProfile {
    pub omega: f64,
    pub c: f64,
    pub mu: f64,
}

impl ExpProfile {
    pub fn eval_derivs(&self, x: f64) -> [f64; 3] {
        let (w, m, c) = (self.omega, self.mu, self.c);
        let a = exp(x * (w - m));
        let b = c * exp((1.0 - x) * w - x * m);
        let (ra, rb) = (w - m, -w - m);
        [a + b, ra * a + rb * b, ra * ra * a + rb * rb * b]
    }
}

/// Profile `h₀` per regime.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum H0 {
    Exponential(ExpProfile),
    /// `1/|μ| + x/μ + (1 + tanh μ) e^{−2μx}/(2μ²)`.
    CriticalDrift { mu: f64 },
    /// `1 − x(1 − x)`.
    CriticalDriftless,
    Constant,
}

impl H0 {
    pub fn eval_derivs(&self, x: f64) -> [f64; 3] {
        match *self {
            H0::Exponential(p) => p.eval_derivs(x),
            H0::CriticalDrift { mu } => {
                let k = (1.0 + tanh(mu)) / (2.0 * mu * mu);
                let e = exp(-2.0 * mu * x);
                [
                    1.0 / abs(mu) + x / mu + k * e,
                    1.0 / mu - 2.0 * mu * k * e,
                    4.0 * mu * mu * k * e,
                ]
            }
            H0::CriticalDriftless => [1.0 - x * (1.0 - x), 2.0 * x - 1.0, 2.0],
            H0::Constant => [1.0, 0.0, 0.0],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivs(x)[0]
    }
}

/// `c_k = ((−1)^k √(μ²cosh²ω + ω² − μ²) − μ cosh ω)/(ω + μ)`.
pub fn c_coefficient(mu: f64, omega: f64, k: usize) -> f64 {
    let ch = cosh(omega);
    let rad = sqrt((mu * mu * ch * ch + omega * omega - mu * mu).max(0.0));
    let sign = if k == 0 { 1.0 } else { -1.0 };
    (sign * rad - mu * ch) / (omega + mu)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosedForms {
    /// Undefined (division by zero) when `ω₀ = −μ`, which happens off the
    /// supercritical regime where `h₀` does not use it.
    pub c0: Option<f64>,
    pub c1: f64,
    #[cfg_attr(feature = "serde", serde(rename = "K0"))]
    pub k0: f64,
    #[cfg_attr(feature = "serde", serde(rename = "K1"))]
    pub k1: f64,
    pub h0: H0,
    pub h1: ExpProfile,
    pub regime: Regime,
}

impl ClosedForms {
    pub fn h0(&self, x: f64) -> f64 {
        self.h0.eval(x)
    }

    pub fn h1(&self, x: f64) -> f64 {
        self.h1.eval_derivs(x)[0]
    }

    pub fn g0(&self, x: f64) -> f64 {
        match self.regime {
            Regime::Supercritical => self.k0 * self.h0(x),
            _ => self.k0,
        }
    }

    pub fn g1(&self, x: f64) -> f64 {
        self.k1 * self.h1(x)
    }

    /// `h₀` as an element of `F` with continuous boundary values.
    pub fn h0_function(&self) -> BoundaryFunction {
        let h = self.h0;
        BoundaryFunction::closed(move |x| h.eval(x), h.eval(0.0), h.eval(1.0))
    }

    pub fn h1_function(&self) -> BoundaryFunction {
        let h = self.h1;
        BoundaryFunction::closed(move |x| h.eval_derivs(x)[0], h.eval_derivs(0.0)[0], h.eval_derivs(1.0)[0])
    }

    pub fn g0_function(&self) -> BoundaryFunction {
        let cf = self.clone();
        BoundaryFunction::closed(move |x| cf.g0(x), self.g0(0.0), self.g0(1.0))
    }

    pub fn g1_function(&self) -> BoundaryFunction {
        let cf = self.clone();
        BoundaryFunction::closed(move |x| cf.g1(x), self.g1(0.0), self.g1(1.0))
    }
}

/// `K` with `K·d = v`, from the better-conditioned component, after checking
/// that the other component agrees.
fn ratio(v: Vec2, d: Vec2, what: &'static str) -> Result<f64> {
    let i = if abs(d[0]) >= abs(d[1]) { 0 } else { 1 };
    if d[i] == 0.0 {
        return Err(Error::Numerical(alloc::format!("{what}: defect vanishes")));
    }
    let k = v[i] / d[i];
    let resid = (d.scale(k) - v).norm_inf();
    if resid > K_CONSISTENCY_TOL * v.norm_inf().max(1e-300) {
        return Err(Error::Numerical(alloc::format!(
            "{what}: component ratios disagree (residual {resid:e}); regime misclassified?"
        )));
    }
    Ok(k)
}

pub fn closed_forms(sol: &RiccatiSolution) -> Result<ClosedForms> {
    let p = sol.params;
    if !(p.sigma > 0.0) {
        return Err(domain!("closed forms need sigma > 0"));
    }
    let mu = p.mu;
    let c0 = Some(c_coefficient(mu, sol.omega0, 0)).filter(|c| c.is_finite());
    let c1 = c_coefficient(mu, sol.omega1, 1);
    let h0 = match p.regime {
        Regime::Supercritical => H0::Exponential(ExpProfile {
            omega: sol.omega0,
            c: c0.ok_or_else(|| Error::Numerical("c0 undefined in the supercritical regime".into()))?,
            mu,
        }),
        Regime::Critical if mu == 0.0 => H0::CriticalDriftless,
        Regime::Critical => H0::CriticalDrift { mu },
        Regime::Subcritical => H0::Constant,
    };
    let h1 = ExpProfile { omega: sol.omega1, c: c1, mu };
    let mut cf = ClosedForms {
        c0,
        c1,
        k0: 0.0,
        k1: 0.0,
        h0,
        h1,
        regime: p.regime,
    };
    cf.k0 = ratio(sol.v0, defect(&cf.h0_function(), sol), "K0")?;
    cf.k1 = ratio(sol.v1, defect(&cf.h1_function(), sol), "K1")?;
    Ok(cf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Verdict {
    Nonnegative,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Classification {
    pub verdict: Verdict,
    pub a0: f64,
    pub a1: f64,
    pub min_f: f64,
}

/// Interior sample points used for `min f`.
const CLASSIFY_GRID: usize = 1000;

/// Nonnegativity of `u_f` from the data alone: `f ≥ 0` and `D f = αV₀`
/// with `α ≥ 0`.
pub fn classify_nonneg(f: &BoundaryFunction, sol: &RiccatiSolution) -> Result<Classification> {
    if !(sol.params.sigma > 0.0) {
        return Err(domain!("classifier needs sigma > 0"));
    }
    let dec = decompose(defect(f, sol), sol)?;
    let min_f = (1..CLASSIFY_GRID)
        .map(|i| f.interior(i as f64 / CLASSIFY_GRID as f64))
        .chain([f.f0, f.f1])
        .fold(f64::INFINITY, f64::min);
    let tol = CLASSIFY_TOL;
    let ok = min_f >= -tol && abs(dec.a1) <= tol * (1.0 + abs(dec.a0)) && dec.a0 >= -tol;
    Ok(Classification {
        verdict: if ok { Verdict::Nonnegative } else { Verdict::Indefinite },
        a0: dec.a0,
        a1: dec.a1,
        min_f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RateQuantity {
    /// `log ‖u(t)‖`.
    LogSup,
    /// `log(‖u(t)‖/t)`, for the linear-growth critical mode.
    LogSupOverT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub quantity: RateQuantity,
    pub points: usize,
}

/// Least-squares line through the chosen log sup-norm over the rows with
/// `t ∈ [t1, t2]`.
pub fn rate_fit(field: &SpaceTimeField, window: [f64; 2], quantity: RateQuantity) -> Result<RateFit> {
    let [t1, t2] = window;
    if !(t1 < t2) {
        return Err(domain!("empty window [{t1}, {t2}]"));
    }
    let last = *field.times.last().unwrap_or(&0.0);
    if last < t2 * (1.0 - 1e-12) {
        return Err(domain!("field ends at {last} before window end {t2}"));
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (i, &t) in field.times.iter().enumerate() {
        if t < t1 - 1e-12 || t > t2 + 1e-12 {
            continue;
        }
        let s = field.sup_norm(i);
        if !(s > 0.0) {
            return Err(domain!("sup-norm vanishes at t = {t}"));
        }
        ts.push(t);
        ys.push(match quantity {
            RateQuantity::LogSup => log(s),
            RateQuantity::LogSupOverT => log(s / t),
        });
    }
    if ts.len() < 2 {
        return Err(domain!("fewer than two rows in the window"));
    }
    let (slope, intercept, _) = linear_fit(&ts, &ys);
    Ok(RateFit {
        slope,
        intercept,
        quantity,
        points: ts.len(),
    })
}

/// The quantity [`rate_fit`] should use for data with decomposition `dec`.
pub fn rate_quantity_for(regime: Regime, dec: &DefectDecomposition) -> RateQuantity {
    if regime == Regime::Critical && abs(dec.a1) <= CLASSIFY_TOL * (1.0 + abs(dec.a0)) {
        RateQuantity::LogSupOverT
    } else {
        RateQuantity::LogSup
    }
}
