//! Quadrature rules: Gauss–Legendre (fixed and composite) and a
//! vector-valued adaptive Gauss–Kronrod 7/15 integrator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, cos, PI};

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if abs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre rule on [0, 1] with uniform panels. Nodes are
/// strictly interior, so the endpoints are never sampled.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn unit_interval(panels: usize, order: usize) -> Self {
        let gl = GaussLegendre::new(order);
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = (p as f64 + 0.5) * h;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(c + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let fc = f(c);
    for i in 0..N {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max(abs(k[i] - g[i]));
    }
    (k, err)
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand on
/// `[a, b]`. Converges when the summed error estimate (max over
/// components) is below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<[f64; N]> {
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals: Vec<(f64, f64, [f64; N], f64)> = Vec::with_capacity(64);
    intervals.push((a, b, v, e));
    let mut total = v;
    let mut err = e;
    loop {
        let scale = total.iter().fold(0.0f64, |m, x| m.max(abs(*x)));
        let target = abs_tol.max(rel_tol * scale);
        if err <= target {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                achieved: err,
                requested: target,
            });
        }
        // bisect the interval with the largest error
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::Quadrature {
                achieved: err,
                requested: target,
            });
        }
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        for i in 0..N {
            total[i] += vl[i] + vr[i] - v0[i];
        }
        err += el + er - e0;
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
        if err < 0.0 {
            err = intervals.iter().map(|iv| iv.3).sum();
        }
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn adaptive1(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    adaptive(|x| [f(x)], a, b, abs_tol, rel_tol).map(|v| v[0])
}

/// `∫_0^t f(τ) dτ` through the substitution `τ = s²`, which removes
/// `τ^{-1/2}`-type endpoint behaviour and the `τ^{-3/2} e^{-x²/2τ}`
/// boundary layer of first-passage densities.
pub fn sqrt_substituted<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    t0: f64,
    t1: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<[f64; N]> {
    let s0 = crate::math::sqrt(t0);
    let s1 = crate::math::sqrt(t1);
    adaptive(
        |s| {
            let mut v = f(s * s);
            for x in v.iter_mut() {
                *x *= 2.0 * s;
            }
            v
        },
        s0,
        s1,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{exp, sqrt};

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 4, 8, 16] {
            let gl = GaussLegendre::new(n);
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            let deg = 2 * n - 1;
            let v = gl.integrate(0.0, 1.0, |x| crate::math::powi(x, deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn composite_rule_never_touches_endpoints() {
        let r = CompositeRule::unit_interval(10, 4);
        assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!((r.integrate(exp) - (exp(1.0) - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let eps = 1e-3;
        let v = adaptive1(|x| exp(-(x - 0.3) * (x - 0.3) / (2.0 * eps * eps)), 0.0, 1.0, 1e-13, 1e-12)
            .unwrap();
        let exact = eps * sqrt(2.0 * PI);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn sqrt_substitution_integrates_inverse_sqrt() {
        let v = sqrt_substituted(|t| [1.0 / sqrt(t)], 0.0, 4.0, 1e-14, 1e-14).unwrap();
        assert!((v[0] - 4.0).abs() < 1e-12);
    }
}
