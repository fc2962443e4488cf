//! Scalar helpers on top of `libm`, with small-argument series where the
//! direct formulas cancel.

pub use libm::{cos, cosh, erfc, exp, expm1, fabs, log, sin, sinh, sqrt, tanh, tgamma};

pub const PI: f64 = core::f64::consts::PI;
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Below this magnitude the hyperbolic ratios switch to their Taylor series.
pub const SMALL: f64 = 1e-6;

#[inline]
pub fn abs(x: f64) -> f64 {
    fabs(x)
}

#[inline]
pub fn sq(x: f64) -> f64 {
    x * x
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// `x coth x`, equal to 1 at the origin.
pub fn x_coth_x(x: f64) -> f64 {
    let a = abs(x);
    if a < SMALL {
        1.0 + a * a / 3.0
    } else if a > 20.0 {
        a
    } else {
        a / tanh(a)
    }
}

/// `x / sinh x`, equal to 1 at the origin.
pub fn x_over_sinh(x: f64) -> f64 {
    let a = abs(x);
    if a < SMALL {
        1.0 - a * a / 6.0
    } else if a > 700.0 {
        0.0
    } else {
        a / sinh(a)
    }
}

/// `sinh x / x`, equal to 1 at the origin.
pub fn sinh_over_x(x: f64) -> f64 {
    let a = abs(x);
    if a < SMALL {
        1.0 + a * a / 6.0
    } else {
        sinh(a) / a
    }
}

/// `sinh(a w) / sinh(w)` for `a` in [0, 1], with limit `a` as `w -> 0`.
/// Written in exponentials so that it does not overflow for large `w`.
pub fn sinh_ratio(a: f64, w: f64) -> f64 {
    let w = abs(w);
    if w < SMALL {
        return a * (1.0 + (a * a - 1.0) * w * w / 6.0);
    }
    // sinh(aw)/sinh(w) = e^{(a-1)w} (1 - e^{-2aw}) / (1 - e^{-2w})
    exp((a - 1.0) * w) * (-expm1(-2.0 * a * w)) / (-expm1(-2.0 * w))
}

/// `w cosh(a w) / sinh(w)`, the `a`-derivative of [`sinh_ratio`].
pub fn cosh_ratio_w(a: f64, w: f64) -> f64 {
    let w = abs(w);
    if w < SMALL {
        return 1.0 + (3.0 * a * a - 1.0) * w * w / 6.0;
    }
    w * exp((a - 1.0) * w) * (1.0 + exp(-2.0 * a * w)) / (-expm1(-2.0 * w))
}

/// `mu / (e^{2 mu} - 1)`, with limit 1/2 at the origin.
pub fn mu_over_expm1_2mu(mu: f64) -> f64 {
    if abs(mu) < SMALL {
        0.5 - mu / 2.0
    } else {
        mu / expm1(2.0 * mu)
    }
}

/// `(e^{z} - 1 - z) / z^2`, with limit 1/2 at the origin.
pub fn phi2(z: f64) -> f64 {
    if abs(z) < 1e-3 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (expm1(z) - z) / (z * z)
    }
}

/// `(e^{z} - 1) / z`, with limit 1 at the origin.
pub fn phi1(z: f64) -> f64 {
    if abs(z) < 1e-8 {
        1.0 + z / 2.0
    } else {
        expm1(z) / z
    }
}

/// Standard normal upper tail `P(Z > z)`.
#[inline]
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// `P(a < Z < b)` for a standard normal `Z`, evaluated through whichever
/// tail keeps the subtraction well conditioned.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else if b <= 0.0 {
        normal_sf(-b) - normal_sf(-a)
    } else {
        1.0 - normal_sf(b) - normal_sf(-a)
    }
}

/// Least-squares line through `(x, y)`; returns (slope, intercept, slope standard error).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| sq(y - intercept - slope * x))
        .sum();
    let se = if xs.len() > 2 {
        sqrt(rss / (n - 2.0) / sxx)
    } else {
        0.0
    };
    (slope, intercept, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_branches_match_direct_formulas() {
        for &x in &[1.1e-6, 2e-6, 1e-5] {
            assert!((x_coth_x(x) - x / tanh(x)).abs() < 1e-14);
            assert!((x_over_sinh(x) - x / sinh(x)).abs() < 1e-14);
        }
        assert_eq!(x_coth_x(0.0), 1.0);
        assert_eq!(sinh_ratio(0.3, 0.0), 0.3);
        for &(a, w) in &[(0.3, 2.0), (0.9, 0.5), (0.0, 3.0), (1.0, 7.0)] {
            let direct = sinh(a * w) / sinh(w);
            assert!((sinh_ratio(a, w) - direct).abs() < 1e-14);
            let d = w * cosh(a * w) / sinh(w);
            assert!((cosh_ratio_w(a, w) - d).abs() < 1e-13);
        }
        assert!(sinh_ratio(0.5, 2000.0).is_finite());
    }

    #[test]
    fn normal_interval_is_accurate_in_both_tails() {
        let p = normal_interval(8.0, 9.0);
        assert!(p > 0.0 && p < 1e-14);
        assert!((normal_interval(-1.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert!((normal_interval(-9.0, -8.0) - p).abs() < 1e-28);
    }

    #[test]
    fn phi_helpers_match() {
        for &z in &[1e-4, 2e-3, 0.5, -0.7] {
            assert!((phi2(z) - (expm1(z) - z) / (z * z)).abs() < 1e-9);
            assert!((phi1(z) - expm1(z) / z).abs() < 1e-14);
        }
    }
}
