//! Fixed-size 2-vectors and 2×2 matrices.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::math::{abs, cos, exp, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2(pub [f64; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Vec2 {
    pub const ZERO: Vec2 = Vec2([0.0, 0.0]);

    pub const fn new(a: f64, b: f64) -> Self {
        Vec2([a, b])
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }

    pub fn norm_inf(self) -> f64 {
        abs(self.0[0]).max(abs(self.0[1]))
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn is_finite(self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }
}

impl Index<usize> for Vec2 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec2 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2([-self.0[0], -self.0[1]])
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v.scale(self)
    }
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[0.0; 2]; 2]);
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[a, 0.0], [0.0, b]])
    }

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat2([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn col(&self, j: usize) -> Vec2 {
        Vec2([self.0[0][j], self.0[1][j]])
    }

    pub fn row(&self, i: usize) -> Vec2 {
        Vec2(self.0[i])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Inverse, or `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn solve(&self, b: Vec2) -> Option<Vec2> {
        self.inverse().map(|inv| inv * b)
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, &x| acc.max(abs(x)))
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        sqrt(self.0.iter().flat_map(|r| r.iter()).map(|x| x * x).sum())
    }

    /// Spectral norm (largest singular value).
    pub fn norm_op(&self) -> f64 {
        let m = &self.0;
        let a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
        let b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        let d = m[0][1] * m[0][1] + m[1][1] * m[1][1];
        let half_tr = 0.5 * (a + d);
        let disc = sqrt((0.5 * (a - d)) * (0.5 * (a - d)) + b * b);
        sqrt(half_tr + disc)
    }

    /// Condition number in the spectral norm.
    pub fn cond(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm_op() * inv.norm_op(),
            None => f64::INFINITY,
        }
    }

    /// `e^{tM}` via the eigenvalues of `M`: real distinct, complex pair, or
    /// (numerically) repeated.
    pub fn expm(&self, t: f64) -> Mat2 {
        let tr = self.trace();
        let det = self.det();
        let disc = 0.25 * tr * tr - det;
        let half = 0.5 * tr;
        let n = *self - Mat2::IDENTITY.scale(half);
        let tol = 1e-24 * (1.0 + tr * tr);
        if disc > tol {
            let r = sqrt(disc);
            let (l1, l2) = (half + r, half - r);
            let e1 = exp(t * l1);
            let e2 = exp(t * l2);
            let m_l2 = *self - Mat2::IDENTITY.scale(l2);
            let m_l1 = *self - Mat2::IDENTITY.scale(l1);
            (m_l2.scale(e1) - m_l1.scale(e2)).scale(1.0 / (l1 - l2))
        } else if disc < -tol {
            let b = sqrt(-disc);
            let e = exp(t * half);
            (Mat2::IDENTITY.scale(cos(b * t)) + n.scale(sin(b * t) / b)).scale(e)
        } else {
            (Mat2::IDENTITY + n.scale(t)).scale(exp(t * half))
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        let a = &self.0;
        Vec2([
            a[0][0] * v[0] + a[0][1] * v[1],
            a[1][0] * v[0] + a[1][1] * v[1],
        ])
    }
}

/// Row-vector times matrix.
pub fn row_mul(v: Vec2, m: &Mat2) -> Vec2 {
    Vec2([
        v[0] * m.0[0][0] + v[1] * m.0[1][0],
        v[0] * m.0[0][1] + v[1] * m.0[1][1],
    ])
}
