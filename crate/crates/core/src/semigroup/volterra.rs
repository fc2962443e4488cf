//! Product-integration march for the boundary-hat Volterra system and
//! reconstruction of the full field.
//!
//! With `P(t, x) = ∫₀ᵗ q(s, x) e^{(t−s)A} ds` the kernel is `k = 2σ ∂ₜP`
//! and `r_f = h_f + P c`, `c = (f(0) − 2σf̂₀, f(1) − 2σf̂₁)`. Integrating
//! by parts against a piecewise-linear `v` turns every convolution into
//! differences of the cumulative integral `∫₀^S P`, so the weakly singular
//! kernel is never sampled pointwise in the march.

use alloc::vec;
use alloc::vec::Vec;

use super::hats::{hat_weights, HatKernel};
use super::{hat_transform, spatial_rule, BoundaryFunction, BoundaryMatrix, Mode, SpaceTimeField, VolterraConfig};
use crate::error::{domain, Error, Result};
use crate::kernel::{Kernel, KernelConfig};
use crate::linalg::{row_mul, Mat2, Vec2};
use crate::math::{exp, phi1, phi2, sin, sqrt, tgamma, PI};
use crate::quad::{self, CompositeRule};

/// Step-system condition number beyond which the march gives up.
pub const MAX_STEP_CONDITION: f64 = 1e12;

/// Panel integrals `∫ q(r) ω(S+len−r) dr` for the four weights
/// `ω(w) ∈ {1, w, e^{aw}, (e^{aw} − 1)/a}`.
fn panel<const N: usize, const M: usize>(
    q: &impl Fn(f64) -> [f64; N],
    s0: f64,
    len: f64,
    a: f64,
    tol: f64,
) -> Result<[[f64; N]; 4]> {
    debug_assert_eq!(M, 4 * N);
    let end = s0 + len;
    let body = |r: f64| -> [f64; M] {
        let qv = q(r);
        let w = end - r;
        let ew = exp(a * w);
        let ws = [1.0, w, ew, w * phi1(a * w)];
        let mut out = [0.0; M];
        for c in 0..4 {
            for i in 0..N {
                out[c * N + i] = ws[c] * qv[i];
            }
        }
        out
    };
    let res = if s0 == 0.0 {
        quad::sqrt_substituted(body, 0.0, len, tol * len, tol)?
    } else {
        quad::adaptive(body, s0, end, tol * len, tol)?
    };
    let mut out = [[0.0; N]; 4];
    for c in 0..4 {
        for i in 0..N {
            out[c][i] = res[c * N + i];
        }
    }
    Ok(out)
}

/// Cumulative moments of `q` on the uniform grid `m·h`, `m = 0..=steps`:
/// `Q1 = ∫q`, `C1 = ∫Q1`, `Qa = ∫q e^{a(S−r)}`, `Qb = ∫Qa`.
struct Cumulative<const N: usize> {
    q1: Vec<[f64; N]>,
    c1: Vec<[f64; N]>,
    qa: Vec<[f64; N]>,
    qb: Vec<[f64; N]>,
}

fn cumulative<const N: usize, const M: usize>(
    q: &impl Fn(f64) -> [f64; N],
    h: f64,
    steps: usize,
    a: f64,
    tol: f64,
) -> Result<Cumulative<N>> {
    let mut c = Cumulative {
        q1: Vec::with_capacity(steps + 1),
        c1: Vec::with_capacity(steps + 1),
        qa: Vec::with_capacity(steps + 1),
        qb: Vec::with_capacity(steps + 1),
    };
    let zero = [0.0; N];
    c.q1.push(zero);
    c.c1.push(zero);
    c.qa.push(zero);
    c.qb.push(zero);
    let eah = exp(a * h);
    let p1 = h * phi1(a * h);
    for m in 1..=steps {
        let s0 = (m - 1) as f64 * h;
        let [i1, iw, ie, iphi] = panel::<N, M>(q, s0, h, a, tol)?;
        let (q1p, c1p, qap, qbp) = (c.q1[m - 1], c.c1[m - 1], c.qa[m - 1], c.qb[m - 1]);
        let mut q1 = zero;
        let mut c1 = zero;
        let mut qa = zero;
        let mut qb = zero;
        for i in 0..N {
            q1[i] = q1p[i] + i1[i];
            c1[i] = c1p[i] + h * q1p[i] + iw[i];
            qa[i] = eah * qap[i] + ie[i];
            qb[i] = qbp[i] + p1 * qap[i] + iphi[i];
        }
        c.q1.push(q1);
        c.c1.push(c1);
        c.qa.push(qa);
        c.qb.push(qb);
    }
    Ok(c)
}

#[inline]
fn mat(a: [f64; 4]) -> Mat2 {
    Mat2::new(a[0], a[1], a[2], a[3])
}

#[inline]
fn flat(m: Mat2) -> [f64; 4] {
    [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]
}

/// Per-node tables `p_m(x)` and `∫₀^{mh} p(s, x) ds`.
#[derive(Debug, Clone)]
struct NodeTables {
    p: Vec<Vec<Vec2>>,
    ip: Vec<Vec<Vec2>>,
}

/// Result of the march: the hat trajectory on the full time grid and the
/// boundary traces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarchOutput {
    pub times: Vec<f64>,
    pub v: Vec<Vec2>,
    pub traces: Vec<Vec2>,
    pub f_hat: Vec2,
    pub c: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PicardOutput {
    pub solution: MarchOutput,
    /// `sup_t |vⁿ − vⁿ⁻¹|` for n = 1, 2, ...
    pub increments: Vec<f64>,
    /// Envelope bound for each recorded increment.
    pub bounds: Vec<f64>,
    pub lipschitz: f64,
    pub converged: bool,
}

/// Per-`f` data for `h_f` and `ĥ_f`.
struct SourceData {
    /// `W_i f(y_i)` on the spatial rule.
    wf: Vec<f64>,
    /// `F_n = ∫ e^{μy} f(y) sin(nπy) dy`.
    fn_coef: Vec<f64>,
}

/// Volterra engine for fixed `(μ, σ)` and grids. Building it tabulates the
/// `f`-independent kernel moments, so one instance serves many data `f`.
#[derive(Debug, Clone)]
pub struct Semigroup {
    pub mu: f64,
    pub sigma: f64,
    cfg: VolterraConfig,
    hk: HatKernel,
    bm: BoundaryMatrix,
    rule: CompositeRule,
    steps: usize,
    h: f64,
    tol: f64,
    p_hat: Vec<Mat2>,
    ip_hat: Vec<Mat2>,
    q1_hat: Vec<Mat2>,
    qa_hat: Vec<Mat2>,
    /// `S_{n,j} = ∫ w_j(x) e^{−μx} sin(nπx) dx`.
    s_tab: Vec<Vec2>,
    n_spec: usize,
    nodes: Option<NodeTables>,
}

impl Semigroup {
    pub fn new(mu: f64, sigma: f64, cfg: VolterraConfig) -> Result<Self> {
        Self::with_kernel(mu, sigma, cfg, KernelConfig::default())
    }

    pub fn with_kernel(mu: f64, sigma: f64, cfg: VolterraConfig, kcfg: KernelConfig) -> Result<Self> {
        cfg.validate()?;
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(domain!("parameters must be finite"));
        }
        let kernel = Kernel::new(kcfg)?;
        let hk = HatKernel::new(kernel, mu);
        let bm = BoundaryMatrix::new(mu, sigma);
        let steps = cfg.steps();
        let h = cfg.t_end / steps as f64;
        let tol = (cfg.quad_tol * 1e-4).max(1e-14);
        let rule = spatial_rule(cfg.n_space);

        let qh = |s: f64| flat(hk.q_hat(s));
        let cum = cumulative::<4, 16>(&qh, h, steps, bm.a, tol)?;
        let mut p_hat = Vec::with_capacity(steps + 1);
        let mut ip_hat = Vec::with_capacity(steps + 1);
        for m in 0..=steps {
            p_hat.push(mat(cum.q1[m]) * bm.pi0 + mat(cum.qa[m]) * bm.pi_a);
            ip_hat.push(mat(cum.c1[m]) * bm.pi0 + mat(cum.qb[m]) * bm.pi_a);
        }

        // spectral terms needed for t > t_switch
        let t_sw = kcfg.t_switch;
        let mut n_spec = 0;
        while n_spec < kcfg.spectral_terms && 0.5 * crate::math::sq((n_spec + 1) as f64 * PI) * t_sw < 70.0 {
            n_spec += 1;
        }
        let mut s_tab = vec![Vec2::ZERO; n_spec + 1];
        for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (w0, w1) = hat_weights(mu, y);
            let e = exp(-mu * y) * w;
            for (n, s) in s_tab.iter_mut().enumerate().skip(1) {
                let sn = sin(n as f64 * PI * y) * e;
                *s += Vec2::new(w0 * sn, w1 * sn);
            }
        }

        Ok(Semigroup {
            mu,
            sigma,
            cfg,
            hk,
            bm,
            rule,
            steps,
            h,
            tol,
            p_hat,
            ip_hat,
            q1_hat: cum.q1.iter().map(|a| mat(*a)).collect(),
            qa_hat: cum.qa.iter().map(|a| mat(*a)).collect(),
            s_tab,
            n_spec,
            nodes: None,
        })
    }

    pub fn config(&self) -> &VolterraConfig {
        &self.cfg
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.h
    }

    pub fn boundary_matrix(&self) -> &BoundaryMatrix {
        &self.bm
    }

    pub fn hat_kernel(&self) -> &HatKernel {
        &self.hk
    }

    pub fn rule(&self) -> &CompositeRule {
        &self.rule
    }

    fn t_switch(&self) -> f64 {
        self.hk.kernel.config().t_switch
    }

    /// Cumulative `(∫₀ᵗ q̂, ∫₀ᵗ q̂(s)e^{a(t−s)}ds)` at arbitrary `t ≤ T`.
    fn q_moments_at(&self, t: f64) -> Result<(Mat2, Mat2)> {
        let m = libm::floor(t / self.h) as usize;
        let m = m.min(self.steps);
        let s0 = m as f64 * self.h;
        let delta = t - s0;
        if delta <= 1e-15 * self.h.max(t) {
            return Ok((self.q1_hat[m], self.qa_hat[m]));
        }
        let qh = |s: f64| flat(self.hk.q_hat(s));
        let [i1, _, ie, _] = panel::<4, 16>(&qh, s0, delta, self.bm.a, self.tol)?;
        Ok((
            self.q1_hat[m] + mat(i1),
            self.qa_hat[m].scale(exp(self.bm.a * delta)) + mat(ie),
        ))
    }

    /// `P̂(t) = ∫₀ᵗ q̂(s) e^{(t−s)A} ds`.
    pub fn p_hat(&self, t: f64) -> Result<Mat2> {
        let (q1, qa) = self.q_moments_at(t)?;
        Ok(q1 * self.bm.pi0 + qa * self.bm.pi_a)
    }

    /// `K̂(t) = 2σ (q̂(t) + ∫₀ᵗ q̂(s) e^{a(t−s)} ds · A)`.
    pub fn assemble_khat(&self, t: f64) -> Result<Mat2> {
        if !(t > 0.0) {
            return Err(domain!("K-hat needs t > 0, got {t}"));
        }
        let (_, qa) = self.q_moments_at(t)?;
        Ok((self.hk.q_hat(t) + qa * self.bm.a_mat).scale(2.0 * self.sigma))
    }

    /// `c = (f(0) − 2σf̂₀, f(1) − 2σf̂₁)` and `f̂`.
    pub fn boundary_defect(&self, f: &BoundaryFunction) -> (Vec2, Vec2) {
        let fh = hat_transform(f, self.mu, &self.rule);
        (Vec2::new(f.f0, f.f1) - (2.0 * self.sigma) * fh, fh)
    }

    fn source(&self, f: &BoundaryFunction) -> SourceData {
        let wf: Vec<f64> = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(&y, &w)| w * f.interior(y))
            .collect();
        let mut fn_coef = vec![0.0; self.n_spec + 1];
        for (&y, &wfy) in self.rule.nodes.iter().zip(&wf) {
            let e = exp(self.mu * y) * wfy;
            for (n, c) in fn_coef.iter_mut().enumerate().skip(1) {
                *c += e * sin(n as f64 * PI * y);
            }
        }
        SourceData { wf, fn_coef }
    }

    fn h_hat_with(&self, src: &SourceData, t: f64) -> Vec2 {
        let mu = self.mu;
        if t > self.t_switch() {
            let mut acc = Vec2::ZERO;
            for n in 1..=self.n_spec {
                let k = n as f64 * PI;
                acc += (2.0 * exp(-0.5 * k * k * t) * src.fn_coef[n]) * self.s_tab[n];
            }
            acc.scale(exp(-0.5 * mu * mu * t))
        } else {
            let mut acc = Vec2::ZERO;
            for (&y, &wf) in self.rule.nodes.iter().zip(&src.wf) {
                if wf != 0.0 {
                    acc += wf * self.hk.q0_hat(t, y);
                }
            }
            acc
        }
    }

    fn h_with(&self, src: &SourceData, t: f64, x: f64) -> f64 {
        let mu = self.mu;
        if t > self.t_switch() {
            let mut acc = 0.0;
            for n in 1..=self.n_spec {
                let k = n as f64 * PI;
                acc += 2.0 * exp(-0.5 * k * k * t) * sin(k * x) * src.fn_coef[n];
            }
            acc * exp(-mu * x - 0.5 * mu * mu * t)
        } else {
            let k = &self.hk.kernel;
            let mut acc = 0.0;
            for (&y, &wf) in self.rule.nodes.iter().zip(&src.wf) {
                if wf != 0.0 {
                    acc += wf * k.q0_absorbed(t, x, y, mu).unwrap_or(0.0);
                }
            }
            acc
        }
    }

    /// `ĥ_f(t) = ∫ f(y) Q̂⁰(t, y) dy`.
    pub fn h_hat(&self, f: &BoundaryFunction, t: f64) -> Result<Vec2> {
        if !(t > 0.0) {
            return Err(domain!("h-hat needs t > 0, got {t}"));
        }
        Ok(self.h_hat_with(&self.source(f), t))
    }

    /// `ḣ̂_f(t) = ∫ f(y) ∂ₜQ̂⁰(t, y) dy` on the fixed rule.
    pub fn h_hat_dot(&self, f: &BoundaryFunction, t: f64) -> Vec2 {
        let mut acc = Vec2::ZERO;
        for (&y, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            acc += (w * f.interior(y)) * self.hk.q0_hat_dot(t, y);
        }
        acc
    }

    /// `h_f(t, x) = ∫ Q⁰(t, x, y) f(y) dy`.
    pub fn h_field(&self, f: &BoundaryFunction, t: f64, x: f64) -> f64 {
        self.h_with(&self.source(f), t, x)
    }

    /// `r̂_f(t) = ĥ_f(t) + P̂(t) c`.
    pub fn assemble_rhat(&self, f: &BoundaryFunction, t: f64) -> Result<Vec2> {
        let (c, _) = self.boundary_defect(f);
        Ok(self.h_hat(f, t)? + self.p_hat(t)? * c)
    }

    fn rhat_grid(&self, f: &BoundaryFunction) -> (Vec<Vec2>, Vec2, Vec2) {
        let (c, fh) = self.boundary_defect(f);
        let src = self.source(f);
        let mut r = Vec::with_capacity(self.steps + 1);
        r.push(fh);
        for n in 1..=self.steps {
            let t = n as f64 * self.h;
            r.push(self.h_hat_with(&src, t) + self.p_hat[n] * c);
        }
        (r, c, fh)
    }

    #[inline]
    fn pbar(&self, m: usize) -> Mat2 {
        self.ip_hat[m] - self.ip_hat[m - 1]
    }

    /// `2σ [P̂_n v₀ + Σ_{j ≤ upto} P̄_{n−j+1} (v_j − v_{j−1})/h]`.
    fn history(&self, v: &[Vec2], n: usize, upto: usize, v0: Vec2) -> Vec2 {
        let mut acc = self.p_hat[n] * v0;
        let inv_h = 1.0 / self.h;
        for j in 1..=upto {
            acc += self.pbar(n - j + 1) * ((v[j] - v[j - 1]).scale(inv_h));
        }
        acc.scale(2.0 * self.sigma)
    }

    fn traces(&self, v: &[Vec2], c: Vec2) -> Vec<Vec2> {
        let a = self.bm.a;
        let h = self.h;
        let eah = exp(a * h);
        let f1 = h * phi1(a * h);
        let f2 = h * phi2(a * h);
        let s2 = 2.0 * self.sigma;
        let mut z = Vec2::ZERO;
        let mut out = Vec::with_capacity(v.len());
        out.push(c + s2 * v[0]);
        for n in 1..v.len() {
            // Z_n = ∫₀^{t_n} e^{a(t_n−τ)} v(τ) dτ for piecewise-linear v
            z = eah * z + f1 * v[n - 1] + f2 * (v[n] - v[n - 1]);
            let t = n as f64 * h;
            out.push(self.bm.expm(t) * c + s2 * v[n] + s2 * (self.bm.a_mat * z));
        }
        out
    }

    fn output(&self, v: Vec<Vec2>, c: Vec2, fh: Vec2) -> MarchOutput {
        let times = (0..=self.steps).map(|n| n as f64 * self.h).collect();
        let traces = self.traces(&v, c);
        MarchOutput {
            times,
            v,
            traces,
            f_hat: fh,
            c,
        }
    }

    /// Implicit product-integration march for `v = (û₀, û₁)`.
    pub fn volterra_march(&self, f: &BoundaryFunction) -> Result<MarchOutput> {
        let (r, c, fh) = self.rhat_grid(f);
        let m = Mat2::IDENTITY - self.pbar(1).scale(2.0 * self.sigma / self.h);
        let cond = m.cond();
        if !(cond <= MAX_STEP_CONDITION) {
            return Err(Error::IllConditioned {
                what: "Volterra step system",
                condition: cond,
            });
        }
        let minv = m.inverse().ok_or(Error::IllConditioned {
            what: "Volterra step system",
            condition: f64::INFINITY,
        })?;
        let corr = self.pbar(1).scale(2.0 * self.sigma / self.h);
        let mut v = Vec::with_capacity(self.steps + 1);
        v.push(fh);
        for n in 1..=self.steps {
            let rhs = r[n] + self.history(&v, n, n - 1, fh) - corr * v[n - 1];
            let vn = minv * rhs;
            if !vn.is_finite() {
                return Err(Error::Numerical(alloc::format!("non-finite iterate at step {n}")));
            }
            v.push(vn);
        }
        Ok(self.output(v, c, fh))
    }

    /// `L(T) = sup t^{1/2} ‖K̂(t)‖_op` over 200 log-spaced times in
    /// `[10⁻⁶T, T]` together with the grid times.
    pub fn lipschitz_constant(&self) -> Result<f64> {
        let t_end = self.steps as f64 * self.h;
        let mut l = 0.0f64;
        for i in 0..200 {
            let t = t_end * libm::pow(1e-6, 1.0 - i as f64 / 199.0);
            l = l.max(sqrt(t) * self.assemble_khat(t)?.norm_op());
        }
        for n in 1..=self.steps {
            let t = n as f64 * self.h;
            let k = (self.hk.q_hat(t) + self.qa_hat[n] * self.bm.a_mat).scale(2.0 * self.sigma);
            l = l.max(sqrt(t) * k.norm_op());
        }
        Ok(l)
    }

    /// Picard increment envelope `(L√π)ⁿ ‖v⁰‖ Tⁿ/² / Γ(n/2 + 1)`.
    pub fn picard_bound(l: f64, v0_norm: f64, t_end: f64, n: usize) -> f64 {
        let n = n as f64;
        libm::pow(l * sqrt(PI), n) * v0_norm * libm::pow(t_end, n / 2.0) / tgamma(n / 2.0 + 1.0)
    }

    /// Smallest iteration count whose envelope is below `quad_tol`.
    pub fn certified_iterations(l: f64, v0_norm: f64, t_end: f64, quad_tol: f64, cap: usize) -> Option<usize> {
        (1..=cap).find(|&n| Self::picard_bound(l, v0_norm, t_end, n) < quad_tol)
    }

    /// Explicit fixed-point iteration of the discrete equation from
    /// `v⁰ = r̂_f`, checking each increment against the envelope.
    pub fn picard_solve(&self, f: &BoundaryFunction) -> Result<PicardOutput> {
        let (r, c, fh) = self.rhat_grid(f);
        let l = self.lipschitz_constant()?;
        let v0_norm = r.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        let t_end = self.steps as f64 * self.h;
        let mut v = r.clone();
        let mut increments = Vec::new();
        let mut bounds = Vec::new();
        let mut converged = false;
        for it in 1..=self.cfg.picard_iters.max(1) {
            let mut next = Vec::with_capacity(v.len());
            next.push(fh);
            for (n, &rn) in r.iter().enumerate().take(self.steps + 1).skip(1) {
                next.push(rn + self.history(&v, n, n, fh));
            }
            let inc = next
                .iter()
                .zip(&v)
                .fold(0.0f64, |m, (a, b)| m.max((*a - *b).norm()));
            let bound = Self::picard_bound(l, v0_norm, t_end, it);
            increments.push(inc);
            bounds.push(bound);
            v = next;
            // small slack for floating-point noise when the bound is tiny
            if inc > bound * (1.0 + 1e-9) + 1e-14 {
                return Err(Error::EnvelopeViolated {
                    iteration: it,
                    increment: inc,
                    bound,
                });
            }
            if inc < self.cfg.quad_tol {
                converged = true;
                break;
            }
        }
        Ok(PicardOutput {
            solution: self.output(v, c, fh),
            increments,
            bounds,
            lipschitz: l,
            converged,
        })
    }

    /// Solve for `v` in the configured mode.
    pub fn solve_hats(&self, f: &BoundaryFunction) -> Result<MarchOutput> {
        match self.cfg.mode {
            Mode::March => self.volterra_march(f),
            Mode::Picard => self.picard_solve(f).map(|p| p.solution),
        }
    }

    fn build_node_tables(&self) -> Result<NodeTables> {
        let n = self.cfg.n_space;
        let mut p = Vec::with_capacity(n - 1);
        let mut ip = Vec::with_capacity(n - 1);
        for i in 1..n {
            let x = i as f64 / n as f64;
            let q = |s: f64| self.hk.q_row(s, x).0;
            let cum = cumulative::<2, 8>(&q, self.h, self.steps, self.bm.a, self.tol)?;
            let mut pi = Vec::with_capacity(self.steps + 1);
            let mut ipi = Vec::with_capacity(self.steps + 1);
            for m in 0..=self.steps {
                pi.push(row_mul(Vec2(cum.q1[m]), &self.bm.pi0) + row_mul(Vec2(cum.qa[m]), &self.bm.pi_a));
                ipi.push(row_mul(Vec2(cum.c1[m]), &self.bm.pi0) + row_mul(Vec2(cum.qb[m]), &self.bm.pi_a));
            }
            p.push(pi);
            ip.push(ipi);
        }
        Ok(NodeTables { p, ip })
    }

    /// Tabulate the per-node moments once so that repeated
    /// reconstructions reuse them.
    pub fn prepare_reconstruction(&mut self) -> Result<()> {
        if self.nodes.is_none() {
            self.nodes = Some(self.build_node_tables()?);
        }
        Ok(())
    }

    /// Time-row indices emitted by [`reconstruct_field`](Self::reconstruct_field).
    pub fn output_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = (0..=self.steps).step_by(self.cfg.output_stride).collect();
        if *rows.last().unwrap() != self.steps {
            rows.push(self.steps);
        }
        rows
    }

    /// Interior values from the hat trajectory, boundary columns from the
    /// traces, on the configured output rows.
    pub fn reconstruct_field(&self, f: &BoundaryFunction, sol: &MarchOutput) -> Result<SpaceTimeField> {
        self.reconstruct_rows(f, sol, &self.output_rows())
    }

    pub fn reconstruct_rows(&self, f: &BoundaryFunction, sol: &MarchOutput, rows: &[usize]) -> Result<SpaceTimeField> {
        if sol.v.len() != self.steps + 1 {
            return Err(domain!("trajectory length does not match the time grid"));
        }
        let local;
        let tables = match &self.nodes {
            Some(t) => t,
            None => {
                local = self.build_node_tables()?;
                &local
            }
        };
        let n = self.cfg.n_space;
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let src = self.source(f);
        let inv_h = 1.0 / self.h;
        let dv: Vec<Vec2> = (1..sol.v.len()).map(|j| (sol.v[j] - sol.v[j - 1]).scale(inv_h)).collect();
        let s2 = 2.0 * self.sigma;
        let mut values = Vec::with_capacity(rows.len());
        let mut tr0 = Vec::with_capacity(rows.len());
        let mut tr1 = Vec::with_capacity(rows.len());
        for &row in rows {
            let mut u = vec![0.0; n + 1];
            if row == 0 {
                u[0] = f.f0;
                u[n] = f.f1;
                for (i, ui) in u.iter_mut().enumerate().take(n).skip(1) {
                    *ui = f.interior(nodes[i]);
                }
            } else {
                let t = row as f64 * self.h;
                for i in 1..n {
                    let p = &tables.p[i - 1];
                    let ip = &tables.ip[i - 1];
                    let mut conv = p[row].dot(sol.f_hat);
                    for j in 1..=row {
                        conv += (ip[row - j + 1] - ip[row - j]).dot(dv[j - 1]);
                    }
                    u[i] = self.h_with(&src, t, nodes[i]) + p[row].dot(sol.c) + s2 * conv;
                }
                u[0] = sol.traces[row][0];
                u[n] = sol.traces[row][1];
            }
            tr0.push(u[0]);
            tr1.push(u[n]);
            values.push(u);
        }
        Ok(SpaceTimeField {
            times: rows.iter().map(|&r| r as f64 * self.h).collect(),
            nodes,
            values,
            boundary_traces: [tr0, tr1],
        })
    }

    /// March and reconstruct in one call.
    pub fn solve(&self, f: &BoundaryFunction) -> Result<(MarchOutput, SpaceTimeField)> {
        let sol = self.solve_hats(f)?;
        let field = self.reconstruct_field(f, &sol)?;
        Ok((sol, field))
    }
}
