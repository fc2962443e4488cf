use std::f64::consts::PI;

use wentzell_core::analysis::{closed_forms, continuous_invariant_member, defect, defect_of_row, invariant_member};
use wentzell_core::kernel::Kernel;
use wentzell_core::linalg::Vec2;
use wentzell_core::math::linear_fit;
use wentzell_core::quad;
use wentzell_core::riccati::RiccatiSolution;
use wentzell_core::semigroup::*;

fn cfg(dt: f64, t_end: f64, stride: usize) -> VolterraConfig {
    VolterraConfig {
        dt,
        t_end,
        output_stride: stride,
        ..Default::default()
    }
}

fn sine_data() -> BoundaryFunction {
    BoundaryFunction::closed(|x| (PI * x).sin(), 0.3, 0.3)
}

fn scaled_sup_diff(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    scaled_sup_difference(a, b).unwrap()
}

#[test]
fn hat_transform_examples() {
    let rule = spatial_rule(200);
    let one = BoundaryFunction::constant(1.0);
    let h = hat_transform(&one, 0.0, &rule);
    assert!((h[0] - 0.5).abs() < 1e-14 && (h[1] - 0.5).abs() < 1e-14);

    let f = BoundaryFunction::closed(|x| x, 0.0, 1.0);
    let h = hat_transform(&f, 1.0, &rule);
    let e2 = (2.0f64).exp();
    let exact = quad::adaptive1(|x| x * ((2.0 * x).exp() - 1.0) / (e2 - 1.0), 0.0, 1.0, 1e-14, 1e-14).unwrap();
    assert!((h[1] - exact).abs() < 1e-10);
    let (w0, w1) = hat_weights(1.0, 0.0);
    assert_eq!((w0, w1), (1.0, 0.0));
}

#[test]
fn boundary_matrix_examples() {
    let a = boundary_matrix_a(1e-12, 1.0);
    assert!((a - wentzell_core::linalg::Mat2::new(1.0, -1.0, -1.0, 1.0)).norm_max() < 1e-10);
    let a = boundary_matrix_a(1.0, 2.0);
    let e2 = (2.0f64).exp();
    let pre = 4.0 / (e2 - 1.0);
    assert!((pre - 0.6261).abs() < 1e-4);
    assert!((a.0[0][0] - pre * e2).abs() < 1e-12 && (a.0[1][0] + pre).abs() < 1e-14);
    for &(mu, s) in &[(0.0, 1.0), (1.0, 2.0), (-2.0, 0.4)] {
        let a = boundary_matrix_a(mu, s);
        assert!((a.0[0][0] + a.0[0][1]).abs() < 1e-12 && (a.0[1][0] + a.0[1][1]).abs() < 1e-12);
    }
}

#[test]
fn zero_data_gives_zero() {
    let sg = Semigroup::new(1.0, 2.0, cfg(1e-2, 0.5, 5)).unwrap();
    let z = BoundaryFunction::zero();
    assert_eq!(sg.assemble_rhat(&z, 0.3).unwrap(), Vec2::ZERO);
    let m = sg.volterra_march(&z).unwrap();
    assert!(m.v.iter().all(|v| *v == Vec2::ZERO));
    let p = Semigroup::new(1.0, 2.0, VolterraConfig { mode: Mode::Picard, ..cfg(1e-2, 0.5, 5) })
        .unwrap()
        .picard_solve(&z)
        .unwrap();
    assert!(p.converged);
    assert_eq!(p.increments.len(), 1);
    assert!(p.solution.v.iter().all(|v| *v == Vec2::ZERO));
}

#[test]
fn kernel_singularity_is_inverse_square_root() {
    let sg = Semigroup::new(1.0, 2.0, cfg(1e-3, 1.0, 10)).unwrap();
    let l = sg.lipschitz_constant().unwrap();
    assert!(l.is_finite() && l > 0.0);
    // the scaled norm approaches a positive limit as t ↓ 0
    let a = 1e-8f64.sqrt() * sg.assemble_khat(1e-8).unwrap().norm_op();
    let b = 1e-7f64.sqrt() * sg.assemble_khat(1e-7).unwrap().norm_op();
    assert!(a > 0.0 && (a - b).abs() < 0.01 * a);
    assert!(sg.assemble_khat(0.0).is_err());
}

#[test]
fn source_time_derivative_matches_closed_form() {
    let f = BoundaryFunction::closed(|x| 1.0 + x * (1.0 - x) + (3.0 * x).sin(), 0.0, 0.0);
    for &mu in &[0.0, 1.0, -0.7] {
        let sg = Semigroup::new(mu, 1.5, cfg(1e-2, 1.0, 10)).unwrap();
        for &t in &[0.05, 0.2, 0.6] {
            let h = 1e-5;
            let num = (sg.h_hat(&f, t + h).unwrap() - sg.h_hat(&f, t - h).unwrap()).scale(0.5 / h);
            let exact = sg.h_hat_dot(&f, t);
            assert!((num - exact).norm_inf() < 1e-6, "mu={mu} t={t}: {num:?} vs {exact:?}");
        }
    }
}

#[test]
fn conservative_data_is_stationary() {
    let sol = RiccatiSolution::new(0.0, 2.0).unwrap();
    let m = sol.masses();
    let f = BoundaryFunction::closed(|_| 1.0, m[0], m[1]);
    let sg = Semigroup::new(0.0, 2.0, cfg(1e-3, 1.0, 50)).unwrap();
    let (march, field) = sg.solve(&f).unwrap();
    for v in &march.v {
        assert!((*v - march.f_hat).norm_inf() < 1e-8);
    }
    for row in &field.values {
        for u in row {
            assert!((u - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn march_is_second_order_for_continuous_data() {
    let f = BoundaryFunction::closed(|x| 1.0 + x * x, 1.0, 2.0);
    let t_end = 0.5;
    let ends: Vec<Vec2> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| *Semigroup::new(1.0, 2.0, cfg(dt, t_end, 1)).unwrap().volterra_march(&f).unwrap().v.last().unwrap())
        .collect();
    let order = ((ends[0] - ends[1]).norm_inf() / (ends[1] - ends[2]).norm_inf()).log2();
    assert!(order >= 1.8, "observed order {order}");
}

#[test]
fn picard_obeys_envelope_and_agrees_with_march() {
    let c = VolterraConfig {
        mode: Mode::Picard,
        picard_iters: 400,
        ..cfg(1e-3, 1.0, 10)
    };
    let sg = Semigroup::new(1.0, 2.0, c).unwrap();
    let f = sine_data();
    let p = sg.picard_solve(&f).unwrap();
    assert!(p.converged, "increments {:?}", p.increments);
    for (n, (inc, b)) in p.increments.iter().zip(&p.bounds).enumerate().take(12) {
        assert!(inc <= b, "iteration {}: {inc} > {b}", n + 1);
    }
    let m = sg.volterra_march(&f).unwrap();
    let diff = (*m.v.last().unwrap() - *p.solution.v.last().unwrap()).norm_inf();
    assert!(diff <= 3.0 * c.quad_tol, "march vs picard {diff}");
}

#[test]
fn initial_data_is_recovered() {
    let f = BoundaryFunction::closed(|x| (PI * x).sin() + 0.5 * x, 0.0, 0.5);
    let err = |dt: f64| {
        let sg = Semigroup::new(0.5, 1.5, cfg(dt, 2.0 * dt, 1)).unwrap();
        let (_, fld) = sg.solve(&f).unwrap();
        (1..fld.nodes.len() - 1)
            .map(|k| (fld.values[1][k] - f.eval(fld.nodes[k])).abs())
            .fold(0.0, f64::max)
    };
    let (e2, e3) = (err(1e-2), err(1e-3));
    assert!(e3 < e2 && e3 < 5e-3, "{e2} {e3}");
}

#[test]
fn eigenfunction_h1_decays_exactly() {
    let sol = RiccatiSolution::new(0.0, 2.0).unwrap();
    let cf = closed_forms(&sol).unwrap();
    let f = cf.h1_function();
    let sg = Semigroup::new(0.0, 2.0, cfg(1e-3, 1.0, 50)).unwrap();
    let (_, fld) = sg.solve(&f).unwrap();
    let scale = (0..=200).map(|i| cf.h1(i as f64 / 200.0).abs()).fold(0.0, f64::max);
    for (i, &t) in fld.times.iter().enumerate() {
        let g = (-t * sol.lambda1).exp();
        for (k, &x) in fld.nodes.iter().enumerate() {
            let rel = (fld.values[i][k] - g * cf.h1(x)).abs() / (g * scale);
            assert!(rel < 1e-3, "t={t} x={x} rel={rel}");
        }
    }
}

#[test]
fn boundary_condition_residual() {
    let (mu, sigma) = (1.0, 2.0);
    let f = sine_data();
    let sg = Semigroup::new(mu, sigma, cfg(1e-3, 1.0, 1)).unwrap();
    let m = sg.volterra_march(&f).unwrap();
    let n = 200;
    let h = 1.0 / n as f64;
    for &row in &[100usize, 400, 800] {
        let fld = sg.reconstruct_rows(&f, &m, &[row]).unwrap();
        let u = &fld.values[0];
        let dt = sg.dt();
        let udot0 = (m.traces[row + 1][0] - m.traces[row - 1][0]) / (2.0 * dt);
        let udot1 = (m.traces[row + 1][1] - m.traces[row - 1][1]) / (2.0 * dt);
        let up0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        let up1 = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
        let scale = fld.sup_norm(0).max(1.0);
        let r0 = (udot0 + sigma * up0).abs() / scale;
        let r1 = (udot1 - sigma * up1).abs() / scale;
        assert!(r0 < 1e-2 && r1 < 1e-2, "row {row}: {r0} {r1}");
    }
}

#[test]
fn fd_absorbed_case() {
    let f = BoundaryFunction::closed(|x| (PI * x).sin() + x, 0.4, 0.8);
    let fd = fd_solve(&f, 0.5, 0.0, &FdConfig { n_space: 400, dt: 2.5e-4, output_stride: 400, ..Default::default() }).unwrap();
    for i in 0..fd.times.len() {
        assert_eq!(fd.values[i][0], 0.4);
        assert_eq!(*fd.values[i].last().unwrap(), 0.8);
    }
    let k = Kernel::default();
    let mu = 0.5;
    let t = fd.times[fd.times.len() - 1];
    let row = fd.values.len() - 1;
    for &x in &[0.1, 0.25, 0.5, 0.8] {
        let bulk = quad::adaptive1(|y| k.q0_absorbed(t, x, y, mu).unwrap() * f.interior(y), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        let hits = quad::sqrt_substituted(
            |s| if s <= 0.0 { [0.0, 0.0] } else { [k.q0(s, x, mu).unwrap(), k.q1(s, x, mu).unwrap()] },
            0.0,
            t,
            1e-12,
            1e-12,
        )
        .unwrap();
        let exact = bulk + hits[0] * f.f0 + hits[1] * f.f1;
        let j = (x * 400.0f64).round() as usize;
        assert!((fd.values[row][j] - exact).abs() < 1e-4, "x={x}: {} vs {exact}", fd.values[row][j]);
    }
}

#[test]
fn fd_agrees_with_volterra() {
    let f = sine_data();
    let sg = Semigroup::new(1.0, 2.0, cfg(1e-3, 1.0, 50)).unwrap();
    let (_, fld) = sg.solve(&f).unwrap();
    let fd = fd_solve(&f, 1.0, 2.0, &FdConfig { n_space: 1600, dt: 1e-4, output_stride: 500, ..Default::default() }).unwrap();
    let d = scaled_sup_diff(&fld, &fd);
    assert!(d <= 1e-3, "scaled sup difference {d}");
}

#[test]
fn linearity() {
    let f = sine_data();
    let g = BoundaryFunction::closed(|x| if x < 0.4 { 1.0 } else { -0.5 }, -1.0, 2.0);
    let mut sg = Semigroup::new(-0.5, 1.2, cfg(2e-3, 0.5, 25)).unwrap();
    sg.prepare_reconstruction().unwrap();
    let (_, uf) = sg.solve(&f).unwrap();
    let (_, ug) = sg.solve(&g).unwrap();
    let (_, uh) = sg.solve(&BoundaryFunction::linear_combination(2.0, &f, -3.0, &g)).unwrap();
    for i in 0..uf.times.len() {
        for k in 0..uf.nodes.len() {
            let lin = 2.0 * uf.values[i][k] - 3.0 * ug.values[i][k];
            assert!((uh.values[i][k] - lin).abs() < 1e-9 * (1.0 + lin.abs()));
        }
    }
}

#[test]
fn semigroup_property() {
    let (mu, sigma) = (0.5, 1.5);
    let f = BoundaryFunction::closed(|x| (2.0 * PI * x).cos() + 0.5, 1.0, 0.0);
    let (s, t) = (0.3, 0.4);
    let (_, full) = Semigroup::new(mu, sigma, cfg(1e-3, s + t, 10)).unwrap().solve(&f).unwrap();
    let (_, first) = Semigroup::new(mu, sigma, cfg(1e-3, s, 300)).unwrap().solve(&f).unwrap();
    let mid = first.row_function(first.times.len() - 1).unwrap();
    let (_, second) = Semigroup::new(mu, sigma, cfg(1e-3, t, 400)).unwrap().solve(&mid).unwrap();
    let a = &full.values[full.row_at(s + t)];
    let b = second.values.last().unwrap();
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    // restart data are interpolated from the node grid
    assert!(d < 2e-3, "restart mismatch {d}");
}

#[test]
fn defect_evolves_by_boundary_generator() {
    for &(mu, sigma) in &[(0.0, 2.0), (0.0, 1.0), (1.0, 0.5)] {
        let sol = RiccatiSolution::new(mu, sigma).unwrap();
        let f = BoundaryFunction::closed(|x| (3.0 * x).sin() + 0.2, 1.0, -0.5);
        let d0 = defect(&f, &sol);
        let (_, fld) = Semigroup::new(mu, sigma, cfg(1e-3, 1.0, 20)).unwrap().solve(&f).unwrap();
        for (i, &t) in fld.times.iter().enumerate() {
            let expect = sol.b.scale(-t).expm(1.0) * d0;
            let got = defect_of_row(&fld, i, &sol);
            let err = (got - expect).norm_inf() / expect.norm_inf().max(1.0);
            assert!(err < 1e-3, "({mu},{sigma}) t={t}: {got:?} vs {expect:?}");
        }
    }
}

/// Regimes with `m(J) ≤ 1` and horizons short enough that discretization
/// error, which the unstable `λ₁` mode amplifies like `e^{−tλ₁}`, stays
/// below the tolerance.
const INVARIANT_CASES: [(f64, f64, f64); 4] = [(0.0, 2.0, 0.4), (0.0, 1.0, 1.0), (1.0, 1.313_035_285_499_331_5, 0.5), (1.0, 0.5, 1.0)];

#[test]
fn contraction_on_invariant_subspace() {
    for &(mu, sigma, t_end) in &INVARIANT_CASES {
        let sol = RiccatiSolution::new(mu, sigma).unwrap();
        assert!(sol.m_j <= 1.0 + 1e-12);
        let f = invariant_member(|x| (5.0 * x).cos() * (1.0 - x), &sol, 0.0);
        let norm_f = (0..=1000).map(|i| f.eval(i as f64 / 1000.0).abs()).fold(0.0, f64::max);
        let (_, fld) = Semigroup::new(mu, sigma, cfg(1e-3, t_end, 10)).unwrap().solve(&f).unwrap();
        for i in 0..fld.times.len() {
            assert!(fld.sup_norm(i) <= norm_f + 1e-4, "({mu},{sigma}) row {i}");
        }
    }
}

#[test]
fn invariant_subspace_is_preserved() {
    for &(mu, sigma, t_end) in &INVARIANT_CASES {
        let sol = RiccatiSolution::new(mu, sigma).unwrap();
        let f = continuous_invariant_member(|x| (5.0 * x).cos() * (1.0 - x), &sol).unwrap();
        assert!(defect(&f, &sol).norm_inf() < 1e-12);
        let (_, fld) = Semigroup::new(mu, sigma, cfg(1e-3, t_end, 10)).unwrap().solve(&f).unwrap();
        for i in 0..fld.times.len() {
            let d = defect_of_row(&fld, i, &sol).norm_inf();
            assert!(d < 1e-4, "({mu},{sigma}) t={} defect {d}", fld.times[i]);
        }
    }
}

#[test]
fn growth_envelope() {
    let (mu, sigma) = (0.0, 2.0);
    let sol = RiccatiSolution::new(mu, sigma).unwrap();
    let mut sg = Semigroup::new(mu, sigma, cfg(2e-3, 1.0, 10)).unwrap();
    sg.prepare_reconstruction().unwrap();
    let data = [
        sine_data(),
        BoundaryFunction::closed(|x| x, 1.0, -1.0),
        BoundaryFunction::closed(|x| if x < 0.5 { 1.0 } else { 0.0 }, 0.0, 0.0),
        BoundaryFunction::constant(-1.0),
    ];
    // fit C on the first datum, then check the others against a 5x margin
    let ratio = |f: &BoundaryFunction| {
        let (_, fld) = sg.solve(f).unwrap();
        let nf = (0..=1000).map(|i| f.eval(i as f64 / 1000.0).abs()).fold(0.0, f64::max);
        (0..fld.times.len())
            .map(|i| fld.sup_norm(i) / ((-fld.times[i] * sol.lambda1).exp() * nf))
            .fold(0.0, f64::max)
    };
    let c = ratio(&data[0]);
    for f in &data[1..] {
        let r = ratio(f);
        assert!(r <= 5.0 * c.max(1.0), "{r} vs C = {c}");
    }
}

#[test]
fn regularity_scaling() {
    let (mu, sigma) = (0.0, 0.5);
    let f = BoundaryFunction::closed(|x| if x < 0.5 { 1.0 } else { 0.0 }, 1.0, 0.0);
    let dt = 1e-4;
    let sg = Semigroup::new(mu, sigma, cfg(dt, 0.11, 1)).unwrap();
    let m = sg.volterra_march(&f).unwrap();
    let ts: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    let mut rows = Vec::new();
    for &t in &ts {
        let r = (t / dt).round() as usize;
        rows.extend([r - 1, r, r + 1]);
    }
    let fld = sg.reconstruct_rows(&f, &m, &rows).unwrap();
    let h = 1.0 / 200.0;
    let (mut lt, mut ld, mut lp) = (vec![], vec![], vec![]);
    for (i, &t) in ts.iter().enumerate() {
        let (a, b, c) = (&fld.values[3 * i], &fld.values[3 * i + 1], &fld.values[3 * i + 2]);
        let udot = a.iter().zip(c).map(|(x, y)| ((y - x) / (2.0 * dt)).abs()).fold(0.0, f64::max);
        let uprime = b.windows(2).map(|w| ((w[1] - w[0]) / h).abs()).fold(0.0, f64::max);
        lt.push(t.ln());
        ld.push(udot.ln());
        lp.push(uprime.ln());
    }
    let (sd, _, _) = linear_fit(&lt, &ld);
    let (sp, _, _) = linear_fit(&lt, &lp);
    assert!((-1.1..=-0.9).contains(&sd), "u-dot slope {sd}");
    assert!((-0.6..=-0.45).contains(&sp), "u-prime slope {sp}");
}
