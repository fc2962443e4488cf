use proptest::prelude::*;
use wentzell_core::linalg::Vec2;
use wentzell_core::riccati::*;

const E: f64 = core::f64::consts::E;

fn coth1() -> f64 {
    1.0 / 1.0f64.tanh()
}

fn sweep() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for &mu in &[0.0, 1.0, -1.0] {
        for &s in &[0.5, 1.0, 2.0, coth1()] {
            v.push((mu, s));
        }
    }
    v
}

// Reference roots from an independent bisection on the reduced
// characteristic equations (frozen).
const OMEGA_TABLE: [(f64, f64, f64, f64); 5] = [
    (0.0, 1.0, 0.0, 2.399_357_280_515_468),
    (0.0, 2.0, 3.830_016_096_309_075, 4.130_676_277_949_409_5),
    (1.0, 2.0, 2.935_674_804_916_02, 5.001_808_541_407_329),
    (1.0, 0.5, 1.0, 2.065_338_138_974_704_8),
    (0.0, 0.5, 0.0, 1.543_404_638_418_208_7),
];

#[test]
fn omegas_match_reference_roots() {
    for &(mu, s, w0, w1) in &OMEGA_TABLE {
        let p = ModelParams::new(mu, s).unwrap();
        let (a, b) = solve_omegas(&p).unwrap();
        assert!((a - w0).abs() < 1e-9, "omega0 at ({mu},{s}): {a} vs {w0}");
        assert!((b - w1).abs() < 1e-9, "omega1 at ({mu},{s}): {b} vs {w1}");
    }
    let c = coth1();
    let (a, b) = solve_omegas(&ModelParams::new(1.0, c).unwrap()).unwrap();
    assert_eq!(a, 1.0);
    assert!((b - 3.639_187_835_953_146_4).abs() < 1e-9);
}

#[test]
fn mu_zero_reductions() {
    // ω = 2σ coth(ω/2) and ω = 2σ tanh(ω/2)
    let s = 2.0;
    let (w0, w1) = solve_omegas(&ModelParams::new(0.0, s).unwrap()).unwrap();
    assert!((w1 - 2.0 * s / (w1 / 2.0).tanh()).abs() < 1e-10);
    assert!((w0 - 2.0 * s * (w0 / 2.0).tanh()).abs() < 1e-10);
}

#[test]
fn g0_vanishes_at_abs_mu() {
    let p = ModelParams::new(1.0, 0.7).unwrap();
    assert!(char_g0(1.0, &p).abs() < 1e-14);
    let p = ModelParams::new(-1.0, 0.7).unwrap();
    assert!(char_g0(1.0, &p).abs() < 1e-14);
}

#[test]
fn g0_has_no_interior_root_when_critical() {
    let p = ModelParams::new(0.0, 1.0).unwrap();
    let (_, w1) = solve_omegas(&p).unwrap();
    let n = 2000;
    for i in 1..n {
        let w = w1 * i as f64 / n as f64;
        assert!(char_g0(w, &p) > 0.0 || w < 1e-3, "g0({w}) = {}", char_g0(w, &p));
    }
}

#[test]
fn g1_changes_sign_exactly_once() {
    for (mu, s) in sweep() {
        let p = ModelParams::new(mu, s).unwrap();
        let hi = 50.0 * (1.0 + s + mu.abs());
        let n = 10_000;
        let mut changes = 0;
        let mut prev = char_g1(hi / n as f64 * 0.5, &p);
        for i in 1..=n {
            let v = char_g1(hi * i as f64 / n as f64, &p);
            if (prev < 0.0) != (v < 0.0) {
                changes += 1;
            }
            prev = v;
        }
        assert_eq!(changes, 1, "({mu},{s})");
    }
}

#[test]
fn eigenrow_ratios() {
    let w = left_eigenrows(&ModelParams::new(1.0, 0.5).unwrap(), 1.0, 2.0).unwrap();
    assert!((w.0[0][1] - E * E).abs() < 1e-12);
    let w = left_eigenrows(&ModelParams::new(0.0, 1.0).unwrap(), 0.0, 2.4).unwrap();
    assert_eq!(w.0[0][1], 1.0);
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        for (om, plus) in [(sol.omega0, true), (sol.omega1, false)] {
            if om == 0.0 {
                continue;
            }
            let prod = eigenrow_ratio(mu, om, plus) * eigenrow_ratio_reciprocal(mu, om, plus);
            assert!((prod - 1.0).abs() < 1e-12, "({mu},{s}) {plus}: {prod}");
        }
    }
}

#[test]
fn boundary_values_and_positivity() {
    let sol = RiccatiSolution::new(1.0, 2.0).unwrap();
    let j0 = sol.eval_j(0.0);
    let j1 = sol.eval_j(1.0);
    assert!((j0 - Vec2::new(4.0, 0.0)).norm_inf() < 1e-12);
    assert!((j1 - Vec2::new(0.0, 4.0)).norm_inf() < 1e-12);
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        for i in 0..=1000 {
            let j = sol.eval_j(i as f64 / 1000.0);
            assert!(j[0] >= -1e-10 && j[1] >= -1e-10, "({mu},{s}) x={i}");
        }
    }
}

#[test]
fn ode_residual_closed_form_and_finite_difference() {
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        assert!(sol.ode_residual(1000) < 1e-7, "({mu},{s})");
    }
    // five-point finite differences on the closed form
    let sol = RiccatiSolution::new(1.0, 2.0).unwrap();
    let h = 1e-3;
    for i in 2..=998 {
        let x = i as f64 * h;
        let f = |k: i32| sol.eval_j(x + k as f64 * h);
        let d1 = (f(-2) - f(2) + 8.0 * (f(1) - f(-1))).scale(1.0 / (12.0 * h));
        let d2 = (16.0 * (f(1) + f(-1)) - f(2) - f(-2) - 30.0 * f(0)).scale(1.0 / (12.0 * h * h));
        let r = 0.5 * d2 - 1.0 * d1 + sol.b * f(0);
        assert!(r.norm_inf() < 1e-5, "x={x}: {}", r.norm_inf());
    }
}

#[test]
fn spectrum_law() {
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        assert_eq!(sol.lambda0, 0.5 * (mu * mu - sol.omega0 * sol.omega0));
        assert!(sol.lambda1 < sol.lambda0 && sol.lambda0 <= 0.0);
        assert_eq!(sol.lambda0 < 0.0, sol.params.regime == Regime::Supercritical);
        assert!((sol.b * sol.v0 - sol.lambda0 * sol.v0).norm_inf() < 1e-10);
        assert!((sol.b * sol.v1 - sol.lambda1 * sol.v1).norm_inf() < 1e-10);
        assert!(sol.v0[0] > 0.0 && sol.v0[1] > 0.0);
        assert!(sol.v1[0] > 0.0 && sol.v1[1] < 0.0);
        assert!((sol.v0[0] + sol.v0[1] - 1.0).abs() < 1e-15);
        assert!((sol.v1[0] - sol.v1[1] - 1.0).abs() < 1e-15);
    }
    let sol = RiccatiSolution::new(0.0, 1.0).unwrap();
    assert_eq!(sol.lambda0, 0.0);
    assert!((sol.lambda1 + 2.878_5).abs() < 1e-4);
}

#[test]
fn fixed_point_of_b() {
    for &(mu, s) in &[(0.0, 1.0), (0.0, 2.0), (1.0, 2.0), (1.0, 0.5)] {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        assert!((sol.b_from_j() - sol.b).norm_max() < 1e-8, "({mu},{s})");
        let k = sol.b * Vec2::new(1.0 - sol.masses[0], 1.0 - sol.masses[1]);
        assert!(k.norm_inf() < 1e-8);
    }
    let p = ModelParams::new(0.3, 1.5).unwrap();
    let b = b_of_j(&p, Vec2::ZERO, Vec2::ZERO);
    assert!((b - wentzell_core::linalg::Mat2::diag(-0.9, 0.9)).norm_max() < 1e-15);
}

#[test]
fn mass_dichotomy() {
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        if sol.params.regime == Regime::Subcritical {
            assert!(sol.masses[0] < 1.0 && sol.masses[1] < 1.0);
        } else {
            assert!((sol.masses - Vec2::new(1.0, 1.0)).norm_inf() < 1e-8, "({mu},{s}) {:?}", sol.masses);
        }
        assert_eq!(sol.m_j, sol.masses[0].max(sol.masses[1]));
    }
    let sol = RiccatiSolution::new(1.0, 0.5).unwrap();
    assert!(sol.masses[0] < 1.0 - 1e-3 && sol.masses[1] < 1.0 - 1e-3);
    // regression anchors
    assert!((sol.masses[0] - 0.563_234_032_280_206_2).abs() < 1e-10);
    assert!((sol.masses[1] - 0.356_106_921_094_552_5).abs() < 1e-10);
    let sol = RiccatiSolution::new(0.0, 0.5).unwrap();
    assert!((sol.masses[0] - 0.5).abs() < 1e-10 && (sol.masses[1] - 0.5).abs() < 1e-10);
}

#[test]
fn critical_mass_relation() {
    let s = coth1();
    let sol = RiccatiSolution::new(1.0, s).unwrap();
    let lhs = sol.masses[0] + E * E * sol.masses[1];
    let rhs = 2.0 * s * E * 1.0f64.sinh();
    assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
}

#[test]
fn sinh_ratio_difference_is_nonnegative() {
    // sinh(yω₀)/sinh ω₀ − sinh(yω₁)/sinh ω₁ vanishes at both ends and is
    // nonnegative between; the variant normalized by ω_k instead is not.
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        let f = |w: f64, y: f64| wentzell_core::math::sinh_ratio(y, w);
        let g = |w: f64, y: f64| if w == 0.0 { y } else { (y * w).sinh() / w };
        for i in 0..=200 {
            let y = i as f64 / 200.0;
            assert!(f(sol.omega0, y) - f(sol.omega1, y) >= -1e-14);
        }
        assert!(g(sol.omega0, 1.0) - g(sol.omega1, 1.0) < 0.0);
    }
}

#[test]
fn mirror_symmetry() {
    for &(mu, s) in &[(1.0, 0.5), (1.0, 2.0), (0.4, 1.2)] {
        let a = RiccatiSolution::new(mu, s).unwrap();
        let b = RiccatiSolution::new(-mu, s).unwrap();
        assert!((a.omega0 - b.omega0).abs() < 1e-12 && (a.omega1 - b.omega1).abs() < 1e-12);
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((a.eval_j(x)[0] - b.eval_j(1.0 - x)[1]).abs() < 1e-9);
            assert!((a.eval_j(x)[1] - b.eval_j(1.0 - x)[0]).abs() < 1e-9);
        }
    }
}

#[test]
fn w_is_well_conditioned() {
    for (mu, s) in sweep() {
        let sol = RiccatiSolution::new(mu, s).unwrap();
        let n = sol.w.norm_max();
        assert!(sol.w.det().abs() > 1e-10 * n * n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_hold_on_random_parameters(mu in -2.0f64..2.0, sigma in 0.2f64..4.0) {
        let sol = RiccatiSolution::new(mu, sigma).unwrap();
        prop_assert!(sol.omega0 < sol.omega1);
        prop_assert!(sol.omega1 > mu.abs());
        match sol.params.regime {
            Regime::Supercritical => prop_assert!(sol.omega0 > mu.abs()),
            _ => prop_assert_eq!(sol.omega0, mu.abs()),
        }
        prop_assert!(sol.lambda1 < sol.lambda0 && sol.lambda0 <= 0.0);
        prop_assert!(sol.ode_residual(200) < 1e-7);
        prop_assert!((sol.b_from_j() - sol.b).norm_max() < 1e-7 * (1.0 + sol.b.norm_max()));
        let ones = sol.masses - Vec2::new(1.0, 1.0);
        if sol.params.regime == Regime::Subcritical {
            prop_assert!(ones[0] < 0.0 && ones[1] < 0.0);
        } else {
            prop_assert!(ones.norm_inf() < 1e-8);
        }
    }
}
