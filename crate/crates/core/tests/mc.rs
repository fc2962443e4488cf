use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use wentzell_core::analysis::{continuous_invariant_member, invariant_member};
use wentzell_core::mc::*;
use wentzell_core::riccati::{ModelParams, RiccatiSolution};
use wentzell_core::semigroup::{Semigroup, VolterraConfig};

fn params(mu: f64, sigma: f64) -> ModelParams {
    ModelParams::new(mu, sigma).unwrap()
}

fn close3(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12 && (a.2 - b.2).abs() < 1e-12
}

#[test]
fn fold_examples() {
    // pushes are regulator increments: twice the overshoot per reflection
    assert!(close3(fold(1.3), (0.7, 0.0, 0.6)));
    assert!(close3(fold(-0.2), (0.2, 0.4, 0.0)));
    assert!(close3(fold(2.2), (0.2, 0.4, 2.4)));
    assert_eq!(fold(0.4), (0.4, 0.0, 0.0));
}

proptest! {
    #[test]
    fn fold_is_a_skorohod_decomposition(x in -5.0f64..5.0) {
        let (y, p0, p1) = fold(x);
        prop_assert!((0.0..=1.0).contains(&y));
        prop_assert!(p0 >= 0.0 && p1 >= 0.0);
        prop_assert!((y - (x + p0 - p1)).abs() < 1e-12);
    }

    #[test]
    fn path_identity_and_monotone_regulators(seed in 0u64..1000, mu in -2.0f64..2.0, sigma in 0.2f64..5.0, x0 in 0.0f64..1.0) {
        let d = Dynamics::new(mu, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = PathState::new(x0);
        for i in 0..2000 {
            let xi: f64 = StandardNormal.sample(&mut rng);
            let next = if i % 2 == 0 {
                d.step(&s, 1e-3, xi)
            } else {
                let u = 1.0 - rand::Rng::random::<f64>(&mut rng);
                d.step_exact(&s, 1e-3, xi, || u)
            };
            prop_assert!((0.0..=1.0).contains(&next.x));
            prop_assert!(next.l0 >= s.l0 && next.l1 >= s.l1);
            prop_assert!((next.phi - (next.clock - (next.l0 + next.l1) / sigma)).abs() <= 1e-12 * (1.0 + next.clock));
            prop_assert!(next.phi <= next.clock);
            s = next;
        }
    }
}

#[test]
fn interior_step_accrues_no_local_time() {
    let d = Dynamics::new(0.3, 2.0).unwrap();
    let s = PathState::new(0.5);
    let n = d.step(&s, 1e-4, 0.7);
    assert_eq!((n.l0, n.l1), (0.0, 0.0));
    assert!((n.phi - 1e-4).abs() < 1e-18);
    let e = d.step_exact(&s, 1e-4, 0.7, || panic!("no bridge needed in the interior"));
    assert_eq!((e.l0, e.l1), (0.0, 0.0));
}

#[test]
fn boundary_layer_local_time_mean() {
    let dt = 1e-4;
    let target = (2.0 * dt / std::f64::consts::PI).sqrt();
    let d = Dynamics::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1_000_000;
    let (mut euler, mut exact) = (0.0, 0.0);
    let s = PathState::new(0.0);
    for _ in 0..n {
        let xi: f64 = StandardNormal.sample(&mut rng);
        euler += d.step(&s, dt, xi).l0;
        let u = 1.0 - rand::Rng::random::<f64>(&mut rng);
        exact += d.step_exact(&s, dt, xi, || u).l0;
    }
    for mean in [euler / n as f64, exact / n as f64] {
        assert!((mean / target - 1.0).abs() < 0.05, "{mean} vs {target}");
    }
}

#[test]
fn config_validation() {
    let ok = SimConfig::default();
    assert!(ok.validate().is_ok());
    for bad in [
        SimConfig { dt: 2e-3, ..ok },
        SimConfig { phi_floor: -1.0, ..ok },
        SimConfig { n_paths: 0, ..ok },
        SimConfig { n_bins: 0, ..ok },
        SimConfig { max_step: 0.1, ..ok },
    ] {
        assert!(bad.validate().is_err());
    }
    assert!(run_exit(0, &params(0.0, 1.0), &SimConfig { n_paths: 10, ..ok }).is_err(), "critical exit law");
    assert!(Dynamics::new(0.0, -1.0).is_err());
}

fn exit_cfg(n_paths: usize) -> SimConfig {
    SimConfig {
        n_paths,
        seed: 2024,
        ..Default::default()
    }
}

#[test]
fn exit_law_supercritical() {
    let p = params(0.0, 2.0);
    let sol = RiccatiSolution::new(0.0, 2.0).unwrap();
    for k in 0..2 {
        let st = run_exit(k, &p, &exit_cfg(100_000)).unwrap();
        assert!(!st.inconclusive);
        assert_eq!(st.exit_hist.iter().sum::<u64>(), st.n_finite);
        assert!(st.p_finite.agrees(1.0, 0.0), "{:?}", st.p_finite);
        let l1 = l1_distance(&normalize_counts(&st.exit_hist), &exit_model_masses(&sol, k, st.exit_hist.len()));
        assert!(l1 <= 0.05, "k={k} L1 {l1}");
    }
}

#[test]
fn exit_law_subcritical() {
    let p = params(1.0, 0.5);
    let sol = RiccatiSolution::new(1.0, 0.5).unwrap();
    for k in 0..2 {
        let st = run_exit(k, &p, &exit_cfg(100_000)).unwrap();
        assert!(!st.inconclusive && st.censoring_rate() < 0.01);
        let lo = st.p_finite.value - 3.0 * st.p_finite.se;
        let hi = st.p_finite.value + 3.0 * st.p_finite.se;
        assert!(lo >= -0.01 && hi <= 1.01);
        assert!(st.p_finite.agrees(sol.masses[k], 0.01), "k={k}: {:?} vs {}", st.p_finite, sol.masses[k]);
        // mass loss is resolved: the gap to 1 exceeds 5 SE
        assert!(1.0 - st.p_finite.value > 5.0 * st.p_finite.se);
        let l1 = l1_distance(&normalize_counts(&st.exit_hist), &exit_model_masses(&sol, k, st.exit_hist.len()));
        assert!(l1 <= 0.05, "k={k} L1 {l1}");
    }
}

#[test]
fn exit_law_is_deterministic_and_batch_independent() {
    let p = params(1.0, 0.5);
    let cfg = exit_cfg(3000);
    let a = run_exit(1, &p, &cfg).unwrap();
    let b = run_exit(1, &p, &cfg).unwrap();
    assert_eq!(a, b);
    let mut acc = run_exit_range(1, &p, &cfg, 0..1234).unwrap();
    acc.merge(&run_exit_range(1, &p, &cfg, 1234..3000).unwrap());
    assert_eq!(ExitStats::from_accumulator(1, &acc), a);
    let c = run_exit(1, &p, &SimConfig { seed: 7, ..cfg }).unwrap();
    assert_ne!(a.exit_hist, c.exit_hist);
}

fn slope_cfg() -> SimConfig {
    SimConfig {
        dt: 1e-4,
        t_max: 1e3,
        n_paths: 200,
        seed: 5,
        ..Default::default()
    }
}

#[test]
fn phi_drift() {
    for (mu, sigma) in [(1.0, 2.0), (1.0, 0.5), (0.0, 1.0)] {
        let est = phi_slope(&params(mu, sigma), &slope_cfg(), 0.5).unwrap();
        let target = phi_slope_limit(mu, sigma);
        assert!(est.agrees(target, 0.0), "({mu},{sigma}): {est:?} vs {target}");
    }
    assert!((phi_slope_limit(1.0, 2.0) - 0.34348).abs() < 1e-5);
    assert!((phi_slope_limit(1.0, 0.5) + 1.6261).abs() < 1e-4);
    assert_eq!(phi_slope_limit(0.0, 1.0), 0.0);
}

#[test]
fn feynman_kac_matches_semigroup() {
    let (mu, sigma, t, x0) = (0.0, 2.0, 0.5, 0.5);
    let sol = RiccatiSolution::new(mu, sigma).unwrap();
    let f = invariant_member(|x| 1.0 + (3.0 * x).sin() + x * x, &sol, 0.0);
    let cfg = VolterraConfig {
        dt: 1e-3,
        t_end: t,
        output_stride: 50,
        ..Default::default()
    };
    let (_, fld) = Semigroup::new(mu, sigma, cfg).unwrap().solve(&f).unwrap();
    let exact = fld.interpolate(t, x0);
    let fk = feynman_kac(&params(mu, sigma), &exit_cfg(100_000), x0, t, |y| f.eval(y)).unwrap();
    let est = fk.mean.estimate();
    assert_eq!(fk.n_censored, 0);
    assert!(est.agrees(exact, 1e-2), "{est:?} vs {exact}");
}

#[test]
fn large_sigma_rarely_kills() {
    let fk = feynman_kac(&params(0.0, 1e3), &exit_cfg(2000), 0.3, 1.0, |_| 1.0).unwrap();
    assert!(fk.survival() >= 0.99);
}

#[test]
fn zero_time_returns_start() {
    let d = Dynamics::new(0.5, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_eq!(sample_y(&d, &SimConfig::default(), 0.37, 0.0, &mut rng), YSample::Alive(0.37));
}

#[test]
fn martingale_spot_check() {
    // critical regime: ζ_T < ∞ a.s. and u_f stays bounded
    let (mu, sigma, t, x0) = (0.0, 1.0, 0.5, 0.4);
    let sol = RiccatiSolution::new(mu, sigma).unwrap();
    let f = continuous_invariant_member(|x| 1.0 + 0.5 * (4.0 * x).cos(), &sol).unwrap();
    let cfg = VolterraConfig {
        dt: 2e-3,
        t_end: 2.5,
        output_stride: 5,
        ..Default::default()
    };
    let (_, fld) = Semigroup::new(mu, sigma, cfg).unwrap().solve(&f).unwrap();
    let start = fld.interpolate(t, x0);
    let sim = SimConfig {
        n_paths: 20_000,
        seed: 9,
        ..Default::default()
    };
    let checkpoints = [0.1, 0.3, 0.6];
    let means = martingale_range(&params(mu, sigma), &sim, x0, t, &checkpoints, |s, x| fld.interpolate(s, x), 0..sim.n_paths).unwrap();
    for (cp, m) in checkpoints.iter().zip(&means) {
        let est = m.estimate();
        assert!(est.agrees(start, 0.0), "t={cp}: {est:?} vs {start}");
    }
}

fn occ_cfg() -> SimConfig {
    SimConfig {
        dt: 1e-4,
        t_max: 1e3,
        n_paths: 10,
        n_bins: 20,
        seed: 3,
        max_step: 1e-2,
        ..Default::default()
    }
}

#[test]
fn occupation_matches_stationary_law() {
    for mu in [1.0, 0.0, -1.0] {
        let occ = occupation_check(&params(mu, 1.0), &occ_cfg(), 10.0).unwrap();
        let l1 = l1_distance(&occ, &stationary_masses(mu, 20));
        assert!(l1 <= 0.05, "mu={mu}: L1 {l1}");
    }
    let up = occupation_check(&params(1.0, 1.0), &occ_cfg(), 10.0).unwrap();
    let mut down = occupation_check(&params(-1.0, 1.0), &occ_cfg(), 10.0).unwrap();
    down.reverse();
    assert!(l1_distance(&up, &down) <= 0.05);
    let total: f64 = stationary_masses(1.0, 50).iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((stationary_density(1.0, 0.0) - 2.0 / (std::f64::consts::E.powi(2) - 1.0)).abs() < 1e-12);
}
