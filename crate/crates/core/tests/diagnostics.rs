mod common;

use std::f64::consts::PI;

use mrnls::diagnostics::scale::random_ladder;
use mrnls::diagnostics::weights::{lens_volume, vartheta_l, ThetaL};
use mrnls::diagnostics::{
    audit_peak_level, audit_weights, c_star, characteristic_partition, densities, energy, interaction_functional, mass,
    morawetz_radial, peak_level, quantize_frequency_scale, scattering_size, scattering_size_series, smooth_frequency_scale,
    track_centers, virial_momentum, weight_tables, DiagnosticSeries, FrequencyScale,
};
use mrnls::dynamics::{evolve, free_propagate, EvolveOptions};
use mrnls::fields::symmetry::{galilean_boost, scaling_transform, translate};
use mrnls::fields::{make_grid, Grid, GridKind, StatePair, C64};
use mrnls::groundstate::{solve_ground_state, GroundState, GsMethod, GsOptions};
use mrnls::lab::scenarios::gauge_defect;
use proptest::prelude::*;

fn radial() -> Grid {
    make_grid(GridKind::Radial4d, 256, 20.0, 4).unwrap()
}

fn gs() -> GroundState {
    solve_ground_state(0.5, &radial(), GsMethod::Renormalization, &GsOptions::default()).unwrap()
}

fn bump_pair(grid: &Grid, seed: u64, spread: f64) -> StatePair {
    let mut rng = common::rng(seed);
    let u = common::random_bumps(grid, &mut rng, 3, spread, (1.0, 2.0));
    let v = common::random_bumps(grid, &mut rng, 3, spread, (1.0, 2.0));
    StatePair::new(grid.clone(), u, v, 0.0, 0.5).unwrap()
}

fn series(times: Vec<f64>, s: Vec<f64>) -> DiagnosticSeries {
    DiagnosticSeries { s_accumulator: s, times, ..Default::default() }
}

#[test]
fn mass_and_energy_of_zero() {
    let g = make_grid(GridKind::Cartesian, 32, 10.0, 2).unwrap();
    let z = vec![C64::new(0.0, 0.0); g.len()];
    let p = StatePair::new(g, z.clone(), z, 0.0, 0.5).unwrap();
    assert_eq!((mass(&p), energy(&p)), (0.0, 0.0));
}

#[test]
fn free_flow_keeps_mass_and_linear_energy() {
    let g = make_grid(GridKind::Cartesian, 64, 30.0, 2).unwrap();
    let p = bump_pair(&g, 3, 3.0);
    let q = free_propagate(&p, 0.9);
    assert!((mass(&q) - mass(&p)).abs() < 1e-13 * mass(&p));
    let lin = |p: &StatePair| g.gradient_norm_sq(&p.u) + 0.5 * g.gradient_norm_sq(&p.v);
    assert!((lin(&q) - lin(&p)).abs() < 1e-10 * lin(&p));
}

#[test]
fn scattering_size_is_additive_and_zero_for_zero() {
    let g = make_grid(GridKind::Cartesian, 32, 20.0, 2).unwrap();
    let opts = EvolveOptions { dt: 1e-3, t_end: 0.3, record_every: 7, ..EvolveOptions::default() };
    let tr = evolve(&bump_pair(&g, 1, 2.0), &opts).unwrap();
    let whole = scattering_size(&tr, (0.0, 0.3)).unwrap();
    let split = scattering_size(&tr, (0.0, 0.1234)).unwrap() + scattering_size(&tr, (0.1234, 0.3)).unwrap();
    assert!(whole > 0.0 && (whole - split).abs() < 1e-12 * whole);
    assert!(scattering_size(&tr, (0.0, 0.5)).is_err());
    let z = series(vec![0.0, 1.0], vec![0.0, 0.0]);
    assert_eq!(scattering_size_series(&z, (0.0, 1.0)).unwrap(), 0.0);
}

#[test]
fn characteristic_partition_of_linear_accumulators() {
    let t: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
    let p = characteristic_partition(&series(t.clone(), t.clone())).unwrap();
    for (k, tk) in p.iter().enumerate() {
        assert!((tk - k as f64).abs() < 1e-12);
    }
    assert_eq!(p.len(), 6);
    let p = characteristic_partition(&series(t.clone(), t.iter().map(|x| 2.0 * x).collect())).unwrap();
    for (k, tk) in p.iter().enumerate() {
        assert!((tk - k as f64 / 2.0).abs() < 1e-12);
    }
    assert!(characteristic_partition(&series(vec![0.0, 1.0], vec![1.0, 0.5])).is_err());
}

#[test]
fn centers_of_the_ground_state() {
    let gs = gs();
    let c = track_centers(&gs.to_pair(), 0.05).unwrap();
    assert_eq!(c.x_est, [0.0, 0.0]);
    assert_eq!(c.xi_est, [0.0, 0.0]);
    assert!(c.n_est >= 0.25 && c.n_est <= 4.0, "{c:?}");
    assert!(track_centers(&gs.to_pair(), 0.7).is_err());
}

#[test]
fn centers_follow_a_galilean_boost() {
    let g = make_grid(GridKind::Cartesian, 128, 40.0, 2).unwrap();
    let dk = 2.0 * PI / 40.0;
    let u = g.sample(|x| C64::new((-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp(), 0.0));
    let v = g.sample(|x| C64::new(-0.5 * (-(x[0] * x[0] + x[1] * x[1]) / 3.0).exp(), 0.0));
    let p = StatePair::new(g.clone(), u, v, 0.0, 0.5).unwrap();
    let xi = [5.0 * dk, -3.0 * dk];
    let a = track_centers(&p, 0.05).unwrap();
    let b = track_centers(&galilean_boost(&p, xi, 0.0).unwrap(), 0.05).unwrap();
    for k in 0..2 {
        assert!((b.xi_est[k] - a.xi_est[k] - xi[k]).abs() < 1e-10);
        assert!((b.xi_v[k] - a.xi_v[k] - 2.0 * xi[k]).abs() < 1e-10);
        assert!((b.x_est[k] - a.x_est[k]).abs() < 1e-10);
    }
}

#[test]
fn frequency_scale_follows_dilation() {
    let gs = gs();
    let p = gs.to_pair();
    let n1 = track_centers(&p, 0.05).unwrap().n_est;
    for lambda in [0.5, 2.0] {
        let q = scaling_transform(&p, lambda).unwrap().pair;
        let n = track_centers(&q, 0.05).unwrap().n_est;
        let ratio = n / (n1 / lambda);
        assert!((0.5..=2.0).contains(&ratio), "lambda {lambda}: {n} vs {n1}");
    }
}

#[test]
fn quantization_cases() {
    let q = quantize_frequency_scale(&[3.0; 5], 2.0, Vec::new()).unwrap();
    assert!(q.values().iter().all(|v| *v == 2.0));
    let samples: Vec<f64> = (0..8).map(|k| 4f64.powi(-k)).collect();
    let q = quantize_frequency_scale(&samples, 4.0, Vec::new()).unwrap();
    assert_eq!(q.values(), samples);
    assert!(quantize_frequency_scale(&[1.0, -1.0], 2.0, Vec::new()).is_err());
    assert!(quantize_frequency_scale(&[1.0], 1.0, Vec::new()).is_err());
}

#[test]
fn peak_level_cases() {
    let stair = FrequencyScale::new(2.0, vec![0, 0, -1, -1, -2, -3, -3], Vec::new()).unwrap();
    assert_eq!(peak_level(&stair, 3).unwrap(), stair);
    let peak = FrequencyScale::new(2.0, vec![0, 0, 1, 0, 0], Vec::new()).unwrap();
    assert_eq!(peak_level(&peak, 1).unwrap().exponents, vec![0; 5]);
    let not_ladder = FrequencyScale::new(2.0, vec![0, 2], Vec::new()).unwrap();
    assert!(peak_level(&not_ladder, 1).is_err());
}

#[test]
fn smooth_scale_hits_its_nodes() {
    let n = FrequencyScale::new(2.0, vec![0, -1, -1, 0, 1, 1, 0], Vec::new()).unwrap();
    let s = smooth_frequency_scale(&n).unwrap();
    for k in 0..n.len() {
        let t = 0.5 * (n.boundary(k) + n.boundary(k + 1));
        assert!(s.eval(t) > 0.0);
    }
}

#[test]
fn c_star_is_at_least_one() {
    assert_eq!(c_star(&[[0.0; 2], [0.0; 2]], &[1.0, 1.0], &[1.0]), 1.0);
    let c = c_star(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, 1.0], &[0.5]);
    assert!((c - 2048.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn quantization_brackets_every_sample(samples in proptest::collection::vec(1e-6f64..1e6, 1..40), c0 in 1.5f64..8.0) {
        let q = quantize_frequency_scale(&samples, c0, Vec::new()).unwrap();
        for (k, n) in samples.iter().enumerate() {
            let v = q.value(k);
            prop_assert!(v <= n * (1.0 + 1e-12) && v * c0 > *n * (1.0 - 1e-12));
        }
    }

    #[test]
    fn leveling_properties_on_random_ladders(seed in 0u64..100_000, m in 1usize..4) {
        let mut rng = common::rng(seed);
        let lad = random_ladder(&mut rng, 200, 2.0);
        let a = audit_peak_level(&lad, m).unwrap();
        prop_assert_eq!(a.violations, 0, "{:?}", a);
    }

    #[test]
    fn lens_volume_limits(a in 0.5f64..3.0, b in 0.5f64..3.0) {
        let full = 0.5 * PI * PI * a.min(b).powi(4);
        prop_assert!((lens_volume(a, b, 0.0) - full).abs() < 1e-12 * full);
        prop_assert_eq!(lens_volume(a, b, a + b + 1e-9), 0.0);
        let r = 0.5 * (a + b);
        let v = lens_volume(a, b, r);
        prop_assert!(v >= 0.0 && v <= full);
    }
}

// theta_L(r) = L^{-4} int vartheta_L(|x|) vartheta_L(|x - r e|) dx in cylindrical
// coordinates x = (z, rho omega): dx = 4 pi rho^2 d rho dz, 2D Simpson.
fn theta_l_oracle(l: f64, r: f64) -> f64 {
    let top = l;
    let inner = |z: f64| {
        common::simpson(
            |rho| {
                let a = (z * z + rho * rho).sqrt();
                let b = ((z - r) * (z - r) + rho * rho).sqrt();
                4.0 * PI * rho * rho * vartheta_l(l, a) * vartheta_l(l, b)
            },
            0.0,
            top,
            600,
        )
    };
    common::simpson(inner, r - top, top, 1200) / l.powi(4)
}

#[test]
fn theta_l_matches_cylindrical_quadrature() {
    for l in [8.0, 16.0] {
        let th = ThetaL::new(l);
        for r in [0.0, 2.5, 0.7 * l, 1.3 * l] {
            let (a, b) = (th.value(r), theta_l_oracle(l, r));
            assert!((a - b).abs() < 1e-7 * b.max(1e-3), "L={l} r={r}: {a} vs {b}");
        }
    }
}

#[test]
fn theta_l_at_zero_is_the_window_norm() {
    // theta_L(0) = 2 pi^2 L^{-4} int r^3 vartheta_L(r)^2 dr
    for (l, frozen) in [(8.0, 3.631068610086144), (16.0, 4.243404155129417), (32.0, 4.578800315785859)] {
        let oracle = 2.0 * PI * PI / f64::powi(l, 4) * common::simpson(|r| r.powi(3) * vartheta_l(l, r).powi(2), 0.0, l, 20_000);
        let v = ThetaL::new(l).value(0.0);
        assert!((v - oracle).abs() < 1e-10 * oracle, "{v} vs {oracle}");
        assert!((v - frozen).abs() < 1e-10 * frozen);
    }
}

#[test]
fn weight_inequalities_hold_on_every_table() {
    let mut consts = Vec::new();
    for l in [8.0, 16.0, 32.0] {
        let w = weight_tables(l).unwrap();
        let a = audit_weights(&w);
        assert_eq!(a.violations(), 0, "{a:?}");
        for i in 0..w.r.len() {
            assert!(w.theta[i] >= 0.0 && w.theta[i] <= w.big_theta[i] + 1e-14);
            assert!(w.big_theta[i] <= 1f64.min(2.0 / w.r[i]) + 1e-14);
        }
        assert!(w.theta_l.windows(2).all(|p| p[1] <= p[0] + 1e-14));
        consts.push(a.c_dtheta);
    }
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), c| (a.min(*c), b.max(*c)));
    assert!(hi / lo < 2.0, "{consts:?}");
    assert!(weight_tables(4.0).is_err());
}

#[test]
fn virial_momentum_vanishes_on_real_data() {
    let gs = gs();
    assert_eq!(virial_momentum(&gs.to_pair()), 0.0);
}

#[test]
fn morawetz_functionals_on_real_and_soliton_data() {
    let gs = gs();
    let w = weight_tables(8.0).unwrap();
    let p = gs.to_pair();
    let m0 = morawetz_radial(&p, 1.0, 8.0, 8.0, &w).unwrap();
    assert!(m0.value.abs() < 1e-12 * m0.bound);
    // exact soliton phase flow
    for t in [0.3, 1.1] {
        let q = StatePair::new(
            p.grid.clone(),
            p.u.iter().map(|z| z * C64::from_polar(1.0, t)).collect(),
            p.v.iter().map(|z| z * C64::from_polar(1.0, 2.0 * t)).collect(),
            t,
            0.5,
        )
        .unwrap();
        let m = morawetz_radial(&q, 1.0, 8.0, 8.0, &w).unwrap();
        assert!((m.value - m0.value).abs() < 1e-4 * m0.bound);
    }
    // band-limited data: a huge cutoff changes nothing
    let g = radial();
    let u = g.sample_radial(|r| C64::new((-r * r / 2.0).exp(), 0.3 * (-r * r / 2.0).exp() * r));
    let v = g.sample_radial(|r| C64::new(0.0, (-r * r / 3.0).exp()));
    let b = StatePair::new(g, u, v, 0.0, 0.5).unwrap();
    let a1 = morawetz_radial(&b, 1.0, 8.0, 60.0, &w).unwrap();
    let a2 = morawetz_radial(&b, 1.0, 8.0, 1e6, &w).unwrap();
    assert!((a1.value - a2.value).abs() < 1e-6 * a1.bound);
}

#[test]
fn interaction_functional_on_real_and_translated_pairs() {
    let g = make_grid(GridKind::Cartesian, 64, 32.0, 2).unwrap();
    let w = weight_tables(8.0).unwrap();
    let p = bump_pair(&g, 9, 2.0);
    let real = StatePair::new(
        g.clone(),
        p.u.iter().map(|z| C64::new(z.re, 0.0)).collect(),
        p.v.iter().map(|z| C64::new(z.re, 0.0)).collect(),
        0.0,
        0.5,
    )
    .unwrap();
    let rv = interaction_functional(&real, 1.0, &w, 8.0).unwrap();
    assert!(rv.value.abs() < 1e-12);
    let boosted = galilean_boost(&p, [0.4, 0.2], 0.0).unwrap();
    let a = interaction_functional(&boosted, 1.0, &w, 8.0).unwrap();
    let shift = [3.0 * g.dx(), -2.0 * g.dx()];
    let moved = StatePair::new(
        g.clone(),
        translate(&g, &boosted.u, shift).unwrap(),
        translate(&g, &boosted.v, shift).unwrap(),
        0.0,
        0.5,
    )
    .unwrap();
    let b = interaction_functional(&moved, 1.0, &w, 8.0).unwrap();
    assert!(a.value.abs() > 1e-6);
    assert!((a.value - b.value).abs() < 1e-10 * a.scale, "{a:?} {b:?}");
    let big = make_grid(GridKind::Cartesian, 256, 32.0, 2).unwrap();
    assert!(interaction_functional(&bump_pair(&big, 1, 2.0), 1.0, &w, 8.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn window_gauge_leaves_the_interaction_energy_unchanged(
        seed in 0u64..10_000, bx in -1.0f64..1.0, by in -1.0f64..1.0, zx in -4.0f64..4.0, zy in -4.0f64..4.0
    ) {
        let g = make_grid(GridKind::Cartesian, 64, 32.0, 2).unwrap();
        let p = galilean_boost(&bump_pair(&g, seed, 3.0), [bx, by], 0.0).unwrap();
        let (_, rel) = gauge_defect(&p, 1.0, 8.0, [zx, zy]).unwrap();
        prop_assert!(rel < 1e-8, "{}", rel);
    }

    #[test]
    fn densities_bound_the_momentum(seed in 0u64..10_000) {
        let g = make_grid(GridKind::Cartesian, 32, 20.0, 2).unwrap();
        let p = galilean_boost(&bump_pair(&g, seed, 2.0), [0.3, -0.2], 0.0).unwrap();
        let d = densities(&p);
        for i in 0..g.len() {
            let pn = (d.p[0][i].powi(2) + d.p[1][i].powi(2)).sqrt();
            prop_assert!(pn <= d.p_bound[i] * (1.0 + 1e-12) + 1e-300);
            prop_assert!(d.m[i] >= 0.0 && d.e2[i] >= 0.0);
        }
    }
}
