use mrnls::fields::{make_grid, Grid, GridKind, StatePair, SymmetryElement};
use mrnls::profiles::{
    atom, extract_one, inverse_strichartz_check, noise_pair, orbit_distance, orthogonality_stat, synthesize_sequence,
    ExtractOptions, NoiseSpec, OrbitBudget, PlantedProfile, PlantedScene, ProfileShape,
};
use proptest::prelude::*;

const KAPPA: f64 = 0.5;

fn cart() -> Grid {
    make_grid(GridKind::Cartesian, 64, 16.0, 2).unwrap()
}

fn shape() -> ProfileShape {
    ProfileShape::gaussian(1.0, 0.5, 0.8)
}

fn atom_pair(grid: &Grid, g: &SymmetryElement) -> StatePair {
    let (u, v) = atom(grid, KAPPA, &shape(), g).unwrap();
    StatePair::new(grid.clone(), u, v, 0.0, KAPPA).unwrap()
}

fn planted(amplitude: f64, base: SymmetryElement, log2_lambda_rate: f64) -> PlantedProfile {
    PlantedProfile { shape: 0, amplitude, base, log2_lambda_rate, x_rate: [0.0; 2], xi_rate: [0.0; 2], s_rate: 0.0 }
}

fn scene(grid: Grid, profiles: Vec<PlantedProfile>, noise: Option<NoiseSpec>) -> PlantedScene {
    PlantedScene { grid: grid.spec(), kappa: KAPPA, shapes: vec![shape()], profiles, noise, n_max: 4, resolution_tol: 1e-4 }
}

fn dist2(a: &StatePair, b: &StatePair) -> f64 {
    a.grid.norm_sq(&a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect::<Vec<_>>())
        + a.grid.norm_sq(&a.v.iter().zip(&b.v).map(|(x, y)| x - y).collect::<Vec<_>>())
}

#[test]
fn orbit_distance_of_a_pair_to_itself_is_zero() {
    let g = cart();
    let a = atom_pair(&g, &SymmetryElement { theta: 0.3, xi0: [0.0; 2], x0: [1.0, 0.5], lambda: 1.2, s: 0.0 });
    let d = orbit_distance(&a, &a, &OrbitBudget::default()).unwrap();
    assert!(d.distance <= 1e-6 * a.mass().sqrt(), "{}", d.distance);
}

#[test]
fn orbit_distance_finds_an_exact_orbit_member() {
    let g = cart();
    let a = atom_pair(&g, &SymmetryElement::identity());
    let elem = SymmetryElement { theta: 0.9, xi0: [0.5, -0.25], x0: [1.0, -0.75], lambda: 2f64.sqrt(), s: 0.0 };
    let b = atom_pair(&g, &elem);
    let d = orbit_distance(&a, &b, &OrbitBudget::default()).unwrap();
    assert!(d.distance <= 1e-6 * a.mass().sqrt(), "{} {:?}", d.distance, d.element);
    assert!((d.element.lambda / elem.lambda - 1.0).abs() < 1e-4);
}

#[test]
fn orbit_distance_to_a_doubled_pair_is_at_least_the_norm() {
    let g = cart();
    let a = atom_pair(&g, &SymmetryElement::identity());
    let b = StatePair::new(g.clone(), a.u.iter().map(|z| z * 2.0).collect(), a.v.iter().map(|z| z * 2.0).collect(), 0.0, KAPPA)
        .unwrap();
    let d = orbit_distance(&a, &b, &OrbitBudget::default()).unwrap();
    assert!(d.distance >= a.mass().sqrt() * (1.0 - 1e-9), "{} {}", d.distance, a.mass().sqrt());
}

#[test]
fn orbit_distance_rejects_mismatched_inputs() {
    let a = atom_pair(&cart(), &SymmetryElement::identity());
    let other = make_grid(GridKind::Cartesian, 32, 16.0, 2).unwrap();
    let b = atom_pair(&other, &SymmetryElement::identity());
    assert!(orbit_distance(&a, &b, &OrbitBudget::default()).is_err());
    let mut c = a.clone();
    c.kappa = 1.0;
    assert!(orbit_distance(&a, &c, &OrbitBudget::default()).is_err());
}

#[test]
fn orthogonality_stat_special_cases() {
    let id = SymmetryElement::identity();
    assert_eq!(orthogonality_stat(&id, &id), 2.0);
    let d = 3.5;
    let shifted = SymmetryElement { x0: [d, 0.0], ..id };
    assert!((orthogonality_stat(&id, &shifted) - (2.0 + d * d)).abs() < 1e-12);
    let b = 1.75;
    let boosted = SymmetryElement { xi0: [0.0, b], ..id };
    assert!((orthogonality_stat(&id, &boosted) - (2.0 + b * b)).abs() < 1e-12);
    let scaled = SymmetryElement { lambda: 4.0, ..id };
    assert!((orthogonality_stat(&id, &scaled) - 4.25).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn orthogonality_stat_is_at_least_two(
        la in 0.1f64..10.0, lb in 0.1f64..10.0,
        xa in -5.0f64..5.0, xb in -5.0f64..5.0,
        ka in -2.0f64..2.0, kb in -2.0f64..2.0,
        sa in -1.0f64..1.0, sb in -1.0f64..1.0,
    ) {
        let a = SymmetryElement { theta: 0.0, xi0: [ka, 0.0], x0: [xa, 0.0], lambda: la, s: sa / (la * la) };
        let b = SymmetryElement { theta: 1.0, xi0: [kb, 0.0], x0: [xb, 0.0], lambda: lb, s: sb / (lb * lb) };
        let ab = orthogonality_stat(&a, &b);
        let ba = orthogonality_stat(&b, &a);
        prop_assert!(ab >= 2.0 - 1e-12);
        prop_assert!(ba >= 2.0 - 1e-12);
    }
}

#[test]
fn single_identity_profile_synthesizes_to_its_atom() {
    let g = cart();
    let sc = scene(g.clone(), vec![planted(1.0, SymmetryElement::identity(), 0.0)], None);
    let s = synthesize_sequence(&sc, 0).unwrap();
    let a = atom_pair(&g, &SymmetryElement::identity());
    assert_eq!(dist2(&s, &a), 0.0);
    let (mu, mv) = sc.planted_masses()[0];
    assert!((s.mass() - (mu + mv)).abs() < 1e-6 * (mu + mv));
}

#[test]
fn scale_separated_profiles_decouple_in_mass() {
    let g = make_grid(GridKind::Radial4d, 512, 100.0, 4).unwrap();
    let id = SymmetryElement::identity();
    let sc = scene(g, vec![planted(1.0, id, 0.0), planted(1.0, id, 0.5)], None);
    let total: f64 = sc.planted_masses().iter().map(|(a, b)| a + b).sum();
    let mut last = f64::INFINITY;
    for n in 0..=4 {
        let expect = 2f64.powf(n as f64 / 2.0) + 2f64.powf(-(n as f64) / 2.0);
        assert!((sc.min_orthogonality(n) - expect).abs() < 1e-12);
        let err = (synthesize_sequence(&sc, n).unwrap().mass() - total).abs() / total;
        assert!(err < last, "n = {n}: {err} after {last}");
        last = err;
    }
    assert!(last < 0.3, "{last}");
}

#[test]
fn synthesize_rejects_bad_scenes() {
    let g = cart();
    let id = SymmetryElement::identity();
    let sc = scene(g.clone(), vec![planted(1.0, id, 0.0)], None);
    assert!(synthesize_sequence(&sc, 5).is_err());
    let far = scene(g.clone(), vec![planted(1.0, SymmetryElement { x0: [9.0, 0.0], ..id }, 0.0)], None);
    assert!(synthesize_sequence(&far, 0).is_err());
    let tiny = scene(g.clone(), vec![planted(1.0, SymmetryElement { lambda: 0.05, ..id }, 0.0)], None);
    assert!(synthesize_sequence(&tiny, 0).is_err());
    let mut missing = scene(g, vec![planted(1.0, id, 0.0)], None);
    missing.profiles[0].shape = 3;
    assert!(synthesize_sequence(&missing, 0).is_err());
}

#[test]
fn noise_has_the_requested_mass_and_is_reproducible() {
    let g = cart();
    let spec = NoiseSpec { mass: 0.25, k_cut: 2.0, seed: 7 };
    let a = noise_pair(&g, KAPPA, &spec, 3).unwrap();
    let b = noise_pair(&g, KAPPA, &spec, 3).unwrap();
    let c = noise_pair(&g, KAPPA, &spec, 4).unwrap();
    assert!((a.mass() - 0.25).abs() < 1e-12);
    assert_eq!(dist2(&a, &b), 0.0);
    assert!(dist2(&a, &c) > 0.0);
}

#[test]
fn single_bubble_is_recovered_with_its_parameters() {
    let g = cart();
    let elem = SymmetryElement { theta: 0.4, xi0: [0.0; 2], x0: [1.0, -0.75], lambda: 1.0, s: 0.0 };
    let b = atom_pair(&g, &elem);
    let dec = extract_one(&b, &[shape()], &ExtractOptions::default()).unwrap();
    assert_eq!(dec.profiles.len(), 1);
    let r = &dec.profiles[0];
    assert!((r.params.x0[0] - 1.0).abs() < 1e-4 && (r.params.x0[1] + 0.75).abs() < 1e-4, "{:?}", r.params);
    assert!((r.params.lambda - 1.0).abs() < 1e-4);
    assert!((r.mass() - b.mass()).abs() < 1e-6 * b.mass());
    assert!(dec.remainder.mass() < 1e-8 * b.mass());
    for row in &dec.ledger {
        assert!(row.relative_defect < 1e-8, "{}", row.relative_defect);
    }
}

#[test]
fn radial_extraction_separates_two_scales() {
    let g = make_grid(GridKind::Radial4d, 512, 100.0, 4).unwrap();
    let id = SymmetryElement::identity();
    let sc = scene(
        g,

        vec![planted(1.0, SymmetryElement { lambda: 0.5, ..id }, 0.0), planted(0.7, SymmetryElement { theta: 1.0, lambda: 8.0, ..id }, 0.0)],
        None,
    );
    let pair = synthesize_sequence(&sc, 0).unwrap();
    let opts = ExtractOptions { radial: true, lambdas: (-4..=8).map(|k| 2f64.powf(k as f64 / 2.0)).collect(), ..ExtractOptions::default() };
    let dec = extract_one(&pair, &sc.shapes, &opts).unwrap();
    assert!(dec.profiles.len() >= 2, "{}", dec.profiles.len());
    let planted_m = sc.planted_masses();
    for (k, want) in [(0, 0.5), (1, 8.0)] {
        let r = dec.profiles.iter().min_by(|a, b| (a.params.lambda / want).ln().abs().total_cmp(&(b.params.lambda / want).ln().abs())).unwrap();
        let m = planted_m[k].0 + planted_m[k].1;
        assert!((r.mass() - m).abs() < 0.05 * m, "scale {want}: {} vs {m}", r.mass());
    }
}

#[test]
fn inverse_strichartz_lower_bound_holds_for_a_bubble() {
    let g = cart();
    let b = atom_pair(&g, &SymmetryElement::identity());
    let rep = inverse_strichartz_check(&b, b.mass(), 0.5, 17, 1e-6).unwrap();
    assert!(!rep.vacuous);
    assert!(rep.pass && rep.c_fit >= 1.0, "{rep:?}");
    assert!(rep.bound <= rep.a * rep.a);
}

#[test]
fn inverse_strichartz_is_vacuous_below_the_floor() {
    let g = cart();
    let zero = StatePair::zeros(&g, KAPPA);
    let rep = inverse_strichartz_check(&zero, 0.0, 0.5, 9, 1e-6).unwrap();
    assert!(rep.vacuous && rep.pass);
    let noise = noise_pair(&g, KAPPA, &NoiseSpec { mass: 1.0, k_cut: 4.0, seed: 1 }, 0).unwrap();
    let rep = inverse_strichartz_check(&noise, 0.0, 0.5, 9, 10.0).unwrap();
    assert!(rep.vacuous && rep.pass && rep.bound == 0.0);
    let rep = inverse_strichartz_check(&noise, 0.0, 0.5, 9, 1e-6).unwrap();
    assert!(!rep.vacuous && !rep.pass);
}
