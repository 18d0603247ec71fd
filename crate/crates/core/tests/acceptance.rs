//! End-to-end acceptance checks. Runs without the libtest harness so that every
//! criterion prints its PASS/FAIL line; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use mrnls::dynamics::{evolve, EvolveOptions};
use mrnls::fields::{make_grid, GridKind, C64};
use mrnls::groundstate::{solve_ground_state, GroundState, GsMethod, GsOptions};
use mrnls::lab::{self, random_bump_pair, BumpClass, RunRecord, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

type Outcome = (bool, String);

fn radial() -> Value {
    json!({ "kind": "radial4d", "n": 256, "extent": 20.0, "dims": 4 })
}

fn ground_state(method: GsMethod) -> GroundState {
    let g = make_grid(GridKind::Radial4d, 256, 20.0, 4).unwrap();
    solve_ground_state(0.5, &g, method, &GsOptions::default()).unwrap()
}

/// Runs a scenario and requires every verdict line, expectations included, to pass.
fn scenario(root: &Path, cfg: Value, keys: &[&str]) -> Outcome {
    let cfg = ScenarioConfig::from_value(cfg).expect("acceptance config is valid");
    let rec: RunRecord = lab::run(&cfg, root).expect("scenario runs");
    let failed: Vec<String> = rec.verdicts.iter().filter(|v| !v.pass).map(|v| format!("{}={:.3e} [{}]", v.name, v.value, v.rule)).collect();
    let mut detail: Vec<String> = rec
        .verdicts
        .iter()
        .filter(|v| keys.iter().any(|k| v.name.starts_with(k)))
        .map(|v| format!("{}={:.3e}", v.name, v.value))
        .collect();
    if !failed.is_empty() {
        detail.push(format!("failed: {}", failed.join(", ")));
    }
    (failed.is_empty() && !rec.verdicts.is_empty(), detail.join(" "))
}

fn conservation(_: &Path) -> Outcome {
    let m_gs = ground_state(GsMethod::Renormalization).mass;
    let g = make_grid(GridKind::Radial4d, 256, 20.0, 4).unwrap();
    let class = BumpClass::default();
    let start = Instant::now();
    let drifts: Vec<(f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let kappa = if trial % 2 == 0 { 0.5 } else { 1.0 };
            let mass = rng.random_range(0.2..2.0) * m_gs;
            let p = random_bump_pair(&mut rng, &g, kappa, &class, mass).unwrap();
            let opts = EvolveOptions { dt: 5e-4, t_end: 1.0, record_every: 100, record_virial: false, ..Default::default() };
            let tr = evolve(&p, &opts).unwrap();
            (tr.mass_drift(), tr.energy_drift())
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let dm = drifts.iter().map(|d| d.0).fold(0.0, f64::max);
    let de = drifts.iter().map(|d| d.1).fold(0.0, f64::max);
    (dm <= 1e-8 && de <= 1e-6 && secs <= 300.0, format!("max mass drift {dm:.2e}, max energy drift {de:.2e}, {secs:.1}s for 20 runs"))
}

fn soliton(_: &Path) -> Outcome {
    let gs = ground_state(GsMethod::Renormalization);
    let norm = gs.mass.sqrt();
    let mut exact = gs.to_pair();
    exact.u.iter_mut().for_each(|z| *z *= C64::from_polar(1.0, 1.0));
    exact.v.iter_mut().for_each(|z| *z *= C64::from_polar(1.0, 2.0));
    let errs: Vec<f64> = [5e-4, 2.5e-4]
        .iter()
        .map(|&dt| {
            let opts = EvolveOptions { dt, t_end: 1.0, record_every: 200, record_virial: false, ..Default::default() };
            evolve(&gs.to_pair(), &opts).unwrap().last().distance(&exact) / norm
        })
        .collect();
    let ratio = errs[0] / errs[1];
    let detail = format!(
        "relative L2 error {:.3e} at dt=5e-4, {:.3e} at dt=2.5e-4, ratio {ratio:.6} (observed order {:.5})",
        errs[0],
        errs[1],
        ratio.log2()
    );
    (errs[0] <= 1e-4 && ratio >= 4.0, detail)
}

fn gn_and_ground_state(root: &Path) -> Outcome {
    let (a, da) = scenario(
        root,
        json!({ "schema_version": 1, "scenario": "ground_state", "kappa": 0.5, "grid": radial(),
                "params": { "refinement_check": true }, "output": "c3_ground_state" }),
        &["cross_method_mass", "refinement_mass"],
    );
    let (b, db) = scenario(
        root,
        json!({ "schema_version": 1, "scenario": "inequality_audit", "kappa": 0.5, "seed": 3, "grid": radial(),
                "params": { "audits": ["gn"], "gn": { "draws": 1000 } }, "output": "c3_gn" }),
        &["gn_ratio"],
    );
    (a && b, format!("{da} {db}"))
}

fn virial(root: &Path) -> Outcome {
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "virial_check", "kappa": 0.5, "grid": radial(),
                "params": { "c": 0.5, "t_end": 0.5 }, "output": "c4_virial" }),
        &["virial"],
    )
}

fn galilean(root: &Path) -> Outcome {
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "galilean_test", "kappa": 0.5,
                "grid": { "kind": "cartesian", "n": 128, "extent": 20.0 * std::f64::consts::PI, "dims": 2 },
                "params": { "kappas": [0.5, 1.0] }, "output": "c5_galilean" }),
        &["boosted_residual"],
    )
}

fn threshold(root: &Path) -> Outcome {
    let every = json!({ "dt": 1e-3, "t_end": 6.0, "record_every": 50, "record_virial": false });
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "threshold_scan", "kappa": 0.5,
                "grid": { "kind": "radial4d", "n": 512, "extent": 100.0, "dims": 4 },
                "evolve": every, "params": { "c_values": [0.9, 1.1] }, "output": "c6_threshold" }),
        &["verdict"],
    )
}

fn audit(root: &Path, kind: &str, keys: &[&str]) -> Outcome {
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "inequality_audit", "kappa": 0.5, "seed": 5, "grid": radial(),
                "params": { "audits": [kind] }, "output": format!("audit_{kind}") }),
        keys,
    )
}

fn profiles(root: &Path) -> Outcome {
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "profile_recovery", "kappa": 0.5, "seed": 7,
                "grid": { "kind": "cartesian", "n": 512, "extent": 32.0, "dims": 2 }, "output": "c9_profiles" }),
        &["ledger_defect", "recovered_orthogonality", "single_bubble_orbit", "inverse_strichartz"],
    )
}

fn gauge(root: &Path) -> Outcome {
    scenario(
        root,
        json!({ "schema_version": 1, "scenario": "morawetz", "kappa": 0.5, "seed": 3,
                "grid": { "kind": "cartesian", "n": 128, "extent": 40.0, "dims": 2 },
                "params": { "pairs": 20 }, "output": "c10_gauge" }),
        &["gauge_energy_change", "interaction_on_real_pairs"],
    )
}

fn main() {
    let root = tempfile::tempdir().unwrap();
    let criteria: Vec<(&str, Box<dyn Fn(&Path) -> Outcome>)> = vec![
        ("conservation", Box::new(conservation)),
        ("soliton fidelity", Box::new(soliton)),
        ("sharp Gagliardo-Nirenberg and ground state", Box::new(gn_and_ground_state)),
        ("virial identity", Box::new(virial)),
        ("Galilean dichotomy", Box::new(galilean)),
        ("threshold dichotomy", Box::new(threshold)),
        ("bilinear Strichartz scaling", Box::new(|r: &Path| audit(r, "bilinear", &["bilinear"]))),
        ("weights and peak leveling", Box::new(|r: &Path| audit(r, "weights", &["weight_violations", "uniform_in_l", "peak_level"]))),
        ("profile recovery", Box::new(profiles)),
        ("gauge invariance of the interaction energy", Box::new(gauge)),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(|| f(root.path()))) {
            Ok(r) => r,
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked: {}", msg.unwrap_or_default()))
            }
        };
        if !pass {
            failures += 1;
        }
        println!("{} [{}] {name} ({:.1}s): {detail}", if pass { "PASS" } else { "FAIL" }, i + 1, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
