//! Quotient distance inf_g ||g a - b|| between symmetry orbits.

use serde::{Deserialize, Serialize};

use super::search::{best_phase, correlate, demodulate, golden_max, point, top_k};
use crate::error::{Error, Result};
use crate::fields::symmetry::{apply_h, apply_symmetry};
use crate::fields::{Field, Grid, StatePair, SymmetryElement, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitBudget {
    /// scales 2^{k/2} for |k| <= lambda_levels
    pub lambda_levels: i32,
    pub candidates: usize,
    pub refine_sweeps: usize,
    pub refine_iters: usize,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        Self { lambda_levels: 4, candidates: 3, refine_sweeps: 8, refine_iters: 24 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitDistance {
    pub distance: f64,
    pub element: SymmetryElement,
    /// refinement ended on the edge of its bracket or a transform lost mass
    pub approximate: bool,
    pub evaluations: usize,
}

fn centroid(grid: &Grid, f: &[C64]) -> [f64; 2] {
    let fh = grid.forward(f);
    let m: f64 = fh.iter().map(|z| z.norm_sqr()).sum();
    let mut c = [0.0; 2];
    if m > 0.0 {
        for a in 0..grid.dims().min(2) {
            c[a] = fh.iter().enumerate().map(|(i, z)| grid.wavevector(i, a) * z.norm_sqr()).sum::<f64>() / m;
        }
    }
    c
}

fn spatial_centroid(pair: &StatePair) -> [f64; 2] {
    let grid = &pair.grid;
    let m = pair.mass();
    let mut c = [0.0; 2];
    if m > 0.0 && !grid.is_radial() {
        for a in 0..grid.dims().min(2) {
            c[a] = (0..grid.len())
                .map(|i| grid.weights()[i] * grid.coord(i, a) * (pair.u[i].norm_sqr() + pair.v[i].norm_sqr()))
                .sum::<f64>()
                / m;
        }
    }
    c
}

/// max_theta Re <g a, b> with theta free.
fn overlap(a: &StatePair, b: &StatePair, g: &SymmetryElement) -> Option<(f64, f64)> {
    let g0 = SymmetryElement { theta: 0.0, ..*g };
    let t = apply_symmetry(&g0, a).ok()?;
    let grid = &a.grid;
    let cu = grid.inner(&t.pair.u, &b.u);
    let cv = grid.inner(&t.pair.v, &b.v);
    Some(best_phase(cu, cv, a.kappa))
}

/// Upper bound on inf_g ||g a - b|| by a scale/boost/translation lattice search
/// followed by coordinate golden-section refinement.
pub fn orbit_distance(a: &StatePair, b: &StatePair, budget: &OrbitBudget) -> Result<OrbitDistance> {
    if a.grid.spec() != b.grid.spec() {
        return Err(Error::InvalidArgument("orbit distance needs pairs on one grid".into()));
    }
    if a.kappa != b.kappa {
        return Err(Error::InvalidArgument("orbit distance needs a common kappa".into()));
    }
    let grid = &a.grid;
    let kappa = a.kappa;
    let radial = grid.is_radial();
    let na = a.mass();
    let nb = b.mass();
    if na == 0.0 || nb == 0.0 {
        return Ok(OrbitDistance {
            distance: (na + nb).sqrt(),
            element: SymmetryElement::identity(),
            approximate: false,
            evaluations: 0,
        });
    }
    let xi_b = if radial { [0.0; 2] } else { centroid(grid, &b.u) };
    let mut evals = 0usize;
    let mut best: Option<(SymmetryElement, f64)> = None;
    for k in -budget.lambda_levels..=budget.lambda_levels {
        let lambda = 2f64.powf(k as f64 / 2.0);
        let au: Field = apply_h(grid, &a.u, 0.0, [0.0; 2], [0.0; 2], lambda)?;
        let av: Field = apply_h(grid, &a.v, 0.0, [0.0; 2], [0.0; 2], lambda)?;
        let mut consider = |g: SymmetryElement, cu: C64, cv: C64| {
            let (theta, f) = best_phase(cu, cv, kappa);
            if best.map_or(true, |b| f > b.1) {
                best = Some((SymmetryElement { theta, ..g }, f));
            }
        };
        evals += 1;
        if radial {
            consider(SymmetryElement::scaling(lambda), grid.inner(&au, &b.u), grid.inner(&av, &b.v));
            continue;
        }
        let ca = centroid(grid, &au);
        let xi = [xi_b[0] - ca[0], xi_b[1] - ca[1]];
        let xv = [xi[0] / kappa, xi[1] / kappa];
        let cu = correlate(grid, &grid.forward(&au), &grid.forward(&demodulate(grid, &b.u, xi)));
        let cv = correlate(grid, &grid.forward(&av), &grid.forward(&demodulate(grid, &b.v, xv)));
        let proxy: Vec<f64> = cu.iter().zip(&cv).map(|(p, q)| p.norm() + q.norm()).collect();
        for j in top_k(&proxy, budget.candidates) {
            consider(SymmetryElement { theta: 0.0, xi0: xi, x0: point(grid, j), lambda, s: 0.0 }, cu[j], cv[j]);
        }
    }
    let (mut g, mut fbest) = best.ok_or_else(|| Error::InvalidArgument("empty search budget".into()))?;
    let d = if radial { 0 } else { grid.dims() };
    // refine offsets from the centroid predictions x0 = X_b - lambda X_a, xi0 = xi_b - c_a / lambda,
    // which keeps the coordinates nearly decoupled under a change of scale
    let (xa, xb) = (spatial_centroid(a), spatial_centroid(b));
    let ca = if radial { [0.0; 2] } else { centroid(grid, &a.u) };
    let build = |q: &[f64; 5], theta: f64| {
        let l = q[2].exp();
        SymmetryElement {
            theta,
            x0: [xb[0] - l * xa[0] + q[0], xb[1] - l * xa[1] + q[1]],
            lambda: l,
            xi0: [xi_b[0] - ca[0] / l + q[3], xi_b[1] - ca[1] / l + q[4]],
            s: 0.0,
        }
    };
    let l0 = g.lambda;
    let mut q = [
        g.x0[0] - (xb[0] - l0 * xa[0]),
        g.x0[1] - (xb[1] - l0 * xa[1]),
        l0.ln(),
        g.xi0[0] - (xi_b[0] - ca[0] / l0),
        g.xi0[1] - (xi_b[1] - ca[1] / l0),
    ];
    if d < 2 {
        q[1] = 0.0;
        q[4] = 0.0;
    }
    if radial {
        q = [0.0, 0.0, l0.ln(), 0.0, 0.0];
    }
    let dk = 2.0 * std::f64::consts::PI / grid.extent();
    // bracket half-widths; a bracket shrinks only when its optimum is interior
    let mut h = [grid.dx(), grid.dx(), 0.25 * std::f64::consts::LN_2, dk, dk];
    let mut coords: Vec<usize> = (0..d).collect();
    coords.push(2);
    coords.extend((0..d).map(|a| 3 + a));
    let mut edge = false;
    for _ in 0..budget.refine_sweeps {
        edge = false;
        let mut hit = [false; 5];
        for &c in &coords {
            let step = h[c];
            let c0 = q[c];
            let at = |v: f64| {
                let mut r = q;
                r[c] = v;
                r
            };
            let (v, val) = golden_max(
                |v| {
                    evals += 1;
                    overlap(a, b, &build(&at(v), 0.0)).map_or(f64::NEG_INFINITY, |p| p.1)
                },
                c0 - step,
                c0 + step,
                budget.refine_iters,
            );
            if val > fbest {
                fbest = val;
                q = at(v);
                let th = overlap(a, b, &build(&q, 0.0)).map_or(g.theta, |p| p.0);
                g = build(&q, th);
                if (v - c0).abs() > 0.95 * step {
                    hit[c] = true;
                    edge = true;
                }
            }
        }
        for (x, e) in h.iter_mut().zip(hit) {
            if !e {
                *x *= 0.25;
            }
        }
    }
    let t = apply_symmetry(&g, a)?;
    let distance = t.pair.distance(b);
    Ok(OrbitDistance { distance, element: g, approximate: edge || t.warning.is_some(), evaluations: evals })
}
