//! Radial and interaction Morawetz functionals, the momentum densities they
//! are built from, and the windowed interaction energy with its gauge center.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::{vartheta_l, WeightFamily};
use crate::error::{Error, Result};
use crate::fields::lp::{lp_project_pair, LpMode};
use crate::fields::{Grid, StatePair, C64};
use crate::special::gauss_legendre;

/// Largest grid (in points) accepted by the direct double sum.
pub const MAX_PAIR_POINTS: usize = 16384;

/// Pointwise densities of a pair. Vector densities carry one component per
/// axis (a single radial component on radial grids).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Densities {
    /// |U|^2 + |V|^2
    pub m: Vec<f64>,
    /// Im[conj(U) grad U + 1/2 conj(V) grad V]
    pub p: Vec<Vec<f64>>,
    /// |grad U|^2 + 1/4 |grad V|^2
    pub e2: Vec<f64>,
    /// Re[U^2 conj(V)]
    pub e3: Vec<f64>,
    /// |U| |grad U| + 1/2 |V| |grad V|, a pointwise bound on |p|
    pub p_bound: Vec<f64>,
}

fn densities_from(u: &[C64], v: &[C64], gu: &[Vec<C64>], gv: &[Vec<C64>]) -> Densities {
    let n = u.len();
    let d = gu.len();
    let mut out = Densities {
        m: vec![0.0; n],
        p: vec![vec![0.0; n]; d],
        e2: vec![0.0; n],
        e3: vec![0.0; n],
        p_bound: vec![0.0; n],
    };
    for i in 0..n {
        out.m[i] = u[i].norm_sqr() + v[i].norm_sqr();
        out.e3[i] = (u[i] * u[i] * v[i].conj()).re;
        let (mut gu2, mut gv2) = (0.0, 0.0);
        for a in 0..d {
            out.p[a][i] = (u[i].conj() * gu[a][i] + 0.5 * v[i].conj() * gv[a][i]).im;
            gu2 += gu[a][i].norm_sqr();
            gv2 += gv[a][i].norm_sqr();
        }
        out.e2[i] = gu2 + 0.25 * gv2;
        out.p_bound[i] = u[i].norm() * gu2.sqrt() + 0.5 * v[i].norm() * gv2.sqrt();
    }
    out
}

/// Densities m, p, e2, e3 of the pair, spectral gradients.
pub fn densities(pair: &StatePair) -> Densities {
    let g = &pair.grid;
    densities_from(&pair.u, &pair.v, &g.gradient(&pair.u), &g.gradient(&pair.v))
}

/// Densities of (e^{-ix.xi0} U, e^{-2ix.xi0} V), with gradients taken by the
/// product rule so the gauge need not be periodic on the box.
pub fn gauged_densities(pair: &StatePair, xi0: [f64; 2]) -> Result<Densities> {
    let g = &pair.grid;
    if g.is_radial() {
        if xi0 != [0.0, 0.0] {
            return Err(Error::Unsupported("a nonzero gauge breaks radial symmetry".into()));
        }
        return Ok(densities(pair));
    }
    let d = g.dims();
    let gu = g.gradient(&pair.u);
    let gv = g.gradient(&pair.v);
    let i1 = C64::new(0.0, 1.0);
    let mut us = Vec::with_capacity(g.len());
    let mut vs = Vec::with_capacity(g.len());
    let mut gus = vec![Vec::with_capacity(g.len()); d];
    let mut gvs = vec![Vec::with_capacity(g.len()); d];
    for j in 0..g.len() {
        let phase: f64 = (0..d).map(|a| g.coord(j, a) * xi0[a]).sum();
        let e1 = C64::from_polar(1.0, -phase);
        let e2 = e1 * e1;
        us.push(e1 * pair.u[j]);
        vs.push(e2 * pair.v[j]);
        for a in 0..d {
            gus[a].push(e1 * (gu[a][j] - i1 * xi0[a] * pair.u[j]));
            gvs[a].push(e2 * (gv[a][j] - 2.0 * i1 * xi0[a] * pair.v[j]));
        }
    }
    Ok(densities_from(&us, &vs, &gus, &gvs))
}

/// Integrals of the densities against the window vartheta_L(Ntilde x - z).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowIntegrals {
    pub m: f64,
    pub p: [f64; 2],
    pub e2: f64,
    pub e3: f64,
}

pub fn window_integrals(grid: &Grid, dens: &Densities, n_tilde: f64, l: f64, z: [f64; 2]) -> Result<WindowIntegrals> {
    if grid.is_radial() && z != [0.0, 0.0] {
        return Err(Error::Unsupported("radial grids admit only the centered window".into()));
    }
    let mut out = WindowIntegrals::default();
    let d = dens.p.len();
    for i in 0..grid.len() {
        let r = if grid.is_radial() {
            n_tilde * grid.radius(i)
        } else {
            (0..grid.dims()).map(|a| (n_tilde * grid.coord(i, a) - z[a]).powi(2)).sum::<f64>().sqrt()
        };
        let w = vartheta_l(l, r);
        if w == 0.0 {
            continue;
        }
        let w = w * grid.weights()[i];
        out.m += w * dens.m[i];
        out.e2 += w * dens.e2[i];
        out.e3 += w * dens.e3[i];
        // the radial momentum integrates to zero over a centered window
        if !grid.is_radial() {
            for a in 0..d {
                out.p[a] += w * dens.p[a][i];
            }
        }
    }
    Ok(out)
}

impl WindowIntegrals {
    /// xi0(t, z) = int vartheta p / int vartheta m, and 0 when the denominator vanishes.
    pub fn center(&self) -> [f64; 2] {
        if self.m == 0.0 {
            return [0.0, 0.0];
        }
        [self.p[0] / self.m, self.p[1] / self.m]
    }

    /// (int vartheta (e2 + e3)) (int vartheta m) - |int vartheta p|^2
    pub fn gauge_energy(&self) -> f64 {
        (self.e2 + self.e3) * self.m - (self.p[0] * self.p[0] + self.p[1] * self.p[1])
    }
}

/// Window momentum center xi0(t, z) of the pair.
pub fn window_center(pair: &StatePair, n_tilde: f64, l: f64, z: [f64; 2]) -> Result<[f64; 2]> {
    Ok(window_integrals(&pair.grid, &densities(pair), n_tilde, l, z)?.center())
}

/// Windowed interaction energy of the pair at (t, z).
pub fn gauge_energy(pair: &StatePair, n_tilde: f64, l: f64, z: [f64; 2]) -> Result<f64> {
    Ok(window_integrals(&pair.grid, &densities(pair), n_tilde, l, z)?.gauge_energy())
}

/// Value of an interaction functional together with the same double integral
/// taken with |p| bounded pointwise, which sets its natural size.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InteractionValue {
    pub value: f64,
    pub scale: f64,
}

fn check_positive(n_tilde: f64, k_cut: f64) -> Result<()> {
    if !(n_tilde > 0.0) || !(k_cut > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Ntilde and K must be positive, got {n_tilde} and {k_cut}"
        )));
    }
    Ok(())
}

/// M(t) = iint Theta_L(Ntilde |x - y|) Ntilde (x - y) . p(x) m(y) dx dy on (U, V) = P_{<=K}(u, v).
///
/// Cartesian grids use a direct double sum over point pairs, halved by the
/// antisymmetry of the kernel; differences are taken without wrap-around, so
/// data should stay away from the box edges. Radial grids reduce the angular
/// integral to a one-dimensional kernel in the angle between x and y.
pub fn interaction_functional(pair: &StatePair, n_tilde: f64, weights: &WeightFamily, k_cut: f64) -> Result<InteractionValue> {
    check_positive(n_tilde, k_cut)?;
    let proj = lp_project_pair(pair, k_cut, LpMode::Le, None)?;
    let dens = densities(&proj);
    interaction_from_densities(&proj.grid, &dens, n_tilde, weights)
}

/// [`interaction_functional`] on precomputed densities.
pub fn interaction_from_densities(grid: &Grid, dens: &Densities, n_tilde: f64, weights: &WeightFamily) -> Result<InteractionValue> {
    if grid.is_radial() {
        return Ok(interaction_radial(grid, dens, n_tilde, weights));
    }
    if grid.len() > MAX_PAIR_POINTS {
        return Err(Error::InvalidArgument(format!(
            "double sum over {} points exceeds the budget of {MAX_PAIR_POINTS}; use n <= {} in d = {}",
            grid.len(),
            if grid.dims() == 1 { MAX_PAIR_POINTS } else { 128 },
            grid.dims()
        )));
    }
    let d = grid.dims();
    let n = grid.len();
    let w = grid.weights();
    let xs: Vec<[f64; 2]> = (0..n).map(|i| [grid.coord(i, 0), if d > 1 { grid.coord(i, 1) } else { 0.0 }]).collect();
    let (value, scale) = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut s, mut b) = (0.0, 0.0);
            for j in i + 1..n {
                let dx = [xs[i][0] - xs[j][0], xs[i][1] - xs[j][1]];
                let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
                let k = weights.big_theta_l_at(n_tilde * r) * n_tilde;
                let mut dot_i = 0.0;
                let mut dot_j = 0.0;
                for a in 0..d {
                    dot_i += dx[a] * dens.p[a][i];
                    dot_j += dx[a] * dens.p[a][j];
                }
                let ww = w[i] * w[j] * k;
                // (x_i - x_j).p_i m_j + (x_j - x_i).p_j m_i
                s += ww * (dot_i * dens.m[j] - dot_j * dens.m[i]);
                b += ww * r * (dens.p_bound[i] * dens.m[j] + dens.p_bound[j] * dens.m[i]);
            }
            (s, b)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(InteractionValue { value, scale })
}

fn interaction_radial(grid: &Grid, dens: &Densities, n_tilde: f64, weights: &WeightFamily) -> InteractionValue {
    // average over the angle gamma between x and y on S^3, (2/pi) sin^2 gamma d gamma;
    // the node map contributes pi/2, so the weights are w sin^2 gamma
    let (gx, gw) = gauss_legendre(64);
    let ang: Vec<(f64, f64)> = gx
        .iter()
        .zip(&gw)
        .map(|(x, w)| {
            let g = 0.5 * std::f64::consts::PI * (x + 1.0);
            (g.cos(), w * g.sin().powi(2))
        })
        .collect();
    let r = grid.axis();
    let w = grid.weights();
    let n = grid.len();
    let (value, scale) = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut s, mut b) = (0.0, 0.0);
            for j in 0..n {
                if dens.m[j] == 0.0 {
                    continue;
                }
                let (mut k, mut kb) = (0.0, 0.0);
                for (c, aw) in &ang {
                    let rho = (r[i] * r[i] + r[j] * r[j] - 2.0 * r[i] * r[j] * c).max(0.0).sqrt();
                    let th = weights.big_theta_l_at(n_tilde * rho) * n_tilde;
                    k += aw * th * (r[i] - r[j] * c);
                    kb += aw * th * rho;
                }
                s += w[i] * w[j] * k * dens.p[0][i] * dens.m[j];
                b += w[i] * w[j] * kb * dens.p_bound[i] * dens.m[j];
            }
            (s, b)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    InteractionValue { value, scale }
}

/// Radial Morawetz functional Ntilde int Theta(Ntilde |x| / L) x . p dx on (U, V) = P_{<=K}(u, v).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MorawetzValue {
    pub value: f64,
    /// 2 L (||U|| ||grad U|| + 1/2 ||V|| ||grad V||), from Theta(s) s <= 2
    pub bound: f64,
}

pub fn morawetz_radial(pair: &StatePair, n_tilde: f64, l: f64, k_cut: f64, weights: &WeightFamily) -> Result<MorawetzValue> {
    check_positive(n_tilde, k_cut)?;
    let proj = lp_project_pair(pair, k_cut, LpMode::Le, None)?;
    let g = &proj.grid;
    let dens = densities(&proj);
    let mut s = 0.0;
    for i in 0..g.len() {
        let (r, xp) = if g.is_radial() {
            (g.radius(i), g.radius(i) * dens.p[0][i])
        } else {
            let xp: f64 = (0..g.dims()).map(|a| g.coord(i, a) * dens.p[a][i]).sum();
            (g.radius(i), xp)
        };
        s += g.weights()[i] * weights.big_theta_at(n_tilde * r / l) * xp;
    }
    let nu = g.norm_sq(&proj.u).sqrt();
    let nv = g.norm_sq(&proj.v).sqrt();
    let gu = g.gradient_norm_sq(&proj.u).sqrt();
    let gv = g.gradient_norm_sq(&proj.v).sqrt();
    Ok(MorawetzValue { value: n_tilde * s, bound: 2.0 * l * (nu * gu + 0.5 * nv * gv) })
}
