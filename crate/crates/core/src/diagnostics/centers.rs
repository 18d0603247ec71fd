//! Estimators of the frequency scale N(t), spatial center x(t) and frequency
//! center xi(t) of a pair.

use serde::{Deserialize, Serialize};

use super::series::CenterRecord;
use crate::error::{Error, Result};
use crate::fields::StatePair;

/// Window constant: tails are measured beyond |x - x(t)| = C/N and |xi - xi(t)| = C N.
pub const WINDOW_C: f64 = 4.0;
/// Estimator version, bumped whenever the rule below changes.
pub const ESTIMATOR_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterEstimate {
    pub n_est: f64,
    pub x_est: [f64; 2],
    /// spectral centroid of u
    pub xi_est: [f64; 2],
    /// spectral centroid of v; close to 2 xi_est for pairs near a Galilean orbit
    pub xi_v: [f64; 2],
    pub spatial_tail: f64,
    pub spectral_tail: f64,
    /// both tails below eta at n_est
    pub tight: bool,
}

impl From<CenterEstimate> for CenterRecord {
    fn from(c: CenterEstimate) -> Self {
        CenterRecord { n_est: c.n_est, x_est: c.x_est, xi_est: c.xi_est }
    }
}

/// x(t) is the centroid of |u|^2 + |v|^2, xi(t) the centroid of |u^|^2, and
/// N(t) the smallest power of two for which
/// mass beyond |x - x(t)| >= C/N and spectral mass of u beyond |xi - xi(t)| >= C N
/// plus that of v beyond |xi - 2 xi(t)| >= C N are both at most eta times the
/// total mass. When no dyadic scale satisfies both, the one with the smaller
/// worst tail is returned and `tight` is false.
pub fn track_centers(pair: &StatePair, eta: f64) -> Result<CenterEstimate> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1/2), got {eta}")));
    }
    let g = &pair.grid;
    let total = pair.mass();
    if total == 0.0 {
        return Err(Error::InvalidArgument("zero pair has no centers".into()));
    }
    let d = g.dims().min(2);
    let dens: Vec<f64> = pair.u.iter().zip(&pair.v).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    let uh = g.forward(&pair.u);
    let vh = g.forward(&pair.v);
    let sw = g.spectral_weight();
    let mut x_est = [0.0; 2];
    let mut xi_est = [0.0; 2];
    let mut xi_v = [0.0; 2];
    if !g.is_radial() {
        let mu: f64 = uh.iter().map(|z| sw * z.norm_sqr()).sum();
        let mv: f64 = vh.iter().map(|z| sw * z.norm_sqr()).sum();
        for a in 0..d {
            x_est[a] = (0..g.len()).map(|i| g.weights()[i] * g.coord(i, a) * dens[i]).sum::<f64>() / total;
            if mu > 0.0 {
                xi_est[a] = (0..g.len()).map(|i| sw * g.wavevector(i, a) * uh[i].norm_sqr()).sum::<f64>() / mu;
            }
            if mv > 0.0 {
                xi_v[a] = (0..g.len()).map(|i| sw * g.wavevector(i, a) * vh[i].norm_sqr()).sum::<f64>() / mv;
            }
        }
    }
    let dist_x: Vec<f64> = (0..g.len())
        .map(|i| {
            if g.is_radial() {
                g.radius(i)
            } else {
                (0..d).map(|a| (g.coord(i, a) - x_est[a]).powi(2)).sum::<f64>().sqrt()
            }
        })
        .collect();
    let dist_k = |c: [f64; 2]| -> Vec<f64> {
        (0..g.len())
            .map(|i| {
                if g.is_radial() {
                    g.k2()[i].sqrt()
                } else {
                    (0..d).map(|a| (g.wavevector(i, a) - c[a]).powi(2)).sum::<f64>().sqrt()
                }
            })
            .collect()
    };
    let ku = dist_k(xi_est);
    let kv = dist_k([2.0 * xi_est[0], 2.0 * xi_est[1]]);
    let tails = |n: f64| -> (f64, f64) {
        let rx = WINDOW_C / n;
        let rk = WINDOW_C * n;
        let sx: f64 = (0..g.len()).filter(|&i| dist_x[i] >= rx).map(|i| g.weights()[i] * dens[i]).sum();
        let sk: f64 = (0..g.len())
            .map(|i| {
                let mut s = 0.0;
                if ku[i] >= rk {
                    s += sw * uh[i].norm_sqr();
                }
                if kv[i] >= rk {
                    s += sw * vh[i].norm_sqr();
                }
                s
            })
            .sum();
        (sx / total, sk / total)
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for j in -12..=12 {
        let n = 2f64.powi(j);
        let (sx, sk) = tails(n);
        if sx <= eta && sk <= eta {
            return Ok(CenterEstimate { n_est: n, x_est, xi_est, xi_v, spatial_tail: sx, spectral_tail: sk, tight: true });
        }
        if best.map_or(true, |b| sx.max(sk) < b.1.max(b.2)) {
            best = Some((n, sx, sk));
        }
    }
    let (n, sx, sk) = best.unwrap();
    Ok(CenterEstimate { n_est: n, x_est, xi_est, xi_v, spatial_tail: sx, spectral_tail: sk, tight: false })
}
