//! Long-time Strichartz monitor: high-frequency L^2_t L^4_x size of a run
//! around its moving frequency center, against (K/N)^{1/2}.

use serde::{Deserialize, Serialize};

use super::centers::track_centers;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::fields::lp::{lp_project, LpMode};
use crate::fields::{Grid, C64};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LtsRow {
    pub n: f64,
    /// ||P_{|xi - xi(t)| > N} u||_{L^2 L^4} + ||P_{|xi - 2 xi(t)| > N} v||_{L^2 L^4}
    pub measured: f64,
    /// (K/N)^{1/2}
    pub bound: f64,
    pub ratio: f64,
    /// N <= C_* K
    pub in_range: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LtsReport {
    /// K = int_J N(t)^3 dt
    pub k: f64,
    pub c_star: f64,
    pub rows: Vec<LtsRow>,
}

fn l4(grid: &Grid, f: &[C64]) -> f64 {
    f.iter().zip(grid.weights()).map(|(z, w)| w * z.norm_sqr().powi(2)).sum::<f64>().powf(0.25)
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

/// Evaluates the monitor at every scale in `ns` over the snapshots of `traj`.
/// N(t) and xi(t) come from [`track_centers`] at tightness `eta` on each snapshot.
pub fn lts_monitor(traj: &Trajectory, ns: &[f64], c_star: f64, eta: f64) -> Result<LtsReport> {
    let snaps = &traj.snapshots;
    if snaps.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "the L^2 L^4 time quadrature needs at least 3 snapshots, got {}",
            snaps.len()
        )));
    }
    if !(c_star >= 1.0) {
        return Err(Error::InvalidArgument(format!("C_* must be at least 1, got {c_star}")));
    }
    let centers = snaps.iter().map(|s| track_centers(s, eta)).collect::<Result<Vec<_>>>()?;
    let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let n3: Vec<f64> = centers.iter().map(|c| c.n_est.powi(3)).collect();
    let k = trapezoid(&times, &n3);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut su = Vec::with_capacity(snaps.len());
        let mut sv = Vec::with_capacity(snaps.len());
        for (s, c) in snaps.iter().zip(&centers) {
            let g = &s.grid;
            let (cu, cv) = if g.is_radial() {
                (None, None)
            } else {
                (Some(c.xi_est), Some([2.0 * c.xi_est[0], 2.0 * c.xi_est[1]]))
            };
            su.push(l4(g, &lp_project(g, &s.u, n, LpMode::Gt, cu)?).powi(2));
            sv.push(l4(g, &lp_project(g, &s.v, n, LpMode::Gt, cv)?).powi(2));
        }
        let measured = trapezoid(&times, &su).sqrt() + trapezoid(&times, &sv).sqrt();
        let bound = (k / n).sqrt();
        rows.push(LtsRow {
            n,
            measured,
            bound,
            ratio: if bound > 0.0 { measured / bound } else { f64::INFINITY },
            in_range: n <= c_star * k,
        });
    }
    Ok(LtsReport { k, c_star, rows })
}
