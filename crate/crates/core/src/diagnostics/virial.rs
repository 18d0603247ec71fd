//! Virial identity check along a run.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VirialCheck {
    pub times: Vec<f64>,
    /// V(t) = 4 Im int x . (conj(u) grad u + 1/2 conj(v) grad v)
    pub virial: Vec<f64>,
    /// dV/dt by three-point differences on the (possibly uneven) record times
    pub rate: Vec<f64>,
    pub eight_e0: f64,
    /// max |dV/dt - 8E(0)| / |8E(0)| over interior records (absolute when E(0) = 0)
    pub max_defect: f64,
    /// the identity is asserted only for kappa = 1/2
    pub applicable: bool,
}

/// Compares the recorded virial momentum's time derivative with 8E(0).
pub fn virial_rate_check(traj: &Trajectory) -> Result<VirialCheck> {
    let d = &traj.diagnostics;
    if d.virial.len() != d.len() || d.len() < 3 {
        return Err(Error::InvalidArgument("run needs at least 3 records with the virial column".into()));
    }
    let t = &d.times;
    let v = &d.virial;
    let n = t.len();
    let mut rate = vec![0.0; n];
    for i in 0..n {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        // derivative of the quadratic through three points, evaluated at t_i
        let (x0, x1, x2) = (t[a], t[b], t[c]);
        let x = t[i];
        rate[i] = v[a] * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + v[b] * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + v[c] * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    }
    let eight_e0 = 8.0 * d.energy[0];
    let den = if eight_e0 != 0.0 { eight_e0.abs() } else { 1.0 };
    let max_defect = rate[1..n - 1].iter().map(|r| (r - eight_e0).abs() / den).fold(0.0, f64::max);
    let kappa = traj.snapshots.first().map(|s| s.kappa).unwrap_or(f64::NAN);
    Ok(VirialCheck {
        times: t.clone(),
        virial: v.clone(),
        rate,
        eight_e0,
        max_defect,
        applicable: (kappa - 0.5).abs() < 1e-12,
    })
}
