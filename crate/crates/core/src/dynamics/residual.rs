use super::evolve::Trajectory;
use crate::error::{Error, Result};
use crate::fields::{StatePair, C64};

/// Relative discrete L^2_t L^2_x residual of the system with dispersion
/// `kappa_test` along a sequence of equally spaced snapshots.
///
/// Time derivatives are central differences, space derivatives spectral.
/// The residual is normalised by the L^2_t L^2_x norm of the time
/// derivative, so it is scale free.
pub fn pde_residual_snapshots(snaps: &[StatePair], kappa_test: f64) -> Result<f64> {
    if snaps.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 snapshots, got {}", snaps.len())));
    }
    let h = snaps[1].t - snaps[0].t;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("snapshot times must increase".into()));
    }
    for w in snaps.windows(2) {
        if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::InvalidArgument("snapshots must be equally spaced in time".into()));
        }
    }
    let grid = &snaps[0].grid;
    let i = C64::new(0.0, 1.0);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 1..snaps.len() - 1 {
        let (a, b, c) = (&snaps[k - 1], &snaps[k], &snaps[k + 1]);
        let lu = grid.laplacian(&b.u);
        let lv = grid.laplacian(&b.v);
        let mut ru = vec![C64::new(0.0, 0.0); grid.len()];
        let mut rv = ru.clone();
        let mut du = ru.clone();
        let mut dv = ru.clone();
        for j in 0..grid.len() {
            du[j] = (c.u[j] - a.u[j]) / (2.0 * h);
            dv[j] = (c.v[j] - a.v[j]) / (2.0 * h);
            ru[j] = i * du[j] + lu[j] - b.u[j].conj() * b.v[j];
            rv[j] = i * dv[j] + kappa_test * lv[j] - b.u[j] * b.u[j];
        }
        num += grid.norm_sq(&ru) + grid.norm_sq(&rv);
        den += grid.norm_sq(&du) + grid.norm_sq(&dv);
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

/// [`pde_residual_snapshots`] on the snapshots of a trajectory.
pub fn pde_residual(traj: &Trajectory, kappa_test: f64) -> Result<f64> {
    pde_residual_snapshots(&traj.snapshots, kappa_test)
}

/// Residuals of a run and of its Galilean boost.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct GalileanReport {
    pub kappa: f64,
    pub plain: f64,
    pub boosted: f64,
}

/// Evolves `pair` with fixed steps, boosts every snapshot by `xi` at its own
/// time, and measures the PDE residual of both trajectories at the pair's kappa.
/// The boost is the one matched to kappa = 1/2, so the boosted residual is
/// small only there.
pub fn galilean_residual(pair: &StatePair, xi: [f64; 2], dt: f64, t_end: f64) -> Result<GalileanReport> {
    use super::evolve::{evolve, Adapt, EvolveOptions};
    use crate::fields::symmetry::galilean_boost;
    let opts = EvolveOptions {
        dt,
        t_end,
        adapt: Adapt::Fixed,
        record_every: 1,
        snapshot_every: 1,
        edge_guard: None,
        record_virial: false,
        ..Default::default()
    };
    let traj = evolve(pair, &opts)?;
    let plain = pde_residual(&traj, pair.kappa)?;
    let boosted: Vec<StatePair> = traj
        .snapshots
        .iter()
        .map(|s| galilean_boost(s, xi, s.t - pair.t))
        .collect::<Result<_>>()?;
    let boosted = pde_residual_snapshots(&boosted, pair.kappa)?;
    Ok(GalileanReport { kappa: pair.kappa, plain, boosted })
}
