//! Littlewood-Paley projections built on a smooth cutoff.

use serde::{Deserialize, Serialize};

use super::grid::{Field, Grid, C64};
use super::state::StatePair;
use crate::error::{Error, Result};

fn bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth non-increasing cutoff: 1 on [0, 1], 0 on [2, inf).
pub fn cutoff(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = bump(2.0 - r);
    let b = bump(r - 1.0);
    a / (a + b)
}

/// Derivative of [`cutoff`] for r >= 0.
pub fn cutoff_deriv(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        return 0.0;
    }
    let x = 2.0 - r;
    let y = r - 1.0;
    let a = bump(x);
    let b = bump(y);
    // d/dr a = -a / x^2, d/dr b = b / y^2
    let da = -a / (x * x);
    let db = b / (y * y);
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpMode {
    /// P_{<=N}
    Le,
    /// P_N = P_{<=N} - P_{<=N/2}
    Eq,
    /// P_{>N} = Id - P_{<=N}
    Gt,
    /// P_{>=N} = Id - P_{<N}
    Ge,
    /// P_{<N} = P_{<=N/2}
    Lt,
}

/// Spectral multiplier of the projection at |xi - center| = r.
pub fn lp_symbol(mode: LpMode, n: f64, r: f64) -> f64 {
    let le = |m: f64| cutoff(r / m);
    match mode {
        LpMode::Le => le(n),
        LpMode::Eq => le(n) - le(0.5 * n),
        LpMode::Gt => 1.0 - le(n),
        LpMode::Ge => 1.0 - le(0.5 * n),
        LpMode::Lt => le(0.5 * n),
    }
}

fn spectral_distances(grid: &Grid, center: Option<[f64; 2]>) -> Result<Vec<f64>> {
    let c = center.unwrap_or([0.0, 0.0]);
    if grid.is_radial() {
        if c != [0.0, 0.0] {
            return Err(Error::Unsupported("radial grids admit no frequency center".into()));
        }
        return Ok(grid.k2().iter().map(|k| k.sqrt()).collect());
    }
    Ok((0..grid.len())
        .map(|i| {
            let mut s = 0.0;
            for a in 0..grid.dims() {
                let d = grid.wavevector(i, a) - c[a];
                s += d * d;
            }
            s.sqrt()
        })
        .collect())
}

/// Applies the projection in `mode` at scale `n` around frequency `center`.
pub fn lp_project(grid: &Grid, f: &[C64], n: f64, mode: LpMode, center: Option<[f64; 2]>) -> Result<Field> {
    grid.check(f)?;
    let fh = lp_project_spectral(grid, &grid.forward(f), n, mode, center)?;
    Ok(grid.inverse(&fh))
}

/// Same as [`lp_project`] but on spectral coefficients.
pub fn lp_project_spectral(
    grid: &Grid,
    fh: &[C64],
    n: f64,
    mode: LpMode,
    center: Option<[f64; 2]>,
) -> Result<Field> {
    if !(n > 0.0) {
        return Err(Error::InvalidArgument(format!("frequency scale must be positive, got {n}")));
    }
    let dist = spectral_distances(grid, center)?;
    Ok(fh.iter().zip(&dist).map(|(z, r)| z * lp_symbol(mode, n, *r)).collect())
}

/// Projects both components with the same multiplier.
pub fn lp_project_pair(pair: &StatePair, n: f64, mode: LpMode, center: Option<[f64; 2]>) -> Result<StatePair> {
    let mut out = pair.clone();
    out.u = lp_project(&pair.grid, &pair.u, n, mode, center)?;
    out.v = lp_project(&pair.grid, &pair.v, n, mode, center)?;
    Ok(out)
}
