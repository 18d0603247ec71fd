//! The symmetry group acting on field pairs: phase, boost, translation, scaling.

use serde::{Deserialize, Serialize};

use super::grid::{Field, Grid, C64};
use super::state::StatePair;
use crate::error::{Error, Result};

/// Parameters (theta, xi0, x0, lambda) of a group element plus a time shift s.
///
/// Unused vector components (beyond the grid dimension) must be zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryElement {
    pub theta: f64,
    pub xi0: [f64; 2],
    pub x0: [f64; 2],
    pub lambda: f64,
    #[serde(default)]
    pub s: f64,
}

impl Default for SymmetryElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl SymmetryElement {
    pub fn identity() -> Self {
        Self { theta: 0.0, xi0: [0.0; 2], x0: [0.0; 2], lambda: 1.0, s: 0.0 }
    }
    pub fn scaling(lambda: f64) -> Self {
        Self { lambda, ..Self::identity() }
    }
    pub fn phase(theta: f64) -> Self {
        Self { theta, ..Self::identity() }
    }
    pub fn translation(x0: [f64; 2]) -> Self {
        Self { x0, ..Self::identity() }
    }
    pub fn boost(xi0: [f64; 2]) -> Self {
        Self { xi0, ..Self::identity() }
    }
}

/// Mass bookkeeping of a transform that may lose content off the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionWarning {
    pub expected_mass: f64,
    pub actual_mass: f64,
}

impl ResolutionWarning {
    pub fn relative_loss(&self) -> f64 {
        (self.expected_mass - self.actual_mass).abs() / self.expected_mass.max(f64::MIN_POSITIVE)
    }
}

impl std::fmt::Display for ResolutionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "transformed field not resolved on the grid: mass {:.6e} expected {:.6e}",
            self.actual_mass, self.expected_mass
        )
    }
}

/// A transformed pair plus an optional resolution warning.
#[derive(Clone, Debug)]
pub struct Transformed {
    pub pair: StatePair,
    pub warning: Option<ResolutionWarning>,
}

const RESOLUTION_TOL: f64 = 1e-6;

fn check_resolution(expected: f64, actual: f64) -> Option<ResolutionWarning> {
    let w = ResolutionWarning { expected_mass: expected, actual_mass: actual };
    if expected > 0.0 && w.relative_loss() > RESOLUTION_TOL {
        Some(w)
    } else {
        None
    }
}

/// f(x - x0) through a spectral phase ramp (periodic wrap).
pub fn translate(grid: &Grid, f: &[C64], x0: [f64; 2]) -> Result<Field> {
    if x0 == [0.0, 0.0] {
        return Ok(f.to_vec());
    }
    if grid.is_radial() {
        return Err(Error::Unsupported("translation breaks radial symmetry".into()));
    }
    Ok(grid.multiply_spectral(f, |i| {
        let mut ph = 0.0;
        for a in 0..grid.dims() {
            ph -= grid.wavevector(i, a) * x0[a];
        }
        C64::from_polar(1.0, ph)
    }))
}

/// e^{i x . xi} f(x).
pub fn modulate(grid: &Grid, f: &[C64], xi: [f64; 2]) -> Result<Field> {
    if xi == [0.0, 0.0] {
        return Ok(f.to_vec());
    }
    if grid.is_radial() {
        return Err(Error::Unsupported("frequency shifts break radial symmetry".into()));
    }
    Ok(f.iter()
        .enumerate()
        .map(|(i, z)| {
            let mut ph = 0.0;
            for a in 0..grid.dims() {
                ph += grid.coord(i, a) * xi[a];
            }
            z * C64::from_polar(1.0, ph)
        })
        .collect())
}

/// amp * f((x - x0) / lambda) by spectral interpolation.
fn dilate_shift(grid: &Grid, f: &[C64], x0: [f64; 2], lambda: f64, amp: f64) -> Result<Field> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {lambda}")));
    }
    if lambda == 1.0 {
        let mut out = translate(grid, f, x0)?;
        out.iter_mut().for_each(|z| *z *= amp);
        return Ok(out);
    }
    let fh = grid.forward(f);
    if grid.is_radial() {
        if x0 != [0.0, 0.0] {
            return Err(Error::Unsupported("translation breaks radial symmetry".into()));
        }
        return Ok(grid.axis().iter().map(|&r| grid.radial_eval(&fh, r / lambda) * amp).collect());
    }
    let pts: Vec<Vec<f64>> = (0..grid.dims())
        .map(|a| grid.axis().iter().map(|&x| (x - x0[a]) / lambda).collect())
        .collect();
    let mut out = grid.cartesian_eval(&fh, &pts);
    out.iter_mut().for_each(|z| *z *= amp);
    Ok(out)
}

/// h(theta, xi0, x0, lambda) f = lambda^{-d/2} e^{i theta} e^{i x.xi0} f((x - x0)/lambda).
pub fn apply_h(grid: &Grid, f: &[C64], theta: f64, xi0: [f64; 2], x0: [f64; 2], lambda: f64) -> Result<Field> {
    grid.check(f)?;
    let amp = lambda.powf(-(grid.dims() as f64) / 2.0);
    let g = dilate_shift(grid, f, x0, lambda, amp)?;
    let mut g = modulate(grid, &g, xi0)?;
    let ph = C64::from_polar(1.0, theta);
    g.iter_mut().for_each(|z| *z *= ph);
    Ok(g)
}

/// g_kappa(theta, xi0, x0, lambda)(u, v): the v component receives theta/kappa and xi0/kappa.
pub fn apply_symmetry(g: &SymmetryElement, pair: &StatePair) -> Result<Transformed> {
    let k = pair.kappa;
    let grid = &pair.grid;
    let u = apply_h(grid, &pair.u, g.theta, g.xi0, g.x0, g.lambda)?;
    let v = apply_h(grid, &pair.v, g.theta / k, [g.xi0[0] / k, g.xi0[1] / k], g.x0, g.lambda)?;
    let out = StatePair { grid: grid.clone(), u, v, t: pair.t, kappa: k };
    let warning = if g.lambda != 1.0 { check_resolution(pair.mass(), out.mass()) } else { None };
    Ok(Transformed { pair: out, warning })
}

/// Inverse group element: h(theta, xi0, x0, lambda)^{-1} = h(-theta - xi0.x0, -lambda xi0, -x0/lambda, 1/lambda).
pub fn inverse_element(g: &SymmetryElement) -> SymmetryElement {
    let dot = g.xi0[0] * g.x0[0] + g.xi0[1] * g.x0[1];
    SymmetryElement {
        theta: -g.theta - dot,
        xi0: [-g.lambda * g.xi0[0], -g.lambda * g.xi0[1]],
        x0: [-g.x0[0] / g.lambda, -g.x0[1] / g.lambda],
        lambda: 1.0 / g.lambda,
        s: -g.s,
    }
}

/// Galilean boost at time t:
/// (e^{ix.xi} e^{-it|xi|^2} u(x - 2t xi), e^{2ix.xi} e^{-2it|xi|^2} v(x - 2t xi)).
pub fn galilean_boost(pair: &StatePair, xi: [f64; 2], t: f64) -> Result<StatePair> {
    let grid = &pair.grid;
    if grid.is_radial() {
        return Err(Error::Unsupported("Galilean boosts need a cartesian grid".into()));
    }
    let shift = [2.0 * t * xi[0], 2.0 * t * xi[1]];
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    let mut u = modulate(grid, &translate(grid, &pair.u, shift)?, xi)?;
    let mut v = modulate(grid, &translate(grid, &pair.v, shift)?, [2.0 * xi[0], 2.0 * xi[1]])?;
    let pu = C64::from_polar(1.0, -t * xi2);
    let pv = C64::from_polar(1.0, -2.0 * t * xi2);
    u.iter_mut().for_each(|z| *z *= pu);
    v.iter_mut().for_each(|z| *z *= pv);
    Ok(StatePair { grid: grid.clone(), u, v, t: pair.t, kappa: pair.kappa })
}

/// (u^lambda, v^lambda)(t, x) = lambda^{-2} (u, v)(lambda^{-2} t, lambda^{-1} x).
/// The time stamp maps t to lambda^2 t.
pub fn scaling_transform(pair: &StatePair, lambda: f64) -> Result<Transformed> {
    let grid = &pair.grid;
    let amp = lambda.powi(-2);
    let u = dilate_shift(grid, &pair.u, [0.0; 2], lambda, amp)?;
    let v = dilate_shift(grid, &pair.v, [0.0; 2], lambda, amp)?;
    let out = StatePair { grid: grid.clone(), u, v, t: lambda * lambda * pair.t, kappa: pair.kappa };
    let expected = pair.mass() * lambda.powi(grid.dims() as i32 - 4);
    let warning = if lambda != 1.0 { check_resolution(expected, out.mass()) } else { None };
    Ok(Transformed { pair: out, warning })
}

/// Homogeneous Sobolev norm ||(u,v)||_{H^s dot} from spectral coefficients.
/// The zero mode is skipped when s < 0.
pub fn sobolev_norm(pair: &StatePair, s: f64) -> f64 {
    let grid = &pair.grid;
    let w = grid.spectral_weight();
    let mut acc = 0.0;
    for f in [&pair.u, &pair.v] {
        let fh = grid.forward(f);
        for (z, k2) in fh.iter().zip(grid.k2()) {
            if *k2 == 0.0 && s < 0.0 {
                continue;
            }
            acc += w * k2.powf(s) * z.norm_sqr();
        }
    }
    acc.sqrt()
}
