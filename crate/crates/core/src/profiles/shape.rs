//! Radial profile shapes and the dictionary atoms built from them.

use serde::{Deserialize, Serialize};

use crate::dynamics::propagate::free_phase;
use crate::error::{Error, Result};
use crate::fields::{Field, Grid, SymmetryElement, C64};
use crate::groundstate::GroundState;
use crate::special::{gauss_legendre, integrate};

/// Real radial profile pair (P_u(|x|), P_v(|x|)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ProfileShape {
    /// (a_u e^{-r^2 / (2 w_u^2)}, a_v e^{-r^2 / (2 w_v^2)})
    Gaussian { u_amp: f64, u_width: f64, v_amp: f64, v_width: f64 },
    /// Uniform table on [0, r_max], linear interpolation, zero beyond.
    Table { r_max: f64, u: Vec<f64>, v: Vec<f64> },
}

impl ProfileShape {
    pub fn gaussian(u_width: f64, v_amp: f64, v_width: f64) -> Self {
        ProfileShape::Gaussian { u_amp: 1.0, u_width, v_amp, v_width }
    }

    /// Tabulates a ground state on `points` uniform radii by spectral interpolation.
    pub fn from_ground_state(gs: &GroundState, points: usize) -> Self {
        let g = &gs.grid;
        let ph = g.forward(&gs.phi.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let sh = g.forward(&gs.psi.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let r_max = g.extent();
        let h = r_max / (points - 1) as f64;
        let u = (0..points).map(|i| g.radial_eval(&ph, i as f64 * h).re).collect();
        let v = (0..points).map(|i| g.radial_eval(&sh, i as f64 * h).re).collect();
        ProfileShape::Table { r_max, u, v }
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            ProfileShape::Gaussian { u_amp, u_width, v_amp, v_width } => (
                u_amp * (-0.5 * r * r / (u_width * u_width)).exp(),
                v_amp * (-0.5 * r * r / (v_width * v_width)).exp(),
            ),
            ProfileShape::Table { r_max, u, v } => {
                let n = u.len();
                if r >= *r_max || n < 2 {
                    return (0.0, 0.0);
                }
                let s = r / r_max * (n - 1) as f64;
                let i = (s.floor() as usize).min(n - 2);
                let f = s - i as f64;
                (u[i] * (1.0 - f) + u[i + 1] * f, v[i] * (1.0 - f) + v[i + 1] * f)
            }
        }
    }

    /// Outer radius beyond which the profile is negligible.
    fn reach(&self) -> f64 {
        match self {
            ProfileShape::Gaussian { u_width, v_width, .. } => 12.0 * u_width.max(*v_width),
            ProfileShape::Table { r_max, .. } => *r_max,
        }
    }

    /// (||P_u||^2, ||P_v||^2) in dimension `d` by radial quadrature.
    pub fn masses(&self, d: usize) -> (f64, f64) {
        let sphere = match d {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI,
            3 => 4.0 * std::f64::consts::PI,
            _ => 2.0 * std::f64::consts::PI.powi(2),
        };
        let rule = gauss_legendre(16);
        let mu = integrate(|r| self.eval(r).0.powi(2) * r.powi(d as i32 - 1), 0.0, self.reach(), 400, &rule);
        let mv = integrate(|r| self.eval(r).1.powi(2) * r.powi(d as i32 - 1), 0.0, self.reach(), 400, &rule);
        (sphere * mu, sphere * mv)
    }
}

/// Spatial dimension the shapes live in on this grid.
pub fn shape_dim(grid: &Grid) -> usize {
    if grid.is_radial() {
        4
    } else {
        grid.dims()
    }
}

fn check_radial_params(grid: &Grid, g: &SymmetryElement) -> Result<()> {
    if grid.is_radial() && (g.x0 != [0.0, 0.0] || g.xi0 != [0.0, 0.0]) {
        return Err(Error::Unsupported("radial atoms admit no translation or boost".into()));
    }
    if !(g.lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {}", g.lambda)));
    }
    Ok(())
}

/// Samples D_lambda P translated to x0, before any phase or free flow.
fn sample_scaled(grid: &Grid, shape: &ProfileShape, lambda: f64, x0: [f64; 2]) -> (Field, Field) {
    let amp = lambda.powf(-(shape_dim(grid) as f64) / 2.0);
    let d = grid.dims().min(2);
    (0..grid.len())
        .map(|i| {
            let r = if grid.is_radial() {
                grid.radius(i)
            } else {
                (0..d).map(|a| (grid.coord(i, a) - x0[a]).powi(2)).sum::<f64>().sqrt()
            };
            let (pu, pv) = shape.eval(r / lambda);
            (C64::new(amp * pu, 0.0), C64::new(amp * pv, 0.0))
        })
        .unzip()
}

/// g U_kappa(s) P = e^{i theta} M_{xi0} T_{x0} U_kappa(lambda^2 s) D_lambda P, with
/// theta / kappa and xi0 / kappa on the v component.
pub fn atom(grid: &Grid, kappa: f64, shape: &ProfileShape, g: &SymmetryElement) -> Result<(Field, Field)> {
    check_radial_params(grid, g)?;
    let (mut u, mut v) = sample_scaled(grid, shape, g.lambda, g.x0);
    if g.s != 0.0 {
        let mut uh = grid.forward(&u);
        let mut vh = grid.forward(&v);
        free_phase(grid, &mut uh, &mut vh, kappa, g.lambda * g.lambda * g.s);
        u = grid.inverse(&uh);
        v = grid.inverse(&vh);
    }
    let d = grid.dims().min(2);
    let cu = C64::from_polar(1.0, g.theta);
    let cv = C64::from_polar(1.0, g.theta / kappa);
    for i in 0..grid.len() {
        let ph: f64 = if grid.is_radial() { 0.0 } else { (0..d).map(|a| grid.coord(i, a) * g.xi0[a]).sum() };
        u[i] *= cu * C64::from_polar(1.0, ph);
        v[i] *= cv * C64::from_polar(1.0, ph / kappa);
    }
    Ok((u, v))
}

/// Spectral coefficients of the centered core U_kappa(lambda^2 s) D_lambda P.
pub(crate) fn core_spectral(grid: &Grid, kappa: f64, shape: &ProfileShape, lambda: f64, s: f64) -> (Field, Field) {
    let (u, v) = sample_scaled(grid, shape, lambda, [0.0, 0.0]);
    let mut uh = grid.forward(&u);
    let mut vh = grid.forward(&v);
    if s != 0.0 {
        free_phase(grid, &mut uh, &mut vh, kappa, lambda * lambda * s);
    }
    (uh, vh)
}

/// Relative mass lost when sampling D_lambda P translated to x0 on the grid.
pub fn resolution_loss(grid: &Grid, shape: &ProfileShape, lambda: f64, x0: [f64; 2]) -> f64 {
    let (mu, mv) = shape.masses(shape_dim(grid));
    let (u, v) = sample_scaled(grid, shape, lambda, x0);
    let m = grid.norm_sq(&u) + grid.norm_sq(&v);
    ((mu + mv) - m).abs() / (mu + mv).max(f64::MIN_POSITIVE)
}
