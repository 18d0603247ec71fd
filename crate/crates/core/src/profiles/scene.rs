//! Planted scenes: sums of transformed free-evolved profiles plus noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::shape::{atom, resolution_loss, ProfileShape};
use crate::error::{Error, Result};
use crate::fields::{Field, Grid, GridSpec, StatePair, SymmetryElement, C64};

/// Parameters of one planted profile at sequence index n:
/// lambda_n = lambda * 2^{n log2_lambda_rate}, x_n = x0 + n x_rate,
/// xi_n = xi0 + n xi_rate, s_n = s + n s_rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedProfile {
    /// index into the scene's shapes
    pub shape: usize,
    pub amplitude: f64,
    pub base: SymmetryElement,
    #[serde(default)]
    pub log2_lambda_rate: f64,
    #[serde(default)]
    pub x_rate: [f64; 2],
    #[serde(default)]
    pub xi_rate: [f64; 2],
    #[serde(default)]
    pub s_rate: f64,
}

impl PlantedProfile {
    pub fn params_at(&self, n: usize) -> SymmetryElement {
        let k = n as f64;
        let b = &self.base;
        SymmetryElement {
            theta: b.theta,
            xi0: [b.xi0[0] + k * self.xi_rate[0], b.xi0[1] + k * self.xi_rate[1]],
            x0: [b.x0[0] + k * self.x_rate[0], b.x0[1] + k * self.x_rate[1]],
            lambda: b.lambda * 2f64.powf(k * self.log2_lambda_rate),
            s: b.s + k * self.s_rate,
        }
    }
}

/// Smooth random remainder: complex Gaussian spectrum damped by e^{-|k|^2 / (2 k_cut^2)},
/// scaled to the requested total L^2 mass (split evenly between u and v).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub mass: f64,
    pub k_cut: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedScene {
    pub grid: GridSpec,
    pub kappa: f64,
    pub shapes: Vec<ProfileShape>,
    pub profiles: Vec<PlantedProfile>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    pub n_max: usize,
    /// largest relative mass an atom may lose to the grid
    #[serde(default = "default_resolution_tol")]
    pub resolution_tol: f64,
}

fn default_resolution_tol() -> f64 {
    1e-4
}

/// Five-term divergence statistic between two parameter tuples (s plays the time t_n).
pub fn orthogonality_stat(a: &SymmetryElement, b: &SymmetryElement) -> f64 {
    let (la, lb) = (a.lambda, b.lambda);
    let dxi = [a.xi0[0] - b.xi0[0], a.xi0[1] - b.xi0[1]];
    let dxi2 = dxi[0] * dxi[0] + dxi[1] * dxi[1];
    let ta = a.s * la * la;
    let dx = [a.x0[0] - b.x0[0] - 2.0 * ta * dxi[0], a.x0[1] - b.x0[1] - 2.0 * ta * dxi[1]];
    la / lb + lb / la + la * lb * dxi2 + (ta - b.s * lb * lb).abs() / (la * lb) + (dx[0] * dx[0] + dx[1] * dx[1]) / (la * lb)
}

/// Smooth random pair with total mass `spec.mass`.
pub fn noise_pair(grid: &Grid, kappa: f64, spec: &NoiseSpec, stream: u64) -> Result<StatePair> {
    if !(spec.k_cut > 0.0) || !(spec.mass >= 0.0) {
        return Err(Error::InvalidArgument("noise needs k_cut > 0 and mass >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let mut channel = || -> Field {
        let fh: Field = grid
            .k2()
            .iter()
            .map(|k2| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                C64::new(a, b) * (-0.5 * k2 / (spec.k_cut * spec.k_cut)).exp()
            })
            .collect();
        grid.inverse(&fh)
    };
    let mut u = channel();
    let mut v = channel();
    for f in [&mut u, &mut v] {
        let m = grid.norm_sq(f);
        if m > 0.0 {
            let c = (0.5 * spec.mass / m).sqrt();
            f.iter_mut().for_each(|z| *z *= c);
        }
    }
    StatePair::new(grid.clone(), u, v, 0.0, kappa)
}

impl PlantedScene {
    pub fn build_grid(&self) -> Result<Grid> {
        self.grid.build()
    }

    fn check(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {}", self.kappa)));
        }
        for p in &self.profiles {
            if p.shape >= self.shapes.len() {
                return Err(Error::InvalidArgument(format!("profile refers to missing shape {}", p.shape)));
            }
        }
        Ok(())
    }

    /// Parameters of every planted profile at index n.
    pub fn params_at(&self, n: usize) -> Vec<SymmetryElement> {
        self.profiles.iter().map(|p| p.params_at(n)).collect()
    }

    /// Smallest pairwise orthogonality statistic at index n (infinite for fewer than two profiles).
    pub fn min_orthogonality(&self, n: usize) -> f64 {
        let ps = self.params_at(n);
        let mut m = f64::INFINITY;
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                m = m.min(orthogonality_stat(&ps[i], &ps[j]));
            }
        }
        m
    }

    /// Planted (||phi^j||^2, ||psi^j||^2) per profile, on this grid's dimension.
    pub fn planted_masses(&self) -> Vec<(f64, f64)> {
        let d = match self.grid.kind {
            crate::fields::GridKind::Radial4d => 4,
            _ => self.grid.dims,
        };
        self.profiles
            .iter()
            .map(|p| {
                let (mu, mv) = self.shapes[p.shape].masses(d);
                (p.amplitude * p.amplitude * mu, p.amplitude * p.amplitude * mv)
            })
            .collect()
    }
}

/// The n-th element of the scene: sum of planted atoms plus the noise draw for n.
pub fn synthesize_sequence(scene: &PlantedScene, n: usize) -> Result<StatePair> {
    if n > scene.n_max {
        return Err(Error::InvalidArgument(format!("index {n} exceeds n_max = {}", scene.n_max)));
    }
    let grid = scene.build_grid()?;
    scene.check()?;
    let mut out = StatePair::zeros(&grid, scene.kappa);
    for (j, p) in scene.profiles.iter().enumerate() {
        let g = p.params_at(n);
        let shape = &scene.shapes[p.shape];
        let half = 0.5 * grid.extent();
        if !grid.is_radial() && g.x0.iter().any(|x| x.abs() >= half) {
            return Err(Error::InvalidArgument(format!("profile {j} center {:?} lies outside the box", g.x0)));
        }
        if !grid.is_radial() && g.xi0.iter().any(|x| (x / scene.kappa).abs() >= 0.5 * grid.k_max()) {
            return Err(Error::InvalidArgument(format!("profile {j} frequency {:?} is not resolved", g.xi0)));
        }
        let loss = resolution_loss(&grid, shape, g.lambda, g.x0);
        if loss > scene.resolution_tol {
            return Err(Error::InvalidArgument(format!(
                "profile {j} at scale {} loses {loss:.2e} of its mass to the grid",
                g.lambda
            )));
        }
        let (u, v) = atom(&grid, scene.kappa, shape, &g)?;
        for i in 0..grid.len() {
            out.u[i] += p.amplitude * u[i];
            out.v[i] += p.amplitude * v[i];
        }
    }
    if let Some(spec) = &scene.noise {
        let w = noise_pair(&grid, scene.kappa, spec, n as u64)?;
        for i in 0..grid.len() {
            out.u[i] += w.u[i];
            out.v[i] += w.v[i];
        }
    }
    Ok(out)
}
