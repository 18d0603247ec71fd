//! Empirical audits of free-evolution inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::lp::cutoff;
use crate::fields::{make_grid, Field, Grid, GridKind, C64};

/// Settings for [`bilinear_strichartz_ratio`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilinearOptions {
    /// dispersion of the low- and high-frequency flows
    pub theta: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    /// envelope grid: points per axis and box length
    pub grid_n: usize,
    pub extent: f64,
    pub time_samples: usize,
    /// wave packets per random datum
    pub packets: usize,
}

impl Default for BilinearOptions {
    fn default() -> Self {
        Self { theta: (1.0, 0.5), trials: 50, seed: 1, grid_n: 128, extent: 64.0, time_samples: 257, packets: 3 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BilinearReport {
    pub m: f64,
    pub n: f64,
    /// ||fg||_{L^2_{t,x}} / (||phi|| ||psi||) per trial
    pub normalized: Vec<f64>,
    /// worst ratio against M^{(d-1)/2} N^{-1/2}
    pub ratio_max: f64,
}

/// One random datum: the envelope (spectrum in |k| < m) and, for the
/// high-frequency factor, the carrier frequency.
#[derive(Clone, Debug)]
pub struct BilinearTrial {
    pub low: Field,
    pub envelope: Field,
    pub direction: [f64; 2],
}

fn packet_field(grid: &Grid, m: f64, rng: &mut ChaCha8Rng, packets: usize) -> Field {
    // spectral coefficients of sum_j c_j w(x - x_j) with w smooth, supported in |k| <= m
    let mut fh = vec![C64::new(0.0, 0.0); grid.len()];
    for _ in 0..packets {
        let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let r = 2.0 * rng.random::<f64>().sqrt();
        let a = rng.random_range(0.0..std::f64::consts::TAU);
        let x0 = [r * a.cos(), r * a.sin()];
        for (i, z) in fh.iter_mut().enumerate() {
            let (k0, k1) = (grid.wavevector(i, 0), grid.wavevector(i, 1));
            let w = cutoff(2.0 * (k0 * k0 + k1 * k1).sqrt() / m);
            if w > 0.0 {
                *z += c * w * C64::from_polar(1.0, -(k0 * x0[0] + k1 * x0[1]));
            }
        }
    }
    grid.inverse(&fh)
}

/// Draws the random data for `trials` trials at low-frequency scale `m`.
/// Trials depend only on the seed, so the same data can be reused for
/// several high frequencies.
pub fn bilinear_trials(grid: &Grid, m: f64, opts: &BilinearOptions) -> Vec<BilinearTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.trials)
        .map(|_| {
            let low = packet_field(grid, m, &mut rng, opts.packets);
            let envelope = packet_field(grid, m, &mut rng, opts.packets);
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            BilinearTrial { low, envelope, direction: [a.cos(), a.sin()] }
        })
        .collect()
}

/// ||e^{it th1 Delta} phi . e^{it th2 Delta} psi||_{L^2_{t,x}} with psi = e^{ix.xc} envelope,
/// |xc| = n + m, through the Galilean identity
/// |e^{it th Delta}(e^{ix.xc} g)|(x) = |e^{it th Delta} g|(x - 2 th t xc).
/// The envelope is evaluated on a low-frequency grid, so the carrier never
/// needs to be resolved.
pub fn bilinear_norm_envelope(grid: &Grid, trial: &BilinearTrial, m: f64, n: f64, opts: &BilinearOptions) -> f64 {
    let (th1, th2) = opts.theta;
    let xc = [(n + m) * trial.direction[0], (n + m) * trial.direction[1]];
    let speed = 2.0 * th2 * (n + m);
    // stop before the moving packet wraps half way round the box
    let t_max = 0.45 * grid.extent() / speed;
    let fh = grid.forward(&trial.low);
    let gh = grid.forward(&trial.envelope);
    let nt = opts.time_samples.max(3) | 1;
    let dt = 2.0 * t_max / (nt - 1) as f64;
    let mut total = 0.0;
    for s in 0..nt {
        let t = -t_max + s as f64 * dt;
        let shift = [2.0 * th2 * t * xc[0], 2.0 * th2 * t * xc[1]];
        let ft: Field = fh.iter().zip(grid.k2()).map(|(z, k2)| z * C64::from_polar(1.0, -t * th1 * k2)).collect();
        let gt: Field = gh
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let (k0, k1) = (grid.wavevector(i, 0), grid.wavevector(i, 1));
                z * C64::from_polar(1.0, -t * th2 * (k0 * k0 + k1 * k1) - (k0 * shift[0] + k1 * shift[1]))
            })
            .collect();
        let f = grid.inverse(&ft);
        let g = grid.inverse(&gt);
        let dens: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).collect();
        let w = if s == 0 || s == nt - 1 { 0.5 } else { 1.0 };
        total += w * dt * grid.integrate(&dens);
    }
    total.sqrt()
}

/// Worst observed ratio ||fg||_{L^2_{t,x}} / (M^{(d-1)/2} N^{-1/2} ||phi|| ||psi||)
/// over random pairs with spectra in {|xi| < M} and {|xi| > N} (d = 2).
pub fn bilinear_strichartz_ratio(m: f64, n: f64, opts: &BilinearOptions) -> Result<BilinearReport> {
    if !(m > 0.0 && n >= 4.0 * m) {
        return Err(Error::InvalidArgument(format!("need 0 < M <= N/4, got M={m}, N={n}")));
    }
    let grid = make_grid(GridKind::Cartesian, opts.grid_n, opts.extent, 2)?;
    if grid.k_max() < 2.0 * m {
        return Err(Error::InvalidArgument(format!(
            "low band |xi| < {m} not representable (k_max = {})",
            grid.k_max()
        )));
    }
    let trials = bilinear_trials(&grid, m, opts);
    let normalized: Vec<f64> = trials
        .par_iter()
        .map(|tr| {
            let b = bilinear_norm_envelope(&grid, tr, m, n, opts);
            b / (grid.norm_sq(&tr.low) * grid.norm_sq(&tr.envelope)).sqrt()
        })
        .collect();
    let scale = m.sqrt() / n.sqrt();
    let ratio_max = normalized.iter().fold(0.0f64, |a, b| a.max(*b)) / scale;
    Ok(BilinearReport { m, n, normalized, ratio_max })
}

/// Checks 2/q = d (1/2 - 1/r) with q >= 2 (and excludes the d = 2 endpoint).
pub fn check_admissible(d: usize, q: f64, r: f64) -> Result<()> {
    let d = d as f64;
    let ok = q >= 2.0 && r >= 2.0 && ((2.0 / q) - d * (0.5 - 1.0 / r)).abs() < 1e-12 && !(d == 2.0 && q == 2.0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("(q, r) = ({q}, {r}) is not admissible in d = {d}")))
    }
}

/// ||e^{it Delta} u0||_{L^q_t([0, t_max]) L^r_x} / ||u0||_{L^2} by trapezoid
/// quadrature on `nt` equally spaced times.
pub fn strichartz_audit(grid: &Grid, u0: &[C64], q: f64, r: f64, t_max: f64, nt: usize) -> Result<f64> {
    grid.check(u0)?;
    check_admissible(grid.dims(), q, r)?;
    let m = grid.norm_sq(u0);
    if m == 0.0 {
        return Ok(0.0);
    }
    let nt = nt.max(2);
    let uh = grid.forward(u0);
    let dt = t_max / (nt - 1) as f64;
    let mut acc = 0.0;
    for s in 0..nt {
        let t = s as f64 * dt;
        let f = grid.inverse(&uh.iter().zip(grid.k2()).map(|(z, k2)| z * C64::from_polar(1.0, -t * k2)).collect::<Vec<_>>());
        let lr = grid.integrate(&f.iter().map(|z| z.norm().powf(r)).collect::<Vec<_>>()).powf(1.0 / r);
        let w = if s == 0 || s == nt - 1 { 0.5 } else { 1.0 };
        acc += w * dt * lr.powf(q);
    }
    Ok(acc.powf(1.0 / q) / m.sqrt())
}
