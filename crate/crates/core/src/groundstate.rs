//! Ground states of the elliptic system
//!
//! ```text
//! -phi + Delta phi = phi psi,   -2 psi + kappa Delta psi = phi^2
//! ```
//!
//! on radial grids, the threshold mass M(phi, psi), and the sharp
//! Gagliardo-Nirenberg ratio.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::functionals::{cubic_term, gradient_norms_sq};
use crate::error::{Error, Result};
use crate::fields::{Field, Grid, SpectralPlan, StatePair, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsMethod {
    /// Spectral renormalization with psi solved exactly from phi.
    Renormalization,
    /// Nehari-projected preconditioned gradient flow, then Newton.
    GradientFlow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GsOptions {
    pub max_iter: usize,
    /// Stop when the relative residual drops below this.
    pub tol: f64,
    /// Seed phi_0 = amplitude * exp(-r^2 / 2).
    pub seed_amplitude: f64,
}

impl Default for GsOptions {
    fn default() -> Self {
        Self { max_iter: 2000, tol: 1e-12, seed_amplitude: 3.0 }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub grid: Grid,
    pub kappa: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub mass: f64,
    pub action: f64,
    /// max of the L^2 residuals of the two equations
    pub residual: f64,
    pub method: GsMethod,
    pub iterations: usize,
    /// relative residual per iteration
    pub history: Vec<f64>,
}

/// Scalar summary persisted next to the profiles.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroundStateMeta {
    pub kappa: f64,
    pub mass: f64,
    pub action: f64,
    pub residual: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub phi0: f64,
    pub psi0: f64,
    pub method: GsMethod,
    pub iterations: usize,
    pub grid: crate::fields::GridSpec,
}

fn cplx(f: &[f64]) -> Field {
    f.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn real(f: &[C64]) -> Vec<f64> {
    f.iter().map(|z| z.re).collect()
}

fn apply_symbol(grid: &Grid, f: &[f64], sym: impl Fn(f64) -> f64) -> Vec<f64> {
    let k2 = grid.k2();
    real(&grid.multiply_spectral(&cplx(f), |i| C64::new(sym(k2[i]), 0.0)))
}

fn l2(grid: &Grid, f: &[f64]) -> f64 {
    f.iter().zip(grid.weights()).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

fn h1(grid: &Grid, f: &[f64]) -> f64 {
    let c = cplx(f);
    (grid.norm_sq(&c) + grid.gradient_norm_sq(&c)).sqrt()
}

/// I(phi, psi) = ||grad phi||^2 + (kappa/2)||grad psi||^2 + ||phi||^2 + ||psi||^2 + int phi^2 psi.
pub fn action(grid: &Grid, phi: &[f64], psi: &[f64], kappa: f64) -> f64 {
    let (p, q) = (cplx(phi), cplx(psi));
    let cubic: f64 = phi.iter().zip(psi).zip(grid.weights()).map(|((a, b), w)| w * a * a * b).sum();
    grid.gradient_norm_sq(&p) + 0.5 * kappa * grid.gradient_norm_sq(&q) + grid.norm_sq(&p) + grid.norm_sq(&q) + cubic
}

/// L^2 residuals of the two equations.
pub fn elliptic_residuals(grid: &Grid, phi: &[f64], psi: &[f64], kappa: f64) -> (f64, f64) {
    let a = apply_symbol(grid, phi, |k2| 1.0 + k2);
    let b = apply_symbol(grid, psi, |k2| 2.0 + kappa * k2);
    let r1: Vec<f64> = (0..phi.len()).map(|i| a[i] + phi[i] * psi[i]).collect();
    let r2: Vec<f64> = (0..phi.len()).map(|i| b[i] + phi[i] * phi[i]).collect();
    (l2(grid, &r1), l2(grid, &r2))
}

fn relative_residual(grid: &Grid, phi: &[f64], psi: &[f64], kappa: f64) -> f64 {
    let (r1, r2) = elliptic_residuals(grid, phi, psi, kappa);
    r1.max(r2) / (h1(grid, phi) + h1(grid, psi)).max(f64::MIN_POSITIVE)
}

/// Solves the elliptic system on a radial grid.
pub fn solve_ground_state(kappa: f64, grid: &Grid, method: GsMethod, opts: &GsOptions) -> Result<GroundState> {
    if !grid.is_radial() {
        return Err(Error::Unsupported("ground states are computed on radial4d grids".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let (mut phi, psi, iterations, history) = match method {
        GsMethod::Renormalization => renormalization(kappa, grid, opts)?,
        GsMethod::GradientFlow => gradient_flow(kappa, grid, opts)?,
    };
    if phi[0] < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let norm = grid.norm_sq(&cplx(&phi)).sqrt();
    if norm < 1e-8 {
        return Err(Error::Numeric("iteration collapsed to the trivial solution".into()));
    }
    for i in 0..phi.len() {
        if !phi[i].is_finite() || !psi[i].is_finite() {
            return Err(Error::Numeric("non-finite ground state".into()));
        }
    }
    let (r1, r2) = elliptic_residuals(grid, &phi, &psi, kappa);
    let mass = grid.norm_sq(&cplx(&phi)) + grid.norm_sq(&cplx(&psi));
    Ok(GroundState {
        grid: grid.clone(),
        kappa,
        action: action(grid, &phi, &psi, kappa),
        phi,
        psi,
        mass,
        residual: r1.max(r2),
        method,
        iterations,
        history,
    })
}

type Solved = (Vec<f64>, Vec<f64>, usize, Vec<f64>);

fn slaved_psi(grid: &Grid, phi: &[f64], kappa: f64) -> Vec<f64> {
    let sq: Vec<f64> = phi.iter().map(|x| -x * x).collect();
    apply_symbol(grid, &sq, |k2| 1.0 / (2.0 + kappa * k2))
}

// Petviashvili iteration for (1 - Delta) phi = -phi psi[phi], where
// psi[phi] = -(2 - kappa Delta)^{-1} phi^2 makes the right side cubic in phi,
// so the stabilizing exponent is 3/2.
fn renormalization(kappa: f64, grid: &Grid, opts: &GsOptions) -> Result<Solved> {
    let k2 = grid.k2().to_vec();
    let mut phi: Vec<f64> = grid.axis().iter().map(|r| opts.seed_amplitude * (-0.5 * r * r).exp()).collect();
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for it in 0..opts.max_iter {
        let psi = slaved_psi(grid, &phi, kappa);
        let rel = relative_residual(grid, &phi, &psi, kappa);
        history.push(rel);
        if !rel.is_finite() {
            return Err(Error::Numeric("renormalization diverged".into()));
        }
        if rel < opts.tol {
            return Ok((phi, psi, it, history));
        }
        if rel < 0.999 * best {
            best = rel;
            stall = 0;
        } else {
            stall += 1;
            if stall > 50 && rel < 1e3 * opts.tol {
                // round-off floor reached
                return Ok((phi, psi, it, history));
            }
        }
        let nl: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| -a * b).collect();
        let ph = grid.forward(&cplx(&phi));
        let nh = grid.forward(&cplx(&nl));
        let mut num = 0.0;
        let mut den = 0.0;
        for m in 0..k2.len() {
            num += (1.0 + k2[m]) * ph[m].re * ph[m].re;
            den += ph[m].re * nh[m].re;
        }
        if den <= 0.0 {
            return Err(Error::Numeric("renormalization factor lost its sign".into()));
        }
        let factor = (num / den).powf(1.5);
        let next: Field = nh.iter().zip(&k2).map(|(z, k)| z * (factor / (1.0 + k))).collect();
        phi = real(&grid.inverse(&next));
    }
    let psi = slaved_psi(grid, &phi, kappa);
    let rel = relative_residual(grid, &phi, &psi, kappa);
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: rel, history })
}

// Minimizes Q^3 / C^2 over pairs (Q the quadratic part of the action, C the
// cubic one) with a preconditioned descent, rescaling onto the Nehari set
// 2Q + 3C = 0 after every step; then Newton on the full coupled system.
fn gradient_flow(kappa: f64, grid: &Grid, opts: &GsOptions) -> Result<Solved> {
    let n = grid.len();
    let a = opts.seed_amplitude;
    let mut phi: Vec<f64> = grid.axis().iter().map(|r| a * (-0.5 * r * r).exp()).collect();
    let mut psi: Vec<f64> = grid.axis().iter().map(|r| -0.5 * a * a * (-r * r).exp()).collect();
    let q_of = |phi: &[f64], psi: &[f64]| -> f64 {
        let p = cplx(phi);
        let s = cplx(psi);
        grid.norm_sq(&p) + grid.gradient_norm_sq(&p) + grid.norm_sq(&s) + 0.5 * kappa * grid.gradient_norm_sq(&s)
    };
    let c_of = |phi: &[f64], psi: &[f64]| -> f64 {
        phi.iter().zip(psi).zip(grid.weights()).map(|((a, b), w)| w * a * a * b).sum()
    };
    let nehari = |phi: &mut Vec<f64>, psi: &mut Vec<f64>| -> Result<f64> {
        let q = q_of(phi, psi);
        let c = c_of(phi, psi);
        if c >= 0.0 {
            return Err(Error::Numeric("cubic term lost its sign during the flow".into()));
        }
        let t = -2.0 * q / (3.0 * c);
        phi.iter_mut().chain(psi.iter_mut()).for_each(|x| *x *= t);
        Ok(q * q * q / (c * c))
    };
    let mut f = nehari(&mut phi, &mut psi)?;
    let mut history = Vec::new();
    let mut tau = 0.5;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let rel = relative_residual(grid, &phi, &psi, kappa);
        history.push(rel);
        if rel < 1e-4 {
            break;
        }
        let pp: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| a * b).collect();
        let p2: Vec<f64> = phi.iter().map(|a| a * a).collect();
        let dphi = apply_symbol(grid, &pp, |k2| 1.0 / (1.0 + k2));
        let dpsi = apply_symbol(grid, &p2, |k2| 1.0 / (2.0 + kappa * k2));
        loop {
            let mut np: Vec<f64> = (0..n).map(|i| phi[i] - tau * (phi[i] + dphi[i])).collect();
            let mut ns: Vec<f64> = (0..n).map(|i| psi[i] - tau * (psi[i] + dpsi[i])).collect();
            let nf = nehari(&mut np, &mut ns);
            match nf {
                Ok(nf) if nf <= f * (1.0 + 1e-14) => {
                    phi = np;
                    psi = ns;
                    f = nf;
                    tau = (tau * 1.2).min(0.9);
                    break;
                }
                _ => {
                    tau *= 0.5;
                    if tau < 1e-8 {
                        return Err(Error::NoConvergence { iterations: it, residual: rel, history });
                    }
                }
            }
        }
    }
    newton_polish(grid, kappa, &mut phi, &mut psi, opts, &mut history)?;
    Ok((phi, psi, it, history))
}

/// Dense nodal matrix of the multiplier `sym(|xi|^2)` on a radial grid.
fn nodal_operator(grid: &Grid, sym: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = grid.len();
    let mut m = DMatrix::zeros(n, n);
    let k2 = grid.k2();
    let mut e = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        let col = grid.multiply_spectral(&e, |i| C64::new(sym(k2[i]), 0.0));
        for i in 0..n {
            m[(i, j)] = col[i].re;
        }
        e[j] = C64::new(0.0, 0.0);
    }
    m
}

fn newton_polish(
    grid: &Grid,
    kappa: f64,
    phi: &mut [f64],
    psi: &mut [f64],
    opts: &GsOptions,
    history: &mut Vec<f64>,
) -> Result<()> {
    if !matches!(grid.plan(), SpectralPlan::Radial(_)) {
        return Err(Error::Unsupported("Newton polish needs a radial grid".into()));
    }
    let n = grid.len();
    let a1 = nodal_operator(grid, |k2| 1.0 + k2);
    let a2 = nodal_operator(grid, |k2| 2.0 + kappa * k2);
    let mut last = f64::INFINITY;
    for _ in 0..30 {
        let rel = relative_residual(grid, phi, psi, kappa);
        history.push(rel);
        if rel < opts.tol || rel >= 0.5 * last {
            break;
        }
        last = rel;
        let p = DVector::from_column_slice(phi);
        let s = DVector::from_column_slice(psi);
        let g1 = &a1 * &p + p.component_mul(&s);
        let g2 = &a2 * &s + p.component_mul(&p);
        let mut jac = DMatrix::zeros(2 * n, 2 * n);
        jac.view_mut((0, 0), (n, n)).copy_from(&a1);
        jac.view_mut((n, n), (n, n)).copy_from(&a2);
        for i in 0..n {
            jac[(i, i)] += psi[i];
            jac[(i, n + i)] = phi[i];
            jac[(n + i, i)] = 2.0 * phi[i];
        }
        let mut rhs = DVector::zeros(2 * n);
        rhs.rows_mut(0, n).copy_from(&(-g1));
        rhs.rows_mut(n, n).copy_from(&(-g2));
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("singular Jacobian in Newton polish".into()))?;
        for i in 0..n {
            phi[i] += delta[i];
            psi[i] += delta[n + i];
        }
    }
    Ok(())
}

impl GroundState {
    /// (phi, psi) as a state pair at t = 0.
    pub fn to_pair(&self) -> StatePair {
        StatePair {
            grid: self.grid.clone(),
            u: cplx(&self.phi),
            v: cplx(&self.psi),
            t: 0.0,
            kappa: self.kappa,
        }
    }

    /// ||grad phi||^2 + (kappa/2)||grad psi||^2.
    pub fn kinetic(&self) -> f64 {
        let (a, b) = gradient_norms_sq(&self.to_pair());
        a + 0.5 * self.kappa * b
    }

    /// int phi^2 psi.
    pub fn potential(&self) -> f64 {
        let p = self.to_pair();
        cubic_term(&self.grid, &p.u, &p.v)
    }

    pub fn energy(&self) -> f64 {
        self.kinetic() + self.potential()
    }

    pub fn meta(&self) -> GroundStateMeta {
        GroundStateMeta {
            kappa: self.kappa,
            mass: self.mass,
            action: self.action,
            residual: self.residual,
            energy: self.energy(),
            kinetic: self.kinetic(),
            potential: self.potential(),
            phi0: self.grid.radial_eval(&self.grid.forward(&cplx(&self.phi)), 0.0).re,
            psi0: self.grid.radial_eval(&self.grid.forward(&cplx(&self.psi)), 0.0).re,
            method: self.method,
            iterations: self.iterations,
            grid: self.grid.spec(),
        }
    }

    /// Residual relative to ||phi||_{H^1} + ||psi||_{H^1}.
    pub fn relative_residual(&self) -> f64 {
        self.residual / (h1(&self.grid, &self.phi) + h1(&self.grid, &self.psi))
    }

    /// Checks phi > 0 > psi up to round-off in the tail and int phi^2 psi < 0.
    pub fn sign_structure_ok(&self) -> bool {
        let pmax = self.phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let smax = self.psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol_p = 1e-10 * pmax;
        let tol_s = 1e-10 * smax;
        self.phi.iter().all(|x| *x > -tol_p) && self.psi.iter().all(|x| *x < tol_s) && self.potential() < 0.0
    }

    /// Resamples the profiles onto another radial grid by spectral interpolation.
    pub fn resample(&self, target: &Grid) -> Result<StatePair> {
        if !target.is_radial() {
            return Err(Error::Unsupported("ground states live on radial grids".into()));
        }
        let ph = self.grid.forward(&cplx(&self.phi));
        let sh = self.grid.forward(&cplx(&self.psi));
        let u = target.axis().iter().map(|&r| self.grid.radial_eval(&ph, r)).collect();
        let v = target.axis().iter().map(|&r| self.grid.radial_eval(&sh, r)).collect();
        StatePair::new(target.clone(), u, v, 0.0, self.kappa)
    }
}

/// |Re int u^2 conj(v)| / [(M(u,v)/M_gs)^{1/2} (||grad u||^2 + (kappa/2)||grad v||^2)].
///
/// Returns +inf for a nonzero numerator over a vanishing denominator.
pub fn gn_ratio(pair: &StatePair, kappa: f64, m_gs: f64) -> Result<f64> {
    if !(m_gs > 0.0) {
        return Err(Error::InvalidArgument("threshold mass must be positive".into()));
    }
    let num = cubic_term(&pair.grid, &pair.u, &pair.v).abs();
    let (gu, gv) = gradient_norms_sq(pair);
    let den = (pair.mass() / m_gs).sqrt() * (gu + 0.5 * kappa * gv);
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

/// One row of a threshold scan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ThresholdRow {
    pub c: f64,
    pub mass: f64,
    pub energy: f64,
}

/// Mass and energy of c (phi, psi): mass c^2 M, energy c^2 G + c^3 P.
pub fn threshold_scan_data(gs: &GroundState, c_values: &[f64]) -> Vec<ThresholdRow> {
    let g = gs.kinetic();
    let p = gs.potential();
    c_values
        .iter()
        .map(|&c| ThresholdRow { c, mass: c * c * gs.mass, energy: c * c * g + c * c * c * p })
        .collect()
}
