use crate::fields::{Field, Grid, StatePair, C64};

/// Exact free flow (e^{it Delta} u, e^{it kappa Delta} v) in the spectral basis.
pub fn free_propagate(pair: &StatePair, t: f64) -> StatePair {
    if t == 0.0 {
        return pair.clone();
    }
    let g = &pair.grid;
    let mut out = pair.clone();
    out.u = g.multiply_spectral(&pair.u, |i| C64::from_polar(1.0, -t * g.k2()[i]));
    out.v = g.multiply_spectral(&pair.v, |i| C64::from_polar(1.0, -t * pair.kappa * g.k2()[i]));
    out.t = pair.t + t;
    out
}

/// Multiplies spectral coefficients by the free-flow phases for time `t`.
pub fn free_phase(grid: &Grid, uh: &mut [C64], vh: &mut [C64], kappa: f64, t: f64) {
    for ((a, b), k2) in uh.iter_mut().zip(vh.iter_mut()).zip(grid.k2()) {
        *a *= C64::from_polar(1.0, -t * k2);
        *b *= C64::from_polar(1.0, -t * kappa * k2);
    }
}

#[inline]
fn rhs(u: C64, v: C64) -> (C64, C64) {
    let mi = C64::new(0.0, -1.0);
    (mi * u.conj() * v, mi * u * u)
}

/// One classical Runge-Kutta step of i u' = conj(u) v, i v' = u^2 at a single point.
#[inline]
pub fn nonlinear_point(u: C64, v: C64, dt: f64) -> (C64, C64) {
    let (k1u, k1v) = rhs(u, v);
    let (k2u, k2v) = rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
    let (k3u, k3v) = rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
    let (k4u, k4v) = rhs(u + dt * k3u, v + dt * k3v);
    (
        u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Pointwise nonlinear flow over `dt` on whole fields.
pub fn nonlinear_substep(u: &[C64], v: &[C64], dt: f64) -> (Field, Field) {
    u.iter().zip(v).map(|(&a, &b)| nonlinear_point(a, b, dt)).unzip()
}

/// Largest pointwise change of |u|^2 + |v|^2 over a nonlinear substep,
/// relative to the largest density.
pub fn density_drift(u0: &[C64], v0: &[C64], u1: &[C64], v1: &[C64]) -> f64 {
    let mut top = 0.0f64;
    let mut worst = 0.0f64;
    for i in 0..u0.len() {
        let d0 = u0[i].norm_sqr() + v0[i].norm_sqr();
        let d1 = u1[i].norm_sqr() + v1[i].norm_sqr();
        top = top.max(d0);
        worst = worst.max((d1 - d0).abs());
    }
    if top == 0.0 {
        0.0
    } else {
        worst / top
    }
}

/// One Strang step: half free flow, full nonlinear flow, half free flow.
pub fn step(pair: &StatePair, dt: f64) -> StatePair {
    let g = &pair.grid;
    let mut spec = g.forward_many(&[&pair.u, &pair.v]);
    let (mut uh, mut vh) = (spec.remove(0), spec.remove(0));
    free_phase(g, &mut uh, &mut vh, pair.kappa, 0.5 * dt);
    let mut phys = g.inverse_many(&[&uh, &vh]);
    let (u, v) = (phys.remove(0), phys.remove(0));
    let (u, v) = nonlinear_substep(&u, &v, dt);
    let mut spec = g.forward_many(&[&u, &v]);
    let (mut uh, mut vh) = (spec.remove(0), spec.remove(0));
    free_phase(g, &mut uh, &mut vh, pair.kappa, 0.5 * dt);
    let mut phys = g.inverse_many(&[&uh, &vh]);
    StatePair { grid: g.clone(), u: phys.remove(0), v: phys.remove(0), t: pair.t + dt, kappa: pair.kappa }
}
