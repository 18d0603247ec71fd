//! Conserved quantities and pointwise densities.

use crate::fields::{Field, Grid, StatePair, C64};

/// M(u,v) = ||u||^2 + ||v||^2.
pub fn mass(pair: &StatePair) -> f64 {
    pair.mass()
}

/// ||grad u||^2 and ||grad v||^2.
pub fn gradient_norms_sq(pair: &StatePair) -> (f64, f64) {
    (pair.grid.gradient_norm_sq(&pair.u), pair.grid.gradient_norm_sq(&pair.v))
}

/// Re int u^2 conj(v).
pub fn cubic_term(grid: &Grid, u: &[C64], v: &[C64]) -> f64 {
    u.iter()
        .zip(v)
        .zip(grid.weights())
        .map(|((a, b), w)| w * (a * a * b.conj()).re)
        .sum()
}

/// E(u,v) = ||grad u||^2 + (kappa/2) ||grad v||^2 + Re int u^2 conj(v).
pub fn energy(pair: &StatePair) -> f64 {
    let (gu, gv) = gradient_norms_sq(pair);
    gu + 0.5 * pair.kappa * gv + cubic_term(&pair.grid, &pair.u, &pair.v)
}

/// Kinetic part ||grad u||^2 + (kappa/2) ||grad v||^2.
pub fn kinetic(pair: &StatePair) -> f64 {
    let (gu, gv) = gradient_norms_sq(pair);
    gu + 0.5 * pair.kappa * gv
}

/// ||grad (u,v)|| = (||grad u||^2 + ||grad v||^2)^{1/2}.
pub fn gradient_norm(pair: &StatePair) -> f64 {
    let (gu, gv) = gradient_norms_sq(pair);
    (gu + gv).sqrt()
}

/// int (|u|^3 + |v|^3).
pub fn cubic_density_integral(pair: &StatePair) -> f64 {
    pair.u
        .iter()
        .zip(&pair.v)
        .zip(pair.grid.weights())
        .map(|((a, b), w)| w * (a.norm().powi(3) + b.norm().powi(3)))
        .sum()
}

/// x . grad f at each sample (r f_r on radial grids).
pub fn radial_derivative_weighted(grid: &Grid, f: &[C64]) -> Field {
    let grads = grid.gradient(f);
    if grid.is_radial() {
        return grads[0].iter().zip(grid.axis()).map(|(d, r)| d * r).collect();
    }
    (0..grid.len())
        .map(|i| (0..grid.dims()).map(|a| grads[a][i] * grid.coord(i, a)).sum())
        .collect()
}

/// V = 4 Im int x . (conj(u) grad u + 1/2 conj(v) grad v).
pub fn virial_momentum(pair: &StatePair) -> f64 {
    let g = &pair.grid;
    let xu = radial_derivative_weighted(g, &pair.u);
    let xv = radial_derivative_weighted(g, &pair.v);
    let mut s = 0.0;
    for i in 0..g.len() {
        s += g.weights()[i] * (pair.u[i].conj() * xu[i] + 0.5 * pair.v[i].conj() * xv[i]).im;
    }
    4.0 * s
}

/// int |x|^2 (|u|^2 + |v|^2).
pub fn variance(pair: &StatePair) -> f64 {
    let g = &pair.grid;
    (0..g.len())
        .map(|i| {
            let r = g.radius(i);
            g.weights()[i] * r * r * (pair.u[i].norm_sqr() + pair.v[i].norm_sqr())
        })
        .sum()
}

/// Fraction of the mass at |x| > frac * extent (radial) or outside the
/// centered cube of half-side frac * extent / 2 (cartesian).
pub fn edge_mass_fraction(pair: &StatePair, frac: f64) -> f64 {
    let g = &pair.grid;
    let total = pair.mass();
    if total == 0.0 {
        return 0.0;
    }
    let mut edge = 0.0;
    for i in 0..g.len() {
        let outside = if g.is_radial() {
            g.radius(i) > frac * g.extent()
        } else {
            (0..g.dims()).any(|a| g.coord(i, a).abs() > 0.5 * frac * g.extent())
        };
        if outside {
            edge += g.weights()[i] * (pair.u[i].norm_sqr() + pair.v[i].norm_sqr());
        }
    }
    edge / total
}
