//! Fixed inputs shared by the kernel benchmarks.

use mrnls::fields::{make_grid, Grid, GridKind, StatePair, C64};

pub fn cartesian(n: usize) -> Grid {
    make_grid(GridKind::Cartesian, n, 40.0, 2).expect("valid cartesian grid")
}

pub fn radial(n: usize) -> Grid {
    make_grid(GridKind::Radial4d, n, 20.0, 4).expect("valid radial grid")
}

/// Two offset Gaussians with a chirp on u, so both channels carry phase.
pub fn gaussian_pair(grid: &Grid, kappa: f64) -> StatePair {
    let bump = |r2: f64, w: f64, chirp: f64| (-r2 / (w * w)).exp() * C64::from_polar(1.0, chirp * r2);
    let (u, v) = if grid.is_radial() {
        (grid.sample_radial(|r| bump(r * r, 2.0, 0.1)), grid.sample_radial(|r| C64::new(0.0, 0.5) * bump(r * r, 1.5, 0.0)))
    } else {
        (
            grid.sample(|x| bump(x[0] * x[0] + x[1] * x[1], 2.0, 0.1)),
            grid.sample(|x| C64::new(0.0, 0.5) * bump((x[0] - 1.0).powi(2) + x[1] * x[1], 1.5, 0.0)),
        )
    };
    StatePair::new(grid.clone(), u, v, 0.0, kappa).expect("fields match the grid")
}
