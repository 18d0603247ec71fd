//! Grids, field pairs, spectral transforms, Littlewood-Paley projections and
//! the symmetry group.

pub mod grid;
pub mod io;
pub mod lp;
pub mod state;
pub mod symmetry;

pub use grid::{make_grid, Field, Grid, GridKind, GridSpec, SpectralPlan, C64, SPHERE3};
pub use lp::{cutoff, lp_project, lp_project_pair, lp_project_spectral, LpMode};
pub use state::StatePair;
pub use symmetry::{
    apply_h, apply_symmetry, galilean_boost, inverse_element, scaling_transform, sobolev_norm,
    SymmetryElement, Transformed,
};

/// Physical samples to spectral coefficients.
pub fn transform_forward(grid: &Grid, f: &[C64]) -> crate::Result<Field> {
    grid.check(f)?;
    Ok(grid.forward(f))
}

/// Spectral coefficients to physical samples.
pub fn transform_inverse(grid: &Grid, fh: &[C64]) -> crate::Result<Field> {
    grid.check(fh)?;
    Ok(grid.inverse(fh))
}
