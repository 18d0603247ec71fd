//! Time evolution, free propagators, PDE residuals and dispersive audits.

pub mod audits;
pub mod evolve;
pub mod propagate;
pub mod residual;

pub use audits::{bilinear_strichartz_ratio, strichartz_audit, BilinearOptions, BilinearReport};
pub use evolve::{evolve, Adapt, EvolveOptions, Trajectory, TrajectorySummary, Verdict, VerdictFlags};
pub use evolve::slope;
pub use propagate::{free_propagate, nonlinear_point, nonlinear_substep, step};
pub use residual::{galilean_residual, pde_residual, pde_residual_snapshots, GalileanReport};
