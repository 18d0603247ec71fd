//! Numerical lab for the coupled quadratic Schrodinger system
//!
//! ```text
//! i u_t + Delta u = conj(u) v,    i v_t + kappa Delta v = u^2
//! ```
//!
//! in four space dimensions (radial) and on periodic boxes in one or two
//! dimensions.

pub mod error;
pub mod fields;
pub mod special;

pub use error::{Error, Result};
pub use fields::{make_grid, Field, Grid, GridKind, GridSpec, StatePair, SymmetryElement, C64};
pub mod diagnostics;
pub mod groundstate;
pub mod dynamics;
pub mod profiles;
pub mod lab;
