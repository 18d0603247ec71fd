use serde::{Deserialize, Serialize};

use super::grid::{Field, Grid, C64};
use crate::error::{Error, Result};

/// The field pair (u, v) on one grid, with time stamp and dispersion ratio kappa.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub grid: Grid,
    pub u: Field,
    pub v: Field,
    pub t: f64,
    pub kappa: f64,
}

impl StatePair {
    pub fn new(grid: Grid, u: Field, v: Field, t: f64, kappa: f64) -> Result<Self> {
        grid.check(&u)?;
        grid.check(&v)?;
        if !(kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { grid, u, v, t, kappa })
    }

    pub fn zeros(grid: &Grid, kappa: f64) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid: grid.clone(), u: z.clone(), v: z, t: 0.0, kappa }
    }

    /// ||u||^2 + ||v||^2.
    pub fn mass(&self) -> f64 {
        self.grid.norm_sq(&self.u) + self.grid.norm_sq(&self.v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.u.iter_mut().chain(out.v.iter_mut()).for_each(|z| *z *= c);
        out
    }

    /// Pointwise complex conjugate (time reversal of the system).
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.u.iter_mut().chain(out.v.iter_mut()).for_each(|z| *z = z.conj());
        out
    }

    /// L^2 distance ||(u,v) - (u',v')||.
    pub fn distance(&self, other: &StatePair) -> f64 {
        let du: Field = self.u.iter().zip(&other.u).map(|(a, b)| a - b).collect();
        let dv: Field = self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect();
        (self.grid.norm_sq(&du) + self.grid.norm_sq(&dv)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.im == 0.0)
    }
}

/// Compact metadata recorded next to a state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateMeta {
    pub t: f64,
    pub kappa: f64,
    pub mass: f64,
}

impl From<&StatePair> for StateMeta {
    fn from(p: &StatePair) -> Self {
        Self { t: p.t, kappa: p.kappa, mass: p.mass() }
    }
}
