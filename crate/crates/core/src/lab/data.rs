//! Seeded random initial data.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Grid, StatePair, C64};

/// Sums of chirped Gaussian bumps a e^{-|x - c|^2 / w^2} e^{i b |x - c|^2} per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpClass {
    pub bumps: usize,
    pub width: (f64, f64),
    pub chirp: f64,
    /// center offsets drawn in [-offset, offset] per axis (cartesian grids only)
    pub offset: f64,
}

impl Default for BumpClass {
    fn default() -> Self {
        Self { bumps: 3, width: (1.5, 3.0), chirp: 0.2, offset: 0.0 }
    }
}

struct Bump {
    a: C64,
    w: f64,
    b: f64,
    c: [f64; 2],
}

fn draw<R: Rng>(rng: &mut R, class: &BumpClass) -> Bump {
    let w = rng.random_range(class.width.0..=class.width.1);
    let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let b = if class.chirp > 0.0 { rng.random_range(-class.chirp..class.chirp) } else { 0.0 };
    let mut c = [0.0; 2];
    if class.offset > 0.0 {
        for x in &mut c {
            *x = rng.random_range(-class.offset..class.offset);
        }
    }
    Bump { a, w, b, c }
}

/// Random pair from `class`, rescaled to total mass `mass`.
pub fn random_bump_pair<R: Rng>(rng: &mut R, grid: &Grid, kappa: f64, class: &BumpClass, mass: f64) -> Result<StatePair> {
    if class.bumps == 0 || !(class.width.0 > 0.0 && class.width.1 >= class.width.0) {
        return Err(Error::InvalidArgument("bump class needs at least one bump and positive widths".into()));
    }
    let bu: Vec<Bump> = (0..class.bumps).map(|_| draw(rng, class)).collect();
    let bv: Vec<Bump> = (0..class.bumps).map(|_| draw(rng, class)).collect();
    let eval = |bs: &[Bump], x: &[f64]| -> C64 {
        bs.iter()
            .map(|b| {
                let r2: f64 = x.iter().enumerate().map(|(i, xi)| (xi - b.c[i.min(1)]).powi(2)).sum();
                b.a * (-r2 / (b.w * b.w)).exp() * C64::from_polar(1.0, b.b * r2)
            })
            .sum()
    };
    let (u, v) = if grid.is_radial() {
        (grid.sample_radial(|r| eval(&bu, &[r])), grid.sample_radial(|r| eval(&bv, &[r])))
    } else {
        (grid.sample(|x| eval(&bu, x)), grid.sample(|x| eval(&bv, x)))
    };
    let p = StatePair::new(grid.clone(), u, v, 0.0, kappa)?;
    let m = p.mass();
    if !(m > 0.0) {
        return Err(Error::Numeric("random draw has zero mass".into()));
    }
    Ok(p.scaled((mass / m).sqrt()))
}
