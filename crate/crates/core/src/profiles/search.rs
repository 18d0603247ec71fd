//! Small optimizers shared by extraction and the orbit metric.

use crate::fields::{Field, Grid, C64};

/// Period in theta of Re(e^{-i theta} a + e^{-i theta / kappa} b).
fn theta_period(kappa: f64) -> f64 {
    let r = 1.0 / kappa;
    for q in 1..=8u32 {
        let p = r * q as f64;
        if (p - p.round()).abs() < 1e-9 {
            return 2.0 * std::f64::consts::PI * q as f64;
        }
    }
    16.0 * std::f64::consts::PI
}

/// Maximizes f(theta) = Re(e^{-i theta} a + e^{-i theta / kappa} b) by sampling
/// then Newton on f' = 0. Returns (theta, f(theta)).
pub fn best_phase(a: C64, b: C64, kappa: f64) -> (f64, f64) {
    let f = |t: f64| (C64::from_polar(1.0, -t) * a + C64::from_polar(1.0, -t / kappa) * b).re;
    let df = |t: f64| (C64::from_polar(1.0, -t) * a).im + (C64::from_polar(1.0, -t / kappa) * b).im / kappa;
    let d2f = |t: f64| -(C64::from_polar(1.0, -t) * a).re - (C64::from_polar(1.0, -t / kappa) * b).re / (kappa * kappa);
    let period = theta_period(kappa);
    let samples = (64.0 * period / (2.0 * std::f64::consts::PI)) as usize;
    let mut best = (0.0, f(0.0));
    for k in 1..samples {
        let t = period * k as f64 / samples as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let mut t = best.0;
    for _ in 0..30 {
        let h = d2f(t);
        if !(h < 0.0) {
            break;
        }
        let step = df(t) / h;
        t -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    if !(f(t) >= best.1) {
        t = best.0;
    }
    (t.rem_euclid(period), f(t))
}

/// Golden-section maximization of `f` on [a, b] with `iters` shrink steps.
/// Returns the best abscissa seen and its value.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// <T_{x_j} a, g> for every grid point x_j, from spectral coefficients of a and g.
pub fn correlate(grid: &Grid, ah: &[C64], gh: &[C64]) -> Field {
    let prod: Field = ah.iter().zip(gh).map(|(a, g)| a.conj() * g).collect();
    let c = (2.0 * std::f64::consts::PI).powf(grid.dims() as f64 / 2.0);
    grid.inverse(&prod).into_iter().map(|z| z * c).collect()
}

/// Indices of the `k` largest entries of `score`.
pub fn top_k(score: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..score.len()).collect();
    let k = k.min(idx.len());
    if k == 0 {
        return idx;
    }
    idx.select_nth_unstable_by(k - 1, |a, b| score[*b].partial_cmp(&score[*a]).unwrap_or(std::cmp::Ordering::Equal));
    idx.truncate(k);
    idx.sort_by(|a, b| score[*b].partial_cmp(&score[*a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Coordinates of grid point `i` as a 2-vector.
pub fn point(grid: &Grid, i: usize) -> [f64; 2] {
    let d = grid.dims();
    [grid.coord(i, 0), if d > 1 { grid.coord(i, 1) } else { 0.0 }]
}

/// e^{-i x . xi} f.
pub fn demodulate(grid: &Grid, f: &[C64], xi: [f64; 2]) -> Field {
    if xi == [0.0, 0.0] || grid.is_radial() {
        return f.to_vec();
    }
    f.iter()
        .enumerate()
        .map(|(i, z)| {
            let x = point(grid, i);
            z * C64::from_polar(1.0, -(x[0] * xi[0] + x[1] * xi[1]))
        })
        .collect()
}
