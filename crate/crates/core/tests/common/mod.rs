#![allow(dead_code)]

use mrnls::fields::{Field, Grid, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// J_n(x) from its integral representation, trapezoid rule.
pub fn bessel_oracle(n: i32, x: f64) -> f64 {
    let m = 2000 + (4.0 * x.abs()) as usize;
    let h = std::f64::consts::PI / m as f64;
    let mut s = 0.0;
    for k in 0..=m {
        let t = k as f64 * h;
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        s += w * (n as f64 * t - x * t.sin()).cos();
    }
    s * h / std::f64::consts::PI
}

/// Zero of the oracle J1 bracketed in [a, b].
pub fn bisect_j1(mut a: f64, mut b: f64) -> f64 {
    let mut fa = bessel_oracle(1, a);
    for _ in 0..70 {
        let c = 0.5 * (a + b);
        let fc = bessel_oracle(1, c);
        if (fa < 0.0) == (fc < 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

/// Composite Simpson rule on [a, b].
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Sum of a few random complex Gaussian bumps.
pub fn random_bumps<R: Rng>(grid: &Grid, rng: &mut R, count: usize, spread: f64, width: (f64, f64)) -> Field {
    let dims = grid.dims().min(2);
    let radial = grid.is_radial();
    let bumps: Vec<([f64; 2], f64, C64)> = (0..count)
        .map(|_| {
            let c = if radial {
                [0.0, 0.0]
            } else {
                [rng.random_range(-spread..spread), rng.random_range(-spread..spread)]
            };
            let w = rng.random_range(width.0..width.1);
            let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, w, a)
        })
        .collect();
    grid.sample(|x| {
        let mut s = C64::new(0.0, 0.0);
        for (c, w, a) in &bumps {
            let mut r2 = 0.0;
            for d in 0..dims {
                let dx = x[d] - c[d];
                r2 += dx * dx;
            }
            if radial {
                r2 = x[0] * x[0];
            }
            s += a * (-r2 / (w * w)).exp();
        }
        s
    })
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
