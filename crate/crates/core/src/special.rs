//! Bessel functions of the first kind, zeros of J1, and Gauss-Legendre rules.

use std::f64::consts::PI;

const ASYMPTOTIC_FROM: f64 = 25.0;

/// Returns (J0(x), J1(x), J2(x)).
pub fn bessel_j012(x: f64) -> (f64, f64, f64) {
    if x < 0.0 {
        let (a, b, c) = bessel_j012(-x);
        return (a, -b, c);
    }
    if x == 0.0 {
        return (1.0, 0.0, 0.0);
    }
    if x > ASYMPTOTIC_FROM {
        return (hankel(0, x), hankel(1, x), hankel(2, x));
    }
    let j = miller(x, 2);
    (j[0], j[1], j[2])
}

/// J_n(x) for integer n >= 0.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        return s * bessel_j(n, -x);
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x > ASYMPTOTIC_FROM.max(2.0 * n as f64 * n as f64) {
        return hankel(n, x);
    }
    miller(x, n as usize)[n as usize]
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j012(x).1
}

// Backward recurrence normalized by J0 + 2 sum J_2k = 1. Returns J_0..=J_top.
fn miller(x: f64, top: usize) -> Vec<f64> {
    let start = x.max(top as f64) + 30.0 + 4.0 * x.sqrt();
    let m = 2 * ((start as usize) / 2 + 1);
    let mut out = vec![0.0; top + 1];
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        // j = J_k, jp = J_{k+1}
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        let km1 = k - 1;
        if km1 <= top {
            out[km1] = j;
        }
        if km1 % 2 == 0 && km1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for o in out.iter_mut() {
                *o *= 1e-250;
            }
        }
    }
    norm += j;
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last || term.abs() < 1e-18 {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let c = (n as f64 / 2.0 + 0.25) * PI;
    let (s, co) = x.sin_cos();
    let cos_chi = co * c.cos() + s * c.sin();
    let sin_chi = s * c.cos() - co * c.sin();
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// k-th positive zero of J1 (k >= 1).
pub fn bessel_j1_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are indexed from 1");
    let beta = (k as f64 + 0.25) * PI;
    let mu = 4.0;
    let b8 = 8.0 * beta;
    let mut z = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3));
    for _ in 0..20 {
        let (j0, j1, _) = bessel_j012(z);
        let d = j0 - j1 / z;
        let step = j1 / d;
        z -= step;
        if step.abs() < 1e-15 * z {
            break;
        }
    }
    z
}

/// First `n` positive zeros of J1.
pub fn bessel_j1_zeros(n: usize) -> Vec<f64> {
    (1..=n).map(bessel_j1_zero).collect()
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre quadrature of `f` over [a, b] using `rule` on each panel.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}
