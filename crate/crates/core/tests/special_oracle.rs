use mrnls::special::{bessel_j, bessel_j012, bessel_j1_zero, gauss_legendre};

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt; trapezoid is spectrally accurate here.
fn bessel_oracle(n: i32, x: f64) -> f64 {
    let m = 4000 + (4.0 * x.abs()) as usize;
    let h = std::f64::consts::PI / m as f64;
    let mut s = 0.0;
    for k in 0..=m {
        let t = k as f64 * h;
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        s += w * (n as f64 * t - x * t.sin()).cos();
    }
    s * h / std::f64::consts::PI
}

fn bisect_zero(mut a: f64, mut b: f64) -> f64 {
    let mut fa = bessel_oracle(1, a);
    for _ in 0..80 {
        let c = 0.5 * (a + b);
        let fc = bessel_oracle(1, c);
        if fc == 0.0 {
            return c;
        }
        if (fa < 0.0) == (fc < 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn bessel_matches_integral_representation() {
    let xs = [
        0.0, 1e-3, 0.1, 0.7, 1.0, 2.5, 5.0, 9.3, 14.0, 19.9, 24.9, 25.1, 30.0, 47.5, 100.0,
        333.3, 1500.0,
    ];
    for &x in &xs {
        let (j0, j1, j2) = bessel_j012(x);
        for (n, got) in [(0, j0), (1, j1), (2, j2)] {
            let want = bessel_oracle(n, x);
            assert!((got - want).abs() < 2e-14 * (1.0 + want.abs()) + 5e-15, "J{n}({x}): {got} vs {want}");
        }
    }
    assert!((bessel_j(3, 4.2) - bessel_oracle(3, 4.2)).abs() < 1e-14);
    assert!((bessel_j(1, -2.0) + bessel_oracle(1, 2.0)).abs() < 1e-14);
}

#[test]
fn j1_zeros_match_bisection() {
    // Known first zero to 16 digits.
    assert!((bessel_j1_zero(1) - 3.831_705_970_207_512).abs() < 1e-13);
    for k in [1usize, 2, 3, 4, 5, 17, 64, 257] {
        let z = bessel_j1_zero(k);
        let beta = (k as f64 + 0.25) * std::f64::consts::PI;
        let want = bisect_zero(beta - 0.6, beta + 0.1);
        assert!((z - want).abs() < 1e-11, "zero {k}: {z} vs {want}");
    }
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(12);
    for p in 0..24 {
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
        let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
        assert!((got - want).abs() < 1e-14, "degree {p}");
    }
}
