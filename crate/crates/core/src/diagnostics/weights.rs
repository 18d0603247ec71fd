//! Radial cutoff weights for the Morawetz functionals.
//!
//! theta is the Littlewood-Paley cutoff, Theta(r) = (1/r) int_0^r theta.
//! vartheta_L(x) = theta(max(0, |x| - L + 2)) on R^4, theta_L is its
//! autocorrelation divided by L^4, Theta_L the running mean of theta_L,
//! chi_L(x) = theta(max(0, |x| - L + 3)).
//!
//! theta_L is computed by writing vartheta_L as a superposition of ball
//! indicators, vartheta_L = int_1^2 1{|x| < L - 2 + s} (-theta'(s)) ds, so the
//! autocorrelation is a double integral of exact 4-ball overlap volumes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::lp::{cutoff, cutoff_deriv};
use crate::special::gauss_legendre;

/// Volume of the part of the 4-ball of radius a beyond the hyperplane at signed height c.
fn cap4(a: f64, c: f64) -> f64 {
    let c = c.clamp(-a, a);
    let f = |x: f64| {
        let s = (a * a - x * x).max(0.0).sqrt();
        0.25 * x * s * s * s + 0.375 * a * a * x * s + 0.375 * a.powi(4) * (x / a).clamp(-1.0, 1.0).asin()
    };
    4.0 * PI / 3.0 * (f(a) - f(c))
}

/// Volume of the intersection of 4-balls of radii a, b with centers r apart.
pub fn lens_volume(a: f64, b: f64, r: f64) -> f64 {
    if r >= a + b {
        return 0.0;
    }
    if r <= (a - b).abs() {
        return 0.5 * PI * PI * a.min(b).powi(4);
    }
    let c1 = (r * r + a * a - b * b) / (2.0 * r);
    cap4(a, c1) + cap4(b, r - c1)
}

/// d/dr of [`lens_volume`]: minus the volume of the 3-ball cut out by the common hyperplane.
pub fn lens_volume_deriv(a: f64, b: f64, r: f64) -> f64 {
    if r >= a + b || r <= (a - b).abs() {
        return 0.0;
    }
    let c1 = (r * r + a * a - b * b) / (2.0 * r);
    let h2 = (a * a - c1 * c1).max(0.0);
    -4.0 * PI / 3.0 * h2 * h2.sqrt()
}

pub fn vartheta_l(l: f64, r: f64) -> f64 {
    cutoff((r - l + 2.0).max(0.0))
}

pub fn chi_l(l: f64, r: f64) -> f64 {
    cutoff((r - l + 3.0).max(0.0))
}

/// Evaluates theta_L and theta_L' by Gauss-Legendre quadrature of the layer-cake integral.
/// The inner integral is split where the overlap volume has kinks
/// (|a - b| = r and a + b = r).
pub struct ThetaL {
    l: f64,
    nodes: Vec<f64>,
    w: Vec<f64>,
    inner_x: Vec<f64>,
    inner_w: Vec<f64>,
}

impl ThetaL {
    pub fn new(l: f64) -> Self {
        let (x, w) = gauss_legendre(48);
        // map [-1, 1] to [1, 2] and fold in -theta'
        let nodes: Vec<f64> = x.iter().map(|t| 1.5 + 0.5 * t).collect();
        let w: Vec<f64> = w.iter().zip(&nodes).map(|(w, s)| 0.5 * w * (-cutoff_deriv(*s))).collect();
        let (inner_x, inner_w) = gauss_legendre(32);
        Self { l, nodes, w, inner_x, inner_w }
    }

    fn double<F: Fn(f64, f64) -> f64>(&self, r: f64, f: F) -> f64 {
        let base = self.l - 2.0;
        let mut acc = 0.0;
        for (i, s) in self.nodes.iter().enumerate() {
            let mut cuts = vec![1.0, 2.0, s - r, s + r, r - 2.0 * base - s];
            cuts.retain(|c| *c >= 1.0 && *c <= 2.0);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let mut inner = 0.0;
            for seg in cuts.windows(2) {
                let (a, b) = (seg[0], seg[1]);
                for (x, w) in self.inner_x.iter().zip(&self.inner_w) {
                    let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
                    inner += 0.5 * (b - a) * w * (-cutoff_deriv(t)) * f(base + s, base + t);
                }
            }
            acc += self.w[i] * inner;
        }
        acc / self.l.powi(4)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.double(r, |a, b| lens_volume(a, b, r))
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.double(r, |a, b| lens_volume_deriv(a, b, r))
    }
}

/// Tabulated weights on a uniform radial mesh.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightFamily {
    pub l: f64,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub big_theta: Vec<f64>,
    /// -Theta'(r) = (Theta - theta)(r) / r
    pub big_theta_slope: Vec<f64>,
    pub vartheta_l: Vec<f64>,
    pub chi_l: Vec<f64>,
    pub theta_l: Vec<f64>,
    pub theta_l_deriv: Vec<f64>,
    pub big_theta_l: Vec<f64>,
    /// -Theta_L'(r) = (Theta_L - theta_L)(r) / r
    pub big_theta_l_slope: Vec<f64>,
    /// int_0^inf theta_L, for Theta_L beyond the table
    pub theta_l_integral: f64,
}

/// Tabulates every weight for parameter `l` on `points` mesh points covering [0, 2L + 2].
pub fn weight_tables_with(l: f64, points: usize) -> Result<WeightFamily> {
    if !(l >= 8.0) {
        return Err(Error::InvalidArgument(format!("L must be at least 8, got {l}")));
    }
    if points < 16 {
        return Err(Error::InvalidArgument("weight tables need at least 16 points".into()));
    }
    let r_max = 2.0 * l + 2.0;
    let h = r_max / (points - 1) as f64;
    let r: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
    let tl = ThetaL::new(l);
    let (gx, gw) = gauss_legendre(8);
    // cumulative integrals by Gauss-Legendre on each mesh cell
    let cumulative = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let mut out = vec![0.0; points];
        for i in 1..points {
            let (a, b) = (r[i - 1], r[i]);
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                s += w * f(0.5 * (a + b) + 0.5 * (b - a) * x);
            }
            out[i] = out[i - 1] + 0.5 * (b - a) * s;
        }
        out
    };
    let theta: Vec<f64> = r.iter().map(|&x| cutoff(x)).collect();
    let ci = cumulative(&|x| cutoff(x));
    let big_theta: Vec<f64> = (0..points).map(|i| if i == 0 { 1.0 } else { ci[i] / r[i] }).collect();
    let big_theta_slope: Vec<f64> =
        (0..points).map(|i| if i == 0 { 0.0 } else { (big_theta[i] - theta[i]) / r[i] }).collect();
    let theta_l: Vec<f64> = r.iter().map(|&x| tl.value(x)).collect();
    let theta_l_deriv: Vec<f64> = r.iter().map(|&x| tl.deriv(x)).collect();
    let cl = cumulative(&|x| tl.value(x));
    let big_theta_l: Vec<f64> = (0..points).map(|i| if i == 0 { theta_l[0] } else { cl[i] / r[i] }).collect();
    let big_theta_l_slope: Vec<f64> =
        (0..points).map(|i| if i == 0 { 0.0 } else { (big_theta_l[i] - theta_l[i]) / r[i] }).collect();
    Ok(WeightFamily {
        l,
        vartheta_l: r.iter().map(|&x| vartheta_l(l, x)).collect(),
        chi_l: r.iter().map(|&x| chi_l(l, x)).collect(),
        r,
        theta,
        big_theta,
        big_theta_slope,
        theta_l,
        theta_l_deriv,
        big_theta_l,
        big_theta_l_slope,
        theta_l_integral: cl[points - 1],
    })
}

/// [`weight_tables_with`] at 64 points per unit of L.
pub fn weight_tables(l: f64) -> Result<WeightFamily> {
    weight_tables_with(l, (32.0 * (2.0 * l + 2.0)) as usize + 1)
}

impl WeightFamily {
    fn lerp(&self, col: &[f64], x: f64) -> f64 {
        let h = self.r[1];
        let s = x / h;
        let i = (s.floor() as usize).min(self.r.len() - 2);
        let f = s - i as f64;
        col[i] * (1.0 - f) + col[i + 1] * f
    }

    /// Theta(r) for any r >= 0.
    pub fn big_theta_at(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= 2.0 {
            // int_0^inf theta is a fixed number, read off the table
            return self.lerp(&self.big_theta, 2.0) * 2.0 / x;
        }
        self.lerp(&self.big_theta, x)
    }

    /// Theta_L(r) for any r >= 0.
    pub fn big_theta_l_at(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= *self.r.last().unwrap() {
            return self.theta_l_integral / x;
        }
        self.lerp(&self.big_theta_l, x)
    }

    pub fn theta_l_at(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= *self.r.last().unwrap() {
            return 0.0;
        }
        self.lerp(&self.theta_l, x)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,theta,Theta,neg_dTheta,vartheta_L,chi_L,theta_L,dtheta_L,Theta_L,neg_dTheta_L")?;
        for i in 0..self.r.len() {
            writeln!(
                w,
                "{:.10e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.r[i],
                self.theta[i],
                self.big_theta[i],
                self.big_theta_slope[i],
                self.vartheta_l[i],
                self.chi_l[i],
                self.theta_l[i],
                self.theta_l_deriv[i],
                self.big_theta_l[i],
                self.big_theta_l_slope[i]
            )?;
        }
        Ok(())
    }
}

/// Pointwise checks on one table. Exact inequalities are counted as
/// violations; implied-constant bounds are reported as fitted constants.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct WeightAudit {
    pub l: f64,
    /// 0 <= theta <= Theta <= min(1, 2/r)
    pub theta_chain_violations: usize,
    /// -Theta' >= 0, and = 0 on [0, 1]
    pub theta_slope_violations: usize,
    /// sup_{r > 1} r^2 (-Theta'(r))
    pub theta_slope_constant: f64,
    /// theta_L non-increasing, Theta_L >= theta_L >= 0, Theta_L non-increasing
    pub monotone_violations: usize,
    /// sup |theta_L'| / min(1/L, r/L)
    pub c_dtheta: f64,
    /// sup |theta_L''| L, by differences of theta_L'
    pub c_d2theta: f64,
    /// sup -Theta_L' / min(L/r^2, 1/L, r/L)
    pub c_dbig_theta: f64,
    /// vartheta_L = 1 on [0, L-1], 0 on [L, inf); chi_L = 1 on [0, L-2], 0 on [L-1, inf)
    pub support_violations: usize,
}

impl WeightAudit {
    pub fn violations(&self) -> usize {
        self.theta_chain_violations + self.theta_slope_violations + self.monotone_violations + self.support_violations
    }
}

pub fn audit_weights(w: &WeightFamily) -> WeightAudit {
    let tol = 1e-12;
    let l = w.l;
    let mut a = WeightAudit { l, ..Default::default() };
    for i in 0..w.r.len() {
        let r = w.r[i];
        let cap = if r > 0.0 { (2.0 / r).min(1.0) } else { 1.0 };
        if !(w.theta[i] >= -tol && w.theta[i] <= w.big_theta[i] + tol && w.big_theta[i] <= cap + tol) {
            a.theta_chain_violations += 1;
        }
        let s = w.big_theta_slope[i];
        if s < -tol || (r <= 1.0 && s.abs() > tol) {
            a.theta_slope_violations += 1;
        }
        if r > 1.0 {
            a.theta_slope_constant = a.theta_slope_constant.max(r * r * s);
        }
        if w.theta_l_deriv[i] > tol
            || w.theta_l[i] < -tol
            || w.big_theta_l[i] < w.theta_l[i] - tol
            || w.big_theta_l_slope[i] < -tol
            || (i > 0 && (w.theta_l[i] > w.theta_l[i - 1] + tol || w.big_theta_l[i] > w.big_theta_l[i - 1] + tol))
        {
            a.monotone_violations += 1;
        }
        if r > 0.0 {
            a.c_dtheta = a.c_dtheta.max(w.theta_l_deriv[i].abs() / (1.0 / l).min(r / l));
            let bound = (l / (r * r)).min(1.0 / l).min(r / l);
            a.c_dbig_theta = a.c_dbig_theta.max(w.big_theta_l_slope[i] / bound);
        }
        if i > 0 {
            let d2 = (w.theta_l_deriv[i] - w.theta_l_deriv[i - 1]) / (r - w.r[i - 1]);
            a.c_d2theta = a.c_d2theta.max(d2.abs() * l);
        }
        let vt = w.vartheta_l[i];
        let ch = w.chi_l[i];
        if (r <= l - 1.0 && vt != 1.0) || (r >= l && vt != 0.0) || (r <= l - 2.0 && ch != 1.0) || (r >= l - 1.0 && ch != 0.0) {
            a.support_violations += 1;
        }
    }
    a
}
