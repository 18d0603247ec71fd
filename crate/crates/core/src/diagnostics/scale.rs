//! Ladder-valued frequency scales on characteristic intervals, peak
//! leveling, and the C^1 smoothing used by the Morawetz weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant scale N = c0^{e_k} on the k-th characteristic interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyScale {
    pub c0: f64,
    pub exponents: Vec<i32>,
    /// interval boundaries t_0 < ... < t_K (K = exponents.len()); empty means t_k = k
    pub bounds: Vec<f64>,
}

impl FrequencyScale {
    pub fn new(c0: f64, exponents: Vec<i32>, bounds: Vec<f64>) -> Result<Self> {
        if !(c0 > 1.0) {
            return Err(Error::InvalidArgument(format!("C0 must exceed 1, got {c0}")));
        }
        if !bounds.is_empty() {
            if bounds.len() != exponents.len() + 1 {
                return Err(Error::ShapeMismatch { expected: exponents.len() + 1, got: bounds.len() });
            }
            if bounds.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument("interval boundaries must increase".into()));
            }
        }
        Ok(Self { c0, exponents, bounds })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn value(&self, k: usize) -> f64 {
        self.c0.powi(self.exponents[k])
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }

    pub fn boundary(&self, k: usize) -> f64 {
        if self.bounds.is_empty() {
            k as f64
        } else {
            self.bounds[k]
        }
    }

    /// Consecutive ratios all in {1/c0, 1, c0}.
    pub fn is_ladder(&self) -> bool {
        self.exponents.windows(2).all(|w| (w[1] - w[0]).abs() <= 1)
    }

    /// Maximal constant runs [start, start + len) whose neighbours on both
    /// sides sit exactly one rung lower.
    pub fn peaks(&self) -> Vec<(usize, usize)> {
        let e = &self.exponents;
        let mut out = Vec::new();
        let mut i = 0;
        while i < e.len() {
            let mut j = i;
            while j + 1 < e.len() && e[j + 1] == e[i] {
                j += 1;
            }
            if i > 0 && j + 1 < e.len() && e[i - 1] == e[i] - 1 && e[j + 1] == e[i] - 1 {
                out.push((i, j + 1 - i));
            }
            i = j + 1;
        }
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,t_k,exponent,value")?;
        for k in 0..self.len() {
            writeln!(w, "{k},{:.12e},{},{:.12e}", self.boundary(k), self.exponents[k], self.value(k))?;
        }
        Ok(())
    }
}

/// Rounds raw samples N(t_k) down onto the ladder c0^Z: c0^{-1} N < q <= N.
pub fn quantize_frequency_scale(samples: &[f64], c0: f64, bounds: Vec<f64>) -> Result<FrequencyScale> {
    if !(c0 > 1.0) {
        return Err(Error::InvalidArgument(format!("C0 must exceed 1, got {c0}")));
    }
    let lc = c0.ln();
    let mut exps = Vec::with_capacity(samples.len());
    for &n in samples {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("frequency samples must be positive, got {n}")));
        }
        let mut e = ((n.ln() / lc) + 1e-12).floor() as i32;
        // guard the floor against rounding in either direction
        while c0.powi(e) > n * (1.0 + 1e-14) {
            e -= 1;
        }
        while c0.powi(e + 1) <= n {
            e += 1;
        }
        exps.push(e);
    }
    FrequencyScale::new(c0, exps, bounds)
}

/// The sequence N_0 = N, N_1, ..., N_m: each round lowers every peak by one rung.
pub fn peak_level_all(scale: &FrequencyScale, m: usize) -> Result<Vec<FrequencyScale>> {
    if !scale.is_ladder() {
        return Err(Error::InvalidArgument("frequency scale is not on the C0 ladder".into()));
    }
    let mut out = vec![scale.clone()];
    for _ in 0..m {
        let mut next = out.last().unwrap().clone();
        for (s, l) in next.peaks() {
            for e in &mut next.exponents[s..s + l] {
                *e -= 1;
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// N_m after m leveling rounds.
pub fn peak_level(scale: &FrequencyScale, m: usize) -> Result<FrequencyScale> {
    Ok(peak_level_all(scale, m)?.pop().unwrap())
}

/// C^1 scale through the points (t_k, N_m(t_k) / c0), monotone on each interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothScale {
    pub bounds: Vec<f64>,
    /// values at the boundaries, one more than intervals
    pub nodes: Vec<f64>,
}

fn smoothstep(s: f64) -> (f64, f64) {
    (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
}

impl SmoothScale {
    fn locate(&self, t: f64) -> usize {
        let k = self.bounds.partition_point(|&b| b <= t);
        k.saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.locate(t);
        let (a, b) = (self.bounds[k], self.bounds[k + 1]);
        let s = ((t - a) / (b - a)).clamp(0.0, 1.0);
        self.nodes[k] + (self.nodes[k + 1] - self.nodes[k]) * smoothstep(s).0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let k = self.locate(t);
        let (a, b) = (self.bounds[k], self.bounds[k + 1]);
        let s = ((t - a) / (b - a)).clamp(0.0, 1.0);
        (self.nodes[k + 1] - self.nodes[k]) * smoothstep(s).1 / (b - a)
    }
}

/// Smooths N_m: Ntilde(t_k) = N_m(t_k)/c0, joined by cubic smoothsteps so the
/// derivative vanishes at every t_k. The value past the last interval repeats
/// the last rung.
pub fn smooth_frequency_scale(nm: &FrequencyScale) -> Result<SmoothScale> {
    if nm.is_empty() {
        return Err(Error::InvalidArgument("empty frequency scale".into()));
    }
    let bounds: Vec<f64> = (0..=nm.len()).map(|k| nm.boundary(k)).collect();
    let mut nodes: Vec<f64> = (0..nm.len()).map(|k| nm.value(k) / nm.c0).collect();
    nodes.push(*nodes.last().unwrap());
    Ok(SmoothScale { bounds, nodes })
}

/// Outcome of checking the leveling properties on one ladder.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PeakAudit {
    pub m: usize,
    pub ladder_ok: bool,
    /// c0^{-m} N <= N_m <= N pointwise
    pub bracket_ok: bool,
    pub min_peak_length: Option<usize>,
    pub peak_length_ok: bool,
    /// sup N / Ntilde_m on the interval nodes and midpoints
    pub sup_ratio: f64,
    pub sup_ratio_ok: bool,
    /// |Ntilde'| <= 2 c0 Ntilde / |J_k| on sample points
    pub derivative_ok: bool,
    pub tv_lhs: f64,
    pub tv_rhs: f64,
    pub tv_ok: bool,
    pub violations: usize,
}

/// Checks every leveling property of N_m and its smoothing.
pub fn audit_peak_level(n: &FrequencyScale, m: usize) -> Result<PeakAudit> {
    let nm = peak_level(n, m)?;
    let sm = smooth_frequency_scale(&nm)?;
    let c0 = n.c0;
    let mut a = PeakAudit { m, ..Default::default() };
    a.ladder_ok = nm.is_ladder();
    a.bracket_ok = (0..n.len()).all(|k| nm.exponents[k] <= n.exponents[k] && nm.exponents[k] >= n.exponents[k] - m as i32);
    let peaks = nm.peaks();
    a.min_peak_length = peaks.iter().map(|p| p.1).min();
    a.peak_length_ok = peaks.iter().all(|p| p.1 >= 2 * m + 1);
    let mut sup: f64 = 0.0;
    let mut deriv_ok = true;
    for k in 0..n.len() {
        let (t0, t1) = (n.boundary(k), n.boundary(k + 1));
        for j in 0..=8 {
            let t = t0 + (t1 - t0) * j as f64 / 8.0 * (1.0 - 1e-12);
            let nt = sm.eval(t);
            sup = sup.max(n.value(k) / nt);
            if sm.deriv(t).abs() > 2.0 * c0 * nt / (t1 - t0) * (1.0 + 1e-12) {
                deriv_ok = false;
            }
        }
    }
    a.sup_ratio = sup;
    a.sup_ratio_ok = sup <= c0.powi(m as i32 + 2) * (1.0 + 1e-12);
    a.derivative_ok = deriv_ok;
    let nv = n.values();
    let mv = nm.values();
    for k in 0..n.len().saturating_sub(1) {
        a.tv_lhs += nv[k] * nv[k] / (mv[k] * mv[k]) * (mv[k] - mv[k + 1]).abs();
    }
    a.tv_rhs = 2.0 + 2.0 / (2 * m + 1) as f64 * mv.iter().sum::<f64>();
    a.tv_ok = a.tv_lhs <= a.tv_rhs * (1.0 + 1e-12);
    a.violations = [a.ladder_ok, a.bracket_ok, a.peak_length_ok, a.sup_ratio_ok, a.derivative_ok, a.tv_ok]
        .iter()
        .filter(|ok| !**ok)
        .count();
    Ok(a)
}

/// Random ladder of `len` intervals with N(0) = sup N = 1: a lazy random walk
/// on the exponents, reflected below 0.
pub fn random_ladder<R: Rng>(rng: &mut R, len: usize, c0: f64) -> FrequencyScale {
    let mut e = vec![0i32; len];
    for k in 1..len {
        let step: i32 = rng.random_range(-1..=1);
        e[k] = (e[k - 1] + step).min(0);
    }
    FrequencyScale { c0, exponents: e, bounds: Vec::new() }
}

/// Smallest C_* >= 1 with |xi(t_k) - xi(t_{k+1})| <= 2^{-10} C_* min(N(t_k), int_{J_k} N^3).
pub fn c_star(xi: &[[f64; 2]], n: &[f64], n3_integrals: &[f64]) -> f64 {
    let mut c: f64 = 1.0;
    for k in 0..xi.len().saturating_sub(1).min(n.len()).min(n3_integrals.len()) {
        let d = ((xi[k][0] - xi[k + 1][0]).powi(2) + (xi[k][1] - xi[k + 1][1]).powi(2)).sqrt();
        let den = n[k].min(n3_integrals[k]);
        if den > 0.0 {
            c = c.max(1024.0 * d / den);
        }
    }
    c
}
