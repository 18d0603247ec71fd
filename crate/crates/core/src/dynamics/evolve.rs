use serde::{Deserialize, Serialize};

use super::propagate::{density_drift, free_phase, nonlinear_substep};
use crate::diagnostics::functionals::{cubic_density_integral, edge_mass_fraction, energy, virial_momentum};
use crate::diagnostics::DiagnosticSeries;
use crate::error::{Error, Result};
use crate::fields::{Field, StatePair, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adapt {
    Fixed,
    /// Halve dt whenever the pointwise drift of |u|^2 + |v|^2 over a
    /// nonlinear substep exceeds `drift_tol`.
    MassDriftAdaptive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_end: f64,
    pub adapt: Adapt,
    /// steps between diagnostic records
    pub record_every: usize,
    /// blow-up flag when ||grad u|| exceeds this multiple of its initial value
    pub blowup_gradient_factor: f64,
    /// S increment per unit time below which the tail counts as stagnant
    pub scatter_tail_epsilon: f64,
    /// fraction of the horizon (at the end) used by the scattering test
    pub tail_fraction: f64,
    pub drift_tol: f64,
    pub min_dt: f64,
    /// keep every k-th record as a snapshot; 0 keeps only the first and last
    pub snapshot_every: usize,
    /// radial runs stop as inconclusive when more than this mass fraction
    /// sits beyond `edge_radius` * R
    pub edge_guard: Option<f64>,
    pub edge_radius: f64,
    pub record_virial: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            adapt: Adapt::Fixed,
            record_every: 10,
            blowup_gradient_factor: 10.0,
            scatter_tail_epsilon: 1e-4,
            tail_fraction: 0.2,
            drift_tol: 1e-10,
            min_dt: 1e-9,
            snapshot_every: 0,
            edge_guard: Some(1e-6),
            edge_radius: 0.8,
            record_virial: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Scattered,
    Blewup,
    Inconclusive,
}

/// Everything the verdict was based on. The thresholds are engineering
/// choices, not derived quantities.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerdictFlags {
    pub max_gradient_ratio: f64,
    pub blowup_time: Option<f64>,
    pub non_finite: bool,
    pub edge_guard_time: Option<f64>,
    /// (S(T) - S(T_tail)) / (T - T_tail)
    pub tail_s_rate: f64,
    pub tail_rate_below_epsilon: bool,
    /// least-squares slope of log s_rate against log t over the tail
    pub tail_decay_exponent: Option<f64>,
    pub tail_gradient_bounded: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<StatePair>,
    pub diagnostics: DiagnosticSeries,
    pub verdict: Verdict,
    pub flags: VerdictFlags,
    pub steps: usize,
    pub rejected_steps: usize,
}

/// Scalar summary of a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub verdict: Verdict,
    pub flags: VerdictFlags,
    pub t_start: f64,
    pub t_final: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub max_gradient_ratio: f64,
    pub scattering_size: f64,
}

impl Trajectory {
    pub fn last(&self) -> &StatePair {
        self.snapshots.last().expect("trajectory has snapshots")
    }

    /// max |M(t) - M(0)| / M(0)
    pub fn mass_drift(&self) -> f64 {
        let m = &self.diagnostics.mass;
        let m0 = m[0];
        if m0 == 0.0 {
            return 0.0;
        }
        m.iter().map(|x| (x - m0).abs()).fold(0.0, f64::max) / m0
    }

    /// max |E(t) - E(0)| / (1 + |E(0)|)
    pub fn energy_drift(&self) -> f64 {
        let e = &self.diagnostics.energy;
        let e0 = e[0];
        e.iter().map(|x| (x - e0).abs()).fold(0.0, f64::max) / (1.0 + e0.abs())
    }

    pub fn summary(&self) -> TrajectorySummary {
        let d = &self.diagnostics;
        TrajectorySummary {
            verdict: self.verdict,
            flags: self.flags.clone(),
            t_start: d.times[0],
            t_final: *d.times.last().unwrap(),
            steps: self.steps,
            rejected_steps: self.rejected_steps,
            mass_drift: self.mass_drift(),
            energy_drift: self.energy_drift(),
            max_gradient_ratio: self.flags.max_gradient_ratio,
            scattering_size: *d.s_accumulator.last().unwrap(),
        }
    }
}

fn spectral_gradient(grid: &crate::fields::Grid, fh: &[C64]) -> f64 {
    (grid.spectral_weight() * fh.iter().zip(grid.k2()).map(|(z, k)| k * z.norm_sqr()).sum::<f64>()).sqrt()
}

struct Recorder<'a> {
    opts: &'a EvolveOptions,
    series: DiagnosticSeries,
    snapshots: Vec<StatePair>,
    pending: Option<StatePair>,
    records: usize,
}

impl Recorder<'_> {
    fn record(&mut self, pair: StatePair, s_acc: f64, dt: f64, force_snapshot: bool) {
        let g = &pair.grid;
        let (gu, gv) = (g.gradient_norm_sq(&pair.u), g.gradient_norm_sq(&pair.v));
        let s = &mut self.series;
        s.times.push(pair.t);
        s.mass.push(pair.mass());
        s.energy.push(energy(&pair));
        s.s_accumulator.push(s_acc);
        s.s_rate.push(cubic_density_integral(&pair));
        s.gradient_norm.push((gu + gv).sqrt());
        s.gradient_u.push(gu.sqrt());
        s.virial.push(if self.opts.record_virial { virial_momentum(&pair) } else { f64::NAN });
        s.edge_fraction.push(edge_mass_fraction(&pair, self.opts.edge_radius));
        s.dt.push(dt);
        let keep = force_snapshot
            || self.records == 0
            || (self.opts.snapshot_every > 0 && self.records % self.opts.snapshot_every == 0);
        if keep {
            self.snapshots.push(pair);
            self.pending = None;
        } else {
            self.pending = Some(pair);
        }
        self.records += 1;
    }
}

/// Integrates the system with Strang splitting from `pair.t` to `opts.t_end`.
pub fn evolve(pair: &StatePair, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(opts.dt > 0.0) || !(opts.blowup_gradient_factor > 0.0) || !(opts.scatter_tail_epsilon > 0.0) {
        return Err(Error::InvalidArgument("dt and thresholds must be positive".into()));
    }
    if opts.record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be at least 1".into()));
    }
    if opts.t_end <= pair.t {
        return Err(Error::InvalidArgument("t_end must exceed the initial time".into()));
    }
    let g = pair.grid.clone();
    let kappa = pair.kappa;
    let mut spec = g.forward_many(&[&pair.u, &pair.v]);
    let (mut uh, mut vh): (Field, Field) = (spec.remove(0), spec.remove(0));
    let mut rec = Recorder { opts, series: DiagnosticSeries::default(), snapshots: Vec::new(), pending: None, records: 0 };
    let mut flags = VerdictFlags::default();
    let mut t = pair.t;
    let mut dt = opts.dt;
    let mut s_acc = 0.0;
    let mut steps = 0;
    let mut rejected = 0;
    rec.record(pair.clone(), 0.0, dt, true);
    let grad0 = spectral_gradient(&g, &uh);
    flags.max_gradient_ratio = 1.0;
    let span = opts.t_end - pair.t;
    let mut blewup = false;
    let mut stopped_early = false;
    while opts.t_end - t > 1e-12 * span {
        let mut h = dt.min(opts.t_end - t);
        let (u1, v1) = loop {
            let mut a = uh.clone();
            let mut b = vh.clone();
            free_phase(&g, &mut a, &mut b, kappa, 0.5 * h);
            let mut phys = g.inverse_many(&[&a, &b]);
            let (u0, v0) = (phys.remove(0), phys.remove(0));
            let (u1, v1) = nonlinear_substep(&u0, &v0, h);
            if opts.adapt == Adapt::MassDriftAdaptive
                && h > opts.min_dt
                && density_drift(&u0, &v0, &u1, &v1) > opts.drift_tol
            {
                dt *= 0.5;
                h = dt.min(opts.t_end - t);
                rejected += 1;
                continue;
            }
            break (u1, v1);
        };
        let mid = StatePair { grid: g.clone(), u: u1, v: v1, t: t + 0.5 * h, kappa };
        s_acc += h * cubic_density_integral(&mid);
        let mut spec = g.forward_many(&[&mid.u, &mid.v]);
        let (mut a, mut b) = (spec.remove(0), spec.remove(0));
        free_phase(&g, &mut a, &mut b, kappa, 0.5 * h);
        t += h;
        steps += 1;
        let finite = a.iter().chain(&b).all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            flags.non_finite = true;
            flags.blowup_time = Some(t);
            flags.notes.push(format!("non-finite values at t={t:.6}; kept last finite state"));
            blewup = true;
            break;
        }
        uh = a;
        vh = b;
        let ratio = if grad0 > 0.0 { spectral_gradient(&g, &uh) / grad0 } else { 1.0 };
        flags.max_gradient_ratio = flags.max_gradient_ratio.max(ratio);
        let at_end = opts.t_end - t <= 1e-12 * span;
        if ratio > opts.blowup_gradient_factor {
            blewup = true;
            flags.blowup_time = Some(t);
        }
        if blewup || at_end || steps % opts.record_every == 0 {
            let mut phys = g.inverse_many(&[&uh, &vh]);
            let state = StatePair { grid: g.clone(), u: phys.remove(0), v: phys.remove(0), t, kappa };
            rec.record(state, s_acc, dt, blewup || at_end);
            if g.is_radial() {
                if let Some(limit) = opts.edge_guard {
                    let frac = *rec.series.edge_fraction.last().unwrap();
                    if frac > limit && !blewup {
                        flags.edge_guard_time = Some(t);
                        flags.notes.push(format!(
                            "edge guard: mass fraction {frac:.2e} beyond {}R at t={t:.4}",
                            opts.edge_radius
                        ));
                        stopped_early = true;
                        break;
                    }
                }
            }
        }
        if blewup {
            break;
        }
    }
    if let Some(p) = rec.pending.take() {
        rec.snapshots.push(p);
    }
    let mut verdict = Verdict::Inconclusive;
    if blewup {
        verdict = Verdict::Blewup;
        flags.notes.push(format!(
            "blow-up flag: gradient ratio exceeded {} (heuristic proxy for divergence of the L3 norm)",
            opts.blowup_gradient_factor
        ));
    } else if !stopped_early {
        scattering_test(&rec.series, opts, &mut flags);
        if flags.tail_gradient_bounded
            && (flags.tail_rate_below_epsilon || flags.tail_decay_exponent.is_some_and(|p| p < -1.0))
        {
            verdict = Verdict::Scattered;
        }
    }
    Ok(Trajectory { snapshots: rec.snapshots, diagnostics: rec.series, verdict, flags, steps, rejected_steps: rejected })
}

fn scattering_test(d: &DiagnosticSeries, opts: &EvolveOptions, flags: &mut VerdictFlags) {
    let t0 = d.times[0];
    let t1 = *d.times.last().unwrap();
    let ta = t1 - opts.tail_fraction * (t1 - t0);
    let s1 = *d.s_accumulator.last().unwrap();
    let sa = d.s_at(ta).unwrap_or(s1);
    flags.tail_s_rate = (s1 - sa) / (t1 - ta).max(f64::MIN_POSITIVE);
    flags.tail_rate_below_epsilon = flags.tail_s_rate < opts.scatter_tail_epsilon;
    let idx: Vec<usize> = (0..d.len()).filter(|&i| d.times[i] >= ta && d.times[i] > 0.0 && d.s_rate[i] > 0.0).collect();
    if idx.len() >= 3 {
        let xs: Vec<f64> = idx.iter().map(|&i| d.times[i].ln()).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| d.s_rate[i].ln()).collect();
        flags.tail_decay_exponent = Some(slope(&xs, &ys));
    }
    let ga = idx.first().map(|&i| d.gradient_norm[i]).unwrap_or(d.gradient_norm[0]);
    let g1 = *d.gradient_norm.last().unwrap();
    flags.tail_gradient_bounded =
        flags.max_gradient_ratio < opts.blowup_gradient_factor && (g1 <= 1.05 * ga || g1 == 0.0);
    flags.notes.push(format!(
        "scattering test over the final {:.0}% of the horizon: S rate {:.3e}, decay exponent {}, gradient bounded {}",
        100.0 * opts.tail_fraction,
        flags.tail_s_rate,
        flags.tail_decay_exponent.map_or("n/a".to_string(), |p| format!("{p:.3}")),
        flags.tail_gradient_bounded
    ));
}

/// Least-squares slope of y against x.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
