//! Scattering size over time windows and the unit-S partition of a run.

use super::series::{interp, DiagnosticSeries};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// S_I = int_I int (|u|^3 + |v|^3) dx dt over the window [a, b].
///
/// Read off the accumulator the integrator keeps (one midpoint sample per
/// step), interpolated linearly between records, so windows add exactly.
pub fn scattering_size(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    scattering_size_series(&traj.diagnostics, window)
}

/// [`scattering_size`] on a bare series.
pub fn scattering_size_series(d: &DiagnosticSeries, (a, b): (f64, f64)) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::InvalidArgument("empty diagnostic series".into()));
    }
    let (t0, t1) = (d.times[0], d.times[d.len() - 1]);
    if !(a <= b) || a < t0 - 1e-12 || b > t1 + 1e-12 {
        return Err(Error::InvalidArgument(format!("window [{a}, {b}] outside the run span [{t0}, {t1}]")));
    }
    Ok(interp(&d.times, &d.s_accumulator, b)? - interp(&d.times, &d.s_accumulator, a)?)
}

/// Boundaries t_0 < t_1 < ... where the accumulated S crosses successive
/// integers, located on the piecewise-linear interpolant of the accumulator.
/// t_0 is the first recorded time. A run with total S below 1 gives `[t_0]`.
pub fn characteristic_partition(d: &DiagnosticSeries) -> Result<Vec<f64>> {
    if d.is_empty() {
        return Err(Error::InvalidArgument("empty diagnostic series".into()));
    }
    for w in d.s_accumulator.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Numeric("S accumulator decreases".into()));
        }
    }
    let s0 = d.s_accumulator[0];
    let mut out = vec![d.times[0]];
    let mut next = 1.0;
    for i in 1..d.len() {
        let (sa, sb) = (d.s_accumulator[i - 1] - s0, d.s_accumulator[i] - s0);
        while sb >= next && sb > sa {
            let f = (next - sa) / (sb - sa);
            out.push(d.times[i - 1] + f * (d.times[i] - d.times[i - 1]));
            next += 1.0;
        }
    }
    Ok(out)
}

/// Lengths of the characteristic intervals.
pub fn interval_lengths(bounds: &[f64]) -> Vec<f64> {
    bounds.windows(2).map(|w| w[1] - w[0]).collect()
}
