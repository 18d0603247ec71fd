use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Center estimates at one recorded time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub n_est: f64,
    pub x_est: [f64; 2],
    pub xi_est: [f64; 2],
}

/// Time-indexed diagnostics of one run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DiagnosticSeries {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// int_0^t int (|u|^3 + |v|^3)
    pub s_accumulator: Vec<f64>,
    /// int (|u|^3 + |v|^3) at the recorded time
    pub s_rate: Vec<f64>,
    /// ||grad (u, v)||
    pub gradient_norm: Vec<f64>,
    /// ||grad u||
    pub gradient_u: Vec<f64>,
    pub virial: Vec<f64>,
    pub edge_fraction: Vec<f64>,
    pub dt: Vec<f64>,
    /// Filled by center tracking; empty otherwise.
    pub centers: Vec<CenterRecord>,
}

impl DiagnosticSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Accumulated S at time t by linear interpolation between records.
    pub fn s_at(&self, t: f64) -> Result<f64> {
        interp(&self.times, &self.s_accumulator, t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let with_centers = self.centers.len() == self.len() && !self.centers.is_empty();
        write!(w, "t,mass,energy,s_accumulator,s_rate,gradient_norm,gradient_u,virial,edge_fraction,dt")?;
        if with_centers {
            write!(w, ",n_est,x_est_0,x_est_1,xi_est_0,xi_est_1")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(
                w,
                "{:.12e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.6e},{:.6e}",
                self.times[i],
                self.mass[i],
                self.energy[i],
                self.s_accumulator[i],
                self.s_rate[i],
                self.gradient_norm[i],
                self.gradient_u[i],
                self.virial.get(i).copied().unwrap_or(f64::NAN),
                self.edge_fraction[i],
                self.dt[i]
            )?;
            if with_centers {
                let c = &self.centers[i];
                write!(w, ",{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}", c.n_est, c.x_est[0], c.x_est[1], c.xi_est[0], c.xi_est[1])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Piecewise-linear interpolation on increasing abscissae.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.is_empty() || x < xs[0] - 1e-12 || x > xs[xs.len() - 1] + 1e-12 {
        return Err(Error::InvalidArgument(format!("time {x} outside the recorded span")));
    }
    let i = xs.partition_point(|&t| t < x);
    if i == 0 {
        return Ok(ys[0]);
    }
    if i >= xs.len() {
        return Ok(ys[xs.len() - 1]);
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let s = if x1 > x0 { (x - x0) / (x1 - x0) } else { 1.0 };
    Ok(ys[i - 1] + s * (ys[i] - ys[i - 1]))
}
