//! Flat binary container and CSV export for field pairs.

use std::io::{Read, Write};

use super::grid::{make_grid, GridKind, C64};
use super::state::StatePair;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MRNLSF01";

/// Writes `pair` as: magic, kind, n, extent, dims, t, kappa, sample count,
/// then little-endian (re, im) doubles for u followed by v.
pub fn write_pair<W: Write>(mut w: W, pair: &StatePair) -> Result<()> {
    let g = &pair.grid;
    w.write_all(MAGIC)?;
    let kind: u64 = match g.kind() {
        GridKind::Radial4d => 0,
        GridKind::Cartesian => 1,
    };
    w.write_all(&kind.to_le_bytes())?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&g.extent().to_le_bytes())?;
    w.write_all(&(g.dims() as u64).to_le_bytes())?;
    w.write_all(&pair.t.to_le_bytes())?;
    w.write_all(&pair.kappa.to_le_bytes())?;
    w.write_all(&(g.len() as u64).to_le_bytes())?;
    for z in pair.u.iter().chain(&pair.v) {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_pair<R: Read>(mut r: R) -> Result<StatePair> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidArgument("not a field container".into()));
    }
    let kind = match read_u64(&mut r)? {
        0 => GridKind::Radial4d,
        1 => GridKind::Cartesian,
        k => return Err(Error::InvalidArgument(format!("unknown grid kind tag {k}"))),
    };
    let n = read_u64(&mut r)? as usize;
    let extent = read_f64(&mut r)?;
    let dims = read_u64(&mut r)? as usize;
    let t = read_f64(&mut r)?;
    let kappa = read_f64(&mut r)?;
    let len = read_u64(&mut r)? as usize;
    let grid = make_grid(kind, n, extent, dims)?;
    if len != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), got: len });
    }
    let read_field = |r: &mut R| -> Result<Vec<C64>> {
        (0..len).map(|_| Ok(C64::new(read_f64(r)?, read_f64(r)?))).collect()
    };
    let u = read_field(&mut r)?;
    let v = read_field(&mut r)?;
    StatePair::new(grid, u, v, t, kappa)
}

/// CSV with one row per sample: coordinates, Re u, Im u, Re v, Im v.
pub fn write_csv<W: Write>(mut w: W, pair: &StatePair) -> Result<()> {
    let g = &pair.grid;
    let coords: &[&str] = match (g.kind(), g.dims()) {
        (GridKind::Radial4d, _) => &["r"],
        (_, 1) => &["x"],
        _ => &["x", "y"],
    };
    writeln!(w, "{},re_u,im_u,re_v,im_v", coords.join(","))?;
    for i in 0..g.len() {
        for a in 0..coords.len() {
            write!(w, "{:.17e},", g.coord(i, a))?;
        }
        let (u, v) = (pair.u[i], pair.v[i]);
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", u.re, u.im, v.re, v.im)?;
    }
    Ok(())
}
