use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_j012, bessel_j1, bessel_j1_zeros};

pub type C64 = Complex64;
pub type Field = Vec<C64>;

/// Surface area of the unit sphere in R^4.
pub const SPHERE3: f64 = 2.0 * PI * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Radial4d,
    Cartesian,
}

/// A discretization of R^4 (radial) or a periodic box in R^1 / R^2.
///
/// Cheap to clone; the spectral tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    kind: GridKind,
    n: usize,
    extent: f64,
    dims: usize,
    axis: Vec<f64>,
    weights: Vec<f64>,
    kaxis: Vec<f64>,
    k2: Vec<f64>,
    spectral_weight: f64,
    plan: SpectralPlan,
}

/// Cached transform tables for one grid.
pub enum SpectralPlan {
    Radial(RadialPlan),
    Cartesian(CartesianPlan),
}

pub struct RadialPlan {
    /// Symmetric orthogonal involution acting on scaled samples.
    t: DMatrix<f64>,
    /// Sample scaling a_j with F_j = a_j f(r_j).
    scale: Vec<f64>,
    /// |J2(j_m)| for the first n zeros.
    j2abs: Vec<f64>,
    r_max: f64,
    deriv: OnceLock<DMatrix<f64>>,
}

pub struct CartesianPlan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd_norm: f64,
    inv_norm: f64,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("kind", &self.kind())
            .field("n", &self.n())
            .field("extent", &self.extent())
            .field("dims", &self.dims())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.kind() == other.kind()
                && self.n() == other.n()
                && self.dims() == other.dims()
                && self.extent() == other.extent())
    }
}

/// Serializable description of a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub n: usize,
    pub extent: f64,
    pub dims: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        make_grid(self.kind, self.n, self.extent, self.dims)
    }
}

type CacheKey = (GridKind, usize, u64, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<GridInner>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<GridInner>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (or fetches from the process-wide cache) a grid.
///
/// `radial4d` takes `n >= 8` Bessel-zero nodes in (0, extent); `cartesian`
/// takes `n` a power of two per axis on a periodic box of side `extent`.
pub fn make_grid(kind: GridKind, n: usize, extent: f64, dims: usize) -> Result<Grid> {
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
    }
    match kind {
        GridKind::Radial4d => {
            if dims != 4 {
                return Err(Error::InvalidGrid(format!("radial4d needs dims=4, got {dims}")));
            }
            if n < 8 {
                return Err(Error::InvalidGrid(format!("radial4d needs n >= 8, got {n}")));
            }
        }
        GridKind::Cartesian => {
            if dims >= 3 {
                return Err(Error::InvalidGrid(format!(
                    "cartesian grids are limited to 1 or 2 dimensions, got {dims}"
                )));
            }
            if dims == 0 {
                return Err(Error::InvalidGrid("dims must be 1 or 2".into()));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("cartesian n must be a power of two >= 8, got {n}")));
            }
        }
    }
    let key = (kind, n, extent.to_bits(), dims);
    if let Some(g) = cache().lock().unwrap().get(&key) {
        return Ok(Grid { inner: g.clone() });
    }
    let inner = Arc::new(match kind {
        GridKind::Radial4d => build_radial(n, extent),
        GridKind::Cartesian => build_cartesian(n, extent, dims),
    });
    cache().lock().unwrap().insert(key, inner.clone());
    Ok(Grid { inner })
}

fn build_radial(n: usize, r_max: f64) -> GridInner {
    let zeros = bessel_j1_zeros(n + 1);
    let s = zeros[n];
    let j2abs: Vec<f64> = zeros[..n].iter().map(|&z| bessel_j012(z).2.abs()).collect();
    let r: Vec<f64> = zeros[..n].iter().map(|z| z * r_max / s).collect();
    let k: Vec<f64> = zeros[..n].iter().map(|z| z / r_max).collect();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for m in 0..n {
        for j in m..n {
            let val = 2.0 * bessel_j1(zeros[m] * zeros[j] / s) / (s * j2abs[m] * j2abs[j]);
            t[(m, j)] = val;
            t[(j, m)] = val;
        }
    }
    // The raw kernel is only approximately an involution; replace it by its
    // polar factor (the matrix sign) with a few Newton-Schulz sweeps.
    let id = DMatrix::<f64>::identity(n, n);
    for _ in 0..6 {
        let t2 = &t * &t;
        let err = (&t2 - &id).amax();
        if err < 1e-15 {
            break;
        }
        t = 0.5 * (&t * (3.0 * &id - t2));
        t = 0.5 * (&t + t.transpose());
    }
    let scale: Vec<f64> = (0..n).map(|j| 2f64.sqrt() * r_max * r[j] / (s * j2abs[j])).collect();
    let weights = scale.iter().map(|a| SPHERE3 * a * a).collect();
    let k2 = k.iter().map(|k| k * k).collect();
    GridInner {
        kind: GridKind::Radial4d,
        n,
        extent: r_max,
        dims: 4,
        axis: r,
        weights,
        kaxis: k,
        k2,
        spectral_weight: SPHERE3,
        plan: SpectralPlan::Radial(RadialPlan { t, scale, j2abs, r_max, deriv: OnceLock::new() }),
    }
}

fn build_cartesian(n: usize, ell: f64, dims: usize) -> GridInner {
    let dx = ell / n as f64;
    let dk = 2.0 * PI / ell;
    let axis: Vec<f64> = (0..n).map(|j| -0.5 * ell + j as f64 * dx).collect();
    let kaxis: Vec<f64> = (0..n)
        .map(|i| if i < n / 2 { i as f64 } else { i as f64 - n as f64 } * dk)
        .collect();
    let total = n.pow(dims as u32);
    let weights = vec![dx.powi(dims as i32); total];
    let k2 = (0..total)
        .map(|idx| {
            let mut s = 0.0;
            for a in 0..dims {
                let k = kaxis[axis_index(idx, a, n, dims)];
                s += k * k;
            }
            s
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let fwd_norm = (dx / (2.0 * PI).sqrt()).powi(dims as i32);
    let inv_norm = (dk / (2.0 * PI).sqrt()).powi(dims as i32);
    GridInner {
        kind: GridKind::Cartesian,
        n,
        extent: ell,
        dims,
        axis,
        weights,
        kaxis,
        k2,
        spectral_weight: dk.powi(dims as i32),
        plan: SpectralPlan::Cartesian(CartesianPlan { fwd, inv, fwd_norm, inv_norm }),
    }
}

/// Index along axis `a` of the flat index `idx` (axis 0 is the slow one).
#[inline]
pub fn axis_index(idx: usize, a: usize, n: usize, dims: usize) -> usize {
    if dims == 1 {
        idx
    } else if a == 0 {
        idx / n
    } else {
        idx % n
    }
}

impl Grid {
    pub fn kind(&self) -> GridKind {
        self.inner.kind
    }
    pub fn n(&self) -> usize {
        self.inner.n
    }
    pub fn extent(&self) -> f64 {
        self.inner.extent
    }
    pub fn dims(&self) -> usize {
        self.inner.dims
    }
    pub fn spec(&self) -> GridSpec {
        GridSpec { kind: self.kind(), n: self.n(), extent: self.extent(), dims: self.dims() }
    }
    pub fn is_radial(&self) -> bool {
        self.kind() == GridKind::Radial4d
    }
    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.inner.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Radial nodes r_j, or the 1D coordinate axis of a cartesian box.
    pub fn axis(&self) -> &[f64] {
        &self.inner.axis
    }
    /// Quadrature weights (volume per sample).
    pub fn weights(&self) -> &[f64] {
        &self.inner.weights
    }
    /// Radial wavenumbers k_m, or the 1D cartesian wavenumbers in FFT order.
    pub fn kaxis(&self) -> &[f64] {
        &self.inner.kaxis
    }
    /// |xi|^2 per spectral index.
    pub fn k2(&self) -> &[f64] {
        &self.inner.k2
    }
    /// Measure attached to each spectral coefficient, so that
    /// sum w |f|^2 = spectral_weight * sum |f_hat|^2.
    pub fn spectral_weight(&self) -> f64 {
        self.inner.spectral_weight
    }
    pub fn plan(&self) -> &SpectralPlan {
        &self.inner.plan
    }
    /// Cartesian spacing, or the mean node spacing of a radial grid.
    pub fn dx(&self) -> f64 {
        self.extent() / self.n() as f64
    }

    /// Coordinate `a` of sample `idx` (radial grids report r for a = 0).
    pub fn coord(&self, idx: usize, a: usize) -> f64 {
        match self.kind() {
            GridKind::Radial4d => {
                if a == 0 {
                    self.inner.axis[idx]
                } else {
                    0.0
                }
            }
            GridKind::Cartesian => {
                if a >= self.dims() {
                    0.0
                } else {
                    self.inner.axis[axis_index(idx, a, self.n(), self.dims())]
                }
            }
        }
    }

    /// |x| at sample `idx`.
    pub fn radius(&self, idx: usize) -> f64 {
        match self.kind() {
            GridKind::Radial4d => self.inner.axis[idx],
            GridKind::Cartesian => {
                let mut s = 0.0;
                for a in 0..self.dims() {
                    let x = self.coord(idx, a);
                    s += x * x;
                }
                s.sqrt()
            }
        }
    }

    /// Wavevector component `a` at spectral index `idx` (radial: |xi| for a = 0).
    pub fn wavevector(&self, idx: usize, a: usize) -> f64 {
        match self.kind() {
            GridKind::Radial4d => {
                if a == 0 {
                    self.inner.kaxis[idx]
                } else {
                    0.0
                }
            }
            GridKind::Cartesian => {
                if a >= self.dims() {
                    0.0
                } else {
                    self.inner.kaxis[axis_index(idx, a, self.n(), self.dims())]
                }
            }
        }
    }

    /// Largest representable |xi| along an axis.
    pub fn k_max(&self) -> f64 {
        match self.kind() {
            GridKind::Radial4d => *self.inner.kaxis.last().unwrap(),
            GridKind::Cartesian => PI * self.n() as f64 / self.extent(),
        }
    }

    pub fn check(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }

    /// Sum of the quadrature weights.
    pub fn volume(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// sum w |f|^2.
    pub fn norm_sq(&self, f: &[C64]) -> f64 {
        f.iter().zip(self.weights()).map(|(z, w)| w * z.norm_sqr()).sum()
    }

    /// sum w conj(f) g.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).zip(self.weights()).map(|((a, b), w)| a.conj() * b * *w).sum()
    }

    /// sum w f.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(self.weights()).map(|(a, w)| a * w).sum()
    }

    /// L^2 norm of a spectral array.
    pub fn spectral_norm_sq(&self, fh: &[C64]) -> f64 {
        self.spectral_weight() * fh.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn sample<F: Fn(&[f64]) -> C64>(&self, f: F) -> Field {
        let mut x = [0.0; 2];
        (0..self.len())
            .map(|i| {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = self.coord(i, a);
                }
                f(&x[..self.dims().min(2)])
            })
            .collect()
    }

    pub fn sample_radial<F: Fn(f64) -> C64>(&self, f: F) -> Field {
        (0..self.len()).map(|i| f(self.radius(i))).collect()
    }

    /// Physical samples to spectral coefficients.
    pub fn forward(&self, f: &[C64]) -> Field {
        assert_eq!(f.len(), self.len(), "field does not live on this grid");
        match self.plan() {
            SpectralPlan::Radial(p) => {
                let scaled: Vec<C64> = f.iter().zip(&p.scale).map(|(z, a)| z * a).collect();
                p.apply(&[scaled]).pop().unwrap()
            }
            SpectralPlan::Cartesian(p) => {
                let mut data = f.to_vec();
                self.fft_nd(&mut data, &p.fwd);
                let n = self.n();
                let dims = self.dims();
                for (idx, z) in data.iter_mut().enumerate() {
                    let mut par = 0;
                    for a in 0..dims {
                        par += axis_index(idx, a, n, dims);
                    }
                    let s = if par % 2 == 0 { p.fwd_norm } else { -p.fwd_norm };
                    *z *= s;
                }
                data
            }
        }
    }

    /// Spectral coefficients back to physical samples.
    pub fn inverse(&self, fh: &[C64]) -> Field {
        assert_eq!(fh.len(), self.len(), "field does not live on this grid");
        match self.plan() {
            SpectralPlan::Radial(p) => {
                let mut out = p.apply(&[fh.to_vec()]).pop().unwrap();
                for (z, a) in out.iter_mut().zip(&p.scale) {
                    *z /= a;
                }
                out
            }
            SpectralPlan::Cartesian(p) => {
                let n = self.n();
                let dims = self.dims();
                let mut data: Vec<C64> = fh
                    .iter()
                    .enumerate()
                    .map(|(idx, z)| {
                        let mut par = 0;
                        for a in 0..dims {
                            par += axis_index(idx, a, n, dims);
                        }
                        if par % 2 == 0 {
                            z * p.inv_norm
                        } else {
                            -z * p.inv_norm
                        }
                    })
                    .collect();
                self.fft_nd(&mut data, &p.inv);
                data
            }
        }
    }

    /// Forward transform of several fields at once (one matrix product on radial grids).
    pub fn forward_many(&self, fs: &[&[C64]]) -> Vec<Field> {
        match self.plan() {
            SpectralPlan::Radial(p) => {
                let scaled: Vec<Field> = fs
                    .iter()
                    .map(|f| f.iter().zip(&p.scale).map(|(z, a)| z * a).collect())
                    .collect();
                p.apply(&scaled)
            }
            SpectralPlan::Cartesian(_) => fs.iter().map(|f| self.forward(f)).collect(),
        }
    }

    pub fn inverse_many(&self, fhs: &[&[C64]]) -> Vec<Field> {
        match self.plan() {
            SpectralPlan::Radial(p) => {
                let owned: Vec<Field> = fhs.iter().map(|f| f.to_vec()).collect();
                let mut out = p.apply(&owned);
                for f in out.iter_mut() {
                    for (z, a) in f.iter_mut().zip(&p.scale) {
                        *z /= a;
                    }
                }
                out
            }
            SpectralPlan::Cartesian(_) => fhs.iter().map(|f| self.inverse(f)).collect(),
        }
    }

    fn fft_nd(&self, data: &mut [C64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n();
        match self.dims() {
            1 => fft.process(data),
            _ => {
                // rows (fast axis) then columns through a transpose
                fft.process(data);
                transpose_square(data, n);
                fft.process(data);
                transpose_square(data, n);
            }
        }
    }

    /// Applies a real multiplier m(|xi|^2-index) in spectral space.
    pub fn multiply_spectral<F: Fn(usize) -> C64>(&self, f: &[C64], m: F) -> Field {
        let mut fh = self.forward(f);
        for (i, z) in fh.iter_mut().enumerate() {
            *z *= m(i);
        }
        self.inverse(&fh)
    }

    /// Spectral partial derivative along axis `a` (cartesian only).
    pub fn derivative(&self, f: &[C64], a: usize) -> Result<Field> {
        if self.is_radial() {
            return Err(Error::Unsupported("use radial_derivative on radial grids".into()));
        }
        Ok(self.multiply_spectral(f, |i| C64::new(0.0, self.odd_symbol(i, a))))
    }

    // i xi_a with the unpaired Nyquist mode dropped, so real fields keep real derivatives
    fn odd_symbol(&self, idx: usize, a: usize) -> f64 {
        if a < self.dims() && axis_index(idx, a, self.n(), self.dims()) == self.n() / 2 {
            0.0
        } else {
            self.wavevector(idx, a)
        }
    }

    /// Gradient components. On radial grids returns the single radial derivative.
    pub fn gradient(&self, f: &[C64]) -> Vec<Field> {
        match self.kind() {
            GridKind::Radial4d => vec![self.radial_derivative_of_spectral(&self.forward(f))],
            GridKind::Cartesian => {
                let fh = self.forward(f);
                (0..self.dims())
                    .map(|a| {
                        let g: Vec<C64> = fh
                            .iter()
                            .enumerate()
                            .map(|(i, z)| z * C64::new(0.0, self.odd_symbol(i, a)))
                            .collect();
                        self.inverse(&g)
                    })
                    .collect()
            }
        }
    }

    /// ||grad f||^2 computed from spectral coefficients.
    pub fn gradient_norm_sq(&self, f: &[C64]) -> f64 {
        let fh = self.forward(f);
        self.spectral_weight() * fh.iter().zip(self.k2()).map(|(z, k2)| k2 * z.norm_sqr()).sum::<f64>()
    }

    /// Delta f.
    pub fn laplacian(&self, f: &[C64]) -> Field {
        let k2 = self.k2();
        self.multiply_spectral(f, |i| C64::new(-k2[i], 0.0))
    }

    /// Radial derivative at the nodes from spectral coefficients.
    pub fn radial_derivative_of_spectral(&self, g: &[C64]) -> Field {
        let p = match self.plan() {
            SpectralPlan::Radial(p) => p,
            _ => panic!("radial derivative requested on a cartesian grid"),
        };
        let d = p.deriv.get_or_init(|| {
            let n = self.n();
            let r = self.axis();
            let k = self.kaxis();
            DMatrix::from_fn(n, n, |j, m| {
                -(2f64.sqrt()) * k[m] * bessel_j(2, k[m] * r[j]) / (p.r_max * p.j2abs[m] * r[j])
            })
        });
        matvec_complex(d, g)
    }

    /// Samples of the unitary Fourier transform at each spectral node.
    ///
    /// Cartesian coefficients already are such samples; radial coefficients
    /// are rescaled from the Dirichlet basis to f_hat(k_m).
    pub fn spectral_to_fourier(&self, fh: &[C64]) -> Field {
        match self.plan() {
            SpectralPlan::Cartesian(_) => fh.to_vec(),
            SpectralPlan::Radial(p) => fh
                .iter()
                .zip(self.kaxis())
                .zip(&p.j2abs)
                .map(|((g, k), j2)| g * (p.r_max * j2 / (2f64.sqrt() * k)))
                .collect(),
        }
    }

    /// Evaluates a radial field given by spectral coefficients `g` at radius `rho`.
    /// Zero outside the ball.
    pub fn radial_eval(&self, g: &[C64], rho: f64) -> C64 {
        let p = match self.plan() {
            SpectralPlan::Radial(p) => p,
            _ => panic!("radial evaluation requested on a cartesian grid"),
        };
        if rho >= p.r_max {
            return C64::new(0.0, 0.0);
        }
        let k = self.kaxis();
        let mut s = C64::new(0.0, 0.0);
        for m in 0..self.n() {
            let z = k[m] * rho;
            // J1(z)/rho, with the small-argument limit k/2
            let b = if z < 1e-8 { 0.5 * k[m] } else { bessel_j1(z) / rho };
            s += g[m] * (2f64.sqrt() * b / (p.r_max * p.j2abs[m]));
        }
        s
    }

    /// Evaluates the trigonometric interpolant of a cartesian field on a
    /// tensor set of points `pts[a]` per axis. Returns row-major values.
    pub fn cartesian_eval(&self, fh: &[C64], pts: &[Vec<f64>]) -> Field {
        let n = self.n();
        let dims = self.dims();
        let p = match self.plan() {
            SpectralPlan::Cartesian(p) => p,
            _ => panic!("cartesian evaluation requested on a radial grid"),
        };
        let kax = self.kaxis();
        let basis = |x: f64| -> Vec<C64> {
            (0..n)
                .map(|i| {
                    if i == n / 2 {
                        C64::new((kax[i] * x).cos(), 0.0)
                    } else {
                        C64::from_polar(1.0, kax[i] * x)
                    }
                })
                .collect()
        };
        match dims {
            1 => pts[0]
                .iter()
                .map(|&x| {
                    let b = basis(x);
                    b.iter().zip(fh).map(|(b, c)| b * c).sum::<C64>() * p.inv_norm
                })
                .collect(),
            _ => {
                let b0: Vec<Vec<C64>> = pts[0].iter().map(|&x| basis(x)).collect();
                let b1: Vec<Vec<C64>> = pts[1].iter().map(|&x| basis(x)).collect();
                // contract the fast axis first
                let mut tmp = vec![C64::new(0.0, 0.0); n * pts[1].len()];
                for i0 in 0..n {
                    let row = &fh[i0 * n..(i0 + 1) * n];
                    for (q, bq) in b1.iter().enumerate() {
                        tmp[i0 * pts[1].len() + q] = row.iter().zip(bq).map(|(c, b)| c * b).sum();
                    }
                }
                let m1 = pts[1].len();
                let mut out = vec![C64::new(0.0, 0.0); pts[0].len() * m1];
                for (p0, bp) in b0.iter().enumerate() {
                    for q in 0..m1 {
                        let mut s = C64::new(0.0, 0.0);
                        for i0 in 0..n {
                            s += bp[i0] * tmp[i0 * m1 + q];
                        }
                        out[p0 * m1 + q] = s * p.inv_norm;
                    }
                }
                out
            }
        }
    }
}

impl RadialPlan {
    fn apply(&self, fs: &[Field]) -> Vec<Field> {
        let n = self.t.nrows();
        let cols = 2 * fs.len();
        let x = DMatrix::from_fn(n, cols, |j, c| {
            let z = fs[c / 2][j];
            if c % 2 == 0 {
                z.re
            } else {
                z.im
            }
        });
        let y = &self.t * x;
        (0..fs.len())
            .map(|f| (0..n).map(|j| C64::new(y[(j, 2 * f)], y[(j, 2 * f + 1)])).collect())
            .collect()
    }

    /// The orthogonal transform matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }
}

fn matvec_complex(m: &DMatrix<f64>, g: &[C64]) -> Field {
    let n = m.ncols();
    let x = DMatrix::from_fn(n, 2, |j, c| if c == 0 { g[j].re } else { g[j].im });
    let y = m * x;
    (0..m.nrows()).map(|j| C64::new(y[(j, 0)], y[(j, 1)])).collect()
}

fn transpose_square(data: &mut [C64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
