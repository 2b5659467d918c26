//! Periodic grid, discrete Fourier transforms, and spectral calculus on the
//! unit torus Ω = [0,1)².
//!
//! A scalar field is held either at the n×n collocation points ("physical")
//! or as complex mode coefficients ("spectral") with the convention
//!
//! ```text
//! v(x) = Σ_k c_k exp(2πi k·x),   k = (k₁,k₂) integer wavevector,
//! ```
//!
//! so `c_(0,0)` is the spatial mean of `v`. Real fields have Hermitian
//! spectra, c_{-k} = conj(c_k); the transform routines re-symmetrize after
//! every forward pass so roundoff never drifts a real field into a complex
//! one. Nonlinear products are formed pointwise in physical space and then
//! dealiased by the two-thirds rule: modes with |k₁| < n/3 and |k₂| < n/3
//! are retained, everything else is zeroed.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Whether a field currently stores collocation values or mode coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

struct GridInner {
    n: usize,
    /// FFT-ordered signed integer frequencies: index i maps to i for
    /// i <= n/2 and i - n otherwise.
    freq: Vec<i64>,
    freq_f: Vec<f64>,
    /// Index of the conjugate partner, (n - i) % n.
    conj_index: Vec<usize>,
    /// 4π²|k|² per mode (the symbol of -Δ).
    ksq: Array2<f64>,
    /// Two-thirds dealiasing mask, true = retained.
    mask: Array2<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// The n×n periodic collocation grid with its wavenumber table, dealiasing
/// mask and transform plans. Cheap to clone; all fields on a grid share one
/// underlying table.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<GridInner>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid").field("n", &self.inner.n).finish()
    }
}

impl TorusGrid {
    /// Build the grid for `n` points per axis. `n` must be even and >= 8.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::GridSize(n));
        }
        let freq: Vec<i64> = (0..n)
            .map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect();
        let freq_f: Vec<f64> = freq.iter().map(|&k| k as f64).collect();
        let conj_index: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        let mut ksq = Array2::zeros((n, n));
        let mut mask = Array2::from_elem((n, n), false);
        let cutoff = n as f64 / 3.0;
        for i in 0..n {
            for j in 0..n {
                let (k1, k2) = (freq[i] as f64, freq[j] as f64);
                ksq[[i, j]] = 4.0 * PI * PI * (k1 * k1 + k2 * k2);
                mask[[i, j]] = k1.abs() < cutoff && k2.abs() < cutoff;
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(TorusGrid {
            inner: Arc::new(GridInner { n, freq, freq_f, conj_index, ksq, mask, fwd, inv }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Number of collocation points, n².
    pub fn points(&self) -> usize {
        self.inner.n * self.inner.n
    }

    /// Signed integer frequency for FFT index `i`.
    pub fn freq(&self, i: usize) -> i64 {
        self.inner.freq[i]
    }

    /// Largest |k_i| kept by the two-thirds rule.
    pub fn max_retained(&self) -> i64 {
        (self.inner.n as i64 - 1) / 3
    }

    pub fn dealias_mask(&self) -> &Array2<bool> {
        &self.inner.mask
    }

    /// 4π²|k|² table (the spectral symbol of -Δ).
    pub fn minus_laplacian_symbol(&self) -> &Array2<f64> {
        &self.inner.ksq
    }

    /// Grids are compatible when they have the same resolution.
    pub fn is_compatible(&self, other: &TorusGrid) -> bool {
        self.inner.n == other.inner.n
    }

    fn check_compatible(&self, other: &TorusGrid) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.inner.n, other.inner.n))
        }
    }

    /// In-place 2D FFT: rows, then columns via transpose.
    fn fft2(&self, data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.inner.n;
        let mut scratch = vec![Complex64::ZERO; plan.get_inplace_scratch_len()];
        let slice = data.as_slice_mut().expect("spectral buffer not contiguous");
        for row in slice.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        let mut tmp = vec![Complex64::ZERO; n * n];
        transpose::transpose(slice, &mut tmp, n, n);
        for row in tmp.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        transpose::transpose(&tmp, slice, n, n);
    }

    /// Forward transform of a real field to normalized, Hermitian-symmetric
    /// coefficients.
    pub fn forward(&self, phys: &Array2<f64>) -> Array2<Complex64> {
        let mut buf = phys.mapv(|v| Complex64::new(v, 0.0));
        self.fft2(&mut buf, &self.inner.fwd);
        let scale = 1.0 / self.points() as f64;
        buf.mapv_inplace(|c| c * scale);
        self.hermitian_symmetrize(&mut buf);
        buf
    }

    /// Inverse transform of Hermitian coefficients back to real collocation
    /// values.
    pub fn inverse(&self, spec: &Array2<Complex64>) -> Array2<f64> {
        let mut buf = spec.clone();
        self.fft2(&mut buf, &self.inner.inv);
        buf.mapv(|c| c.re)
    }

    /// Transform two real fields with a single complex FFT by packing them
    /// into real and imaginary parts. The unpacked spectra are Hermitian by
    /// construction.
    pub fn forward_pair(&self, f: &Array2<f64>, g: &Array2<f64>) -> (Array2<Complex64>, Array2<Complex64>) {
        let n = self.inner.n;
        let mut buf = Array2::zeros((n, n));
        Zip::from(&mut buf).and(f).and(g).for_each(|b, &a, &c| {
            *b = Complex64::new(a, c);
        });
        self.forward_pair_packed(buf, false)
    }

    /// Unpack an already packed (f + i g) buffer; with `masked` the
    /// dealiased modes are skipped entirely.
    pub fn forward_pair_packed(
        &self,
        mut buf: Array2<Complex64>,
        masked: bool,
    ) -> (Array2<Complex64>, Array2<Complex64>) {
        let n = self.inner.n;
        self.fft2(&mut buf, &self.inner.fwd);
        let scale = 0.5 / self.points() as f64;
        let mut fa = Array2::zeros((n, n));
        let mut fb = Array2::zeros((n, n));
        {
            let z = buf.as_slice().unwrap();
            let a = fa.as_slice_mut().unwrap();
            let b = fb.as_slice_mut().unwrap();
            let mask = self.inner.mask.as_slice().unwrap();
            let rev = &self.inner.conj_index;
            for i in 0..n {
                let ri = rev[i] * n;
                let row = i * n;
                for j in 0..n {
                    let idx = row + j;
                    if masked && !mask[idx] {
                        continue;
                    }
                    let zij = z[idx];
                    let w = z[ri + rev[j]].conj();
                    a[idx] = (zij + w) * scale;
                    let d = (zij - w) * scale;
                    b[idx] = Complex64::new(d.im, -d.re);
                }
            }
        }
        (fa, fb)
    }

    /// Inverse of two Hermitian spectra with one complex FFT.
    pub fn inverse_pair(&self, a: &Array2<Complex64>, b: &Array2<Complex64>) -> (Array2<f64>, Array2<f64>) {
        let n = self.inner.n;
        let mut buf = Array2::zeros((n, n));
        Zip::from(&mut buf).and(a).and(b).for_each(|z, &x, &y| {
            *z = Complex64::new(x.re - y.im, x.im + y.re);
        });
        self.fft2(&mut buf, &self.inner.inv);
        let f = buf.mapv(|z| z.re);
        let g = buf.mapv(|z| z.im);
        (f, g)
    }

    /// Both first derivatives of a Hermitian spectrum, in physical space,
    /// with a single packed inverse transform.
    pub fn gradient_physical(&self, spec: &Array2<Complex64>) -> (Array2<f64>, Array2<f64>) {
        let n = self.inner.n;
        let tau = 2.0 * PI;
        let mut buf = Array2::zeros((n, n));
        {
            let s = spec.as_slice().unwrap();
            let out = buf.as_slice_mut().unwrap();
            for i in 0..n {
                let k1 = self.inner.freq_f[i];
                let row = i * n;
                for j in 0..n {
                    // ∂₁f + i ∂₂f has the per-mode multiplier 2π(-k₂ + i k₁).
                    let m = Complex64::new(-tau * self.inner.freq_f[j], tau * k1);
                    out[row + j] = s[row + j] * m;
                }
            }
        }
        self.fft2(&mut buf, &self.inner.inv);
        (buf.mapv(|z| z.re), buf.mapv(|z| z.im))
    }

    /// -(∂₁a + ∂₂b) as a spectrum, in one pass.
    pub fn neg_divergence_spec(&self, a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
        let n = self.inner.n;
        let tau = 2.0 * PI;
        let mut out = Array2::zeros((n, n));
        {
            let sa = a.as_slice().unwrap();
            let sb = b.as_slice().unwrap();
            let o = out.as_slice_mut().unwrap();
            for i in 0..n {
                let k1 = tau * self.inner.freq_f[i];
                let row = i * n;
                for j in 0..n {
                    let k2 = tau * self.inner.freq_f[j];
                    let idx = row + j;
                    let v = sa[idx] * k1 + sb[idx] * k2;
                    // multiply by -i: -(i v) = (v.im, -v.re)
                    o[idx] = Complex64::new(v.im, -v.re);
                }
            }
        }
        out
    }

    /// Remove the curl-free part in place; the (0,0) mode passes through.
    pub fn leray_in_place(&self, x: &mut Array2<Complex64>, y: &mut Array2<Complex64>) {
        let n = self.inner.n;
        let sx = x.as_slice_mut().unwrap();
        let sy = y.as_slice_mut().unwrap();
        for i in 0..n {
            let k1 = self.inner.freq_f[i];
            let row = i * n;
            for j in 0..n {
                let k2 = self.inner.freq_f[j];
                let nsq = k1 * k1 + k2 * k2;
                if nsq == 0.0 {
                    continue;
                }
                let idx = row + j;
                let s = (sx[idx] * k2 - sy[idx] * k1) / nsq;
                sx[idx] = s * k2;
                sy[idx] = s * -k1;
            }
        }
    }

    /// Enforce c_{-k} = conj(c_k) by pairwise averaging.
    pub fn hermitian_symmetrize(&self, spec: &mut Array2<Complex64>) {
        let n = self.inner.n;
        for i in 0..n {
            let ic = (n - i) % n;
            for j in 0..n {
                let jc = (n - j) % n;
                if (i, j) < (ic, jc) {
                    let a = spec[[i, j]];
                    let b = spec[[ic, jc]];
                    let avg = (a + b.conj()) * 0.5;
                    spec[[i, j]] = avg;
                    spec[[ic, jc]] = avg.conj();
                } else if (i, j) == (ic, jc) {
                    spec[[i, j]].im = 0.0;
                }
            }
        }
    }

    /// Zero all modes outside the two-thirds mask, in place.
    pub fn apply_mask(&self, spec: &mut Array2<Complex64>) {
        Zip::from(spec).and(&self.inner.mask).for_each(|c, &keep| {
            if !keep {
                *c = Complex64::ZERO;
            }
        });
    }

    /// Multiplier-form derivative: mode k picks up (2πi k₁)^a1 (2πi k₂)^a2.
    pub fn derivative_spec(&self, spec: &Array2<Complex64>, a1: u32, a2: u32) -> Array2<Complex64> {
        let n = self.inner.n;
        let mut out = spec.clone();
        for i in 0..n {
            let m1 = Complex64::new(0.0, 2.0 * PI * self.inner.freq[i] as f64).powu(a1);
            for j in 0..n {
                let m2 = Complex64::new(0.0, 2.0 * PI * self.inner.freq[j] as f64).powu(a2);
                out[[i, j]] *= m1 * m2;
            }
        }
        out
    }

    /// All-zero coefficient array of the grid's shape.
    pub fn zeros_spec(&self) -> Array2<Complex64> {
        Array2::zeros((self.inner.n, self.inner.n))
    }
}

/// A scalar field on the torus, in physical or spectral representation.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: TorusGrid,
    data: FieldData,
}

#[derive(Debug, Clone)]
enum FieldData {
    Physical(Array2<f64>),
    Spectral(Array2<Complex64>),
}

impl ScalarField {
    pub fn from_physical(grid: TorusGrid, data: Array2<f64>) -> Result<Self> {
        check_shape(&grid, data.dim())?;
        Ok(ScalarField { grid, data: FieldData::Physical(data) })
    }

    pub fn from_spectral(grid: TorusGrid, data: Array2<Complex64>) -> Result<Self> {
        check_shape(&grid, data.dim())?;
        Ok(ScalarField { grid, data: FieldData::Spectral(data) })
    }

    /// Spatially constant field (physical representation).
    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        let n = grid.n();
        ScalarField { grid, data: FieldData::Physical(Array2::from_elem((n, n), value)) }
    }

    /// Sample `f(x1, x2)` at the collocation points x_i = j/n.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let h = 1.0 / n as f64;
        let data = Array2::from_shape_fn((n, n), |(i, j)| f(i as f64 * h, j as f64 * h));
        ScalarField { grid, data: FieldData::Physical(data) }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Physical(_) => Representation::Physical,
            FieldData::Spectral(_) => Representation::Spectral,
        }
    }

    /// Forward transform. Errors if the field is already spectral.
    pub fn to_spectral(&self) -> Result<Self> {
        match &self.data {
            FieldData::Physical(p) => Ok(ScalarField {
                grid: self.grid.clone(),
                data: FieldData::Spectral(self.grid.forward(p)),
            }),
            FieldData::Spectral(_) => Err(Error::Representation {
                expected: Representation::Physical,
                found: Representation::Spectral,
            }),
        }
    }

    /// Inverse transform. Errors if the field is already physical.
    pub fn to_physical(&self) -> Result<Self> {
        match &self.data {
            FieldData::Spectral(s) => Ok(ScalarField {
                grid: self.grid.clone(),
                data: FieldData::Physical(self.grid.inverse(s)),
            }),
            FieldData::Physical(_) => Err(Error::Representation {
                expected: Representation::Spectral,
                found: Representation::Physical,
            }),
        }
    }

    /// Borrow the coefficients; usage error when physical.
    pub fn spectral(&self) -> Result<&Array2<Complex64>> {
        match &self.data {
            FieldData::Spectral(s) => Ok(s),
            FieldData::Physical(_) => Err(Error::Representation {
                expected: Representation::Spectral,
                found: Representation::Physical,
            }),
        }
    }

    /// Borrow the collocation values; usage error when spectral.
    pub fn physical(&self) -> Result<&Array2<f64>> {
        match &self.data {
            FieldData::Physical(p) => Ok(p),
            FieldData::Spectral(_) => Err(Error::Representation {
                expected: Representation::Physical,
                found: Representation::Spectral,
            }),
        }
    }

    /// Coefficients, transforming on the fly if needed.
    pub fn spectral_data(&self) -> Cow<'_, Array2<Complex64>> {
        match &self.data {
            FieldData::Spectral(s) => Cow::Borrowed(s),
            FieldData::Physical(p) => Cow::Owned(self.grid.forward(p)),
        }
    }

    /// Collocation values, transforming on the fly if needed.
    pub fn physical_data(&self) -> Cow<'_, Array2<f64>> {
        match &self.data {
            FieldData::Physical(p) => Cow::Borrowed(p),
            FieldData::Spectral(s) => Cow::Owned(self.grid.inverse(s)),
        }
    }

    /// Partial derivative of multi-order (a1, a2); auto-converts to spectral.
    pub fn derivative(&self, a1: u32, a2: u32) -> Self {
        let spec = self.spectral_data();
        ScalarField {
            grid: self.grid.clone(),
            data: FieldData::Spectral(self.grid.derivative_spec(&spec, a1, a2)),
        }
    }

    pub fn laplacian(&self) -> Self {
        let spec = self.spectral_data();
        let mut out = spec.into_owned();
        Zip::from(&mut out)
            .and(self.grid.minus_laplacian_symbol())
            .for_each(|c, &k2| *c *= -k2);
        ScalarField { grid: self.grid.clone(), data: FieldData::Spectral(out) }
    }

    pub fn gradient(&self) -> VectorField {
        VectorField {
            x: self.derivative(1, 0),
            y: self.derivative(0, 1),
        }
    }

    /// Zero all masked-out modes. Requires spectral representation; idempotent.
    pub fn dealias(&self) -> Result<Self> {
        let spec = self.spectral()?;
        let mut out = spec.clone();
        self.grid.apply_mask(&mut out);
        Ok(ScalarField { grid: self.grid.clone(), data: FieldData::Spectral(out) })
    }

    /// Spatial mean v_Ω; exact from the zero mode in spectral form.
    pub fn mean(&self) -> f64 {
        match &self.data {
            FieldData::Spectral(s) => s[[0, 0]].re,
            FieldData::Physical(p) => p.sum() / p.len() as f64,
        }
    }

    /// Apply a pointwise function in physical space.
    pub fn map_physical(&self, f: impl Fn(f64) -> f64) -> Self {
        let p = self.physical_data();
        ScalarField {
            grid: self.grid.clone(),
            data: FieldData::Physical(p.mapv(f)),
        }
    }

    /// L² norm over Ω (|Ω| = 1): Parseval sum in spectral form, root mean
    /// square of collocation values in physical form.
    pub fn l2_norm(&self) -> f64 {
        match &self.data {
            FieldData::Spectral(s) => s.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            FieldData::Physical(p) => (p.iter().map(|v| v * v).sum::<f64>() / p.len() as f64).sqrt(),
        }
    }

    /// L^p norm by collocation quadrature.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let d = self.physical_data();
        (d.iter().map(|v| v.abs().powf(p)).sum::<f64>() / d.len() as f64).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        let d = self.physical_data();
        d.iter().map(|v| v.abs()).sum::<f64>() / d.len() as f64
    }

    pub fn linf_norm(&self) -> f64 {
        let d = self.physical_data();
        d.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        let d = self.physical_data();
        d.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        let d = self.physical_data();
        d.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fractional Sobolev norm ( Σ_k (1 + 4π²|k|²)^s |c_k|² )^{1/2}.
    /// s = 0 is the L² norm, s = 1 the H¹ norm.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let spec = self.spectral_data();
        let sym = self.grid.minus_laplacian_symbol();
        Zip::from(&*spec)
            .and(sym)
            .fold(0.0, |acc, c, &k2| acc + (1.0 + k2).powf(s) * c.norm_sqr())
            .sqrt()
    }

    /// Dual norm ( |c_0|² + Σ_{k≠0} |c_k|²/(1 + 4π²|k|²) )^{1/2}.
    pub fn dual_norm_vprime(&self) -> f64 {
        let spec = self.spectral_data();
        let sym = self.grid.minus_laplacian_symbol();
        Zip::from(&*spec)
            .and(sym)
            .fold(0.0, |acc, c, &k2| acc + c.norm_sqr() / (1.0 + k2))
            .sqrt()
    }

    /// ‖∇v‖², computed exactly from the spectrum.
    pub fn grad_norm_sqr(&self) -> f64 {
        let spec = self.spectral_data();
        let sym = self.grid.minus_laplacian_symbol();
        Zip::from(&*spec).and(sym).fold(0.0, |acc, c, &k2| acc + k2 * c.norm_sqr())
    }

    /// Pointwise sum with a compatible field in the same representation.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let data = match &self.data {
            FieldData::Physical(p) => FieldData::Physical(p.mapv(|v| v * factor)),
            FieldData::Spectral(s) => FieldData::Spectral(s.mapv(|c| c * factor)),
        };
        ScalarField { grid: self.grid.clone(), data }
    }

    /// Add a constant without changing representation.
    pub fn shift(&self, offset: f64) -> Self {
        match &self.data {
            FieldData::Physical(p) => ScalarField {
                grid: self.grid.clone(),
                data: FieldData::Physical(p.mapv(|v| v + offset)),
            },
            FieldData::Spectral(s) => {
                let mut out = s.clone();
                out[[0, 0]] += offset;
                ScalarField { grid: self.grid.clone(), data: FieldData::Spectral(out) }
            }
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        fp: impl Fn(f64, f64) -> f64,
        fs: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.check_compatible(&other.grid)?;
        match (&self.data, &other.data) {
            (FieldData::Physical(a), FieldData::Physical(b)) => {
                let mut out = a.clone();
                Zip::from(&mut out).and(b).for_each(|x, &y| *x = fp(*x, y));
                Ok(ScalarField { grid: self.grid.clone(), data: FieldData::Physical(out) })
            }
            (FieldData::Spectral(a), FieldData::Spectral(b)) => {
                let mut out = a.clone();
                Zip::from(&mut out).and(b).for_each(|x, &y| *x = fs(*x, y));
                Ok(ScalarField { grid: self.grid.clone(), data: FieldData::Spectral(out) })
            }
            _ => Err(Error::Representation {
                expected: self.representation(),
                found: other.representation(),
            }),
        }
    }
}

fn check_shape(grid: &TorusGrid, dim: (usize, usize)) -> Result<()> {
    if dim == (grid.n(), grid.n()) {
        Ok(())
    } else {
        Err(Error::DataShape { rows: dim.0, cols: dim.1, n: grid.n() })
    }
}

/// A two-component vector field; both components share grid and
/// representation.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        x.grid().check_compatible(y.grid())?;
        if x.representation() != y.representation() {
            return Err(Error::Representation {
                expected: x.representation(),
                found: y.representation(),
            });
        }
        Ok(VectorField { x, y })
    }

    pub fn zero(grid: TorusGrid) -> Self {
        VectorField {
            x: ScalarField::constant(grid.clone(), 0.0),
            y: ScalarField::constant(grid, 0.0),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.x.grid()
    }

    pub fn representation(&self) -> Representation {
        self.x.representation()
    }

    pub fn to_spectral(&self) -> Result<Self> {
        Ok(VectorField { x: self.x.to_spectral()?, y: self.y.to_spectral()? })
    }

    pub fn to_physical(&self) -> Result<Self> {
        Ok(VectorField { x: self.x.to_physical()?, y: self.y.to_physical()? })
    }

    pub fn divergence(&self) -> ScalarField {
        self.x
            .derivative(1, 0)
            .try_add(&self.y.derivative(0, 1))
            .expect("components share a grid")
    }

    /// Project onto divergence-free fields: for k ≠ 0 only the component
    /// orthogonal to k survives (u ↦ k^⊥ (k^⊥·u)/|k|²); the (0,0) mode
    /// (mean momentum) passes through unchanged. Idempotent to round-off.
    pub fn leray_project(&self) -> Result<Self> {
        let grid = self.grid().clone();
        let mut ox = self.x.spectral()?.clone();
        let mut oy = self.y.spectral()?.clone();
        grid.leray_in_place(&mut ox, &mut oy);
        Ok(VectorField {
            x: ScalarField::from_spectral(grid.clone(), ox)?,
            y: ScalarField::from_spectral(grid, oy)?,
        })
    }

    pub fn dealias(&self) -> Result<Self> {
        Ok(VectorField { x: self.x.dealias()?, y: self.y.dealias()? })
    }

    pub fn mean(&self) -> [f64; 2] {
        [self.x.mean(), self.y.mean()]
    }

    pub fn l2_norm(&self) -> f64 {
        let (a, b) = (self.x.l2_norm(), self.y.l2_norm());
        (a * a + b * b).sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let (a, b) = (self.x.sobolev_norm(s), self.y.sobolev_norm(s));
        (a * a + b * b).sqrt()
    }

    pub fn grad_norm_sqr(&self) -> f64 {
        self.x.grad_norm_sqr() + self.y.grad_norm_sqr()
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(VectorField {
            x: self.x.try_sub(&other.x)?,
            y: self.y.try_sub(&other.y)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    const TAU: f64 = 2.0 * PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    /// Random field with spectrum confined to |k_i| <= kmax.
    fn random_bandlimited(g: &TorusGrid, kmax: i64, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n();
        let mut spec = g.zeros_spec();
        for i in 0..n {
            for j in 0..n {
                if g.freq(i).abs() <= kmax && g.freq(j).abs() <= kmax {
                    spec[[i, j]] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                }
            }
        }
        g.hermitian_symmetrize(&mut spec);
        ScalarField::from_spectral(g.clone(), spec).unwrap()
    }

    #[test]
    fn grid_construction() {
        let g = grid(8);
        assert_eq!(g.points(), 64);
        assert_eq!(g.max_retained(), 2);
        let g = grid(64);
        assert_eq!(g.points(), 4096);
        assert_eq!(g.max_retained(), 21);
        assert!(g.dealias_mask()[[0, 0]]);
        assert!(matches!(TorusGrid::new(7), Err(Error::GridSize(7))));
        assert!(matches!(TorusGrid::new(6), Err(Error::GridSize(6))));
    }

    #[test]
    fn constant_field_transforms_to_zero_mode() {
        let g = grid(8);
        let f = ScalarField::constant(g, 3.5).to_spectral().unwrap();
        let s = f.spectral().unwrap();
        assert_abs_diff_eq!(s[[0, 0]].re, 3.5, epsilon = 1e-14);
        let off_mode: f64 = s.iter().skip(1).map(|c| c.norm()).sum();
        assert!(off_mode < 1e-12);
        assert_abs_diff_eq!(f.mean(), 3.5, epsilon = 1e-14);
    }

    #[test]
    fn sine_has_expected_coefficients() {
        let g = grid(16);
        let f = ScalarField::from_fn(g.clone(), |x1, _| (TAU * x1).sin())
            .to_spectral()
            .unwrap();
        let s = f.spectral().unwrap();
        // sin(2πx₁) = (e^{2πi x₁} - e^{-2πi x₁}) / 2i -> c_(1,0) = -i/2.
        assert_abs_diff_eq!(s[[1, 0]].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[[1, 0]].im, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s[[15, 0]].im, 0.5, epsilon = 1e-14);
        let rest: f64 = s
            .indexed_iter()
            .filter(|((i, j), _)| !(*j == 0 && (*i == 1 || *i == 15)))
            .map(|(_, c)| c.norm())
            .sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn wrong_representation_is_a_usage_error() {
        let g = grid(8);
        let f = ScalarField::constant(g, 1.0);
        assert!(f.physical().is_ok());
        assert!(f.spectral().is_err());
        assert!(f.to_physical().is_err());
        let s = f.to_spectral().unwrap();
        assert!(s.to_spectral().is_err());
        assert!(s.dealias().is_ok());
        assert!(f.dealias().is_err());
    }

    #[test]
    fn round_trip_is_machine_exact() {
        let g = grid(32);
        for seed in 0..20 {
            let f = random_bandlimited(&g, g.max_retained(), seed);
            let p = f.to_physical().unwrap();
            let back = p.to_spectral().unwrap();
            let err = back
                .spectral()
                .unwrap()
                .iter()
                .zip(f.spectral().unwrap().iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            assert!(err < 1e-12, "round trip error {err}");
        }
    }

    #[test]
    fn pair_transforms_match_single_transforms() {
        let g = grid(16);
        let f = random_bandlimited(&g, 5, 1).to_physical().unwrap();
        let h = random_bandlimited(&g, 5, 2).to_physical().unwrap();
        let (fa, fb) = g.forward_pair(f.physical().unwrap(), h.physical().unwrap());
        let sa = g.forward(f.physical().unwrap());
        let sb = g.forward(h.physical().unwrap());
        let err = fa
            .iter()
            .zip(sa.iter())
            .chain(fb.iter().zip(sb.iter()))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-13, "pair forward mismatch {err}");
        let (pa, pb) = g.inverse_pair(&sa, &sb);
        let err = pa
            .iter()
            .zip(f.physical().unwrap().iter())
            .chain(pb.iter().zip(h.physical().unwrap().iter()))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-13, "pair inverse mismatch {err}");
    }

    #[test]
    fn laplacian_eigenfunction() {
        let g = grid(16);
        let f = ScalarField::from_fn(g.clone(), |x1, _| (TAU * x1).sin());
        let lap = f.laplacian().to_physical().unwrap();
        let expect = f.physical().unwrap().mapv(|v| -4.0 * PI * PI * v);
        let err = lap
            .physical()
            .unwrap()
            .iter()
            .zip(expect.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(8);
        let f = ScalarField::constant(g, 2.0);
        assert!(f.derivative(1, 0).l2_norm() < 1e-14);
    }

    #[test]
    fn bilaplacian_eigenvalue_at_mode_one_one() {
        let g = grid(16);
        let mut spec = g.zeros_spec();
        spec[[1, 1]] = Complex64::new(1.0, 0.0);
        let f = ScalarField::from_spectral(g, spec).unwrap();
        let b = f.derivative(4, 0)
            .try_add(&f.derivative(0, 4))
            .unwrap()
            .try_add(&f.derivative(2, 2).scale(2.0))
            .unwrap();
        // Δ² e^{2πi k·x} has eigenvalue 16π⁴|k|⁴ = 64π⁴ at k = (1,1).
        let got = b.spectral().unwrap()[[1, 1]];
        assert_abs_diff_eq!(got.re, 64.0 * PI.powi(4), epsilon = 1e-8);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn dealias_is_a_projection() {
        let g = grid(16);
        let f = random_bandlimited(&g, 8, 7); // full spectrum incl. masked modes
        let once = f.dealias().unwrap();
        let twice = once.dealias().unwrap();
        let err = once
            .spectral()
            .unwrap()
            .iter()
            .zip(twice.spectral().unwrap().iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert_eq!(err, 0.0);
        // Band-limited input is untouched.
        let inside = random_bandlimited(&g, g.max_retained(), 8);
        let same = inside.dealias().unwrap();
        let err = inside
            .spectral()
            .unwrap()
            .iter()
            .zip(same.spectral().unwrap().iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert_eq!(err, 0.0);
    }

    /// Aliased content of sin(2π·21·x₁)² on n=64 lands at |k₁| = 22 and must
    /// be removed; the dealiased product must agree with the exact product
    /// computed on a finer grid and truncated.
    #[test]
    fn dealias_matches_fine_grid_product() {
        let coarse = grid(64);
        let fine = grid(256);
        let prod_c = ScalarField::from_fn(coarse.clone(), |x1, _| (TAU * 21.0 * x1).sin().powi(2))
            .to_spectral()
            .unwrap()
            .dealias()
            .unwrap();
        let prod_f = ScalarField::from_fn(fine.clone(), |x1, _| (TAU * 21.0 * x1).sin().powi(2))
            .to_spectral()
            .unwrap();
        // The aliased image at k₁ = -22 must be gone.
        assert_eq!(prod_c.spectral().unwrap()[[64 - 22, 0]], Complex64::ZERO);
        // Every retained coarse mode agrees with the fine-grid truth.
        let nc = 64usize;
        let nf = 256usize;
        let sc = prod_c.spectral().unwrap();
        let sf = prod_f.spectral().unwrap();
        let mut err = 0.0f64;
        for i in 0..nc {
            for j in 0..nc {
                if !coarse.dealias_mask()[[i, j]] {
                    continue;
                }
                let k1 = coarse.freq(i);
                let k2 = coarse.freq(j);
                let fi = ((k1 + nf as i64) % nf as i64) as usize;
                let fj = ((k2 + nf as i64) % nf as i64) as usize;
                err = err.max((sc[[i, j]] - sf[[fi, fj]]).norm());
            }
        }
        assert!(err < 1e-13, "coarse/fine mismatch {err}");
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = grid(16);
        let p = ScalarField::from_fn(g.clone(), |x1, _| (TAU * x1).sin());
        let w = p.gradient();
        let projected = w.leray_project().unwrap();
        assert!(projected.l2_norm() < 1e-13);
    }

    #[test]
    fn leray_keeps_divergence_free_and_constant_fields() {
        let g = grid(16);
        let w = VectorField::new(
            ScalarField::from_fn(g.clone(), |_, x2| (TAU * x2).sin())
                .to_spectral()
                .unwrap(),
            ScalarField::constant(g.clone(), 0.0).to_spectral().unwrap(),
        )
        .unwrap();
        let proj = w.leray_project().unwrap();
        let diff = proj.try_sub(&w).unwrap();
        assert!(diff.l2_norm() < 1e-13);

        let c = VectorField::new(
            ScalarField::constant(g.clone(), 0.7).to_spectral().unwrap(),
            ScalarField::constant(g, -1.3).to_spectral().unwrap(),
        )
        .unwrap();
        let proj = c.leray_project().unwrap();
        assert_abs_diff_eq!(proj.mean()[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(proj.mean()[1], -1.3, epsilon = 1e-15);
    }

    #[test]
    fn parseval_identity() {
        let g = grid(16);
        let f = random_bandlimited(&g, 7, 11);
        let spec_sum: f64 = f.spectral().unwrap().iter().map(|c| c.norm_sqr()).sum();
        let p = f.to_physical().unwrap();
        let phys_avg = p.physical().unwrap().iter().map(|v| v * v).sum::<f64>() / g.points() as f64;
        assert!((spec_sum - phys_avg).abs() <= 1e-12 * phys_avg.max(1e-300));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// D(αf + βg) = αDf + βDg to round-off, for first derivatives.
        #[test]
        fn derivative_is_linear(seed1 in 0u64..1000, seed2 in 0u64..1000,
                                a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let g = grid(16);
            let f1 = random_bandlimited(&g, 5, seed1);
            let f2 = random_bandlimited(&g, 5, seed2.wrapping_add(5000));
            let combo = f1.scale(a).try_add(&f2.scale(b)).unwrap();
            let lhs = combo.derivative(1, 0);
            let rhs = f1.derivative(1, 0).scale(a)
                .try_add(&f2.derivative(1, 0).scale(b)).unwrap();
            let err = lhs.spectral().unwrap().iter()
                .zip(rhs.spectral().unwrap().iter())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
            prop_assert!(err < 1e-12);
        }

        /// Arbitrary fields project to divergence-free fields, idempotently.
        #[test]
        fn leray_divergence_free_and_idempotent(seed in 0u64..1000) {
            let g = grid(16);
            let w = VectorField::new(
                random_bandlimited(&g, 7, seed),
                random_bandlimited(&g, 7, seed.wrapping_add(9999)),
            ).unwrap();
            let proj = w.leray_project().unwrap();
            let scale = w.l2_norm().max(1e-30);
            prop_assert!(proj.divergence().l2_norm() <= 1e-13 * scale);
            let again = proj.leray_project().unwrap();
            let err = again.try_sub(&proj).unwrap().l2_norm();
            prop_assert!(err <= 1e-14 * scale);
        }

        #[test]
        fn round_trip_random_fields(seed in 0u64..1000) {
            let g = grid(16);
            let f = random_bandlimited(&g, g.max_retained(), seed).to_physical().unwrap();
            let back = f.to_spectral().unwrap().to_physical().unwrap();
            let err = back.physical().unwrap().iter()
                .zip(f.physical().unwrap().iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            prop_assert!(err < 1e-12);
        }
    }
}
