//! Periodic grids, Fourier-series fields and the norm functionals built on them.
//!
//! A field on the box `[0, L)^d` is represented by its Fourier-series
//! coefficients `c_m` with `f(x) = sum_m c_m exp(i k_m . x)` and
//! `k_m = (2 pi / L) m`. Every norm uses `|k_m|` as the frequency magnitude,
//! so the operator `Lambda` has symbol `|k_m|`.

mod io;
mod norms;

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{MuskatError, Result};

pub use io::{read_field, read_norm_report_csv, write_field, write_norm_report_csv};
pub use norms::{check_interpolation, InterpolationReport, Lp, NormEntry, NormReport};

/// Periodic computational domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    d: usize,
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, length: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(MuskatError::config(format!(
                "interface dimension must be 1 or 2, got {d}"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(MuskatError::config(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(MuskatError::config(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { d, n, length })
    }

    /// `[0, 2 pi)^d` with `n` points per axis.
    pub fn periodic_2pi(d: usize, n: usize) -> Result<Self> {
        Self::new(d, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of samples, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Wavenumber quantum `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed mode number of FFT index `i`, in `[-n/2, n/2)`.
    pub fn mode_number(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index of a signed mode number.
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Per-axis FFT indices of a flat index.
    pub fn axes(&self, flat: usize) -> [usize; 2] {
        if self.d == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    pub fn flat(&self, axes: [usize; 2]) -> usize {
        if self.d == 1 {
            axes[0]
        } else {
            axes[0] * self.n + axes[1]
        }
    }

    /// Signed integer wavevector `m` of a flat index (second entry 0 when d = 1).
    pub fn mode(&self, flat: usize) -> [i64; 2] {
        let [a, b] = self.axes(flat);
        if self.d == 1 {
            [self.mode_number(a), 0]
        } else {
            [self.mode_number(a), self.mode_number(b)]
        }
    }

    /// Physical wavevector `k_m` of a flat index.
    pub fn wavevector(&self, flat: usize) -> [f64; 2] {
        let m = self.mode(flat);
        let dk = self.dk();
        [dk * m[0] as f64, dk * m[1] as f64]
    }

    pub fn wavenumber(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        k[0].hypot(k[1])
    }

    /// Whether the mode has a component on the Nyquist line `m_a = -n/2`.
    pub fn is_nyquist(&self, flat: usize, axis: usize) -> bool {
        self.mode(flat)[axis] == -(self.n as i64) / 2
    }

    /// Flat index of `-m`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let [a, b] = self.axes(flat);
        let n = self.n;
        let neg = |i: usize| (n - i) % n;
        self.flat([neg(a), neg(b)])
    }

    /// Physical coordinates of a sample.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.axes(flat);
        let h = self.spacing();
        if self.d == 1 {
            [a as f64 * h, 0.0]
        } else {
            [a as f64 * h, b as f64 * h]
        }
    }
}

/// Real samples on the uniform grid `x_m = m L / n`, row-major for `d = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(MuskatError::config(format!(
                "field has {} samples but the grid needs {}",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(MuskatError::Invariant(format!(
                "sample {i} is not finite"
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let samples = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| alpha * v).collect(),
        }
    }
}

/// Fourier-series coefficients of a real field, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(MuskatError::config(format!(
                "{} coefficients supplied for a grid of {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from `(m, c_m)` pairs; `-m` is not filled in automatically.
    pub fn from_modes(grid: GridSpec, modes: &[([i64; 2], Complex64)]) -> Self {
        let mut field = Self::zeros(grid);
        for &(m, c) in modes {
            field.set_coeff(m, c);
        }
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn flat_of(&self, m: [i64; 2]) -> usize {
        let g = &self.grid;
        if g.dim() == 1 {
            g.index_of_mode(m[0])
        } else {
            g.flat([g.index_of_mode(m[0]), g.index_of_mode(m[1])])
        }
    }

    pub fn coeff(&self, m: [i64; 2]) -> Complex64 {
        self.coeffs[self.flat_of(m)]
    }

    pub fn set_coeff(&mut self, m: [i64; 2], c: Complex64) {
        let i = self.flat_of(m);
        self.coeffs[i] = c;
    }

    /// The mean (zero mode).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Largest `|c_m - conj(c_{-m})|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.conjugate_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Symmetrizes onto real fields and removes the mean.
    pub fn project_real_mean_zero(&mut self) {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let j = self.grid.conjugate_index(i);
            *o = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
        }
        out[0] = Complex64::new(0.0, 0.0);
        self.coeffs = out;
    }

    /// Pointwise multiplication by a real radial symbol `sym(|k_m|)`.
    pub fn map_radial(&self, sym: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * sym(self.grid.wavenumber(i)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Spectral partial derivative along `axis` (Nyquist line zeroed).
    pub fn derivative(&self, axis: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if self.grid.is_nyquist(i, axis) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, self.grid.wavevector(i)[axis])
                }
            })
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Spectral second derivative `d^2 / dx_a dx_b`.
    pub fn second_derivative(&self, a: usize, b: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if a != b && (self.grid.is_nyquist(i, a) || self.grid.is_nyquist(i, b)) {
                    return Complex64::new(0.0, 0.0);
                }
                let k = self.grid.wavevector(i);
                c * (-k[a] * k[b])
            })
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
        }
    }

    /// Zeroes every mode with `max_a |m_a| > n/3`.
    pub fn dealias(&mut self) {
        let cut = self.grid.n() as i64 / 3;
        for i in 0..self.coeffs.len() {
            let m = self.grid.mode(i);
            if m[0].abs() > cut || m[1].abs() > cut {
                self.coeffs[i] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Cached forward/inverse FFT plans for one grid.
#[derive(Clone)]
pub struct Fourier {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        plan.process(buf);
        if self.grid.dim() == 2 {
            transpose(buf, n);
            plan.process(buf);
            transpose(buf, n);
        }
    }

    /// Coefficients `c_m` of real samples.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        let scale = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Complex samples `sum_m c_m exp(i k_m . x)`.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.transform(&mut buf, &self.inverse);
        buf
    }

    /// Real part of the inverse transform, for fields already known to be real.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.inverse(coeffs).into_iter().map(|z| z.re).collect()
    }

    pub fn analyze(&self, field: &RealField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(MuskatError::config("field grid does not match transform grid"));
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self.forward(field.samples()),
        })
    }

    pub fn synthesize(&self, spec: &SpectralField) -> Result<RealField> {
        let values = self.inverse(spec.coeffs());
        let amplitude = values.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let residue = values.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
        if residue > 1e-12 * amplitude {
            return Err(MuskatError::Invariant(format!(
                "coefficients are not Hermitian: imaginary residue {residue:.3e} vs amplitude {amplitude:.3e}"
            )));
        }
        RealField::new(self.grid, values.into_iter().map(|z| z.re).collect())
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Fourier coefficients of `field`.
pub fn analyze(field: &RealField) -> Result<SpectralField> {
    Fourier::new(*field.grid()).analyze(field)
}

/// Real samples of `spec`; fails when the coefficients are not Hermitian.
pub fn synthesize(spec: &SpectralField) -> Result<RealField> {
    Fourier::new(*spec.grid()).synthesize(spec)
}
