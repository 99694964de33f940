//! Seeded mean-zero initial interfaces scaled to a prescribed `||f||_1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{MuskatError, Result};
use crate::spectral::{synthesize, GridSpec, RealField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// `cos(k x)` in 1D, `cos(k x1) + cos(k x2)` in 2D, with `k` the band's lower edge.
    SingleMode,
    /// Independent uniform amplitudes and phases on the band `k_min <= |m| <= k_max`.
    RandomBand,
    /// `|c_m| = |k_m|^a` on the band with random phases.
    LowFrequencyPower,
}

impl InitialKind {
    pub fn name(self) -> &'static str {
        match self {
            InitialKind::SingleMode => "single-mode",
            InitialKind::RandomBand => "random-band",
            InitialKind::LowFrequencyPower => "low-frequency-power",
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialKind {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single-mode" => Ok(InitialKind::SingleMode),
            "random-band" => Ok(InitialKind::RandomBand),
            "low-frequency-power" => Ok(InitialKind::LowFrequencyPower),
            other => Err(MuskatError::config(format!(
                "unknown initial kind '{other}' (single-mode, random-band, low-frequency-power)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    /// Target value of `||f_0||_1`.
    pub amplitude: f64,
    /// Band edges in integer mode numbers `|m|`.
    pub k_min: u32,
    pub k_max: u32,
    pub exponent: f64,
    pub seed: u64,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            kind: InitialKind::SingleMode,
            amplitude: 0.1,
            k_min: 1,
            k_max: 8,
            exponent: 0.0,
            seed: 0,
        }
    }
}

impl InitialDataSpec {
    pub fn single_mode(k: u32, amplitude: f64) -> Self {
        Self {
            kind: InitialKind::SingleMode,
            amplitude,
            k_min: k,
            k_max: k,
            ..Self::default()
        }
    }

    pub fn random_band(k_min: u32, k_max: u32, amplitude: f64, seed: u64) -> Self {
        Self {
            kind: InitialKind::RandomBand,
            amplitude,
            k_min,
            k_max,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(MuskatError::config(format!(
                "initial.amplitude must be >= 0, got {}",
                self.amplitude
            )));
        }
        let top = match self.kind {
            InitialKind::SingleMode => self.k_min,
            _ => self.k_max,
        };
        if self.k_min < 1 || top < self.k_min {
            return Err(MuskatError::config(format!(
                "empty band [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if 2 * top as usize >= grid.n() {
            return Err(MuskatError::config(format!(
                "band edge {top} is not resolved by n = {}",
                grid.n()
            )));
        }
        if !self.exponent.is_finite() {
            return Err(MuskatError::config("initial.exponent must be finite"));
        }
        Ok(())
    }
}

/// Coefficients of the initial field, Hermitian, mean-zero and scaled so
/// that `||f||_1` equals the target amplitude.
pub fn initial_spectrum(spec: &InitialDataSpec, grid: &GridSpec) -> Result<SpectralField> {
    spec.validate(grid)?;
    let mut field = SpectralField::zeros(*grid);
    let half = Complex64::new(0.5, 0.0);
    match spec.kind {
        InitialKind::SingleMode => {
            let k = spec.k_min as i64;
            field.set_coeff([k, 0], half);
            field.set_coeff([-k, 0], half);
            if grid.dim() == 2 {
                field.set_coeff([0, k], half);
                field.set_coeff([0, -k], half);
            }
        }
        InitialKind::RandomBand | InitialKind::LowFrequencyPower => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let (lo, hi) = (spec.k_min as f64, spec.k_max as f64);
            let mut any = false;
            for i in 0..grid.len() {
                let j = grid.conjugate_index(i);
                if j <= i {
                    continue;
                }
                let m = grid.mode(i);
                let radius = (m[0] as f64).hypot(m[1] as f64);
                if radius < lo || radius > hi {
                    continue;
                }
                let modulus = match spec.kind {
                    InitialKind::RandomBand => rng.gen::<f64>(),
                    _ => grid.wavenumber(i).powf(spec.exponent),
                };
                let phase = 2.0 * PI * rng.gen::<f64>();
                let c = Complex64::from_polar(modulus, phase);
                field.coeffs_mut()[i] = c;
                field.coeffs_mut()[j] = c.conj();
                any = true;
            }
            if !any {
                return Err(MuskatError::config(format!(
                    "band [{}, {}] contains no modes",
                    spec.k_min, spec.k_max
                )));
            }
        }
    }
    let norm = field.s_norm(1.0)?;
    Ok(if norm > 0.0 {
        field.scaled(spec.amplitude / norm)
    } else {
        field
    })
}

/// The initial interface on the grid.
pub fn make_initial(spec: &InitialDataSpec, grid: &GridSpec) -> Result<RealField> {
    synthesize(&initial_spectrum(spec, grid)?)
}
