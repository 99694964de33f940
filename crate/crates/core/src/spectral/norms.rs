use std::collections::BTreeMap;
use std::str::FromStr;

use super::{Fourier, RealField, SpectralField};
use crate::error::{MuskatError, Result};

/// Dyadic annulus index `j` with `2^(j-1) <= k < 2^j`.
pub(crate) fn annulus_index(k: f64) -> i32 {
    debug_assert!(k > 0.0);
    let mut j = k.log2().floor() as i32 + 1;
    // log2 can be off by one ulp near exact powers of two
    while 2f64.powi(j - 1) > k {
        j -= 1;
    }
    while k >= 2f64.powi(j) {
        j += 1;
    }
    j
}

/// Besov-type norm: the annulus profile and its supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovNorm {
    pub sup: f64,
    pub profile: BTreeMap<i32, f64>,
}

impl SpectralField {
    fn has_nonzero_mean(&self) -> bool {
        let c0 = self.mean().norm();
        if c0 == 0.0 {
            return false;
        }
        let rest = self.coeffs()[1..].iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        c0 > 1e-12 * rest || rest == 0.0
    }

    fn require_mean_zero(&self, what: &str, exponent: f64) -> Result<()> {
        if exponent < 0.0 && self.has_nonzero_mean() {
            return Err(MuskatError::precondition(format!(
                "{what} with negative exponent {exponent} needs a mean-zero field (c_0 = {:.3e})",
                self.mean().norm()
            )));
        }
        Ok(())
    }

    /// `sum_{m != 0} |k_m|^s |c_m|`.
    pub fn s_norm(&self, s: f64) -> Result<f64> {
        self.require_mean_zero("s-norm", s)?;
        let g = self.grid();
        Ok(self
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| g.wavenumber(i).powf(s) * c.norm())
            .sum())
    }

    /// Annulus-restricted `s`-norms over `C_j = {2^(j-1) <= |k| < 2^j}` and their supremum.
    pub fn besov_norm(&self, s: f64) -> Result<BesovNorm> {
        self.require_mean_zero("Besov norm", s)?;
        let g = self.grid();
        let mut profile = BTreeMap::new();
        for (i, c) in self.coeffs().iter().enumerate().skip(1) {
            if c.norm() == 0.0 {
                continue;
            }
            let k = g.wavenumber(i);
            *profile.entry(annulus_index(k)).or_insert(0.0) += k.powf(s) * c.norm();
        }
        let sup = profile.values().copied().fold(0.0, f64::max);
        Ok(BesovNorm { sup, profile })
    }

    /// `H^l` norm `(sum_m (1 + |k_m|^2)^l |c_m|^2 L^d)^(1/2)`.
    pub fn sobolev_norm(&self, l: f64) -> f64 {
        let g = self.grid();
        let volume = g.length().powi(g.dim() as i32);
        let sum: f64 = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (1.0 + g.wavenumber(i).powi(2)).powf(l) * c.norm_sqr())
            .sum();
        (sum * volume).sqrt()
    }

    /// `|nabla|^r`: multiplies `c_m` by `|k_m|^r`.
    pub fn apply_lambda_power(&self, r: f64) -> Result<SpectralField> {
        self.require_mean_zero("|nabla|^r", r)?;
        if r == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.map_radial(|k| if k == 0.0 { 0.0 } else { k.powf(r) }))
    }
}

/// Lebesgue exponents supported by [`RealField::lp_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lp {
    One,
    Two,
    Inf,
}

impl Lp {
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Lp::One)
        } else if p == 2.0 {
            Ok(Lp::Two)
        } else if p == f64::INFINITY {
            Ok(Lp::Inf)
        } else {
            Err(MuskatError::config(format!(
                "unsupported Lebesgue exponent {p}; use 1, 2 or inf"
            )))
        }
    }
}

impl FromStr for Lp {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Lp::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| MuskatError::config(format!("bad Lebesgue exponent '{other}'")))?;
                Lp::from_exponent(p)
            }
        }
    }
}

impl RealField {
    /// Trapezoid-rule `L^p` norm for finite `p`, max of `|f|` for `p = inf`.
    pub fn lp_norm(&self, p: Lp) -> f64 {
        let g = self.grid();
        let cell = g.spacing().powi(g.dim() as i32);
        match p {
            Lp::One => cell * self.samples().iter().map(|v| v.abs()).sum::<f64>(),
            Lp::Two => (cell * self.samples().iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Lp::Inf => self.max_abs(),
        }
    }
}

/// `max_x |nabla f(x)|` from the spectral gradient.
pub(crate) fn gradient_sup(fourier: &Fourier, spec: &SpectralField) -> f64 {
    let d = spec.grid().dim();
    let comps: Vec<Vec<f64>> = (0..d)
        .map(|a| fourier.inverse_real(spec.derivative(a).coeffs()))
        .collect();
    (0..spec.grid().len())
        .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

impl SpectralField {
    /// `max_x |nabla f(x)|` evaluated on the grid.
    pub fn gradient_sup(&self) -> f64 {
        gradient_sup(&Fourier::new(*self.grid()), self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub theta: f64,
    pub holds: bool,
}

/// Checks `||f||_s <= ||f||_mu1^theta ||f||_mu2^(1-theta)`, `theta = (mu2 - s)/(mu2 - mu1)`.
pub fn check_interpolation(
    spec: &SpectralField,
    mu1: f64,
    mu2: f64,
    s: f64,
) -> Result<InterpolationReport> {
    if !(mu1 < s && s < mu2) {
        return Err(MuskatError::precondition(format!(
            "interpolation needs mu1 < s < mu2, got ({mu1}, {s}, {mu2})"
        )));
    }
    let theta = (mu2 - s) / (mu2 - mu1);
    let lhs = spec.s_norm(s)?;
    let rhs = spec.s_norm(mu1)?.powf(theta) * spec.s_norm(mu2)?.powf(1.0 - theta);
    Ok(InterpolationReport {
        lhs,
        rhs,
        theta,
        holds: lhs <= rhs * (1.0 + 1e-13),
    })
}

/// One row of a [`NormReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormEntry {
    pub s: f64,
    pub norm: f64,
    pub besov_sup: f64,
    pub besov_profile: BTreeMap<i32, f64>,
}

/// `s`-norms and Besov-type norms of one field for a list of exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormReport {
    pub entries: Vec<NormEntry>,
}

impl NormReport {
    pub fn compute(spec: &SpectralField, s_values: &[f64]) -> Result<Self> {
        let entries = s_values
            .iter()
            .map(|&s| {
                let besov = spec.besov_norm(s)?;
                Ok(NormEntry {
                    s,
                    norm: spec.s_norm(s)?,
                    besov_sup: besov.sup,
                    besov_profile: besov.profile,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn norm(&self, s: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.s == s).map(|e| e.norm)
    }
}
