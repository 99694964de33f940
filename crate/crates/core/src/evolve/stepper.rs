//! Exponential time differencing for `u_t = L u + F(u)` with `L = -rho/2 |k|`
//! diagonal in Fourier space and `F = -rho/2` times the nonlinearity.

use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;

use super::TrajectoryRecord;
use crate::error::{MuskatError, Result};
use crate::rhs::{NonlocalOperator, QuadratureConfig};
use crate::spectral::{GridSpec, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second-order exponential Runge-Kutta (Cox-Matthews).
    Etdrk2,
    /// Classical explicit RK4, for cross-checks at small steps.
    Rk4,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Etdrk2 => "etdrk2",
            Scheme::Rk4 => "rk4",
        })
    }
}

impl FromStr for Scheme {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "etdrk2" => Ok(Scheme::Etdrk2),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(MuskatError::config(format!("unknown scheme '{other}' (etdrk2, rk4)"))),
        }
    }
}

/// `phi_1(z) = (e^z - 1)/z` and `phi_2(z) = (e^z - 1 - z)/z^2`.
pub(crate) fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 0.2 {
        // Taylor series to z^12: phi_1 = sum z^j/(j+1)!, phi_2 = sum z^j/(j+2)!
        let mut term = 1.0;
        let (mut p1, mut p2) = (0.0, 0.0);
        for j in 0..14 {
            // term = z^j / (j+1)!
            p1 += term;
            p2 += term / (j + 2) as f64;
            term *= z / (j + 2) as f64;
        }
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

fn blow_up(u: &SpectralField, reason: &str) -> MuskatError {
    MuskatError::BlowUp {
        time: f64::NAN,
        step: 0,
        reason: reason.to_string(),
        last_valid: Box::new(u.clone()),
        record: Box::new(TrajectoryRecord::empty()),
    }
}

fn is_finite(u: &SpectralField) -> bool {
    u.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Owns the quadrature operator and the linear symbol for one grid.
#[derive(Debug, Clone)]
pub struct Integrator {
    op: NonlocalOperator,
    symbol: Vec<f64>,
    dealias: bool,
    linear_only: bool,
}

impl Integrator {
    pub fn new(grid: GridSpec, quad: QuadratureConfig, dealias: bool, linear_only: bool) -> Result<Self> {
        let op = NonlocalOperator::new(grid, quad)?;
        let rate = op.linear_rate();
        let symbol = (0..grid.len()).map(|i| -rate * grid.wavenumber(i)).collect();
        Ok(Self {
            op,
            symbol,
            dealias,
            linear_only,
        })
    }

    pub fn operator(&self) -> &NonlocalOperator {
        &self.op
    }

    pub fn grid(&self) -> &GridSpec {
        self.op.grid()
    }

    /// `F(u)`: the nonlinear part of the right-hand side in Fourier space.
    pub fn forcing(&self, u: &SpectralField) -> Result<SpectralField> {
        if self.linear_only {
            return Ok(SpectralField::zeros(*self.grid()));
        }
        if !is_finite(u) {
            return Err(blow_up(u, "non-finite state before nonlinearity evaluation"));
        }
        let mut nl = self.op.nonlinearity_spectral(u)?.scaled(-self.op.linear_rate());
        if self.dealias {
            nl.dealias();
        }
        Ok(nl)
    }

    /// Full right-hand side `L u + F(u)` in Fourier space.
    pub fn tendency(&self, u: &SpectralField) -> Result<SpectralField> {
        let mut out = self.forcing(u)?;
        for ((o, c), l) in out.coeffs_mut().iter_mut().zip(u.coeffs()).zip(&self.symbol) {
            *o += c * l;
        }
        Ok(out)
    }

    /// `cfl * (L/n) / max(1, ||grad f||_inf)`.
    pub fn stable_dt(&self, u: &SpectralField, cfl: f64) -> f64 {
        let slope = u.gradient_sup();
        cfl * self.grid().spacing() / slope.max(1.0)
    }

    fn finish(&self, mut u: SpectralField, prev: &SpectralField) -> Result<SpectralField> {
        if !is_finite(&u) {
            return Err(blow_up(prev, "non-finite coefficients after step"));
        }
        u.project_real_mean_zero();
        Ok(u)
    }

    /// One ETDRK2 step.
    pub fn step(&self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        if !(dt > 0.0) {
            return Err(MuskatError::precondition(format!("time step must be positive, got {dt}")));
        }
        let fu = self.forcing(u)?;
        let phis: Vec<(f64, f64, f64)> = self
            .symbol
            .iter()
            .map(|&l| {
                let z = l * dt;
                let (p1, p2) = phi_functions(z);
                (z.exp(), p1, p2)
            })
            .collect();
        let mut a = u.clone();
        for ((ac, (e, p1, _)), f) in a.coeffs_mut().iter_mut().zip(&phis).zip(fu.coeffs()) {
            *ac = *ac * e + f * (p1 * dt);
        }
        if self.linear_only {
            return self.finish(a, u);
        }
        let fa = self.forcing(&a)?;
        let mut next = a;
        for (((nc, (_, _, p2)), fa), fu) in next
            .coeffs_mut()
            .iter_mut()
            .zip(&phis)
            .zip(fa.coeffs())
            .zip(fu.coeffs())
        {
            *nc += (fa - fu) * (p2 * dt);
        }
        self.finish(next, u)
    }

    /// One classical RK4 step on the full tendency.
    pub fn step_rk4(&self, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        if !(dt > 0.0) {
            return Err(MuskatError::precondition(format!("time step must be positive, got {dt}")));
        }
        let axpy = |x: &SpectralField, k: &SpectralField, h: f64| -> SpectralField {
            let coeffs: Vec<Complex64> =
                x.coeffs().iter().zip(k.coeffs()).map(|(a, b)| a + b * h).collect();
            SpectralField::from_coeffs(*x.grid(), coeffs).expect("same grid")
        };
        let k1 = self.tendency(u)?;
        let k2 = self.tendency(&axpy(u, &k1, 0.5 * dt))?;
        let k3 = self.tendency(&axpy(u, &k2, 0.5 * dt))?;
        let k4 = self.tendency(&axpy(u, &k3, dt))?;
        let coeffs = (0..u.coeffs().len())
            .map(|i| {
                u.coeffs()[i]
                    + (k1.coeffs()[i] + 2.0 * k2.coeffs()[i] + 2.0 * k3.coeffs()[i] + k4.coeffs()[i])
                        * (dt / 6.0)
            })
            .collect();
        self.finish(SpectralField::from_coeffs(*u.grid(), coeffs)?, u)
    }

    pub fn step_with(&self, scheme: Scheme, u: &SpectralField, dt: f64) -> Result<SpectralField> {
        match scheme {
            Scheme::Etdrk2 => self.step(u, dt),
            Scheme::Rk4 => self.step_rk4(u, dt),
        }
    }
}
