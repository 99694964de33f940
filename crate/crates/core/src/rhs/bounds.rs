//! Fourier majorant of the nonlinearity against its quadrature value.

use super::{NonlocalOperator, QuadratureConfig};
use crate::error::{MuskatError, Result};
use crate::series::{nonlinearity_majorant, MuskatDim};
use crate::spectral::RealField;

/// Relative allowance for quadrature error on the left-hand side.
pub const BOUND_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBoundReport {
    pub s: f64,
    /// `sum |k|^s |F(nonlinearity)_k|`.
    pub lhs: f64,
    /// Majorant series in `||f||_1` times `||f||_(s+1)`.
    pub rhs: f64,
    pub holds: bool,
}

impl NonlocalOperator {
    pub fn bound_report(&self, f: &RealField, s: f64, max_n: usize) -> Result<FourierBoundReport> {
        if !(s >= 0.0) {
            return Err(MuskatError::precondition(format!("bound exponent must be >= 0, got {s}")));
        }
        let spec = self.fourier().analyze(f)?;
        let x = spec.s_norm(1.0)?;
        if x >= 1.0 {
            return Err(MuskatError::precondition(format!(
                "majorant diverges: ||f||_1 = {x} >= 1"
            )));
        }
        let dim = MuskatDim::from_interface_dim(self.grid().dim())?;
        let factor = nonlinearity_majorant(dim, s, x, max_n)?.upper();
        let rhs = factor * spec.s_norm(s + 1.0)?;
        let lhs = self.nonlinearity_spectral(&spec)?.s_norm(s)?;
        Ok(FourierBoundReport {
            s,
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + BOUND_SLACK),
        })
    }
}

/// Compares `sum |k|^s |F(T or N)|` with its majorant for one field.
pub fn fourier_bound_report(
    f: &RealField,
    s: f64,
    quad: &QuadratureConfig,
    max_n: usize,
) -> Result<FourierBoundReport> {
    NonlocalOperator::new(*f.grid(), *quad)?.bound_report(f, s, max_n)
}
