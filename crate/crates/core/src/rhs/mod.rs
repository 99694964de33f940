//! The nonlocal Muskat right-hand side by direct quadrature, and its split
//! into the dissipative part `-Lambda f` and a cubic nonlinearity.
//!
//! With the density jump `rho` (default 2) the curve problem (`d = 1`) reads
//!
//! ```text
//! f_t = rho/(2 pi) int (f'(x) - f'(x-a)) a / (a^2 + (f(x) - f(x-a))^2) da
//!     = rho/2 (-Lambda f - T(f))
//! ```
//!
//! and the surface problem (`d = 2`)
//!
//! ```text
//! f_t = rho/(4 pi) PV int (grad f(x) - grad f(x-y)) . y / (|y|^2 + (f(x) - f(x-y))^2)^(3/2) dy
//!     = rho/2 (-Lambda f - N(f)).
//! ```
//!
//! Integrals run over the periodic extension of `f` on a disc of radius
//! `M L / 2`, damped by a smooth radial window. The part of the linear kernel
//! removed by the window is restored exactly in Fourier space; the nonlinear
//! far field (decaying like `|y|^-(d+2)`) is neglected.

mod bounds;
mod farfield;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{MuskatError, Result};
use crate::special::RadialWindow;
use crate::spectral::{Fourier, GridSpec, RealField, SpectralField};
use farfield::LATTICE_HARMONICS;

pub use bounds::{fourier_bound_report, FourierBoundReport, BOUND_SLACK};

/// Treatment of the kernel singularity at zero separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularRule {
    /// `d = 1`: the integrand has a finite limit, evaluated from spectral derivatives.
    RemovableLimit,
    /// `d = 2`: the node at `y = 0` is dropped (first order in the spacing).
    CellExclusion,
    /// `d = 2`: cell exclusion plus the lattice-sum correction of the
    /// `O(1/|y|)` part of the integrand (third order).
    CorrectedExclusion,
}

impl SingularRule {
    pub fn default_for(d: usize) -> Self {
        if d == 1 {
            SingularRule::RemovableLimit
        } else {
            SingularRule::CorrectedExclusion
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SingularRule::RemovableLimit => "removable-limit",
            SingularRule::CellExclusion => "cell-exclusion",
            SingularRule::CorrectedExclusion => "corrected-exclusion",
        }
    }
}

impl fmt::Display for SingularRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SingularRule {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "removable-limit" => Ok(SingularRule::RemovableLimit),
            "cell-exclusion" => Ok(SingularRule::CellExclusion),
            "corrected-exclusion" => Ok(SingularRule::CorrectedExclusion),
            other => Err(MuskatError::config(format!(
                "unknown singular rule '{other}' (removable-limit, cell-exclusion, corrected-exclusion)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Periodic images per side; the integration radius is `image_count * L / 2`.
    pub image_count: usize,
    /// `None` picks the dimension's default.
    pub singular_rule: Option<SingularRule>,
    /// Density jump `rho_2 - rho_1`.
    pub rho_jump: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            image_count: 3,
            singular_rule: None,
            rho_jump: 2.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_images(image_count: usize) -> Self {
        Self {
            image_count,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.image_count < 1 {
            return Err(MuskatError::config("quad.image_count must be at least 1"));
        }
        if !(self.rho_jump.is_finite() && self.rho_jump > 0.0) {
            return Err(MuskatError::config(format!(
                "density jump must be positive (stable regime), got {}",
                self.rho_jump
            )));
        }
        Ok(())
    }

    pub fn rule_for(&self, d: usize) -> Result<SingularRule> {
        let rule = self.singular_rule.unwrap_or_else(|| SingularRule::default_for(d));
        let ok = match rule {
            SingularRule::RemovableLimit => d == 1,
            _ => d == 2,
        };
        if ok {
            Ok(rule)
        } else {
            Err(MuskatError::config(format!("singular rule {rule} does not apply to d = {d}")))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    offset: [usize; 2],
    y: [f64; 2],
    r2: f64,
    inv_r: f64,
    weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Full,
    Nonlinear,
}

/// Pointwise data the kernels read: samples, gradient and second derivatives.
struct Local {
    f: Vec<f64>,
    grad: [Vec<f64>; 2],
    /// `f''` for `d = 1`; `(f_11, f_12, f_22)` for `d = 2`.
    hess: [Vec<f64>; 3],
}

const ANGLES: usize = 64;

/// Precomputed quadrature for one grid and configuration.
#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    grid: GridSpec,
    quad: QuadratureConfig,
    rule: SingularRule,
    fourier: Fourier,
    nodes: Vec<Node>,
    /// `|k| (1 - W(|k|))` per mode: the linear symbol outside the window.
    tail: Vec<f64>,
    directions: Vec<[f64; 2]>,
    cosines: Vec<[f64; LATTICE_HARMONICS]>,
}

impl NonlocalOperator {
    pub fn new(grid: GridSpec, quad: QuadratureConfig) -> Result<Self> {
        quad.validate()?;
        let rule = quad.rule_for(grid.dim())?;
        let window = RadialWindow::new(quad.image_count as f64 * grid.length() / 2.0);
        let nodes = build_nodes(&grid, &window);
        let tail = build_tail(&grid, &window);
        let (directions, cosines) = if rule == SingularRule::CorrectedExclusion {
            (0..ANGLES)
                .map(|q| {
                    let th = PI * q as f64 / ANGLES as f64;
                    let cos: [f64; LATTICE_HARMONICS] =
                        std::array::from_fn(|j| (4.0 * j as f64 * th).cos());
                    ([th.cos(), th.sin()], cos)
                })
                .unzip()
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            grid,
            quad,
            rule,
            fourier: Fourier::new(grid),
            nodes,
            tail,
            directions,
            cosines,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn rule(&self) -> SingularRule {
        self.rule
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    /// Number of quadrature nodes per output point (excluding the centre).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `rho / 2`, the rate of the linear semigroup `exp(-rho/2 Lambda t)`.
    pub fn linear_rate(&self) -> f64 {
        0.5 * self.quad.rho_jump
    }

    fn check_grid(&self, f: &RealField) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(MuskatError::config("field grid does not match the operator grid"));
        }
        Ok(())
    }

    fn local(&self, spec: &SpectralField) -> Result<Local> {
        let f = self.fourier.synthesize(spec)?.into_samples();
        let inv = |s: SpectralField| self.fourier.inverse_real(s.coeffs());
        let empty = Vec::new;
        Ok(if self.grid.dim() == 1 {
            Local {
                f,
                grad: [inv(spec.derivative(0)), empty()],
                hess: [inv(spec.second_derivative(0, 0)), empty(), empty()],
            }
        } else {
            let corrected = self.rule == SingularRule::CorrectedExclusion;
            let second = |a, b| {
                if corrected {
                    inv(spec.second_derivative(a, b))
                } else {
                    empty()
                }
            };
            Local {
                f,
                grad: [inv(spec.derivative(0)), inv(spec.derivative(1))],
                hess: [second(0, 0), second(0, 1), second(1, 1)],
            }
        })
    }

    /// The full right-hand side at the samples of `f`.
    pub fn full_rhs(&self, f: &RealField) -> Result<RealField> {
        self.check_grid(f)?;
        let spec = self.fourier.analyze(f)?;
        let local = self.local(&spec)?;
        let scale = if self.grid.dim() == 1 {
            self.quad.rho_jump / (2.0 * PI)
        } else {
            self.quad.rho_jump / (4.0 * PI)
        };
        let near = self.integrate(&local, Kernel::Full);
        let rate = self.linear_rate();
        let mut far = spec.clone();
        for (c, t) in far.coeffs_mut().iter_mut().zip(&self.tail) {
            *c *= -rate * t;
        }
        let far = self.fourier.inverse_real(far.coeffs());
        let samples = near.iter().zip(&far).map(|(a, b)| scale * a + b).collect();
        RealField::new(self.grid, samples)
    }

    /// `T(f)` for `d = 1`, `N(f)` for `d = 2`, at the grid samples.
    pub fn nonlinearity(&self, f: &RealField) -> Result<RealField> {
        self.check_grid(f)?;
        let spec = self.fourier.analyze(f)?;
        RealField::new(self.grid, self.nonlinear_samples(&spec)?)
    }

    /// Fourier coefficients of the nonlinearity of a spectral state.
    pub fn nonlinearity_spectral(&self, spec: &SpectralField) -> Result<SpectralField> {
        if spec.grid() != &self.grid {
            return Err(MuskatError::config("field grid does not match the operator grid"));
        }
        let samples = self.nonlinear_samples(spec)?;
        SpectralField::from_coeffs(self.grid, self.fourier.forward(&samples))
    }

    fn nonlinear_samples(&self, spec: &SpectralField) -> Result<Vec<f64>> {
        let local = self.local(spec)?;
        let scale = if self.grid.dim() == 1 { 1.0 / PI } else { 0.5 / PI };
        let mut out = self.integrate(&local, Kernel::Nonlinear);
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }

    /// `rho/2 (-Lambda f - nonlinearity)`, with `Lambda` applied spectrally.
    pub fn split_rhs(&self, f: &RealField) -> Result<RealField> {
        self.check_grid(f)?;
        let spec = self.fourier.analyze(f)?;
        let lin = self.fourier.inverse_real(spec.map_radial(|k| k).coeffs());
        let nl = self.nonlinear_samples(&spec)?;
        let rate = self.linear_rate();
        let samples = lin.iter().zip(&nl).map(|(l, n)| -rate * (l + n)).collect();
        RealField::new(self.grid, samples)
    }

    /// `max |full_rhs(f) - split_rhs(f)|`.
    pub fn consistency_residual(&self, f: &RealField) -> Result<f64> {
        let a = self.full_rhs(f)?;
        let b = self.split_rhs(f)?;
        Ok(a.samples()
            .iter()
            .zip(b.samples())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }

    fn integrate(&self, local: &Local, kernel: Kernel) -> Vec<f64> {
        let len = self.grid.len();
        if self.grid.dim() == 1 {
            (0..len).into_par_iter().map(|i| self.point_1d(local, kernel, i)).collect()
        } else {
            (0..len).into_par_iter().map(|i| self.point_2d(local, kernel, i)).collect()
        }
    }

    fn point_1d(&self, local: &Local, kernel: Kernel, i: usize) -> f64 {
        let n = self.grid.n();
        let mask = n - 1;
        let (f, g) = (&local.f, &local.grad[0]);
        let (f0, g0, c0) = (f[i], g[i], local.hess[0][i]);
        let mut acc = 0.0;
        match kernel {
            Kernel::Full => {
                for nd in &self.nodes {
                    let j = (i + n - nd.offset[0]) & mask;
                    let df = f0 - f[j];
                    let a = nd.y[0];
                    acc += nd.weight * (g0 - g[j]) * a / (a * a + df * df);
                }
                acc += self.grid.spacing() * c0 / (1.0 + g0 * g0);
            }
            Kernel::Nonlinear => {
                for nd in &self.nodes {
                    let j = (i + n - nd.offset[0]) & mask;
                    let slope = (f0 - f[j]) * nd.inv_r;
                    let s2 = slope * slope;
                    let q = (g0 - g[j]) * nd.y[0].signum() * nd.inv_r;
                    acc += nd.weight * q * s2 / (1.0 + s2);
                }
                acc += self.grid.spacing() * c0 * g0 * g0 / (1.0 + g0 * g0);
            }
        }
        acc
    }

    fn point_2d(&self, local: &Local, kernel: Kernel, i: usize) -> f64 {
        let n = self.grid.n();
        let mask = n - 1;
        let (i1, i2) = (i / n, i % n);
        let f = &local.f;
        let (g1, g2) = (&local.grad[0], &local.grad[1]);
        let (f0, a0, b0) = (f[i], g1[i], g2[i]);
        let mut acc = 0.0;
        match kernel {
            Kernel::Full => {
                for nd in &self.nodes {
                    let j = ((i1 + n - nd.offset[0]) & mask) * n + ((i2 + n - nd.offset[1]) & mask);
                    let df = f0 - f[j];
                    let num = (a0 - g1[j]) * nd.y[0] + (b0 - g2[j]) * nd.y[1];
                    let den = nd.r2 + df * df;
                    acc += nd.weight * num / (den * den.sqrt());
                }
            }
            Kernel::Nonlinear => {
                for nd in &self.nodes {
                    let j = ((i1 + n - nd.offset[0]) & mask) * n + ((i2 + n - nd.offset[1]) & mask);
                    let t = (f0 - f[j]) * nd.inv_r;
                    let num = (a0 - g1[j]) * nd.y[0] + (b0 - g2[j]) * nd.y[1];
                    let inv_r3 = nd.inv_r * nd.inv_r * nd.inv_r;
                    acc += nd.weight * num * inv_r3 * response(t * t);
                }
            }
        }
        if self.rule == SingularRule::CorrectedExclusion {
            let (h11, h12, h22) = (local.hess[0][i], local.hess[1][i], local.hess[2][i]);
            let profile: Vec<f64> = self
                .directions
                .iter()
                .map(|&[c, s]| {
                    let hee = h11 * c * c + 2.0 * h12 * c * s + h22 * s * s;
                    let ge = a0 * c + b0 * s;
                    let q = 1.0 + ge * ge;
                    match kernel {
                        Kernel::Full => hee / (q * q.sqrt()),
                        Kernel::Nonlinear => hee * response(ge * ge),
                    }
                })
                .collect();
            acc -= self.grid.spacing() * farfield::lattice_correction(&profile, &self.cosines);
        }
        acc
    }
}

/// `R(t) = 1 - (1 + t^2)^(-3/2)` as a function of `t^2`, without cancellation.
fn response(t2: f64) -> f64 {
    let s = 1.0 + t2;
    let s32 = s * s.sqrt();
    t2 * (s * s + s + 1.0) / ((s32 + 1.0) * s32)
}

fn build_nodes(grid: &GridSpec, window: &RadialWindow) -> Vec<Node> {
    let n = grid.n() as i64;
    let h = grid.spacing();
    let reach = (window.outer / h).ceil() as i64;
    let mut nodes = Vec::new();
    let offset = |m: i64| m.rem_euclid(n) as usize;
    let (lo2, hi2) = if grid.dim() == 1 { (0, 0) } else { (-reach, reach) };
    for m1 in -reach..=reach {
        for m2 in lo2..=hi2 {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            let y = [m1 as f64 * h, m2 as f64 * h];
            let r = y[0].hypot(y[1]);
            let w = window.value(r);
            if w == 0.0 {
                continue;
            }
            nodes.push(Node {
                offset: [offset(m1), offset(m2)],
                y,
                r2: r * r,
                inv_r: 1.0 / r,
                weight: h.powi(grid.dim() as i32) * w,
            });
        }
    }
    nodes
}

fn build_tail(grid: &GridSpec, window: &RadialWindow) -> Vec<f64> {
    let mut cache: HashMap<i64, f64> = HashMap::new();
    (0..grid.len())
        .map(|i| {
            let m = grid.mode(i);
            let q = m[0] * m[0] + m[1] * m[1];
            let k = grid.wavenumber(i);
            let miss = *cache
                .entry(q)
                .or_insert_with(|| farfield::missing_fraction(grid.dim(), window, k));
            k * miss
        })
        .collect()
}

fn operator_for(f: &RealField, d: usize, quad: &QuadratureConfig) -> Result<NonlocalOperator> {
    if f.grid().dim() != d {
        return Err(MuskatError::config(format!(
            "this operator needs d = {d}, field has d = {}",
            f.grid().dim()
        )));
    }
    NonlocalOperator::new(*f.grid(), *quad)
}

/// Full right-hand side of the curve problem (`d = 1`).
pub fn full_rhs_2d(f: &RealField, quad: &QuadratureConfig) -> Result<RealField> {
    operator_for(f, 1, quad)?.full_rhs(f)
}

/// Full right-hand side of the surface problem (`d = 2`).
pub fn full_rhs_3d(f: &RealField, quad: &QuadratureConfig) -> Result<RealField> {
    operator_for(f, 2, quad)?.full_rhs(f)
}

/// `T(f) = 1/pi int D_a f' (D_a f)^2 / (1 + (D_a f)^2) da`, with `D_a g = (g(x) - g(x-a))/a`.
pub fn nonlinear_t(f: &RealField, quad: &QuadratureConfig) -> Result<RealField> {
    operator_for(f, 1, quad)?.nonlinearity(f)
}

/// `N(f) = 1/(2 pi) int (y/|y|^2) . grad_x D_y f R(D_y f) dy`, with `D_y f = (f(x) - f(x-y))/|y|`.
pub fn nonlinear_n(f: &RealField, quad: &QuadratureConfig) -> Result<RealField> {
    operator_for(f, 2, quad)?.nonlinearity(f)
}

pub fn split_rhs(f: &RealField, quad: &QuadratureConfig) -> Result<RealField> {
    NonlocalOperator::new(*f.grid(), *quad)?.split_rhs(f)
}

pub fn consistency_residual(f: &RealField, quad: &QuadratureConfig) -> Result<f64> {
    NonlocalOperator::new(*f.grid(), *quad)?.consistency_residual(f)
}
