//! Self-check suites at fixed seeds, one PASS/FAIL line per check.

use std::fmt;
use std::str::FromStr;

use crate::decay::{
    decay_lemma_check, fit_exponent, log_times, semigroup_norm_closed, semigroup_norm_quadrature,
    synthetic_record, RadialProfile,
};
use crate::error::{MuskatError, Result};
use crate::evolve::{initial_spectrum, InitialDataSpec};
use crate::rhs::{NonlocalOperator, QuadratureConfig, SingularRule};
use crate::series::{
    admissibility_value, admissible_constant, closed_form_majorant, dissipation_constant,
    majorant_series, two_d_closed_form, MuskatDim,
};
use crate::spectral::{check_interpolation, Fourier, GridSpec, Lp, RealField, SpectralField};
use crate::table::sci;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.name)?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Norms,
    Rhs,
    Bounds,
    Decay,
    All,
}

impl FromStr for Suite {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norms" => Ok(Suite::Norms),
            "rhs" => Ok(Suite::Rhs),
            "bounds" => Ok(Suite::Bounds),
            "decay" => Ok(Suite::Decay),
            "all" => Ok(Suite::All),
            other => Err(MuskatError::config(format!(
                "unknown suite '{other}' (norms, rhs, bounds, decay, all)"
            ))),
        }
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Norms => norms_suite(200, 0)?,
        Suite::Rhs => rhs_suite()?,
        Suite::Bounds => bounds_suite(20, 0)?,
        Suite::Decay => decay_suite()?,
        Suite::All => {
            let mut all = norms_suite(200, 0)?;
            all.extend(rhs_suite()?);
            all.extend(bounds_suite(20, 0)?);
            all.extend(decay_suite()?);
            all
        }
    })
}

/// Random mean-zero real field on the band `1 <= |m| <= k_max` with
/// `||f||_1` drawn from `(0, max_amplitude]`; deterministic in `seed`.
pub fn random_field(grid: &GridSpec, k_max: u32, max_amplitude: f64, seed: u64) -> Result<SpectralField> {
    let amp = max_amplitude * (0.05 + 0.95 * unit_from_seed(seed));
    initial_spectrum(&InitialDataSpec::random_band(1, k_max, amp, seed), grid)
}

fn unit_from_seed(seed: u64) -> f64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Worst-case violations of the norm inequalities over one field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NormViolations {
    pub round_trip: f64,
    pub besov: f64,
    pub interpolation: f64,
    pub sup: f64,
    pub gradient: f64,
    pub scaling: f64,
    pub parseval: f64,
}

impl NormViolations {
    fn merge(&mut self, o: &Self) {
        self.round_trip = self.round_trip.max(o.round_trip);
        self.besov = self.besov.max(o.besov);
        self.interpolation = self.interpolation.max(o.interpolation);
        self.sup = self.sup.max(o.sup);
        self.gradient = self.gradient.max(o.gradient);
        self.scaling = self.scaling.max(o.scaling);
        self.parseval = self.parseval.max(o.parseval);
    }
}

/// Relative excesses `lhs/rhs - 1` (clamped at 0) and relative errors for one field.
pub fn norm_violations(fourier: &Fourier, spec: &SpectralField) -> Result<NormViolations> {
    let field = fourier.synthesize(spec)?;
    let back = fourier.synthesize(&fourier.analyze(&field)?)?;
    let scale = field.max_abs().max(f64::MIN_POSITIVE);
    let round_trip = field
        .samples()
        .iter()
        .zip(back.samples())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale;
    let excess = |lhs: f64, rhs: f64| ((lhs - rhs) / rhs).max(0.0);
    let mut besov: f64 = 0.0;
    for s in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        besov = besov.max(excess(spec.besov_norm(s)?.sup, spec.s_norm(s)?));
    }
    let mut interpolation: f64 = 0.0;
    for (mu1, s, mu2) in [(0.0, 1.0, 2.0), (1.0, 1.5, 3.0), (-1.0, 0.3, 2.0)] {
        let r = check_interpolation(spec, mu1, mu2, s)?;
        interpolation = interpolation.max(excess(r.lhs, r.rhs));
    }
    let sup = excess(field.lp_norm(Lp::Inf), spec.s_norm(0.0)?);
    let gradient = excess(spec.gradient_sup(), spec.s_norm(1.0)?);
    let alpha = -2.75;
    let scaling = ((spec.scaled(alpha).s_norm(1.0)? - alpha.abs() * spec.s_norm(1.0)?)
        / spec.s_norm(1.0)?)
    .abs();
    let l2 = field.lp_norm(Lp::Two);
    let parseval = ((spec.sobolev_norm(0.0) - l2) / l2).abs();
    Ok(NormViolations {
        round_trip,
        besov,
        interpolation,
        sup,
        gradient,
        scaling,
        parseval,
    })
}

/// Checks the constant-1 norm inequalities on `count` random fields per dimension.
pub fn norms_suite(count: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (d, n, k_max) in [(1usize, 128usize, 20u32), (2, 32, 10)] {
        let grid = GridSpec::periodic_2pi(d, n)?;
        let fourier = Fourier::new(grid);
        let mut worst = NormViolations::default();
        for i in 0..count as u64 {
            let spec = random_field(&grid, k_max, 1.0, seed.wrapping_mul(1_000_003) + i)?;
            worst.merge(&norm_violations(&fourier, &spec)?);
        }
        let tag = format!("d={d} fields={count}");
        let zero_tol = 1e-13;
        out.push(Check::new(
            "norms.round_trip",
            worst.round_trip <= 1e-12,
            format!("{tag} max_rel={}", sci(worst.round_trip)),
        ));
        for (name, v) in [
            ("norms.besov_le_s_norm", worst.besov),
            ("norms.interpolation", worst.interpolation),
            ("norms.sup_le_s0", worst.sup),
            ("norms.gradient_le_s1", worst.gradient),
        ] {
            out.push(Check::new(name, v <= zero_tol, format!("{tag} max_excess={}", sci(v))));
        }
        out.push(Check::new(
            "norms.scaling",
            worst.scaling <= 1e-13,
            format!("{tag} max_rel={}", sci(worst.scaling)),
        ));
        out.push(Check::new(
            "norms.parseval",
            worst.parseval <= 1e-10,
            format!("{tag} max_rel={}", sci(worst.parseval)),
        ));
    }
    Ok(out)
}

/// Observed order `log2(coarse/fine)` of a halving refinement; residuals
/// already at the roundoff `floor` count as converged.
pub fn refinement_order(coarse: f64, fine: f64, floor: f64) -> (f64, bool) {
    let order = (coarse / fine).log2();
    (order, coarse <= floor && fine <= floor)
}

/// `max|full - split|` for `amp cos(x)` (or `amp (cos x1 + cos x2)`).
pub fn cosine_residual(d: usize, n: usize, amp: f64, quad: QuadratureConfig) -> Result<(f64, f64)> {
    let grid = GridSpec::periodic_2pi(d, n)?;
    let f = RealField::from_fn(grid, |x| {
        amp * if d == 1 { x[0].cos() } else { x[0].cos() + x[1].cos() }
    })?;
    let op = NonlocalOperator::new(grid, quad)?;
    let res = op.consistency_residual(&f)?;
    let scale = op.full_rhs(&f)?.max_abs();
    Ok((res, scale))
}

pub fn rhs_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let quad = QuadratureConfig::default();
    let (r1, scale) = cosine_residual(1, 128, 0.1, quad)?;
    let (r2, _) = cosine_residual(1, 256, 0.1, quad)?;
    let (order, converged) = refinement_order(r1, r2, 1e-11 * scale);
    out.push(Check::new(
        "rhs.split_identity_d=1",
        converged || order >= 2.0,
        format!("residual_128={} residual_256={} order={order:.2}", sci(r1), sci(r2)),
    ));
    let (c1, _) = cosine_residual(2, 16, 0.1, quad)?;
    let (c2, _) = cosine_residual(2, 32, 0.1, quad)?;
    let (order, converged) = refinement_order(c1, c2, 1e-11);
    out.push(Check::new(
        "rhs.split_identity_d=2",
        converged || order >= 1.5,
        format!("residual_16={} residual_32={} order={order:.2}", sci(c1), sci(c2)),
    ));

    // Cubic smallness of the nonlinearity.
    let grid = GridSpec::periodic_2pi(1, 64)?;
    let op = NonlocalOperator::new(grid, quad)?;
    let eps = [1e-1, 1e-2, 1e-3];
    let mut logs = Vec::new();
    for e in eps {
        let f = RealField::from_fn(grid, |x| e * (x[0].cos() + 0.5 * (2.0 * x[0]).sin()))?;
        logs.push(op.nonlinearity(&f)?.max_abs().ln());
    }
    let slope = (logs[0] - logs[2]) / (eps[0].ln() - eps[2].ln());
    out.push(Check::new(
        "rhs.cubic_smallness",
        (slope - 3.0).abs() <= 0.3,
        format!("exponent={slope:.4}"),
    ));

    let cell = QuadratureConfig {
        singular_rule: Some(SingularRule::CellExclusion),
        ..quad
    };
    let (e1, _) = cosine_residual(2, 16, 0.1, cell)?;
    let (e2, _) = cosine_residual(2, 32, 0.1, cell)?;
    let (order, _) = refinement_order(e1, e2, 0.0);
    out.push(Check::new(
        "rhs.cell_exclusion_converges",
        order >= 0.8,
        format!("order={order:.2}"),
    ));
    Ok(out)
}

pub fn bounds_suite(count: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let three = admissibility_value(MuskatDim::Three, 0.01, 0.2, 200);
    out.push(Check::new(
        "bounds.constant_3d",
        three.upper() <= 1.0 && three.tail_bound < 1e-12,
        format!("value={} tail={}", sci(three.partial_sum), sci(three.tail_bound)),
    ));
    let kstar = admissible_constant(MuskatDim::Three, 0.01, 1e-10)?;
    out.push(Check::new("bounds.kstar_3d", kstar > 0.2, format!("k*={kstar:.6}")));
    let two = admissibility_value(MuskatDim::Two, 0.001, 1.0 / 3.0, 500);
    let closed = two_d_closed_form(1.0 / 3.0)?;
    out.push(Check::new(
        "bounds.constant_2d",
        two.upper() <= 1.0 && (closed - 0.8125).abs() < 1e-12,
        format!("value={} closed_delta0={}", sci(two.upper()), sci(closed)),
    ));
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.2, 0.3, 0.5] {
        worst = worst.max((majorant_series(x, 500).upper() - closed_form_majorant(x)?).abs());
    }
    out.push(Check::new(
        "bounds.majorant_identity",
        worst <= 1e-10,
        format!("max_abs_err={}", sci(worst)),
    ));
    let c0 = dissipation_constant(MuskatDim::Three, 0.2)?;
    out.push(Check::new(
        "bounds.dissipation_constant",
        (c0 - 0.384).abs() <= 1e-3,
        format!("C0={c0:.6}"),
    ));

    for (d, n, k_max) in [(1usize, 128usize, 8u32), (2, 16, 4)] {
        let grid = GridSpec::periodic_2pi(d, n)?;
        let op = NonlocalOperator::new(grid, QuadratureConfig::default())?;
        let mut failures = 0;
        let mut worst_ratio: f64 = 0.0;
        for i in 0..count as u64 {
            let spec = random_field(&grid, k_max, 0.15, seed.wrapping_mul(7919) + i)?;
            let field = op.fourier().synthesize(&spec)?;
            for s in [1.0, 2.0] {
                let r = op.bound_report(&field, s, 500)?;
                worst_ratio = worst_ratio.max(r.lhs / r.rhs);
                if !r.holds {
                    failures += 1;
                }
            }
        }
        out.push(Check::new(
            format!("bounds.majorant_sound_d={d}"),
            failures == 0,
            format!("fields={count} failures={failures} max_lhs_over_rhs={worst_ratio:.4}"),
        ));
    }
    Ok(out)
}

pub fn decay_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let times: Vec<f64> = (0..60).map(|i| 10.0 * 100f64.powf(i as f64 / 59.0)).collect();
    let mut worst_slope: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for d in [1usize, 2] {
        for a in [0.0, 1.0] {
            let profile = RadialProfile::new(a, d, 1.0)?;
            for s in [0.0, 1.0, 2.0] {
                let v = times
                    .iter()
                    .map(|&t| semigroup_norm_closed(&profile, s, t))
                    .collect::<Result<Vec<_>>>()?;
                let fit = fit_exponent(&times, &v, Some((10.0, 1000.0)))?;
                let expected = -(s + a + d as f64);
                worst_slope = worst_slope.max(((fit.slope - expected) / expected).abs());
                for t in [0.0, 10.0, 1000.0] {
                    let c = semigroup_norm_closed(&profile, s, t)?;
                    let q = semigroup_norm_quadrature(&profile, s, t)?;
                    worst_quad = worst_quad.max(((q - c) / c).abs());
                }
            }
        }
    }
    out.push(Check::new(
        "decay.semigroup_slopes",
        worst_slope <= 0.01,
        format!("max_rel_err={}", sci(worst_slope)),
    ));
    out.push(Check::new(
        "decay.gamma_identity",
        worst_quad <= 1e-6,
        format!("max_rel_err={}", sci(worst_quad)),
    ));

    let profile = RadialProfile::new(1.0, 1, 1.0)?;
    let (mu, nu) = (1.0, profile.endpoint());
    let rec = synthetic_record(&profile, mu, nu, &log_times(1000.0, 400))?;
    let b0 = rec.besov[0][0];
    let rep = decay_lemma_check(&rec, mu, nu, 0.99, 3.0 * b0, 1e3)?;
    out.push(Check::new(
        "decay.lemma_semigroup",
        rep.hypothesis_ok && rep.besov_ok && rep.conclusion,
        format!("weighted_sup={} empirical_c={:.6}", sci(rep.weighted_sup), rep.empirical_c),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_lines() {
        assert_eq!(Check::new("a.b", true, "x=1").to_string(), "PASS a.b x=1");
        assert_eq!(Check::new("a.b", false, "").to_string(), "FAIL a.b");
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = GridSpec::periodic_2pi(1, 64).unwrap();
        let a = random_field(&g, 8, 0.15, 3).unwrap();
        assert_eq!(a, random_field(&g, 8, 0.15, 3).unwrap());
        let x = a.s_norm(1.0).unwrap();
        assert!(x > 0.0 && x <= 0.15 + 1e-15);
    }

    #[test]
    fn small_norm_and_decay_suites_pass() {
        for c in norms_suite(5, 1).unwrap().into_iter().chain(decay_suite().unwrap()) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn roundoff_floor_counts_as_converged() {
        assert!(refinement_order(1e-16, 2e-16, 1e-12).1);
        let (order, conv) = refinement_order(4e-3, 1e-3, 1e-12);
        assert!((order - 2.0).abs() < 1e-12 && !conv);
    }
}
