//! Linear-semigroup norms on the frequency continuum, power-law fits and a
//! checker for the decay lemma `d/dt ||g||_mu <= -C ||g||_{mu+1}`.
//!
//! The profile `|g_0^|(r) = A r^a e^{-r}` evolves to `A r^a e^{-r(1+t)}`, so
//! every norm is a Gamma integral.

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::io::Write;
use std::path::Path;

use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{MuskatError, Result};
use crate::evolve::monitors::diff_ineq_on;
use crate::evolve::{Snapshot, TrajectoryRecord};
use crate::special::integrate_half_line;
use crate::table::sci;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub a: f64,
    pub d: usize,
    pub amplitude: f64,
}

impl RadialProfile {
    pub fn new(a: f64, d: usize, amplitude: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(MuskatError::precondition(format!("profile dimension must be 1 or 2, got {d}")));
        }
        if !(a.is_finite() && a + d as f64 > 0.0) {
            return Err(MuskatError::precondition(format!("need a + d > 0, got a = {a}, d = {d}")));
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(MuskatError::precondition("profile amplitude must be positive"));
        }
        Ok(Self { a, d, amplitude })
    }

    /// Area of the unit sphere in the frequency space: 2 or 2 pi.
    pub fn sphere(&self) -> f64 {
        if self.d == 1 {
            2.0
        } else {
            2.0 * PI
        }
    }

    /// Besov endpoint `-a-d`, where the weighted annulus mass stays bounded.
    pub fn endpoint(&self) -> f64 {
        -(self.a + self.d as f64)
    }

    fn exponent(&self, s: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(MuskatError::precondition(format!("time must be >= 0, got {t}")));
        }
        let p = s + self.a + self.d as f64;
        if !(p > 0.0) {
            return Err(MuskatError::precondition(format!(
                "norm diverges: s + a + d = {p} <= 0"
            )));
        }
        Ok(p)
    }
}

/// `||e^{-t Lambda} g_0||_s = A sigma_d Gamma(p) (1+t)^{-p}`, `p = s+a+d`.
pub fn semigroup_norm_closed(profile: &RadialProfile, s: f64, t: f64) -> Result<f64> {
    let p = profile.exponent(s, t)?;
    Ok(profile.amplitude * profile.sphere() * gamma(p) * (1.0 + t).powf(-p))
}

/// Same norm by adaptive quadrature of `A sigma_d int r^{p-1} e^{-r(1+t)} dr`.
pub fn semigroup_norm_quadrature(profile: &RadialProfile, s: f64, t: f64) -> Result<f64> {
    let p = profile.exponent(s, t)?;
    let rate = 1.0 + t;
    let (value, err) = integrate_half_line(|r| r.powf(p - 1.0) * (-r * rate).exp(), 1e-12);
    if !(value.is_finite() && err <= 1e-8 * value.abs()) {
        return Err(MuskatError::Invariant(format!(
            "radial quadrature did not converge (value {value}, error {err})"
        )));
    }
    Ok(profile.amplitude * profile.sphere() * value)
}

/// `sup_j 2^{j nu} int_{annulus j} |g^|` for the evolved profile.
pub fn semigroup_besov_sup(profile: &RadialProfile, nu: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(MuskatError::precondition(format!("time must be >= 0, got {t}")));
    }
    let p = nu + profile.a + profile.d as f64;
    let scale = profile.amplitude * profile.sphere();
    if p.abs() < 1e-12 {
        // Each annulus carries int_{x/2}^{x} e^{-u}/u du, increasing to ln 2 as x -> 0.
        return Ok(scale * LN_2);
    }
    if p < 0.0 {
        return Err(MuskatError::precondition(format!(
            "Besov norm diverges below the endpoint: nu = {nu} < {}",
            profile.endpoint()
        )));
    }
    // Annulus masses through the regularized lower incomplete gamma of a+d.
    let rate = 1.0 + t;
    let q = profile.a + profile.d as f64;
    let gq = gamma(q);
    let mut best: f64 = 0.0;
    for j in -60..=60 {
        let hi = (j as f64).exp2();
        let lo = 0.5 * hi;
        let mass = gq * rate.powf(-q) * (gamma_lr(q, hi * rate) - gamma_lr(q, lo * rate));
        best = best.max(hi.powf(nu) * mass);
    }
    Ok(scale * best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares slope of `ln v` against `ln(1+t)` on the window, which
/// defaults to the last decade `[t_end/10, t_end]`.
pub fn fit_exponent(times: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(MuskatError::precondition("times and values differ in length"));
    }
    let t_end = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = window.unwrap_or((t_end / 10.0, t_end));
    if !(lo < hi) {
        return Err(MuskatError::precondition(format!("empty fit window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0) {
            return Err(MuskatError::precondition(format!("non-positive value {v} at t = {t}")));
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < 10 {
        return Err(MuskatError::precondition(format!(
            "fit needs >= 10 samples in [{lo}, {hi}], found {n}"
        )));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy <= 1e-300 {
        1.0
    } else {
        let res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (1.0 - res / syy).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        window: (lo, hi),
        samples: n,
    })
}

/// One row of a fit report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub s: f64,
    pub nu: f64,
    pub fit: FitResult,
    pub expected_slope: f64,
}

pub const FIT_HEADER: &str = "s,nu,slope,expected_slope,r2,window_lo,window_hi";

pub fn write_fit_csv<W: Write>(rows: &[FitRow], mut out: W) -> Result<()> {
    writeln!(out, "{FIT_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sci(r.s),
            sci(r.nu),
            sci(r.fit.slope),
            sci(r.expected_slope),
            sci(r.fit.r2),
            sci(r.fit.window.0),
            sci(r.fit.window.1)
        )?;
    }
    Ok(())
}

pub fn save_fit_csv(rows: &[FitRow], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_fit_csv(rows, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Logarithmically spaced times from 0 to `t_end` (first sample at 0).
pub fn log_times(t_end: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| ((1.0 + t_end).ln() * i as f64 / (count - 1) as f64).exp_m1())
        .collect()
}

/// Record of the exact semigroup evolution of `profile`, holding the `s`
/// norms at `mu` and `mu+1` and the Besov sup at `nu`. `linf` is `g(0)`,
/// the sup of a function with positive transform, and the Sobolev column is
/// the `L^2` norm.
pub fn synthetic_record(profile: &RadialProfile, mu: f64, nu: f64, times: &[f64]) -> Result<TrajectoryRecord> {
    let mut rec = TrajectoryRecord::new(vec![mu, mu + 1.0], vec![nu], 0.0);
    let two_p = 2.0 * profile.a + profile.d as f64;
    for (i, &t) in times.iter().enumerate() {
        let l2 = profile.amplitude
            * ((2.0 * PI).powi(profile.d as i32) * profile.sphere() * gamma(two_p)
                / (2.0 * (1.0 + t)).powf(two_p))
            .sqrt();
        rec.push(
            Snapshot {
                t,
                linf: semigroup_norm_closed(profile, 0.0, t)?,
                s_norms: vec![
                    semigroup_norm_closed(profile, mu, t)?,
                    semigroup_norm_closed(profile, mu + 1.0, t)?,
                ],
                besov: vec![semigroup_besov_sup(profile, nu, t)?],
                sobolev: l2,
                dt: if i == 0 { 0.0 } else { t - times[i - 1] },
            },
            i,
        )?;
    }
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayLemmaReport {
    pub mu: f64,
    pub nu: f64,
    pub c: f64,
    /// Finite-difference check of `d/dt ||g||_mu <= -C ||g||_{mu+1}`.
    pub hypothesis_ok: bool,
    pub empirical_c: f64,
    pub besov_sup: f64,
    pub besov_ok: bool,
    /// `sup_t (1+t)^{mu-nu} ||g||_mu(t)` and where it is attained.
    pub weighted_sup: f64,
    pub argmax_t: f64,
    pub bound: f64,
    /// The weighted series is bounded by `bound` and not growing at the end.
    pub conclusion: bool,
}

impl DecayLemmaReport {
    /// The lemma's implication holds on this record.
    pub fn consistent(&self) -> bool {
        !(self.hypothesis_ok && self.besov_ok) || self.conclusion
    }
}

pub fn decay_lemma_check(
    record: &TrajectoryRecord,
    mu: f64,
    nu: f64,
    c: f64,
    besov_bound: f64,
    bound: f64,
) -> Result<DecayLemmaReport> {
    if !(nu < mu) {
        return Err(MuskatError::precondition(format!("need nu < mu, got nu = {nu}, mu = {mu}")));
    }
    let missing = |what: String| MuskatError::precondition(format!("record has no {what} series"));
    let g = record.series(mu).ok_or_else(|| missing(format!("s={mu}")))?;
    let g1 = record.series(mu + 1.0).ok_or_else(|| missing(format!("s={}", mu + 1.0)))?;
    let b = record.besov_series(nu).ok_or_else(|| missing(format!("besov_nu={nu}")))?;
    let hyp = diff_ineq_on(&record.times, g, g1, mu, c)?;
    let besov_sup = b.iter().copied().fold(0.0, f64::max);

    let weighted: Vec<f64> = record
        .times
        .iter()
        .zip(g)
        .map(|(t, v)| (1.0 + t).powf(mu - nu) * v)
        .collect();
    let (imax, &weighted_sup) = weighted
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("record has snapshots");
    let t_last = *record.times.last().expect("record has snapshots");
    let mid = record
        .times
        .iter()
        .position(|&t| t >= 0.5 * t_last)
        .unwrap_or(0);
    let w_last = *weighted.last().expect("record has snapshots");
    let growing = w_last > weighted[mid] * (1.0 + 1e-6);
    Ok(DecayLemmaReport {
        mu,
        nu,
        c,
        hypothesis_ok: hyp.passed,
        empirical_c: hyp.empirical_c,
        besov_sup,
        besov_ok: besov_sup <= besov_bound,
        weighted_sup,
        argmax_t: record.times[imax],
        bound,
        conclusion: weighted_sup.is_finite() && weighted_sup <= bound && !growing,
    })
}
