//! Checks of recorded trajectories against the differential inequalities,
//! the maximum principle and the boundedness properties.

use std::fmt;

use super::TrajectoryRecord;
use crate::error::{MuskatError, Result};
use crate::table::sci;

/// Outcome of one monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl fmt::Display for MonitorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} value={} threshold={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            sci(self.value),
            sci(self.threshold)
        )
    }
}

/// Centered derivative on a nonuniform grid at interior snapshot `i`,
/// exact for quadratics, with the second difference and the larger spacing.
pub(crate) fn centered_difference(t: &[f64], v: &[f64], i: usize) -> (f64, f64, f64) {
    let h1 = t[i] - t[i - 1];
    let h2 = t[i + 1] - t[i];
    let denom = h1 * h2 * (h1 + h2);
    let d1 = (h1 * h1 * v[i + 1] - h2 * h2 * v[i - 1] - (h1 * h1 - h2 * h2) * v[i]) / denom;
    let d2 = 2.0 * (h1 * v[i + 1] - (h1 + h2) * v[i] + h2 * v[i - 1]) / denom;
    (d1, d2, h1.max(h2))
}

/// Finite-difference tolerance `max(1e-8, dt^2 |v''| / 2)`.
pub(crate) fn difference_tolerance(d2: f64, spacing: f64) -> f64 {
    (0.5 * spacing * spacing * d2.abs()).max(1e-8)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffIneqReport {
    pub s: f64,
    pub c: f64,
    /// `max_t [d/dt ||f||_s + C ||f||_{s+1}]_+` over interior snapshots.
    pub max_violation: f64,
    /// Largest excess of the violation over its finite-difference tolerance.
    pub max_excess: f64,
    /// `min_t (-d/dt ||f||_s) / ||f||_{s+1}`.
    pub empirical_c: f64,
    pub passed: bool,
}

/// Checks `d/dt ||f||_s <= -C ||f||_{s+1}` along the record.
pub fn monitor_diff_ineq(record: &TrajectoryRecord, s: f64, c: f64) -> Result<DiffIneqReport> {
    let v = record
        .series(s)
        .ok_or_else(|| MuskatError::precondition(format!("record has no s={s} series")))?;
    let w = record
        .series(s + 1.0)
        .ok_or_else(|| MuskatError::precondition(format!("record has no s={} series", s + 1.0)))?;
    diff_ineq_on(&record.times, v, w, s, c)
}

pub(crate) fn diff_ineq_on(t: &[f64], v: &[f64], w: &[f64], s: f64, c: f64) -> Result<DiffIneqReport> {
    if t.len() < 3 {
        return Err(MuskatError::precondition(format!(
            "differential inequality needs >= 3 snapshots, record has {}",
            t.len()
        )));
    }
    let mut max_violation: f64 = 0.0;
    let mut max_excess: f64 = 0.0;
    let mut empirical_c = f64::INFINITY;
    for i in 1..t.len() - 1 {
        let (d1, d2, h) = centered_difference(t, v, i);
        let viol = d1 + c * w[i];
        max_violation = max_violation.max(viol);
        max_excess = max_excess.max(viol - difference_tolerance(d2, h));
        if w[i] > 0.0 {
            empirical_c = empirical_c.min(-d1 / w[i]);
        }
    }
    Ok(DiffIneqReport {
        s,
        c,
        max_violation,
        max_excess,
        empirical_c,
        passed: max_excess <= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleReport {
    pub max_increase: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Largest increase of `||f||_inf` between consecutive snapshots; passes
/// below `1e-6 ||f_0||_inf`.
pub fn monitor_max_principle(record: &TrajectoryRecord) -> MaxPrincipleReport {
    let max_increase = record
        .linf
        .windows(2)
        .map(|p| (p[1] - p[0]).max(0.0))
        .fold(0.0, f64::max);
    let threshold = 1e-6 * record.linf.first().copied().unwrap_or(0.0);
    MaxPrincipleReport {
        max_increase,
        threshold,
        passed: max_increase <= threshold,
    }
}

/// `||f||_s` never increases between snapshots, up to `1e-10 ||f_0||_s`.
pub fn monitor_nonincreasing(record: &TrajectoryRecord, s: f64) -> Result<MonitorVerdict> {
    let v = record
        .series(s)
        .ok_or_else(|| MuskatError::precondition(format!("record has no s={s} series")))?;
    let rise = v.windows(2).map(|p| (p[1] - p[0]).max(0.0)).fold(0.0, f64::max);
    let threshold = 1e-10 * v.first().copied().unwrap_or(0.0);
    Ok(MonitorVerdict {
        name: format!("nonincreasing_s={s}"),
        value: rise,
        threshold,
        passed: rise <= threshold,
    })
}

/// `max_t ||f||_{nu,inf} <= 3 (B(0) + ||f_0||_{nu,inf})`; both terms are the
/// initial Besov value, read once as the reference and once as the data norm.
pub fn monitor_besov(record: &TrajectoryRecord, nu: f64) -> Result<MonitorVerdict> {
    let b = record
        .besov_series(nu)
        .ok_or_else(|| MuskatError::precondition(format!("record has no besov_nu={nu} series")))?;
    let b0 = b.first().copied().unwrap_or(0.0);
    let max = b.iter().copied().fold(0.0, f64::max);
    let threshold = 3.0 * (b0 + b0);
    Ok(MonitorVerdict {
        name: format!("besov_bound_nu={nu}"),
        value: max,
        threshold,
        passed: max <= threshold,
    })
}

/// `max_t ||f||_{H^l} <= 10 ||f_0||_{H^l}`.
pub fn monitor_sobolev(record: &TrajectoryRecord) -> MonitorVerdict {
    let first = record.sobolev.first().copied().unwrap_or(0.0);
    let max = record.sobolev.iter().copied().fold(0.0, f64::max);
    MonitorVerdict {
        name: format!("sobolev_bound_l={}", record.sobolev_order),
        value: max,
        threshold: 10.0 * first,
        passed: max <= 10.0 * first,
    }
}
