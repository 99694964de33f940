//! Time integration of `f_t = -rho/2 (Lambda f + nonlinearity)` with
//! recording and runtime monitors.

mod initial;
pub mod monitors;
mod record;
mod stepper;

use std::fmt;
use std::str::FromStr;

use crate::error::{MuskatError, Result};
use crate::rhs::QuadratureConfig;
use crate::series::{dissipation_constant, MuskatDim};
use crate::spectral::{Fourier, GridSpec, SpectralField};

pub use initial::{initial_spectrum, make_initial, InitialDataSpec, InitialKind};
pub use monitors::{
    monitor_besov, monitor_diff_ineq, monitor_max_principle, monitor_nonincreasing,
    monitor_sobolev, DiffIneqReport, MaxPrincipleReport, MonitorVerdict,
};
pub use record::{Snapshot, TrajectoryRecord};
pub use stepper::{Integrator, Scheme};

/// Whether failed monitors only warn or make the run fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorMode {
    Warn,
    Fail,
}

impl fmt::Display for MonitorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonitorMode::Warn => "warn",
            MonitorMode::Fail => "fail",
        })
    }
}

impl FromStr for MonitorMode {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "warn" => Ok(MonitorMode::Warn),
            "fail" => Ok(MonitorMode::Fail),
            other => Err(MuskatError::config(format!("monitors must be warn or fail, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub t_end: f64,
    pub cfl: f64,
    pub record_every: usize,
    pub s_list: Vec<f64>,
    pub nu_list: Vec<f64>,
    pub sobolev_order: f64,
    pub dealias: bool,
    pub linear_only: bool,
    pub scheme: Scheme,
    pub monitors: MonitorMode,
    pub initial: InitialDataSpec,
    pub quad: QuadratureConfig,
    /// Truncation for the majorant series used by the monitors.
    pub series_max_n: usize,
}

impl SimulationConfig {
    pub fn new(grid: GridSpec, initial: InitialDataSpec) -> Self {
        Self {
            grid,
            t_end: 10.0,
            cfl: 0.25,
            record_every: 5,
            s_list: vec![0.0, 1.0, 2.0],
            nu_list: vec![-(grid.dim() as f64)],
            sobolev_order: 2.0,
            dealias: true,
            linear_only: false,
            scheme: Scheme::Etdrk2,
            monitors: MonitorMode::Warn,
            initial,
            quad: QuadratureConfig::default(),
            series_max_n: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(MuskatError::config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(MuskatError::config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.record_every < 1 {
            return Err(MuskatError::config("record_every must be at least 1"));
        }
        if self.s_list.is_empty() {
            return Err(MuskatError::config("s_list must not be empty"));
        }
        if self.s_list.iter().chain(&self.nu_list).any(|v| !v.is_finite()) {
            return Err(MuskatError::config("norm exponents must be finite"));
        }
        if !(self.sobolev_order >= 0.0) {
            return Err(MuskatError::config("sobolev_order must be >= 0"));
        }
        self.quad.validate()?;
        self.quad.rule_for(self.grid.dim())?;
        self.initial.validate(&self.grid)
    }

    /// Recorded exponents: `s_list` plus 1 and 2 (needed by the monitors).
    pub fn recorded_s(&self) -> Vec<f64> {
        let mut s = self.s_list.clone();
        for extra in [1.0, 2.0] {
            if !s.iter().any(|&v| v == extra) {
                s.push(extra);
            }
        }
        s
    }

    /// Recorded Besov exponents: `nu_list` plus the endpoint `-d`.
    pub fn recorded_nu(&self) -> Vec<f64> {
        let mut nu = self.nu_list.clone();
        let endpoint = -(self.grid.dim() as f64);
        if !nu.iter().any(|&v| v == endpoint) {
            nu.push(endpoint);
        }
        nu
    }
}

fn snapshot(
    fourier: &Fourier,
    u: &SpectralField,
    t: f64,
    dt: f64,
    record: &TrajectoryRecord,
) -> Result<Snapshot> {
    let field = fourier.synthesize(u)?;
    Ok(Snapshot {
        t,
        linf: field.max_abs(),
        s_norms: record.s_values.iter().map(|&s| u.s_norm(s)).collect::<Result<_>>()?,
        besov: record
            .nu_values
            .iter()
            .map(|&nu| u.besov_norm(nu).map(|b| b.sup))
            .collect::<Result<_>>()?,
        sobolev: u.sobolev_norm(record.sobolev_order),
        dt,
    })
}

/// One ETDRK2 step of the configured equation.
pub fn step(u: &SpectralField, dt: f64, config: &SimulationConfig) -> Result<SpectralField> {
    Integrator::new(config.grid, config.quad, config.dealias, config.linear_only)?.step(u, dt)
}

/// Runs from the configured initial data and attaches monitor verdicts.
pub fn run(config: &SimulationConfig) -> Result<TrajectoryRecord> {
    config.validate()?;
    let mut u = initial_spectrum(&config.initial, &config.grid)?;
    u.project_real_mean_zero();
    run_from(config, u)
}

/// Runs from a given spectral state.
pub fn run_from(config: &SimulationConfig, mut u: SpectralField) -> Result<TrajectoryRecord> {
    config.validate()?;
    let integ = Integrator::new(config.grid, config.quad, config.dealias, config.linear_only)?;
    let fourier = integ.operator().fourier().clone();
    let mut record =
        TrajectoryRecord::new(config.recorded_s(), config.recorded_nu(), config.sobolev_order);
    let first = snapshot(&fourier, &u, 0.0, 0.0, &record)?;
    record.push(first, 0)?;
    let mut t = 0.0;
    let mut steps = 0;
    while t < config.t_end {
        let mut dt = integ.stable_dt(&u, config.cfl);
        let last = t + dt >= config.t_end * (1.0 - 1e-14);
        if last {
            dt = config.t_end - t;
        }
        u = match integ.step_with(config.scheme, &u, dt) {
            Ok(next) => next,
            Err(MuskatError::BlowUp { reason, last_valid, .. }) => {
                return Err(MuskatError::BlowUp {
                    time: t,
                    step: steps,
                    reason,
                    last_valid,
                    record: Box::new(record),
                })
            }
            Err(e) => return Err(e),
        };
        t = if last { config.t_end } else { t + dt };
        steps += 1;
        if steps % config.record_every == 0 || last {
            match snapshot(&fourier, &u, t, dt, &record) {
                Ok(snap) => record.push(snap, steps)?,
                Err(e) => {
                    return Err(MuskatError::BlowUp {
                        time: t,
                        step: steps,
                        reason: e.to_string(),
                        last_valid: Box::new(u),
                        record: Box::new(record),
                    })
                }
            }
        }
    }
    record.monitors = evaluate_monitors(&record, config);
    Ok(record)
}

/// Reference dissipation constant for `d/dt ||f||_1 <= -C ||f||_2` at `||f_0||_1 = k`:
/// `1 - pi ((1+2k^2)/(1-k^2)^(5/2) - 1)` for surfaces, `1 - 2 sum (2n+1) k^(2n)` for curves.
pub fn reference_constant(d: usize, k: f64) -> Result<f64> {
    dissipation_constant(MuskatDim::from_interface_dim(d)?, k)
}

/// All trajectory monitors applicable to a record of this configuration.
pub fn evaluate_monitors(record: &TrajectoryRecord, config: &SimulationConfig) -> Vec<MonitorVerdict> {
    let mut out = Vec::new();
    let rate = 0.5 * config.quad.rho_jump;
    let d = config.grid.dim();
    if let Some(&k) = record.series(1.0).and_then(|v| v.first()) {
        if record.len() >= 3 && k < 1.0 {
            if let Ok(c) = reference_constant(d, k) {
                if let Ok(rep) = monitor_diff_ineq(record, 1.0, rate * c) {
                    out.push(MonitorVerdict {
                        name: "diff_ineq_s=1".into(),
                        value: rep.max_excess.max(0.0),
                        threshold: 0.0,
                        passed: rep.passed,
                    });
                }
            }
        }
    }
    if let Ok(v) = monitor_nonincreasing(record, 1.0) {
        out.push(v);
    }
    let mp = monitor_max_principle(record);
    out.push(MonitorVerdict {
        name: "max_principle".into(),
        value: mp.max_increase,
        threshold: mp.threshold,
        passed: mp.passed,
    });
    if let Ok(v) = monitor_besov(record, -(d as f64)) {
        out.push(v);
    }
    out.push(monitor_sobolev(record));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_config(t_end: f64) -> SimulationConfig {
        let g = GridSpec::periodic_2pi(1, 32).unwrap();
        SimulationConfig {
            t_end,
            linear_only: true,
            record_every: 1,
            ..SimulationConfig::new(g, InitialDataSpec::single_mode(1, 0.1))
        }
    }

    #[test]
    fn zero_time_gives_single_snapshot() {
        let rec = run(&linear_config(0.0)).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec.times, vec![0.0]);
    }

    #[test]
    fn linear_single_mode_decays_exactly() {
        let rec = run(&linear_config(2.0)).unwrap();
        assert_eq!(*rec.times.last().unwrap(), 2.0);
        let s1 = rec.series(1.0).unwrap();
        for (t, v) in rec.times.iter().zip(s1) {
            assert!((v - 0.1 * (-t).exp()).abs() < 1e-8);
        }
        assert!(rec.linf.windows(2).all(|p| p[1] < p[0]));
        assert!(rec.monitors.iter().all(|m| m.passed), "{:?}", rec.monitors);
    }

    #[test]
    fn config_validation() {
        let mut c = linear_config(1.0);
        c.cfl = 0.9;
        assert!(matches!(c.validate(), Err(MuskatError::Config(_))));
        let mut c = linear_config(1.0);
        c.s_list.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn recorded_exponents_include_monitor_inputs() {
        let mut c = linear_config(1.0);
        c.s_list = vec![0.5];
        c.nu_list = vec![];
        assert_eq!(c.recorded_s(), vec![0.5, 1.0, 2.0]);
        assert_eq!(c.recorded_nu(), vec![-1.0]);
    }
}
