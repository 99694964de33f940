//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use muskat::decay::{
    decay_lemma_check, fit_exponent, log_times, semigroup_norm_closed, semigroup_norm_quadrature,
    synthetic_record, RadialProfile,
};
use muskat::evolve::{
    monitor_besov, monitor_diff_ineq, monitor_max_principle, monitor_nonincreasing, monitor_sobolev,
    run, InitialDataSpec, SimulationConfig, TrajectoryRecord,
};
use muskat::rhs::{NonlocalOperator, QuadratureConfig};
use muskat::series::{
    admissibility_partial, admissibility_value, admissible_constant, closed_form_majorant,
    dissipation_constant, majorant_series, two_d_closed_form, MuskatDim,
};
use muskat::spectral::{Fourier, GridSpec};
use muskat::table::sci;
use muskat::verify::{cosine_residual, norm_violations, random_field, refinement_order};
use muskat::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(o) => (o.passed && elapsed <= budget, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} criterion {id} {name}: {detail} runtime={:.2}s budget={}s",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

fn constants_3d() -> Result<Outcome> {
    let v = admissibility_partial(MuskatDim::Three, 0.01, 0.2, 200);
    let kstar = admissible_constant(MuskatDim::Three, 0.01, 1e-12)?;
    outcome(
        v.upper() <= 1.0 && v.tail_bound < 1e-12 && kstar > 0.2,
        format!("series={} tail={} k*={kstar:.6}", sci(v.partial_sum), sci(v.tail_bound)),
    )
}

fn constants_2d() -> Result<Outcome> {
    let c = 1.0 / 3.0;
    let v = admissibility_value(MuskatDim::Two, 0.001, c, 500);
    let closed = two_d_closed_form(c)?;
    let mut cross: f64 = 0.0;
    for x in [0.1, 0.2, c, 0.5] {
        cross = cross.max((admissibility_value(MuskatDim::Two, 0.0, x, 5000).upper() - two_d_closed_form(x)?).abs());
    }
    outcome(
        v.upper() <= 1.0 && (closed - 0.8125).abs() <= 1e-15 && cross <= 1e-12,
        format!(
            "series(delta=0.001)={} closed(delta=0)={} max_closed_vs_partial={}",
            sci(v.upper()),
            sci(closed),
            sci(cross)
        ),
    )
}

fn majorant_identity() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.2, 0.3, 0.5] {
        worst = worst.max((majorant_series(x, 5000).upper() - closed_form_majorant(x)?).abs());
    }
    let at = closed_form_majorant(0.2)?;
    let c0 = dissipation_constant(MuskatDim::Three, 0.2)?;
    outcome(
        worst <= 1e-10 && (at - 0.19604).abs() <= 1e-5 && (c0 - 0.384).abs() <= 1e-3,
        format!("max_err={} value(0.2)={at:.7} C0={c0:.6}", sci(worst)),
    )
}

fn split_identity() -> Result<Outcome> {
    let quad = QuadratureConfig::default();
    let mut res = Vec::new();
    let mut scale = 0.0;
    for n in [128, 256, 512] {
        let (r, s) = cosine_residual(1, n, 0.1, quad)?;
        res.push(r);
        scale = s;
    }
    let floor = 1e-11 * scale;
    let orders: Vec<(f64, bool)> = res.windows(2).map(|w| refinement_order(w[0], w[1], floor)).collect();
    let curve_ok = res[2] <= 1e-6 && orders.iter().all(|&(p, conv)| conv || p >= 2.0);
    let (s32, _) = cosine_residual(2, 32, 0.1, quad)?;
    let (s64, surf_scale) = cosine_residual(2, 64, 0.1, quad)?;
    let (p3, conv3) = refinement_order(s32, s64, 1e-11 * surf_scale);
    outcome(
        curve_ok && (conv3 || p3 >= 1.5),
        format!(
            "curve residuals={},{},{} (roundoff floor {}) surface residuals={},{} order={p3:.2}",
            sci(res[0]),
            sci(res[1]),
            sci(res[2]),
            sci(floor),
            sci(s32),
            sci(s64)
        ),
    )
}

fn majorant_soundness() -> Result<Outcome> {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for (d, n, k_max) in [(1usize, 128usize, 8u32), (2, 32, 6)] {
        let grid = GridSpec::periodic_2pi(d, n)?;
        let op = NonlocalOperator::new(grid, QuadratureConfig::default())?;
        for seed in 0..100u64 {
            let spec = random_field(&grid, k_max, 0.15, 10_000 * d as u64 + seed)?;
            let field = op.fourier().synthesize(&spec)?;
            for s in [1.0, 2.0] {
                let r = op.bound_report(&field, s, 500)?;
                checks += 1;
                worst = worst.max(r.lhs / r.rhs);
                failures += usize::from(!(r.lhs <= r.rhs));
            }
        }
    }
    outcome(
        failures == 0,
        format!("checks={checks} failures={failures} max_lhs_over_rhs={worst:.4}"),
    )
}

fn linear_rates() -> Result<Outcome> {
    let times: Vec<f64> = (0..100).map(|i| 10.0 * 100f64.powf(i as f64 / 99.0)).collect();
    let mut worst_slope: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for d in [1usize, 2] {
        for a in [0.0, 1.0] {
            let profile = RadialProfile::new(a, d, 1.0)?;
            for s in [0.0, 1.0, 2.0] {
                let mut v = Vec::new();
                for &t in &times {
                    let c = semigroup_norm_closed(&profile, s, t)?;
                    let q = semigroup_norm_quadrature(&profile, s, t)?;
                    worst_quad = worst_quad.max(((q - c) / c).abs());
                    v.push(q);
                }
                let fit = fit_exponent(&times, &v, Some((10.0, 1000.0)))?;
                let expected = -(s + a + d as f64);
                worst_slope = worst_slope.max(((fit.slope - expected) / expected).abs());
            }
        }
    }
    outcome(
        worst_slope <= 0.01 && worst_quad <= 1e-6,
        format!("max_slope_rel_err={} max_quadrature_rel_err={}", sci(worst_slope), sci(worst_quad)),
    )
}

fn trajectory_checks(rec: &TrajectoryRecord, d: usize, c0: f64) -> Result<(bool, String)> {
    let nonincreasing = monitor_nonincreasing(rec, 1.0)?;
    let diff = monitor_diff_ineq(rec, 1.0, c0)?;
    let mp = monitor_max_principle(rec);
    let besov = monitor_besov(rec, -(d as f64))?;
    let sobolev = monitor_sobolev(rec);
    let ok = nonincreasing.passed && diff.passed && mp.passed && besov.passed && sobolev.passed;
    let detail = format!(
        "[d={d} snapshots={} (a) rise={} (b) excess={} empirical_C={:.4} (c) linf_rise={} (d) besov_max={}/{} (e) sobolev_max={}/{}]",
        rec.len(),
        sci(nonincreasing.value),
        sci(diff.max_excess.max(0.0)),
        diff.empirical_c,
        sci(mp.max_increase),
        sci(besov.value),
        sci(besov.threshold),
        sci(sobolev.value),
        sci(sobolev.threshold)
    );
    Ok((ok, detail))
}

fn nonlinear_trajectories() -> Result<Outcome> {
    let c0 = dissipation_constant(MuskatDim::Three, 0.2)?;
    let curve = SimulationConfig {
        t_end: 20.0,
        cfl: 0.5,
        ..SimulationConfig::new(
            GridSpec::periodic_2pi(1, 512)?,
            InitialDataSpec::random_band(1, 8, 0.15, 7),
        )
    };
    let start = Instant::now();
    let (ok1, d1) = trajectory_checks(&run(&curve)?, 1, c0)?;
    let t1 = start.elapsed();
    let surface = SimulationConfig {
        t_end: 2.0,
        cfl: 0.5,
        record_every: 1,
        ..SimulationConfig::new(GridSpec::periodic_2pi(2, 64)?, InitialDataSpec::single_mode(1, 0.15))
    };
    let start = Instant::now();
    let (ok2, d2) = trajectory_checks(&run(&surface)?, 2, c0)?;
    let t2 = start.elapsed();
    outcome(
        ok1 && ok2 && t1 <= Duration::from_secs(300) && t2 <= Duration::from_secs(900),
        format!(
            "C0={c0:.4} {d1} {:.1}s {d2} {:.1}s",
            t1.as_secs_f64(),
            t2.as_secs_f64()
        ),
    )
}

fn norm_suite() -> Result<Outcome> {
    let mut worst = [0.0f64; 4];
    for (d, n, k_max) in [(1usize, 128usize, 30u32), (2, 32, 10)] {
        let grid = GridSpec::periodic_2pi(d, n)?;
        let fourier = Fourier::new(grid);
        for seed in 0..1000u64 {
            let spec = random_field(&grid, k_max, 1.0, 1_000_000 * d as u64 + seed)?;
            let v = norm_violations(&fourier, &spec)?;
            worst[0] = worst[0].max(v.besov);
            worst[1] = worst[1].max(v.interpolation);
            worst[2] = worst[2].max(v.gradient);
            worst[3] = worst[3].max(v.round_trip);
        }
    }
    outcome(
        worst[0] <= 1e-13 && worst[1] <= 1e-13 && worst[2] <= 1e-13 && worst[3] <= 1e-12,
        format!(
            "fields=2000 besov_excess={} interpolation_excess={} gradient_excess={} round_trip={}",
            sci(worst[0]),
            sci(worst[1]),
            sci(worst[2]),
            sci(worst[3])
        ),
    )
}

fn decay_lemma() -> Result<Outcome> {
    let mut all_ok = true;
    let mut sups = Vec::new();
    for d in [1usize, 2] {
        for a in [0.0, 1.0] {
            let profile = RadialProfile::new(a, d, 1.0)?;
            let nu = profile.endpoint();
            for mu in [0.0, 1.0, 2.0] {
                let rec = synthetic_record(&profile, mu, nu, &log_times(1000.0, 400))?;
                let b0 = rec.besov_series(nu).expect("recorded")[0];
                let rep = decay_lemma_check(&rec, mu, nu, 0.99, 3.0 * b0, 1e6)?;
                all_ok &= rep.hypothesis_ok && rep.besov_ok && rep.conclusion && rep.weighted_sup.is_finite();
                sups.push(rep.weighted_sup);
            }
        }
    }
    let profile = RadialProfile::new(1.0, 1, 1.0)?;
    let mut slow = synthetic_record(&profile, 1.0, profile.endpoint(), &log_times(1000.0, 400))?;
    for (i, &t) in slow.times.clone().iter().enumerate() {
        slow.s_norms[0][i] = (1.0 + t).powf(-1.0);
        slow.s_norms[1][i] = (1.0 + t).powf(-2.0);
    }
    let planted = decay_lemma_check(&slow, 1.0, profile.endpoint(), 0.99, f64::INFINITY, 1e6)?;
    let max_sup = sups.iter().copied().fold(0.0, f64::max);
    outcome(
        all_ok && !planted.conclusion,
        format!(
            "semigroup cases=12 max_weighted_sup={} planted_conclusion={}",
            sci(max_sup),
            planted.conclusion
        ),
    )
}

fn main() {
    let results = [
        criterion(1, "constants-3d", Duration::from_secs(1), constants_3d),
        criterion(2, "constants-2d", Duration::from_secs(1), constants_2d),
        criterion(3, "majorant-identity", Duration::from_secs(1), majorant_identity),
        criterion(4, "split-identity", Duration::from_secs(120), split_identity),
        criterion(5, "majorant-soundness", Duration::from_secs(300), majorant_soundness),
        criterion(6, "linear-rates", Duration::from_secs(10), linear_rates),
        criterion(7, "nonlinear-trajectories", Duration::from_secs(1200), nonlinear_trajectories),
        criterion(8, "norm-suite", Duration::from_secs(60), norm_suite),
        criterion(9, "decay-lemma", Duration::from_secs(10), decay_lemma),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
