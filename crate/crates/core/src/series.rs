//! Majorant power series and the small-data admissibility constants.
//!
//! All series here have terms `prefactor * (2n+1)^p * a_n^q * x^(2n)` for
//! `n >= 1`, with `a_n = (2n+1)! / (2^n n!)^2` and `q` in `{0, 1}`. The term
//! ratio is decreasing in `n`, so the tail after the last summed term is
//! bounded by a geometric series.

use std::f64::consts::PI;

use crate::error::{MuskatError, Result};

/// Physical dimension of the Muskat problem (interface dimension plus one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuskatDim {
    /// Curve interface, `d = 1`.
    Two,
    /// Surface interface, `d = 2`.
    Three,
}

impl MuskatDim {
    pub fn from_interface_dim(d: usize) -> Result<Self> {
        match d {
            1 => Ok(MuskatDim::Two),
            2 => Ok(MuskatDim::Three),
            _ => Err(MuskatError::config(format!("interface dimension {d} not supported"))),
        }
    }

    pub fn from_physical(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(MuskatDim::Two),
            3 => Ok(MuskatDim::Three),
            _ => Err(MuskatError::config(format!("dimension must be 2 or 3, got {dim}"))),
        }
    }

    pub fn physical(self) -> usize {
        match self {
            MuskatDim::Two => 2,
            MuskatDim::Three => 3,
        }
    }

    /// Admissible range of the exponent `delta`.
    pub fn delta_range(self) -> (f64, f64) {
        match self {
            MuskatDim::Two => (0.0, 0.5),
            MuskatDim::Three => (0.0, 1.0),
        }
    }

    /// Small-data constant claimed admissible: 1/5 in 3D, 1/3 in 2D.
    pub fn claimed_constant(self) -> f64 {
        match self {
            MuskatDim::Two => 1.0 / 3.0,
            MuskatDim::Three => 0.2,
        }
    }
}

/// `a_n = (2n+1)! / (2^n n!)^2` via `a_n = a_{n-1} (2n+1) / (2n)`, `a_0 = 1`.
pub fn series_coefficient(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(MuskatError::precondition("series coefficients start at n = 1"));
    }
    Ok((1..=n).fold(1.0, |a, k| a * (2 * k + 1) as f64 / (2 * k) as f64))
}

/// Truncation settings and a cached `a_n` table.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesConstants {
    pub max_n: usize,
    pub delta: f64,
    coefficients: Vec<f64>,
}

impl SeriesConstants {
    pub fn new(max_n: usize, delta: f64) -> Result<Self> {
        if max_n < 1 {
            return Err(MuskatError::config("series truncation must be at least 1"));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(MuskatError::config(format!("delta must be >= 0, got {delta}")));
        }
        let mut coefficients = Vec::with_capacity(max_n + 1);
        let mut a = 1.0;
        coefficients.push(a);
        for k in 1..=max_n {
            a *= (2 * k + 1) as f64 / (2 * k) as f64;
            coefficients.push(a);
        }
        Ok(Self {
            max_n,
            delta,
            coefficients,
        })
    }

    /// `a_n` from the table, `n` in `1..=max_n`.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients[n]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients[1..]
    }
}

impl Default for SeriesConstants {
    fn default() -> Self {
        Self::new(500, 0.01).expect("default series constants are valid")
    }
}

/// A truncated series value with a rigorous bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

impl SeriesValue {
    /// Upper bound on the full series.
    pub fn upper(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerSeries {
    prefactor: f64,
    power: f64,
    with_coefficients: bool,
}

impl PowerSeries {
    fn term(&self, n: usize, a_n: f64, x2n: f64) -> f64 {
        let a = if self.with_coefficients { a_n } else { 1.0 };
        self.prefactor * ((2 * n + 1) as f64).powf(self.power) * a * x2n
    }

    /// Upper bound of `t_{m+1} / t_m` valid for every `m >= n`.
    fn ratio_bound(&self, n: usize, x: f64) -> f64 {
        let odd = ((2 * n + 3) as f64 / (2 * n + 1) as f64).powf(self.power.max(0.0));
        let coef = if self.with_coefficients {
            (2 * n + 3) as f64 / (2 * n + 2) as f64
        } else {
            1.0
        };
        odd * coef * x * x
    }

    /// Sums terms `n = 1..` until they fall below `1e-16` of the running sum
    /// (or exactly `fixed_terms` terms when given), then bounds the tail.
    fn evaluate(&self, x: f64, max_n: usize, fixed_terms: Option<usize>) -> SeriesValue {
        if x == 0.0 {
            return SeriesValue {
                partial_sum: 0.0,
                tail_bound: 0.0,
                terms: 0,
            };
        }
        let limit = fixed_terms.unwrap_or(max_n);
        let mut sum = 0.0;
        let mut a_n = 1.0;
        let mut x2n = 1.0;
        let mut last = 0;
        let mut next_term = 0.0;
        for n in 1..=limit + 1 {
            a_n *= (2 * n + 1) as f64 / (2 * n) as f64;
            x2n *= x * x;
            let t = self.term(n, a_n, x2n);
            if n > limit {
                next_term = t;
                break;
            }
            sum += t;
            last = n;
            if fixed_terms.is_none() && t < 1e-16 * sum {
                let a_next = a_n * (2 * n + 3) as f64 / (2 * n + 2) as f64;
                next_term = self.term(n + 1, a_next, x2n * x * x);
                break;
            }
        }
        let rho = self.ratio_bound(last + 1, x);
        let tail_bound = if rho < 1.0 {
            next_term / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        SeriesValue {
            partial_sum: sum,
            tail_bound,
            terms: last,
        }
    }
}

fn admissibility_series(dim: MuskatDim, delta: f64) -> PowerSeries {
    match dim {
        MuskatDim::Three => PowerSeries {
            prefactor: PI,
            power: 1.0 + delta,
            with_coefficients: true,
        },
        MuskatDim::Two => PowerSeries {
            prefactor: 2.0,
            power: 1.0 + delta,
            with_coefficients: false,
        },
    }
}

/// `pi sum (2n+1)^(1+delta) a_n k^(2n)` (3D) or `2 sum (2n+1)^(1+delta) k^(2n)` (2D).
pub fn admissibility_value(dim: MuskatDim, delta: f64, k: f64, max_n: usize) -> SeriesValue {
    admissibility_series(dim, delta).evaluate(k, max_n, None)
}

/// Same series with exactly `terms` terms summed.
pub fn admissibility_partial(dim: MuskatDim, delta: f64, k: f64, terms: usize) -> SeriesValue {
    admissibility_series(dim, delta).evaluate(k, terms, Some(terms))
}

/// The 2D admissibility series at `delta = 0` in closed form: `2 (3c^2 - c^4) / (1 - c^2)^2`.
pub fn two_d_closed_form(c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(MuskatError::precondition(format!("closed form needs 0 <= c < 1, got {c}")));
    }
    let c2 = c * c;
    Ok(2.0 * (3.0 * c2 - c2 * c2) / ((1.0 - c2) * (1.0 - c2)))
}

/// `(1 + 2x^2) / (1 - x^2)^(5/2) - 1`, the sum of `(2n+1) a_n x^(2n)`.
pub fn closed_form_majorant(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(MuskatError::precondition(format!(
            "majorant series diverges for |x| >= 1 (x = {x})"
        )));
    }
    let x2 = x * x;
    Ok((1.0 + 2.0 * x2) / (1.0 - x2).powf(2.5) - 1.0)
}

/// `sum (2n+1) a_n x^(2n)` by direct summation.
pub fn majorant_series(x: f64, max_n: usize) -> SeriesValue {
    PowerSeries {
        prefactor: 1.0,
        power: 1.0,
        with_coefficients: true,
    }
    .evaluate(x, max_n, None)
}

/// Factor multiplying `||f||_(s+1)` in the Fourier majorant of the nonlinearity:
/// `pi sum a_n (2n+1)^s x^(2n)` in 3D, `2 sum (2n+1)^s x^(2n)` in 2D.
pub fn nonlinearity_majorant(dim: MuskatDim, s: f64, x: f64, max_n: usize) -> Result<SeriesValue> {
    if !(0.0..1.0).contains(&x) {
        return Err(MuskatError::precondition(format!(
            "majorant needs ||f||_1 < 1, got {x}"
        )));
    }
    let series = match dim {
        MuskatDim::Three => PowerSeries {
            prefactor: PI,
            power: s,
            with_coefficients: true,
        },
        MuskatDim::Two => PowerSeries {
            prefactor: 2.0,
            power: s,
            with_coefficients: false,
        },
    };
    Ok(series.evaluate(x, max_n, None))
}

/// Dissipation constant in `d/dt ||f||_1 <= -C ||f||_2` for `||f||_1 <= k`:
/// `1 - pi ((1+2k^2)/(1-k^2)^(5/2) - 1)` in 3D and `1 - 2 sum (2n+1) k^(2n)` in 2D.
pub fn dissipation_constant(dim: MuskatDim, k: f64) -> Result<f64> {
    match dim {
        MuskatDim::Three => Ok(1.0 - PI * closed_form_majorant(k)?),
        MuskatDim::Two => Ok(1.0 - two_d_closed_form(k)?),
    }
}

/// Largest `k` whose admissibility series is at most one, by bisection.
pub fn admissible_constant(dim: MuskatDim, delta: f64, tol: f64) -> Result<f64> {
    let (lo_d, hi_d) = dim.delta_range();
    if !(delta > lo_d && delta < hi_d) {
        return Err(MuskatError::precondition(format!(
            "delta = {delta} outside ({lo_d}, {hi_d}) for the {}D problem",
            dim.physical()
        )));
    }
    if !(tol > 0.0) {
        return Err(MuskatError::precondition("tolerance must be positive"));
    }
    const MAX_N: usize = 100_000;
    let value = |k: f64| admissibility_value(dim, delta, k, MAX_N);
    let (mut lo, mut hi) = (0.0, 0.5);
    while value(hi).partial_sum <= 1.0 {
        hi = 0.5 * (hi + 1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = value(mid);
        if v.upper() <= 1.0 {
            lo = mid;
            if 1.0 - v.partial_sum <= tol {
                break;
            }
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn coefficients_match_factorials() {
        assert_eq!(series_coefficient(1).unwrap(), 1.5);
        assert_eq!(series_coefficient(2).unwrap(), 1.875);
        assert_eq!(series_coefficient(3).unwrap(), 2.1875);
        for n in 1..=10u32 {
            let direct = factorial(2 * n + 1) / (2f64.powi(n as i32) * factorial(n)).powi(2);
            let rec = series_coefficient(n as usize).unwrap();
            assert!((rec - direct).abs() <= 1e-14 * direct, "n = {n}");
        }
        assert!(series_coefficient(0).is_err());
    }

    #[test]
    fn coefficient_growth_is_subgeometric() {
        let c = SeriesConstants::new(2000, 0.01).unwrap();
        let r = c.coefficient(2000) / c.coefficient(1999);
        assert!(r > 1.0 && r < 1.001);
        assert!(c.coefficients().iter().all(|&a| a > 0.0 && a.is_finite()));
    }

    #[test]
    fn majorant_closed_form_values() {
        assert_eq!(closed_form_majorant(0.0).unwrap(), 0.0);
        assert!((closed_form_majorant(0.2).unwrap() - 0.19604).abs() < 1e-5);
        assert!(closed_form_majorant(1.0).is_err());
        for x in [0.1, 0.3, 0.5, 0.6] {
            let s = majorant_series(x, 500);
            assert!(s.tail_bound < 1e-12);
            assert!((s.partial_sum - closed_form_majorant(x).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn three_d_constant_at_one_fifth() {
        let v = admissibility_partial(MuskatDim::Three, 0.01, 0.2, 200);
        assert!(v.tail_bound < 1e-12);
        assert!((v.partial_sum - 0.62).abs() < 0.01, "{}", v.partial_sum);
        let k = admissible_constant(MuskatDim::Three, 0.01, 1e-12).unwrap();
        assert!(k > 0.2);
        let at = admissibility_value(MuskatDim::Three, 0.01, k, 10_000);
        assert!((at.partial_sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn two_d_closed_form_at_one_third() {
        assert!((two_d_closed_form(1.0 / 3.0).unwrap() - 0.8125).abs() < 1e-15);
        let v = admissibility_value(MuskatDim::Two, 0.0, 1.0 / 3.0, 500);
        assert!((v.partial_sum - 0.8125).abs() < 1e-12);
        let k = admissible_constant(MuskatDim::Two, 0.001, 1e-12).unwrap();
        assert!(k > 1.0 / 3.0);
    }

    #[test]
    fn series_monotone_in_k_and_delta() {
        for dim in [MuskatDim::Two, MuskatDim::Three] {
            let mut prev = 0.0;
            for i in 1..20 {
                let k = 0.02 * i as f64;
                let v = admissibility_value(dim, 0.1, k, 1000).partial_sum;
                assert!(v > prev);
                prev = v;
            }
            let a = admissibility_value(dim, 0.05, 0.25, 1000).partial_sum;
            let b = admissibility_value(dim, 0.3, 0.25, 1000).partial_sum;
            assert!(b > a);
        }
    }

    #[test]
    fn delta_out_of_range() {
        assert!(admissible_constant(MuskatDim::Two, 0.7, 1e-10).is_err());
        assert!(admissible_constant(MuskatDim::Three, 0.0, 1e-10).is_err());
    }

    #[test]
    fn dissipation_constant_at_one_fifth() {
        let c0 = dissipation_constant(MuskatDim::Three, 0.2).unwrap();
        assert!((c0 - 0.384).abs() < 1e-3);
        let b = dissipation_constant(MuskatDim::Two, 0.0).unwrap();
        assert_eq!(b, 1.0);
    }

    #[test]
    fn nonlinearity_majorant_reduces_to_closed_form() {
        let v = nonlinearity_majorant(MuskatDim::Three, 1.0, 0.15, 500).unwrap();
        let closed = PI * closed_form_majorant(0.15).unwrap();
        assert!((v.partial_sum - closed).abs() < 1e-13);
        let v2 = nonlinearity_majorant(MuskatDim::Two, 1.0, 0.2, 500).unwrap();
        // 2 sum (2n+1) x^(2n) = 2 (3x^2 - x^4)/(1-x^2)^2
        assert!((v2.partial_sum - two_d_closed_form(0.2).unwrap()).abs() < 1e-13);
        assert!(nonlinearity_majorant(MuskatDim::Two, 1.0, 1.0, 10).is_err());
    }
}
