//! Spectral correction for the windowed linear kernel and the lattice
//! constants used to correct the punctured 2D trapezoid rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use crate::special::{bessel_j1, CompositeRule, RadialWindow};

const GL_ORDER: usize = 20;

/// Wavenumber above which `1 - W(kappa)` is below roundoff: the window's
/// roll-off is a Gaussian of width `sigma`, whose transform is `exp(-(k sigma)^2 / 4)`.
pub(crate) fn tail_cutoff(window: &RadialWindow) -> f64 {
    14.0 / window.width()
}

fn radial_rule(window: &RadialWindow, kappa: f64) -> CompositeRule {
    let outer = window.outer;
    let panels = (outer * kappa / PI).ceil() as usize + (outer / window.width()).ceil() as usize;
    CompositeRule::new(0.0, outer, panels.max(4), GL_ORDER)
}

/// Fraction `W(kappa)` of the linear symbol captured by the windowed kernel:
/// `(2/pi) int w(r) sin(kappa r)/r dr` for `d = 1`, `int w(r) J1(kappa r)/r dr` for `d = 2`.
pub(crate) fn captured_fraction(d: usize, window: &RadialWindow, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return 0.0;
    }
    let rule = radial_rule(window, kappa);
    if d == 1 {
        2.0 / PI * rule.integrate(|r| window.value(r) * (kappa * r).sin() / r)
    } else {
        rule.integrate(|r| window.value(r) * bessel_j1(kappa * r) / r)
    }
}

/// `1 - W(kappa)` for the linear far field, zero beyond the cutoff.
pub(crate) fn missing_fraction(d: usize, window: &RadialWindow, kappa: f64) -> f64 {
    if kappa >= tail_cutoff(window) {
        0.0
    } else {
        1.0 - captured_fraction(d, window, kappa)
    }
}

/// Harmonics `cos(4 j theta)` kept in the lattice correction.
pub(crate) const LATTICE_HARMONICS: usize = 9;

/// `Z_j`: regularized `sum_{m != 0} cos(4 j theta_m) / |m|` over the square
/// lattice (minus `int dy / |y|` for `j = 0`), via a smooth radial cutoff.
pub(crate) fn lattice_zeta() -> &'static [f64; LATTICE_HARMONICS] {
    static Z: OnceLock<[f64; LATTICE_HARMONICS]> = OnceLock::new();
    Z.get_or_init(|| {
        const RADIUS: f64 = 200.0;
        let window = RadialWindow::new(RADIUS);
        let reach = RADIUS as i64;
        let mut z = [0.0; LATTICE_HARMONICS];
        for m1 in -reach..=reach {
            for m2 in -reach..=reach {
                if m1 == 0 && m2 == 0 {
                    continue;
                }
                let r = (m1 as f64).hypot(m2 as f64);
                let w = window.value(r);
                if w == 0.0 {
                    continue;
                }
                let e = Complex64::new(m1 as f64 / r, m2 as f64 / r).powi(4);
                let mut h = Complex64::new(1.0, 0.0);
                for zj in z.iter_mut() {
                    *zj += h.re * w / r;
                    h *= e;
                }
            }
        }
        let panels = (RADIUS / window.width()).ceil() as usize;
        let area = CompositeRule::new(0.0, RADIUS, panels, GL_ORDER).integrate(|r| window.value(r));
        z[0] -= 2.0 * PI * area;
        z
    })
}

/// `Z[psi]` for a pi-periodic angular profile sampled at `theta_q = pi q / Q`.
pub(crate) fn lattice_correction(samples: &[f64], cosines: &[[f64; LATTICE_HARMONICS]]) -> f64 {
    let z = lattice_zeta();
    let q = samples.len() as f64;
    let mut acc = [0.0; LATTICE_HARMONICS];
    for (psi, cos) in samples.iter().zip(cosines) {
        for j in 0..LATTICE_HARMONICS {
            acc[j] += psi * cos[j];
        }
    }
    let mut total = z[0] * acc[0] / q;
    for j in 1..LATTICE_HARMONICS {
        total += z[j] * 2.0 * acc[j] / q;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_constant_matches_epstein_value() {
        // 4 zeta(1/2) beta(1/2)
        let z0 = lattice_zeta()[0];
        assert!((z0 + 3.900_264_920).abs() < 1e-8, "{z0}");
    }

    #[test]
    fn captured_fraction_limits() {
        let w = RadialWindow::new(3.0 * PI);
        for d in [1, 2] {
            let small = captured_fraction(d, &w, 1e-3);
            assert!(small > 0.0 && small < 0.02, "d={d}: {small}");
            let cut = tail_cutoff(&w);
            let at_cut = 1.0 - captured_fraction(d, &w, cut);
            assert!(at_cut.abs() < 5e-13, "d={d}: {at_cut}");
            let mid = 1.0 - captured_fraction(d, &w, 2.0);
            assert!(mid.abs() > 1e-6 && mid.abs() < 0.2, "d={d}: {mid}");
        }
    }

    #[test]
    fn angular_projection_of_constant() {
        let q = 64;
        let cosines: Vec<[f64; LATTICE_HARMONICS]> = (0..q)
            .map(|i| {
                let th = PI * i as f64 / q as f64;
                std::array::from_fn(|j| (4.0 * j as f64 * th).cos())
            })
            .collect();
        let v = lattice_correction(&vec![2.0; q], &cosines);
        assert!((v - 2.0 * lattice_zeta()[0]).abs() < 1e-12);
    }
}
