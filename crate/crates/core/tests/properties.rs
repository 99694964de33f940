use muskat::decay::{semigroup_norm_closed, semigroup_norm_quadrature, RadialProfile};
use muskat::rhs::{NonlocalOperator, QuadratureConfig};
use muskat::series::{closed_form_majorant, majorant_series};
use muskat::spectral::{check_interpolation, Fourier, GridSpec, Lp};
use muskat::verify::{norm_violations, random_field};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_inequalities_hold(seed in any::<u64>(), d in 1usize..=2, amp in 1e-3f64..10.0) {
        let grid = if d == 1 { GridSpec::periodic_2pi(1, 64) } else { GridSpec::periodic_2pi(2, 16) }.unwrap();
        let spec = random_field(&grid, if d == 1 { 20 } else { 6 }, amp, seed).unwrap();
        let v = norm_violations(&Fourier::new(grid), &spec).unwrap();
        prop_assert!(v.round_trip <= 1e-12);
        prop_assert!(v.besov <= 1e-13);
        prop_assert!(v.interpolation <= 1e-13);
        prop_assert!(v.sup <= 1e-13);
        prop_assert!(v.gradient <= 1e-13);
        prop_assert!(v.scaling <= 1e-13);
        prop_assert!(v.parseval <= 1e-10);
    }

    #[test]
    fn interpolation_for_any_exponents(seed in any::<u64>(), mu1 in -1.0f64..1.0, gap in 0.1f64..3.0, frac in 0.05f64..0.95) {
        let grid = GridSpec::periodic_2pi(1, 64).unwrap();
        let spec = random_field(&grid, 16, 1.0, seed).unwrap();
        let mu2 = mu1 + gap;
        let r = check_interpolation(&spec, mu1, mu2, mu1 + frac * gap).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn round_trip_in_physical_space(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 16, 64, 256])) {
        let grid = GridSpec::periodic_2pi(1, n).unwrap();
        let f = Fourier::new(grid);
        let spec = random_field(&grid, (n / 2 - 1) as u32, 0.5, seed).unwrap();
        let x = f.synthesize(&spec).unwrap();
        let y = f.synthesize(&f.analyze(&x).unwrap()).unwrap();
        let err = x.samples().iter().zip(y.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * x.lp_norm(Lp::Inf));
    }

    #[test]
    fn majorant_series_matches_closed_form(x in 0.0f64..0.6) {
        let s = majorant_series(x, 2000).upper();
        prop_assert!((s - closed_form_majorant(x).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn gamma_identity(a in 0.0f64..3.0, d in 1usize..=2, p in 0.1f64..10.0, t in 0.0f64..1000.0) {
        let profile = RadialProfile::new(a, d, 1.0).unwrap();
        let s = p - a - d as f64;
        let c = semigroup_norm_closed(&profile, s, t).unwrap();
        let q = semigroup_norm_quadrature(&profile, s, t).unwrap();
        prop_assert!(((q - c) / c).abs() <= 1e-6);
        let later = semigroup_norm_closed(&profile, s, t + 1.0).unwrap();
        prop_assert!(later < c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn majorant_bound_holds_for_small_data(seed in any::<u64>(), s in prop::sample::select(vec![1.0f64, 2.0])) {
        let grid = GridSpec::periodic_2pi(1, 64).unwrap();
        let op = NonlocalOperator::new(grid, QuadratureConfig::default()).unwrap();
        let spec = random_field(&grid, 8, 0.15, seed).unwrap();
        let field = op.fourier().synthesize(&spec).unwrap();
        let r = op.bound_report(&field, s, 500).unwrap();
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn nonlinearity_is_odd_and_cubic(seed in any::<u64>()) {
        let grid = GridSpec::periodic_2pi(1, 64).unwrap();
        let op = NonlocalOperator::new(grid, QuadratureConfig::default()).unwrap();
        let spec = random_field(&grid, 6, 0.05, seed).unwrap();
        let f = op.fourier().synthesize(&spec).unwrap();
        let a = op.nonlinearity(&f).unwrap();
        let b = op.nonlinearity(&f.scaled(-1.0)).unwrap();
        let c = op.nonlinearity(&f.scaled(0.5)).unwrap();
        let m = a.max_abs();
        for i in 0..grid.len() {
            prop_assert!((a.samples()[i] + b.samples()[i]).abs() <= 1e-12 * m + 1e-300);
        }
        let ratio = c.max_abs() / m;
        prop_assert!((ratio / 0.125 - 1.0).abs() < 0.05, "ratio {ratio}");
    }
}
