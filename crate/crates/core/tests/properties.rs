//! Property tests for the correlation measures and source constructors.

use ghostcorr::gaussian::{entropy_f, TwoModeCovariance};
use ghostcorr::measurement::measurement_oracle;
use ghostcorr::snr;
use ghostcorr::sources::{self, AreaPair, SourceFamily};
use proptest::prelude::*;

fn physical_state() -> impl Strategy<Value = TwoModeCovariance> {
    (1.0..10.0f64, 1.0..10.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_filter_map(
        "physicality gate",
        |(a, b, cf, df)| {
            let bound = (a * b).sqrt();
            TwoModeCovariance::new(a, b, cf * bound, df * bound).ok()
        },
    )
}

proptest! {
    #[test]
    fn correlations_well_formed(sigma in physical_state()) {
        let spectrum = sigma.symplectic_spectrum().unwrap();
        prop_assert!(spectrum.nu_minus >= 1.0 - 1e-12);
        prop_assert!(spectrum.nu_plus >= spectrum.nu_minus);
        let det_id = (spectrum.nu_plus * spectrum.nu_minus).powi(2);
        prop_assert!((det_id - sigma.det()).abs() <= 1e-10 * sigma.det().abs().max(1.0));

        let b = sigma.correlations().unwrap();
        prop_assert!(b.quantum >= 0.0);
        prop_assert!(b.classical >= 0.0);
        prop_assert_eq!(b.total, b.quantum + b.classical);
        prop_assert!(b.cond_det >= 1.0);
        let direct = sigma.mutual_information().unwrap();
        prop_assert!((b.total - direct).abs() <= 1e-12, "T {} vs direct {}", b.total, direct);
    }

    #[test]
    fn entropy_kernel_monotone(x in 1.0..50.0f64, dx in 0.01..5.0f64) {
        prop_assert!(entropy_f(x + dx).unwrap() > entropy_f(x).unwrap());
    }

    #[test]
    fn thermal_coarse_always_separable(mu in 0.0..50.0f64, r in 1u32..1000) {
        let sigma = sources::coarse_grained(SourceFamily::ThermalSplit, mu, r).unwrap();
        prop_assert!(!sigma.correlations().unwrap().entangled);
    }

    #[test]
    fn spdc_entanglement_boundary(mu in 0.001..50.0f64, r in 1u32..1000) {
        let threshold = 1.0 + 1.0 / mu;
        prop_assume!((r as f64 - threshold).abs() > 1e-6);
        let sigma = sources::coarse_grained(SourceFamily::Spdc, mu, r).unwrap();
        let expect = (r as f64) < threshold;
        prop_assert_eq!(sigma.correlations().unwrap().entangled, expect);
    }

    #[test]
    fn snr_ordering_and_bounds(mu in 0.001..100.0f64, m in 1u32..500, r in 1u32..500) {
        let thermal = snr::snr_thermal(mu, m, r).unwrap();
        let entangled = snr::snr_entangled(mu, m, r).unwrap();
        prop_assert!(entangled > thermal);
        prop_assert!(thermal > 0.0 && entangled < 1.0);
        prop_assert!(thermal <= snr::snr_high_illumination_limit(m, r) * (1.0 + 1e-12));
    }

    #[test]
    fn overlap_factor_in_unit_interval(a1 in 0.1..10.0f64, a2 in 0.1..10.0f64, f in 0.0..1.0f64) {
        let overlap = f * a1.min(a2);
        let areas = AreaPair::new(a1, a2, overlap).unwrap();
        let v = sources::overlap_factor(&areas);
        prop_assert!((0.0..=1.0).contains(&v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn oracle_tracks_closed_form(sigma in physical_state()) {
        let closed = sigma.optimal_conditional_determinant().unwrap();
        let oracle = measurement_oracle(&sigma, 80).unwrap();
        prop_assert!((closed - oracle).abs() <= 1e-5, "closed {closed} oracle {oracle}");
    }
}
