use num_complex::Complex64;
use proptest::prelude::*;
use topdc_core::constants::{C, EPSILON_0};
use topdc_core::modes::{FieldGrid, GridSpec};
use topdc_core::overlap::{
    effective_area_4mode, effective_area_spm, effective_area_xpm, gamma_spm, gamma_squared_seeded,
    gamma_squared_spontaneous, gamma_xpm, nonlinear_mismatch, OverlapSet, OverlapSign,
};
use topdc_core::Error;

fn spec() -> GridSpec {
    GridSpec::square(256, 12e-6).unwrap()
}

#[test]
fn gaussian_areas_equal_pi_w_squared() {
    let w = 2e-6;
    let g = FieldGrid::gaussian(spec(), w).unwrap();
    let expected = std::f64::consts::PI * w * w;
    let spm = effective_area_spm(&g).unwrap();
    let four = effective_area_4mode(&g, &g, &g, &g, OverlapSign::Strict).unwrap();
    assert!(
        (spm / expected - 1.0).abs() < 1e-6,
        "{spm:e} vs {expected:e}"
    );
    assert!((four / spm - 1.0).abs() < 1e-12);
}

#[test]
fn unequal_gaussians_xpm_area() {
    // ∫|F_a|²|F_b|² for normalized Gaussians is 2/(π(w_a² + w_b²)).
    let (wa, wb) = (1.5e-6, 3e-6);
    let a = FieldGrid::gaussian(spec(), wa).unwrap();
    let b = FieldGrid::gaussian(spec(), wb).unwrap();
    let area = effective_area_xpm(&a, &b).unwrap();
    let expected = 0.5 * std::f64::consts::PI * (wa * wa + wb * wb);
    assert!((area / expected - 1.0).abs() < 1e-6);
    assert_eq!(area, effective_area_xpm(&b, &a).unwrap());
}

#[test]
fn common_translation_leaves_areas_unchanged() {
    let a = FieldGrid::gaussian(spec(), 1.5e-6).unwrap();
    let b = FieldGrid::gaussian(spec(), 2.5e-6).unwrap();
    let (sa, sb) = (a.shifted(7, -5), b.shifted(7, -5));
    let base = effective_area_4mode(&a, &b, &b, &b, OverlapSign::Strict).unwrap();
    let moved = effective_area_4mode(&sa, &sb, &sb, &sb, OverlapSign::Strict).unwrap();
    assert!((moved / base - 1.0).abs() < 1e-9);
    let base = effective_area_xpm(&a, &b).unwrap();
    let moved = effective_area_xpm(&sa, &sb).unwrap();
    assert!((moved / base - 1.0).abs() < 1e-9);
}

#[test]
fn global_phase_on_photon_fields_only_matters_for_strict_sign() {
    let g = FieldGrid::gaussian(spec(), 2e-6).unwrap();
    let mut flipped = g.clone();
    for v in &mut flipped.values {
        *v = -*v;
    }
    assert!(matches!(
        effective_area_4mode(&g, &flipped, &g, &g, OverlapSign::Strict),
        Err(Error::NonPositiveOverlap(_))
    ));
    let abs = effective_area_4mode(&g, &flipped, &g, &g, OverlapSign::Absolute).unwrap();
    let strict = effective_area_4mode(&g, &g, &g, &g, OverlapSign::Strict).unwrap();
    assert!((abs / strict - 1.0).abs() < 1e-12);
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = FieldGrid::gaussian(spec(), 2e-6).unwrap();
    let b = FieldGrid::gaussian(GridSpec::square(128, 12e-6).unwrap(), 2e-6).unwrap();
    assert!(effective_area_spm(&a).is_ok());
    assert!(matches!(
        effective_area_xpm(&a, &b),
        Err(Error::GridMismatch)
    ));
    assert!(matches!(
        effective_area_4mode(&a, &a, &b, &a, OverlapSign::Strict),
        Err(Error::GridMismatch)
    ));
}

#[test]
fn disjoint_fields_have_no_xpm_area() {
    let s = spec();
    let left = FieldGrid::from_fn(s, |x, _| {
        Complex64::new(if x < -6e-6 { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    let right = FieldGrid::from_fn(s, |x, _| {
        Complex64::new(if x > 6e-6 { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    assert!(matches!(
        effective_area_xpm(&left, &right),
        Err(Error::DisjointModes)
    ));
}

#[test]
fn computed_set_uses_each_field() {
    let p = FieldGrid::gaussian(spec(), 1.5e-6).unwrap();
    let f = FieldGrid::gaussian(spec(), 2.5e-6).unwrap();
    let set = OverlapSet::computed(&p, [&f, &f, &f], OverlapSign::Strict).unwrap();
    assert_eq!(set.a_eff_spm, effective_area_spm(&p).unwrap());
    assert_eq!(set.a_eff_xpm[1], effective_area_xpm(&p, &f).unwrap());
    assert!(OverlapSet::supplied(0.0).is_err());
}

#[test]
fn coupling_constants_match_direct_evaluation() {
    let (chi, wp, np, a) = (2.5e-22, 3.54e15, 1.45, 7.89e-12);
    let spm = 3.0 * chi * wp / (4.0 * EPSILON_0 * C * C * np * np * a);
    assert!((gamma_spm(chi, wp, np, a) / spm - 1.0).abs() < 1e-14);
    let g2 = gamma_squared_spontaneous(chi, wp, np, 1.44, 1.44, 1.44, a);
    let direct =
        9.0 * chi * chi * wp * wp / (EPSILON_0.powi(2) * C.powi(4) * np * 1.44f64.powi(3) * a * a);
    assert!((g2 / direct - 1.0).abs() < 1e-13);
    assert_eq!(
        gamma_squared_seeded(chi, wp, np, 1.44, 1.44, 1.44, a),
        gamma_squared_spontaneous(chi, wp, np, 1.44, 1.44, 1.44, a)
    );
}

proptest! {
    #[test]
    fn gamma_scales_as_chi_over_area(chi in 1e-24f64..1e-20, a in 1e-12f64..1e-9, k in 0.1f64..10.0) {
        let (wp, np, nn) = (3.5e15, 1.45, 1.44);
        let g = gamma_xpm(chi, wp / 3.0, np, nn, a);
        prop_assert!((gamma_xpm(k * chi, wp / 3.0, np, nn, a) / (k * g) - 1.0).abs() < 1e-12);
        prop_assert!((gamma_xpm(chi, wp / 3.0, np, nn, k * a) * k / g - 1.0).abs() < 1e-12);
        let g2 = gamma_squared_spontaneous(chi, wp, np, nn, nn, nn, a);
        prop_assert!((gamma_squared_spontaneous(k * chi, wp, np, nn, nn, nn, a) / (k * k * g2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kerr_mismatch_is_linear_in_power(gp in 0.0f64..10.0, gx in 0.0f64..10.0, p in 0.0f64..1e6) {
        let b = nonlinear_mismatch(gp, [gx; 3], p);
        prop_assert!((b - (gp - 6.0 * gx) * p).abs() <= 1e-12 * (gp + 6.0 * gx) * p.max(1.0));
        prop_assert_eq!(nonlinear_mismatch(gp, [gx; 3], 0.0), 0.0);
    }
}
