use proptest::prelude::*;
use topdc_core::constants::omega_of;
use topdc_core::materials::{FiberSpec, MaterialDatabase};
use topdc_core::modes::{solve_step_index, GridSpec, GuidedMode, ModeLabel};
use topdc_core::taper::{
    adiabatic_limit, beat_period, check_profile, default_mode_pairs, fiber_beat_period,
    fiber_mode_field, launch_overlap, ModePair, TaperProfile, TransitionModel,
};
use topdc_core::Error;

const PUMP: f64 = 532e-9;

fn fiber(name: &str) -> FiberSpec {
    MaterialDatabase::embedded().fiber(name).unwrap().clone()
}

fn model() -> TransitionModel {
    TransitionModel::new(fiber("SMF28"))
}

#[test]
fn smf28_beat_period() {
    // Independent vector-mode root finder: 212.41043 µm.
    let smf = fiber("SMF28");
    let p = fiber_beat_period(&smf, ModeLabel::he(1, 1), ModeLabel::he(1, 2), PUMP).unwrap();
    assert!((p / 212.41043088747497e-6 - 1.0).abs() < 1e-6, "{p:e}");
    assert!((p / 230e-6 - 1.0).abs() < 0.15);
    let q = fiber_beat_period(&smf, ModeLabel::he(1, 2), ModeLabel::he(1, 1), PUMP).unwrap();
    assert_eq!(p, q);
}

#[test]
fn beat_period_of_analytic_modes() {
    let w = omega_of(PUMP);
    let a = GuidedMode::analytic(
        ModeLabel::he(1, 1),
        w,
        vec![1e7 + 2.0 * std::f64::consts::PI],
        (0.5 * w, 2.0 * w),
    )
    .unwrap();
    let b = GuidedMode::analytic(ModeLabel::he(1, 2), w, vec![1e7], (0.5 * w, 2.0 * w)).unwrap();
    assert!((beat_period(&a, &b, w).unwrap() - 1.0).abs() < 1e-8);
    assert!(matches!(
        beat_period(&b, &b, w),
        Err(Error::DegenerateModes)
    ));
}

#[test]
fn constant_profile_passes() {
    let profile = TaperProfile::linear(20e-6, 20e-6, 0.01, 11).unwrap();
    let report = check_profile(&profile, &default_mode_pairs(PUMP, 3.0 * PUMP), &model()).unwrap();
    assert!(report.pass);
    assert!(report.samples.iter().all(|s| s.angle == 0.0));
    assert_eq!(report.worst_margin, None);
}

#[test]
fn linear_taper_steeper_than_every_limit_fails() {
    let pairs = default_mode_pairs(PUMP, 3.0 * PUMP);
    let m = model();
    let (r0, r1) = (10e-6, 2e-6);
    // Largest limit anywhere along the taper, then a slope above it.
    let max = (0..=20)
        .map(|k| r1 + (r0 - r1) * k as f64 / 20.0)
        .flat_map(|r| pairs.iter().map(move |p| (r, p)))
        .filter_map(|(r, p)| m.limit(r, p).unwrap())
        .fold(0.0, f64::max);
    let length = 0.5 * (r0 - r1) / max;
    let profile = TaperProfile::linear(r0, r1, length, 21).unwrap();
    let report = check_profile(&profile, &pairs, &m).unwrap();
    assert!(!report.pass);
    assert!(report.worst_margin.unwrap() < 1.0);
}

#[test]
fn profile_tangent_to_the_limit_curve() {
    let pair = ModePair {
        wavelength: PUMP,
        a: ModeLabel::he(1, 2),
        b: ModeLabel::he(1, 3),
    };
    let m = model();
    let rb = 5e-6;
    let limit = m.limit(rb, &pair).unwrap().unwrap();
    // Flat shoulders around one sloped step; the centered angle at the
    // middle sample is the steepest and equals the limit there.
    let build = |scale: f64| {
        let h = 1e-7;
        let d = limit * h * scale;
        let radii = [rb + d, rb + d, rb + d, rb, rb - d, rb - d, rb - d];
        TaperProfile::new(
            radii
                .iter()
                .enumerate()
                .map(|(i, &r)| (i as f64 * h, r))
                .collect(),
        )
        .unwrap()
    };
    let report = check_profile(&build(1.0), &[pair], &m).unwrap();
    let mid = &report.samples[3];
    assert!((mid.angle / limit - 1.0).abs() < 1e-9);
    let others_clear = report
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 3)
        .all(|(_, s)| s.margin.map_or(true, |g| g > 1.5));
    assert!(others_clear);
    assert_eq!(report.pass, mid.angle < limit);
    assert!(!check_profile(&build(1.0 + 1e-9), &[pair], &m).unwrap().pass);
    assert!(check_profile(&build(1.0 - 1e-9), &[pair], &m).unwrap().pass);
}

#[test]
fn halving_the_length_doubles_every_angle() {
    let samples: Vec<(f64, f64)> = (0..30)
        .map(|i| {
            let z = i as f64 * 2e-4;
            (z, 2e-6 + 60e-6 * (-z / 2e-3).exp())
        })
        .collect();
    let full = TaperProfile::new(samples.clone()).unwrap();
    let half = TaperProfile::new(samples.iter().map(|&(z, r)| (0.5 * z, r)).collect()).unwrap();
    let pairs = default_mode_pairs(PUMP, 3.0 * PUMP);
    let a = check_profile(&full, &pairs, &model()).unwrap();
    let b = check_profile(&half, &pairs, &model()).unwrap();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_eq!(y.angle, 2.0 * x.angle);
        assert_eq!(x.limits, y.limits);
    }
}

#[test]
fn report_verdict_matches_samples() {
    let profile = TaperProfile::linear(62.5e-6, 0.4e-6, 0.02, 40).unwrap();
    let report = check_profile(&profile, &default_mode_pairs(PUMP, 3.0 * PUMP), &model()).unwrap();
    let expected = report
        .samples
        .iter()
        .all(|s| s.limits.iter().flatten().all(|&l| s.angle < l));
    assert_eq!(report.pass, expected);
    let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert_eq!(json["samples"].as_array().unwrap().len(), 40);
}

#[test]
fn short_profiles_are_rejected() {
    assert!(matches!(
        TaperProfile::new(vec![(0.0, 1e-6), (1.0, 1e-6)]),
        Err(Error::ProfileTooShort(2))
    ));
    assert!(TaperProfile::new(vec![(0.0, 1e-6), (1.0, 2e-6), (2.0, 1e-6)]).is_err());
}

#[test]
fn profile_file_round_trip() {
    let profile = TaperProfile::linear(62.5e-6, 0.4e-6, 0.02, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    std::fs::write(&path, format!("# transition\n{}", profile.to_csv())).unwrap();
    let back = TaperProfile::read(&path).unwrap();
    assert_eq!(back.samples.len(), 9);
    for (a, b) in back.samples.iter().zip(&profile.samples) {
        assert!((a.0 - b.0).abs() <= 1e-15 * b.0.abs().max(1e-12));
        assert!((a.1 / b.1 - 1.0).abs() < 1e-14);
    }
    assert!(matches!(
        TaperProfile::parse("x,y\n0,1\n", "t"),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn rod_limit_curve_matches_direct_solver() {
    // Below the rod threshold: silica rod in vacuum, HE12 against HE13.
    let pair = ModePair {
        wavelength: PUMP,
        a: ModeLabel::he(1, 2),
        b: ModeLabel::he(1, 3),
    };
    let m = model();
    let nglass = MaterialDatabase::embedded()
        .solid("silica")
        .unwrap()
        .index(PUMP)
        .unwrap();
    let k = 2.0 * std::f64::consts::PI / PUMP;
    let radii: Vec<f64> = (0..20)
        .map(|i| 1.2e-6 * (12.0f64).powf(i as f64 / 19.0))
        .collect();
    let limits: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let direct = r / (2.0 * std::f64::consts::PI)
                * k
                * (solve_step_index(r, nglass, 1.0, PUMP, pair.a).unwrap()
                    - solve_step_index(r, nglass, 1.0, PUMP, pair.b).unwrap())
                .abs();
            let l = m.limit(r, &pair).unwrap().unwrap();
            assert!((l / direct - 1.0).abs() < 1e-12);
            l
        })
        .collect();
    // Cladding modes far from cutoff split as 1/ρ², so the limit grows
    // toward small radii in the rod section.
    assert!(limits.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn core_mode_limit_falls_toward_the_waist() {
    // Pump HE11/HE12 pair while the scaled core still guides HE11.
    let pair = default_mode_pairs(PUMP, 3.0 * PUMP)[0];
    let m = model();
    let radii: Vec<f64> = (0..20).map(|i| 44e-6 - i as f64 * (26e-6 / 19.0)).collect();
    let limits: Vec<f64> = radii
        .iter()
        .map(|&r| m.limit(r, &pair).unwrap().unwrap())
        .collect();
    assert!(limits.windows(2).all(|w| w[1] < w[0]), "{limits:?}");
}

fn launch_mode(name: &str, label: ModeLabel) -> GuidedMode {
    let f = fiber(name);
    let w = omega_of(PUMP);
    let spec = GridSpec::square(400, 16e-6).unwrap();
    GuidedMode::step_index(
        label,
        f.core_radius,
        f.core_medium(),
        f.cladding_medium(),
        (0.9 * w, 1.1 * w),
    )
    .unwrap()
    .with_field(fiber_mode_field(&f, label, PUMP, spec).unwrap())
}

#[test]
fn launch_overlaps() {
    let hp = launch_mode("460HP", ModeLabel::he(1, 1));
    let s11 = launch_mode("SMF28", ModeLabel::he(1, 1));
    let s12 = launch_mode("SMF28", ModeLabel::he(1, 2));
    assert!((launch_overlap(&hp, &hp).unwrap() - 1.0).abs() < 1e-12);
    assert!(launch_overlap(&s11, &s12).unwrap() < 1e-6);
    let o11 = launch_overlap(&hp, &s11).unwrap();
    let o12 = launch_overlap(&hp, &s12).unwrap();
    assert_eq!(o12, launch_overlap(&s12, &hp).unwrap());
    // Scalar LP-mode oracle from Bessel-function radial integrals.
    assert!((o11 / 0.6579800969548643 - 1.0).abs() < 0.03, "{o11}");
    assert!((o12 / 0.25590399388555746 - 1.0).abs() < 0.03, "{o12}");
    assert!((o12 / o11 / 0.3889236088901209 - 1.0).abs() < 0.03);
    let bare = GuidedMode {
        field: None,
        ..hp.clone()
    };
    assert!(matches!(
        launch_overlap(&bare, &s11),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn launch_overlap_ignores_global_phase() {
    let hp = launch_mode("460HP", ModeLabel::he(1, 1));
    let s12 = launch_mode("SMF28", ModeLabel::he(1, 2));
    let mut rotated = s12.clone();
    if let Some(f) = rotated.field.as_mut() {
        let phase = num_complex::Complex64::from_polar(1.0, 0.7);
        f.values.iter_mut().for_each(|v| *v *= phase);
    }
    let a = launch_overlap(&hp, &s12).unwrap();
    let b = launch_overlap(&hp, &rotated).unwrap();
    assert!((a - b).abs() < 1e-12);
}

proptest! {
    #[test]
    fn limit_is_symmetric_and_linear_in_radius(r in 1e-7f64..1e-4, a in 1e5f64..1e7, b in 1e5f64..1e7, k in 0.1f64..10.0) {
        prop_assert_eq!(adiabatic_limit(r, a, b), adiabatic_limit(r, b, a));
        let scaled = adiabatic_limit(k * r, a, b);
        prop_assert!((scaled - k * adiabatic_limit(r, a, b)).abs() <= 1e-12 * scaled.abs());
    }
}
