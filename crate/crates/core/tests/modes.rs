use proptest::prelude::*;
use topdc_core::constants::{omega_of, BAR, C};
use topdc_core::materials::{gas_index, MaterialDatabase, Medium};
use topdc_core::modes::{
    antiresonant_loss_estimate, capillary_mode, group_velocity_of, ingest_dispersion,
    solve_step_index, solve_step_index_full, FieldGrid, GridSpec, GuidedMode, ModeLabel,
    DEFAULT_GUARD_BAND,
};
use topdc_core::Error;

/// J_n(x) = (1/π) ∫₀^π cos(nτ − x sin τ) dτ, trapezoidal rule (spectrally
/// accurate for this periodic integrand).
fn j_oracle(n: i32, x: f64) -> f64 {
    let m = 4000;
    let h = std::f64::consts::PI / m as f64;
    let mut s = 0.5 * (1.0 + (n as f64 * std::f64::consts::PI).cos());
    for i in 1..m {
        let t = i as f64 * h;
        s += (n as f64 * t - x * t.sin()).cos();
    }
    s * h / std::f64::consts::PI
}

/// K_n(x) = ∫₀^∞ exp(−x cosh t) cosh(nt) dt.
fn k_oracle(n: i32, x: f64) -> f64 {
    let h: f64 = 2e-3;
    let mut s = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * t.cosh()).exp() * (n as f64 * t).cosh();
        s += v;
        if x * t.cosh() > 800.0 {
            break;
        }
        t += h;
    }
    s * h
}

/// Product form of the hybrid-mode characteristic equation, normalized.
fn hybrid_residual_oracle(a: f64, nco: f64, ncl: f64, lambda: f64, nu: i32, n: f64) -> f64 {
    let k = 2.0 * std::f64::consts::PI / lambda;
    let u = a * k * (nco * nco - n * n).sqrt();
    let w = a * k * (n * n - ncl * ncl).sqrt();
    let j = j_oracle(nu, u);
    let dj = 0.5 * (j_oracle(nu - 1, u) - j_oracle(nu + 1, u));
    let kk = k_oracle(nu, w);
    let dk = -0.5 * (k_oracle(nu - 1, w) + k_oracle(nu + 1, w));
    let eta_j = dj / (u * j);
    let eta_k = dk / (w * kk);
    let r = ncl * ncl / (nco * nco);
    let nu = nu as f64;
    let lhs = (eta_j + eta_k) * (eta_j + r * eta_k);
    let rhs = nu * nu * (1.0 / (u * u) + 1.0 / (w * w)) * (1.0 / (u * u) + r / (w * w));
    (lhs - rhs) / (lhs.abs() + rhs.abs())
}

fn silica() -> topdc_core::materials::MaterialModel {
    MaterialDatabase::embedded()
        .solid("silica")
        .unwrap()
        .clone()
}

#[test]
fn bessel_oracles_are_sane() {
    assert!((j_oracle(0, 2.404_825_557_695_773)).abs() < 1e-14);
    // K_0(1) = 0.42102443824070834 (Abramowitz and Stegun table 9.8).
    assert!((k_oracle(0, 1.0) - 0.421_024_438_240_708_34).abs() < 1e-12);
}

#[test]
fn taper_rod_he12_root_satisfies_independent_characteristic_equation() {
    let nco = silica().index(532e-9).unwrap();
    let n = solve_step_index(0.395e-6, nco, 1.0, 532e-9, ModeLabel::he(1, 2)).unwrap();
    // Independent scipy root of the same equation.
    assert!((n - 1.080_406_482_018_633_2).abs() < 1e-11, "{n}");
    let res = hybrid_residual_oracle(0.395e-6, nco, 1.0, 532e-9, 1, n);
    assert!(res.abs() < 1e-10, "{res}");
}

#[test]
fn phase_matched_rod_indices() {
    let s = silica();
    let d = 790.369_586_361_321_3e-9;
    let np = solve_step_index(
        d / 2.0,
        s.index(532e-9).unwrap(),
        1.0,
        532e-9,
        ModeLabel::he(1, 2),
    )
    .unwrap();
    let nt = solve_step_index(
        d / 2.0,
        s.index(1596e-9).unwrap(),
        1.0,
        1596e-9,
        ModeLabel::he(1, 1),
    )
    .unwrap();
    assert!((np - 1.080_656_949_810_103_5).abs() < 1e-11);
    assert!((nt - 1.080_656_949_808_834_5).abs() < 1e-11);
}

#[test]
fn large_core_approaches_core_index() {
    let n = solve_step_index(200e-6, 1.46, 1.45, 1e-6, ModeLabel::he(1, 1)).unwrap();
    assert!((1.46 - n) < 1e-3 && n < 1.46);
}

#[test]
fn te01_is_cut_off_just_below_first_bessel_zero() {
    let (nco, ncl, l) = (1.46f64, 1.0f64, 1e-6);
    let v = 2.404;
    let a = v / (2.0 * std::f64::consts::PI / l * (nco * nco - ncl * ncl).sqrt());
    assert!(matches!(
        solve_step_index(a, nco, ncl, l, ModeLabel::te(1)),
        Err(Error::ModeCutOff { .. })
    ));
}

#[test]
fn capillary_fundamental_in_vacuum() {
    let xe = MaterialDatabase::embedded().gas("Xe", 0.0, 293.15).unwrap();
    let a = 19.35e-6;
    let l = 1596e-9;
    let n = capillary_mode(a, &xe, l, ModeLabel::he(1, 1)).unwrap();
    let q = 2.404_825_557_695_773 * l / (2.0 * std::f64::consts::PI * a);
    assert!((n - (1.0 - q * q).sqrt()).abs() < 1e-15);
}

#[test]
fn capillary_large_core_limit() {
    let xe = MaterialDatabase::embedded()
        .gas("Xe", 5.0 * BAR, 293.15)
        .unwrap();
    let ng = gas_index(&xe, 1e-6).unwrap();
    let n = capillary_mode(1.0, &xe, 1e-6, ModeLabel::he(1, 1)).unwrap();
    assert!(n < ng && ng - n < 1e-12);
}

#[test]
fn capillary_index_increases_with_pressure() {
    let db = MaterialDatabase::embedded();
    let mut prev = 0.0;
    for i in 0..50 {
        let p = i as f64 * 0.3 * BAR;
        let g = db.gas("Xe", p, 293.15).unwrap();
        let n = capillary_mode(19.35e-6, &g, 532e-9, ModeLabel::he(1, 3)).unwrap();
        assert!(n > prev);
        assert!(n < gas_index(&g, 532e-9).unwrap());
        prev = n;
    }
}

#[test]
fn capillary_rejects_small_core() {
    let g = MaterialDatabase::embedded().gas("Xe", BAR, 293.15).unwrap();
    assert!(matches!(
        capillary_mode(1e-6, &g, 1.5e-6, ModeLabel::he(1, 1)),
        Err(Error::InvalidGeometry(_))
    ));
}

#[test]
fn capillary_group_velocity_matches_analytic_derivative() {
    let a = 19.35e-6;
    let mode = GuidedMode::capillary(
        ModeLabel::he(1, 1),
        a,
        Medium::vacuum(),
        (omega_of(2e-6), omega_of(0.4e-6)),
    )
    .unwrap();
    let u = 2.404_825_557_695_773;
    for l in [532e-9, 1e-6, 1596e-9] {
        let w = omega_of(l);
        let beta = ((w / C).powi(2) - (u / a).powi(2)).sqrt();
        let vg_exact = C * C * beta / w;
        let vg = group_velocity_of(&mode, w).unwrap();
        assert!((vg / vg_exact - 1.0).abs() < 1e-6, "{vg} vs {vg_exact}");
    }
}

#[test]
fn loss_estimates() {
    let ng = silica().index(532e-9).unwrap();
    let vis = antiresonant_loss_estimate(19.35e-6, 350e-9, 532e-9, ng, DEFAULT_GUARD_BAND).unwrap();
    // Independent numpy evaluation of the tube formula: 1.41333613 dB/m.
    assert!(
        (vis.db_per_m / 1.413_336_13 - 1.0).abs() < 1e-6,
        "{}",
        vis.db_per_m
    );
    assert!(!vis.on_resonance);
    // Order-of-magnitude agreement with the 1 dB/m level.
    assert!(vis.db_per_m < 10.0);
    let ng_ir = silica().index(1596e-9).unwrap();
    let ir =
        antiresonant_loss_estimate(19.35e-6, 350e-9, 1596e-9, ng_ir, DEFAULT_GUARD_BAND).unwrap();
    assert!(
        (ir.db_per_m / 35.462_429_49 - 1.0).abs() < 1e-6,
        "{}",
        ir.db_per_m
    );
    let wide =
        antiresonant_loss_estimate(38.7e-6, 350e-9, 1596e-9, ng_ir, DEFAULT_GUARD_BAND).unwrap();
    assert!(wide.db_per_m < ir.db_per_m);
}

#[test]
fn step_index_fields_are_normalized_and_orthogonal() {
    let s = silica();
    let l = 532e-9;
    let ncl = s.index(l).unwrap();
    let nco = (ncl * ncl + 0.1226f64.powi(2)).sqrt();
    let a = 4.1e-6;
    let spec = GridSpec::square(256, 3.0 * a).unwrap();
    let s11 = solve_step_index_full(a, nco, ncl, l, ModeLabel::he(1, 1)).unwrap();
    let s12 = solve_step_index_full(a, nco, ncl, l, ModeLabel::he(1, 2)).unwrap();
    let f11 = FieldGrid::step_index(spec, a, nco, ncl, ModeLabel::he(1, 1), &s11).unwrap();
    let f12 = FieldGrid::step_index(spec, a, nco, ncl, ModeLabel::he(1, 2), &s12).unwrap();
    assert!(f11.is_normalized() && f12.is_normalized());
    assert!(f11.inner(&f12).unwrap().norm_sqr() < 1e-6);
}

#[test]
fn sampled_beta_is_increasing() {
    let s = silica();
    let mode = GuidedMode::step_index(
        ModeLabel::he(1, 1),
        0.395e-6,
        Medium::Solid(s),
        Medium::vacuum(),
        (omega_of(1.9e-6), omega_of(1.3e-6)),
    )
    .unwrap();
    let (_, beta) = mode.sample(64).unwrap();
    assert!(beta.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn table_round_trip_through_file() {
    let mode = GuidedMode::capillary(
        ModeLabel::he(1, 1),
        19.35e-6,
        Medium::vacuum(),
        (omega_of(2e-6), omega_of(1e-6)),
    )
    .unwrap();
    let table = mode.to_table(40, "tube").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, table.to_csv()).unwrap();
    let back = ingest_dispersion(&path).unwrap();
    assert_eq!(back.rows.len(), 40);
    let tab = GuidedMode::tabulated(&back, ModeLabel::he(1, 1)).unwrap();
    let w = omega_of(1.5e-6);
    assert!((tab.beta(w).unwrap() / mode.beta(w).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn missing_table_file_is_io_error() {
    assert!(matches!(
        ingest_dispersion(std::path::Path::new("/nonexistent/table.csv")),
        Err(Error::Io { .. })
    ));
}

fn label_strategy() -> impl Strategy<Value = ModeLabel> {
    prop_oneof![
        (1u32..4, 1u32..4).prop_map(|(n, m)| ModeLabel::he(n, m)),
        (1u32..3, 1u32..3).prop_map(|(n, m)| ModeLabel::eh(n, m)),
        (1u32..3).prop_map(ModeLabel::te),
        (1u32..3).prop_map(ModeLabel::tm),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_solve_has_small_residual_and_bounded_index(
        a in 0.2e-6f64..10e-6,
        nco in 1.3f64..2.0,
        contrast in 0.002f64..0.6,
        l in 0.4e-6f64..2.0e-6,
        label in label_strategy(),
    ) {
        let ncl = (nco - contrast).max(1.0);
        prop_assume!(nco > ncl);
        match solve_step_index_full(a, nco, ncl, l, label) {
            Ok(s) => {
                prop_assert!(s.residual.abs() < 1e-10);
                prop_assert!(s.n_eff > ncl && s.n_eff < nco);
            }
            Err(Error::ModeCutOff { .. }) | Err(Error::InvalidGeometry(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }
}
