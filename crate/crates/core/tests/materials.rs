use proptest::prelude::*;
use topdc_core::constants::BAR;
use topdc_core::materials::{effective_chi3, gas_index, solid_index, MaterialDatabase};
use topdc_core::Error;

fn db() -> MaterialDatabase {
    MaterialDatabase::embedded()
}

/// Malitson fit written out independently of the data file.
fn silica_oracle(lambda_um: f64) -> f64 {
    let l2 = lambda_um * lambda_um;
    (1.0 + 0.6961663 * l2 / (l2 - 0.0684043f64.powi(2))
        + 0.4079426 * l2 / (l2 - 0.1162414f64.powi(2))
        + 0.8974794 * l2 / (l2 - 9.896161f64.powi(2)))
    .sqrt()
}

#[test]
fn silica_at_one_micron() {
    let db = db();
    let silica = db.solid("silica").unwrap();
    let n = solid_index(silica, 1.0e-6).unwrap();
    // Independent scipy evaluation of the same fit: 1.450417409406875.
    assert!((n - 1.450_417_409_406_875).abs() < 1e-12, "{n}");
    assert!((n - silica_oracle(1.0)).abs() < 1e-13);
}

#[test]
fn silica_outside_fit_is_rejected() {
    let db = db();
    let silica = db.solid("silica").unwrap();
    assert!(matches!(
        solid_index(silica, 20e-6),
        Err(Error::OutOfRange { .. })
    ));
}

#[test]
fn xenon_index_matches_direct_formula() {
    let xe = db().gas("Xe", BAR, 293.0).unwrap();
    let n = gas_index(&xe, 532e-9).unwrap();
    // Bideau-Mehu sum at 532 nm rescaled from 273.15 K / 101325 Pa to
    // 1 bar / 293 K by ideal-gas density, evaluated in Python.
    assert!((n - 1.000_650_159_494_549).abs() < 1e-14, "{n}");
}

#[test]
fn xenon_vacuum_limit_is_exact() {
    let xe = db().gas("Xe", 0.0, 293.15).unwrap();
    for l in [200e-9, 532e-9, 1596e-9, 2.4e-6] {
        assert_eq!(gas_index(&xe, l).unwrap(), 1.0);
    }
    assert_eq!(effective_chi3(&xe), 0.0);
}

#[test]
fn xenon_density_ratio() {
    let db = db();
    let p1 = db.gas("Xe", BAR, 293.0).unwrap();
    let p2 = db.gas("Xe", 2.0 * BAR, 293.0).unwrap();
    let r = (gas_index(&p2, 532e-9).unwrap() - 1.0) / (gas_index(&p1, 532e-9).unwrap() - 1.0);
    assert!((r - 2.0).abs() < 0.02);
}

#[test]
fn xenon_chi3_reference_values() {
    let db = db();
    let ref_state = db.gas("Xe", BAR, 293.15).unwrap();
    assert!((effective_chi3(&ref_state) - 6.4e-26).abs() < 1e-40);
    let at_8_7 = db.gas("Xe", 8.7 * BAR, 293.0).unwrap();
    let chi = effective_chi3(&at_8_7);
    assert!((chi / (8.7 * 6.4e-26) - 1.0).abs() < 1e-3, "{chi}");
}

#[test]
fn unknown_species() {
    assert!(matches!(
        db().gas("Kr", BAR, 293.0),
        Err(Error::UnknownSpecies(_))
    ));
}

#[test]
fn silica_chi3_values_are_both_kept() {
    let db = db();
    let s = db.solid("silica").unwrap();
    assert_eq!(s.chi3, Some(2.5e-22));
    assert_eq!(s.chi3_alternates, vec![1.0e-22]);
}

#[test]
fn solids_index_above_one_and_smooth() {
    let db = db();
    for m in db.solids() {
        let (lo, hi) = m.valid_range;
        let n = 1000;
        let h = (hi - lo) / n as f64;
        for i in 0..=n {
            let l = if i == n { hi } else { lo + h * i as f64 };
            let v = m.index(l).unwrap();
            assert!(v > 1.0, "{} at {l}", m.name);
            let (a, b) = ((l - 0.25 * h).max(lo), (l + 0.25 * h).min(hi));
            let d = (m.index(b).unwrap() - m.index(a).unwrap()) / (b - a);
            assert!(d.is_finite(), "{} derivative at {l}", m.name);
        }
    }
}

proptest! {
    #[test]
    fn gas_chi3_is_linear_in_pressure(p in 0.0f64..30.0, t in 200.0f64..400.0) {
        let db = db();
        let a = db.gas("Xe", p * BAR, t).unwrap();
        let b = db.gas("Xe", 2.0 * p * BAR, t).unwrap();
        prop_assert!((effective_chi3(&b) - 2.0 * effective_chi3(&a)).abs() <= 1e-15 * effective_chi3(&b).abs());
    }

    #[test]
    fn gas_index_is_monotone_in_pressure(p in 0.0f64..20.0, dp in 1e-3f64..5.0, l in 0.2e-6f64..2.4e-6) {
        let db = db();
        let a = db.gas("Xe", p * BAR, 293.15).unwrap();
        let b = db.gas("Xe", (p + dp) * BAR, 293.15).unwrap();
        prop_assert!(gas_index(&b, l).unwrap() > gas_index(&a, l).unwrap());
    }

    #[test]
    fn vacuum_limit_holds_for_every_wavelength(l in 0.15e-6f64..2.5e-6) {
        let xe = db().gas("Xe", 0.0, 293.15).unwrap();
        prop_assert_eq!(gas_index(&xe, l).unwrap(), 1.0);
    }
}
