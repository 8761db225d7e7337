use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use topdc_core::constants::omega_of;
use topdc_core::materials::{MaterialDatabase, Medium};
use topdc_core::modes::{GuidedMode, ModeLabel};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn topdc(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topdc"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .env_remove("TOPDC_DATA")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Config file written into `dir`, next to a copy of the shipped profile.
fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    std::fs::copy(
        examples().join("taper_profile.csv"),
        dir.join("taper_profile.csv"),
    )
    .unwrap();
    path
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

const TAPER_PROCESS: &str = r#"
[platform.taper]
diameter = 790.3695863613e-9

[process]
pump_power = 0.02
pump_wavelength = 532e-9
fiber_length = 0.1
detection_bandwidth = 150e-9
grid_resolution = 41
chi3 = 2.5e-22
effective_area = 7.89e-12
"#;

#[test]
fn taper_modes_table_has_four_rows() {
    let out = tempfile::tempdir().unwrap();
    let o = topdc(&["modes"], &examples().join("taper_modes.toml"), out.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.path().join("modes.csv")).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("HE12,HE12,1.596e-6,1596,cut_off"));
}

#[test]
fn hollow_modes_match_library_and_golden_file() {
    let out = tempfile::tempdir().unwrap();
    let config = examples().join("hollow_modes.toml");
    let o = topdc(&["modes"], &config, out.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("modes.json")).unwrap())
            .unwrap();
    let db = MaterialDatabase::embedded();
    let gas = db
        .gas(
            "Xe",
            929653.22,
            topdc_core::materials::REFERENCE_TEMPERATURE,
        )
        .unwrap();
    for row in json["result"].as_array().unwrap() {
        let label: ModeLabel = row["label"].as_str().unwrap().parse().unwrap();
        let lambda = row["wavelength_m"].as_f64().unwrap();
        let w = omega_of(lambda);
        let mode = GuidedMode::capillary(
            label,
            19.35e-6,
            Medium::Gas(gas.clone()),
            (0.9 * w, 1.1 * w),
        )
        .unwrap();
        let n = row["n_eff"].as_f64().unwrap();
        assert!((n - mode.n_eff(w).unwrap()).abs() < 1e-12 * n);
    }
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hollow_modes.csv"),
    )
    .unwrap();
    assert_eq!(
        std::fs::read_to_string(out.path().join("modes.csv")).unwrap(),
        golden
    );
}

#[test]
fn missing_material_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "material_data = \"no/such/materials.toml\"\n[platform.taper]\ndiameter = 790e-9\n[modes]\nwavelengths = [532e-9]\nlabels = [\"HE11\"]\n",
    );
    let o = topdc(&["modes"], &config, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("no/such/materials.toml"),
        "{}",
        stderr(&o)
    );
    assert!(stderr(&o).contains("material_data"));
}

#[test]
fn data_path_from_environment_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[platform.taper]\ndiameter = 790e-9\n[modes]\nwavelengths = [532e-9]\nlabels = [\"HE11\"]\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_topdc"))
        .args(["modes", "--quiet", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .env("TOPDC_DATA", dir.path().join("elsewhere.toml"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("TOPDC_DATA"));
}

#[test]
fn modes_outside_the_tabulated_domain_are_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[platform.hybrid]\n[modes]\nwavelengths = [3.5e-6]\n",
    );
    let o = topdc(&["modes"], &config, &dir.path().join("out"));
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn config_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("", "platform"),
        ("[platform.taper]\ndiameter = 790e-9\n[platform.hybrid]\n[modes]\nwavelengths = [532e-9]\nlabels = [\"HE11\"]\n", "exactly one"),
        ("[platform.hybrid]\n[sweep]\nparameter = \"diameter\"\nvalues = [1e-6]\n", "sweep.parameter"),
        ("[platform.taper]\ndiameter = 790e-9\n[modes]\nwavelengths = [532e-9]\nlabels = [\"XY11\"]\n", "modes.labels"),
        ("[platform.taper]\ndiameter = 790e-9\nwaist = 1\n", "waist"),
    ];
    for (text, needle) in cases {
        let config = write_config(dir.path(), text);
        let o = topdc(&["modes"], &config, &dir.path().join("out"));
        assert_eq!(code(&o), 2, "{text}");
        assert!(stderr(&o).contains(needle), "{needle}: {}", stderr(&o));
    }
}

#[test]
fn phase_match_reports_roots_and_empty_scans() {
    let out = tempfile::tempdir().unwrap();
    let o = topdc(
        &["phase-match"],
        &examples().join("taper_scan.toml"),
        out.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.path().join("phase_match.json")).unwrap(),
    )
    .unwrap();
    let roots = json["result"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0]["value_display"].as_f64().unwrap() - 790.0).abs() < 10.0);

    let dir = tempfile::tempdir().unwrap();
    let scan = |start: f64, end: f64| {
        format!(
            "[platform.taper]\ndiameter = 790e-9\n[scan]\nparameter = \"diameter\"\nstart = {start:e}\nend = {end:e}\npoints = 100\npump_wavelength = 532e-9\n"
        )
    };
    let config = write_config(dir.path(), &scan(600e-9, 700e-9));
    let o = topdc(&["phase-match"], &config, &dir.path().join("none"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("none/phase_match.csv")).unwrap();
    assert!(csv.contains("# status: no roots"));
    let config = write_config(dir.path(), &scan(700e-9, 700e-9));
    assert_eq!(
        code(&topdc(&["phase-match"], &config, &dir.path().join("empty"))),
        2
    );
}

#[test]
fn rate_validation_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let both = format!(
        "{TAPER_PROCESS}cw = true\n[process.seed]\npower = 1.0\nwavelength = 1.6e-6\npulse_duration = 2e-11\n"
    );
    let o = topdc(
        &["rate"],
        &write_config(dir.path(), &both),
        &dir.path().join("a"),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("process.cw"));

    let coarse = format!(
        "{}max_resolution = 5\n",
        TAPER_PROCESS.replace("grid_resolution = 41", "grid_resolution = 3")
    );
    let o = topdc(
        &["rate"],
        &write_config(dir.path(), &coarse),
        &dir.path().join("b"),
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));

    let fixed = format!("{TAPER_PROCESS}refine = false\n");
    let o = topdc(
        &["rate"],
        &write_config(dir.path(), &fixed),
        &dir.path().join("c"),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c/rate.json")).unwrap())
            .unwrap();
    let entry = &json["result"][0];
    assert_eq!(entry["kind"], "spontaneous");
    assert_eq!(entry["resolution"], 41);
    assert!(entry["value"].as_f64().unwrap() > 0.0);
    assert_eq!(
        json["provenance"]["config_sha256"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn spectral_density_writes_one_grid_per_sweep_value() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{TAPER_PROCESS}[sweep]\nparameter = \"diameter\"\nvalues = [790e-9, 791e-9, 792e-9]\n"
    );
    let config = write_config(dir.path(), &text);
    let out = dir.path().join("grids");
    let o = topdc(&["spectral-density"], &config, &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names: Vec<String> = files(&out).into_keys().collect();
    for d in ["7.9e-7", "7.91e-7", "7.92e-7"] {
        assert!(
            names.contains(&format!("spectral_density_diameter_{d}.csv")),
            "{names:?}"
        );
        assert!(names.contains(&format!("spectral_density_diameter_{d}.json")));
    }
    let hash = topdc_core::provenance::sha256_hex(text.as_bytes());
    for (name, bytes) in files(&out) {
        assert!(
            String::from_utf8(bytes).unwrap().contains(&hash),
            "{name} lacks the config hash"
        );
    }
    let o = topdc(
        &["spectral-density", "--grid", "0"],
        &config,
        &dir.path().join("zero"),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn spectral_density_outside_the_tables_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[platform.hybrid]\n[process]\npump_power = 0.1\npump_wavelength = 7.0e-7\nfiber_length = 0.1\ndetection_bandwidth = 150e-9\ngrid_resolution = 21\nchi3 = 1.15e-21\neffective_area = 218e-12\n";
    let o = topdc(
        &["spectral-density"],
        &write_config(dir.path(), text),
        &dir.path().join("out"),
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn failing_taper_is_a_successful_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[platform.taper]\ndiameter = 790e-9\n[taper_check]\nfiber = \"SMF28\"\npump_wavelength = 532e-9\n[taper_check.linear]\nstart_radius = 62.5e-6\nend_radius = 0.4e-6\nlength = 1e-3\nsamples = 30\n";
    let o = topdc(
        &["taper-check", "--format", "json"],
        &write_config(dir.path(), text),
        &dir.path().join("out"),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/taper_check.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["result"]["pass"], false);
    assert!(!dir.path().join("out/taper_check.csv").exists());

    let missing = text
        .replace("[taper_check.linear]", "profile = \"gone.csv\"\n[unused]")
        .replace("start_radius", "# ");
    let missing = missing.split("[unused]").next().unwrap();
    let o = topdc(
        &["taper-check"],
        &write_config(dir.path(), missing),
        &dir.path().join("out2"),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gone.csv"));

    let short = "[platform.taper]\ndiameter = 790e-9\n[taper_check]\nfiber = \"SMF28\"\npump_wavelength = 532e-9\n[taper_check.linear]\nstart_radius = 62.5e-6\nend_radius = 0.4e-6\nlength = 1e-3\nsamples = 2\n";
    assert_eq!(
        code(&topdc(
            &["taper-check"],
            &write_config(dir.path(), short),
            &dir.path().join("out3")
        )),
        2
    );
}

#[test]
fn shipped_taper_check_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = topdc(
        &["taper-check"],
        &examples().join("taper_check.toml"),
        out.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.path().join("taper_check.csv")).unwrap();
    assert!(csv.contains("# pass: true"));
    assert!(csv.contains("# data_sha256: taper_profile.csv"));
}

#[test]
fn reruns_are_byte_identical() {
    let config = examples().join("hybrid_pump_sweep.toml");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = topdc(&["spectral-density", "--grid", "61"], &config, dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 7);
    assert_eq!(fa, fb);
}
