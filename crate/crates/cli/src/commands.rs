//! One function per subcommand.

use std::fmt::Write as _;

use serde::Serialize;
use topdc_core::constants::{omega_of, wavelength_of, BAR};
use topdc_core::materials::Medium;
use topdc_core::modes::{antiresonant_loss_estimate, GuidedMode, ModeLabel, DEFAULT_GUARD_BAND};
use topdc_core::phasematch::{
    find_phase_match, EvaluationPoint, PhaseMatchSolution, ScanParameter, ScanSpec,
};
use topdc_core::rates::{ProcessKind, RateModel, RateResult, Topology, EXTENT_THRESHOLD};
use topdc_core::taper::{
    check_profile, default_mode_pairs, AdiabaticityReport, TaperProfile, TransitionModel,
};

use crate::config::{LoadedConfig, SweepParameter};
use crate::error::{CliError, CliResult};
use crate::output::{opt, sweep_tag, Writer};
use crate::setup::{load_database, DataHashes, Platform, Process};

/// Everything a command needs besides the writer.
pub struct Context {
    pub cfg: LoadedConfig,
    pub grid: Option<usize>,
    pub hashes: DataHashes,
}

/// Sweep values of the run: the configured sweep, or a single point.
fn sweep_points(cfg: &LoadedConfig) -> Vec<Option<(SweepParameter, f64)>> {
    match &cfg.config.sweep {
        Some(s) => s.values.iter().map(|&v| Some((s.parameter, v))).collect(),
        None => vec![None],
    }
}

fn apply(
    platform: &Platform,
    process: &Process,
    point: Option<(SweepParameter, f64)>,
) -> CliResult<(Platform, Process)> {
    match point {
        Some((p, v)) => Ok((platform.with(p, v)?, process.with(p, v))),
        None => Ok((platform.clone(), process.clone())),
    }
}

fn unit_of(parameter: SweepParameter) -> (&'static str, f64) {
    match parameter {
        SweepParameter::Diameter | SweepParameter::PumpWavelength => ("nm", 1e9),
        SweepParameter::Pressure => ("bar", 1.0 / BAR),
    }
}

// ---------------------------------------------------------------- modes

#[derive(Debug, Serialize)]
struct ModeRow {
    mode: String,
    label: ModeLabel,
    wavelength_m: f64,
    wavelength_nm: f64,
    /// `guided`, or `cut_off` with the remaining values empty.
    status: &'static str,
    n_eff: Option<f64>,
    group_velocity_m_s: Option<f64>,
    loss_db_per_m: Option<f64>,
    on_resonance: Option<bool>,
}

fn mode_row(
    mode: &GuidedMode,
    name: String,
    wavelength: f64,
    loss: Option<(f64, bool)>,
) -> CliResult<ModeRow> {
    let w = omega_of(wavelength);
    Ok(ModeRow {
        mode: name,
        label: mode.label,
        wavelength_m: wavelength,
        wavelength_nm: wavelength * 1e9,
        status: "guided",
        n_eff: Some(mode.n_eff(w)?),
        group_velocity_m_s: Some(mode.group_velocity(w)?),
        loss_db_per_m: loss.map(|l| l.0),
        on_resonance: loss.map(|l| l.1),
    })
}

fn cut_off_row(label: ModeLabel, wavelength: f64) -> ModeRow {
    ModeRow {
        mode: label.to_string(),
        label,
        wavelength_m: wavelength,
        wavelength_nm: wavelength * 1e9,
        status: "cut_off",
        n_eff: None,
        group_velocity_m_s: None,
        loss_db_per_m: None,
        on_resonance: None,
    }
}

pub fn modes(ctx: &mut Context, out: &mut Writer) -> CliResult<()> {
    let section = ctx
        .cfg
        .config
        .modes
        .clone()
        .ok_or_else(|| CliError::Config("modes: a [modes] section is required".into()))?;
    if section
        .wavelengths
        .iter()
        .any(|&l| !(l > 0.0 && l.is_finite()))
    {
        return Err(CliError::Config(
            "modes.wavelengths: wavelengths must be positive".into(),
        ));
    }
    let db = load_database(&ctx.cfg, &mut ctx.hashes)?;
    let platform = Platform::build(&ctx.cfg, &db, &mut ctx.hashes)?;
    out.header.data_sha256 =
        crate::output::Header::new("modes", out.header.config_sha256.clone(), &ctx.hashes)
            .data_sha256;
    let labels = section
        .labels
        .iter()
        .map(|s| {
            s.parse::<ModeLabel>()
                .map_err(|e| CliError::Config(format!("modes.labels: {e}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &wavelength in &section.wavelengths {
        let w = omega_of(wavelength);
        let domain = (0.9 * w, 1.1 * w);
        match &platform {
            Platform::Taper(t) => {
                for &label in &labels {
                    let mode = GuidedMode::step_index(
                        label,
                        0.5 * t.diameter,
                        Medium::Solid(t.glass.clone()),
                        t.surround.clone(),
                        domain,
                    );
                    match mode.and_then(|m| m.n_eff(w).map(|_| m)) {
                        Ok(m) => rows.push(mode_row(&m, label.to_string(), wavelength, None)?),
                        Err(topdc_core::Error::ModeCutOff { .. }) => {
                            rows.push(cut_off_row(label, wavelength))
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            Platform::HollowCore {
                fiber,
                wall_thickness,
                glass,
            } => {
                let loss = antiresonant_loss_estimate(
                    fiber.core_radius,
                    *wall_thickness,
                    wavelength,
                    glass.index(wavelength)?,
                    DEFAULT_GUARD_BAND,
                )?;
                for &label in &labels {
                    let mode = GuidedMode::capillary(
                        label,
                        fiber.core_radius,
                        Medium::Gas(fiber.gas.clone()),
                        domain,
                    )?;
                    rows.push(mode_row(
                        &mode,
                        label.to_string(),
                        wavelength,
                        Some((loss.db_per_m, loss.on_resonance)),
                    )?);
                }
            }
            Platform::Hybrid(h) => {
                let (name, mode) = if h.pump.contains(w) {
                    ("pump", &h.pump)
                } else {
                    ("infrared", &h.photon)
                };
                rows.push(mode_row(mode, name.to_string(), wavelength, None)?);
            }
        }
    }
    if out.format.json() {
        out.json("modes", &rows)?;
    }
    if out.format.csv() {
        let mut s = String::from("mode,label,wavelength_m,wavelength_nm,status,n_eff,group_velocity_m_s,loss_db_per_m,on_resonance\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{:e},{},{},{},{},{},{}",
                r.mode,
                r.label,
                r.wavelength_m,
                r.wavelength_nm,
                r.status,
                opt(r.n_eff),
                opt(r.group_velocity_m_s),
                opt(r.loss_db_per_m),
                r.on_resonance.map(|b| b.to_string()).unwrap_or_default()
            );
        }
        out.csv("modes", &s)?;
    }
    for r in &rows {
        match (r.n_eff, r.group_velocity_m_s) {
            (Some(n), Some(v)) => log::info!(
                "{} at {:.3} nm: n_eff {n:.9}, v_g {v:.6e} m/s",
                r.mode,
                r.wavelength_nm
            ),
            _ => log::info!("{} at {:.3} nm: cut off", r.mode, r.wavelength_nm),
        }
    }
    Ok(())
}

// ---------------------------------------------------------- phase-match

#[derive(Debug, Serialize)]
struct Root {
    #[serde(flatten)]
    solution: PhaseMatchSolution,
    value_display: f64,
    display_unit: &'static str,
}

#[derive(Debug, Serialize)]
struct ScanReport {
    parameter: SweepParameter,
    start: f64,
    end: f64,
    points: usize,
    pump_wavelength_m: Option<f64>,
    tolerance_rad_m: f64,
    status: &'static str,
    roots: Vec<Root>,
}

pub fn phase_match(ctx: &mut Context, out: &mut Writer) -> CliResult<()> {
    let scan = ctx
        .cfg
        .config
        .scan
        .clone()
        .ok_or_else(|| CliError::Config("scan: a [scan] section is required".into()))?;
    let db = load_database(&ctx.cfg, &mut ctx.hashes)?;
    let platform = Platform::build(&ctx.cfg, &db, &mut ctx.hashes)?;
    out.header.data_sha256 =
        crate::output::Header::new("phase-match", out.header.config_sha256.clone(), &ctx.hashes)
            .data_sha256;
    let pump = scan
        .pump_wavelength
        .or(ctx.cfg.config.process.as_ref().map(|p| p.pump_wavelength));
    let parameter = match scan.parameter {
        SweepParameter::Diameter => ScanParameter::Diameter,
        SweepParameter::Pressure => ScanParameter::Pressure,
        SweepParameter::PumpWavelength => ScanParameter::PumpWavelength,
    };
    let mut spec = ScanSpec::new(parameter, scan.start, scan.end, scan.points);
    if let (Some(omega1), Some(omega2)) = (scan.omega1, scan.omega2) {
        spec = spec.at(EvaluationPoint::Pair { omega1, omega2 });
    }
    let roots = if scan.parameter == SweepParameter::PumpWavelength {
        find_phase_match(|x| platform.problem_exact(x).map_err(into_core), &spec)?
    } else {
        let pump = pump.ok_or_else(|| {
            CliError::Config("scan.pump_wavelength: required when [process] is absent".into())
        })?;
        let sweep = scan.parameter;
        find_phase_match(
            |x| {
                platform
                    .with(sweep, x)
                    .and_then(|p| p.problem_exact(pump))
                    .map_err(into_core)
            },
            &spec,
        )?
    };
    let (unit, scale) = unit_of(scan.parameter);
    let report = ScanReport {
        parameter: scan.parameter,
        start: scan.start,
        end: scan.end,
        points: scan.points,
        pump_wavelength_m: if scan.parameter == SweepParameter::PumpWavelength {
            None
        } else {
            pump
        },
        tolerance_rad_m: spec.tolerance,
        status: if roots.is_empty() {
            "no roots"
        } else {
            "roots found"
        },
        roots: roots
            .into_iter()
            .map(|s| Root {
                value_display: s.value * scale,
                display_unit: unit,
                solution: s,
            })
            .collect(),
    };
    if out.format.json() {
        out.json("phase_match", &report)?;
    }
    if out.format.csv() {
        let mut s = format!("# status: {}\n", report.status);
        s.push_str("parameter,value,value_display,display_unit,residual_rad_m,slope,degenerate,zero_start,zero_end\n");
        for r in &report.roots {
            let z = r.solution.zero_interval;
            let _ = writeln!(
                s,
                "{},{:e},{},{},{:e},{:e},{},{},{}",
                report.parameter.name(),
                r.solution.value,
                r.value_display,
                r.display_unit,
                r.solution.residual,
                r.solution.slope,
                r.solution.degenerate,
                opt(z.map(|z| z.0)),
                opt(z.map(|z| z.1))
            );
        }
        out.csv("phase_match", &s)?;
    }
    if report.roots.is_empty() {
        log::info!("no roots in [{:e}, {:e}]", scan.start, scan.end);
    }
    for r in &report.roots {
        log::info!("root at {} {}", r.value_display, r.display_unit);
    }
    Ok(())
}

fn into_core(e: CliError) -> topdc_core::Error {
    match e {
        CliError::Core(e) => e,
        other => topdc_core::Error::InvalidInput(other.to_string()),
    }
}

// ----------------------------------------------------------------- rate

#[derive(Debug, Serialize)]
struct RateEntry {
    sweep_parameter: Option<SweepParameter>,
    sweep_value: Option<f64>,
    #[serde(flatten)]
    result: RateResult,
    units: &'static str,
    window_nm: (f64, f64),
    kerr_applied: bool,
    /// Pairs per second for seeded runs with a repetition rate.
    per_second: Option<f64>,
    perfect_phase_matching_bound: Option<f64>,
}

pub fn rate(ctx: &mut Context, out: &mut Writer) -> CliResult<()> {
    let db = load_database(&ctx.cfg, &mut ctx.hashes)?;
    let platform = Platform::build(&ctx.cfg, &db, &mut ctx.hashes)?;
    out.header.data_sha256 =
        crate::output::Header::new("rate", out.header.config_sha256.clone(), &ctx.hashes)
            .data_sha256;
    let process = Process::build(ctx.cfg.config.process.as_ref(), ctx.grid)?;
    let mut entries = Vec::new();
    for point in sweep_points(&ctx.cfg) {
        let (pl, pr) = apply(&platform, &process, point)?;
        let problem = pl.problem(pr.config.pump_wavelength)?;
        let model = RateModel::for_config(&problem, &pr.coupling, &pr.config)?;
        let result = model.rate(pr.config.grid_resolution, &pr.options)?;
        let bound = if pr.bound {
            Some(
                model
                    .clone()
                    .with_perfect_phase_matching()
                    .rate(result.resolution, &topdc_core::rates::RateOptions::fixed())?
                    .value,
            )
        } else {
            None
        };
        let per_second = match (result.kind, pr.config.seed.and_then(|s| s.repetition_rate)) {
            (ProcessKind::Seeded, Some(f)) => Some(result.value * f),
            _ => None,
        };
        let entry = RateEntry {
            sweep_parameter: point.map(|p| p.0),
            sweep_value: point.map(|p| p.1),
            units: match result.kind {
                ProcessKind::Spontaneous => "Hz",
                ProcessKind::Seeded => "pairs per pulse",
            },
            window_nm: (
                wavelength_of(result.window.1) * 1e9,
                wavelength_of(result.window.0) * 1e9,
            ),
            kerr_applied: result.coefficients.beta_nl != 0.0,
            per_second,
            perfect_phase_matching_bound: bound,
            result,
        };
        log::info!(
            "{}{:.6e} {}",
            point
                .map(|(p, v)| format!("{} {v:e}: ", p.name()))
                .unwrap_or_default(),
            entry.result.value,
            entry.units
        );
        if ctx.cfg.config.output.grids {
            let mut grid = model.grid(pr.config.grid_resolution)?;
            grid.sweep_value = point.map(|p| p.1);
            let stem = match point {
                Some((p, v)) => format!("rate_grid_{}", sweep_tag(p.name(), v)),
                None => "rate_grid".to_string(),
            };
            write_grid(out, &stem, grid)?;
        }
        entries.push(entry);
    }
    if out.format.json() || !out.format.csv() {
        out.json("rate", &entries)?;
    }
    if out.format.csv() {
        let mut s = String::from(
            "sweep_parameter,sweep_value,kind,value,units,resolution,relative_change,window_lo_nm,window_hi_nm,beta_nl_rad_m,per_second,perfect_phase_matching_bound\n",
        );
        for e in &entries {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{},{},{},{},{},{:e},{},{}",
                e.sweep_parameter.map(|p| p.name()).unwrap_or_default(),
                opt(e.sweep_value),
                match e.result.kind {
                    ProcessKind::Spontaneous => "spontaneous",
                    ProcessKind::Seeded => "seeded",
                },
                e.result.value,
                e.units,
                e.result.resolution,
                opt(e.result.relative_change),
                e.window_nm.0,
                e.window_nm.1,
                e.result.coefficients.beta_nl,
                opt(e.per_second),
                opt(e.perfect_phase_matching_bound)
            );
        }
        out.csv("rate", &s)?;
    }
    Ok(())
}

fn write_grid(
    out: &mut Writer,
    stem: &str,
    mut grid: topdc_core::rates::SpectralGrid,
) -> CliResult<()> {
    let sources = std::mem::take(&mut grid.provenance.dispersion_sources);
    grid.provenance = out.header.provenance();
    grid.provenance.dispersion_sources = sources;
    if out.format.json() {
        let mut text = grid.to_json()?;
        text.push('\n');
        out.write_text(&format!("{stem}.json"), &text)?;
    }
    if out.format.csv() {
        let text = format!("{}{}", out.header.csv_lines(), grid.to_csv());
        out.write_text(&format!("{stem}.csv"), &text)?;
    }
    Ok(())
}

// ----------------------------------------------------- spectral-density

#[derive(Debug, Serialize)]
struct GridSummary {
    file_stem: String,
    sweep_parameter: Option<SweepParameter>,
    sweep_value: Option<f64>,
    total: f64,
    topology: Topology,
    /// Wavelength span of the emission above the extent threshold (m).
    extent_m: f64,
    extent_nm: f64,
    extent_threshold: f64,
}

pub fn spectral_density(ctx: &mut Context, out: &mut Writer) -> CliResult<()> {
    let db = load_database(&ctx.cfg, &mut ctx.hashes)?;
    let platform = Platform::build(&ctx.cfg, &db, &mut ctx.hashes)?;
    out.header.data_sha256 = crate::output::Header::new(
        "spectral-density",
        out.header.config_sha256.clone(),
        &ctx.hashes,
    )
    .data_sha256;
    let process = Process::build(ctx.cfg.config.process.as_ref(), ctx.grid)?;
    let mut summaries = Vec::new();
    for point in sweep_points(&ctx.cfg) {
        let (pl, pr) = apply(&platform, &process, point)?;
        let problem = pl.problem(pr.config.pump_wavelength)?;
        let model = RateModel::for_config(&problem, &pr.coupling, &pr.config)?;
        let mut grid = model.grid(pr.config.grid_resolution)?;
        grid.sweep_value = point.map(|p| p.1);
        let stem = match point {
            Some((p, v)) => format!("spectral_density_{}", sweep_tag(p.name(), v)),
            None => "spectral_density".to_string(),
        };
        let extent = grid.extent(EXTENT_THRESHOLD);
        let summary = GridSummary {
            file_stem: stem.clone(),
            sweep_parameter: point.map(|p| p.0),
            sweep_value: point.map(|p| p.1),
            total: grid.total,
            topology: grid.topology(),
            extent_m: extent,
            extent_nm: extent * 1e9,
            extent_threshold: EXTENT_THRESHOLD,
        };
        log::info!(
            "{stem}: {:?}, extent {:.1} nm",
            summary.topology,
            summary.extent_nm
        );
        write_grid(out, &stem, grid)?;
        summaries.push(summary);
    }
    out.json("spectral_density_summary", &summaries)?;
    Ok(())
}

// ---------------------------------------------------------- taper-check

pub fn taper_check(ctx: &mut Context, out: &mut Writer) -> CliResult<()> {
    let section = ctx.cfg.config.taper_check.clone().ok_or_else(|| {
        CliError::Config("taper_check: a [taper_check] section is required".into())
    })?;
    let db = load_database(&ctx.cfg, &mut ctx.hashes)?;
    let fiber = db
        .fiber(&section.fiber)
        .map_err(|e| CliError::Config(format!("taper_check.fiber: {e}")))?
        .clone();
    let profile = match (&section.profile, section.linear) {
        (Some(path), _) => {
            let full = ctx.cfg.resolve(path);
            let text = std::fs::read_to_string(&full).map_err(|e| {
                CliError::Config(format!(
                    "taper_check.profile: cannot read {}: {e}",
                    full.display()
                ))
            })?;
            ctx.hashes.0.push((
                path.display().to_string(),
                topdc_core::provenance::sha256_hex(text.as_bytes()),
            ));
            TaperProfile::parse(&text, &path.display().to_string())?
        }
        (None, Some(l)) => TaperProfile::linear(l.start_radius, l.end_radius, l.length, l.samples)?,
        (None, None) => unreachable!("validated"),
    };
    out.header.data_sha256 =
        crate::output::Header::new("taper-check", out.header.config_sha256.clone(), &ctx.hashes)
            .data_sha256;
    let mut model = TransitionModel::new(fiber);
    if let Some(t) = section.rod_threshold {
        model.rod_threshold = t;
    }
    let pairs = default_mode_pairs(
        section.pump_wavelength,
        section
            .triplet_wavelength
            .unwrap_or(3.0 * section.pump_wavelength),
    );
    let report: AdiabaticityReport = check_profile(&profile, &pairs, &model)?;
    log::info!(
        "adiabatic: {}, worst margin {}",
        report.pass,
        report
            .worst_margin
            .map(|m| format!("{m:.4}"))
            .unwrap_or_else(|| "none".into())
    );
    if out.format.json() {
        out.json("taper_check", &report)?;
    }
    if out.format.csv() {
        let mut s = format!("# pass: {}\n", report.pass);
        for (k, p) in report.pairs.iter().enumerate() {
            let _ = writeln!(s, "# pair {k}: {}/{} at {:e} m", p.a, p.b, p.wavelength);
        }
        s.push_str("z_m,radius_m,angle_rad");
        for k in 0..report.pairs.len() {
            let _ = write!(s, ",limit_{k}_rad");
        }
        s.push_str(",margin\n");
        for sample in &report.samples {
            let _ = write!(s, "{:e},{:e},{:e}", sample.z, sample.radius, sample.angle);
            for l in &sample.limits {
                let _ = write!(s, ",{}", opt(*l));
            }
            let _ = writeln!(s, ",{}", opt(sample.margin));
        }
        out.csv("taper_check", &s)?;
    }
    Ok(())
}
