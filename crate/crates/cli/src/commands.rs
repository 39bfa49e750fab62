//! Subcommand implementations. Each builds all artifacts in memory and only
//! then writes them, so a failing run leaves the output directory untouched.

use std::f64::consts::PI;
use std::path::Path;

use serde_json::{json, Value};
use twoslit_core::analysis::{
    fringe_spacing, intensity, onset_metrics_with, sweep_interslit_with, visibility, AnalysisSettings,
    IntensityProfile, OnsetReport, SweepRow,
};
use twoslit_core::apparatus::{validate, Apparatus, DetectorConfig, Particle, ValidationReport};
use twoslit_core::paths::{
    crossing_count, sample_path, truncate_bundle, Path as FeynmanPath, PathBundle, SpacetimeEvent,
};
use twoslit_core::scenario::{kick_coherence, simulate as run_channels};
use twoslit_core::uncertainty::packet_uncertainties;

use crate::config::RunConfig;
use crate::output::{fmt_num, json_bytes, svg_plot, Artifacts, Csv};
use crate::{core_error, CliError};

struct Setup {
    particle: Particle,
    apparatus: Apparatus,
    detector: DetectorConfig,
    report: ValidationReport,
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let particle = cfg.particle()?;
    let apparatus = cfg.apparatus();
    let detector = cfg.detector();
    let report = validate(&apparatus, &detector, &particle);
    if !report.ok {
        return Err(CliError::Validation(report.summary()));
    }
    Ok(Setup {
        particle,
        apparatus,
        detector,
        report,
    })
}

fn warnings_json(report: &ValidationReport) -> Value {
    Value::Array(
        report
            .warnings()
            .map(|w| json!({"code": w.code, "message": w.message}))
            .collect(),
    )
}

fn particle_json(p: &Particle) -> Value {
    json!({
        "mass": p.mass,
        "kinetic_energy": p.kinetic_energy,
        "velocity": p.velocity,
        "de_broglie_wavelength": p.de_broglie_wavelength,
    })
}

fn settings_json(s: &AnalysisSettings) -> Value {
    json!({
        "central_window": [s.central_window.0, s.central_window.1],
        "local_window_width": s.local_window_width,
        "onset_threshold": s.onset.threshold,
    })
}

fn onset_json(r: &OnsetReport) -> Value {
    json!({
        "onset_side": r.onset_side,
        "visibility_centroid_x": r.visibility_centroid_x,
        "asymmetry_index": r.asymmetry_index,
    })
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let Setup {
        particle,
        apparatus,
        detector,
        report,
    } = setup(cfg)?;
    let settings = cfg.analysis(&apparatus, &particle);
    let sim = run_channels(&apparatus, &detector, &particle).map_err(core_error)?;

    let i_none = intensity(&sim.no_detector.field, true).map_err(core_error)?;
    let grid = i_none.grid();
    let window = settings.central_window;
    let vis = |p: &IntensityProfile| visibility(p, window).map_err(core_error);
    let far_field = particle.de_broglie_wavelength * apparatus.l2 / apparatus.slit_separation();
    let measured = fringe_spacing(&i_none).ok();

    let mut summary = json!({
        "command": "simulate",
        "particle": particle_json(&particle),
        "validation": {"warnings": warnings_json(&report)},
        "analysis": settings_json(&settings),
        "fringe_spacing": {"measured": measured, "far_field": far_field},
    });

    let (i_null, i_det, i_comb, i_kick, detector_json) = match &sim.detector {
        Some(ch) => {
            let i_null = intensity(&ch.null.field, true).map_err(core_error)?;
            let i_det = intensity(&ch.detected.field, true).map_err(core_error)?;
            let i_a = intensity(&sim.one_slit_a.field, true).map_err(core_error)?;
            let i_b = intensity(&sim.one_slit_b.field, true).map_err(core_error)?;
            let w = settings.local_window_width;
            let on_null = onset_metrics_with(&i_null, &i_a, w, &settings.onset).map_err(core_error)?;
            let on_det = onset_metrics_with(&i_det, &i_b, w, &settings.onset).map_err(core_error)?;
            let info = json!({
                "enabled": true,
                "p_det": ch.p_det,
                "kick_coherence": kick_coherence(apparatus.slit_separation(), detector.photon_wavelength),
                "crossing_window": {
                    "slope_lo": ch.window.slope_lo,
                    "slope_hi": ch.window.slope_hi,
                    "screen_lo": ch.window.screen_lo,
                    "screen_hi": ch.window.screen_hi,
                    "meets_screen": ch.window.intersects(apparatus.screen_min, apparatus.screen_max),
                },
                "onset": {"null": onset_json(&on_null), "detected": onset_json(&on_det)},
            });
            (i_null, i_det, ch.combined.clone(), ch.kick_reference.clone(), info)
        }
        None => {
            let zeros = IntensityProfile {
                values: vec![0.0; i_none.len()],
                normalized: false,
                ..i_none.clone()
            };
            (
                i_none.clone(),
                zeros,
                i_none.clone(),
                i_none.clone(),
                json!({"enabled": false}),
            )
        }
    };
    let detected_vis = if sim.detector.is_some() {
        Some(vis(&i_det)?)
    } else {
        None
    };
    summary["visibility"] = json!({
        "no_detector": vis(&i_none)?,
        "null": vis(&i_null)?,
        "detected": detected_vis,
        "combined": vis(&i_comb)?,
        "kick_reference": vis(&i_kick)?,
    });
    summary["detector"] = detector_json;

    let columns: [(&str, &[f64]); 5] = [
        ("I_no_detector", &i_none.values),
        ("I_null", &i_null.values),
        ("I_detected", &i_det.values),
        ("I_combined", &i_comb.values),
        ("I_kick_reference", &i_kick.values),
    ];
    let xs = grid.positions();
    let mut artifacts = Artifacts::default();
    if cfg.output.emit_csv {
        let mut header = vec!["x_bohr"];
        header.extend(columns.iter().map(|c| c.0));
        let mut csv = Csv::new(&header);
        for (j, x) in xs.iter().enumerate() {
            let mut row = vec![*x];
            row.extend(columns.iter().map(|c| c.1[j]));
            csv.numeric_row(&row);
        }
        artifacts.add("intensity.csv", csv.into_bytes());
    }
    if cfg.output.emit_json {
        artifacts.add("summary.json", json_bytes(&summary));
    }
    if cfg.output.emit_svg {
        artifacts.add("intensity.svg", svg_plot("screen intensity", &xs, &columns));
    }
    artifacts.commit(out)
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let d_values = match &cfg.sweep.d_values {
        Some(v) if v.len() >= 2 => v.clone(),
        Some(_) => return Err(CliError::Config("sweep.d_values needs at least 2 entries".into())),
        None => {
            return Err(CliError::Config(
                "sweep.d_values is required for the sweep command".into(),
            ))
        }
    };
    let Setup {
        particle,
        apparatus,
        detector,
        report,
    } = setup(cfg)?;
    if !detector.enabled {
        return Err(CliError::Config("sweep requires an enabled detector section".into()));
    }
    for (i, d) in d_values.iter().enumerate() {
        let r = validate(&apparatus.with_separation(*d), &detector, &particle);
        if !r.ok {
            return Err(CliError::Validation(format!(
                "sweep row {i} (d = {}): {}",
                fmt_num(*d),
                r.summary()
            )));
        }
    }
    let settings = cfg.analysis(&apparatus, &particle);
    let table = sweep_interslit_with(&apparatus, &detector, &particle, &d_values, &settings).map_err(core_error)?;
    if table.rows.iter().any(|r| r.values().iter().any(|v| !v.is_finite())) {
        return Err(CliError::Numerical("non-finite value in sweep table".into()));
    }
    let onset = table.onset_d(settings.onset.threshold);
    let digest = json!({
        "command": "sweep",
        "rows": table.rows.len(),
        "photon_wavelength": detector.photon_wavelength,
        "onset_threshold": settings.onset.threshold,
        "onset_d": onset,
        "onset_d_over_lambda_ph": onset.map(|d| d / detector.photon_wavelength),
        "analysis": settings_json(&settings),
        "validation": {"warnings": warnings_json(&report)},
    });

    let mut artifacts = Artifacts::default();
    if cfg.output.emit_csv {
        let mut csv = Csv::new(&SweepRow::FIELDS);
        for r in &table.rows {
            csv.numeric_row(&r.values());
        }
        artifacts.add("sweep.csv", csv.into_bytes());
    }
    if cfg.output.emit_json {
        artifacts.add("sweep.json", json_bytes(&digest));
    }
    if cfg.output.emit_svg {
        let idx: Vec<f64> = (0..table.rows.len()).map(|i| i as f64).collect();
        let col = |f: fn(&SweepRow) -> f64| table.rows.iter().map(f).collect::<Vec<f64>>();
        let (vn, vd, vc, vk) = (
            col(|r| r.visibility_null),
            col(|r| r.visibility_det),
            col(|r| r.visibility_combined),
            col(|r| r.visibility_kick_reference),
        );
        let series: [(&str, &[f64]); 4] = [
            ("null", &vn),
            ("detected", &vd),
            ("combined", &vc),
            ("kick reference", &vk),
        ];
        artifacts.add("sweep.svg", svg_plot("visibility by sweep row", &idx, &series));
    }
    artifacts.commit(out)
}

/// Stream index of path `i` in bundle `k`.
fn stream(k: u64, i: usize) -> u64 {
    (k << 32) | i as u64
}

fn bundle_to(
    k: u64,
    start: SpacetimeEvent,
    ends: &[SpacetimeEvent],
    nominal_end: SpacetimeEvent,
    n_slices: usize,
    particle: &Particle,
    seed: u64,
) -> Result<PathBundle, CliError> {
    let paths = ends
        .iter()
        .enumerate()
        .map(|(i, end)| sample_path(&start, end, n_slices, particle, seed, stream(k, i), 1.0))
        .collect::<Result<Vec<FeynmanPath>, _>>()
        .map_err(core_error)?;
    Ok(PathBundle {
        start,
        end: nominal_end,
        paths,
        seed,
    })
}

/// `n` points spread evenly over a disc (Fibonacci lattice), strictly inside
/// the boundary.
fn disc_sites(cx: f64, cz: f64, radius: f64, n: usize) -> Vec<(f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let r = radius * ((i as f64 + 0.5) / n as f64).sqrt();
            let theta = golden * i as f64;
            (cx + r * theta.cos(), cz + r * theta.sin())
        })
        .collect()
}

pub fn paths(cfg: &RunConfig, out: &Path, seed_override: Option<u64>) -> Result<Vec<std::path::PathBuf>, CliError> {
    let Some(section) = cfg.paths else {
        return Err(CliError::Config(
            "a paths section is required for the paths command".into(),
        ));
    };
    if section.n_paths == 0 || section.n_slices == 0 {
        return Err(CliError::Config(
            "paths.n_paths and paths.n_slices must be at least 1".into(),
        ));
    }
    let seed = seed_override.unwrap_or(section.seed);
    let Setup {
        particle: p,
        apparatus: a,
        detector: det,
        ..
    } = setup(cfg)?;
    let (n, slices) = (section.n_paths, section.n_slices);
    let ev = |x: f64, z: f64| SpacetimeEvent::on_axis(x, z, &p);
    let source = ev(a.source_x, 0.0);
    let slit_a = ev(a.slit_a_center, a.l1);
    let slit_b = ev(a.slit_b_center, a.l1);
    let z_screen = a.l1 + a.l2;
    let span = a.screen_max - a.screen_min;
    let fan: Vec<SpacetimeEvent> = (0..n)
        .map(|j| ev(a.screen_min + (j as f64 + 0.5) * span / n as f64, z_screen))
        .collect();
    let screen_mid = ev(0.5 * (a.screen_min + a.screen_max), z_screen);

    let mut bundles: Vec<(&str, PathBundle)> = Vec::new();
    bundles.push((
        "S->A",
        bundle_to(0, source, &vec![slit_a; n], slit_a, slices, &p, seed)?,
    ));
    if det.enabled {
        let (cx, cz) = (a.slit_b_center, a.l1 + det.depth_epsilon);
        let sites: Vec<SpacetimeEvent> = disc_sites(cx, cz, det.radius_rho, n)
            .into_iter()
            .map(|(x, z)| ev(x, z))
            .collect();
        let to_disc = bundle_to(1, source, &sites, ev(cx, cz), slices, &p, seed)?;
        let cut = truncate_bundle(&to_disc, cx, cz, det.radius_rho).map_err(core_error)?;
        bundles.push(("S->B (disc)", cut));
    } else {
        bundles.push((
            "S->B",
            bundle_to(1, source, &vec![slit_b; n], slit_b, slices, &p, seed)?,
        ));
    }
    bundles.push(("A->screen", bundle_to(2, slit_a, &fan, screen_mid, slices, &p, seed)?));
    if !det.enabled {
        bundles.push(("B->screen", bundle_to(3, slit_b, &fan, screen_mid, slices, &p, seed)?));
    }
    let b_side = if det.enabled { 1 } else { 3 };
    let (crossings, _) = crossing_count(&bundles[b_side].1, &bundles[2].1);

    let mut csv = Csv::new(&["bundle_id", "path_id", "point_index", "z_bohr", "x_bohr", "truncated"]);
    for (k, (_, b)) in bundles.iter().enumerate() {
        for (i, path) in b.paths.iter().enumerate() {
            for (j, e) in path.events.iter().enumerate() {
                if !(e.x.is_finite() && e.z.is_finite()) {
                    return Err(CliError::Numerical("non-finite path coordinate".into()));
                }
                csv.row(&[
                    k.to_string(),
                    i.to_string(),
                    j.to_string(),
                    fmt_num(e.z),
                    fmt_num(e.x),
                    path.truncated.to_string(),
                ]);
            }
        }
    }
    let summary = json!({
        "command": "paths",
        "seed": seed,
        "n_paths": n,
        "n_slices": slices,
        "detector_enabled": det.enabled,
        "bundles": bundles.iter().enumerate().map(|(k, (label, b))| json!({
            "bundle_id": k,
            "label": label,
            "paths": b.paths.len(),
            "truncated": b.paths.iter().filter(|p| p.truncated).count(),
        })).collect::<Vec<_>>(),
        "crossings": {"bundles": [b_side, 2], "count": crossings},
    });

    let mut artifacts = Artifacts::default();
    if cfg.output.emit_csv {
        artifacts.add("paths.csv", csv.into_bytes());
    }
    if cfg.output.emit_json {
        artifacts.add("paths.json", json_bytes(&summary));
    }
    artifacts.commit(out)
}

/// JSON report of the packet uncertainties for a path length `d`.
pub fn uncertainty(d: f64, mass: f64, kinetic_energy: f64) -> Result<String, CliError> {
    for (name, v) in [("distance", d), ("mass", mass), ("kinetic-energy", kinetic_energy)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Usage(format!("--{name} must be positive, got {v}")));
        }
    }
    let p = Particle::new(mass, kinetic_energy).map_err(|e| CliError::Usage(e.to_string()))?;
    let r = packet_uncertainties(d, &p).map_err(|e| CliError::Usage(e.to_string()))?;
    let v = json!({
        "distance_D": r.distance_d,
        "delta_p": r.delta_p,
        "delta_x": r.delta_x,
        "delta_E": r.delta_e,
        "delta_t": r.delta_t,
    });
    Ok(String::from_utf8(json_bytes(&v)).expect("JSON is UTF-8"))
}
