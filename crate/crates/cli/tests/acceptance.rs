//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoslit_core::analysis::{
    fringe_spacing, intensity, onset_metrics_with, sweep_interslit_with, visibility, AnalysisSettings, OnsetSide,
};
use twoslit_core::apparatus::{Apparatus, DetectorConfig, Particle};
use twoslit_core::paths::{mc_kernel_estimate, SpacetimeEvent};
use twoslit_core::presets::{desk_particle, desk_scale, desk_sweep_d_values, DESK_PHOTON_WAVELENGTH};
use twoslit_core::propagator::{free_kernel, Grid};
use twoslit_core::scenario::{crossing_window, kick_coherence, simulate};
use twoslit_core::summation::ComplexNeumaier;
use twoslit_core::uncertainty::packet_uncertainties;
use twoslit_core::Complex64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- kernel

/// C∞ roll-off: 1 for |y| ≤ inner, 0 for |y| ≥ outer.
fn taper(y: f64, inner: f64, outer: f64) -> f64 {
    let t = (y.abs() - inner) / (outer - inner);
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    b / (a + b)
}

fn composed_kernel(mass: f64, total: f64, x0: f64, x2: f64) -> Complex64 {
    const FRESNEL_WIDTHS: f64 = 8.0;
    const PER_WIDTH: usize = 160;
    let half = 0.5 * total;
    let zone = (2.0 * std::f64::consts::PI * half / mass).sqrt();
    let c = 0.5 * (x0 + x2);
    let reach = FRESNEL_WIDTHS * zone;
    let g = Grid::new(c - reach, c + reach, 2 * FRESNEL_WIDTHS as usize * PER_WIDTH + 1);
    let h = g.spacing();
    let mut acc = ComplexNeumaier::new();
    for j in 0..g.n {
        let x1 = g.x(j);
        let w = taper(x1 - c, 0.5 * reach, reach);
        let k = free_kernel(x2, x1, mass, half).unwrap() * free_kernel(x1, x0, mass, half).unwrap();
        acc.add(k * (w * h));
    }
    acc.value()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for (mass, total) in [(1.0, 1.0), (1.0, 0.37), (3.0, 2.0)] {
        for (x0, x2) in [(0.0, 0.0), (-0.3, 0.8), (1.5, -0.4)] {
            let exact = free_kernel(x2, x0, mass, total).unwrap();
            let rel = (composed_kernel(mass, total, x0, x2) - exact).norm() / exact.norm();
            worst = worst.max(rel);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        worst < 1e-6 && secs < 1.0,
        format!("worst relative error {worst:.2e}, {secs:.3} s"),
    )
}

fn mc_rel_error(p: &Particle, dx: f64, t: f64, n_paths: usize, seed: u64) -> f64 {
    let start = SpacetimeEvent::new(0.0, 0.0, 0.0);
    let end = SpacetimeEvent::new(dx, p.velocity * t, t);
    let est = mc_kernel_estimate(start, end, p, n_paths, 32, seed).unwrap();
    let exact = free_kernel(dx, 0.0, p.mass, t).unwrap();
    (est - exact).norm() / exact.norm()
}

fn criterion_2() -> Outcome {
    let p = desk_particle();
    let lambda = p.de_broglie_wavelength;
    let t = p.mass * lambda * lambda;
    let t0 = Instant::now();
    let worst = [0.0, 0.5, 1.0, 1.5, 2.0]
        .iter()
        .map(|f| mc_rel_error(&p, f * lambda, t, 100_000, 2024))
        .fold(0.0, f64::max);
    let per_run = t0.elapsed().as_secs_f64() / 5.0;

    let ns = [1_000usize, 10_000, 100_000];
    let seeds = 16;
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let ms = (0..seeds)
                .map(|s| mc_rel_error(&p, lambda, t, n, 1000 + s).powi(2))
                .sum::<f64>()
                / seeds as f64;
            0.5 * ms.ln()
        })
        .collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>()
        / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
    check(
        worst < 0.01 && (slope + 0.5).abs() <= 0.1 && per_run < 10.0,
        format!("worst relative error {worst:.2e}, convergence slope {slope:.3}, {per_run:.2} s per 1e5-path estimate"),
    )
}

// ---------------------------------------------------------------- scenario

fn criterion_3() -> Outcome {
    let (a, _, p) = desk_scale();
    let settings = AnalysisSettings::for_apparatus(&a, &p);
    let sim = simulate(&a, &DetectorConfig::disabled(), &p).map_err(|e| e.to_string())?;
    let i = intensity(&sim.no_detector.field, false).map_err(|e| e.to_string())?;
    let spacing = fringe_spacing(&i).map_err(|e| e.to_string())?;
    let expected = p.de_broglie_wavelength * a.l2 / a.slit_separation();
    let spacing_err = (spacing / expected - 1.0).abs();
    let v = visibility(&i, settings.central_window).map_err(|e| e.to_string())?;
    let peak = i.values.iter().cloned().fold(0.0, f64::max);
    let n = i.len();
    let asym = (0..n)
        .map(|j| (i.values[j] - i.values[n - 1 - j]).abs())
        .fold(0.0, f64::max)
        / peak;
    check(
        spacing_err < 0.02 && v >= 0.9 && asym <= 1e-9,
        format!(
            "spacing {spacing:.2} vs {expected:.2} ({:.3}%), visibility {v:.5}, mirror deviation {asym:.1e}",
            100.0 * spacing_err
        ),
    )
}

fn criterion_4() -> Outcome {
    let (a, det, p) = desk_scale();
    let a = a.with_separation(100.0 * det.radius_rho);
    let settings = AnalysisSettings::for_apparatus(&a, &p);
    let sim = simulate(&a, &det, &p).map_err(|e| e.to_string())?;
    let ch = sim.detector.ok_or("detector channels missing")?;
    let v = visibility(&ch.combined, settings.central_window).map_err(|e| e.to_string())?;
    let identical = ch.null.field.values.len() == sim.one_slit_a.field.values.len()
        && ch
            .null
            .field
            .values
            .iter()
            .zip(&sim.one_slit_a.field.values)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    check(
        v < 0.01 && identical,
        format!("combined visibility {v:.2e}, null channel bitwise equal to one-slit A: {identical}"),
    )
}

fn criterion_5() -> Outcome {
    let (a, det, p) = desk_scale();
    let settings = AnalysisSettings::for_apparatus(&a, &p);
    let ds = desk_sweep_d_values();
    let table = sweep_interslit_with(&a, &det, &p, &ds, &settings).map_err(|e| e.to_string())?;
    let v: Vec<f64> = table.rows.iter().map(|r| r.visibility_combined).collect();
    let monotone = v.windows(2).all(|w| w[1] >= w[0] - 1e-3);
    let half = table
        .rows
        .iter()
        .find(|r| (r.d_over_lambda_ph - 0.5).abs() < 1e-9)
        .map(|r| r.visibility_combined)
        .ok_or("no row at d = rho/2")?;
    let curve = v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    check(
        ds.len() >= 8 && monotone && half > 0.05,
        format!("{} points, visibility_combined [{curve}], at rho/2 {half:.4}", ds.len()),
    )
}

fn criterion_6() -> Outcome {
    let (a0, det, p) = desk_scale();
    let d = desk_sweep_d_values()
        .into_iter()
        .filter(|&d| {
            let a = a0.with_separation(d);
            crossing_window(&a, &det)
                .map(|w| w.intersects(a.screen_min, a.screen_max))
                .unwrap_or(false)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if !d.is_finite() {
        return Err("no sweep point has a crossing window on the screen".into());
    }
    let a = a0.with_separation(d);
    let settings = AnalysisSettings::for_apparatus(&a, &p);
    let sim = simulate(&a, &det, &p).map_err(|e| e.to_string())?;
    let ch = sim.detector.ok_or("detector channels missing")?;
    let null = intensity(&ch.null.field, true).map_err(|e| e.to_string())?;
    let base = intensity(&sim.one_slit_a.field, true).map_err(|e| e.to_string())?;
    let r =
        onset_metrics_with(&null, &base, settings.local_window_width, &settings.onset).map_err(|e| e.to_string())?;
    check(
        r.onset_side == OnsetSide::Right && r.visibility_centroid_x > 0.0,
        format!(
            "d = {:.3} rho: side {:?}, centroid {:.1}",
            d / det.radius_rho,
            r.onset_side,
            r.visibility_centroid_x
        ),
    )
}

fn criterion_7() -> Outcome {
    let (a, det, p) = desk_scale();
    let a = a.with_separation(0.5 * det.radius_rho);
    let settings = AnalysisSettings::for_apparatus(&a, &p);
    let sim = simulate(&a, &det, &p).map_err(|e| e.to_string())?;
    let ch = sim.detector.ok_or("detector channels missing")?;
    let detected = intensity(&ch.detected.field, true).map_err(|e| e.to_string())?;
    let base = intensity(&sim.one_slit_b.field, true).map_err(|e| e.to_string())?;
    let r = onset_metrics_with(&detected, &base, settings.local_window_width, &settings.onset)
        .map_err(|e| e.to_string())?;
    check(
        matches!(r.onset_side, OnsetSide::Center | OnsetSide::Left) && r.asymmetry_index <= 0.1,
        format!("side {:?}, asymmetry index {:.3e}", r.onset_side, r.asymmetry_index),
    )
}

// ---------------------------------------------------------------- uncertainty

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = log_uniform(&mut rng, 0.0, 12.0);
        let p = Particle::new(log_uniform(&mut rng, -1.0, 4.0), log_uniform(&mut rng, -6.0, 6.0)).unwrap();
        let r = packet_uncertainties(d, &p).unwrap();
        worst = worst
            .max((r.delta_p * r.delta_x - 1.0).abs())
            .max((r.delta_e * r.delta_t - 1.0).abs());
    }
    let p = Particle::new(1.0, 0.5).unwrap();
    let r = packet_uncertainties(1e9, &p).unwrap();
    let exact = p.velocity == 1.0 && r.delta_p == 1e-9 && r.delta_t == 1e9;
    check(
        worst <= 1e-15 && exact,
        format!("worst product deviation {worst:.1e}, D = 1e9 case exact: {exact}"),
    )
}

// ---------------------------------------------------------------- kick

fn criterion_9() -> Outcome {
    let p = desk_particle();
    let base = Apparatus {
        source_x: 0.0,
        l1: 1e5,
        l2: 1e5,
        slit_a_center: 0.0,
        slit_b_center: 0.0,
        slit_width: 0.02,
        screen_min: -2000.0,
        screen_max: 2000.0,
        screen_samples: 2001,
        aperture_samples: 64,
    };
    let gamma_at_lambda = kick_coherence(1.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (d, ratio) in [(3.78, 0.1), (3.78, 0.3), (3.78, 0.5), (5.67, 0.7), (3.78, 1.0)] {
        let a = base.with_separation(d);
        let det = DetectorConfig::with_photon_wavelength(d / ratio);
        let sim = simulate(&a, &det, &p).map_err(|e| e.to_string())?;
        let ch = sim.detector.ok_or("detector channels missing")?;
        let v = visibility(&ch.kick_reference, (-2000.0, 2000.0)).map_err(|e| e.to_string())?;
        let g = kick_coherence(d, d / ratio);
        worst = worst.max((v - g).abs());
        parts.push(format!("d/λ={ratio}: V={v:.4} γ={g:.4}"));
    }
    check(
        worst < 1e-3 && (gamma_at_lambda - 7.19e-3).abs() < 5e-6,
        format!(
            "{}; worst |V-γ| {worst:.1e}, γ(d=λ) {gamma_at_lambda:.4e}",
            parts.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- CLI

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_twoslit"))
        .args(args)
        .output()
        .expect("spawn twoslit")
        .status
        .code()
        .unwrap_or(-1)
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

/// Desk-scale config with a short sweep and a paths section.
fn determinism_config(dir: &Path) -> PathBuf {
    let rho = DESK_PHOTON_WAVELENGTH;
    let text = std::fs::read_to_string(configs().join("desk-scale.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["sweep"]["d_values"] = serde_json::json!([3.0 * rho, 1.1 * rho, 0.5 * rho]);
    let path = dir.join("determinism.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&v).unwrap()).unwrap();
    path
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = determinism_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for cmd in ["simulate", "sweep", "paths"] {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "1"), (2, "4")] {
            let out = tmp.path().join(format!("{cmd}-{run}"));
            let code = run_cli(&[
                "--threads",
                threads,
                cmd,
                "--config",
                cfg,
                "--out",
                out.to_str().unwrap(),
            ]);
            if code != 0 {
                return Err(format!("{cmd} exited with {code}"));
            }
            outputs.push(read_dir_bytes(&out));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
        ok &= same;
        detail.push(format!("{cmd} {} files identical: {same}", outputs[0].len()));
    }
    check(ok, format!("{} (runs at --threads 1, 1, 4)", detail.join(", ")))
}

fn criterion_11() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let golden = configs().join("golden");
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, expected) in [
        ("valid", 0),
        ("unknown-key", 2),
        ("bad-type", 2),
        ("overlapping-slits", 3),
    ] {
        let out = tmp.path().join(name);
        let cfg = golden.join(format!("{name}.json"));
        let code = run_cli(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        let artifacts = out.exists() && std::fs::read_dir(&out).unwrap().next().is_some();
        let good = code == expected && artifacts == (expected == 0);
        ok &= good;
        detail.push(format!("{name} -> {code} (artifacts: {artifacts})"));
    }
    check(ok, detail.join(", "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("kernel composition", criterion_1),
        ("Monte Carlo path sum", criterion_2),
        ("no-detector two-slit pattern", criterion_3),
        ("disappearance of interference", criterion_4),
        ("return of interference", criterion_5),
        ("onset side, null channel", criterion_6),
        ("onset side, detected channel", criterion_7),
        ("uncertainty calculator", criterion_8),
        ("kick-reference oracle", criterion_9),
        ("determinism and parallel safety", criterion_10),
        ("CLI contract", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
