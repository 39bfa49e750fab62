//! Observables computed from screen fields.
//!
//! Visibility uses the envelope of local extrema rather than the global
//! maximum and minimum, so a slowly varying single-slit envelope does not
//! masquerade as fringe contrast. Each extremum is refined by fitting a
//! parabola through it and its two neighbours.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::apparatus::{validate, Apparatus, DetectorConfig, Particle};
use crate::propagator::{Grid, PlaneField};
use crate::scenario;
use crate::summation::Neumaier;
use crate::{exec, Complex64, Error, Result};

/// Fewest samples a visibility window may contain.
pub const MIN_WINDOW_SAMPLES: usize = 16;

/// Default local-visibility excess that counts as interference.
pub const DEFAULT_ONSET_THRESHOLD: f64 = 0.02;

/// Default |asymmetry| below which onset is reported as central.
pub const DEFAULT_CENTER_BAND: f64 = 0.1;

/// Minimum ratio of the fringe peak to the mean AC spectral power.
pub const FRINGE_PEAK_RATIO: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityProfile {
    pub grid_min: f64,
    pub grid_max: f64,
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl IntensityProfile {
    pub fn new(grid: &Grid, values: Vec<f64>, normalized: bool) -> Result<Self> {
        grid.check()?;
        if values.len() != grid.n {
            return Err(Error::invalid(format!(
                "profile has {} values for a {}-point grid",
                values.len(),
                grid.n
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Numerical(format!(
                "intensity value {v} is not a finite non-negative number"
            )));
        }
        Ok(Self {
            grid_min: grid.min,
            grid_max: grid.max,
            values,
            normalized,
        })
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.grid_min, self.grid_max, self.values.len())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trapezoid integral.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.grid().spacing())
    }

    /// Copy rescaled to unit trapezoid integral.
    pub fn normalized(&self) -> Result<Self> {
        let area = self.integral();
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "cannot normalize a profile with area {area}"
            )));
        }
        let values = self.values.iter().map(|v| v / area).collect();
        Ok(Self {
            values,
            normalized: true,
            ..self.clone()
        })
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid_min == other.grid_min && self.grid_max == other.grid_max && self.values.len() == other.values.len()
    }
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut acc = Neumaier::new();
    acc.add(0.5 * values[0]);
    for v in &values[1..values.len() - 1] {
        acc.add(*v);
    }
    acc.add(0.5 * values[values.len() - 1]);
    acc.value() * h
}

/// |ψ|², optionally scaled to unit area.
pub fn intensity(field: &PlaneField, normalize: bool) -> Result<IntensityProfile> {
    if field.values.is_empty() {
        return Err(Error::invalid("field is empty"));
    }
    field.check_finite()?;
    let raw = IntensityProfile::new(&field.grid, field.values.iter().map(|v| v.norm_sqr()).collect(), false)?;
    if normalize {
        raw.normalized()
    } else {
        Ok(raw)
    }
}

/// Parabola-refined extremum value at `b` with neighbours `a`, `c`.
#[inline]
fn vertex(a: f64, b: f64, c: f64) -> f64 {
    let curvature = a - 2.0 * b + c;
    if curvature == 0.0 {
        b
    } else {
        b - (a - c) * (a - c) / (8.0 * curvature)
    }
}

enum Extremum {
    Max(f64),
    Min(f64),
}

#[inline]
fn classify(a: f64, b: f64, c: f64) -> Option<Extremum> {
    if b > a && b >= c {
        Some(Extremum::Max(vertex(a, b, c)))
    } else if b < a && b <= c {
        Some(Extremum::Min(vertex(a, b, c).max(0.0)))
    } else {
        None
    }
}

fn contrast(max_sum: f64, max_count: usize, min_sum: f64, min_count: usize) -> f64 {
    if max_count == 0 || min_count == 0 {
        return 0.0;
    }
    let hi = max_sum / max_count as f64;
    let lo = min_sum / min_count as f64;
    if hi + lo <= 0.0 {
        return 0.0;
    }
    ((hi - lo) / (hi + lo)).clamp(0.0, 1.0)
}

fn slice_visibility(v: &[f64]) -> f64 {
    let (mut smax, mut nmax, mut smin, mut nmin) = (0.0, 0usize, 0.0, 0usize);
    for w in v.windows(3) {
        match classify(w[0], w[1], w[2]) {
            Some(Extremum::Max(x)) => {
                smax += x;
                nmax += 1;
            }
            Some(Extremum::Min(x)) => {
                smin += x;
                nmin += 1;
            }
            None => {}
        }
    }
    contrast(smax, nmax, smin, nmin)
}

/// Fringe visibility `(Ī_max − Ī_min)/(Ī_max + Ī_min)` over the samples in
/// `[lo, hi]`, where the bars are means over interior local extrema. Zero
/// when the window has no maximum or no minimum.
pub fn visibility(profile: &IntensityProfile, window: (f64, f64)) -> Result<f64> {
    let (i0, i1) = window_indices(&profile.grid(), window)?;
    Ok(slice_visibility(&profile.values[i0..=i1]))
}

fn window_indices(grid: &Grid, (lo, hi): (f64, f64)) -> Result<(usize, usize)> {
    let idx: Vec<usize> = (0..grid.n).filter(|&j| (lo..=hi).contains(&grid.x(j))).collect();
    if idx.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}] holds {} samples, need at least {MIN_WINDOW_SAMPLES}",
            idx.len()
        )));
    }
    Ok((idx[0], idx[idx.len() - 1]))
}

/// Visibility of a window of width `window_width` centred on every sample,
/// clipped at the grid ends.
pub fn local_visibility_profile(profile: &IntensityProfile, window_width: f64) -> Result<Vec<f64>> {
    let n = profile.len();
    let h = profile.grid().spacing();
    if !(window_width > 0.0 && h > 0.0) {
        return Err(Error::invalid(format!(
            "window width must be positive, got {window_width}"
        )));
    }
    let half = (0.5 * window_width / h).floor() as usize;
    if 2 * half + 1 < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "window width {window_width} spans {} samples, need at least {MIN_WINDOW_SAMPLES}",
            2 * half + 1
        )));
    }
    // Prefix sums over extrema; an extremum at j lies inside window [lo, hi]
    // iff lo < j < hi.
    let v = &profile.values;
    let mut max_sum = vec![0.0; n + 1];
    let mut max_cnt = vec![0usize; n + 1];
    let mut min_sum = vec![0.0; n + 1];
    let mut min_cnt = vec![0usize; n + 1];
    for j in 0..n {
        let (mut dmx, mut cmx, mut dmn, mut cmn) = (0.0, 0, 0.0, 0);
        if j > 0 && j + 1 < n {
            match classify(v[j - 1], v[j], v[j + 1]) {
                Some(Extremum::Max(x)) => (dmx, cmx) = (x, 1),
                Some(Extremum::Min(x)) => (dmn, cmn) = (x, 1),
                None => {}
            }
        }
        max_sum[j + 1] = max_sum[j] + dmx;
        max_cnt[j + 1] = max_cnt[j] + cmx;
        min_sum[j + 1] = min_sum[j] + dmn;
        min_cnt[j + 1] = min_cnt[j] + cmn;
    }
    Ok(exec::map_indexed(n, |i| {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        if hi < lo + 2 {
            return 0.0;
        }
        let (a, b) = (lo + 1, hi);
        contrast(
            max_sum[b] - max_sum[a],
            max_cnt[b] - max_cnt[a],
            min_sum[b] - min_sum[a],
            min_cnt[b] - min_cnt[a],
        )
    }))
}

/// One-sided power spectrum `|X_k|²`, `k = 0..=N/2`, of the mean-removed
/// profile.
fn power_spectrum(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mean = crate::summation::sum(values) / n as f64;
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm_sqr()).collect()
}

/// Period of the dominant AC spectral peak.
///
/// The search starts at the first bin where the spectrum rises, which skips
/// the leakage of a smooth envelope into the lowest bins. The peak bin is
/// refined by a parabola through the neighbouring magnitudes.
pub fn fringe_spacing(profile: &IntensityProfile) -> Result<f64> {
    let n = profile.len();
    if n < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "profile has {n} samples, need {MIN_WINDOW_SAMPLES}"
        )));
    }
    let p = power_spectrum(&profile.values);
    let kmax = p.len() - 1;
    let ac_mean = crate::summation::sum(&p[1..]) / kmax as f64;
    if !(ac_mean > 0.0) {
        return Err(Error::NoFringes("profile has no AC power".into()));
    }
    let Some(start) = (1..kmax).find(|&k| p[k + 1] > p[k]) else {
        return Err(Error::NoFringes("spectrum decreases monotonically".into()));
    };
    let mut k = start;
    for j in start..=kmax {
        if p[j] > p[k] {
            k = j;
        }
    }
    if p[k] < FRINGE_PEAK_RATIO * ac_mean {
        return Err(Error::NoFringes(format!(
            "peak power is {:.3} times the mean AC power",
            p[k] / ac_mean
        )));
    }
    let delta = if k < kmax {
        let (a, b, c) = (p[k - 1].sqrt(), p[k].sqrt(), p[k + 1].sqrt());
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            0.5 * (a - c) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    let h = profile.grid().spacing();
    Ok(n as f64 * h / (k as f64 + delta))
}

/// Fraction of the AC spectral power in the bin nearest spatial frequency
/// `frequency` (cycles per bohr).
pub fn spectral_power_fraction(profile: &IntensityProfile, frequency: f64) -> Result<f64> {
    let n = profile.len();
    if n < MIN_WINDOW_SAMPLES {
        return Err(Error::invalid(format!(
            "profile has {n} samples, need {MIN_WINDOW_SAMPLES}"
        )));
    }
    let p = power_spectrum(&profile.values);
    let total = crate::summation::sum(&p[1..]);
    if !(total > 0.0) {
        return Ok(0.0);
    }
    let k = (frequency * n as f64 * profile.grid().spacing()).round();
    if !(k >= 1.0 && k < p.len() as f64) {
        return Err(Error::invalid(format!(
            "frequency {frequency} is outside the resolvable band"
        )));
    }
    Ok(p[k as usize] / total)
}

/// Far-field two-slit pattern `cos²(πdx/λL)·sinc²(πwx/λL)` on the screen
/// grid, normalized to unit area.
pub fn fraunhofer_oracle(apparatus: &Apparatus, particle: &Particle) -> Result<IntensityProfile> {
    let grid = apparatus.screen_grid();
    let scale = particle.de_broglie_wavelength * apparatus.l2;
    let d = apparatus.slit_separation();
    let w = apparatus.slit_width;
    let values = (0..grid.n)
        .map(|j| {
            let x = grid.x(j);
            let u = PI * w * x / scale;
            let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
            (PI * d * x / scale).cos().powi(2) * sinc * sinc
        })
        .collect();
    IntensityProfile::new(&grid, values, false)?.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnsetSide {
    Left,
    Center,
    Right,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetParams {
    pub threshold: f64,
    pub center_band: f64,
}

impl Default for OnsetParams {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_ONSET_THRESHOLD,
            center_band: DEFAULT_CENTER_BAND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetReport {
    /// Local visibility of the profile.
    pub local_visibility: Vec<f64>,
    /// Local-visibility excess over the baseline, zero below the threshold.
    pub excess: Vec<f64>,
    pub onset_side: OnsetSide,
    pub visibility_centroid_x: f64,
    pub asymmetry_index: f64,
}

pub fn onset_metrics(
    profile: &IntensityProfile,
    baseline: &IntensityProfile,
    window_width: f64,
) -> Result<OnsetReport> {
    onset_metrics_with(profile, baseline, window_width, &OnsetParams::default())
}

/// Where local visibility exceeds the baseline's: the excess mass either
/// side of `x = 0`, its centroid and the asymmetry `(R − L)/(R + L)`.
pub fn onset_metrics_with(
    profile: &IntensityProfile,
    baseline: &IntensityProfile,
    window_width: f64,
    params: &OnsetParams,
) -> Result<OnsetReport> {
    if !profile.same_grid(baseline) {
        return Err(Error::invalid("profile and baseline are on different grids"));
    }
    let lv = local_visibility_profile(profile, window_width)?;
    let lb = local_visibility_profile(baseline, window_width)?;
    let excess: Vec<f64> = lv
        .iter()
        .zip(&lb)
        .map(|(p, b)| {
            let e = p - b;
            if e > params.threshold {
                e
            } else {
                0.0
            }
        })
        .collect();
    let grid = profile.grid();
    let (mut left, mut right, mut total, mut moment) =
        (Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new());
    for (j, &e) in excess.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let x = grid.x(j);
        total.add(e);
        moment.add(e * x);
        if x > 0.0 {
            right.add(e);
        } else if x < 0.0 {
            left.add(e);
        }
    }
    let (l, r, m) = (left.value(), right.value(), total.value());
    let (asymmetry_index, visibility_centroid_x, onset_side) = if m > 0.0 {
        let asym = if l + r > 0.0 { (r - l) / (r + l) } else { 0.0 };
        let side = if asym.abs() < params.center_band {
            OnsetSide::Center
        } else if asym > 0.0 {
            OnsetSide::Right
        } else {
            OnsetSide::Left
        };
        (asym, moment.value() / m, side)
    } else {
        (0.0, 0.0, OnsetSide::None)
    };
    Ok(OnsetReport {
        local_visibility: lv,
        excess,
        onset_side,
        visibility_centroid_x,
        asymmetry_index,
    })
}

/// Analysis windows for a given geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub central_window: (f64, f64),
    pub local_window_width: f64,
    pub onset: OnsetParams,
}

impl AnalysisSettings {
    /// Central window of ±0.4 single-slit lobe widths (`λL2/w`), clipped to
    /// the screen, and a local window of 0.19 lobe widths.
    pub fn for_apparatus(apparatus: &Apparatus, particle: &Particle) -> Self {
        let lobe = particle.de_broglie_wavelength * apparatus.l2 / apparatus.slit_width;
        Self {
            central_window: (
                (-0.4 * lobe).max(apparatus.screen_min),
                (0.4 * lobe).min(apparatus.screen_max),
            ),
            local_window_width: 0.19 * lobe,
            onset: OnsetParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub d_over_lambda_ph: f64,
    pub visibility_null: f64,
    pub visibility_det: f64,
    pub visibility_combined: f64,
    pub visibility_kick_reference: f64,
    pub centroid_null: f64,
    pub asymmetry_det: f64,
    pub p_det: f64,
}

impl SweepRow {
    pub const FIELDS: [&'static str; 9] = [
        "d",
        "d_over_lambda_ph",
        "visibility_null",
        "visibility_det",
        "visibility_combined",
        "visibility_kick_reference",
        "centroid_null",
        "asymmetry_det",
        "p_det",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.d,
            self.d_over_lambda_ph,
            self.visibility_null,
            self.visibility_det,
            self.visibility_combined,
            self.visibility_kick_reference,
            self.centroid_null,
            self.asymmetry_det,
            self.p_det,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// First `d`, in table order, at which `visibility_combined` exceeds
    /// `threshold`.
    pub fn onset_d(&self, threshold: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.visibility_combined > threshold)
            .map(|r| r.d)
    }
}

pub fn sweep_interslit(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    d_values: &[f64],
) -> Result<SweepTable> {
    let settings = AnalysisSettings::for_apparatus(apparatus, particle);
    sweep_interslit_with(apparatus, detector, particle, d_values, &settings)
}

/// Runs every channel at each slit separation, moving the slits
/// symmetrically about their midpoint. Rows are computed in parallel and
/// returned in input order.
pub fn sweep_interslit_with(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    d_values: &[f64],
    settings: &AnalysisSettings,
) -> Result<SweepTable> {
    if !detector.enabled {
        return Err(Error::InvalidState("sweep requires an enabled detector".into()));
    }
    for (i, &d) in d_values.iter().enumerate() {
        let report = validate(&apparatus.with_separation(d), detector, particle);
        if !report.ok {
            return Err(Error::invalid(format!("sweep row {i} (d = {d}): {}", report.summary())));
        }
    }
    let rows = exec::map_slice(d_values, |&d| sweep_row(apparatus, detector, particle, d, settings));
    Ok(SweepTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

fn sweep_row(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    d: f64,
    settings: &AnalysisSettings,
) -> Result<SweepRow> {
    let app = apparatus.with_separation(d);
    let sim = scenario::simulate(&app, detector, particle)?;
    let det = sim.detector.as_ref().expect("detector enabled");
    let window = settings.central_window;
    let local = settings.local_window_width;
    let i_a = intensity(&sim.one_slit_a.field, true)?;
    let i_b = intensity(&sim.one_slit_b.field, true)?;
    let i_null = intensity(&det.null.field, true)?;
    let i_det = intensity(&det.detected.field, true)?;
    let null_onset = onset_metrics_with(&i_null, &i_a, local, &settings.onset)?;
    let det_onset = onset_metrics_with(&i_det, &i_b, local, &settings.onset)?;
    Ok(SweepRow {
        d,
        d_over_lambda_ph: d / detector.photon_wavelength,
        visibility_null: visibility(&i_null, window)?,
        visibility_det: visibility(&i_det, window)?,
        visibility_combined: visibility(&det.combined, window)?,
        visibility_kick_reference: visibility(&det.kick_reference, window)?,
        centroid_null: null_onset.visibility_centroid_x,
        asymmetry_det: det_onset.asymmetry_index,
        p_det: det.p_det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(n: usize, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> IntensityProfile {
        let g = Grid::new(lo, hi, n);
        IntensityProfile::new(&g, (0..n).map(|j| f(g.x(j))).collect(), false).unwrap()
    }

    #[test]
    fn normalization_and_zero_field() {
        let g = Grid::new(-1.0, 1.0, 101);
        let f = PlaneField::new("t", g, (0..101).map(|j| Complex64::new(g.x(j), 0.3)).collect()).unwrap();
        let p = intensity(&f, true).unwrap();
        assert!((p.integral() - 1.0).abs() < 1e-12);
        assert!(p.values.iter().all(|v| *v >= 0.0));
        let z = PlaneField::zeros("z", g);
        assert!(matches!(intensity(&z, true), Err(Error::DegenerateInput(_))));
        assert!(intensity(&z, false).is_ok());
    }

    #[test]
    fn visibility_of_synthetic_fringes() {
        let k = 2.0 * PI / 10.0;
        let full = profile(8001, -100.0, 100.0, |x| (k * x).cos().powi(2));
        assert!((visibility(&full, (-100.0, 100.0)).unwrap() - 1.0).abs() < 1e-6);
        let half = profile(8001, -100.0, 100.0, |x| 2.0 + (k * x).cos());
        assert!((visibility(&half, (-100.0, 100.0)).unwrap() - 0.5).abs() < 1e-6);
        let flat = profile(100, 0.0, 1.0, |_| 3.0);
        assert_eq!(visibility(&flat, (0.0, 1.0)).unwrap(), 0.0);
        assert!(visibility(&flat, (0.0, 0.1)).is_err());
    }

    #[test]
    fn local_visibility_locality() {
        let k = 2.0 * PI / 5.0;
        let p = profile(2001, -100.0, 100.0, |x| {
            if x > 0.0 {
                1.0 + 0.8 * (k * x).cos()
            } else {
                1.0
            }
        });
        let lv = local_visibility_profile(&p, 20.0).unwrap();
        let g = p.grid();
        for (j, v) in lv.iter().enumerate() {
            let x = g.x(j);
            if x < -15.0 {
                assert_eq!(*v, 0.0);
            }
            if x > 15.0 {
                assert!((v - 0.8).abs() < 1e-3, "x = {x}: {v}");
            }
        }
        let flat = profile(200, 0.0, 1.0, |_| 1.0);
        assert!(local_visibility_profile(&flat, 0.5).unwrap().iter().all(|v| *v == 0.0));
        assert!(local_visibility_profile(&flat, 0.01).is_err());
    }

    #[test]
    fn spacing_of_single_tone() {
        let period = 7.3;
        let p = profile(1024, 0.0, 200.0, |x| 1.0 + (2.0 * PI * x / period).cos());
        let bin = period * period / 200.0;
        assert!((fringe_spacing(&p).unwrap() - period).abs() < bin);
        let flat = profile(1024, 0.0, 200.0, |_| 1.0);
        assert!(matches!(fringe_spacing(&flat), Err(Error::NoFringes(_))));
    }

    #[test]
    fn oracle_zeros_and_peak() {
        let p = Particle::new(1.0, 1.4e5).unwrap();
        let (mut a, _, _) = crate::presets::desk_scale();
        a.screen_samples = 2049;
        let o = fraunhofer_oracle(&a, &p).unwrap();
        assert!((o.integral() - 1.0).abs() < 1e-9);
        let mid = o.values[1024];
        assert_eq!(o.grid().x(1024), 0.0);
        assert!(o.values.iter().all(|v| *v <= mid));
    }

    #[test]
    fn onset_cases() {
        let k = 2.0 * PI / 5.0;
        let base = profile(2001, -100.0, 100.0, |_| 1.0);
        let same = onset_metrics(&base, &base, 20.0).unwrap();
        assert_eq!(same.onset_side, OnsetSide::None);
        assert_eq!(same.asymmetry_index, 0.0);

        let right = profile(2001, -100.0, 100.0, |x| {
            if x > 20.0 {
                1.0 + 0.5 * (k * x).cos()
            } else {
                1.0
            }
        });
        let r = onset_metrics(&right, &base, 20.0).unwrap();
        assert_eq!(r.onset_side, OnsetSide::Right);
        assert_eq!(r.asymmetry_index, 1.0);
        assert!(r.visibility_centroid_x > 0.0);

        let sym = profile(2001, -100.0, 100.0, |x| 1.0 + 0.5 * (k * x).cos());
        let s = onset_metrics(&sym, &base, 20.0).unwrap();
        assert_eq!(s.onset_side, OnsetSide::Center);
        assert!(s.asymmetry_index.abs() < 0.05);

        let other = profile(100, 0.0, 1.0, |_| 1.0);
        assert!(onset_metrics(&sym, &other, 20.0).is_err());
    }
}
