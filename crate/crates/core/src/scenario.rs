//! Channel amplitudes on the screen.
//!
//! The source illuminates each slit as a point source over `L1`; the aperture
//! field is then propagated over `L2`. With the detector enabled, amplitude
//! leaving slit B stops on the interaction disc (radius ρ, depth ε behind
//! the barrier). Two outcomes are tracked separately:
//!
//! * **null**: no photon scattered. The one-slit-A field, plus the part of
//!   the B stub that meets A's paths, which is confined to the crossing
//!   window of straight lines from slit A through the disc.
//! * **detected**: the electron is localized on the disc. The disc re-emits
//!   the B stub plus whatever A amplitude reaches it, propagated over
//!   `L2 − ε`.
//!
//! The observed pattern is the mixture of the two, weighted by the detection
//! probability.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::{intensity, IntensityProfile};
use crate::apparatus::{validate, Apparatus, DetectorConfig, Particle, Slit};
use crate::propagator::{point_source_field, propagate, propagate_segments, Grid, PlaneField};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    NoDetector,
    OneSlitA,
    OneSlitB,
    NullDetection,
    DetectedAtB,
    KickReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlitId {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelField {
    pub channel: ChannelKind,
    pub field: PlaneField,
    pub probability_weight: f64,
}

/// Straight lines from the centre of slit A that pass within ρ of the disc
/// centre, as slopes and as the screen interval they reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingWindow {
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub screen_lo: f64,
    pub screen_hi: f64,
}

impl CrossingWindow {
    pub fn intersects(&self, lo: f64, hi: f64) -> bool {
        self.screen_lo <= hi && self.screen_hi >= lo
    }
}

fn checked(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> Result<()> {
    validate(apparatus, detector, particle).into_result().map(|_| ())
}

fn require_detector(detector: &DetectorConfig) -> Result<()> {
    if detector.enabled {
        Ok(())
    } else {
        Err(Error::InvalidState("detector is disabled".into()))
    }
}

/// Point-source field across one slit opening.
fn barrier_field(apparatus: &Apparatus, particle: &Particle, slit: &Slit) -> Result<PlaneField> {
    point_source_field(
        apparatus.source_x,
        &slit.grid(apparatus.aperture_samples),
        apparatus.l1,
        particle,
    )
}

/// Screen field transmitted by the given openings. Zero-width openings are
/// closed and contribute nothing.
pub fn aperture_channel(
    apparatus: &Apparatus,
    particle: &Particle,
    slits: &[Slit],
    channel: ChannelKind,
) -> Result<ChannelField> {
    let fields = slits
        .iter()
        .filter(|s| s.width > 0.0)
        .map(|s| barrier_field(apparatus, particle, s))
        .collect::<Result<Vec<_>>>()?;
    let screen = apparatus.screen_grid();
    let field = if fields.is_empty() {
        screen.check()?;
        PlaneField::zeros("screen", screen)
    } else {
        let refs: Vec<&PlaneField> = fields.iter().collect();
        propagate_segments(&refs, apparatus.l2, particle, &screen)?
    };
    Ok(ChannelField {
        channel,
        field,
        probability_weight: 1.0,
    })
}

pub fn two_slit_amplitude(apparatus: &Apparatus, particle: &Particle) -> Result<ChannelField> {
    checked(apparatus, &DetectorConfig::disabled(), particle)?;
    aperture_channel(
        apparatus,
        particle,
        &[apparatus.slit_a(), apparatus.slit_b()],
        ChannelKind::NoDetector,
    )
}

pub fn one_slit_amplitude(apparatus: &Apparatus, particle: &Particle, slit: SlitId) -> Result<ChannelField> {
    checked(apparatus, &DetectorConfig::disabled(), particle)?;
    let (s, kind) = match slit {
        SlitId::A => (apparatus.slit_a(), ChannelKind::OneSlitA),
        SlitId::B => (apparatus.slit_b(), ChannelKind::OneSlitB),
    };
    aperture_channel(apparatus, particle, &[s], kind)
}

pub fn crossing_window(apparatus: &Apparatus, detector: &DetectorConfig) -> Result<CrossingWindow> {
    let eps = detector.depth_epsilon;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("detector depth must be positive, got {eps}")));
    }
    let d = apparatus.slit_separation();
    let rho = detector.radius_rho;
    let slope_lo = (d - rho) / eps;
    let slope_hi = (d + rho) / eps;
    let x_a = apparatus.slit_a_center;
    Ok(CrossingWindow {
        slope_lo,
        slope_hi,
        screen_lo: x_a + slope_lo * apparatus.l2,
        screen_hi: x_a + slope_hi * apparatus.l2,
    })
}

/// Indicator of `[lo, hi]` on `grid`, ramping linearly across one cell at
/// each edge.
fn window_weights(grid: &Grid, lo: f64, hi: f64) -> Vec<f64> {
    let h = grid.spacing();
    (0..grid.n)
        .map(|j| {
            let x = grid.x(j);
            let left = ((x - lo) / h + 0.5).clamp(0.0, 1.0);
            let right = ((hi - x) / h + 0.5).clamp(0.0, 1.0);
            left * right
        })
        .collect()
}

/// Intermediate fields shared by the detector channels.
struct Stage {
    barrier_a: PlaneField,
    barrier_b: PlaneField,
    disc: Grid,
    /// Slit-B amplitude on the disc.
    stub_disc: PlaneField,
}

impl Stage {
    fn new(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> Result<Self> {
        let barrier_a = barrier_field(apparatus, particle, &apparatus.slit_a())?;
        let barrier_b = barrier_field(apparatus, particle, &apparatus.slit_b())?;
        let disc = detector.disc_grid(apparatus, particle)?;
        let stub_disc = propagate(&barrier_b, detector.depth_epsilon, particle, &disc)?;
        Ok(Self {
            barrier_a,
            barrier_b,
            disc,
            stub_disc,
        })
    }

    fn stub_on_screen(
        &self,
        apparatus: &Apparatus,
        detector: &DetectorConfig,
        particle: &Particle,
    ) -> Result<PlaneField> {
        propagate(
            &self.stub_disc,
            apparatus.l2 - detector.depth_epsilon,
            particle,
            &apparatus.screen_grid(),
        )
    }

    fn p_det(&self, detector: &DetectorConfig) -> f64 {
        detector
            .detection_probability_override
            .unwrap_or_else(|| self.stub_disc.norm_sqr() / (self.barrier_a.norm_sqr() + self.barrier_b.norm_sqr()))
    }
}

/// Slit A's diffraction cone at depth ε: the opening widened by `ελ/w` on
/// each side.
fn a_cone_meets_disc(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> bool {
    let w = apparatus.slit_width;
    let half = 0.5 * w + detector.depth_epsilon * particle.de_broglie_wavelength / w;
    let (a_lo, a_hi) = (apparatus.slit_a_center - half, apparatus.slit_a_center + half);
    let (d_lo, d_hi) = (
        apparatus.slit_b_center - detector.radius_rho,
        apparatus.slit_b_center + detector.radius_rho,
    );
    a_lo <= d_hi && a_hi >= d_lo
}

fn null_from(
    psi_a: &PlaneField,
    stage: &Stage,
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    p_det: f64,
) -> Result<ChannelField> {
    let window = crossing_window(apparatus, detector)?;
    let weights = window_weights(&psi_a.grid, window.screen_lo, window.screen_hi);
    let field = if weights.iter().all(|w| *w == 0.0) {
        psi_a.clone()
    } else {
        let stub = stage.stub_on_screen(apparatus, detector, particle)?;
        let values = psi_a
            .values
            .iter()
            .zip(&stub.values)
            .zip(&weights)
            .map(|((a, s), w)| a + s * *w)
            .collect();
        PlaneField::new("screen null", psi_a.grid, values)?
    };
    Ok(ChannelField {
        channel: ChannelKind::NullDetection,
        field,
        probability_weight: 1.0 - p_det,
    })
}

/// Disc source `φ_C = φ_B_stub + φ_A_in` on the disc grid.
fn disc_source(
    stage: &Stage,
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
) -> Result<PlaneField> {
    if !a_cone_meets_disc(apparatus, detector, particle) {
        return Ok(stage.stub_disc.clone());
    }
    let a_in = propagate(&stage.barrier_a, detector.depth_epsilon, particle, &stage.disc)?;
    let values = stage
        .stub_disc
        .values
        .iter()
        .zip(&a_in.values)
        .map(|(b, a)| b + a)
        .collect();
    PlaneField::new("disc", stage.disc, values)
}

fn detected_from(
    stage: &Stage,
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    p_det: f64,
) -> Result<ChannelField> {
    let source = disc_source(stage, apparatus, detector, particle)?;
    let raw = propagate(
        &source,
        apparatus.l2 - detector.depth_epsilon,
        particle,
        &apparatus.screen_grid(),
    )?;
    let area = intensity(&raw, false)?.integral();
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::DegenerateInput("detected channel carries no amplitude".into()));
    }
    let field = raw.scaled(Complex64::new(1.0 / area.sqrt(), 0.0));
    Ok(ChannelField {
        channel: ChannelKind::DetectedAtB,
        field,
        probability_weight: p_det,
    })
}

/// Screen amplitude when no photon scatters: `Ψ_A + W·Ψ_B_stub` with `W`
/// the crossing-window indicator. Exactly the one-slit-A field when the
/// window misses the screen.
pub fn null_channel_amplitude(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
) -> Result<ChannelField> {
    require_detector(detector)?;
    checked(apparatus, detector, particle)?;
    let stage = Stage::new(apparatus, detector, particle)?;
    let psi_a = aperture_channel(apparatus, particle, &[apparatus.slit_a()], ChannelKind::OneSlitA)?;
    null_from(
        &psi_a.field,
        &stage,
        apparatus,
        detector,
        particle,
        stage.p_det(detector),
    )
}

/// Screen amplitude re-emitted from the disc after a detection, scaled so
/// its intensity has unit area.
pub fn detected_channel_amplitude(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
) -> Result<ChannelField> {
    require_detector(detector)?;
    checked(apparatus, detector, particle)?;
    let stage = Stage::new(apparatus, detector, particle)?;
    detected_from(&stage, apparatus, detector, particle, stage.p_det(detector))
}

/// Disc re-emission source `φ_C` on the disc grid.
pub fn detected_disc_source(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
) -> Result<PlaneField> {
    require_detector(detector)?;
    checked(apparatus, detector, particle)?;
    let stage = Stage::new(apparatus, detector, particle)?;
    disc_source(&stage, apparatus, detector, particle)
}

/// Override if set, else the fraction of the aperture probability that
/// reaches the disc from slit B.
pub fn detection_probability(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> Result<f64> {
    require_detector(detector)?;
    if let Some(p) = detector.detection_probability_override {
        return Ok(p);
    }
    checked(apparatus, detector, particle)?;
    Ok(Stage::new(apparatus, detector, particle)?.p_det(detector))
}

/// As [`detection_probability`] with explicit openings (e.g. slits of
/// different widths). The disc is centred on `slit_b`.
pub fn detection_probability_for_slits(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
    slit_a: Slit,
    slit_b: Slit,
) -> Result<f64> {
    require_detector(detector)?;
    if let Some(p) = detector.detection_probability_override {
        return Ok(p);
    }
    let app = Apparatus {
        slit_a_center: slit_a.center,
        slit_b_center: slit_b.center,
        ..*apparatus
    };
    let a = barrier_field(&app, particle, &slit_a)?;
    let b = barrier_field(&app, particle, &slit_b)?;
    let disc = detector.disc_grid(&app, particle)?;
    let stub = propagate(&b, detector.depth_epsilon, particle, &disc)?;
    Ok(stub.norm_sqr() / (a.norm_sqr() + b.norm_sqr()))
}

/// `(1 − p)·Î_null + p·Î_det` with both intensities at unit area.
pub fn combined_intensity(null: &ChannelField, det: &ChannelField, p_det: f64) -> Result<IntensityProfile> {
    if !(0.0..=1.0).contains(&p_det) {
        return Err(Error::invalid(format!("p_det = {p_det} outside [0, 1]")));
    }
    if null.field.grid != det.field.grid {
        return Err(Error::invalid("null and detected channels are on different grids"));
    }
    let i_null = intensity(&null.field, true)?;
    let i_det = intensity(&det.field, true)?;
    let q = 1.0 - p_det;
    let values = i_null
        .values
        .iter()
        .zip(&i_det.values)
        .map(|(n, d)| q * n + p_det * d)
        .collect();
    IntensityProfile::new(&null.field.grid, values, true)
}

/// Coherence factor `exp(−(π d/λ_ph)²/2)` of the momentum-kick model.
pub fn kick_coherence(d: f64, photon_wavelength: f64) -> f64 {
    let u = PI * d / photon_wavelength;
    (-0.5 * u * u).exp()
}

fn kick_from(psi_a: &PlaneField, psi_b: &PlaneField, gamma: f64) -> Result<IntensityProfile> {
    let values = psi_a
        .values
        .iter()
        .zip(&psi_b.values)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() + 2.0 * gamma * (a * b.conj()).re).max(0.0))
        .collect();
    IntensityProfile::new(&psi_a.grid, values, false)?.normalized()
}

/// Two-slit pattern with the cross term damped by [`kick_coherence`],
/// normalized to unit area.
pub fn kick_reference_intensity(
    apparatus: &Apparatus,
    detector: &DetectorConfig,
    particle: &Particle,
) -> Result<IntensityProfile> {
    require_detector(detector)?;
    checked(apparatus, detector, particle)?;
    let a = aperture_channel(apparatus, particle, &[apparatus.slit_a()], ChannelKind::OneSlitA)?;
    let b = aperture_channel(apparatus, particle, &[apparatus.slit_b()], ChannelKind::OneSlitB)?;
    let gamma = kick_coherence(apparatus.slit_separation(), detector.photon_wavelength);
    kick_from(&a.field, &b.field, gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorChannels {
    pub window: CrossingWindow,
    pub p_det: f64,
    pub null: ChannelField,
    pub detected: ChannelField,
    pub combined: IntensityProfile,
    pub kick_reference: IntensityProfile,
}

/// Every channel of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub no_detector: ChannelField,
    pub one_slit_a: ChannelField,
    pub one_slit_b: ChannelField,
    pub detector: Option<DetectorChannels>,
}

/// Runs all channels, sharing intermediate fields between them. Each output
/// is identical to the corresponding single-channel function.
pub fn simulate(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> Result<Simulation> {
    checked(apparatus, detector, particle)?;
    let no_detector = aperture_channel(
        apparatus,
        particle,
        &[apparatus.slit_a(), apparatus.slit_b()],
        ChannelKind::NoDetector,
    )?;
    let one_slit_a = aperture_channel(apparatus, particle, &[apparatus.slit_a()], ChannelKind::OneSlitA)?;
    let one_slit_b = aperture_channel(apparatus, particle, &[apparatus.slit_b()], ChannelKind::OneSlitB)?;
    let channels = if detector.enabled {
        let stage = Stage::new(apparatus, detector, particle)?;
        let p_det = stage.p_det(detector);
        let null = null_from(&one_slit_a.field, &stage, apparatus, detector, particle, p_det)?;
        let detected = detected_from(&stage, apparatus, detector, particle, p_det)?;
        let combined = combined_intensity(&null, &detected, p_det)?;
        let gamma = kick_coherence(apparatus.slit_separation(), detector.photon_wavelength);
        let kick_reference = kick_from(&one_slit_a.field, &one_slit_b.field, gamma)?;
        Some(DetectorChannels {
            window: crossing_window(apparatus, detector)?,
            p_det,
            null,
            detected,
            combined,
            kick_reference,
        })
    } else {
        None
    };
    Ok(Simulation {
        no_detector,
        one_slit_a,
        one_slit_b,
        detector: channels,
    })
}
