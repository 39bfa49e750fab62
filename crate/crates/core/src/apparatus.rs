//! Units, particle kinematics, experiment geometry and configuration checks.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::propagator::Grid;
use crate::{Error, Result};

/// CODATA 2018 Bohr radius in centimetres.
pub const BOHR_RADIUS_CM: f64 = 0.529177210903e-8;

/// Hard cap on the number of samples used across the detection disc.
pub const MAX_DISC_SAMPLES: usize = 1 << 16;

/// Converts centimetres to bohr.
pub fn cm_to_bohr(x_cm: f64) -> f64 {
    x_cm / BOHR_RADIUS_CM
}

/// A free particle of given mass and kinetic energy, ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub kinetic_energy: f64,
    pub momentum: f64,
    pub velocity: f64,
    pub de_broglie_wavelength: f64,
}

impl Particle {
    pub fn new(mass: f64, kinetic_energy: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        if !(kinetic_energy > 0.0 && kinetic_energy.is_finite()) {
            return Err(Error::invalid(format!(
                "kinetic energy must be positive, got {kinetic_energy}"
            )));
        }
        let momentum = (2.0 * mass * kinetic_energy).sqrt();
        Ok(Self {
            mass,
            kinetic_energy,
            momentum,
            velocity: momentum / mass,
            de_broglie_wavelength: 2.0 * PI / momentum,
        })
    }

    /// Classical time of flight over a longitudinal distance.
    pub fn flight_time(&self, distance: f64) -> f64 {
        distance / self.velocity
    }
}

pub fn make_particle(mass: f64, kinetic_energy: f64) -> Result<Particle> {
    Particle::new(mass, kinetic_energy)
}

/// A hard-edged slit `[center - width/2, center + width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slit {
    pub center: f64,
    pub width: f64,
}

impl Slit {
    pub fn interval(&self) -> (f64, f64) {
        (self.center - 0.5 * self.width, self.center + 0.5 * self.width)
    }

    /// Cell-centred sampling of the opening, `samples` points.
    pub fn grid(&self, samples: usize) -> Grid {
        let (lo, hi) = self.interval();
        Grid::cell_centered(lo, hi, samples)
    }
}

/// Source / barrier / screen geometry. Slit A is on the left, slit B (the
/// detector side) on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Apparatus {
    pub source_x: f64,
    pub l1: f64,
    pub l2: f64,
    pub slit_a_center: f64,
    pub slit_b_center: f64,
    pub slit_width: f64,
    pub screen_min: f64,
    pub screen_max: f64,
    pub screen_samples: usize,
    pub aperture_samples: usize,
}

impl Apparatus {
    /// Inter-slit distance d.
    pub fn slit_separation(&self) -> f64 {
        self.slit_b_center - self.slit_a_center
    }

    pub fn slit_a(&self) -> Slit {
        Slit {
            center: self.slit_a_center,
            width: self.slit_width,
        }
    }

    pub fn slit_b(&self) -> Slit {
        Slit {
            center: self.slit_b_center,
            width: self.slit_width,
        }
    }

    pub fn screen_grid(&self) -> Grid {
        Grid::new(self.screen_min, self.screen_max, self.screen_samples)
    }

    /// Same apparatus with the slits moved symmetrically about their current
    /// midpoint to separation `d`.
    pub fn with_separation(&self, d: f64) -> Self {
        let mid = 0.5 * (self.slit_a_center + self.slit_b_center);
        Self {
            slit_a_center: mid - 0.5 * d,
            slit_b_center: mid + 0.5 * d,
            ..*self
        }
    }
}

/// The photon-beam detection region behind slit B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub enabled: bool,
    pub photon_wavelength: f64,
    pub radius_rho: f64,
    pub depth_epsilon: f64,
    pub detection_probability_override: Option<f64>,
}

impl DetectorConfig {
    /// Enabled detector with the default radius (= photon wavelength) and
    /// depth (= radius).
    pub fn with_photon_wavelength(photon_wavelength: f64) -> Self {
        Self {
            enabled: true,
            photon_wavelength,
            radius_rho: photon_wavelength,
            depth_epsilon: photon_wavelength,
            detection_probability_override: None,
        }
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::with_photon_wavelength(1.0)
        }
    }

    /// Disc center as (x, z) with z measured from the barrier plane.
    pub fn disc_center(&self, apparatus: &Apparatus) -> (f64, f64) {
        (apparatus.slit_b_center, self.depth_epsilon)
    }

    /// Cell-centred grid across the disc diameter at depth ε, fine enough to
    /// resolve the free kernel over ε from anywhere within `2ρ + w` of a
    /// sample.
    pub fn disc_grid(&self, apparatus: &Apparatus, particle: &Particle) -> Result<Grid> {
        let n = disc_samples(apparatus, self, particle);
        if n > MAX_DISC_SAMPLES {
            return Err(Error::invalid(format!(
                "disc grid needs {n} samples (limit {MAX_DISC_SAMPLES})"
            )));
        }
        let c = apparatus.slit_b_center;
        Ok(Grid::cell_centered(c - self.radius_rho, c + self.radius_rho, n))
    }
}

fn disc_samples(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> usize {
    let reach = 2.0 * detector.radius_rho + apparatus.slit_width;
    let spacing = particle.de_broglie_wavelength * detector.depth_epsilon / (4.0 * reach);
    let n = (2.0 * detector.radius_rho / spacing).ceil();
    if n.is_finite() && n < usize::MAX as f64 {
        (n as usize).max(16)
    } else {
        usize::MAX
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn push(&mut self, severity: Severity, code: &str, message: String) {
        self.issues.push(Issue {
            severity,
            code: code.to_string(),
            message,
        });
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn summary(&self) -> String {
        self.to_string()
    }

    /// Turns a failing report into an error.
    pub fn into_result(self) -> Result<Self> {
        if self.ok {
            Ok(self)
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for issue in &self.issues {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            let sev = match issue.severity {
                Severity::Warning => "warning",
                Severity::Error => "error",
            };
            write!(f, "{sev} [{}]: {}", issue.code, issue.message)?;
        }
        if first {
            write!(f, "no issues")?;
        }
        Ok(())
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// Checks every configuration invariant and the numerical-regime warnings.
pub fn validate(apparatus: &Apparatus, detector: &DetectorConfig, particle: &Particle) -> ValidationReport {
    use Severity::*;
    let mut r = ValidationReport::default();

    if !positive(particle.mass) || !positive(particle.kinetic_energy) {
        r.push(Error, "particle", "mass and kinetic energy must be positive".into());
    }
    if !positive(apparatus.l1) {
        r.push(
            Error,
            "l1",
            format!("source-barrier distance must be positive, got {}", apparatus.l1),
        );
    }
    if !positive(apparatus.l2) {
        r.push(
            Error,
            "l2",
            format!("barrier-screen distance must be positive, got {}", apparatus.l2),
        );
    }
    if !positive(apparatus.slit_width) {
        r.push(
            Error,
            "slit-width",
            format!("slit width must be positive, got {}", apparatus.slit_width),
        );
    }
    if !apparatus.source_x.is_finite() || !apparatus.slit_a_center.is_finite() || !apparatus.slit_b_center.is_finite() {
        r.push(Error, "non-finite", "source and slit positions must be finite".into());
    }
    let d = apparatus.slit_separation();
    if !(d > apparatus.slit_width) {
        r.push(
            Error,
            "slits-overlap",
            format!(
                "slits overlap: separation d = {d} must exceed slit width {}",
                apparatus.slit_width
            ),
        );
    }
    if !(apparatus.screen_min < apparatus.screen_max)
        || !apparatus.screen_min.is_finite()
        || !apparatus.screen_max.is_finite()
    {
        r.push(Error, "screen-range", "screen_min must be below screen_max".into());
    }
    if apparatus.screen_samples < 2 {
        r.push(Error, "screen-samples", "screen_samples must be at least 2".into());
    }
    if apparatus.aperture_samples < 2 {
        r.push(Error, "aperture-samples", "aperture_samples must be at least 2".into());
    }

    if detector.enabled {
        if !positive(detector.radius_rho) {
            r.push(Error, "detector-radius", "detector radius must be positive".into());
        }
        if !positive(detector.depth_epsilon) {
            r.push(Error, "detector-depth", "detector depth must be positive".into());
        }
        if !positive(detector.photon_wavelength) {
            r.push(Error, "photon-wavelength", "photon wavelength must be positive".into());
        }
        if let Some(p) = detector.detection_probability_override {
            if !(0.0..=1.0).contains(&p) {
                r.push(Error, "detection-probability", format!("override {p} outside [0, 1]"));
            }
        }
        if positive(detector.depth_epsilon) && positive(apparatus.l2) && detector.depth_epsilon >= apparatus.l2 {
            r.push(Error, "detector-depth", "detector depth must be smaller than L2".into());
        }
    }

    if r.issues.iter().any(|i| i.severity == Error) {
        r.ok = false;
        return r;
    }

    // Regime warnings, only meaningful for a structurally valid setup.
    let lambda = particle.de_broglie_wavelength;
    let spacing = apparatus.slit_width / apparatus.aperture_samples as f64;
    let screen_span = apparatus.screen_max - apparatus.screen_min;
    let aperture_span = d + apparatus.slit_width;
    let bound = lambda * apparatus.l2 / (2.0 * (screen_span + aperture_span));
    if spacing > bound {
        r.push(
            Warning,
            "aliasing",
            format!("aliasing risk: aperture spacing {spacing:.4e} exceeds {bound:.4e}"),
        );
    }
    let fresnel = apparatus.slit_width.powi(2) / (lambda * apparatus.l2);
    if fresnel > 0.1 {
        r.push(
            Warning,
            "near-field",
            format!("far-field oracle inapplicable: Fresnel number {fresnel:.3} > 0.1"),
        );
    }
    if detector.enabled {
        if detector.radius_rho < 0.5 * apparatus.slit_width {
            r.push(
                Warning,
                "detector-coverage",
                format!(
                    "detector does not cover slit B: radius {} < half slit width {}",
                    detector.radius_rho,
                    0.5 * apparatus.slit_width
                ),
            );
        }
        let disc_bound = lambda * detector.depth_epsilon / (2.0 * (2.0 * detector.radius_rho + apparatus.slit_width));
        if spacing > disc_bound {
            r.push(
                Warning,
                "aliasing",
                format!(
                    "aliasing risk onto the detection disc: aperture spacing {spacing:.4e} exceeds {disc_bound:.4e}"
                ),
            );
        }
        let n = disc_samples(apparatus, detector, particle);
        if n > MAX_DISC_SAMPLES {
            r.push(
                Error,
                "disc-resolution",
                format!("detection disc needs {n} samples, limit is {MAX_DISC_SAMPLES}"),
            );
        }
    }

    r.ok = !r.issues.iter().any(|i| i.severity == Error);
    r
}
