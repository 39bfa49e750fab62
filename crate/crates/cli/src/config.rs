//! Run configuration file (JSON).
//!
//! Unknown keys are rejected everywhere. Optional sections and keys take the
//! defaults documented on each field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twoslit_core::analysis::{AnalysisSettings, OnsetParams};
use twoslit_core::apparatus::{Apparatus, DetectorConfig, Particle};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub particle: ParticleSection,
    pub apparatus: ApparatusSection,
    /// Absent: detector disabled.
    #[serde(default)]
    pub detector: Option<DetectorSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub paths: Option<PathsSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub mass: f64,
    pub kinetic_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApparatusSection {
    pub source_x: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "slit_A_center")]
    pub slit_a_center: f64,
    #[serde(rename = "slit_B_center")]
    pub slit_b_center: f64,
    pub slit_width: f64,
    pub screen_min: f64,
    pub screen_max: f64,
    pub screen_samples: usize,
    pub aperture_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    /// Default true.
    #[serde(default = "default_true")]
    pub enabled: bool,
    pub photon_wavelength: f64,
    /// Default: photon_wavelength.
    #[serde(default)]
    pub radius_rho: Option<f64>,
    /// Default: radius_rho.
    #[serde(default)]
    pub depth_epsilon: Option<f64>,
    #[serde(default)]
    pub detection_probability_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Default: ±0.4 single-slit lobe widths, clipped to the screen.
    #[serde(default)]
    pub central_window: Option<(f64, f64)>,
    /// Default: 0.19 single-slit lobe widths.
    #[serde(default)]
    pub local_window_width: Option<f64>,
    /// Default: 0.02.
    #[serde(default)]
    pub onset_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub d_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub n_paths: usize,
    pub n_slices: usize,
    /// Default 0.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Default ".".
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_true")]
    pub emit_csv: bool,
    #[serde(default = "default_true")]
    pub emit_json: bool,
    #[serde(default)]
    pub emit_svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_dir(),
            emit_csv: true,
            emit_json: true,
            emit_svg: false,
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a configuration; schema errors name the offending key path.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("config error at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn particle(&self) -> Result<Particle, CliError> {
        Particle::new(self.particle.mass, self.particle.kinetic_energy)
            .map_err(|e| CliError::Validation(format!("particle: {e}")))
    }

    pub fn apparatus(&self) -> Apparatus {
        let a = &self.apparatus;
        Apparatus {
            source_x: a.source_x,
            l1: a.l1,
            l2: a.l2,
            slit_a_center: a.slit_a_center,
            slit_b_center: a.slit_b_center,
            slit_width: a.slit_width,
            screen_min: a.screen_min,
            screen_max: a.screen_max,
            screen_samples: a.screen_samples,
            aperture_samples: a.aperture_samples,
        }
    }

    pub fn detector(&self) -> DetectorConfig {
        match &self.detector {
            None => DetectorConfig::disabled(),
            Some(d) => {
                let radius_rho = d.radius_rho.unwrap_or(d.photon_wavelength);
                DetectorConfig {
                    enabled: d.enabled,
                    photon_wavelength: d.photon_wavelength,
                    radius_rho,
                    depth_epsilon: d.depth_epsilon.unwrap_or(radius_rho),
                    detection_probability_override: d.detection_probability_override,
                }
            }
        }
    }

    pub fn analysis(&self, apparatus: &Apparatus, particle: &Particle) -> AnalysisSettings {
        let defaults = AnalysisSettings::for_apparatus(apparatus, particle);
        let a = &self.analysis;
        AnalysisSettings {
            central_window: a.central_window.unwrap_or(defaults.central_window),
            local_window_width: a.local_window_width.unwrap_or(defaults.local_window_width),
            onset: OnsetParams {
                threshold: a.onset_threshold.unwrap_or(defaults.onset.threshold),
                ..defaults.onset
            },
        }
    }
}
