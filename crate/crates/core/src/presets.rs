//! Bundled parameter sets.
//!
//! `paper_scale` uses macroscopic distances (L1 = L2 = 1e9 bohr, a few cm)
//! and a visible-light photon (1.89e4 bohr ≈ 1e-4 cm). `desk_scale` divides
//! every length by 1e4 and multiplies the kinetic energy by 1e8, so d/ρ,
//! w/λ_dB, L/ρ and the Fresnel number are unchanged and the pipelines run
//! on the same sample counts.
//!
//! Both use ρ = 20 w and w = 8 λ_dB (approximately), so the detection disc
//! covers slit B with room to spare and even at d = ρ/4 the central window
//! holds four fringes.

use crate::apparatus::{Apparatus, DetectorConfig, Particle};

const DESK_SCALE: f64 = 1e4;

/// Photon wavelength at desk scale, bohr.
pub const DESK_PHOTON_WAVELENGTH: f64 = 1.89;

pub fn desk_particle() -> Particle {
    Particle::new(1.0, 1.4e5).expect("valid preset")
}

/// Desk-scale apparatus, detector and particle with d = 2ρ.
pub fn desk_scale() -> (Apparatus, DetectorConfig, Particle) {
    let rho = DESK_PHOTON_WAVELENGTH;
    let d = 2.0 * rho;
    let apparatus = Apparatus {
        source_x: 0.0,
        l1: 1e5,
        l2: 1e5,
        slit_a_center: -0.5 * d,
        slit_b_center: 0.5 * d,
        slit_width: rho / 20.0,
        screen_min: -12_000.0,
        screen_max: 12_000.0,
        screen_samples: 2048,
        aperture_samples: 64,
    };
    (apparatus, DetectorConfig::with_photon_wavelength(rho), desk_particle())
}

/// d/ρ ratios of the bundled sweep, largest first.
pub const SWEEP_RATIOS: [f64; 10] = [100.0, 30.0, 10.0, 3.0, 1.5, 1.1, 1.0, 0.75, 0.5, 0.25];

pub fn desk_sweep_d_values() -> Vec<f64> {
    SWEEP_RATIOS.iter().map(|r| r * DESK_PHOTON_WAVELENGTH).collect()
}

/// Paper-scale parameters: every desk length multiplied by 1e4.
pub fn paper_scale() -> (Apparatus, DetectorConfig, Particle) {
    let (a, det, p) = desk_scale();
    let s = DESK_SCALE;
    let apparatus = Apparatus {
        source_x: a.source_x * s,
        l1: a.l1 * s,
        l2: a.l2 * s,
        slit_a_center: a.slit_a_center * s,
        slit_b_center: a.slit_b_center * s,
        slit_width: a.slit_width * s,
        screen_min: a.screen_min * s,
        screen_max: a.screen_max * s,
        ..a
    };
    let particle = Particle::new(p.mass, p.kinetic_energy / (s * s)).expect("valid preset");
    (
        apparatus,
        DetectorConfig::with_photon_wavelength(det.photon_wavelength * s),
        particle,
    )
}
