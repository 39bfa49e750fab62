//! Free-particle space-time kernel and plane-to-plane propagation.
//!
//! Convention: the kernel below solves `i ∂ψ/∂t = -(1/2m) ∂²ψ/∂x²` (ħ = 1),
//!
//! ```text
//! K(x_b, x_a; T) = sqrt(m / (2π i T)) · exp(i m (x_b - x_a)² / (2T))
//! ```
//!
//! and propagation between planes a longitudinal distance `L` apart uses the
//! flight time `T = L / v`. Propagation is direct midpoint quadrature over the
//! input samples: each output sample is an independent, fixed-order,
//! compensated sum, so output is identical for any worker count.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::apparatus::Particle;
use crate::exec;
use crate::summation::ComplexNeumaier;
use crate::{Error, Result};

/// A uniform 1-D sample grid from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    /// `n` cell centres of the interval `[lo, hi]`; with midpoint weights the
    /// samples tile the interval exactly.
    pub fn cell_centered(lo: f64, hi: f64, n: usize) -> Self {
        let h = (hi - lo) / n as f64;
        Self {
            min: lo + 0.5 * h,
            max: hi - 0.5 * h,
            n,
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.n - 1) as f64
        }
    }

    /// Sample position; symmetric about the grid centre to the last bit.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        let c = 0.5 * (self.min + self.max);
        c + (j as f64 - 0.5 * (self.n - 1) as f64) * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid(format!(
                "grid bounds must satisfy min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Complex amplitude sampled on a transverse grid in one plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneField {
    pub z_label: String,
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl PlaneField {
    pub fn new(z_label: impl Into<String>, grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        grid.check()?;
        if values.len() != grid.n {
            return Err(Error::invalid(format!(
                "field has {} values for a {}-point grid",
                values.len(),
                grid.n
            )));
        }
        let field = Self {
            z_label: z_label.into(),
            grid,
            values,
        };
        field.check_finite()?;
        Ok(field)
    }

    pub fn zeros(z_label: impl Into<String>, grid: Grid) -> Self {
        Self {
            z_label: z_label.into(),
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn grid_min(&self) -> f64 {
        self.grid.min
    }

    pub fn grid_max(&self) -> f64 {
        self.grid.max
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numerical(format!(
                "non-finite amplitude in field '{}'",
                self.z_label
            )))
        }
    }

    /// Σ |ψ|² Δx.
    pub fn norm_sqr(&self) -> f64 {
        let dx = self.grid.spacing();
        let mut acc = crate::summation::Neumaier::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.value() * dx
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }
}

/// Free kernel for a fixed mass and time, evaluated for displacements.
#[derive(Debug, Clone, Copy)]
pub struct FreeKernel {
    mass: f64,
    time: f64,
    prefactor: Complex64,
}

impl FreeKernel {
    pub fn new(mass: f64, time: f64) -> Result<Self> {
        if !(time > 0.0 && time.is_finite()) {
            return Err(Error::invalid(format!("kernel time must be positive, got {time}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("kernel mass must be positive, got {mass}")));
        }
        // sqrt(1/i) = exp(-iπ/4)
        let modulus = (mass / (2.0 * PI * time)).sqrt();
        let prefactor = Complex64::from_polar(modulus, -0.25 * PI);
        Ok(Self { mass, time, prefactor })
    }

    pub fn modulus(&self) -> f64 {
        self.prefactor.norm()
    }

    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    /// Classical action m·dx²/(2T) of the straight path.
    #[inline]
    pub fn phase(&self, dx: f64) -> f64 {
        0.5 * self.mass * dx * dx / self.time
    }

    #[inline]
    pub fn eval(&self, dx: f64) -> Complex64 {
        let (s, c) = self.phase(dx).sin_cos();
        self.prefactor * Complex64::new(c, s)
    }
}

/// K(x_b, x_a; T) for a free particle of the given mass.
pub fn free_kernel(x_b: f64, x_a: f64, mass: f64, time: f64) -> Result<Complex64> {
    Ok(FreeKernel::new(mass, time)?.eval(x_b - x_a))
}

/// Amplitude on `target` from a point source a distance `l` upstream.
pub fn point_source_field(source_x: f64, target: &Grid, l: f64, particle: &Particle) -> Result<PlaneField> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid(format!(
            "propagation distance must be positive, got {l}"
        )));
    }
    target.check()?;
    let k = FreeKernel::new(particle.mass, particle.flight_time(l))?;
    let values = (0..target.n).map(|i| k.eval(target.x(i) - source_x)).collect();
    PlaneField::new(format!("point source +{l}"), *target, values)
}

/// Propagates a field a longitudinal distance `l` onto `target`.
pub fn propagate(field_in: &PlaneField, l: f64, particle: &Particle, target: &Grid) -> Result<PlaneField> {
    propagate_segments(&[field_in], l, particle, target)
}

/// Propagates the union of several same-plane fields (e.g. one per slit, each
/// on its own grid) onto `target` as a single quadrature. Segments are summed
/// in the order given.
pub fn propagate_segments(segments: &[&PlaneField], l: f64, particle: &Particle, target: &Grid) -> Result<PlaneField> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid(format!(
            "propagation distance must be positive, got {l}"
        )));
    }
    if segments.is_empty() || segments.iter().any(|s| s.values.is_empty()) {
        return Err(Error::invalid("cannot propagate an empty field"));
    }
    target.check()?;
    let kernel = FreeKernel::new(particle.mass, particle.flight_time(l))?;

    // Only non-zero samples contribute; dropping exact zeros does not change
    // any sum.
    let sources: Vec<(f64, Complex64)> = segments
        .iter()
        .flat_map(|seg| {
            let dx = seg.grid.spacing();
            seg.values
                .iter()
                .enumerate()
                .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
                .map(move |(i, v)| (seg.grid.x(i), v * dx))
        })
        .collect();

    let values = exec::map_indexed(target.n, |j| {
        let xj = target.x(j);
        let mut acc = ComplexNeumaier::new();
        for &(xi, wi) in &sources {
            acc.add(kernel.eval(xj - xi) * wi);
        }
        acc.value()
    });

    let label = segments[0].z_label.clone() + &format!(" +{l}");
    PlaneField::new(label, *target, values)
}

/// Zeroes the field outside the union of closed intervals.
pub fn apply_aperture(field: &PlaneField, open_intervals: &[(f64, f64)]) -> Result<PlaneField> {
    for &(lo, hi) in open_intervals {
        if !(lo < hi) {
            return Err(Error::invalid(format!("aperture interval [{lo}, {hi}] is empty")));
        }
    }
    let mut sorted = open_intervals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::invalid(format!(
                "aperture intervals [{}, {}] and [{}, {}] overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    let values = field
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = field.grid.x(i);
            if sorted.iter().any(|&(lo, hi)| x >= lo && x <= hi) {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(PlaneField {
        values,
        ..field.clone()
    })
}
