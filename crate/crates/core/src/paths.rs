//! Feynman path bundles between two space-time events.
//!
//! A sampled path is the straight line between its endpoints plus a discrete
//! Brownian bridge in the transverse coordinate: slice increments are drawn
//! with scale `sqrt(ħ Δt / m)` and the mean increment is removed, so the
//! perturbation vanishes at both ends. Path `i` of a bundle draws from a
//! ChaCha stream keyed by `(seed, i)`, which makes every bundle reproducible
//! independent of how the paths are distributed over workers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::apparatus::Particle;
use crate::exec;
use crate::propagator::FreeKernel;
use crate::summation::{ComplexNeumaier, Neumaier};
use crate::{Error, Result};

/// Bridge width used by [`mc_kernel_estimate`], as a fraction of the
/// free-particle slice scale. At full width the weights `exp(iS)` are so
/// oscillatory that the estimator's relative variance grows like
/// `2^((n_slices-1)/2)`; at 0.5 it stays below 3 for 32 slices.
pub const MC_BRIDGE_SPREAD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub x: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacetimeEvent {
    pub fn new(x: f64, z: f64, t: f64) -> Self {
        Self { x, z, t }
    }

    /// Event at longitudinal position `z` with `t = z / v`.
    pub fn on_axis(x: f64, z: f64, particle: &Particle) -> Self {
        Self {
            x,
            z,
            t: particle.flight_time(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub events: Vec<SpacetimeEvent>,
    pub truncated: bool,
    pub truncation_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub start: SpacetimeEvent,
    pub end: SpacetimeEvent,
    pub paths: Vec<Path>,
    pub seed: u64,
}

fn check_endpoints(start: &SpacetimeEvent, end: &SpacetimeEvent, n_slices: usize) -> Result<()> {
    if !(end.t > start.t) {
        return Err(Error::invalid(format!(
            "end time {} must be after start time {}",
            end.t, start.t
        )));
    }
    if n_slices == 0 {
        return Err(Error::invalid("n_slices must be at least 1"));
    }
    Ok(())
}

fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Transverse bridge offsets `y_0..=y_n` (both ends zero).
fn bridge_offsets(rng: &mut ChaCha8Rng, n_slices: usize, scale: f64) -> Vec<f64> {
    let steps: Vec<f64> = (0..n_slices)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z * scale
        })
        .collect();
    let mean = steps.iter().sum::<f64>() / n_slices as f64;
    let mut y = Vec::with_capacity(n_slices + 1);
    let mut acc = 0.0;
    y.push(0.0);
    for s in &steps[..n_slices - 1] {
        acc += s - mean;
        y.push(acc);
    }
    y.push(0.0);
    y
}

/// Samples the path with index `stream` of the bundle `(start, end, seed)`,
/// with the bridge scale multiplied by `spread`.
pub fn sample_path(
    start: &SpacetimeEvent,
    end: &SpacetimeEvent,
    n_slices: usize,
    particle: &Particle,
    seed: u64,
    stream: u64,
    spread: f64,
) -> Result<Path> {
    check_endpoints(start, end, n_slices)?;
    let dt = (end.t - start.t) / n_slices as f64;
    let scale = spread * (dt / particle.mass).sqrt();
    let mut rng = path_rng(seed, stream);
    let y = bridge_offsets(&mut rng, n_slices, scale);
    let n = n_slices as f64;
    let events = (0..=n_slices)
        .map(|k| {
            if k == 0 {
                *start
            } else if k == n_slices {
                *end
            } else {
                let f = k as f64 / n;
                SpacetimeEvent {
                    x: start.x + (end.x - start.x) * f + y[k],
                    z: start.z + (end.z - start.z) * f,
                    t: start.t + (end.t - start.t) * f,
                }
            }
        })
        .collect();
    Ok(Path {
        events,
        truncated: false,
        truncation_index: None,
    })
}

pub fn sample_bundle(
    start: SpacetimeEvent,
    end: SpacetimeEvent,
    n_paths: usize,
    n_slices: usize,
    particle: &Particle,
    seed: u64,
) -> Result<PathBundle> {
    check_endpoints(&start, &end, n_slices)?;
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    let paths = exec::map_indexed(n_paths, |i| {
        sample_path(&start, &end, n_slices, particle, seed, i as u64, 1.0)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(PathBundle {
        start,
        end,
        paths,
        seed,
    })
}

/// Discrete free action Σ (m/2)(Δx/Δt)² Δt over transverse increments.
pub fn path_action(path: &Path, mass: f64) -> Result<f64> {
    if path.events.len() < 2 {
        return Err(Error::invalid("path action needs at least 2 events"));
    }
    Ok(action_of(&path.events, mass))
}

fn action_of(events: &[SpacetimeEvent], mass: f64) -> f64 {
    let mut acc = Neumaier::new();
    for w in events.windows(2) {
        let dx = w[1].x - w[0].x;
        let dt = w[1].t - w[0].t;
        acc.add(0.5 * mass * dx * dx / dt);
    }
    acc.value()
}

/// Monte Carlo path-sum estimate of the free kernel between two events.
pub fn mc_kernel_estimate(
    start: SpacetimeEvent,
    end: SpacetimeEvent,
    particle: &Particle,
    n_paths: usize,
    n_slices: usize,
    seed: u64,
) -> Result<Complex64> {
    mc_kernel_estimate_with_spread(start, end, particle, n_paths, n_slices, seed, MC_BRIDGE_SPREAD)
}

/// As [`mc_kernel_estimate`] with an explicit bridge width factor `spread`.
///
/// With increments of scale `s·sqrt(Δt/m)` the fluctuation action satisfies
/// `2S_fl/s² ~ χ²(n_slices - 1)`, so `E[exp(iS)] = exp(iS_cl)·(1 - i s²)^(-(n-1)/2)`.
/// Multiplying the sample mean by the kernel prefactor and the inverse of
/// that factor gives an unbiased estimate of K.
pub fn mc_kernel_estimate_with_spread(
    start: SpacetimeEvent,
    end: SpacetimeEvent,
    particle: &Particle,
    n_paths: usize,
    n_slices: usize,
    seed: u64,
    spread: f64,
) -> Result<Complex64> {
    check_endpoints(&start, &end, n_slices)?;
    if n_paths == 0 {
        return Err(Error::invalid("n_paths must be at least 1"));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::invalid(format!("bridge spread must be positive, got {spread}")));
    }
    let kernel = FreeKernel::new(particle.mass, end.t - start.t)?;
    let weights = exec::map_indexed(n_paths, |i| {
        let path = sample_path(&start, &end, n_slices, particle, seed, i as u64, spread).expect("endpoints checked");
        let s = action_of(&path.events, particle.mass);
        let (sin, cos) = s.sin_cos();
        Complex64::new(cos, sin)
    });
    let mut acc = ComplexNeumaier::new();
    for w in &weights {
        acc.add(*w);
    }
    let mean = acc.value() / n_paths as f64;
    let mut estimate = kernel.prefactor() * mean;
    if n_slices > 1 {
        let q = 0.5 * (n_slices - 1) as f64;
        estimate *= Complex64::new(1.0, -spread * spread).powf(q);
    }
    Ok(estimate)
}

/// Cuts every path at its first event inside the disc of `radius` around
/// `(disc_center_x, disc_center_z)`.
pub fn truncate_bundle(bundle: &PathBundle, disc_center_x: f64, disc_center_z: f64, radius: f64) -> Result<PathBundle> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("disc radius must be positive, got {radius}")));
    }
    let r2 = radius * radius;
    let paths = bundle
        .paths
        .iter()
        .map(|p| {
            let hit = p.events.iter().position(|e| {
                let dx = e.x - disc_center_x;
                let dz = e.z - disc_center_z;
                dx * dx + dz * dz <= r2
            });
            match hit {
                Some(i) if p.truncation_index.is_none_or(|j| i < j) => Path {
                    events: p.events[..=i].to_vec(),
                    truncated: true,
                    truncation_index: Some(i),
                },
                _ => p.clone(),
            }
        })
        .collect();
    Ok(PathBundle {
        paths,
        ..bundle.clone()
    })
}

#[inline]
fn orient(p: &SpacetimeEvent, q: &SpacetimeEvent, r: &SpacetimeEvent) -> f64 {
    (q.z - p.z) * (r.x - p.x) - (q.x - p.x) * (r.z - p.z)
}

/// Intersection of closed segments p1p2 and q1q2 in the (z, x) plane; the
/// returned event interpolates along p1p2.
fn segment_intersection(
    p1: &SpacetimeEvent,
    p2: &SpacetimeEvent,
    q1: &SpacetimeEvent,
    q2: &SpacetimeEvent,
) -> Option<SpacetimeEvent> {
    if p1.z.max(p2.z) < q1.z.min(q2.z)
        || q1.z.max(q2.z) < p1.z.min(p2.z)
        || p1.x.max(p2.x) < q1.x.min(q2.x)
        || q1.x.max(q2.x) < p1.x.min(p2.x)
    {
        return None;
    }
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 {
        return None;
    }
    // Parameter along p via the areas spanned by p's endpoints against q.
    let denom = o3 - o4;
    let s = if denom != 0.0 {
        (o3 / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Some(SpacetimeEvent {
        x: p1.x + (p2.x - p1.x) * s,
        z: p1.z + (p2.z - p1.z) * s,
        t: p1.t + (p2.t - p1.t) * s,
    })
}

/// Counts intersecting segment pairs between paths of `a` and paths of `b`
/// in the (z, x) plane, and returns the intersection points.
pub fn crossing_count(a: &PathBundle, b: &PathBundle) -> (usize, Vec<SpacetimeEvent>) {
    let per_path = exec::map_slice(&a.paths, |pa| {
        let mut events = Vec::new();
        for sa in pa.events.windows(2) {
            for pb in &b.paths {
                for sb in pb.events.windows(2) {
                    if let Some(e) = segment_intersection(&sa[0], &sa[1], &sb[0], &sb[1]) {
                        events.push(e);
                    }
                }
            }
        }
        events
    });
    let events: Vec<SpacetimeEvent> = per_path.into_iter().flatten().collect();
    (events.len(), events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::free_kernel;
    use approx::assert_relative_eq;

    fn particle() -> Particle {
        Particle::new(1.0, 0.5).unwrap()
    }

    fn ev(x: f64, t: f64) -> SpacetimeEvent {
        SpacetimeEvent::new(x, t, t)
    }

    #[test]
    fn single_slice_is_straight() {
        let b = sample_bundle(ev(0.0, 0.0), ev(3.0, 2.0), 10, 1, &particle(), 1).unwrap();
        for p in &b.paths {
            assert_eq!(p.events, vec![ev(0.0, 0.0), ev(3.0, 2.0)]);
        }
    }

    #[test]
    fn endpoints_exact_and_time_increasing() {
        let b = sample_bundle(ev(-1.0, 0.5), ev(2.0, 4.5), 50, 17, &particle(), 9).unwrap();
        for p in &b.paths {
            assert_eq!(p.events.first(), Some(&b.start));
            assert_eq!(p.events.last(), Some(&b.end));
            assert!(p.events.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn rejects_bad_times() {
        assert!(sample_bundle(ev(0.0, 1.0), ev(0.0, 1.0), 1, 4, &particle(), 0).is_err());
        assert!(mc_kernel_estimate(ev(0.0, 1.0), ev(0.0, 0.5), &particle(), 1, 4, 0).is_err());
        assert!(sample_bundle(ev(0.0, 0.0), ev(0.0, 1.0), 1, 0, &particle(), 0).is_err());
    }

    #[test]
    fn mean_displacement_vanishes() {
        // Each interior offset has variance σ²·k(n-k)/n with σ² = Δt/m, so
        // the sample mean should lie within 3σ_k/sqrt(n_paths).
        let n_paths = 4000;
        let n_slices = 8;
        let p = particle();
        let (s, e) = (ev(0.0, 0.0), ev(1.0, 8.0));
        let b = sample_bundle(s, e, n_paths, n_slices, &p, 42).unwrap();
        let dt = 1.0;
        for k in 1..n_slices {
            let line = s.x + (e.x - s.x) * k as f64 / n_slices as f64;
            let mean: f64 = b.paths.iter().map(|p| p.events[k].x - line).sum::<f64>() / n_paths as f64;
            let var = dt * (k * (n_slices - k)) as f64 / n_slices as f64;
            assert!(mean.abs() < 3.0 * (var / n_paths as f64).sqrt(), "slice {k}: {mean}");
        }
    }

    #[test]
    fn action_values() {
        let m = 1.0;
        let straight = Path {
            events: vec![ev(0.0, 0.0), ev(2.0, 4.0)],
            truncated: false,
            truncation_index: None,
        };
        assert_relative_eq!(path_action(&straight, m).unwrap(), 0.5);
        let two = Path {
            events: vec![ev(0.0, 0.0), ev(0.5, 0.5), ev(1.0, 1.0)],
            truncated: false,
            truncation_index: None,
        };
        assert_relative_eq!(path_action(&two, m).unwrap(), 0.5);
        let mut bent = two.clone();
        bent.events[1].x = 0.6;
        assert!(path_action(&bent, m).unwrap() > 0.5);
        let short = Path {
            events: vec![ev(0.0, 0.0)],
            truncated: false,
            truncation_index: None,
        };
        assert!(path_action(&short, m).is_err());
    }

    #[test]
    fn single_slice_estimate_is_exact() {
        let p = particle();
        let (s, e) = (ev(0.3, 0.0), ev(1.7, 2.5));
        let est = mc_kernel_estimate(s, e, &p, 1, 1, 5).unwrap();
        let k = free_kernel(e.x, s.x, p.mass, e.t - s.t).unwrap();
        assert_eq!(est, k);
    }

    #[test]
    fn estimate_is_deterministic() {
        let p = particle();
        let a = mc_kernel_estimate(ev(0.0, 0.0), ev(1.0, 1.0), &p, 500, 8, 77).unwrap();
        let b = mc_kernel_estimate(ev(0.0, 0.0), ev(1.0, 1.0), &p, 500, 8, 77).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn truncation_cases() {
        let p = particle();
        let b = sample_bundle(ev(0.0, 0.0), ev(0.0, 10.0), 20, 10, &p, 3).unwrap();
        let far = truncate_bundle(&b, 100.0, 5.0, 1.0).unwrap();
        assert_eq!(far, b);
        let at_end = truncate_bundle(&b, b.end.x, b.end.z, 0.5).unwrap();
        for (orig, cut) in b.paths.iter().zip(&at_end.paths) {
            assert!(cut.truncated);
            let i = cut.truncation_index.unwrap();
            assert!(i < orig.events.len());
            assert_eq!(&cut.events[..], &orig.events[..=i]);
        }
        let again = truncate_bundle(&b, b.end.x, b.end.z, 0.5).unwrap();
        assert_eq!(again, at_end);
        assert!(truncate_bundle(&b, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn crossings() {
        let p = particle();
        let left = sample_bundle(ev(-10.0, 0.0), ev(-10.0, 4.0), 5, 8, &p, 1).unwrap();
        let right = sample_bundle(ev(10.0, 0.0), ev(10.0, 4.0), 5, 8, &p, 2).unwrap();
        assert_eq!(crossing_count(&left, &right).0, 0);

        let a = sample_bundle(ev(-3.0, 0.0), ev(3.0, 4.0), 5, 8, &p, 1).unwrap();
        let b = sample_bundle(ev(3.0, 0.0), ev(-3.0, 4.0), 5, 8, &p, 2).unwrap();
        let (n_ab, events) = crossing_count(&a, &b);
        assert!(n_ab >= 1);
        assert_eq!(events.len(), n_ab);
        assert_eq!(crossing_count(&b, &a).0, n_ab);
    }
}
