//! Synthetic site geometry and a first-order image-method ray tracer.
//!
//! A scene is a base station, a set of axis-aligned reflector boxes and a
//! horizontal sampling region for UEs. For each UE location the tracer finds
//! the line-of-sight path (if unblocked) and one specular single-bounce path
//! per box face that both ends can see. Amplitudes follow free-space Friis
//! (`λ/(4πd)`), reflections are scaled by a constant complex coefficient.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{Path, PathSet};
use crate::geometry::{wrap_phase, Orientation, Point3, Vec3};
use crate::rng::{streams, substream, unit_f64};
use crate::{Error, Result};

/// Draw attempts per location before giving up on a crowded region.
pub const MAX_DRAW_ATTEMPTS: usize = 10_000;

/// Axis-aligned reflector box.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Result<Self> {
        let b = Self { min, max };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidScene("box corners must be finite"));
        }
        if !(self.min.x < self.max.x && self.min.y < self.max.y && self.min.z < self.max.z) {
            return Err(Error::InvalidScene("box must have positive extent on every axis"));
        }
        Ok(())
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|a| p.axis(a) >= self.min.axis(a) && p.axis(a) <= self.max.axis(a))
    }

    /// Whether the open segment `(a, b)` meets the closed box (slab method).
    pub fn intersects_segment(&self, a: Point3, b: Point3) -> bool {
        let d = b - a;
        let mut t_enter = 0.0f64;
        let mut t_exit = 1.0f64;
        for axis in 0..3 {
            let origin = a.axis(axis);
            let dir = d.axis(axis);
            let (lo, hi) = (self.min.axis(axis), self.max.axis(axis));
            if dir == 0.0 {
                if origin < lo || origin > hi {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / dir;
            let (mut t0, mut t1) = ((lo - origin) * inv, (hi - origin) * inv);
            if t0 > t1 {
                core::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter > t_exit {
                return false;
            }
        }
        t_enter < 1.0 && t_exit > 0.0
    }
}

/// UE drop region: a horizontal rectangle at fixed height.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplingRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub height: f64,
}

impl SamplingRegion {
    pub fn contains(&self, p: Point3) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

/// Site geometry and propagation constants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scene {
    pub bs: Point3,
    pub bs_orientation: Orientation,
    pub ue_orientation: Orientation,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Reflection coefficient applied at every face.
    pub reflection: Complex64,
    pub reflectors: Vec<Aabb>,
    pub region: SamplingRegion,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if !self.bs.is_finite() {
            return Err(Error::InvalidScene("base station position must be finite"));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::InvalidScene("wavelength must be positive"));
        }
        let g = self.reflection.norm();
        if !(g.is_finite() && g <= 1.0) {
            return Err(Error::InvalidScene("reflection coefficient magnitude exceeds 1"));
        }
        let r = &self.region;
        if !(r.x_min < r.x_max && r.y_min < r.y_max && r.height.is_finite()) {
            return Err(Error::InvalidScene("sampling region must be non-empty"));
        }
        for b in &self.reflectors {
            b.validate()?;
            if b.contains(self.bs) {
                return Err(Error::InvalidScene("base station lies inside a reflector"));
            }
        }
        Ok(())
    }

    /// Desk-scale site: a 200 m × 200 m drop region closed by three tall
    /// facades (north, south, east) with three mid-rise blocks inside. BS at
    /// 25 m on the open west edge facing east, 28 GHz carrier,
    /// `Γ = 0.5·e^{jπ}`.
    pub fn desk() -> Self {
        let block = |x0: f64, x1: f64, y0: f64, y1: f64, h: f64| Aabb {
            min: Vec3::new(x0, y0, 0.0),
            max: Vec3::new(x1, y1, h),
        };
        Scene {
            bs: Vec3::new(0.0, 0.0, 25.0),
            bs_orientation: Orientation::facing_pos_x(),
            ue_orientation: Orientation::facing_neg_x(),
            wavelength: 299_792_458.0 / 28e9,
            reflection: Complex64::from_polar(0.5, PI),
            reflectors: alloc::vec![
                block(0.0, 230.0, 104.0, 116.0, 45.0),
                block(0.0, 230.0, -116.0, -104.0, 45.0),
                block(214.0, 226.0, -104.0, 104.0, 45.0),
                block(40.0, 60.0, -70.0, -25.0, 18.0),
                block(50.0, 70.0, 15.0, 60.0, 20.0),
                block(100.0, 125.0, -20.0, 12.0, 18.0),
            ],
            region: SamplingRegion {
                x_min: 10.0,
                x_max: 210.0,
                y_min: -100.0,
                y_max: 100.0,
                height: 1.5,
            },
        }
    }

    pub fn inside_reflector(&self, p: Point3) -> bool {
        self.reflectors.iter().any(|b| b.contains(p))
    }
}

/// Whether the open segment `(a, b)` meets any reflector.
pub fn los_blocked(scene: &Scene, a: Point3, b: Point3) -> bool {
    scene.reflectors.iter().any(|r| r.intersects_segment(a, b))
}

fn blocked_except(scene: &Scene, a: Point3, b: Point3, skip: usize) -> bool {
    scene
        .reflectors
        .iter()
        .enumerate()
        .any(|(i, r)| i != skip && r.intersects_segment(a, b))
}

/// Geometry of one traced ray, before it is turned into a [`Path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayGeometry {
    /// Total unfolded length in meters.
    pub length: f64,
    /// Reflection point, `None` for line of sight.
    pub bounce: Option<Point3>,
    /// World-frame departure direction at the BS (toward the first hop).
    pub departure: Vec3,
    /// World-frame direction from the UE back toward the last hop.
    pub arrival: Vec3,
}

/// All first-order rays between the BS and `ue`, LoS first, then faces in
/// reflector order (`-x, +x, -y, +y, -z, +z` per box).
pub fn trace_rays(scene: &Scene, ue: Point3) -> Result<Vec<RayGeometry>> {
    if !ue.is_finite() {
        return Err(Error::InvalidScene("UE position must be finite"));
    }
    if scene.inside_reflector(ue) {
        return Err(Error::InsideReflector {
            x: ue.x,
            y: ue.y,
            z: ue.z,
        });
    }
    let bs = scene.bs;
    let mut rays = Vec::new();
    if bs != ue && !los_blocked(scene, bs, ue) {
        rays.push(RayGeometry {
            length: bs.distance(ue),
            bounce: None,
            departure: ue - bs,
            arrival: bs - ue,
        });
    }
    for (bi, b) in scene.reflectors.iter().enumerate() {
        for axis in 0..3 {
            for (plane, outward) in [(b.min.axis(axis), -1.0), (b.max.axis(axis), 1.0)] {
                let sb = (bs.axis(axis) - plane) * outward;
                let su = (ue.axis(axis) - plane) * outward;
                if !(sb > 0.0 && su > 0.0) {
                    continue;
                }
                let image = bs.with_axis(axis, 2.0 * plane - bs.axis(axis));
                let t = (plane - image.axis(axis)) / (ue.axis(axis) - image.axis(axis));
                let hit = (image + (ue - image) * t).with_axis(axis, plane);
                let on_face = (0..3)
                    .filter(|&a| a != axis)
                    .all(|a| hit.axis(a) >= b.min.axis(a) && hit.axis(a) <= b.max.axis(a));
                if !on_face {
                    continue;
                }
                if blocked_except(scene, bs, hit, bi) || blocked_except(scene, hit, ue, bi) {
                    continue;
                }
                rays.push(RayGeometry {
                    length: image.distance(ue),
                    bounce: Some(hit),
                    departure: hit - bs,
                    arrival: hit - ue,
                });
            }
        }
    }
    Ok(rays)
}

/// Ground-truth path record at `ue`: the `max_paths` strongest rays.
pub fn trace_paths(scene: &Scene, ue: Point3, max_paths: usize) -> Result<PathSet> {
    let lambda = scene.wavelength;
    let mut paths = Vec::new();
    for ray in trace_rays(scene, ue)? {
        let free_space = lambda / (4.0 * PI * ray.length);
        let propagation = -2.0 * PI * ray.length / lambda;
        let (gain, phase) = match ray.bounce {
            None => (free_space, propagation),
            Some(_) => (
                scene.reflection.norm() * free_space,
                propagation + scene.reflection.arg(),
            ),
        };
        paths.push(Path {
            gain,
            phase: wrap_phase(phase),
            aod: scene.bs_orientation.local_angles(ray.departure)?,
            aoa: scene.ue_orientation.local_angles(ray.arrival)?,
        });
    }
    PathSet::new(paths, max_paths)
}

/// A location-tagged ground-truth record.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruthSample {
    pub location: Point3,
    pub pathset: PathSet,
}

/// Uniform free location for substream `stream` of `seed`.
pub fn draw_location(scene: &Scene, seed: u64, stream: u64) -> Result<Point3> {
    let mut rng = substream(seed, stream);
    let r = &scene.region;
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let x = r.x_min + unit_f64(&mut rng) * (r.x_max - r.x_min);
        let y = r.y_min + unit_f64(&mut rng) * (r.y_max - r.y_min);
        let p = Vec3::new(x, y, r.height);
        if !scene.inside_reflector(p) && p != scene.bs {
            return Ok(p);
        }
    }
    Err(Error::RegionOccupied {
        attempts: MAX_DRAW_ATTEMPTS,
    })
}

/// Dataset sample `index`; independent of every other index.
pub fn dataset_sample(
    scene: &Scene,
    seed: u64,
    index: usize,
    max_paths: usize,
) -> Result<GroundTruthSample> {
    let location = draw_location(scene, seed, streams::DATASET + index as u64)?;
    Ok(GroundTruthSample {
        location,
        pathset: trace_paths(scene, location, max_paths)?,
    })
}

/// `count` uniformly drawn, traced samples. Deterministic in `seed`.
pub fn generate_dataset(
    scene: &Scene,
    count: usize,
    max_paths: usize,
    seed: u64,
) -> Result<Vec<GroundTruthSample>> {
    if count == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    scene.validate()?;
    (0..count)
        .map(|i| dataset_sample(scene, seed, i, max_paths))
        .collect()
}
