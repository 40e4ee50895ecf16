//! Horizontal location error with Rayleigh-distributed magnitude.

use core::f64::consts::PI;

use rand_core::RngCore;

use crate::geometry::{Point3, Vec3};
use crate::rng::{streams, substream, unit_f64};
use crate::{Error, Result};

/// Error radius `r ~ Rayleigh(σ)` with `σ = μ·√(2/π)` (so `E[r] = μ`),
/// uniform bearing, height untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocationErrorModel {
    /// Mean error distance `μ` in meters.
    pub mean_error: f64,
    pub seed: u64,
}

impl LocationErrorModel {
    pub fn new(mean_error: f64, seed: u64) -> Result<Self> {
        if !(mean_error.is_finite() && mean_error >= 0.0) {
            return Err(Error::InvalidErrorModel("mean error must be finite and non-negative"));
        }
        Ok(Self { mean_error, seed })
    }

    /// Rayleigh scale `σ`.
    pub fn scale(&self) -> f64 {
        self.mean_error * (2.0 / PI).sqrt()
    }

    /// Error radius drawn by inverse CDF.
    pub fn draw_radius<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = unit_f64(rng);
        self.scale() * (-2.0 * (-u).ln_1p()).sqrt()
    }

    pub fn perturb_with<R: RngCore + ?Sized>(&self, rng: &mut R, q: Point3) -> Point3 {
        if self.mean_error == 0.0 {
            return q;
        }
        let r = self.draw_radius(rng);
        let (s, c) = (2.0 * PI * unit_f64(rng)).sin_cos();
        q + Vec3::new(r * c, r * s, 0.0)
    }

    /// Reported location for evaluation slot `index`; independent per index.
    pub fn perturb(&self, index: u64, q: Point3) -> Point3 {
        let mut rng = substream(self.seed, streams::LOCATION_ERROR + index);
        self.perturb_with(&mut rng, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_is_identity() {
        let m = LocationErrorModel::new(0.0, 3).unwrap();
        let q = Point3::new(1.25, -7.5, 1.5);
        for i in 0..10 {
            assert_eq!(m.perturb(i, q), q);
        }
        assert!(LocationErrorModel::new(-1.0, 0).is_err());
    }

    #[test]
    fn reproducible_and_horizontal() {
        let m = LocationErrorModel::new(1.0, 9).unwrap();
        let q = Point3::new(10.0, 20.0, 1.5);
        for i in 0..100 {
            let a = m.perturb(i, q);
            assert_eq!(a, m.perturb(i, q));
            assert_eq!(a.z, q.z);
        }
        assert_ne!(m.perturb(0, q), m.perturb(1, q));
    }

    #[test]
    fn mean_radius_matches_rayleigh_identity() {
        let m = LocationErrorModel::new(1.0, 12).unwrap();
        let mut rng = substream(12, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += m.draw_radius(&mut rng);
        }
        let mean = sum / n as f64;
        // E[r] = σ√(π/2)
        assert!((m.scale() * (PI / 2.0).sqrt() - 1.0).abs() < 1e-15);
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn isotropic_displacement() {
        let m = LocationErrorModel::new(2.0, 5).unwrap();
        let q = Point3::ZERO;
        let n = 200_000u64;
        let (mut sx, mut sy, mut sr) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = m.perturb(i, q);
            sx += p.x;
            sy += p.y;
            sr += p.norm();
        }
        let nf = n as f64;
        // std of each component is σ, so 3σ/√n bands
        let band = 3.0 * m.scale() / nf.sqrt();
        assert!((sx / nf).abs() < band && (sy / nf).abs() < band);
        let r_sd = m.scale() * ((4.0 - PI) / 2.0).sqrt();
        assert!((sr / nf - 2.0).abs() < 3.0 * r_sd / nf.sqrt());
    }
}
