//! Channel knowledge maps built from finite location-tagged samples.
//!
//! [`CpmDatabase`] maps a location to a path record by inverse distance
//! weighting over the K nearest samples; [`BimDatabase`] maps a location to a
//! beam pair by a K-nearest-neighbor vote. Both are immutable after build and
//! independent of the order samples are supplied in.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::channel::{synthesize_channel, Path, PathSet};
use crate::codebook::{best_beam_pair, BeamPair, Codebook};
use crate::geometry::{angles_from_direction, direction_from_angles, AnglePair, ArrayLayout, Point3, Vec3};
use crate::kdtree::{KdTree, Neighbor};
use crate::scene::GroundTruthSample;
use crate::{Error, Result};

/// Queries closer than this (meters) to a sample return it verbatim.
pub const EXACT_HIT_RADIUS: f64 = 1e-6;

/// Below this resultant length, phasor and direction means fall back to the
/// nearest contributing neighbor.
pub const COHERENCE_FLOOR: f64 = 0.1;

fn location_order(a: &Point3, b: &Point3) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

/// Interpolation settings of a channel path map.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CpmParams {
    /// Neighbors per query.
    pub k: usize,
    /// IDW exponent `p` in `w = 1/dᵖ`.
    pub power: f64,
    /// Paths kept per record.
    pub max_paths: usize,
}

impl Default for CpmParams {
    fn default() -> Self {
        Self {
            k: 3,
            power: 2.0,
            max_paths: 3,
        }
    }
}

/// Channel path map: location → path record.
#[derive(Debug, Clone)]
pub struct CpmDatabase {
    samples: Vec<GroundTruthSample>,
    tree: KdTree,
    params: CpmParams,
}

impl CpmDatabase {
    pub fn build(mut samples: Vec<GroundTruthSample>, params: CpmParams) -> Result<Self> {
        if params.k == 0 {
            return Err(Error::InvalidMapParameter("K must be at least 1"));
        }
        if !(params.power.is_finite() && params.power > 0.0) {
            return Err(Error::InvalidMapParameter("IDW power must be positive"));
        }
        if samples.len() < params.k {
            return Err(Error::TooFewSamples {
                needed: params.k,
                got: samples.len(),
            });
        }
        for s in &samples {
            if !s.location.is_finite() {
                return Err(Error::InvalidMapParameter("sample location must be finite"));
            }
            if s.pathset.len() > params.max_paths {
                return Err(Error::InvalidMapParameter("sample holds more paths than the map keeps"));
            }
        }
        samples.sort_by(|a, b| location_order(&a.location, &b.location));
        let locations: Vec<Point3> = samples.iter().map(|s| s.location).collect();
        Ok(Self {
            tree: KdTree::build(&locations),
            samples,
            params,
        })
    }

    pub fn params(&self) -> CpmParams {
        self.params
    }

    /// Samples in canonical (location-sorted) order.
    pub fn samples(&self) -> &[GroundTruthSample] {
        &self.samples
    }

    pub fn neighbors(&self, q: Point3) -> Vec<Neighbor> {
        self.tree.nearest(q, self.params.k)
    }

    /// Interpolated path record at `q`.
    ///
    /// Paths are associated across neighbors by strength rank. Per rank, with
    /// normalized weights over the neighbors that have that rank: gains are
    /// averaged linearly, phases as unit phasors, angles as unit direction
    /// vectors.
    pub fn query(&self, q: Point3) -> PathSet {
        let neighbors = self.neighbors(q);
        let nearest = neighbors[0];
        if nearest.distance < EXACT_HIT_RADIUS {
            return self.samples[nearest.index].pathset.clone();
        }
        let weights: Vec<f64> = neighbors
            .iter()
            .map(|n| 1.0 / n.distance.powf(self.params.power))
            .collect();
        let mut out = Vec::with_capacity(self.params.max_paths);
        for rank in 0..self.params.max_paths {
            let contributors: Vec<(f64, &Path)> = neighbors
                .iter()
                .zip(&weights)
                .filter_map(|(n, &w)| self.samples[n.index].pathset.paths().get(rank).map(|p| (w, p)))
                .collect();
            let Some(&(_, first)) = contributors.first() else {
                break;
            };
            let total: f64 = contributors.iter().map(|(w, _)| w).sum();
            let mut gain = 0.0;
            let mut phasor = Complex64::new(0.0, 0.0);
            let mut aod = Vec3::ZERO;
            let mut aoa = Vec3::ZERO;
            for &(w, p) in &contributors {
                let w = w / total;
                gain += w * p.gain;
                phasor += Complex64::from_polar(w, p.phase);
                aod = aod + direction_from_angles(p.aod) * w;
                aoa = aoa + direction_from_angles(p.aoa) * w;
            }
            let phase = if phasor.norm() < COHERENCE_FLOOR {
                first.phase
            } else {
                phasor.arg()
            };
            out.push(Path {
                gain,
                phase,
                aod: mean_direction(aod, first.aod),
                aoa: mean_direction(aoa, first.aoa),
            });
        }
        // every field is a convex combination of valid inputs
        PathSet::new(out, self.params.max_paths).expect("interpolated paths are valid")
    }
}

fn mean_direction(sum: Vec3, fallback: AnglePair) -> AnglePair {
    if sum.norm() < COHERENCE_FLOOR {
        return fallback;
    }
    angles_from_direction(sum).unwrap_or(fallback)
}

/// A location with its optimal beam pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabeledSample {
    pub location: Point3,
    pub label: BeamPair,
}

/// Optimal beam pair for one ground-truth sample.
pub fn label_sample(
    sample: &GroundTruthSample,
    layout: &ArrayLayout,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<LabeledSample> {
    let h = synthesize_channel(&sample.pathset, &layout.tx, &layout.rx);
    let (label, _) = best_beam_pair(&h, tx_book, rx_book)?;
    Ok(LabeledSample {
        location: sample.location,
        label,
    })
}

/// Beam index map: location → beam pair.
#[derive(Debug, Clone)]
pub struct BimDatabase {
    samples: Vec<LabeledSample>,
    tree: KdTree,
    k: usize,
    layout: ArrayLayout,
}

impl BimDatabase {
    /// Labels every sample by exhaustive search on its synthesized channel.
    pub fn build(
        dataset: &[GroundTruthSample],
        layout: ArrayLayout,
        tx_book: &Codebook,
        rx_book: &Codebook,
        k: usize,
    ) -> Result<Self> {
        layout.check_books(tx_book, rx_book)?;
        if dataset.len() < k {
            return Err(Error::TooFewSamples {
                needed: k,
                got: dataset.len(),
            });
        }
        let labeled = dataset
            .iter()
            .map(|s| label_sample(s, &layout, tx_book, rx_book))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labeled(labeled, layout, k)
    }

    /// Wraps precomputed labels (e.g. labeled in parallel or loaded from disk).
    pub fn from_labeled(mut samples: Vec<LabeledSample>, layout: ArrayLayout, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidMapParameter("K must be at least 1"));
        }
        if samples.len() < k {
            return Err(Error::TooFewSamples {
                needed: k,
                got: samples.len(),
            });
        }
        layout.tx.validate()?;
        layout.rx.validate()?;
        let (tx_y, tx_z) = layout.tx_shape();
        let (rx_y, rx_z) = layout.rx_shape();
        for s in &samples {
            let BeamPair { tx, rx } = s.label;
            let ok = tx.m < tx_y
                && tx.n < tx_z
                && tx.flat == tx.m * tx_z + tx.n
                && rx.m < rx_y
                && rx.n < rx_z
                && rx.flat == rx.m * rx_z + rx.n;
            if !ok {
                return Err(Error::InvalidMapParameter("label outside codebook bounds"));
            }
            if !s.location.is_finite() {
                return Err(Error::InvalidMapParameter("sample location must be finite"));
            }
        }
        samples.sort_by(|a, b| location_order(&a.location, &b.location));
        let locations: Vec<Point3> = samples.iter().map(|s| s.location).collect();
        Ok(Self {
            tree: KdTree::build(&locations),
            samples,
            k,
            layout,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layout(&self) -> &ArrayLayout {
        &self.layout
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn neighbors(&self, q: Point3) -> Vec<Neighbor> {
        self.tree.nearest(q, self.k)
    }

    /// Majority label among the K nearest samples; ties go to the nearest
    /// sample holding a tied label. A query on a sample returns its label.
    pub fn query(&self, q: Point3) -> BeamPair {
        let neighbors = self.neighbors(q);
        if neighbors[0].distance < EXACT_HIT_RADIUS {
            return self.samples[neighbors[0].index].label;
        }
        let labels: Vec<BeamPair> = neighbors.iter().map(|n| self.samples[n.index].label).collect();
        majority_label(&labels)
    }
}

/// Most frequent label; among equally frequent ones the earliest in `labels`.
pub fn majority_label(labels: &[BeamPair]) -> BeamPair {
    let count = |l: &BeamPair| labels.iter().filter(|x| *x == l).count();
    let top = labels.iter().map(count).max().unwrap_or(0);
    labels
        .iter()
        .copied()
        .find(|l| count(l) == top)
        .unwrap_or_default()
}
