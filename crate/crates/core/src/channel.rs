//! Multipath records and narrowband MIMO channel synthesis.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::geometry::{steering_vector, AnglePair, UpaConfig};
use crate::linalg::singular_values;
use crate::{Error, Result};

/// One propagation path. Gain is stored as magnitude and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Path {
    /// Linear amplitude `|α|`.
    pub gain: f64,
    /// Phase of `α` in radians.
    pub phase: f64,
    /// Departure angles in the BS array frame.
    pub aod: AnglePair,
    /// Arrival angles in the UE array frame.
    pub aoa: AnglePair,
}

impl Path {
    pub fn complex_gain(&self) -> Complex64 {
        Complex64::from_polar(self.gain, self.phase)
    }

    fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain >= 0.0) {
            return Err(Error::InvalidPath("gain magnitude must be finite and non-negative"));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidPath("phase must be finite"));
        }
        if !(self.aod.is_canonical() && self.aoa.is_canonical()) {
            return Err(Error::InvalidPath("angles out of canonical range"));
        }
        Ok(())
    }
}

/// Up to `max_paths` paths, strongest first.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathSet {
    paths: Vec<Path>,
    max_paths: usize,
}

impl PathSet {
    /// Validates, drops zero-gain paths, sorts by descending gain (stable) and
    /// keeps the strongest `max_paths`.
    pub fn new(mut paths: Vec<Path>, max_paths: usize) -> Result<Self> {
        for p in &paths {
            p.validate()?;
        }
        paths.retain(|p| p.gain > 0.0);
        paths.sort_by(|a, b| b.gain.total_cmp(&a.gain));
        paths.truncate(max_paths);
        Ok(Self { paths, max_paths })
    }

    pub fn empty(max_paths: usize) -> Self {
        Self {
            paths: Vec::new(),
            max_paths,
        }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn max_paths(&self) -> usize {
        self.max_paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Same paths with every gain multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let paths = self
            .paths
            .iter()
            .map(|p| Path {
                gain: p.gain * factor,
                ..*p
            })
            .collect();
        Self::new(paths, self.max_paths)
    }
}

/// Dense row-major `rows × cols` complex matrix (`Mr × Mt`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `H f`, one entry per receive element.
    pub fn mul_vec(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        if f.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: f.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(f).map(|(h, x)| h * x).sum())
            .collect())
    }
}

/// `H = √(Mr·Mt) Σ_l α_l a_r(AoA_l) a_t(AoD_l)ᴴ`.
pub fn synthesize_channel(z: &PathSet, tx: &UpaConfig, rx: &UpaConfig) -> ChannelMatrix {
    let mr = rx.len();
    let mt = tx.len();
    let mut h = ChannelMatrix::zeros(mr, mt);
    let scale = ((mr * mt) as f64).sqrt();
    for path in z.paths() {
        let ar = steering_vector(rx, path.aoa);
        let at = steering_vector(tx, path.aod);
        let g = path.complex_gain() * scale;
        for (i, r) in ar.iter().enumerate() {
            let gr = g * r;
            let row = &mut h.data[i * mt..(i + 1) * mt];
            for (entry, t) in row.iter_mut().zip(&at) {
                *entry += gr * t.conj();
            }
        }
    }
    h
}

/// `|wᴴ H f|²`.
pub fn beamformed_gain(h: &ChannelMatrix, w: &[Complex64], f: &[Complex64]) -> Result<f64> {
    if w.len() != h.rows {
        return Err(Error::DimensionMismatch {
            expected: h.rows,
            actual: w.len(),
        });
    }
    let hf = h.mul_vec(f)?;
    Ok(inner(w, &hf).norm_sqr())
}

/// `aᴴ b`.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// True when `H` has numerical rank at most `max_rank`: the `(max_rank+1)`-th
/// singular value is at most `1e-9` of the largest.
pub fn rank_upper_bound_check(h: &ChannelMatrix, max_rank: usize) -> bool {
    let sv = singular_values(&h.data, h.rows, h.cols);
    match (sv.first(), sv.get(max_rank)) {
        (_, None) => true,
        (Some(&largest), Some(&next)) => next <= 1e-9 * largest,
        (None, Some(_)) => true,
    }
}
