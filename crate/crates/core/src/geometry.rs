//! Angle conventions, direction vectors and UPA steering vectors.
//!
//! Directions use the physics convention `u = (sinθ cosφ, sinθ sinφ, cosθ)`
//! with zenith `θ ∈ [0, π]` and azimuth `φ ∈ [-π, π)`. An array's local frame
//! has its boresight along local `+x`; elements lie in the local y–z plane.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::codebook::Codebook;
use crate::{Error, Result};

/// A 3-vector in meters (positions) or a dimensionless direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Locations are plain vectors in the world frame.
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector along `self`, or an error for zero / non-finite input.
    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::DegenerateDirection);
        }
        Ok(self * (1.0 / n))
    }

    /// Component along axis 0 (x), 1 (y) or 2 (z).
    pub fn axis(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub(crate) fn with_axis(mut self, axis: usize, value: f64) -> Vec3 {
        match axis {
            0 => self.x = value,
            1 => self.y = value,
            _ => self.z = value,
        }
        self
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Zenith/azimuth pair in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnglePair {
    pub zenith: f64,
    pub azimuth: f64,
}

impl AnglePair {
    /// Builds an angle pair, canonicalizing out-of-range input.
    ///
    /// In-range values are kept bit-for-bit; anything else goes through the
    /// direction vector and back. At the poles the azimuth collapses to 0.
    pub fn new(zenith: f64, azimuth: f64) -> Result<Self> {
        if !(zenith.is_finite() && azimuth.is_finite()) {
            return Err(Error::DegenerateDirection);
        }
        let raw = Self { zenith, azimuth };
        if raw.is_canonical() {
            if zenith == 0.0 || zenith == PI {
                return Ok(Self { zenith, azimuth: 0.0 });
            }
            return Ok(raw);
        }
        angles_from_direction(direction_from_angles(raw))
    }

    pub fn is_canonical(&self) -> bool {
        (0.0..=PI).contains(&self.zenith) && (-PI..PI).contains(&self.azimuth)
    }
}

/// Unit direction for an angle pair.
pub fn direction_from_angles(a: AnglePair) -> Vec3 {
    let (st, ct) = a.zenith.sin_cos();
    let (sp, cp) = a.azimuth.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Angle pair of a direction. Non-unit vectors are normalized first.
pub fn angles_from_direction(u: Vec3) -> Result<AnglePair> {
    let u = u.normalized()?;
    let rho = u.x.hypot(u.y);
    let zenith = rho.atan2(u.z);
    let azimuth = if rho == 0.0 {
        0.0
    } else {
        let phi = u.y.atan2(u.x);
        if phi >= PI {
            -PI
        } else {
            phi
        }
    };
    Ok(AnglePair { zenith, azimuth })
}

/// Rotation from an array's local frame to the world frame.
///
/// Columns are the world-frame images of the local x (boresight), y and z
/// axes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Orientation {
    pub matrix: [[f64; 3]; 3],
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation {
        matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Boresight along world `+x`.
    pub fn facing_pos_x() -> Self {
        Self::IDENTITY
    }

    /// Boresight along world `-x` (rotation by π about world z).
    pub fn facing_neg_x() -> Self {
        Orientation {
            matrix: [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rotation about world z by `yaw` radians; `yaw = 0` is `facing_pos_x`.
    pub fn from_yaw(yaw: f64) -> Self {
        let (s, c) = yaw.sin_cos();
        Orientation {
            matrix: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn to_world(&self, v: Vec3) -> Vec3 {
        let m = &self.matrix;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn to_local(&self, v: Vec3) -> Vec3 {
        let m = &self.matrix;
        Vec3::new(
            m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
        )
    }

    /// Angles of a world-frame direction seen from this array.
    pub fn local_angles(&self, world_dir: Vec3) -> Result<AnglePair> {
        angles_from_direction(self.to_local(world_dir))
    }
}

impl Default for Orientation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Uniform planar array: `rows` elements along local z, `cols` along local y.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UpaConfig {
    /// Elements along z (`M^z`).
    pub rows: usize,
    /// Elements along y (`M^y`).
    pub cols: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
    pub orientation: Orientation,
}

impl UpaConfig {
    /// Half-wavelength array with the given orientation.
    pub fn new(rows: usize, cols: usize, orientation: Orientation) -> Result<Self> {
        Self::with_spacing(rows, cols, 0.5, orientation)
    }

    pub fn with_spacing(
        rows: usize,
        cols: usize,
        spacing: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        let cfg = Self {
            rows,
            cols,
            spacing,
            orientation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidArray("element counts must be positive"));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::InvalidArray("spacing must be positive"));
        }
        Ok(())
    }

    /// Total element count `M = M^z · M^y`.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Transmit (BS) and receive (UE) arrays of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArrayLayout {
    pub tx: UpaConfig,
    pub rx: UpaConfig,
}

impl ArrayLayout {
    /// `(M^y, M^z)` of the transmit array and codebook.
    pub fn tx_shape(&self) -> (usize, usize) {
        (self.tx.cols, self.tx.rows)
    }

    pub fn rx_shape(&self) -> (usize, usize) {
        (self.rx.cols, self.rx.rows)
    }

    /// Rejects codebooks whose grid does not match the arrays.
    pub fn check_books(&self, tx_book: &Codebook, rx_book: &Codebook) -> Result<()> {
        if tx_book.shape() != self.tx_shape() || rx_book.shape() != self.rx_shape() {
            return Err(Error::ShapeMismatch {
                expected_tx: self.tx.len(),
                expected_rx: self.rx.len(),
                actual_tx: tx_book.len(),
                actual_rx: rx_book.len(),
            });
        }
        Ok(())
    }
}

/// Array response for a direction given in the array's local frame.
///
/// Entry `m·M^z + n` is `exp(jπ·2·spacing·(m sinθ sinφ + n cosθ)) / √M`.
pub fn steering_vector(cfg: &UpaConfig, a: AnglePair) -> Vec<Complex64> {
    let m_total = cfg.len();
    let scale = 1.0 / (m_total as f64).sqrt();
    let k = 2.0 * PI * cfg.spacing;
    let uy = a.zenith.sin() * a.azimuth.sin();
    let uz = a.zenith.cos();
    let mut out = Vec::with_capacity(m_total);
    for m in 0..cfg.cols {
        for n in 0..cfg.rows {
            let phase = k * (m as f64 * uy + n as f64 * uz);
            out.push(Complex64::from_polar(scale, phase));
        }
    }
    out
}

/// Wraps an angle to `[-π, π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = (x + PI) % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    let out = r - PI;
    if out >= PI {
        -PI
    } else {
        out
    }
}
