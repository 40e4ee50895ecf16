//! Training-free mmWave beam alignment from channel knowledge maps.
//!
//! The crate is `no_std` (with `alloc`) and holds the algorithmic pipeline:
//!
//! - [`geometry`]: angle conventions, direction vectors, UPA steering vectors.
//! - [`channel`]: multipath records and narrowband channel synthesis.
//! - [`codebook`]: Kronecker DFT codebooks and exhaustive beam-pair search.
//! - [`scene`]: a small deterministic image-method ray tracer that produces
//!   ground-truth path records for any UE location.
//! - [`ckm`]: channel path maps (KNN + inverse distance weighting) and beam
//!   index maps (KNN vote).
//! - [`alignment`]: perfect-CSI, training-based, location-based and map-based
//!   beam alignment schemes.
//! - [`metrics`]: effective rate with training prelog and averaging.
//! - [`locerror`]: Rayleigh horizontal location-error model.
//!
//! File formats, persistence and the experiment CLI live in `ckm-sim`.

#![no_std]
#![warn(missing_debug_implementations, unused_qualifications)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alignment;
pub mod channel;
pub mod ckm;
pub mod codebook;
mod error;
pub mod geometry;
pub mod kdtree;
pub mod linalg;
pub mod locerror;
pub mod metrics;
pub mod rng;
pub mod scene;

pub use error::Error;

pub use num_complex::Complex64;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
