//! Beam alignment schemes.
//!
//! Every scheme picks a beam pair and reports how many training symbols it
//! spent. The achieved gain is always measured on the true channel.

use core::fmt;
use core::str::FromStr;

use crate::channel::{beamformed_gain, synthesize_channel, ChannelMatrix, PathSet};
use crate::ckm::{BimDatabase, CpmDatabase};
use crate::codebook::{best_beam_pair, nearest_codeword, BeamPair, Codebook};
use crate::geometry::{steering_vector, ArrayLayout, Point3};
use crate::{Error, Result};

/// Selected pair, training cost and gain on the true channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOutcome {
    pub pair: BeamPair,
    /// Symbols of the coherent block spent on training.
    pub training_symbols: u64,
    /// `|wᴴ H f|²` with the true `H`.
    pub gain: f64,
}

/// The compared alignment strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scheme {
    PerfectCsi,
    TrainingEstimation,
    BeamSweeping,
    LocationBased,
    Cpm,
    Bim,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::PerfectCsi,
        Scheme::TrainingEstimation,
        Scheme::BeamSweeping,
        Scheme::LocationBased,
        Scheme::Cpm,
        Scheme::Bim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PerfectCsi => "perfect_csi",
            Scheme::TrainingEstimation => "training_estimation",
            Scheme::BeamSweeping => "beam_sweeping",
            Scheme::LocationBased => "location_based",
            Scheme::Cpm => "cpm",
            Scheme::Bim => "bim",
        }
    }

    /// Whether the scheme spends no pilot symbols.
    pub fn is_training_free(self) -> bool {
        !matches!(self, Scheme::TrainingEstimation | Scheme::BeamSweeping)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unrecognized scheme name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScheme;

impl fmt::Display for UnknownScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown scheme; valid schemes: ")?;
        for (i, s) in Scheme::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(s.name())?;
        }
        Ok(())
    }
}

impl core::error::Error for UnknownScheme {}

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or(UnknownScheme)
    }
}

/// Gain of `pair` on the true channel.
pub fn pair_gain(h_true: &ChannelMatrix, tx_book: &Codebook, rx_book: &Codebook, pair: BeamPair) -> Result<f64> {
    beamformed_gain(h_true, rx_book.codeword(pair.rx.flat), tx_book.codeword(pair.tx.flat))
}

fn outcome(
    h_true: &ChannelMatrix,
    tx_book: &Codebook,
    rx_book: &Codebook,
    pair: BeamPair,
    training_symbols: u64,
) -> Result<SchemeOutcome> {
    Ok(SchemeOutcome {
        pair,
        training_symbols,
        gain: pair_gain(h_true, tx_book, rx_book, pair)?,
    })
}

/// Genie-aided optimum: exhaustive search on the true channel, no training.
pub fn scheme_perfect_csi(h_true: &ChannelMatrix, tx_book: &Codebook, rx_book: &Codebook) -> Result<SchemeOutcome> {
    let (pair, gain) = best_beam_pair(h_true, tx_book, rx_book)?;
    Ok(SchemeOutcome {
        pair,
        training_symbols: 0,
        gain,
    })
}

/// Full channel estimation with `Mr·Mt` pilots; the estimate is ideal, so the
/// pair is the optimal one and only the overhead differs.
pub fn scheme_training_estimation(
    h_true: &ChannelMatrix,
    tx_book: &Codebook,
    rx_book: &Codebook,
    block_len: u64,
) -> Result<SchemeOutcome> {
    let (pair, _) = best_beam_pair(h_true, tx_book, rx_book)?;
    let pilots = (h_true.rows() * h_true.cols()) as u64;
    outcome(h_true, tx_book, rx_book, pair, pilots.min(block_len))
}

/// Noiseless exhaustive sweep: one pilot per beam pair, true argmax selected.
pub fn scheme_beam_sweeping(
    h_true: &ChannelMatrix,
    tx_book: &Codebook,
    rx_book: &Codebook,
    block_len: u64,
) -> Result<SchemeOutcome> {
    let (pair, gain) = best_beam_pair(h_true, tx_book, rx_book)?;
    let pilots = (tx_book.len() * rx_book.len()) as u64;
    Ok(SchemeOutcome {
        pair,
        training_symbols: pilots.min(block_len),
        gain,
    })
}

/// Environment-blind baseline: beams toward the line-of-sight direction
/// between the BS and the reported UE location.
pub fn scheme_location_based(
    h_true: &ChannelMatrix,
    bs: Point3,
    arrays: &ArrayLayout,
    reported: Point3,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<SchemeOutcome> {
    let u = (reported - bs)
        .normalized()
        .map_err(|_| Error::CoincidentPositions)?;
    let aod = arrays.tx.orientation.local_angles(u)?;
    let aoa = arrays.rx.orientation.local_angles(-u)?;
    let tx = nearest_codeword(tx_book, &steering_vector(&arrays.tx, aod))?;
    let rx = nearest_codeword(rx_book, &steering_vector(&arrays.rx, aoa))?;
    let pair = BeamPair {
        tx: tx_book.index(tx),
        rx: rx_book.index(rx),
    };
    outcome(h_true, tx_book, rx_book, pair, 0)
}

/// Beam selection on a channel rebuilt from a path record.
pub fn scheme_from_paths(
    h_true: &ChannelMatrix,
    estimate: &PathSet,
    arrays: &ArrayLayout,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<SchemeOutcome> {
    let h_est = synthesize_channel(estimate, &arrays.tx, &arrays.rx);
    let (pair, _) = best_beam_pair(&h_est, tx_book, rx_book)?;
    outcome(h_true, tx_book, rx_book, pair, 0)
}

/// Channel-path-map alignment: query, rebuild the channel, search.
pub fn scheme_cpm(
    h_true: &ChannelMatrix,
    cpm: &CpmDatabase,
    reported: Point3,
    arrays: &ArrayLayout,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<SchemeOutcome> {
    scheme_from_paths(h_true, &cpm.query(reported), arrays, tx_book, rx_book)
}

/// Beam-index-map alignment: the map answers with the pair directly.
pub fn scheme_bim(
    h_true: &ChannelMatrix,
    bim: &BimDatabase,
    reported: Point3,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<SchemeOutcome> {
    bim.layout().check_books(tx_book, rx_book)?;
    outcome(h_true, tx_book, rx_book, bim.query(reported), 0)
}
