//! Kronecker-product DFT codebooks and exhaustive beam-pair search.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{inner, ChannelMatrix};
use crate::{Error, Result};

/// Codewords `c_{m,n} = c^y_m ⊗ c^z_n`, stored at flat index `m·M^z + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    cols: usize,
    rows: usize,
    codewords: Vec<Vec<Complex64>>,
}

impl Codebook {
    /// Builds the `cols × rows` (`M^y × M^z`) DFT codebook.
    ///
    /// Entry `k·M^z + l` of codeword `(m, n)` is
    /// `exp(j2π(mk/M^y + nl/M^z)) / √(M^y M^z)`.
    pub fn new(cols: usize, rows: usize) -> Result<Self> {
        if cols == 0 || rows == 0 {
            return Err(Error::InvalidArray("codebook dimensions must be positive"));
        }
        let len = cols * rows;
        let scale = 1.0 / (len as f64).sqrt();
        let mut codewords = Vec::with_capacity(len);
        for m in 0..cols {
            for n in 0..rows {
                let mut c = Vec::with_capacity(len);
                for k in 0..cols {
                    // reduce the integer products first to keep phases small
                    let py = ((m * k) % cols) as f64 / cols as f64;
                    for l in 0..rows {
                        let pz = ((n * l) % rows) as f64 / rows as f64;
                        c.push(Complex64::from_polar(scale, 2.0 * PI * (py + pz)));
                    }
                }
                codewords.push(c);
            }
        }
        Ok(Self {
            cols,
            rows,
            codewords,
        })
    }

    /// `(M^y, M^z)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    /// Number of codewords.
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Length of each codeword (antenna count).
    pub fn dim(&self) -> usize {
        self.cols * self.rows
    }

    pub fn codeword(&self, flat: usize) -> &[Complex64] {
        &self.codewords[flat]
    }

    pub fn codewords(&self) -> &[Vec<Complex64>] {
        &self.codewords
    }

    pub fn index(&self, flat: usize) -> BeamIndex {
        BeamIndex {
            m: flat / self.rows,
            n: flat % self.rows,
            flat,
        }
    }

    pub fn index_of(&self, m: usize, n: usize) -> BeamIndex {
        BeamIndex {
            m,
            n,
            flat: m * self.rows + n,
        }
    }
}

/// Grid coordinates `(m, n)` of a codeword plus its flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BeamIndex {
    pub m: usize,
    pub n: usize,
    pub flat: usize,
}

/// Transmit (BS) and receive (UE) beam choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BeamPair {
    pub tx: BeamIndex,
    pub rx: BeamIndex,
}

/// Exhaustive search for `argmax |wᴴ H f|²` over `f ∈ tx_book`, `w ∈ rx_book`.
///
/// Ties go to the lowest transmit flat index, then the lowest receive one.
pub fn best_beam_pair(
    h: &ChannelMatrix,
    tx_book: &Codebook,
    rx_book: &Codebook,
) -> Result<(BeamPair, f64)> {
    if h.cols() != tx_book.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.cols(),
            actual: tx_book.dim(),
        });
    }
    if h.rows() != rx_book.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            actual: rx_book.dim(),
        });
    }
    let mut best = (0usize, 0usize);
    let mut best_gain = f64::NEG_INFINITY;
    for (fi, f) in tx_book.codewords().iter().enumerate() {
        let hf = h.mul_vec(f)?;
        for (wi, w) in rx_book.codewords().iter().enumerate() {
            let g = inner(w, &hf).norm_sqr();
            if g > best_gain {
                best_gain = g;
                best = (fi, wi);
            }
        }
    }
    let pair = BeamPair {
        tx: tx_book.index(best.0),
        rx: rx_book.index(best.1),
    };
    Ok((pair, best_gain))
}

/// Codeword maximizing `|aᴴ c|`; ties go to the lowest flat index.
pub fn nearest_codeword(book: &Codebook, a: &[Complex64]) -> Result<usize> {
    if a.len() != book.dim() {
        return Err(Error::DimensionMismatch {
            expected: book.dim(),
            actual: a.len(),
        });
    }
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, c) in book.codewords().iter().enumerate() {
        let v = inner(a, c).norm_sqr();
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    Ok(best)
}
