use thiserror::Error;

/// Errors raised by the core pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero or non-finite direction vector")]
    DegenerateDirection,
    #[error("invalid array configuration: {0}")]
    InvalidArray(&'static str),
    #[error("invalid path: {0}")]
    InvalidPath(&'static str),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid scene: {0}")]
    InvalidScene(&'static str),
    #[error("location ({x}, {y}, {z}) lies inside a reflector")]
    InsideReflector { x: f64, y: f64, z: f64 },
    #[error("could not draw a free location after {attempts} attempts")]
    RegionOccupied { attempts: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid map parameter: {0}")]
    InvalidMapParameter(&'static str),
    #[error("codebook shape mismatch: map built for {expected_tx}x{expected_rx} beams, got {actual_tx}x{actual_rx}")]
    ShapeMismatch {
        expected_tx: usize,
        expected_rx: usize,
        actual_tx: usize,
        actual_rx: usize,
    },
    #[error("reported location coincides with the base station")]
    CoincidentPositions,
    #[error("invalid link budget: {0}")]
    InvalidLinkBudget(&'static str),
    #[error("cannot average an empty sequence")]
    EmptySequence,
    #[error("invalid location-error model: {0}")]
    InvalidErrorModel(&'static str),
}
