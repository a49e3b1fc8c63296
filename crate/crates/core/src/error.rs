use thiserror::Error;

/// Errors produced while building constellations, codebooks and bounds.
#[derive(Debug, Error)]
pub enum Error {
    #[error("constellation needs at least one layer")]
    EmptyLayers,
    #[error("layer amplitudes must be strictly decreasing (layer {index})")]
    NonDecreasingAmplitudes { index: usize },
    #[error("symbols {first} and {second} coincide")]
    DuplicateSymbol { first: usize, second: usize },
    #[error("invalid layer: {0}")]
    InvalidLayer(String),
    #[error("constellation has a single symbol, no neighbor exists")]
    SingleSymbolConstellation,
    #[error("symbol index {index} out of range for {len} symbols")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("radius {radius} too large for amplitude {amplitude}")]
    RadiusTooLarge { amplitude: f64, radius: f64 },
    #[error("inputs must be positive")]
    NonPositiveInput,
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("layer {layer}: n*p/L = {value} is not an integer")]
    NonIntegralType { layer: usize, value: f64 },
    #[error("requested {requested} codewords but only {available} exist")]
    RequestExceedsCount { requested: u128, available: String },
    #[error("sampling found {found} of {requested} distinct codewords after {attempts} attempts")]
    SamplingExhausted {
        requested: usize,
        found: usize,
        attempts: usize,
    },
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("decoding regions overlap: {0}")]
    OverlappingRegions(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sweep grid is empty")]
    GridEmpty,
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
