use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("chain is not irreducible: {closed_classes} closed communicating classes")]
    NotIrreducible { closed_classes: usize },

    #[error("operation not supported for {kind} sources")]
    ModelUnsupported { kind: &'static str },

    #[error("block has zero probability (factor {position} vanishes)")]
    ZeroProbability { position: usize },

    #[error("insufficient past: need {needed} symbols, have {available}")]
    InsufficientPast { needed: usize, available: usize },

    #[error("insufficient future: need {needed} symbols, have {available}")]
    InsufficientFuture { needed: usize, available: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("duality undecidable on this realization: {0}")]
    Undecidable(String),

    #[error("threshold {threshold:.3e} exceeds the guard {guard:.3e}")]
    ThresholdTooLarge { threshold: f64, guard: f64 },

    #[error("epsilon {epsilon} exceeds the entropy rate {entropy} bits")]
    EpsilonExceedsEntropy { epsilon: f64, entropy: f64 },

    #[error("{blocks} blocks are too many to enumerate (limit {limit})")]
    TooLargeToEnumerate { blocks: f64, limit: f64 },

    #[error("rate function is degenerate: -ln p(X) is a.s. equal to {constant_level}")]
    DegenerateRate { constant_level: f64 },

    #[error("need at least {needed} points with enough hits, got {usable}")]
    InsufficientPoints { needed: usize, usable: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
