//! Error types shared across the library.

use thiserror::Error;

/// Parameter-domain and evaluation errors for the probability models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter {name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("parameter {name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },

    #[error("parameter {name} must lie strictly in (0, 1), got {value}")]
    ProbabilityDomain { name: &'static str, value: f64 },

    #[error("sub-chain must have at least one step to either boundary")]
    EmptyRuin,

    #[error("unknown gamma convention '{value}' (expected 'eq10' or 'appendix')")]
    UnknownConvention { value: String },
}

/// Errors from chain construction, evolution, and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("movement part count {name} must be at least 1")]
    EmptyMovement { name: &'static str },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("simulation requires at least one trial")]
    NoTrials,

    #[error("simulation requires at least one partition")]
    NoPartitions,

    #[error("walk exceeded {cap} steps without absorption (seed {seed})")]
    WalkCapExceeded { cap: u64, seed: u64 },
}

/// Errors from the game-theoretic layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("greater-unity part count m1 must satisfy 1 <= m1 < m0 (got m0={m0}, m1={m1})")]
    InvalidUnityDecision { m0: u32, m1: u32 },

    #[error("classification thresholds require s_complacent < s_defeatist (got {s_complacent} >= {s_defeatist})")]
    InconsistentThresholds { s_complacent: f64, s_defeatist: f64 },
}

/// Errors from threshold search and sweep evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("m_max must be at least {min}, got {got}")]
    MMaxTooSmall { min: u32, got: u32 },

    #[error("bracket invalid: predicate must fail at s_lo={s_lo} and pass at s_hi={s_hi}")]
    InvalidBracket { s_lo: f64, s_hi: f64 },

    #[error("predicate is not monotone over the bracket: true at s={s_true} but false at larger s={s_false}")]
    NonMonotoneBracket { s_true: f64, s_false: f64 },

    #[error("sweep parameter '{name}' is missing (supply it as an axis or fixed value)")]
    MissingParameter { name: String },

    #[error("sweep parameter '{name}' must be a positive integer, got {value}")]
    NotAnInteger { name: String, value: f64 },

    #[error("sweep axis '{name}' is empty")]
    EmptyAxis { name: String },

    #[error(transparent)]
    Game(#[from] GameError),
}
