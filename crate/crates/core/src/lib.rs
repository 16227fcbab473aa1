//! A generalized gambler's-ruin model of two-movement conflict with a
//! game-theoretic coalition layer.
//!
//! The conflict is an absorbing birth-death Markov chain over states
//! 0..=m+n; [`markov`] builds, evolves, exactly solves, and simulates it.
//! [`battle`] provides the per-battle win probability models and the
//! closed-form overall win probabilities, evaluated stably in log-space.
//! [`game`] implements the coalition payoff structure, the defection
//! inequality, and the unanimity Nash check. [`analysis`] verifies the
//! unity-optimality claim numerically, searches for critical strength
//! thresholds, and generates sweep tables.

pub mod analysis;
pub mod battle;
pub mod error;
pub mod game;
pub mod markov;

pub use battle::{
    battle_p_general, battle_p_simple, logit, q_constant_p, q_general, q_simple, sigmoid,
    sub_chain_win, BattleModel, GammaConvention, QMethod, WinProbabilityResult,
};
pub use error::{AnalysisError, ChainError, GameError, ModelError};
pub use markov::{
    absorption_q_solve, build_chain, evolve, simulate, simulate_partitioned, ConflictChain,
    ConflictShape, McEstimate, ProbabilitySource, StateDistribution, RNG_NAME, WALK_STEP_CAP,
};

/// Library version recorded in CLI output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
