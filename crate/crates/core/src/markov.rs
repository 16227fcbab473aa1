//! The absorbing birth-death chain: construction, distribution evolution,
//! exact absorption probabilities, and Monte Carlo simulation.
//!
//! States run 0..=m+n. State 0 is Movement 1's victory, state m+n is
//! Movement 2's, and the walk starts at state n. At interior state i the
//! chain moves to i-1 with probability p_i and to i+1 otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::battle::{battle_p_general, BattleModel, GammaConvention};
use crate::error::{ChainError, ModelError};

/// Hard cap on steps per Monte Carlo walk. Absorption is almost sure, so the
/// cap only guards against implementation bugs.
pub const WALK_STEP_CAP: u64 = 1_000_000_000;

/// Name of the random generator recorded in output metadata.
pub const RNG_NAME: &str = "chacha12";

/// Part counts (m, n) of the two movements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictShape {
    m: u32,
    n: u32,
}

impl ConflictShape {
    pub fn new(m: u32, n: u32) -> Result<Self, ChainError> {
        if m == 0 {
            return Err(ChainError::EmptyMovement { name: "m" });
        }
        if n == 0 {
            return Err(ChainError::EmptyMovement { name: "n" });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of states, m + n + 1.
    pub fn state_count(&self) -> usize {
        (self.m + self.n + 1) as usize
    }

    /// Index of the initial state, n.
    pub fn initial_state(&self) -> usize {
        self.n as usize
    }
}

/// Where the per-state battle-win probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbabilitySource {
    /// The same probability at every interior state.
    Constant(f64),
    /// Per-state evaluation of the general battle model.
    Model {
        model: BattleModel,
        convention: GammaConvention,
    },
}

/// An absorbing birth-death chain with one battle-win probability per
/// interior state. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictChain {
    shape: ConflictShape,
    p: Vec<f64>,
}

impl ConflictChain {
    pub fn shape(&self) -> ConflictShape {
        self.shape
    }

    /// Battle-win probabilities for interior states 1..=m+n-1, in order.
    pub fn battle_probabilities(&self) -> &[f64] {
        &self.p
    }
}

/// A probability distribution over the chain's states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDistribution {
    probabilities: Vec<f64>,
}

impl StateDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// A Monte Carlo estimate of the absorption probability at state 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub q_hat: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Build the chain for a shape and a probability source.
pub fn build_chain(
    shape: ConflictShape,
    p_source: ProbabilitySource,
) -> Result<ConflictChain, ChainError> {
    let interior = shape.state_count() - 2;
    let mut p = Vec::with_capacity(interior);
    match p_source {
        ProbabilitySource::Constant(value) => {
            if !(value > 0.0 && value < 1.0) {
                return Err(ModelError::ProbabilityDomain {
                    name: "p",
                    value,
                }
                .into());
            }
            p.resize(interior, value);
        }
        ProbabilitySource::Model { model, convention } => {
            for i in 1..=interior as i64 {
                let pi = battle_p_general(
                    &model,
                    shape.m as f64,
                    shape.n as f64,
                    i,
                    convention,
                )?;
                assert!(pi > 0.0 && pi < 1.0);
                p.push(pi);
            }
        }
    }
    Ok(ConflictChain { shape, p })
}

/// Evolve the point mass at the initial state through `steps` battles.
pub fn evolve(chain: &ConflictChain, steps: u64) -> StateDistribution {
    let states = chain.shape.state_count();
    let mut v = vec![0.0; states];
    v[chain.shape.initial_state()] = 1.0;
    let mut next = vec![0.0; states];
    for _ in 0..steps {
        next.fill(0.0);
        next[0] = v[0];
        next[states - 1] = v[states - 1];
        for i in 1..states - 1 {
            let mass = v[i];
            if mass == 0.0 {
                continue;
            }
            let p = chain.p[i - 1];
            next[i - 1] += p * mass;
            next[i + 1] += (1.0 - p) * mass;
        }
        std::mem::swap(&mut v, &mut next);
    }
    StateDistribution { probabilities: v }
}

/// Exact absorption probability at state 0 from the initial state.
///
/// Solves the first-step system h_i = p_i h_{i-1} + (1-p_i) h_{i+1} with
/// h_0 = 1, h_{m+n} = 0 by the Thomas algorithm and returns h_n. This is the
/// ground-truth oracle for every closed form in [`crate::battle`].
pub fn absorption_q_solve(chain: &ConflictChain) -> f64 {
    let k = chain.p.len(); // interior unknowns h_1..h_{m+n-1}
    let p = &chain.p;
    // Row i (0-based): -p h_{i-1} + h_i - (1-p) h_{i+1} = rhs,
    // rhs = p_1 for the first row (h_0 = 1), 0 elsewhere.
    let mut c_prime = vec![0.0; k];
    let mut d_prime = vec![0.0; k];
    c_prime[0] = -(1.0 - p[0]);
    d_prime[0] = p[0];
    for i in 1..k {
        let a = -p[i];
        let denom = 1.0 - a * c_prime[i - 1];
        c_prime[i] = -(1.0 - p[i]) / denom;
        d_prime[i] = (0.0 - a * d_prime[i - 1]) / denom;
    }
    let mut h = vec![0.0; k];
    h[k - 1] = d_prime[k - 1];
    for i in (0..k - 1).rev() {
        h[i] = d_prime[i] - c_prime[i] * h[i + 1];
    }
    h[chain.shape.initial_state() - 1]
}

/// Derive a per-partition seed from the master seed. SplitMix64 finalizer
/// applied to `seed + (index + 1) * golden_gamma`.
fn partition_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn walk_to_absorption(chain: &ConflictChain, rng: &mut ChaCha12Rng, seed: u64) -> Result<bool, ChainError> {
    let terminal = chain.shape.state_count() - 1;
    let mut state = chain.shape.initial_state();
    for _ in 0..WALK_STEP_CAP {
        if rng.gen::<f64>() < chain.p[state - 1] {
            state -= 1;
            if state == 0 {
                return Ok(true);
            }
        } else {
            state += 1;
            if state == terminal {
                return Ok(false);
            }
        }
    }
    Err(ChainError::WalkCapExceeded {
        cap: WALK_STEP_CAP,
        seed,
    })
}

/// Monte Carlo estimate of q over a single partition of trials.
pub fn simulate(chain: &ConflictChain, trials: u64, seed: u64) -> Result<McEstimate, ChainError> {
    simulate_partitioned(chain, trials, seed, 1)
}

/// Monte Carlo estimate with trials split into `partitions` contiguous
/// blocks run in parallel. The result is a pure function of
/// (seed, trials, partitions): partition w runs `trials/partitions` walks
/// (the remainder spread over the first partitions) with its own generator
/// seeded by [`partition_seed`].
pub fn simulate_partitioned(
    chain: &ConflictChain,
    trials: u64,
    seed: u64,
    partitions: u64,
) -> Result<McEstimate, ChainError> {
    if trials == 0 {
        return Err(ChainError::NoTrials);
    }
    if partitions == 0 {
        return Err(ChainError::NoPartitions);
    }
    let base = trials / partitions;
    let rem = trials % partitions;
    let counts: Result<Vec<u64>, ChainError> = (0..partitions)
        .into_par_iter()
        .map(|w| {
            let block = base + u64::from(w < rem);
            let sub_seed = partition_seed(seed, w);
            let mut rng = ChaCha12Rng::seed_from_u64(sub_seed);
            let mut wins = 0u64;
            for _ in 0..block {
                if walk_to_absorption(chain, &mut rng, sub_seed)? {
                    wins += 1;
                }
            }
            Ok(wins)
        })
        .collect();
    let wins: u64 = counts?.iter().sum();
    let q_hat = wins as f64 / trials as f64;
    Ok(McEstimate {
        q_hat,
        std_error: (q_hat * (1.0 - q_hat) / trials as f64).sqrt(),
        trials,
        seed,
    })
}
