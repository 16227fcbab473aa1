//! Per-battle win probability models and closed-form overall win probabilities.
//!
//! Power ratios of the form (1 - rho^m)/(1 - rho^(m+n)) are evaluated in
//! log-space via `expm1` so that extreme strength ratios (rho on the order of
//! e^700) never overflow. Near rho = 1 a limit branch with a first-order
//! correction avoids catastrophic cancellation.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Threshold on |ln rho| below which the tie-limit branch is used.
const NEAR_TIE_LOG: f64 = 1e-10;

/// Which side of the chain receives the +gamma shift.
///
/// Equation-10 mode applies the shift as written: states past the initial
/// state (i > n) get +gamma. Appendix mode flips the sign so that the
/// sub-chain toward state 0 carries the +gamma probability, matching the
/// appendix's pairing of p+ with the distance-(n-1) sub-chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaConvention {
    #[default]
    Eq10,
    Appendix,
}

impl GammaConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            GammaConvention::Eq10 => "eq10",
            GammaConvention::Appendix => "appendix",
        }
    }
}

impl std::str::FromStr for GammaConvention {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eq10" => Ok(GammaConvention::Eq10),
            "appendix" => Ok(GammaConvention::Appendix),
            other => Err(ModelError::UnknownConvention {
                value: other.to_string(),
            }),
        }
    }
}

/// The (s, R, gamma) triple governing per-battle win probabilities.
///
/// `s` is Movement 2's relative strength, `randomness` softens the force
/// ratio's effect on battle outcomes, and `gamma` shifts battle odds by
/// which side's territory the battle is fought in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BattleModel {
    s: f64,
    randomness: f64,
    gamma: f64,
}

impl BattleModel {
    pub fn new(s: f64, randomness: f64, gamma: f64) -> Result<Self, ModelError> {
        require_positive("s", s)?;
        require_positive("R", randomness)?;
        if !gamma.is_finite() {
            return Err(ModelError::NotFinite {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(Self {
            s,
            randomness,
            gamma,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn randomness(&self) -> f64 {
        self.randomness
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Logit of the state-independent base probability 1/(1 + (sm/n)^(1/R)).
    pub(crate) fn base_logit(&self, m: f64, n: f64) -> f64 {
        -(self.s * m / n).ln() / self.randomness
    }
}

/// How an overall win probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QMethod {
    ClosedFormConstantP,
    ClosedFormSimple,
    ClosedFormGeneral,
    LinearSolve,
}

/// An overall win probability together with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinProbabilityResult {
    pub q: f64,
    pub method: QMethod,
}

/// Sigmoid 1/(1 + e^(-x)), evaluated without overflow for any finite x.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`]; defined on the open interval (0, 1).
pub fn logit(p: f64) -> Result<f64, ModelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::ProbabilityDomain { name: "p", value: p });
    }
    Ok(p.ln() - (1.0 - p).ln())
}

/// Battle-win probability proportional to force strength: 1/(1 + sm/n).
pub fn battle_p_simple(s: f64, m: f64, n: f64) -> Result<f64, ModelError> {
    require_positive("s", s)?;
    require_positive("m", m)?;
    require_positive("n", n)?;
    Ok(sigmoid(-(s * m / n).ln()))
}

/// State-dependent battle-win probability with randomness and territory shift.
///
/// Evaluates sigma(logit(base) + sign * gamma) where the base probability is
/// 1/(1 + (sm/n)^(1/R)) and `sign` is sgn(i - n) under the selected
/// convention (negated under [`GammaConvention::Appendix`]).
pub fn battle_p_general(
    model: &BattleModel,
    m: f64,
    n: f64,
    state: i64,
    convention: GammaConvention,
) -> Result<f64, ModelError> {
    require_positive("m", m)?;
    require_positive("n", n)?;
    let d = state as f64 - n;
    let sign = if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    };
    let sign = match convention {
        GammaConvention::Eq10 => sign,
        GammaConvention::Appendix => -sign,
    };
    let p = sigmoid(model.base_logit(m, n) + sign * model.gamma);
    debug_assert!(p > 0.0 && p < 1.0);
    Ok(p)
}

/// Core ratio (1 - rho^a)/(1 - rho^total) with rho = e^log_rho, 0 <= a <= total.
///
/// `a` is the opponent's distance to victory and `total` the full span, so the
/// result is the probability of Player 1 reaching its own boundary first.
fn ruin_ratio(log_rho: f64, a: f64, total: f64) -> f64 {
    debug_assert!(a >= 0.0 && total >= a && total > 0.0);
    if a == 0.0 {
        return 0.0;
    }
    if a == total {
        return 1.0;
    }
    if log_rho.abs() < NEAR_TIE_LOG {
        // Limit a/total with the first-order expm1 correction.
        return (a / total) * (1.0 + 0.5 * (a - total) * log_rho);
    }
    if log_rho < 0.0 {
        (a * log_rho).exp_m1() / (total * log_rho).exp_m1()
    } else {
        // Divide through by rho^total so every exponential stays <= 1.
        ((a - total) * log_rho).exp() * (-a * log_rho).exp_m1() / (-total * log_rho).exp_m1()
    }
}

/// Overall win probability for a constant battle-win probability p.
///
/// Real-valued m and n are accepted; the tie p = 1/2 yields m/(m+n).
pub fn q_constant_p(p: f64, m: f64, n: f64) -> Result<f64, ModelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::ProbabilityDomain { name: "p", value: p });
    }
    require_positive("m", m)?;
    require_positive("n", n)?;
    let log_rho = (1.0 - p).ln() - p.ln();
    Ok(ruin_ratio(log_rho, m, n + m))
}

/// Overall win probability of the proportional-force model, q = f(s, m, n).
///
/// Equivalent to `q_constant_p(battle_p_simple(s, m, n), m, n)` but evaluated
/// directly from ln(sm/n) so the tie s = n/m lands exactly on m/(m+n).
pub fn q_simple(s: f64, m: f64, n: f64) -> Result<f64, ModelError> {
    require_positive("s", s)?;
    require_positive("m", m)?;
    require_positive("n", n)?;
    let log_rho = (s * m / n).ln();
    Ok(ruin_ratio(log_rho, m, n + m))
}

/// Win probability of an auxiliary gambler's ruin with battle-win probability
/// `x`, own victory `j` steps away and the opponent's `k` steps away.
pub fn sub_chain_win(x: f64, j: u32, k: u32) -> Result<f64, ModelError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(ModelError::ProbabilityDomain { name: "x", value: x });
    }
    if j + k == 0 {
        return Err(ModelError::EmptyRuin);
    }
    let log_rho = (1.0 - x).ln() - x.ln();
    Ok(ruin_ratio(log_rho, k as f64, (j + k) as f64))
}

/// Overall win probability under the general model via the two-sub-chain
/// first-step decomposition.
///
/// The chain is cut at the initial state: the base-probability battle there
/// either enters the lower sub-chain (toward state 0, constant probability
/// `p_lo`) or the upper sub-chain (toward state m+n, constant `p_hi`), and
/// each sub-chain either absorbs or returns to the initial state. Which of
/// p+ / p- plays `p_lo` follows the convention flag.
pub fn q_general(
    model: &BattleModel,
    m: u32,
    n: u32,
    convention: GammaConvention,
) -> Result<f64, ModelError> {
    if m == 0 || n == 0 {
        return Err(ModelError::NonPositive {
            name: if m == 0 { "m" } else { "n" },
            value: 0.0,
        });
    }
    let ell = model.base_logit(m as f64, n as f64);
    let p = sigmoid(ell);
    let p_plus = sigmoid(ell + model.gamma);
    let p_minus = sigmoid(ell - model.gamma);
    let (p_lo, p_hi) = match convention {
        GammaConvention::Eq10 => (p_minus, p_plus),
        GammaConvention::Appendix => (p_plus, p_minus),
    };
    let win_from_below = sub_chain_win(p_lo, n - 1, 1)?;
    let return_from_above = sub_chain_win(p_hi, 1, m - 1)?;
    let q = p * win_from_below
        / (1.0 - p * (1.0 - win_from_below) - (1.0 - p) * return_from_above);
    Ok(q.clamp(0.0, 1.0))
}

fn require_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(ModelError::NonPositive { name, value });
    }
    Ok(())
}
