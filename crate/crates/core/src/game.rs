//! Coalition payoffs, the defection inequality, the unanimity/veto Nash
//! check, and the member-archetype taxonomy.

use serde::{Deserialize, Serialize};

use crate::battle::{q_general, q_simple, BattleModel, GammaConvention};
use crate::error::{GameError, ModelError};

/// One movement member: discount rate, per-period benefit, up-front unity
/// cost, and perceived strength. Decisions use only the member's own
/// (possibly mistaken) values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberProfile {
    r: f64,
    b: f64,
    c: f64,
    s_hat: f64,
}

impl MemberProfile {
    pub fn new(r: f64, b: f64, c: f64, s_hat: f64) -> Result<Self, GameError> {
        require_positive("r", r)?;
        if !b.is_finite() {
            return Err(ModelError::NotFinite { name: "b", value: b }.into());
        }
        require_positive("c", c)?;
        require_positive("s_hat", s_hat)?;
        Ok(Self { r, b, c, s_hat })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn s_hat(&self) -> f64 {
        self.s_hat
    }
}

/// The status-quo (m0 parts) versus greater-unity (m1 < m0 parts) choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnityDecision {
    m0: u32,
    m1: u32,
}

impl UnityDecision {
    pub fn new(m0: u32, m1: u32) -> Result<Self, GameError> {
        if m1 == 0 || m1 >= m0 {
            return Err(GameError::InvalidUnityDecision { m0, m1 });
        }
        Ok(Self { m0, m1 })
    }

    pub fn m0(&self) -> u32 {
        self.m0
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }
}

/// Expected payoffs under the two approaches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffPair {
    pub status_quo: f64,
    pub greater_unity: f64,
}

/// Member archetypes. Not mutually exclusive, except that defeatist and
/// complacent cannot both hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArchetypeFlags {
    pub myopic: bool,
    pub naive: bool,
    pub collaborationist: bool,
    pub defeatist: bool,
    pub complacent: bool,
}

/// Explicit cutoffs for the archetype taxonomy. The model defines the
/// archetypes only by limits, so cutoffs must always be supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationThresholds {
    pub r_myopic: f64,
    pub bc_naive: f64,
    pub s_defeatist: f64,
    pub s_complacent: f64,
}

impl ClassificationThresholds {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.s_complacent >= self.s_defeatist {
            return Err(GameError::InconsistentThresholds {
                s_complacent: self.s_complacent,
                s_defeatist: self.s_defeatist,
            });
        }
        Ok(())
    }
}

/// A unanimity vote: the members deciding, the decision context, the
/// opposing movement's part count, and the actual strength (reporting only;
/// each member decides on their own perceived values).
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionVote {
    pub members: Vec<MemberProfile>,
    pub decision: UnityDecision,
    pub n: u32,
    pub actual_s: f64,
}

/// One member's line in the Nash-check breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemberVerdict {
    pub incentive: f64,
    pub defects: bool,
}

/// Outcome of the unanimity Nash check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport {
    pub is_nash: bool,
    pub breakdown: Vec<MemberVerdict>,
}

/// Total benefit of a per-period benefit b discounted at rate r:
/// sum over periods of b e^(-r l) = b/(e^r - 1).
pub fn discounted_total_benefit(b: f64, r: f64) -> Result<f64, GameError> {
    require_positive("r", r)?;
    Ok(b / r.exp_m1())
}

/// Expected payoffs of the two approaches given their win probabilities.
pub fn expected_payoffs(member: &MemberProfile, q0: f64, q1: f64) -> PayoffPair {
    let stream = member.b / member.r.exp_m1();
    PayoffPair {
        status_quo: q0 * stream,
        greater_unity: -member.c + q1 * stream,
    }
}

/// The defection inequality's left-hand side,
/// (1/(e^r - 1)) (b/c) (q(m1, s_hat) - q(m0, s_hat)),
/// with q from the proportional-force model. Defection is incentive < 1.
pub fn incentive(
    member: &MemberProfile,
    decision: &UnityDecision,
    n: u32,
) -> Result<f64, GameError> {
    let q1 = q_simple(member.s_hat, decision.m1 as f64, n as f64)?;
    let q0 = q_simple(member.s_hat, decision.m0 as f64, n as f64)?;
    Ok(incentive_from_qs(member, q0, q1))
}

/// Incentive with q from the general model (randomness and territory shift),
/// the member's perceived strength substituted for s.
pub fn incentive_general(
    member: &MemberProfile,
    decision: &UnityDecision,
    n: u32,
    randomness: f64,
    gamma: f64,
    convention: GammaConvention,
) -> Result<f64, GameError> {
    let model = BattleModel::new(member.s_hat, randomness, gamma)?;
    let q1 = q_general(&model, decision.m1, n, convention)?;
    let q0 = q_general(&model, decision.m0, n, convention)?;
    Ok(incentive_from_qs(member, q0, q1))
}

fn incentive_from_qs(member: &MemberProfile, q0: f64, q1: f64) -> f64 {
    (1.0 / member.r.exp_m1()) * (member.b / member.c) * (q1 - q0)
}

/// Whether the member vetoes greater unity. Exact indifference
/// (incentive = 1) counts as non-defection: the inequality is strict.
pub fn defects(
    member: &MemberProfile,
    decision: &UnityDecision,
    n: u32,
) -> Result<bool, GameError> {
    Ok(incentive(member, decision, n)? < 1.0)
}

/// Is unanimous greater-unity a Nash equilibrium under the veto rule?
///
/// True iff no member defects, each judged on their own perceived
/// parameters. An empty member list is vacuously Nash.
pub fn unanimous_unity_is_nash(vote: &CoalitionVote) -> Result<NashReport, GameError> {
    let mut breakdown = Vec::with_capacity(vote.members.len());
    let mut is_nash = true;
    for member in &vote.members {
        let value = incentive(member, &vote.decision, vote.n)?;
        let defects = value < 1.0;
        is_nash &= !defects;
        breakdown.push(MemberVerdict {
            incentive: value,
            defects,
        });
    }
    Ok(NashReport { is_nash, breakdown })
}

/// Archetype flags from a member's parameters and explicit cutoffs.
pub fn classify(
    member: &MemberProfile,
    thresholds: &ClassificationThresholds,
) -> Result<ArchetypeFlags, GameError> {
    thresholds.validate()?;
    Ok(ArchetypeFlags {
        myopic: member.r >= thresholds.r_myopic,
        naive: member.b > 0.0 && member.b / member.c <= thresholds.bc_naive,
        collaborationist: member.b < 0.0,
        defeatist: member.s_hat >= thresholds.s_defeatist,
        complacent: member.s_hat <= thresholds.s_complacent,
    })
}

fn require_positive(name: &'static str, value: f64) -> Result<(), GameError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(ModelError::NonPositive { name, value }.into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(r: f64, b: f64, c: f64, s_hat: f64) -> MemberProfile {
        MemberProfile::new(r, b, c, s_hat).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(MemberProfile::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(MemberProfile::new(0.1, 1.0, 0.0, 1.0).is_err());
        assert!(MemberProfile::new(0.1, -1.0, 1.0, 1.0).is_ok()); // b may be negative
        assert!(MemberProfile::new(0.1, 1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn decision_validation() {
        assert!(UnityDecision::new(2, 1).is_ok());
        assert!(UnityDecision::new(2, 2).is_err());
        assert!(UnityDecision::new(1, 0).is_err());
        assert!(UnityDecision::new(1, 3).is_err());
    }

    #[test]
    fn discounting_examples() {
        assert_eq!(discounted_total_benefit(0.0, 1.0).unwrap(), 0.0);
        assert!((discounted_total_benefit(1.0, 2.0_f64.ln()).unwrap() - 1.0).abs() < 1e-12);
        let tail = discounted_total_benefit(1.0, 50.0).unwrap();
        assert!((tail - (-50.0_f64).exp()).abs() < 1e-30);
        assert!(discounted_total_benefit(1.0, 0.0).is_err());
    }

    #[test]
    fn payoff_examples() {
        let m = member(2.0_f64.ln(), 1.0, 0.3, 1.0);
        let pair = expected_payoffs(&m, 0.5, 0.5);
        assert!((pair.status_quo - 0.5).abs() < 1e-12);
        assert!((pair.greater_unity - (pair.status_quo - 0.3)).abs() < 1e-12);

        let free = member(1.0, 1.0, 1e-12, 1.0);
        let pair = expected_payoffs(&free, 0.4, 0.6);
        assert!(pair.greater_unity > pair.status_quo);
    }

    #[test]
    fn incentive_fig5_parameters() {
        // m0=2, m1=1, n=50, s_hat=10: q(1)=0.8, q(2)=0.84, so the increment
        // is negative and the incentive is about -38.03 at r=0.1, b/c=100.
        let m = member(0.1, 100.0, 1.0, 10.0);
        let d = UnityDecision::new(2, 1).unwrap();
        let value = incentive(&m, &d, 50).unwrap();
        assert!((value - (1.0 / 0.1_f64.exp_m1()) * 100.0 * (-0.04)).abs() < 1e-9);
        assert!((value + 38.03).abs() < 0.01);
    }

    #[test]
    fn collaborationist_always_defects() {
        // s_hat = 100, n = 10: q(1) > q(2) so delta q > 0, b < 0 flips the sign.
        let m = member(0.5, -1.0, 1.0, 100.0);
        let d = UnityDecision::new(2, 1).unwrap();
        assert!(incentive(&m, &d, 10).unwrap() < 0.0);
        assert!(defects(&m, &d, 10).unwrap());
    }

    #[test]
    fn patient_member_never_defects() {
        // s_hat = 4, n = 10: q(1) - q(2) is about 0.213, and 1/(e^r - 1)
        // blows up as r -> 0.
        let m = member(1e-9, 1.0, 1.0, 4.0);
        let d = UnityDecision::new(2, 1).unwrap();
        assert!(incentive(&m, &d, 10).unwrap() > 1.0);
        assert!(!defects(&m, &d, 10).unwrap());
    }

    #[test]
    fn complacent_member_defects() {
        let m = member(1.0, 10.0, 1.0, 1e-8);
        let d = UnityDecision::new(2, 1).unwrap();
        assert!(defects(&m, &d, 10).unwrap());
    }

    #[test]
    fn perceived_limits_shrink_incentive() {
        let d = UnityDecision::new(2, 1).unwrap();
        for &s_hat in &[1e-8, 1e8] {
            let m = member(0.5, 5.0, 1.0, s_hat);
            let scale = (m.b() / m.c()) / m.r().exp_m1();
            assert!(incentive(&m, &d, 10).unwrap().abs() < 1e-6 * scale.abs());
        }
    }

    #[test]
    fn incentive_general_matches_simple_at_defaults() {
        let m = member(0.3, 3.0, 1.0, 7.0);
        let d = UnityDecision::new(3, 1).unwrap();
        let simple = incentive(&m, &d, 12).unwrap();
        let general =
            incentive_general(&m, &d, 12, 1.0, 0.0, GammaConvention::Eq10).unwrap();
        assert!((simple - general).abs() < 1e-12);
    }

    #[test]
    fn nash_check_and_veto() {
        let d = UnityDecision::new(2, 1).unwrap();
        // s_hat = 4, n = 10 gives delta q of about 0.213; b/c = 1000 puts
        // the incentive far above 1.
        let supporter = member(0.1, 1000.0, 1.0, 4.0);
        let vote = CoalitionVote {
            members: vec![supporter; 3],
            decision: d,
            n: 10,
            actual_s: 4.0,
        };
        let report = unanimous_unity_is_nash(&vote).unwrap();
        assert!(report.is_nash);
        assert!(report.breakdown.iter().all(|v| v.incentive > 1.0));

        let mut with_collaborationist = vote.clone();
        with_collaborationist
            .members
            .push(member(0.1, -1.0, 1.0, 100.0));
        let report = unanimous_unity_is_nash(&with_collaborationist).unwrap();
        assert!(!report.is_nash);
        assert_eq!(report.breakdown.iter().filter(|v| v.defects).count(), 1);
    }

    #[test]
    fn empty_vote_is_vacuously_nash() {
        let vote = CoalitionVote {
            members: vec![],
            decision: UnityDecision::new(2, 1).unwrap(),
            n: 10,
            actual_s: 1.0,
        };
        assert!(unanimous_unity_is_nash(&vote).unwrap().is_nash);
    }

    #[test]
    fn classification() {
        let thresholds = ClassificationThresholds {
            r_myopic: 1.0,
            bc_naive: 0.1,
            s_defeatist: 1e3,
            s_complacent: 1e-3,
        };
        let flags = classify(&member(0.01, 1.0, 1.0, 1.0), &thresholds).unwrap();
        assert_eq!(
            flags,
            ArchetypeFlags {
                myopic: false,
                naive: false,
                collaborationist: false,
                defeatist: false,
                complacent: false
            }
        );
        assert!(classify(&member(0.5, -2.0, 1.0, 1.0), &thresholds)
            .unwrap()
            .collaborationist);
        let defeatist = classify(&member(0.5, 1.0, 1.0, 1e6), &thresholds).unwrap();
        assert!(defeatist.defeatist && !defeatist.complacent);

        let bad = ClassificationThresholds {
            s_complacent: 10.0,
            s_defeatist: 1.0,
            ..thresholds
        };
        assert!(classify(&member(0.5, 1.0, 1.0, 1.0), &bad).is_err());
    }

    #[test]
    fn payoff_incentive_consistency() {
        let d = UnityDecision::new(3, 2).unwrap();
        for &(r, b, c, s_hat) in &[
            (0.2, 4.0, 0.5, 2.0),
            (1.5, -3.0, 2.0, 0.7),
            (0.05, 0.2, 1.0, 30.0),
        ] {
            let m = member(r, b, c, s_hat);
            let q1 = q_simple(s_hat, 2.0, 9.0).unwrap();
            let q0 = q_simple(s_hat, 3.0, 9.0).unwrap();
            let pair = expected_payoffs(&m, q0, q1);
            let inc = incentive(&m, &d, 9).unwrap();
            assert_eq!(pair.greater_unity > pair.status_quo, inc > 1.0);
        }
    }
}
