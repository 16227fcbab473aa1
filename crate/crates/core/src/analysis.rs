//! Numerical checks of the unity-optimality claim, critical-strength
//! threshold search, optimal coalition structure, and figure-style sweeps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::battle::{q_general, q_simple, BattleModel, GammaConvention};
use crate::error::AnalysisError;
use crate::game::{incentive, MemberProfile, UnityDecision};

/// Win probability q(m) under either the proportional-force model or the
/// general model, depending on whether randomness/territory effects are on.
pub fn win_probability(
    s: f64,
    m: u32,
    n: u32,
    randomness: f64,
    gamma: f64,
    convention: GammaConvention,
) -> Result<f64, AnalysisError> {
    if randomness == 1.0 && gamma == 0.0 {
        Ok(q_simple(s, m as f64, n as f64)?)
    } else {
        let model = BattleModel::new(s, randomness, gamma)?;
        Ok(q_general(&model, m, n, convention)?)
    }
}

/// Result of checking strict decrease of q over m = 1..=m_max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub s: f64,
    pub n: u32,
    pub randomness: f64,
    pub gamma: f64,
    pub m_max: u32,
    pub monotone_decreasing: bool,
    /// First m with q(m) <= q(m+1), together with both values.
    pub first_violation: Option<(u32, f64, f64)>,
    /// q at m_max, for eyeballing the decay toward zero.
    pub q_tail: f64,
}

/// Check whether q(m) strictly decreases over m = 1..=m_max.
pub fn verify_unity_optimal(
    s: f64,
    n: u32,
    randomness: f64,
    gamma: f64,
    m_max: u32,
    convention: GammaConvention,
) -> Result<MonotonicityReport, AnalysisError> {
    if m_max < 2 {
        return Err(AnalysisError::MMaxTooSmall { min: 2, got: m_max });
    }
    let mut first_violation = None;
    let mut prev = win_probability(s, 1, n, randomness, gamma, convention)?;
    let mut q_tail = prev;
    for m in 2..=m_max {
        let q = win_probability(s, m, n, randomness, gamma, convention)?;
        if first_violation.is_none() && q >= prev {
            first_violation = Some((m - 1, prev, q));
        }
        prev = q;
        q_tail = q;
    }
    Ok(MonotonicityReport {
        s,
        n,
        randomness,
        gamma,
        m_max,
        monotone_decreasing: first_violation.is_none(),
        first_violation,
        q_tail,
    })
}

/// Smallest strength (within `tolerance`) at which q(m) becomes strictly
/// decreasing over 1..=m_max, found by bisection on s.
///
/// The predicate must fail at `s_lo` and pass at `s_hi`; its monotonicity
/// over the bracket is spot-checked on a coarse sample first and a violation
/// is an error rather than a silently bisected answer.
pub fn find_critical_strength(
    n: u32,
    randomness: f64,
    gamma: f64,
    m_max: u32,
    s_lo: f64,
    s_hi: f64,
    tolerance: f64,
    convention: GammaConvention,
) -> Result<f64, AnalysisError> {
    let passes = |s: f64| -> Result<bool, AnalysisError> {
        Ok(verify_unity_optimal(s, n, randomness, gamma, m_max, convention)?
            .monotone_decreasing)
    };
    if passes(s_lo)? || !passes(s_hi)? {
        return Err(AnalysisError::InvalidBracket { s_lo, s_hi });
    }
    // Sample the bracket: once the predicate turns true it must stay true.
    let samples = 16;
    let mut seen_true_at = None;
    for k in 0..=samples {
        let s = s_lo + (s_hi - s_lo) * k as f64 / samples as f64;
        if passes(s)? {
            if seen_true_at.is_none() {
                seen_true_at = Some(s);
            }
        } else if let Some(s_true) = seen_true_at {
            return Err(AnalysisError::NonMonotoneBracket {
                s_true,
                s_false: s,
            });
        }
    }
    let (mut lo, mut hi) = (s_lo, s_hi);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The m in 1..=m_max maximizing q, ties broken toward smaller m.
pub fn optimal_m(
    s: f64,
    n: u32,
    randomness: f64,
    gamma: f64,
    m_max: u32,
    convention: GammaConvention,
) -> Result<u32, AnalysisError> {
    if m_max < 1 {
        return Err(AnalysisError::MMaxTooSmall { min: 1, got: m_max });
    }
    let mut best_m = 1;
    let mut best_q = win_probability(s, 1, n, randomness, gamma, convention)?;
    for m in 2..=m_max {
        let q = win_probability(s, m, n, randomness, gamma, convention)?;
        if q > best_q {
            best_q = q;
            best_m = m;
        }
    }
    Ok(best_m)
}

/// What a sweep computes at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    QSimple,
    QGeneral,
    Incentive,
    OptimalM,
    QLossVsOptimal,
}

/// One swept parameter and its grid values, in declared order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// A Cartesian-product evaluation request: axes vary, `fixed` holds the
/// remaining parameters, and `quantity` selects the computed column(s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub quantity: SweepQuantity,
    #[serde(default)]
    pub convention: GammaConvention,
}

/// Sweep output: axis columns in declared order, then computed columns.
/// Row order is lexicographic by axis order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

struct ParamView<'a> {
    point: &'a BTreeMap<String, f64>,
}

impl ParamView<'_> {
    fn get(&self, name: &str) -> Result<f64, AnalysisError> {
        self.point
            .get(name)
            .copied()
            .ok_or_else(|| AnalysisError::MissingParameter {
                name: name.to_string(),
            })
    }

    fn get_or(&self, name: &str, default: f64) -> f64 {
        self.point.get(name).copied().unwrap_or(default)
    }

    fn get_u32(&self, name: &str) -> Result<u32, AnalysisError> {
        let value = self.get(name)?;
        if value < 1.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
            return Err(AnalysisError::NotAnInteger {
                name: name.to_string(),
                value,
            });
        }
        Ok(value as u32)
    }
}

fn quantity_columns(quantity: SweepQuantity) -> &'static [&'static str] {
    match quantity {
        SweepQuantity::QSimple | SweepQuantity::QGeneral => &["q"],
        SweepQuantity::Incentive => &["incentive"],
        SweepQuantity::OptimalM => &["optimal_m"],
        SweepQuantity::QLossVsOptimal => &["optimal_m_perceived", "q_loss"],
    }
}

fn evaluate_point(
    quantity: SweepQuantity,
    view: &ParamView<'_>,
    convention: GammaConvention,
) -> Result<Vec<f64>, AnalysisError> {
    match quantity {
        SweepQuantity::QSimple => Ok(vec![q_simple(
            view.get("s")?,
            view.get("m")?,
            view.get("n")?,
        )?]),
        SweepQuantity::QGeneral => {
            let model = BattleModel::new(
                view.get("s")?,
                view.get_or("R", 1.0),
                view.get_or("gamma", 0.0),
            )?;
            Ok(vec![q_general(
                &model,
                view.get_u32("m")?,
                view.get_u32("n")?,
                convention,
            )?])
        }
        SweepQuantity::Incentive => {
            let (b, c) = if view.point.contains_key("b_over_c") {
                (view.get("b_over_c")?, 1.0)
            } else {
                (view.get("b")?, view.get("c")?)
            };
            let member = MemberProfile::new(view.get("r")?, b, c, view.get("s_hat")?)?;
            let decision = UnityDecision::new(view.get_u32("m0")?, view.get_u32("m1")?)?;
            Ok(vec![incentive(&member, &decision, view.get_u32("n")?)?])
        }
        SweepQuantity::OptimalM => Ok(vec![optimal_m(
            view.get("s")?,
            view.get_u32("n")?,
            view.get_or("R", 1.0),
            view.get_or("gamma", 0.0),
            view.get_u32("m_max")?,
            convention,
        )? as f64]),
        SweepQuantity::QLossVsOptimal => {
            let s = view.get("s")?;
            let s_hat = view.get("s_hat")?;
            let n = view.get_u32("n")?;
            let randomness = view.get_or("R", 1.0);
            let gamma = view.get_or("gamma", 0.0);
            let m_max = view.get_u32("m_max")?;
            let m_perceived = optimal_m(s_hat, n, randomness, gamma, m_max, convention)?;
            let m_actual = optimal_m(s, n, randomness, gamma, m_max, convention)?;
            let q_acted = win_probability(s, m_perceived, n, randomness, gamma, convention)?;
            let q_best = win_probability(s, m_actual, n, randomness, gamma, convention)?;
            Ok(vec![m_perceived as f64, q_best - q_acted])
        }
    }
}

/// Evaluate the spec over the full Cartesian product of its axes.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult, AnalysisError> {
    for axis in &spec.axes {
        if axis.values.is_empty() {
            return Err(AnalysisError::EmptyAxis {
                name: axis.name.clone(),
            });
        }
    }
    let mut header: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    header.extend(
        quantity_columns(spec.quantity)
            .iter()
            .map(|s| s.to_string()),
    );

    let total: usize = spec.axes.iter().map(|a| a.values.len()).product();
    let mut rows = Vec::with_capacity(total);
    let mut indices = vec![0usize; spec.axes.len()];
    loop {
        let mut point = spec.fixed.clone();
        let mut row = Vec::with_capacity(header.len());
        for (axis, &idx) in spec.axes.iter().zip(&indices) {
            let value = axis.values[idx];
            point.insert(axis.name.clone(), value);
            row.push(value);
        }
        let view = ParamView { point: &point };
        row.extend(evaluate_point(spec.quantity, &view, spec.convention)?);
        rows.push(row);

        // Odometer increment, last axis fastest.
        let mut pos = indices.len();
        loop {
            if pos == 0 {
                return Ok(SweepResult { header, rows });
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < spec.axes[pos].values.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EQ10: GammaConvention = GammaConvention::Eq10;

    #[test]
    fn unity_optimal_moderate_strength() {
        let report = verify_unity_optimal(4.0, 10, 1.0, 0.0, 10, EQ10).unwrap();
        assert!(report.monotone_decreasing);
        assert!(report.first_violation.is_none());
        let q1 = win_probability(4.0, 1, 10, 1.0, 0.0, EQ10).unwrap();
        let q2 = win_probability(4.0, 2, 10, 1.0, 0.0, EQ10).unwrap();
        let q3 = win_probability(4.0, 3, 10, 1.0, 0.0, EQ10).unwrap();
        assert!((q1 - 0.60002).abs() < 1e-5);
        assert!((q2 - 0.38656).abs() < 1e-5);
        assert!((q3 - 0.07506).abs() < 1e-5);
    }

    #[test]
    fn unity_violated_at_weak_strength() {
        let report = verify_unity_optimal(10.0, 50, 1.0, 0.0, 10, EQ10).unwrap();
        assert!(!report.monotone_decreasing);
        let (m, q_m, q_next) = report.first_violation.unwrap();
        assert_eq!(m, 1);
        assert!((q_m - 0.8).abs() < 1e-6);
        assert!((q_next - 0.84).abs() < 1e-6);
    }

    #[test]
    fn unity_optimal_large_strength_tail() {
        let report = verify_unity_optimal(1e4, 10, 1.0, 0.0, 40, EQ10).unwrap();
        assert!(report.monotone_decreasing);
        assert!(report.q_tail < 1e-6);
    }

    #[test]
    fn critical_strength_brackets() {
        let s_star = find_critical_strength(10, 1.0, 0.0, 10, 1.0, 10.0, 1e-3, EQ10).unwrap();
        assert!(s_star <= 4.0);
        // Re-evaluation: pass at s*, fail just below.
        assert!(
            verify_unity_optimal(s_star, 10, 1.0, 0.0, 10, EQ10)
                .unwrap()
                .monotone_decreasing
        );
        assert!(
            !verify_unity_optimal(s_star - 1e-3, 10, 1.0, 0.0, 10, EQ10)
                .unwrap()
                .monotone_decreasing
        );

        let s_star = find_critical_strength(50, 1.0, 0.0, 10, 10.0, 1e4, 1e-2, EQ10).unwrap();
        assert!(s_star > 10.0);
    }

    #[test]
    fn critical_strength_rejects_bad_bracket() {
        // Passes already at the low end.
        assert!(matches!(
            find_critical_strength(10, 1.0, 0.0, 10, 100.0, 1e4, 1e-3, EQ10),
            Err(AnalysisError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn optimal_m_examples() {
        assert_eq!(optimal_m(1e4, 10, 1.0, 0.0, 20, EQ10).unwrap(), 1);
        assert_eq!(optimal_m(10.0, 50, 1.0, 0.0, 10, EQ10).unwrap(), 2);
    }

    #[test]
    fn optimal_m_implied_by_monotone_pass() {
        for &s in &[4.0, 100.0, 1e4] {
            if verify_unity_optimal(s, 10, 1.0, 0.0, 15, EQ10)
                .unwrap()
                .monotone_decreasing
            {
                assert_eq!(optimal_m(s, 10, 1.0, 0.0, 15, EQ10).unwrap(), 1);
            }
        }
    }

    #[test]
    fn sweep_shape_and_order() {
        let spec = SweepSpec {
            axes: vec![
                SweepAxis {
                    name: "s".into(),
                    values: vec![0.5, 1.0],
                },
                SweepAxis {
                    name: "m".into(),
                    values: vec![1.0, 2.0, 3.0],
                },
            ],
            fixed: BTreeMap::from([("n".to_string(), 15.0)]),
            quantity: SweepQuantity::QSimple,
            convention: EQ10,
        };
        let result = sweep(&spec).unwrap();
        assert_eq!(result.header, vec!["s", "m", "q"]);
        assert_eq!(result.rows.len(), 6);
        // Last axis fastest.
        assert_eq!(result.rows[0][..2], [0.5, 1.0]);
        assert_eq!(result.rows[1][..2], [0.5, 2.0]);
        assert_eq!(result.rows[3][..2], [1.0, 1.0]);
        assert!(result.rows.iter().flatten().all(|x| x.is_finite()));
        // Determinism: identical specs, identical tables.
        assert_eq!(sweep(&spec).unwrap(), result);
    }

    #[test]
    fn sweep_single_tie_point() {
        let spec = SweepSpec {
            axes: vec![SweepAxis {
                name: "s".into(),
                values: vec![1.0],
            }],
            fixed: BTreeMap::from([("m".to_string(), 3.0), ("n".to_string(), 3.0)]),
            quantity: SweepQuantity::QSimple,
            convention: EQ10,
        };
        let result = sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0][1], 0.5);
    }

    #[test]
    fn sweep_missing_parameter_errors() {
        let spec = SweepSpec {
            axes: vec![SweepAxis {
                name: "s".into(),
                values: vec![1.0],
            }],
            fixed: BTreeMap::new(),
            quantity: SweepQuantity::QSimple,
            convention: EQ10,
        };
        assert!(matches!(
            sweep(&spec),
            Err(AnalysisError::MissingParameter { .. })
        ));
    }

    #[test]
    fn sweep_incentive_cells() {
        let spec = SweepSpec {
            axes: vec![
                SweepAxis {
                    name: "r".into(),
                    values: vec![0.1, 0.5],
                },
                SweepAxis {
                    name: "b_over_c".into(),
                    values: vec![10.0, 100.0],
                },
            ],
            fixed: BTreeMap::from([
                ("m0".to_string(), 2.0),
                ("m1".to_string(), 1.0),
                ("n".to_string(), 50.0),
                ("s_hat".to_string(), 10.0),
            ]),
            quantity: SweepQuantity::Incentive,
            convention: EQ10,
        };
        let result = sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 4);
        for row in &result.rows {
            let (r, b_over_c, cell) = (row[0], row[1], row[2]);
            let expected = (1.0 / r.exp_m1()) * b_over_c * (0.8 - 0.84);
            assert!((cell - expected).abs() < 1e-9);
        }
    }
}
