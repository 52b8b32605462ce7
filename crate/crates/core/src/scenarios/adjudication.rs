//! Grievance adjudication: the sender commits to a procedure mapping the
//! grievance type into a distribution over {address, dismiss}; stakeholders
//! retaliate when they believe the case was mishandled. Step interim payoffs
//! with thresholds `theta_a`, `theta_d` and retaliation cost `l`.

use serde::Serialize;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::family::InterimPayoffFamily;
use crate::game::SignalingGame;
use crate::scenarios::Scenario;

/// Belief coordinate is the probability that the grievance is invalid.
/// Stakeholders retaliate after a dismissal when that probability is below
/// `theta_d`, and after a remedy when it is above `theta_a`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdjudicationParams {
    pub theta_a: f64,
    pub theta_d: f64,
    /// Retaliation cost `l` to the organization, in (0, 1).
    pub retaliation_cost: f64,
}

impl AdjudicationParams {
    pub fn new(theta_a: f64, theta_d: f64, retaliation_cost: f64) -> Result<Self> {
        if !(0.0 < retaliation_cost && retaliation_cost < 1.0) {
            return Err(Error::InvalidParams(format!(
                "retaliation cost must lie in (0, 1), got {retaliation_cost}"
            )));
        }
        if !(0.0 < theta_d && theta_d <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "theta_d must lie in (0, 1], got {theta_d}"
            )));
        }
        if !theta_a.is_finite() || theta_a < 0.0 {
            return Err(Error::InvalidParams(format!(
                "theta_a must be nonnegative, got {theta_a}"
            )));
        }
        Ok(Self {
            theta_a,
            theta_d,
            retaliation_cost,
        })
    }
}

/// Builds the adjudication game. States are ordered [valid, invalid] so the
/// binary belief coordinate is Pr(invalid); sender actions [a, d] (address,
/// dismiss); receiver actions [retaliate, abstain].
///
/// Receiver payoffs are any utilities that reproduce the retaliation rules:
/// retaliation after `d` has expected payoff `theta_d - mu` and after `a`
/// it has `mu - theta_a`, with abstention worth zero. Sender-preferred
/// tie-breaking then yields abstention exactly at the thresholds.
pub fn build_adjudication(p: &AdjudicationParams) -> (SignalingGame, InterimPayoffFamily) {
    let l = p.retaliation_cost;
    let game = SignalingGame::new(
        vec!["valid".into(), "invalid".into()],
        vec![0.5, 0.5],
        vec!["a".into(), "d".into()],
        vec!["retaliate".into(), "abstain".into()],
        vec![
            // address: 0 base payoff, minus l under retaliation
            vec![vec![-l, -l], vec![0.0, 0.0]],
            // dismiss: 1 base payoff, minus l under retaliation
            vec![vec![1.0 - l, 1.0 - l], vec![1.0, 1.0]],
        ],
        vec![
            // E[u(a, retaliate)] = mu - theta_a
            vec![vec![-p.theta_a, 1.0 - p.theta_a], vec![0.0, 0.0]],
            // E[u(d, retaliate)] = theta_d - mu
            vec![vec![p.theta_d, p.theta_d - 1.0], vec![0.0, 0.0]],
        ],
    )
    .expect("validated parameters yield a well-formed game");
    let family = InterimPayoffFamily::from_game(&game);
    (game, family)
}

pub fn adjudication_scenario(p: &AdjudicationParams) -> Scenario {
    let (game, family) = build_adjudication(p);
    let mut knots = Vec::new();
    if p.theta_a <= 1.0 {
        knots.push(Belief::binary(p.theta_a).expect("threshold in range"));
    }
    knots.push(Belief::binary(p.theta_d).expect("threshold in range"));
    Scenario {
        name: "adjudication".into(),
        game: Some(game),
        family,
        knots,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdjudicationRegime {
    /// Low prior: dismiss everything and absorb retaliation.
    PoolLow,
    /// Intermediate prior: spread beliefs onto {0, theta_d}.
    Informative,
    /// High prior: dismiss everything without retaliation.
    PoolHigh,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdjudicationReference {
    pub v_jo: f64,
    pub v_co: f64,
    pub regime: AdjudicationRegime,
}

/// Closed-form regime values. Valid for `theta_a < theta_d <= 1`.
pub fn adjudication_reference(p: &AdjudicationParams, prior: f64) -> AdjudicationReference {
    let l = p.retaliation_cost;
    let crossing = p.theta_d * (1.0 - l);
    let (v_jo, regime) = if prior >= p.theta_d {
        (1.0, AdjudicationRegime::PoolHigh)
    } else if prior <= crossing {
        (1.0 - l, AdjudicationRegime::PoolLow)
    } else {
        (prior / p.theta_d, AdjudicationRegime::Informative)
    };
    let v_co = if prior < p.theta_d {
        (1.0 - l) + prior * l / p.theta_d
    } else {
        1.0
    };
    AdjudicationReference { v_jo, v_co, regime }
}
