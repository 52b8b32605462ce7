//! Splits a joint belief/action distribution into a message experiment and a
//! belief-contingent action rule, so that the realized action carries no
//! information beyond the message.

use crate::belief::{Belief, PROB_TOL};
use crate::error::{Error, Result};
use crate::game::SignalingGame;
use crate::solvers::JointBeliefActionDistribution;

/// A two-stage implementation of a joint belief/action distribution: a
/// message experiment `π′(m|ω)` inducing the belief marginal (one message per
/// support belief), composed with a state-independent action rule
/// `τ_c(s|μ_m)`.
#[derive(Debug, Clone)]
pub struct UncoupledStrategy {
    /// Posterior belief attached to each message.
    pub message_beliefs: Vec<Belief>,
    /// `experiment[ω][m]` = probability of message `m` in state `ω`.
    pub experiment: Vec<Vec<f64>>,
    /// `action_rule[m][s]` = probability of action `s` after message `m`.
    pub action_rule: Vec<Vec<f64>>,
}

impl UncoupledStrategy {
    /// Joint probability of `(message m, action s)` in state `ω`.
    pub fn joint_prob(&self, state: usize, message: usize, action: usize) -> f64 {
        self.experiment[state][message] * self.action_rule[message][action]
    }
}

/// Builds the uncoupled two-stage strategy reproducing `joint` exactly:
/// generate the posterior with messages alone, then randomize the action as a
/// function of the realized posterior only.
pub fn uncoupled_strategy_from_joint(
    game: &SignalingGame,
    joint: &JointBeliefActionDistribution,
) -> Result<UncoupledStrategy> {
    let prior = game.prior();
    if !joint.is_bayes_plausible(prior, 10.0 * PROB_TOL) {
        let mut mean = vec![0.0; prior.dim()];
        for atom in joint.support() {
            for (m, p) in mean.iter_mut().zip(atom.belief.probs()) {
                *m += atom.prob * p;
            }
        }
        let worst = (0..prior.dim())
            .max_by(|&i, &j| {
                let di = (mean[i] - prior.prob(i)).abs();
                let dj = (mean[j] - prior.prob(j)).abs();
                di.partial_cmp(&dj).unwrap()
            })
            .unwrap();
        return Err(Error::NotBayesPlausible {
            state: game.states()[worst].clone(),
            got: mean[worst],
            want: prior.prob(worst),
        });
    }

    let marginal = joint.belief_marginal();
    let n_states = game.num_states();
    let n_actions = game.num_sender_actions();
    let n_messages = marginal.len();

    let mut experiment = vec![vec![0.0; n_messages]; n_states];
    for (m, (belief, weight)) in marginal.iter().enumerate() {
        for w in 0..n_states {
            experiment[w][m] = weight * belief.prob(w) / prior.prob(w);
        }
    }

    let mut action_rule = vec![vec![0.0; n_actions]; n_messages];
    for atom in joint.support() {
        let m = marginal
            .iter()
            .position(|(b, _)| b.linf_distance(&atom.belief) <= PROB_TOL)
            .expect("atom belief present in its own marginal");
        let weight = marginal[m].1;
        if weight > 0.0 {
            action_rule[m][atom.action] += atom.prob / weight;
        }
    }

    Ok(UncoupledStrategy {
        message_beliefs: marginal.into_iter().map(|(b, _)| b).collect(),
        experiment,
        action_rule,
    })
}
