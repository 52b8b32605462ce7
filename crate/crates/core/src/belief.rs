//! Points on the state simplex and action-indexed belief systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for stochasticity and plausibility checks throughout.
pub const PROB_TOL: f64 = 1e-9;

/// A probability distribution over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    probs: Vec<f64>,
}

impl Belief {
    /// Builds a belief, checking simplex membership within [`PROB_TOL`].
    /// Entries in `[-PROB_TOL, 0)` are clamped to zero.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidBelief("empty probability vector".into()));
        }
        let mut sum = 0.0;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidBelief(format!("entry {i} is not finite")));
            }
            if *p < 0.0 {
                if *p < -PROB_TOL {
                    return Err(Error::InvalidBelief(format!("entry {i} is negative: {p}")));
                }
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidBelief(format!("entries sum to {sum}, expected 1")));
        }
        Ok(Self { probs })
    }

    /// Binary-state belief from the probability of the second state.
    pub fn binary(second: f64) -> Result<Self> {
        if !second.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&second) {
            return Err(Error::InvalidBelief(format!(
                "probability {second} outside [0, 1]"
            )));
        }
        Self::new(vec![1.0 - second, second])
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    /// Degenerate belief putting all mass on one state.
    pub fn vertex(dim: usize, state: usize) -> Self {
        let mut probs = vec![0.0; dim];
        probs[state] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    /// The probability of the second state; the scalar coordinate used for
    /// binary-state games.
    pub fn second(&self) -> f64 {
        self.probs[1]
    }

    pub fn is_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn linf_distance(&self, other: &Belief) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Lexicographic comparison by coordinates; total because entries are finite.
    pub fn lex_cmp(&self, other: &Belief) -> std::cmp::Ordering {
        for (a, b) in self.probs.iter().zip(&other.probs) {
            match a.partial_cmp(b).expect("finite probabilities") {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// One entry of a [`BeliefSystem`]: the posterior attached to a sender action
/// and the probability that this action realizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefSystemEntry {
    pub belief: Belief,
    pub weight: f64,
    /// Set when the action has zero probability and the belief is the
    /// conventional placeholder (the prior) rather than a Bayes posterior.
    pub unreached: bool,
}

/// An action-indexed collection of posteriors with exhaustive weights.
/// Entry `i` corresponds to sender action `i` of the owning game or family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefSystem {
    entries: Vec<BeliefSystemEntry>,
}

impl BeliefSystem {
    /// Builds a belief system from `(belief, weight)` pairs, one per sender
    /// action. Weights must be nonnegative and sum to one within [`PROB_TOL`].
    pub fn new(pairs: Vec<(Belief, f64)>) -> Result<Self> {
        let entries = pairs
            .into_iter()
            .map(|(belief, weight)| BeliefSystemEntry {
                belief,
                weight,
                unreached: false,
            })
            .collect();
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<BeliefSystemEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidBelief("belief system has no entries".into()));
        }
        let dim = entries[0].belief.dim();
        let mut sum = 0.0;
        for (i, e) in entries.iter().enumerate() {
            if e.belief.dim() != dim {
                return Err(Error::InvalidBelief(format!(
                    "entry {i} has dimension {} but entry 0 has {dim}",
                    e.belief.dim()
                )));
            }
            if !e.weight.is_finite() || e.weight < -PROB_TOL {
                return Err(Error::InvalidBelief(format!(
                    "entry {i} has invalid weight {}",
                    e.weight
                )));
            }
            sum += e.weight.max(0.0);
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidBelief(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[BeliefSystemEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, action: usize) -> f64 {
        self.entries[action].weight
    }

    pub fn belief(&self, action: usize) -> &Belief {
        &self.entries[action].belief
    }

    /// The weighted average of the posteriors.
    pub fn mean_belief(&self) -> Belief {
        let dim = self.entries[0].belief.dim();
        let mut mean = vec![0.0; dim];
        for e in &self.entries {
            for (m, p) in mean.iter_mut().zip(e.belief.probs()) {
                *m += e.weight * p;
            }
        }
        Belief { probs: mean }
    }
}

/// Bayes-plausibility: the weighted average of the posteriors equals the
/// prior within `tol` in the sup norm.
pub fn is_bayes_plausible(bs: &BeliefSystem, prior: &Belief, tol: f64) -> bool {
    bs.mean_belief().linf_distance(prior) <= tol
}
