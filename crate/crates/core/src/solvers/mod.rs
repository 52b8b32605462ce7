//! Envelope computations on the belief simplex: join envelope (commitment to
//! actions), concave envelope (extended commitment to messages and actions),
//! concavity diagnostics, and the uncoupled message/action construction.

mod concave;
mod join;
mod registry;
mod uncouple;

pub use concave::{
    concave_envelope, each_interim_concave, is_concave_on_grid, pointwise_max, ConcavityReport,
    ConcavityViolation,
};
pub(crate) use concave::upper_hull_query;
pub use join::{join_envelope, join_envelope_sweep};
pub use registry::{regime_names, regime_solver, RegimeSolver};
pub use uncouple::{uncoupled_strategy_from_joint, UncoupledStrategy};

use serde::Serialize;

use crate::belief::{Belief, BeliefSystem, PROB_TOL};
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};

/// Commitment regime of an envelope value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Commitment to actions only: join envelope.
    Jo,
    /// Extended commitment to messages and actions: concave envelope.
    Co,
    /// Commitment to messages before an uncommitted signaling game:
    /// concave envelope of the pooling payoff graphs.
    Pp,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Jo => "jo",
            Regime::Co => "co",
            Regime::Pp => "pp",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One atom of a joint belief/action distribution.
#[derive(Debug, Clone, Serialize)]
pub struct JointAtom {
    pub belief: Belief,
    pub action: usize,
    pub prob: f64,
}

/// A finite-support joint distribution over (posterior belief, sender action)
/// pairs: the witness object of the extended-commitment and pre-persuasion
/// regimes.
#[derive(Debug, Clone, Serialize)]
pub struct JointBeliefActionDistribution {
    support: Vec<JointAtom>,
}

impl JointBeliefActionDistribution {
    pub fn new(support: Vec<JointAtom>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidBelief("empty joint distribution".into()));
        }
        let mut sum = 0.0;
        for (i, atom) in support.iter().enumerate() {
            if !atom.prob.is_finite() || atom.prob < -PROB_TOL {
                return Err(Error::InvalidBelief(format!(
                    "atom {i} has invalid probability {}",
                    atom.prob
                )));
            }
            sum += atom.prob.max(0.0);
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidBelief(format!(
                "joint probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &[JointAtom] {
        &self.support
    }

    /// The belief marginal, grouping atoms whose beliefs coincide.
    pub fn belief_marginal(&self) -> Vec<(Belief, f64)> {
        let mut out: Vec<(Belief, f64)> = Vec::new();
        for atom in &self.support {
            match out
                .iter_mut()
                .find(|(b, _)| b.linf_distance(&atom.belief) <= PROB_TOL)
            {
                Some((_, p)) => *p += atom.prob,
                None => out.push((atom.belief.clone(), atom.prob)),
            }
        }
        out
    }

    /// Whether the belief marginal averages to `prior` within `tol`.
    pub fn is_bayes_plausible(&self, prior: &Belief, tol: f64) -> bool {
        let mut mean = vec![0.0; prior.dim()];
        for atom in &self.support {
            for (m, p) in mean.iter_mut().zip(atom.belief.probs()) {
                *m += atom.prob * p;
            }
        }
        mean.iter()
            .zip(prior.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            <= tol
    }
}

/// Attainment witness of an envelope value.
#[derive(Debug, Clone, Serialize)]
pub enum Witness {
    /// Join-envelope witness: one posterior and weight per sender action.
    System(BeliefSystem),
    /// Concave-envelope / pre-persuasion witness.
    Joint(JointBeliefActionDistribution),
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SolveDiagnostics {
    /// Grid beliefs examined (after knot injection).
    pub grid_points: usize,
    /// Candidate combinations evaluated by the search.
    pub candidates: u64,
}

/// Regime value at a prior, together with its witness and grid metadata.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeResult {
    pub value: f64,
    pub regime: Regime,
    pub witness: Witness,
    pub grid: GridConfig,
    pub prior: Belief,
    pub diagnostics: SolveDiagnostics,
}

impl EnvelopeResult {
    /// Re-evaluates the witness against an interim payoff family. Equals
    /// `value` within the grid tolerance for every result produced here.
    pub fn witness_value(&self, fam: &InterimPayoffFamily) -> f64 {
        match &self.witness {
            Witness::System(bs) => bs
                .entries()
                .iter()
                .enumerate()
                .map(|(s, e)| {
                    if e.weight > 0.0 {
                        e.weight * fam.value(&e.belief, s)
                    } else {
                        0.0
                    }
                })
                .sum(),
            Witness::Joint(joint) => joint
                .support()
                .iter()
                .map(|atom| {
                    if atom.prob > 0.0 {
                        atom.prob * fam.value(&atom.belief, atom.action)
                    } else {
                        0.0
                    }
                })
                .sum(),
        }
    }
}
