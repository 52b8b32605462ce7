//! Evaluable interim payoff surfaces and belief-grid configuration.

use std::sync::Arc;

use serde::Serialize;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::game::{SignalingGame, TieBreak};

/// Where an interim payoff family came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    DerivedFromGame,
    ClosedForm,
}

/// A family of interim payoff functions `v̂(μ, s)`, one graph per sender
/// action, either derived from a finite game (receiver best-responds with
/// sender-preferred ties) or supplied in closed form.
#[derive(Clone)]
pub struct InterimPayoffFamily {
    actions: Vec<String>,
    dim: usize,
    evaluator: Arc<dyn Fn(&Belief, usize) -> f64 + Send + Sync>,
    provenance: Provenance,
}

impl std::fmt::Debug for InterimPayoffFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InterimPayoffFamily")
            .field("actions", &self.actions)
            .field("dim", &self.dim)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl InterimPayoffFamily {
    /// Interim payoffs of a finite game under sender-preferred receiver ties.
    pub fn from_game(game: &SignalingGame) -> Self {
        let owned = game.clone();
        let dim = game.num_states();
        Self {
            actions: game.sender_actions().to_vec(),
            dim,
            evaluator: Arc::new(move |belief, s| {
                owned
                    .interim_payoff(belief, s, TieBreak::SenderPreferred)
                    .expect("belief dimension checked by the family")
            }),
            provenance: Provenance::DerivedFromGame,
        }
    }

    pub fn closed_form<F>(actions: Vec<String>, dim: usize, evaluator: F) -> Self
    where
        F: Fn(&Belief, usize) -> f64 + Send + Sync + 'static,
    {
        Self {
            actions,
            dim,
            evaluator: Arc::new(evaluator),
            provenance: Provenance::ClosedForm,
        }
    }

    /// `v̂(μ, s)`.
    pub fn value(&self, belief: &Belief, action: usize) -> f64 {
        debug_assert!(belief.dim() == self.dim);
        (self.evaluator)(belief, action)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Discretization of the belief simplex: the lattice at resolution `n`
/// augmented with caller-supplied critical beliefs (knots).
#[derive(Debug, Clone, Serialize)]
pub struct GridConfig {
    resolution: usize,
    extra_knots: Vec<Belief>,
    tol: f64,
}

impl GridConfig {
    pub fn new(resolution: usize, extra_knots: Vec<Belief>, tol: f64) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParams(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        if !tol.is_finite() || tol < 0.0 {
            return Err(Error::InvalidParams(format!("invalid grid tolerance {tol}")));
        }
        Ok(Self {
            resolution,
            extra_knots,
            tol,
        })
    }

    pub fn with_resolution(resolution: usize) -> Result<Self> {
        Self::new(resolution, Vec::new(), 1e-9)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn extra_knots(&self) -> &[Belief] {
        &self.extra_knots
    }

    /// A copy with additional knots appended.
    pub fn with_knots(&self, knots: &[Belief]) -> Self {
        let mut extra = self.extra_knots.clone();
        extra.extend_from_slice(knots);
        Self {
            resolution: self.resolution,
            extra_knots: extra,
            tol: self.tol,
        }
    }

    /// Sorted, deduplicated binary-grid coordinates (probability of the
    /// second state), including knots of dimension 2.
    pub fn binary_points(&self) -> Vec<f64> {
        let n = self.resolution;
        let mut pts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        for k in &self.extra_knots {
            if k.dim() == 2 {
                pts.push(k.second());
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// All grid beliefs for a `dim`-state simplex: lattice points `i/n`
    /// summing to one, plus matching-dimension knots. Sorted lexicographically.
    pub fn beliefs(&self, dim: usize) -> Vec<Belief> {
        if dim == 2 {
            return self
                .binary_points()
                .into_iter()
                .map(|p| Belief::binary(p).expect("grid point is a probability"))
                .collect();
        }
        let n = self.resolution;
        let mut out = Vec::new();
        let mut current = vec![0usize; dim];
        fill_compositions(n, dim, 0, &mut current, &mut out);
        let mut beliefs: Vec<Belief> = out
            .into_iter()
            .map(|comp| {
                Belief::new(comp.iter().map(|&c| c as f64 / n as f64).collect())
                    .expect("lattice point is a distribution")
            })
            .collect();
        for k in &self.extra_knots {
            if k.dim() == dim {
                beliefs.push(k.clone());
            }
        }
        beliefs.sort_by(|a, b| a.lex_cmp(b));
        beliefs.dedup_by(|a, b| a.linf_distance(b) == 0.0);
        beliefs
    }
}

fn fill_compositions(
    remaining: usize,
    dim: usize,
    index: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if index == dim - 1 {
        current[index] = remaining;
        out.push(current.clone());
        return;
    }
    for take in 0..=remaining {
        current[index] = take;
        fill_compositions(remaining - take, dim, index + 1, current, out);
    }
}
