//! Finite signaling games: payoff tensors, Bayes machinery linking sender
//! strategies and belief systems, receiver best responses, interim payoffs.

use serde::{Deserialize, Serialize};

use crate::belief::{Belief, BeliefSystem, BeliefSystemEntry, PROB_TOL};
use crate::error::{Error, Result};

/// Receiver tie-breaking rule when several responses are optimal.
///
/// `SenderPreferred` is the on-path selection used everywhere;
/// `AdversarialToSender` exists only for off-path punishment search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    SenderPreferred,
    AdversarialToSender,
}

/// A finite signaling game `(Ω, S, A, v, u, μ0)`.
///
/// Payoff tensors are indexed `[sender action][receiver action][state]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalingGame {
    states: Vec<String>,
    prior: Belief,
    sender_actions: Vec<String>,
    receiver_actions: Vec<String>,
    v: Vec<Vec<Vec<f64>>>,
    u: Vec<Vec<Vec<f64>>>,
}

/// A single violated invariant, in report style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub at: String,
    pub msg: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.at, self.msg)
    }
}

fn check_tensor(
    name: &str,
    t: &[Vec<Vec<f64>>],
    n_s: usize,
    n_a: usize,
    n_w: usize,
    out: &mut Vec<Violation>,
) {
    if t.len() != n_s {
        out.push(Violation {
            at: name.to_string(),
            msg: format!("expected {n_s} sender-action slices, found {}", t.len()),
        });
        return;
    }
    for (s, slice) in t.iter().enumerate() {
        if slice.len() != n_a {
            out.push(Violation {
                at: format!("{name}[{s}]"),
                msg: format!("expected {n_a} receiver-action rows, found {}", slice.len()),
            });
            continue;
        }
        for (a, row) in slice.iter().enumerate() {
            if row.len() != n_w {
                out.push(Violation {
                    at: format!("{name}[{s}][{a}]"),
                    msg: format!("expected {n_w} state entries, found {}", row.len()),
                });
                continue;
            }
            for (w, x) in row.iter().enumerate() {
                if !x.is_finite() {
                    out.push(Violation {
                        at: format!("{name}[{s}][{a}][{w}]"),
                        msg: format!("payoff {x} is not finite"),
                    });
                }
            }
        }
    }
}

/// Report-style validation of raw game parts. Empty report means valid.
pub fn validate_game_parts(
    states: &[String],
    prior: &[f64],
    sender_actions: &[String],
    receiver_actions: &[String],
    v: &[Vec<Vec<f64>>],
    u: &[Vec<Vec<f64>>],
) -> Vec<Violation> {
    let mut out = Vec::new();
    if states.len() < 2 {
        out.push(Violation {
            at: "states".into(),
            msg: format!("need at least 2 states, found {}", states.len()),
        });
    }
    if sender_actions.is_empty() {
        out.push(Violation {
            at: "sender_actions".into(),
            msg: "need at least 1 sender action".into(),
        });
    }
    if receiver_actions.is_empty() {
        out.push(Violation {
            at: "receiver_actions".into(),
            msg: "need at least 1 receiver action".into(),
        });
    }
    if prior.len() != states.len() {
        out.push(Violation {
            at: "prior".into(),
            msg: format!("expected {} entries, found {}", states.len(), prior.len()),
        });
    } else {
        let mut sum = 0.0;
        for (w, p) in prior.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                out.push(Violation {
                    at: format!("prior[{w}]"),
                    msg: format!("entry {p} is not a probability"),
                });
            } else {
                if *p == 0.0 {
                    out.push(Violation {
                        at: format!("prior[{w}]"),
                        msg: "prior not full support".into(),
                    });
                }
                sum += p;
            }
        }
        if (sum - 1.0).abs() > PROB_TOL {
            out.push(Violation {
                at: "prior".into(),
                msg: format!("entries sum to {sum}, expected 1"),
            });
        }
    }
    check_tensor(
        "v",
        v,
        sender_actions.len(),
        receiver_actions.len(),
        states.len(),
        &mut out,
    );
    check_tensor(
        "u",
        u,
        sender_actions.len(),
        receiver_actions.len(),
        states.len(),
        &mut out,
    );
    out
}

/// Report-style validation of a strategy attachment against a game.
pub fn validate_strategy_parts(game: &SignalingGame, pi: &[Vec<f64>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if pi.len() != game.num_states() {
        out.push(Violation {
            at: "pi".into(),
            msg: format!(
                "expected {} state rows, found {}",
                game.num_states(),
                pi.len()
            ),
        });
        return out;
    }
    for (w, row) in pi.iter().enumerate() {
        if row.len() != game.num_sender_actions() {
            out.push(Violation {
                at: format!("pi[{w}]"),
                msg: format!(
                    "expected {} entries, found {}",
                    game.num_sender_actions(),
                    row.len()
                ),
            });
            continue;
        }
        let mut sum = 0.0;
        for (s, p) in row.iter().enumerate() {
            if !p.is_finite() || *p < -PROB_TOL {
                out.push(Violation {
                    at: format!("pi[{w}][{s}]"),
                    msg: format!("entry {p} is negative"),
                });
            }
            sum += p.max(0.0);
        }
        if (sum - 1.0).abs() > PROB_TOL {
            out.push(Violation {
                at: format!("pi[{w}]"),
                msg: format!("row not stochastic: sums to {sum}"),
            });
        }
    }
    out
}

impl SignalingGame {
    pub fn new(
        states: Vec<String>,
        prior: Vec<f64>,
        sender_actions: Vec<String>,
        receiver_actions: Vec<String>,
        v: Vec<Vec<Vec<f64>>>,
        u: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let report = validate_game_parts(&states, &prior, &sender_actions, &receiver_actions, &v, &u);
        if let Some(first) = report.first() {
            return Err(Error::InvalidGame(format!(
                "{first} ({} violation(s) total)",
                report.len()
            )));
        }
        Ok(Self {
            states,
            prior: Belief::new(prior)?,
            sender_actions,
            receiver_actions,
            v,
            u,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn sender_actions(&self) -> &[String] {
        &self.sender_actions
    }

    pub fn receiver_actions(&self) -> &[String] {
        &self.receiver_actions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_sender_actions(&self) -> usize {
        self.sender_actions.len()
    }

    pub fn num_receiver_actions(&self) -> usize {
        self.receiver_actions.len()
    }

    /// The same game with a different (full-support) prior.
    pub fn with_prior(&self, prior: Vec<f64>) -> Result<Self> {
        Self::new(
            self.states.clone(),
            prior,
            self.sender_actions.clone(),
            self.receiver_actions.clone(),
            self.v.clone(),
            self.u.clone(),
        )
    }

    pub fn sender_payoff(&self, s: usize, a: usize, w: usize) -> f64 {
        self.v[s][a][w]
    }

    pub fn receiver_payoff(&self, s: usize, a: usize, w: usize) -> f64 {
        self.u[s][a][w]
    }

    fn check_belief(&self, belief: &Belief) -> Result<()> {
        if belief.dim() != self.num_states() {
            return Err(Error::InvalidBelief(format!(
                "belief has dimension {}, game has {} states",
                belief.dim(),
                self.num_states()
            )));
        }
        Ok(())
    }

    pub fn expected_receiver_payoff(&self, belief: &Belief, s: usize, a: usize) -> f64 {
        belief
            .probs()
            .iter()
            .zip(&self.u[s][a])
            .map(|(p, x)| p * x)
            .sum()
    }

    pub fn expected_sender_payoff(&self, belief: &Belief, s: usize, a: usize) -> f64 {
        belief
            .probs()
            .iter()
            .zip(&self.v[s][a])
            .map(|(p, x)| p * x)
            .sum()
    }

    /// All receiver actions within `tol` of the best expected receiver payoff
    /// at `(belief, s)`. Never empty.
    pub fn receiver_best_responses(
        &self,
        belief: &Belief,
        s: usize,
        tol: f64,
    ) -> Result<Vec<usize>> {
        self.check_belief(belief)?;
        if tol < 0.0 {
            return Err(Error::InvalidParams(format!("negative tolerance {tol}")));
        }
        let scores: Vec<f64> = (0..self.num_receiver_actions())
            .map(|a| self.expected_receiver_payoff(belief, s, a))
            .collect();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok((0..scores.len()).filter(|&a| scores[a] >= best - tol).collect())
    }

    /// The receiver response selected by the tie-break rule. Among optimal
    /// responses, `SenderPreferred` maximizes the sender's expected payoff and
    /// `AdversarialToSender` minimizes it; remaining ties go to the smallest
    /// action index.
    pub fn selected_response(&self, belief: &Belief, s: usize, tie: TieBreak) -> Result<usize> {
        let best = self.receiver_best_responses(belief, s, PROB_TOL)?;
        let mut chosen = best[0];
        let mut chosen_v = self.expected_sender_payoff(belief, s, chosen);
        for &a in &best[1..] {
            let va = self.expected_sender_payoff(belief, s, a);
            let better = match tie {
                TieBreak::SenderPreferred => va > chosen_v + PROB_TOL,
                TieBreak::AdversarialToSender => va < chosen_v - PROB_TOL,
            };
            if better {
                chosen = a;
                chosen_v = va;
            }
        }
        Ok(chosen)
    }

    /// Sender's interim payoff: the expected sender payoff when action `s`
    /// realizes, the receiver holds `belief`, and responds optimally under
    /// the given tie-break.
    pub fn interim_payoff(&self, belief: &Belief, s: usize, tie: TieBreak) -> Result<f64> {
        let a = self.selected_response(belief, s, tie)?;
        Ok(self.expected_sender_payoff(belief, s, a))
    }

    /// The strategy that induces a Bayes-plausible belief system:
    /// `π(s|ω) = τ(μ_s) μ_s(ω) / μ0(ω)`.
    pub fn strategy_from_belief_system(&self, bs: &BeliefSystem) -> Result<SenderStrategy> {
        if bs.len() != self.num_sender_actions() {
            return Err(Error::InvalidBelief(format!(
                "belief system has {} entries, game has {} sender actions",
                bs.len(),
                self.num_sender_actions()
            )));
        }
        self.check_belief(bs.belief(0))?;
        let mean = bs.mean_belief();
        for w in 0..self.num_states() {
            let gap = (mean.prob(w) - self.prior.prob(w)).abs();
            if gap > PROB_TOL {
                return Err(Error::NotBayesPlausible {
                    state: self.states[w].clone(),
                    got: mean.prob(w),
                    want: self.prior.prob(w),
                });
            }
        }
        let mut pi = vec![vec![0.0; self.num_sender_actions()]; self.num_states()];
        for (s, e) in bs.entries().iter().enumerate() {
            for w in 0..self.num_states() {
                pi[w][s] = e.weight * e.belief.prob(w) / self.prior.prob(w);
            }
        }
        // Rows sum to Σ_s τ(μ_s) μ_s(ω) / μ0(ω) = 1 up to the plausibility gap.
        SenderStrategy::new(pi)
    }

    /// The belief system induced by a strategy. Actions with zero probability
    /// get the prior as placeholder belief and are flagged `unreached`.
    pub fn belief_system_from_strategy(&self, strat: &SenderStrategy) -> Result<BeliefSystem> {
        let report = validate_strategy_parts(self, strat.rows());
        if let Some(first) = report.first() {
            return Err(Error::InvalidGame(first.to_string()));
        }
        let mut entries = Vec::with_capacity(self.num_sender_actions());
        for s in 0..self.num_sender_actions() {
            let weight: f64 = (0..self.num_states())
                .map(|w| self.prior.prob(w) * strat.prob(w, s))
                .sum();
            if weight <= PROB_TOL {
                entries.push(BeliefSystemEntry {
                    belief: self.prior.clone(),
                    weight: 0.0,
                    unreached: true,
                });
            } else {
                let probs = (0..self.num_states())
                    .map(|w| self.prior.prob(w) * strat.prob(w, s) / weight)
                    .collect();
                entries.push(BeliefSystemEntry {
                    belief: Belief::new(probs)?,
                    weight,
                    unreached: false,
                });
            }
        }
        BeliefSystem::from_entries(entries)
    }
}

/// A sender strategy `π(s|ω)`: rows indexed by state, columns by sender action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenderStrategy {
    pi: Vec<Vec<f64>>,
}

impl SenderStrategy {
    /// Builds a strategy, checking every row is a probability distribution.
    pub fn new(pi: Vec<Vec<f64>>) -> Result<Self> {
        if pi.is_empty() || pi[0].is_empty() {
            return Err(Error::InvalidGame("empty strategy matrix".into()));
        }
        let cols = pi[0].len();
        for (w, row) in pi.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidGame(format!(
                    "pi[{w}]: ragged row (expected {cols} entries, found {})",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for (s, p) in row.iter().enumerate() {
                if !p.is_finite() || *p < -PROB_TOL {
                    return Err(Error::InvalidGame(format!("pi[{w}][{s}]: entry {p} is negative")));
                }
                sum += p.max(0.0);
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidGame(format!(
                    "pi[{w}]: row not stochastic: sums to {sum}"
                )));
            }
        }
        Ok(Self { pi })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.pi
    }

    /// `π(s|ω)`.
    pub fn prob(&self, state: usize, action: usize) -> f64 {
        self.pi[state][action].max(0.0)
    }

    pub fn num_states(&self) -> usize {
        self.pi.len()
    }

    pub fn num_actions(&self) -> usize {
        self.pi[0].len()
    }
}
