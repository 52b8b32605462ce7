//! Pooling-equilibrium existence, the pooling set and its payoff graphs, the
//! pre-persuasion value, and the support test for whether extended commitment
//! adds anything over persuasion alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::belief::{Belief, PROB_TOL};
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};
use crate::game::{SignalingGame, TieBreak};
use crate::lp;
use crate::solvers::{
    concave_envelope, upper_hull_query, EnvelopeResult, JointAtom, JointBeliefActionDistribution,
    Regime, SolveDiagnostics, Witness,
};

/// Deterrence record for one deviation action.
#[derive(Debug, Clone)]
pub struct Deterrent {
    pub deviation: usize,
    /// The off-path belief and receiver best response that deter the
    /// deviation, when one exists on the punishment grid.
    pub punishment: Option<(Belief, usize)>,
}

#[derive(Debug, Clone)]
pub struct PoolingCheck {
    pub exists: bool,
    pub deterrents: Vec<Deterrent>,
}

/// Receiver responses achievable as a best response to `deviation` at some
/// belief of the punishment grid, each with a representative belief.
fn achievable_punishments(
    game: &SignalingGame,
    punish_grid: &GridConfig,
    deviation: usize,
) -> Vec<(usize, Belief)> {
    let mut out: Vec<(usize, Belief)> = Vec::new();
    for belief in punish_grid.beliefs(game.num_states()) {
        for a in game
            .receiver_best_responses(&belief, deviation, punish_grid.tol())
            .expect("grid belief is valid")
        {
            if !out.iter().any(|(seen, _)| *seen == a) {
                out.push((a, belief.clone()));
            }
        }
        if out.len() == game.num_receiver_actions() {
            break;
        }
    }
    out.sort_by_key(|(a, _)| *a);
    out
}

fn pooling_check_inner(
    game: &SignalingGame,
    belief: &Belief,
    action: usize,
    punishments: &[Vec<(usize, Belief)>],
    tol: f64,
) -> PoolingCheck {
    let on_path = game
        .selected_response(belief, action, TieBreak::SenderPreferred)
        .expect("belief validated by caller");
    let support: Vec<usize> = (0..game.num_states())
        .filter(|&w| belief.prob(w) > PROB_TOL)
        .collect();
    let mut deterrents = Vec::new();
    let mut exists = true;
    for deviation in 0..game.num_sender_actions() {
        if deviation == action {
            continue;
        }
        let found = punishments[deviation].iter().find(|(a, _)| {
            support.iter().all(|&w| {
                game.sender_payoff(action, on_path, w) >= game.sender_payoff(deviation, *a, w) - tol
            })
        });
        match found {
            Some((a, b)) => deterrents.push(Deterrent {
                deviation,
                punishment: Some((b.clone(), *a)),
            }),
            None => {
                exists = false;
                deterrents.push(Deterrent {
                    deviation,
                    punishment: None,
                });
            }
        }
    }
    PoolingCheck { exists, deterrents }
}

/// Whether a pooling equilibrium exists at `(belief, action)`: every
/// deviation is deterred by some off-path belief on the punishment grid and
/// some receiver best response there, state by state over the support of
/// `belief`. The on-path response uses sender-preferred tie-breaking.
pub fn pooling_exists(
    game: &SignalingGame,
    belief: &Belief,
    action: usize,
    punish_grid: &GridConfig,
) -> Result<PoolingCheck> {
    if belief.dim() != game.num_states() {
        return Err(Error::InvalidBelief(format!(
            "belief has dimension {}, game has {} states",
            belief.dim(),
            game.num_states()
        )));
    }
    let punishments: Vec<Vec<(usize, Belief)>> = (0..game.num_sender_actions())
        .map(|s| achievable_punishments(game, punish_grid, s))
        .collect();
    Ok(pooling_check_inner(
        game,
        belief,
        action,
        &punishments,
        punish_grid.tol(),
    ))
}

/// The pooling set restricted to a belief grid.
#[derive(Debug, Clone, Serialize)]
pub struct PoolingMap {
    pub beliefs: Vec<Belief>,
    /// `pooled[action][i]`: pooling equilibrium exists at `(beliefs[i], action)`.
    pub pooled: Vec<Vec<bool>>,
    pub grid: GridConfig,
}

impl PoolingMap {
    /// Grid beliefs at which the action supports a pooling equilibrium.
    pub fn pooling_beliefs(&self, action: usize) -> impl Iterator<Item = &Belief> {
        self.beliefs
            .iter()
            .zip(self.pooled[action].iter())
            .filter_map(|(b, &ok)| ok.then_some(b))
    }

    pub fn contains(&self, belief: &Belief, action: usize) -> bool {
        self.beliefs
            .iter()
            .position(|b| b.linf_distance(belief) <= 1e-12)
            .is_some_and(|i| self.pooled[action][i])
    }
}

/// Exhaustive pooling check over grid beliefs and sender actions. The same
/// grid supplies the candidate beliefs and the punishment beliefs.
pub fn pooling_map(game: &SignalingGame, grid: &GridConfig) -> Result<PoolingMap> {
    let beliefs = grid.beliefs(game.num_states());
    let punishments: Vec<Vec<(usize, Belief)>> = (0..game.num_sender_actions())
        .map(|s| achievable_punishments(game, grid, s))
        .collect();
    let per_belief: Vec<Vec<bool>> = beliefs
        .par_iter()
        .map(|b| {
            (0..game.num_sender_actions())
                .map(|s| pooling_check_inner(game, b, s, &punishments, grid.tol()).exists)
                .collect()
        })
        .collect();
    let pooled = (0..game.num_sender_actions())
        .map(|s| per_belief.iter().map(|row| row[s]).collect())
        .collect();
    Ok(PoolingMap {
        beliefs,
        pooled,
        grid: grid.clone(),
    })
}

/// Pre-persuasion value `V^pp`: the concave envelope, at the prior, of the
/// union of the pooling payoff graphs restricted to the grid. The witness
/// joint distribution is supported on pooling pairs only.
pub fn pre_persuasion_value(
    game: &SignalingGame,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    let map = pooling_map(game, grid)?;
    let fam = InterimPayoffFamily::from_game(game);
    // All pooling pairs with their interim payoffs.
    let mut points: Vec<(Belief, usize, f64)> = Vec::new();
    for s in 0..game.num_sender_actions() {
        for b in map.pooling_beliefs(s) {
            points.push((b.clone(), s, fam.value(b, s)));
        }
    }
    if points.is_empty() {
        return Err(Error::NoPoolingPayoff(
            "the pooling set is empty on this grid".into(),
        ));
    }
    let (value, atoms) = if game.num_states() == 2 {
        pooling_envelope_binary(&points, prior)?
    } else {
        pooling_envelope_lp(&points, prior)?
    };
    let witness = JointBeliefActionDistribution::new(atoms)?;
    Ok(EnvelopeResult {
        value,
        regime: Regime::Pp,
        witness: Witness::Joint(witness),
        grid: grid.clone(),
        prior: prior.clone(),
        diagnostics: SolveDiagnostics {
            grid_points: map.beliefs.len(),
            candidates: points.len() as u64,
        },
    })
}

fn pooling_envelope_binary(
    points: &[(Belief, usize, f64)],
    prior: &Belief,
) -> Result<(f64, Vec<JointAtom>)> {
    // Collapse to one point per belief coordinate: the best pooling value,
    // ties to the smallest action index.
    let mut curve: Vec<(f64, f64, usize)> = Vec::new();
    for (b, s, z) in points {
        let x = b.second();
        match curve.iter_mut().find(|(cx, _, _)| *cx == x) {
            Some(entry) => {
                if *z > entry.1 {
                    entry.1 = *z;
                    entry.2 = *s;
                }
            }
            None => curve.push((x, *z, *s)),
        }
    }
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let px = prior.second();
    if px < curve[0].0 - 1e-12 || px > curve.last().unwrap().0 + 1e-12 {
        return Err(Error::NoPoolingPayoff(format!(
            "prior {px} lies outside the span of pooling beliefs [{}, {}]",
            curve[0].0,
            curve.last().unwrap().0
        )));
    }
    let flat: Vec<(f64, f64)> = curve.iter().map(|(x, z, _)| (*x, *z)).collect();
    let (value, supports) = upper_hull_query(&flat, px);
    let mut atoms = Vec::new();
    for (idx, w) in supports {
        if w > 1e-15 {
            atoms.push(JointAtom {
                belief: Belief::binary(curve[idx].0)?,
                action: curve[idx].2,
                prob: w,
            });
        }
    }
    Ok((value, atoms))
}

fn pooling_envelope_lp(
    points: &[(Belief, usize, f64)],
    prior: &Belief,
) -> Result<(f64, Vec<JointAtom>)> {
    let dim = prior.dim();
    let c: Vec<f64> = points.iter().map(|(_, _, z)| *z).collect();
    let mut a = vec![vec![1.0; points.len()]];
    let mut b = vec![1.0];
    for w in 0..dim - 1 {
        a.push(points.iter().map(|(bel, _, _)| bel.prob(w)).collect());
        b.push(prior.prob(w));
    }
    let sol = lp::solve_max(&c, &a, &b).map_err(|_| {
        Error::NoPoolingPayoff("prior lies outside the hull of pooling beliefs".into())
    })?;
    let mut atoms = Vec::new();
    for (i, &w) in sol.x.iter().enumerate() {
        if w > 1e-12 {
            atoms.push(JointAtom {
                belief: points[i].0.clone(),
                action: points[i].1,
                prob: w,
            });
        }
    }
    Ok((sol.objective, atoms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prop8Verdict {
    /// Some optimal extended-commitment witness is supported inside the
    /// pooling set; persuasion alone attains the extended-commitment value.
    Equal,
    /// Every optimal extended-commitment witness needs a non-pooling pair.
    Strict,
}

#[derive(Debug, Clone)]
pub struct Prop8Check {
    pub verdict: Prop8Verdict,
    pub v_co: f64,
    pub v_pp: Option<f64>,
    /// A pooling-supported optimal witness, when the verdict is `Equal`.
    pub witness: Option<JointBeliefActionDistribution>,
    /// A support pair of the extended-commitment witness at which no pooling
    /// equilibrium exists, when the verdict is `Strict`.
    pub violating: Option<(Belief, usize)>,
}

/// Tests whether the extended-commitment value is attainable with persuasion
/// alone: equal values certify a pooling-supported optimal witness, and a
/// strict gap is explained by a support pair outside the pooling set.
pub fn extended_equals_preper(
    game: &SignalingGame,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<Prop8Check> {
    let fam = InterimPayoffFamily::from_game(game);
    let co = concave_envelope(&fam, prior, grid)?;
    let pp = match pre_persuasion_value(game, prior, grid) {
        Ok(res) => Some(res),
        Err(Error::NoPoolingPayoff(_)) => None,
        Err(e) => return Err(e),
    };
    let v_pp = pp.as_ref().map(|r| r.value);
    if let Some(vpp) = v_pp {
        if (co.value - vpp).abs() <= 2.0 * grid.tol() {
            let Witness::Joint(w) = pp.unwrap().witness else {
                return Err(Error::Internal("pre-persuasion witness kind".into()));
            };
            return Ok(Prop8Check {
                verdict: Prop8Verdict::Equal,
                v_co: co.value,
                v_pp,
                witness: Some(w),
                violating: None,
            });
        }
    }
    // Strict gap: locate a support pair of the extended-commitment witness
    // with no pooling equilibrium. Scan pairs ordered by action, then belief.
    let Witness::Joint(co_witness) = &co.witness else {
        return Err(Error::Internal("extended-commitment witness kind".into()));
    };
    let mut atoms: Vec<&JointAtom> = co_witness.support().iter().collect();
    atoms.sort_by(|x, y| x.action.cmp(&y.action).then(x.belief.lex_cmp(&y.belief)));
    for atom in atoms {
        if atom.prob <= 0.0 {
            continue;
        }
        let check = pooling_exists(game, &atom.belief, atom.action, grid)?;
        if !check.exists {
            return Ok(Prop8Check {
                verdict: Prop8Verdict::Strict,
                v_co: co.value,
                v_pp,
                witness: None,
                violating: Some((atom.belief.clone(), atom.action)),
            });
        }
    }
    Err(Error::Internal(
        "extended-commitment witness pools everywhere but values differ beyond tolerance".into(),
    ))
}
