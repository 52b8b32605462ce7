//! Independent brute-force verifiers: direct strategy-space enumeration for
//! the commitment value, a direct linear program over grid beliefs for the
//! extended-commitment value, and a naive all-pairs join check. None of them
//! reuse the envelope solvers' search.

use rand::Rng;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};
use crate::game::{SenderStrategy, SignalingGame, TieBreak};
use crate::lp;

/// Evaluation cap for strategy enumeration.
pub const ENUMERATION_CAP: u128 = 50_000_000;

#[derive(Debug, Clone)]
pub struct CommitmentBruteForce {
    pub value: f64,
    pub strategy: SenderStrategy,
}

/// Maximizes the sender's ex ante payoff directly over row-stochastic
/// strategies with entries on the grid `{0, 1/m, ..., 1}`, computing
/// posteriors by Bayes' rule. Enumeration is lexicographic and the first
/// maximizer is kept.
pub fn brute_force_commitment_value(
    game: &SignalingGame,
    resolution: usize,
) -> Result<CommitmentBruteForce> {
    if resolution == 0 {
        return Err(Error::InvalidParams("resolution must be positive".into()));
    }
    let n_states = game.num_states();
    let n_actions = game.num_sender_actions();
    let row_count = binomial_u128(resolution + n_actions - 1, n_actions - 1);
    let required = row_count.saturating_pow(n_states as u32);
    if required > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded {
            required,
            cap: ENUMERATION_CAP,
        });
    }
    let rows = compositions(resolution, n_actions);

    let mut counters = vec![0usize; n_states];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_rows: Vec<usize> = counters.clone();
    loop {
        let value = evaluate_strategy(game, &rows, &counters)?;
        if value > best_value {
            best_value = value;
            best_rows = counters.clone();
        }
        // Lexicographic odometer over per-state row choices.
        let mut dim = n_states;
        loop {
            if dim == 0 {
                let pi = best_rows.iter().map(|&r| rows[r].clone()).collect();
                return Ok(CommitmentBruteForce {
                    value: best_value,
                    strategy: SenderStrategy::new(pi)?,
                });
            }
            dim -= 1;
            counters[dim] += 1;
            if counters[dim] < rows.len() {
                break;
            }
            counters[dim] = 0;
        }
    }
}

fn evaluate_strategy(
    game: &SignalingGame,
    rows: &[Vec<f64>],
    choice: &[usize],
) -> Result<f64> {
    let n_states = game.num_states();
    let n_actions = game.num_sender_actions();
    let prior = game.prior();
    let mut total = 0.0;
    for s in 0..n_actions {
        let weight: f64 = (0..n_states)
            .map(|w| prior.prob(w) * rows[choice[w]][s])
            .sum();
        if weight <= 1e-15 {
            continue;
        }
        let posterior = Belief::new(
            (0..n_states)
                .map(|w| prior.prob(w) * rows[choice[w]][s] / weight)
                .collect(),
        )?;
        total += weight * game.interim_payoff(&posterior, s, TieBreak::SenderPreferred)?;
    }
    Ok(total)
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

/// All probability rows with entries on `{0, 1/m, ..., 1}` summing to one,
/// in lexicographic order.
fn compositions(resolution: usize, parts: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; parts];
    fn rec(
        remaining: usize,
        index: usize,
        resolution: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if index + 1 == current.len() {
            current[index] = remaining;
            out.push(
                current
                    .iter()
                    .map(|&c| c as f64 / resolution as f64)
                    .collect(),
            );
            return;
        }
        for take in 0..=remaining {
            current[index] = take;
            rec(remaining - take, index + 1, resolution, current, out);
        }
    }
    rec(resolution, 0, resolution, &mut current, &mut out);
    out
}

/// Extended-commitment value via a direct linear program over grid beliefs:
/// maximize `Σ w_i max_s v̂(μ_i, s)` subject to `Σ w_i μ_i = prior`, `w ≥ 0`.
/// Shares no code with the hull-based envelope.
pub fn brute_force_extended_value(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<f64> {
    let dim = fam.dim();
    let mut beliefs = grid.beliefs(dim);
    if !beliefs.iter().any(|b| b.linf_distance(prior) == 0.0) {
        beliefs.push(prior.clone());
    }
    let z: Vec<f64> = beliefs
        .iter()
        .map(|b| {
            (0..fam.num_actions())
                .map(|s| fam.value(b, s))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut a = vec![vec![1.0; beliefs.len()]];
    let mut rhs = vec![1.0];
    for w in 0..dim - 1 {
        a.push(beliefs.iter().map(|b| b.prob(w)).collect());
        rhs.push(prior.prob(w));
    }
    let sol = lp::solve_max(&z, &a, &rhs)
        .map_err(|e| Error::Internal(format!("extended-value LP infeasible on a full grid: {e}")))?;
    Ok(sol.objective)
}

/// Commitment-to-actions value by naive enumeration: all poolings and all
/// ordered grid-belief pairs across distinct actions, without the hull
/// shortcut used by the envelope solver. Binary-state only.
pub fn pairwise_join_value(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<f64> {
    if fam.dim() != 2 {
        return Err(Error::Unsupported(
            "the pairwise join check covers binary-state families only".into(),
        ));
    }
    let px = prior.second();
    let mut points = grid.binary_points();
    match points.binary_search_by(|a| a.partial_cmp(&px).unwrap()) {
        Ok(_) => {}
        Err(pos) => points.insert(pos, px),
    }
    let values: Vec<Vec<f64>> = (0..fam.num_actions())
        .map(|s| {
            points
                .iter()
                .map(|&x| fam.value(&Belief::binary(x).unwrap(), s))
                .collect()
        })
        .collect();
    let mut best = (0..fam.num_actions())
        .map(|s| fam.value(prior, s))
        .fold(f64::NEG_INFINITY, f64::max);
    let left_end = points.partition_point(|&x| x <= px);
    let right_start = points.partition_point(|&x| x < px);
    for sl in 0..fam.num_actions() {
        for sr in 0..fam.num_actions() {
            if sl == sr {
                continue;
            }
            for i in 0..left_end {
                for j in right_start..points.len() {
                    let (x1, x2) = (points[i], points[j]);
                    if x2 <= x1 {
                        continue;
                    }
                    let lambda = (x2 - px) / (x2 - x1);
                    let v = lambda * values[sl][i] + (1.0 - lambda) * values[sr][j];
                    if v > best {
                        best = v;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// A random binary-state game with integer payoffs in `[-5, 5]`, two sender
/// actions, two receiver actions, and an interior prior.
pub fn random_game<R: Rng>(rng: &mut R) -> SignalingGame {
    let mut tensor = || -> Vec<Vec<Vec<f64>>> {
        (0..2)
            .map(|_| {
                (0..2)
                    .map(|_| (0..2).map(|_| rng.gen_range(-5i32..=5) as f64).collect())
                    .collect()
            })
            .collect()
    };
    let v = tensor();
    let u = tensor();
    let p = rng.gen_range(0.1..=0.9);
    SignalingGame::new(
        vec!["w0".into(), "w1".into()],
        vec![1.0 - p, p],
        vec!["s0".into(), "s1".into()],
        vec!["a0".into(), "a1".into()],
        v,
        u,
    )
    .expect("random tensors are well-formed")
}
