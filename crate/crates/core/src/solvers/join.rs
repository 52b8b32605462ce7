//! Join envelope: the largest payoff attainable by committing to actions
//! only. Feasible payoffs are convex combinations that take at most one point
//! from each action's interim payoff graph, with posteriors averaging to the
//! prior. For binary states an optimum needs at most two actions with
//! positive weight, so the search enumerates poolings and action pairs; the
//! pair search walks the upper concave hulls of the two restricted graphs.

use rayon::prelude::*;

use crate::belief::{Belief, BeliefSystem, BeliefSystemEntry};
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};
use crate::lp;
use crate::solvers::concave::upper_hull_indices;
use crate::solvers::{EnvelopeResult, Regime, SolveDiagnostics, Witness};

const GENERIC_JOIN_BUDGET: u128 = 20_000_000;

/// Join envelope `V^jo` at a prior, with a maximizing belief system.
pub fn join_envelope(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    if prior.dim() != fam.dim() {
        return Err(Error::InvalidBelief(format!(
            "prior has dimension {}, family has {}",
            prior.dim(),
            fam.dim()
        )));
    }
    if fam.dim() == 2 {
        join_envelope_binary(fam, prior, grid)
    } else {
        join_envelope_generic(fam, prior, grid)
    }
}

/// Join envelope at each prior. Priors are evaluated independently (and in
/// parallel), so results are identical to sequential evaluation.
pub fn join_envelope_sweep(
    fam: &InterimPayoffFamily,
    priors: &[Belief],
    grid: &GridConfig,
) -> Result<Vec<(Belief, f64)>> {
    priors
        .par_iter()
        .map(|p| join_envelope(fam, p, grid).map(|r| (p.clone(), r.value)))
        .collect()
}

/// A candidate maximizer in the binary search space.
enum Candidate {
    Pool { action: usize },
    Pair {
        left_action: usize,
        left_x: f64,
        right_action: usize,
        right_x: f64,
        left_weight: f64,
    },
}

fn join_envelope_binary(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    let px = prior.second();
    let mut points = grid.binary_points();
    match points.binary_search_by(|a| a.partial_cmp(&px).unwrap()) {
        Ok(_) => {}
        Err(pos) => points.insert(pos, px),
    }
    let n_actions = fam.num_actions();
    let values: Vec<Vec<f64>> = (0..n_actions)
        .map(|s| {
            points
                .iter()
                .map(|&x| fam.value(&Belief::binary(x).unwrap(), s))
                .collect()
        })
        .collect();

    // Index ranges of grid points weakly left and weakly right of the prior.
    let left_end = points.partition_point(|&x| x <= px); // exclusive
    let right_start = points.partition_point(|&x| x < px);

    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<Candidate> = None;
    let mut candidates: u64 = 0;

    // Pooling on a single action at the prior itself.
    for s in 0..n_actions {
        let v = fam.value(prior, s);
        candidates += 1;
        if v > best_value {
            best_value = v;
            best = Some(Candidate::Pool { action: s });
        }
    }

    // Ordered action pairs: one grid belief weakly left of the prior on the
    // first graph, one weakly right on the second. Only upper-hull vertices
    // of each restricted graph can carry an optimal pair.
    for left_action in 0..n_actions {
        let left_pts: Vec<(f64, f64)> = (0..left_end)
            .map(|i| (points[i], values[left_action][i]))
            .collect();
        if left_pts.is_empty() {
            continue;
        }
        let hull_left = upper_hull_indices(&left_pts);
        for right_action in 0..n_actions {
            if right_action == left_action {
                continue;
            }
            let right_pts: Vec<(f64, f64)> = (right_start..points.len())
                .map(|i| (points[i], values[right_action][i]))
                .collect();
            if right_pts.is_empty() {
                continue;
            }
            let hull_right = upper_hull_indices(&right_pts);
            for &li in &hull_left {
                let (x1, a) = left_pts[li];
                // Drop right vertices at the same coordinate (only possible
                // when both sit exactly at the prior; pooling covers that).
                let start = hull_right.partition_point(|&rj| right_pts[rj].0 <= x1);
                if start >= hull_right.len() {
                    continue;
                }
                let tangent = tangent_from_left(&right_pts, &hull_right[start..], x1, a);
                let (x2, b) = right_pts[tangent];
                candidates += 1;
                let lambda = (x2 - px) / (x2 - x1);
                let v = lambda * a + (1.0 - lambda) * b;
                if v > best_value {
                    best_value = v;
                    best = Some(Candidate::Pair {
                        left_action,
                        left_x: x1,
                        right_action,
                        right_x: x2,
                        left_weight: lambda,
                    });
                }
            }
        }
    }

    let best = best.ok_or_else(|| Error::Internal("empty join search space".into()))?;
    let witness = candidate_witness(&best, prior, n_actions)?;
    Ok(EnvelopeResult {
        value: best_value,
        regime: Regime::Jo,
        witness: Witness::System(witness),
        grid: grid.clone(),
        prior: prior.clone(),
        diagnostics: SolveDiagnostics {
            grid_points: points.len(),
            candidates,
        },
    })
}

/// Index (into `pts`) of the hull vertex maximizing the slope from an
/// external left point `(xp, a)`. `hull` lists vertex indices of the upper
/// concave hull of `pts` in increasing x, all with x strictly above `xp`.
/// The slope along a concave hull first rises then falls, so the leftmost
/// maximizer is found by binary search.
fn tangent_from_left(pts: &[(f64, f64)], hull: &[usize], xp: f64, a: f64) -> usize {
    let improves = |t: usize| -> bool {
        let (x0, b0) = pts[hull[t]];
        let (x1, b1) = pts[hull[t + 1]];
        (b1 - b0) * (x0 - xp) > (b0 - a) * (x1 - x0)
    };
    let mut lo = 0usize;
    let mut hi = hull.len() - 1; // answer in [lo, hi]
    while lo < hi {
        let mid = (lo + hi) / 2;
        if improves(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    hull[lo]
}

fn candidate_witness(c: &Candidate, prior: &Belief, n_actions: usize) -> Result<BeliefSystem> {
    let mut entries: Vec<BeliefSystemEntry> = (0..n_actions)
        .map(|_| BeliefSystemEntry {
            belief: prior.clone(),
            weight: 0.0,
            unreached: true,
        })
        .collect();
    match *c {
        Candidate::Pool { action } => {
            entries[action] = BeliefSystemEntry {
                belief: prior.clone(),
                weight: 1.0,
                unreached: false,
            };
        }
        Candidate::Pair {
            left_action,
            left_x,
            right_action,
            right_x,
            left_weight,
        } => {
            entries[left_action] = BeliefSystemEntry {
                belief: Belief::binary(left_x)?,
                weight: left_weight,
                unreached: false,
            };
            entries[right_action] = BeliefSystemEntry {
                belief: Belief::binary(right_x)?,
                weight: 1.0 - left_weight,
                unreached: false,
            };
        }
    }
    BeliefSystem::from_entries(entries)
}

/// Literal enumeration for three or more states: action subsets up to the
/// Caratheodory cap `min(|S|, |Ω|+1)`, grid-belief assignments per action in
/// the subset, and an exact linear weight problem per assignment.
fn join_envelope_generic(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    let dim = fam.dim();
    let n_actions = fam.num_actions();
    let mut beliefs = grid.beliefs(dim);
    if !beliefs.iter().any(|b| b.linf_distance(prior) == 0.0) {
        beliefs.push(prior.clone());
    }
    let n_beliefs = beliefs.len() as u128;
    let cap = n_actions.min(dim + 1);

    let mut required: u128 = n_actions as u128;
    for k in 2..=cap {
        required = required.saturating_add(binomial(n_actions, k).saturating_mul(n_beliefs.saturating_pow(k as u32)));
    }
    if required > GENERIC_JOIN_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            cap: GENERIC_JOIN_BUDGET,
        });
    }

    let values: Vec<Vec<f64>> = (0..n_actions)
        .map(|s| beliefs.iter().map(|b| fam.value(b, s)).collect())
        .collect();

    let mut best_value = f64::NEG_INFINITY;
    let mut best_assignment: Option<(Vec<usize>, Vec<usize>, Vec<f64>)> = None;
    let mut candidates: u64 = 0;

    // Pooling candidates: the prior itself on a single graph.
    let prior_idx = beliefs
        .iter()
        .position(|b| b.linf_distance(prior) == 0.0)
        .expect("prior inserted above");
    for s in 0..n_actions {
        candidates += 1;
        if values[s][prior_idx] > best_value {
            best_value = values[s][prior_idx];
            best_assignment = Some((vec![s], vec![prior_idx], vec![1.0]));
        }
    }

    let mut subset = Vec::new();
    let mut assignment = Vec::new();
    for k in 2..=cap {
        enumerate_subsets(n_actions, k, 0, &mut subset, &mut |subset| {
            enumerate_assignments(beliefs.len(), subset.len(), &mut assignment, &mut |asg| {
                candidates += 1;
                if let Some(weights) = solve_weights(&beliefs, values.as_slice(), subset, asg, prior)
                {
                    let v: f64 = weights
                        .iter()
                        .zip(subset.iter().zip(asg))
                        .map(|(w, (&s, &bi))| w * values[s][bi])
                        .sum();
                    if v > best_value {
                        best_value = v;
                        best_assignment = Some((subset.to_vec(), asg.to_vec(), weights));
                    }
                }
            });
        });
    }

    let (subset, asg, weights) = best_assignment
        .ok_or_else(|| Error::Internal("empty generic join search space".into()))?;
    let mut entries: Vec<BeliefSystemEntry> = (0..n_actions)
        .map(|_| BeliefSystemEntry {
            belief: prior.clone(),
            weight: 0.0,
            unreached: true,
        })
        .collect();
    for ((&s, &bi), &w) in subset.iter().zip(&asg).zip(&weights) {
        entries[s] = BeliefSystemEntry {
            belief: beliefs[bi].clone(),
            weight: w,
            unreached: false,
        };
    }
    let witness = BeliefSystem::from_entries(entries)?;
    Ok(EnvelopeResult {
        value: best_value,
        regime: Regime::Jo,
        witness: Witness::System(witness),
        grid: grid.clone(),
        prior: prior.clone(),
        diagnostics: SolveDiagnostics {
            grid_points: beliefs.len(),
            candidates,
        },
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if current.len() == k {
        visit(current);
        return;
    }
    for i in start..n {
        current.push(i);
        enumerate_subsets(n, k, i + 1, current, visit);
        current.pop();
    }
}

fn enumerate_assignments(
    n_beliefs: usize,
    k: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if current.len() == k {
        visit(current);
        return;
    }
    for i in 0..n_beliefs {
        current.push(i);
        enumerate_assignments(n_beliefs, k, current, visit);
        current.pop();
    }
}

/// Maximizing weights for a fixed belief assignment: `max Σ λ_i v_i` subject
/// to `Σ λ_i μ_i = prior`, `λ ≥ 0`. Returns `None` when infeasible.
fn solve_weights(
    beliefs: &[Belief],
    values: &[Vec<f64>],
    subset: &[usize],
    assignment: &[usize],
    prior: &Belief,
) -> Option<Vec<f64>> {
    let dim = prior.dim();
    let k = subset.len();
    let c: Vec<f64> = subset
        .iter()
        .zip(assignment)
        .map(|(&s, &bi)| values[s][bi])
        .collect();
    let mut a = vec![vec![1.0; k]];
    let mut b = vec![1.0];
    for w in 0..dim - 1 {
        a.push(assignment.iter().map(|&bi| beliefs[bi].prob(w)).collect());
        b.push(prior.prob(w));
    }
    lp::solve_max(&c, &a, &b).ok().map(|sol| sol.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The adjudication step-payoff family in closed form.
    fn adjudication_family(theta_a: f64, theta_d: f64, l: f64) -> InterimPayoffFamily {
        InterimPayoffFamily::closed_form(vec!["a".into(), "d".into()], 2, move |b, s| {
            let mu = b.second();
            match s {
                0 => {
                    if mu > theta_a {
                        -l
                    } else {
                        0.0
                    }
                }
                _ => {
                    if mu < theta_d {
                        1.0 - l
                    } else {
                        1.0
                    }
                }
            }
        })
    }

    fn grid_with_knots(n: usize, knots: &[f64]) -> GridConfig {
        let knots = knots
            .iter()
            .map(|&x| Belief::binary(x).unwrap())
            .collect();
        GridConfig::new(n, knots, 1e-9).unwrap()
    }

    #[test]
    fn adjudication_interior_prior() {
        let fam = adjudication_family(0.25, 0.5, 2.0 / 3.0);
        let grid = grid_with_knots(1000, &[0.25, 0.5]);
        let res = join_envelope(&fam, &Belief::binary(0.3).unwrap(), &grid).unwrap();
        assert!((res.value - 0.6).abs() < 1e-9);
        let Witness::System(bs) = &res.witness else {
            panic!("expected belief-system witness")
        };
        // Spread onto {mu_a = 0 w.p. 0.4, mu_d = theta_d w.p. 0.6}.
        assert!((bs.weight(0) - 0.4).abs() < 1e-9);
        assert!((bs.belief(0).second() - 0.0).abs() < 1e-12);
        assert!((bs.weight(1) - 0.6).abs() < 1e-9);
        assert!((bs.belief(1).second() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn adjudication_low_prior_pools() {
        let fam = adjudication_family(0.25, 0.5, 2.0 / 3.0);
        let grid = grid_with_knots(1000, &[0.25, 0.5]);
        let res = join_envelope(&fam, &Belief::binary(0.1).unwrap(), &grid).unwrap();
        assert!((res.value - 1.0 / 3.0).abs() < 1e-9);
        let Witness::System(bs) = &res.witness else { unreachable!() };
        assert!((bs.weight(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beer_quiche_branches() {
        let (k, c) = (0.4, 1.15);
        let fam = InterimPayoffFamily::closed_form(vec!["B".into(), "Q".into()], 2, move |b, s| {
            let mu = b.second();
            match s {
                0 => mu - c * (1.0 - mu) * if mu < k { 1.0 } else { 0.0 },
                _ => (1.0 - mu) * (1.0 - c * if mu < k { 1.0 } else { 0.0 }),
            }
        });
        let mu_tilde = k / (2.0 * (1.0 - k));
        let grid = grid_with_knots(1000, &[k, mu_tilde]);

        // Above the inversion threshold: the inverted pairing {B at 0, Q at k}.
        let res = join_envelope(&fam, &Belief::binary(0.35).unwrap(), &grid).unwrap();
        assert!((res.value - 0.38125).abs() < 1e-9);
        let Witness::System(bs) = &res.witness else { unreachable!() };
        assert!((bs.belief(0).second() - 0.0).abs() < 1e-12);
        assert!((bs.weight(0) - 0.125).abs() < 1e-9);
        assert!((bs.belief(1).second() - 0.4).abs() < 1e-12);
        assert!((bs.weight(1) - 0.875).abs() < 1e-9);

        // Below it: {Q at 0, B at k}.
        let res = join_envelope(&fam, &Belief::binary(0.2).unwrap(), &grid).unwrap();
        assert!((res.value - 0.125).abs() < 1e-9);
        let Witness::System(bs) = &res.witness else { unreachable!() };
        assert!((bs.belief(1).second() - 0.0).abs() < 1e-12);
        assert!((bs.belief(0).second() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn single_action_family_is_the_graph() {
        let fam = InterimPayoffFamily::closed_form(vec!["s".into()], 2, |b, _| {
            let mu = b.second();
            mu * mu
        });
        let grid = GridConfig::with_resolution(50).unwrap();
        for &p in &[0.0, 0.31, 0.5, 1.0] {
            let res = join_envelope(&fam, &Belief::binary(p).unwrap(), &grid).unwrap();
            assert!((res.value - p * p).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_family_is_flat() {
        let fam = InterimPayoffFamily::closed_form(vec!["x".into(), "y".into()], 2, |_, _| 0.7);
        let grid = GridConfig::with_resolution(10).unwrap();
        let sweep = join_envelope_sweep(
            &fam,
            &[
                Belief::binary(0.1).unwrap(),
                Belief::binary(0.6).unwrap(),
            ],
            &grid,
        )
        .unwrap();
        for (_, v) in sweep {
            assert!((v - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_matches_pointwise_solves() {
        let fam = adjudication_family(0.25, 0.5, 2.0 / 3.0);
        let grid = grid_with_knots(200, &[0.25, 0.5]);
        let priors: Vec<Belief> = (0..=10)
            .map(|i| Belief::binary(i as f64 / 10.0).unwrap())
            .collect();
        let sweep = join_envelope_sweep(&fam, &priors, &grid).unwrap();
        for (p, v) in sweep {
            let direct = join_envelope(&fam, &p, &grid).unwrap().value;
            assert_eq!(v, direct);
        }
    }

    #[test]
    fn generic_path_enforces_its_budget() {
        let fam = InterimPayoffFamily::closed_form(
            (0..6).map(|i| format!("s{i}")).collect(),
            3,
            |_, _| 0.0,
        );
        let grid = GridConfig::with_resolution(30).unwrap();
        let prior = Belief::new(vec![0.3, 0.3, 0.4]).unwrap();
        let err = join_envelope(&fam, &prior, &grid).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn generic_path_agrees_with_binary_path_on_embedded_game() {
        // A 3-state family that ignores the third state direction, queried at
        // a prior with a small third coordinate, sanity-checked against the
        // sandwich bounds.
        let fam3 = InterimPayoffFamily::closed_form(vec!["a".into(), "d".into()], 3, |b, s| {
            let mu = b.prob(1);
            match s {
                0 => {
                    if mu > 0.25 {
                        -2.0 / 3.0
                    } else {
                        0.0
                    }
                }
                _ => {
                    if mu < 0.5 {
                        1.0 / 3.0
                    } else {
                        1.0
                    }
                }
            }
        });
        let grid = GridConfig::with_resolution(8).unwrap();
        let prior = Belief::new(vec![0.45, 0.3, 0.25]).unwrap();
        let res = join_envelope(&fam3, &prior, &grid).unwrap();
        let pool_best = (0..2).map(|s| fam3.value(&prior, s)).fold(f64::NEG_INFINITY, f64::max);
        assert!(res.value >= pool_best - 1e-12);
        let Witness::System(bs) = &res.witness else { unreachable!() };
        let re_eval: f64 = bs
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight > 0.0)
            .map(|(s, e)| e.weight * fam3.value(&e.belief, s))
            .sum();
        assert!((re_eval - res.value).abs() < 1e-9);
        // Bayes plausibility of the witness.
        let mean = bs.mean_belief();
        assert!(mean.linf_distance(&prior) < 1e-8);
    }
}
