//! Concave envelope of the pointwise best interim payoff: exact upper concave
//! hull (monotone chain) for two states, a linear-programming hull query for
//! more, plus concavity diagnostics on grid-sampled curves.

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};
use crate::lp;
use crate::solvers::{
    EnvelopeResult, JointAtom, JointBeliefActionDistribution, Regime, SolveDiagnostics, Witness,
};

/// Best interim payoff at a belief together with the set of belief-optimal
/// actions (argmax within `tol`).
pub fn pointwise_max(fam: &InterimPayoffFamily, belief: &Belief, tol: f64) -> (f64, Vec<usize>) {
    let values: Vec<f64> = (0..fam.num_actions()).map(|s| fam.value(belief, s)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let argmax = (0..values.len()).filter(|&s| values[s] >= best - tol).collect();
    (best, argmax)
}

/// Vertex indices of the upper concave hull of points sorted by strictly
/// increasing x-coordinate (monotone chain).
pub(crate) fn upper_hull_indices(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len().min(16));
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let a = pts[hull[hull.len() - 2]];
            let b = pts[hull[hull.len() - 1]];
            let c = pts[i];
            // Pop b when it lies on or below the segment a-c.
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Grid-sampled pointwise-max curve for a binary-state family, deduplicated
/// on the belief coordinate (the larger value wins, then the smaller action).
/// Returns `(mu, value, representative belief-optimal actions)` per point.
pub(crate) fn sampled_max_curve(
    fam: &InterimPayoffFamily,
    points: &[f64],
    tol: f64,
) -> Vec<(f64, f64, Vec<usize>)> {
    let mut curve: Vec<(f64, f64, Vec<usize>)> = Vec::with_capacity(points.len());
    for &x in points {
        let belief = Belief::binary(x).expect("grid coordinate");
        let (z, acts) = pointwise_max(fam, &belief, tol);
        match curve.last_mut() {
            Some(last) if last.0 == x => {
                if z > last.1 {
                    last.1 = z;
                    last.2 = acts;
                }
            }
            _ => curve.push((x, z, acts)),
        }
    }
    curve
}

/// Evaluates the upper concave hull of a sorted curve at `x`, returning the
/// value and the supporting curve indices with interpolation weights.
/// Queries a hair outside the span (floating-point dust) clamp to the
/// nearest endpoint.
pub(crate) fn hull_interpolate(
    curve: &[(f64, f64)],
    hull: &[usize],
    x: f64,
) -> (f64, Vec<(usize, f64)>) {
    let pos = hull.partition_point(|&i| curve[i].0 < x);
    if pos < hull.len() && curve[hull[pos]].0 == x {
        let i = hull[pos];
        return (curve[i].1, vec![(i, 1.0)]);
    }
    if pos == 0 {
        let i = hull[0];
        return (curve[i].1, vec![(i, 1.0)]);
    }
    if pos == hull.len() {
        let i = *hull.last().unwrap();
        return (curve[i].1, vec![(i, 1.0)]);
    }
    let left = hull[pos - 1];
    let right = hull[pos];
    let (x1, z1) = curve[left];
    let (x2, z2) = curve[right];
    let w_right = (x - x1) / (x2 - x1);
    let value = z1 + (z2 - z1) * w_right;
    (value, vec![(left, 1.0 - w_right), (right, w_right)])
}

/// Upper concave hull of a sorted curve evaluated at `x`.
pub(crate) fn upper_hull_query(curve: &[(f64, f64)], x: f64) -> (f64, Vec<(usize, f64)>) {
    let hull = upper_hull_indices(curve);
    hull_interpolate(curve, &hull, x)
}

/// Concave envelope `V^co` of the union of the interim payoff graphs at the
/// prior, with a joint belief/action witness supported on grid beliefs paired
/// with belief-optimal actions.
pub fn concave_envelope(
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
        concave_envelope_binary(fam, prior, grid)
    } else {
        concave_envelope_lp(fam, prior, grid)
    }
}

fn concave_envelope_binary(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    let mut points = grid.binary_points();
    let px = prior.second();
    match points.binary_search_by(|a| a.partial_cmp(&px).unwrap()) {
        Ok(_) => {}
        Err(pos) => points.insert(pos, px),
    }
    let curve = sampled_max_curve(fam, &points, grid.tol());
    let flat: Vec<(f64, f64)> = curve.iter().map(|(x, z, _)| (*x, *z)).collect();
    let hull = upper_hull_indices(&flat);
    let (value, supports) = hull_interpolate(&flat, &hull, px);

    let mut atoms = Vec::new();
    for (idx, w) in supports {
        let (x, _, ref acts) = curve[idx];
        if w > 1e-15 {
            atoms.push(JointAtom {
                belief: Belief::binary(x)?,
                action: acts[0],
                prob: w,
            });
        }
    }
    let witness = JointBeliefActionDistribution::new(atoms)?;
    debug_assert!(witness.is_bayes_plausible(prior, 1e-9));
    Ok(EnvelopeResult {
        value,
        regime: Regime::Co,
        witness: Witness::Joint(witness),
        grid: grid.clone(),
        prior: prior.clone(),
        diagnostics: SolveDiagnostics {
            grid_points: curve.len(),
            candidates: curve.len() as u64,
        },
    })
}

/// Hull query as a linear program over grid beliefs: maximize `Σ w_i z_i`
/// subject to `Σ w_i μ_i = prior`, `w ≥ 0`.
fn concave_envelope_lp(
    fam: &InterimPayoffFamily,
    prior: &Belief,
    grid: &GridConfig,
) -> Result<EnvelopeResult> {
    let dim = fam.dim();
    let mut beliefs = grid.beliefs(dim);
    if !beliefs.iter().any(|b| b.linf_distance(prior) == 0.0) {
        beliefs.push(prior.clone());
    }
    let data: Vec<(f64, Vec<usize>)> = beliefs
        .iter()
        .map(|b| pointwise_max(fam, b, grid.tol()))
        .collect();
    let c: Vec<f64> = data.iter().map(|(z, _)| *z).collect();
    // Σ w_i = 1 plus the first dim-1 coordinates; the last coordinate is
    // implied because beliefs sum to one.
    let mut a = vec![vec![1.0; beliefs.len()]];
    let mut b = vec![1.0];
    for w in 0..dim - 1 {
        a.push(beliefs.iter().map(|bel| bel.prob(w)).collect());
        b.push(prior.prob(w));
    }
    let sol = lp::solve_max(&c, &a, &b)
        .map_err(|e| Error::Internal(format!("hull query LP failed on a full grid: {e}")))?;
    let mut atoms = Vec::new();
    for (i, &w) in sol.x.iter().enumerate() {
        if w > 1e-12 {
            atoms.push(JointAtom {
                belief: beliefs[i].clone(),
                action: data[i].1[0],
                prob: w,
            });
        }
    }
    let witness = JointBeliefActionDistribution::new(atoms)?;
    Ok(EnvelopeResult {
        value: sol.objective,
        regime: Regime::Co,
        witness: Witness::Joint(witness),
        grid: grid.clone(),
        prior: prior.clone(),
        diagnostics: SolveDiagnostics {
            grid_points: beliefs.len(),
            candidates: beliefs.len() as u64,
        },
    })
}

#[derive(Debug, Clone)]
pub struct ConcavityViolation {
    /// Index of the interior grid point violating midpoint concavity.
    pub index: usize,
    pub x: f64,
    pub value: f64,
    pub chord: f64,
}

#[derive(Debug, Clone)]
pub struct ConcavityReport {
    pub concave: bool,
    pub violation: Option<ConcavityViolation>,
}

/// Midpoint-concavity check of a grid-sampled binary-state curve, sorted by
/// the belief coordinate. Reports the first interior point lying more than
/// `tol` below the chord of its neighbors.
pub fn is_concave_on_grid(curve: &[(f64, f64)], tol: f64) -> Result<ConcavityReport> {
    if curve.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "concavity check needs at least 3 points, got {}",
            curve.len()
        )));
    }
    for i in 1..curve.len() - 1 {
        let (x0, z0) = curve[i - 1];
        let (x1, z1) = curve[i];
        let (x2, z2) = curve[i + 1];
        if x2 <= x0 {
            return Err(Error::InvalidParams(
                "curve must be sorted by strictly increasing belief coordinate".into(),
            ));
        }
        let chord = z0 + (z2 - z0) * (x1 - x0) / (x2 - x0);
        if z1 < chord - tol {
            return Ok(ConcavityReport {
                concave: false,
                violation: Some(ConcavityViolation {
                    index: i,
                    x: x1,
                    value: z1,
                    chord,
                }),
            });
        }
    }
    Ok(ConcavityReport {
        concave: true,
        violation: None,
    })
}

/// Per-action concavity verdict of the interim payoff graphs on the grid.
pub fn each_interim_concave(fam: &InterimPayoffFamily, grid: &GridConfig) -> Result<Vec<bool>> {
    if fam.dim() != 2 {
        return each_interim_concave_multi(fam, grid);
    }
    let points = grid.binary_points();
    let mut out = Vec::with_capacity(fam.num_actions());
    for s in 0..fam.num_actions() {
        let curve: Vec<(f64, f64)> = points
            .iter()
            .map(|&x| (x, fam.value(&Belief::binary(x).unwrap(), s)))
            .collect();
        out.push(is_concave_on_grid(&curve, grid.tol())?.concave);
    }
    Ok(out)
}

/// Midpoint test over grid-belief pairs whose midpoint is itself on the grid.
fn each_interim_concave_multi(fam: &InterimPayoffFamily, grid: &GridConfig) -> Result<Vec<bool>> {
    let beliefs = grid.beliefs(fam.dim());
    let tol = grid.tol();
    let mut out = Vec::with_capacity(fam.num_actions());
    for s in 0..fam.num_actions() {
        let values: Vec<f64> = beliefs.iter().map(|b| fam.value(b, s)).collect();
        let mut concave = true;
        'outer: for i in 0..beliefs.len() {
            for j in i + 1..beliefs.len() {
                let mid_probs: Vec<f64> = beliefs[i]
                    .probs()
                    .iter()
                    .zip(beliefs[j].probs())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                let mid = Belief::new(mid_probs)?;
                if let Some(k) = beliefs.iter().position(|b| b.linf_distance(&mid) <= 1e-12) {
                    if values[k] < 0.5 * (values[i] + values[j]) - tol {
                        concave = false;
                        break 'outer;
                    }
                }
            }
        }
        out.push(concave);
    }
    Ok(out)
}
