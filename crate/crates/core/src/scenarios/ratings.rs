//! Rating design with a preference for nominal ratings: sophisticated
//! investors best-respond to the rating policy, naive investors read ratings
//! literally, and exaggeration is costly. Reduced to a two-action interim
//! payoff family over the belief that the asset is good.

use serde::Serialize;

use crate::belief::Belief;
use crate::error::{Error, Result};
use crate::family::{GridConfig, InterimPayoffFamily};
use crate::scenarios::Scenario;
use crate::solvers::join_envelope;

const ROOT_TOL: f64 = 1e-13;

/// Distribution of investor outside options on [0, 1]; `cdf(mu)` is the mass
/// of sophisticated investors who invest at posterior `mu`.
#[derive(Debug, Clone, Serialize)]
pub enum OutsideOption {
    /// `F(x) = 2x - x^2`, strictly concave.
    QuadraticConcave,
    /// `F(x) = x^p` for `p > 0`: concave below 1, convex above.
    Power { exponent: f64 },
    /// Piecewise-linear interpolation of tabulated values; the derivative is
    /// a central difference with step 1e-6.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

impl OutsideOption {
    pub fn validate(&self) -> Result<()> {
        match self {
            OutsideOption::QuadraticConcave => Ok(()),
            OutsideOption::Power { exponent } => {
                if *exponent > 0.0 && exponent.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!(
                        "power exponent must be positive, got {exponent}"
                    )))
                }
            }
            OutsideOption::Tabulated { xs, ys } => {
                if xs.len() != ys.len() || xs.len() < 2 {
                    return Err(Error::InvalidParams(
                        "tabulated distribution needs matching xs/ys with at least 2 points".into(),
                    ));
                }
                if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
                    return Err(Error::InvalidParams(
                        "tabulated support must span [0, 1]".into(),
                    ));
                }
                if ys[0] != 0.0 || (*ys.last().unwrap() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParams(
                        "tabulated values must run from F(0)=0 to F(1)=1".into(),
                    ));
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) || ys.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidParams(
                        "tabulated distribution must be increasing in x and nondecreasing in F"
                            .into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            OutsideOption::QuadraticConcave => 2.0 * x - x * x,
            OutsideOption::Power { exponent } => x.powf(*exponent),
            OutsideOption::Tabulated { xs, ys } => {
                let i = xs.partition_point(|&t| t <= x).min(xs.len() - 1).max(1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                let (y0, y1) = (ys[i - 1], ys[i]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Density `F'`, analytic for the parametric families.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            OutsideOption::QuadraticConcave => 2.0 - 2.0 * x.clamp(0.0, 1.0),
            OutsideOption::Power { exponent } => {
                let x = x.clamp(0.0, 1.0);
                if *exponent == 1.0 {
                    1.0
                } else {
                    exponent * x.powf(exponent - 1.0)
                }
            }
            OutsideOption::Tabulated { .. } => {
                let h = 1e-6;
                let lo = (x - h).max(0.0);
                let hi = (x + h).min(1.0);
                (self.cdf(hi) - self.cdf(lo)) / (hi - lo)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatingsParams {
    pub outside_option: OutsideOption,
    /// Fraction of naive investors, in (0, 1).
    pub naive_fraction: f64,
    /// Expected sanction for rating a bad asset high, positive.
    pub exaggeration_cost: f64,
}

impl RatingsParams {
    pub fn new(
        outside_option: OutsideOption,
        naive_fraction: f64,
        exaggeration_cost: f64,
    ) -> Result<Self> {
        outside_option.validate()?;
        if !(0.0 < naive_fraction && naive_fraction < 1.0) {
            return Err(Error::InvalidParams(format!(
                "naive fraction must lie in (0, 1), got {naive_fraction}"
            )));
        }
        if !(exaggeration_cost > 0.0) || !exaggeration_cost.is_finite() {
            return Err(Error::InvalidParams(format!(
                "exaggeration cost must be positive, got {exaggeration_cost}"
            )));
        }
        Ok(Self {
            outside_option,
            naive_fraction,
            exaggeration_cost,
        })
    }

    /// Naive-investment boost `b = nu / (1 - nu)`.
    pub fn boost(&self) -> f64 {
        self.naive_fraction / (1.0 - self.naive_fraction)
    }

    /// Normalized exaggeration cost `c = k / (1 - nu)`.
    pub fn unit_cost(&self) -> f64 {
        self.exaggeration_cost / (1.0 - self.naive_fraction)
    }
}

/// Interim payoffs of the rating problem over Pr(good), actions [L, H]:
/// the low rating collects sophisticated investment `F(mu)`, the high rating
/// adds the naive boost net of the expected exaggeration cost.
pub fn build_ratings(p: &RatingsParams) -> InterimPayoffFamily {
    let f = p.outside_option.clone();
    let b = p.boost();
    let c = p.unit_cost();
    InterimPayoffFamily::closed_form(vec!["L".into(), "H".into()], 2, move |belief, s| {
        let mu = belief.second();
        match s {
            0 => f.cdf(mu),
            _ => f.cdf(mu) + b - c * (1.0 - mu),
        }
    })
}

pub fn ratings_scenario(p: &RatingsParams) -> Scenario {
    let family = build_ratings(p);
    let b = p.boost();
    let c = p.unit_cost();
    let mut knots = Vec::new();
    if b < c {
        // The graphs cross where the naive boost nets out: mu = 1 - b/c.
        knots.push(Belief::binary(1.0 - b / c).expect("crossing in range"));
    }
    Scenario {
        name: "ratings".into(),
        game: None,
        family,
        knots,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TangencyParameters {
    pub boost: f64,
    pub unit_cost: f64,
    pub naive_fraction: f64,
    pub exaggeration_cost: f64,
}

/// Parameters `(b, c)` for which the common tangent of the two rating graphs
/// touches them exactly at `(mu1, mu2)`, together with the primitive
/// `(nu, k)` pair that generates them.
pub fn tangency_parameters(f: &OutsideOption, mu1: f64, mu2: f64) -> Result<TangencyParameters> {
    if !(0.0 < mu1 && mu1 < mu2 && mu2 < 1.0) {
        return Err(Error::InvalidParams(format!(
            "tangency points must satisfy 0 < mu1 < mu2 < 1, got ({mu1}, {mu2})"
        )));
    }
    let c = f.pdf(mu1) - f.pdf(mu2);
    let b = (f.pdf(mu1) * (1.0 - mu1) + f.cdf(mu1)) - (f.pdf(mu2) * (1.0 - mu2) + f.cdf(mu2));
    if c <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "distribution is not strictly concave on ({mu1}, {mu2}): derived (b, c) = ({b}, {c})"
        )));
    }
    Ok(TangencyParameters {
        boost: b,
        unit_cost: c,
        naive_fraction: b / (1.0 + b),
        exaggeration_cost: c / (1.0 + b),
    })
}

/// Inverts a strictly decreasing density: the `x` with `pdf(x) = target`,
/// clamped into [0, 1].
fn invert_pdf(f: &OutsideOption, target: f64) -> f64 {
    if target >= f.pdf(0.0) {
        return 0.0;
    }
    if target <= f.pdf(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if f.pdf(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bisect(mut lo: f64, mut hi: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    // Assumes g(lo) and g(hi) have opposite signs; keeps the sign of g(lo).
    let sign = g(lo).signum();
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Thresholds `(mu_low, mu_high)` of the optimal rating policy for a strictly
/// concave distribution with `c > b > 0`: the line tangent to the low-rating
/// graph at `mu_low` and to the high-rating graph at `mu_high`, clamping to
/// the boundary (`mu_low = 0` or `mu_high = 1`) when the interior tangency
/// system has no root.
pub fn tangency_thresholds(f: &OutsideOption, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(c > b && b > 0.0) {
        return Err(Error::InvalidParams(format!(
            "thresholds require c > b > 0, got b = {b}, c = {c}"
        )));
    }
    let low = |mu: f64| f.cdf(mu);
    let high = |mu: f64| f.cdf(mu) + b - c * (1.0 - mu);

    let mut candidates: Vec<(f64, f64)> = Vec::new();

    // Interior system: matched slopes F'(mu1) = F'(mu2) + c and the tangent
    // line meeting both graphs. Solved on the reduced variable mu1, along
    // which the residual is strictly decreasing.
    let eps = 1e-9;
    if f.pdf(0.0) - f.pdf(1.0) > c {
        let mu1_max = invert_pdf(f, f.pdf(1.0) + c);
        let residual = |mu1: f64| {
            let mu2 = invert_pdf(f, f.pdf(mu1) - c);
            f.pdf(mu1) * (mu2 - mu1) - (high(mu2) - low(mu1))
        };
        let r_lo = residual(eps);
        let r_hi = residual(mu1_max - eps);
        if r_lo > 0.0 && r_hi < 0.0 {
            let mu1 = bisect(eps, mu1_max - eps, residual);
            let mu2 = invert_pdf(f, f.pdf(mu1) - c);
            candidates.push((mu1, mu2));
        }
    }

    // mu_low = 0: line from (0, F(0)) tangent to the high-rating graph.
    {
        let pivot = |mu2: f64| (f.pdf(mu2) + c) * mu2 - (high(mu2) - low(0.0));
        let t0 = pivot(eps);
        let t1 = pivot(1.0);
        if t0 > 0.0 && t1 < 0.0 {
            candidates.push((0.0, bisect(eps, 1.0, pivot)));
        } else {
            candidates.push((0.0, 1.0));
        }
    }

    // mu_high = 1: line tangent to the low-rating graph through (1, F(1)+b).
    {
        let pivot = |mu1: f64| f.pdf(mu1) * (1.0 - mu1) - (high(1.0) - low(mu1));
        let s0 = pivot(0.0);
        let s1 = pivot(1.0 - eps);
        if s0 > 0.0 && s1 < 0.0 {
            candidates.push((bisect(0.0, 1.0 - eps, pivot), 1.0));
        }
    }

    // Accept the first configuration whose supporting line dominates both
    // graphs (the defining property of the upper envelope segment).
    for (mu1, mu2) in candidates {
        if mu2 - mu1 < 1e-9 {
            continue;
        }
        let slope = (high(mu2) - low(mu1)) / (mu2 - mu1);
        let line = |mu: f64| low(mu1) + slope * (mu - mu1);
        let dominates = (0..=1000).all(|i| {
            let mu = i as f64 / 1000.0;
            line(mu) >= low(mu) - 1e-8 && line(mu) >= high(mu) - 1e-8
        });
        if dominates {
            return Ok((mu1, mu2));
        }
    }
    Err(Error::Numerical(
        "no tangency configuration supports the payoff graphs".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum D1Regime {
    Separating,
    SemiSeparating,
    PoolingH,
}

/// The unique equilibrium of the uncommitted rating game under the D1
/// refinement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct D1Result {
    pub regime: D1Regime,
    pub mu_l: f64,
    pub mu_h: f64,
    /// Probability that the bad asset receives the high rating.
    pub high_rating_bad_prob: f64,
    /// Indifference residual `|c - F(mu_h) - b|` in the semi-separating
    /// regime; zero elsewhere.
    pub residual: f64,
}

/// D1 equilibrium taxonomy: separating when `b < c - 1`, semi-separating when
/// `c - 1 < b < c - F(prior)` (with `c - F(mu_h) = b`), pooling on the high
/// rating otherwise. Boundary ties resolve toward the more-pooling regime.
pub fn d1_equilibrium(
    f: &OutsideOption,
    prior: f64,
    naive_fraction: f64,
    exaggeration_cost: f64,
) -> Result<D1Result> {
    f.validate()?;
    if !(0.0 < prior && prior < 1.0) {
        return Err(Error::InvalidParams(format!(
            "prior must lie in (0, 1), got {prior}"
        )));
    }
    if !(0.0 < naive_fraction && naive_fraction < 1.0) || !(exaggeration_cost > 0.0) {
        return Err(Error::InvalidParams(
            "need naive fraction in (0, 1) and a positive exaggeration cost".into(),
        ));
    }
    let b = naive_fraction / (1.0 - naive_fraction);
    let c = exaggeration_cost / (1.0 - naive_fraction);

    if b >= c - f.cdf(prior) {
        return Ok(D1Result {
            regime: D1Regime::PoolingH,
            mu_l: 0.0,
            mu_h: prior,
            high_rating_bad_prob: 1.0,
            residual: 0.0,
        });
    }
    if b < c - 1.0 {
        return Ok(D1Result {
            regime: D1Regime::Separating,
            mu_l: 0.0,
            mu_h: 1.0,
            high_rating_bad_prob: 0.0,
            residual: 0.0,
        });
    }
    // Semi-separating: the bad type mixes until the exaggeration gain nets
    // out, F(mu_h) = c - b.
    let target = c - b;
    let mu_h = bisect(prior, 1.0, |mu| f.cdf(mu) - target);
    let residual = (c - f.cdf(mu_h) - b).abs();
    let q = prior * (1.0 - mu_h) / (mu_h * (1.0 - prior));
    Ok(D1Result {
        regime: D1Regime::SemiSeparating,
        mu_l: 0.0,
        mu_h,
        high_rating_bad_prob: q,
        residual,
    })
}

/// The naive fraction `nu* = k (1 - prior)` at which the two pooling payoffs
/// coincide at the prior.
pub fn naive_informativeness_threshold(prior: f64, exaggeration_cost: f64) -> Result<f64> {
    if !(0.0 < prior && prior < 1.0) {
        return Err(Error::InvalidParams(format!(
            "prior must lie in (0, 1), got {prior}"
        )));
    }
    if !(0.0 < exaggeration_cost && exaggeration_cost < 1.0) {
        return Err(Error::InvalidParams(format!(
            "exaggeration cost must lie in (0, 1), got {exaggeration_cost}"
        )));
    }
    Ok(exaggeration_cost * (1.0 - prior))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrivateCommunication {
    /// Chord value interpolating the high-rating graph's endpoints
    /// `(0, b - c)` and `(1, 1 + b)`.
    pub value: f64,
    /// Whether the chord is the extended-commitment optimum here: the
    /// distribution is convex on the grid and the chord clears the
    /// commitment-only value at this prior.
    pub applicable: bool,
}

/// Value of always rating high while revealing quality through private
/// messages: sophisticated investors learn the state, naive investors always
/// buy.
pub fn private_communication_value(p: &RatingsParams, prior: f64) -> Result<PrivateCommunication> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidParams(format!(
            "prior must lie in [0, 1], got {prior}"
        )));
    }
    let b = p.boost();
    let c = p.unit_cost();
    let value = (1.0 - prior) * (b - c) + prior * (1.0 + b);

    let f = &p.outside_option;
    let convex = (1..=999).all(|i| {
        let x = i as f64 / 1000.0;
        f.cdf(x) <= 0.5 * (f.cdf(x - 1e-3) + f.cdf(x + 1e-3)) + 1e-9
    });
    let applicable = if convex {
        let scenario = ratings_scenario(p);
        let grid = GridConfig::with_resolution(1000)
            .expect("static resolution")
            .with_knots(&scenario.knots);
        let jo = join_envelope(&scenario.family, &Belief::binary(prior)?, &grid)?;
        value >= jo.value - 1e-9
    } else {
        false
    };
    Ok(PrivateCommunication { value, applicable })
}
