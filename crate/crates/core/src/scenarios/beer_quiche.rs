//! Beer-quiche with sender commitment. The tough type intrinsically prefers
//! beer, the wimpy type quiche; fighting costs the wimpy type `c > 1` and the
//! receiver fights when the probability of a tough sender is below `k`.

use serde::Serialize;

use crate::belief::{Belief, BeliefSystem};
use crate::error::{Error, Result};
use crate::family::InterimPayoffFamily;
use crate::game::SignalingGame;
use crate::scenarios::Scenario;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BeerQuicheParams {
    /// Fight cost `c > 1` borne by the wimpy type.
    pub fight_cost: f64,
    /// Receiver threshold `k` in (0, 1/2): fight iff Pr(tough) < k.
    pub fight_threshold: f64,
}

impl BeerQuicheParams {
    pub fn new(fight_cost: f64, fight_threshold: f64) -> Result<Self> {
        if !(fight_cost > 1.0) || !fight_cost.is_finite() {
            return Err(Error::InvalidParams(format!(
                "fight cost must exceed 1, got {fight_cost}"
            )));
        }
        if !(0.0 < fight_threshold && fight_threshold < 0.5) {
            return Err(Error::InvalidParams(format!(
                "fight threshold must lie in (0, 1/2), got {fight_threshold}"
            )));
        }
        Ok(Self {
            fight_cost,
            fight_threshold,
        })
    }

    /// The prior below which the non-inverted pairing {Q at 0, B at k} beats
    /// the inverted pairing {B at 0, Q at k}: `k / (2 (1 - k))`.
    pub fn inversion_threshold(&self) -> f64 {
        self.fight_threshold / (2.0 * (1.0 - self.fight_threshold))
    }
}

/// Builds the game with states [wimpy, tough] (belief coordinate Pr(tough)),
/// sender actions [B, Q], receiver actions [F, A].
pub fn build_beer_quiche(p: &BeerQuicheParams) -> SignalingGame {
    let c = p.fight_cost;
    let k = p.fight_threshold;
    SignalingGame::new(
        vec!["wimpy".into(), "tough".into()],
        vec![0.5, 0.5],
        vec!["B".into(), "Q".into()],
        vec!["F".into(), "A".into()],
        vec![
            // beer: tough earns 1, wimpy 0, fight costs the wimp c
            vec![vec![-c, 1.0], vec![0.0, 1.0]],
            // quiche: wimpy earns 1, tough 0
            vec![vec![1.0 - c, 0.0], vec![1.0, 0.0]],
        ],
        vec![
            // fighting pays k against a wimp and -(1-k) against a tough type
            vec![vec![k, -(1.0 - k)], vec![0.0, 0.0]],
            vec![vec![k, -(1.0 - k)], vec![0.0, 0.0]],
        ],
    )
    .expect("validated parameters yield a well-formed game")
}

pub fn beer_quiche_scenario(p: &BeerQuicheParams) -> Scenario {
    let game = build_beer_quiche(p);
    let family = InterimPayoffFamily::from_game(&game);
    let knots = vec![
        Belief::binary(p.fight_threshold).expect("threshold in range"),
        Belief::binary(p.inversion_threshold()).expect("threshold in range"),
    ];
    Scenario {
        name: "beer-quiche".into(),
        game: Some(game),
        family,
        knots,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BeerQuicheReference {
    /// Best payoff attainable in an equilibrium of the uncommitted game.
    pub equilibrium_payoff: f64,
    pub v_jo: f64,
    pub v_co: f64,
    pub v_pp: f64,
    pub inversion_threshold: f64,
}

/// Closed-form values at a prior probability of the tough type.
pub fn beer_quiche_reference(p: &BeerQuicheParams, prior: f64) -> BeerQuicheReference {
    let c = p.fight_cost;
    let k = p.fight_threshold;
    let mu = prior;
    let mu_tilde = p.inversion_threshold();

    let equilibrium_payoff = if mu < k {
        mu + (1.0 - mu) * (1.0 - c)
    } else {
        mu
    };

    let v_jo = if mu <= mu_tilde {
        (1.0 - mu / k) * (1.0 - c) + (mu / k) * k
    } else if mu < k {
        -c + mu * (c + 1.0 - k) / k
    } else {
        (1.0 - k) + (mu - k) * k / (1.0 - k)
    };

    let v_co = if mu <= k {
        (1.0 - c) + mu * ((1.0 - k) - (1.0 - c)) / k
    } else {
        (1.0 - k) + (mu - k) * k / (1.0 - k)
    };

    let v_pp = if mu <= k {
        (1.0 - mu / k) * (1.0 - c) + mu
    } else {
        mu
    };

    BeerQuicheReference {
        equilibrium_payoff,
        v_jo,
        v_co,
        v_pp,
        inversion_threshold: mu_tilde,
    }
}

/// The pooling-on-beer equilibrium belief system at a prior `mu >= k`:
/// both types drink beer, quiche is punished with a zero off-path belief.
pub fn beer_quiche_pooling_system(p: &BeerQuicheParams, prior: f64) -> Result<BeliefSystem> {
    if prior < p.fight_threshold {
        return Err(Error::InvalidParams(format!(
            "pooling on beer requires a prior of at least {}, got {prior}",
            p.fight_threshold
        )));
    }
    BeliefSystem::new(vec![
        (Belief::binary(prior)?, 1.0),
        (Belief::binary(0.0)?, 0.0),
    ])
}

/// The semi-separating equilibrium belief system at a prior `0 < mu <= k`:
/// the tough type drinks beer, the wimpy type mixes so the beer posterior
/// lands exactly on the fight threshold; quiche reveals the wimp.
pub fn beer_quiche_semi_separating_system(
    p: &BeerQuicheParams,
    prior: f64,
) -> Result<BeliefSystem> {
    let k = p.fight_threshold;
    if !(0.0 < prior && prior <= k) {
        return Err(Error::InvalidParams(format!(
            "semi-separation requires a prior in (0, {k}], got {prior}"
        )));
    }
    let tau_beer = prior / k;
    BeliefSystem::new(vec![
        (Belief::binary(k)?, tau_beer),
        (Belief::binary(0.0)?, 1.0 - tau_beer),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::TieBreak;

    fn params() -> BeerQuicheParams {
        BeerQuicheParams::new(1.15, 0.4).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(BeerQuicheParams::new(1.0, 0.4).is_err());
        assert!(BeerQuicheParams::new(2.0, 0.5).is_err());
        assert!(BeerQuicheParams::new(2.0, 0.0).is_err());
    }

    #[test]
    fn interim_payoffs_match_formulas() {
        let p = params();
        let game = build_beer_quiche(&p);
        let fam = InterimPayoffFamily::from_game(&game);
        let (c, k) = (p.fight_cost, p.fight_threshold);
        for i in 0..=100 {
            let mu = i as f64 / 100.0;
            let b = Belief::binary(mu).unwrap();
            let fight = if mu < k { 1.0 } else { 0.0 };
            let want_b = mu - c * (1.0 - mu) * fight;
            let want_q = (1.0 - mu) * (1.0 - c * fight);
            assert!((fam.value(&b, 0) - want_b).abs() < 1e-12, "B at {mu}");
            assert!((fam.value(&b, 1) - want_q).abs() < 1e-12, "Q at {mu}");
        }
        // Spot values: the boundary point belongs to the no-fight branch.
        assert!((fam.value(&Belief::binary(0.3).unwrap(), 0) + 0.505).abs() < 1e-12);
        assert!((fam.value(&Belief::binary(0.4).unwrap(), 1) - 0.6).abs() < 1e-12);
        assert!((fam.value(&Belief::binary(1.0).unwrap(), 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_values() {
        let p = params();
        assert!((p.inversion_threshold() - 1.0 / 3.0).abs() < 1e-12);

        let r = beer_quiche_reference(&p, 0.2);
        assert!((r.equilibrium_payoff - 0.08).abs() < 1e-12);
        assert!((r.v_jo - 0.125).abs() < 1e-12);
        assert!((r.v_co - 0.225).abs() < 1e-12);
        assert!((r.v_pp - 0.125).abs() < 1e-12);

        let r = beer_quiche_reference(&p, 0.35);
        assert!((r.v_jo - 0.38125).abs() < 1e-12);
        assert!(r.v_jo > r.v_pp);
        assert!((r.v_pp - 0.33125).abs() < 1e-12);

        // Known wimp: everyone pools on quiche at value 1 - c.
        let r = beer_quiche_reference(&p, 0.0);
        assert!((r.equilibrium_payoff - (1.0 - 1.15)).abs() < 1e-12);
        assert!((r.v_jo - r.equilibrium_payoff).abs() < 1e-12);
        assert!((r.v_co - r.equilibrium_payoff).abs() < 1e-12);
        assert!((r.v_pp - r.equilibrium_payoff).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_systems_are_consistent() {
        let p = params();
        let game = build_beer_quiche(&p);
        // Semi-separating at prior 0.2: the wimpy type's indifference pins
        // the equilibrium payoff.
        let bs = beer_quiche_semi_separating_system(&p, 0.2).unwrap();
        let value: f64 = bs
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight > 0.0)
            .map(|(s, e)| {
                e.weight
                    * game
                        .interim_payoff(&e.belief, s, TieBreak::SenderPreferred)
                        .unwrap()
            })
            .sum();
        let r = beer_quiche_reference(&p, 0.2);
        // The belief-system value uses sender-preferred responses at the
        // threshold, which tops the mixed-response equilibrium payoff.
        assert!(value >= r.equilibrium_payoff - 1e-12);

        let bs = beer_quiche_pooling_system(&p, 0.6).unwrap();
        assert!((bs.weight(0) - 1.0).abs() < 1e-12);
        assert!(beer_quiche_pooling_system(&p, 0.2).is_err());
    }
}
